"""Property suites run by ``gridrv verify``.

Each suite returns a list of Check records; a suite passes when every check
does. The parameters are small enough for a laptop run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import islice, product
from typing import Callable

from .agent import assumption_route, rv_route, AgentProgram
from .decomposition import (
    Assumption,
    Harvest,
    Part,
    PushPattern,
    assumption_items,
    bd,
    l1_count,
    l2_count,
    max_first_param,
    powers_of_two_below,
    rho,
)
from .explore import exhaustive_explore, meets_by_min, pushes
from .grid import ball_size, backtrack
from .labels import transform
from .patterns import (
    Berry,
    Cloudberry,
    Pattern,
    RepeatSeed,
    Seed,
    bounding_radius,
    cost,
    first_period_length,
    moves,
    position_at,
)

SUITES = ("patterns", "decomposition", "push", "costs")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {"suite": self.suite, "name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def _timed(suite: str, name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is reported as a failure, not raised
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(suite, name, ok, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Walk helpers
# ---------------------------------------------------------------------------


def walk_nodes(dirs, start=(0, 0)) -> list[tuple[int, int]]:
    x, y = start
    out = [(x, y)]
    for d in dirs:
        x += d.dx
        y += d.dy
        out.append((x, y))
    return out


def walk_edges(dirs, start=(0, 0)) -> set[frozenset]:
    nodes = walk_nodes(dirs, start)
    return {frozenset(e) for e in zip(nodes, nodes[1:])}


def ball_nodes(r: int) -> set[tuple[int, int]]:
    return {(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if abs(x) + abs(y) <= r}


def ball_edges(r: int) -> set[frozenset]:
    ball = ball_nodes(r)
    return {frozenset(((x, y), (x + dx, y + dy))) for x, y in ball
            for dx, dy in ((1, 0), (0, 1)) if (x + dx, y + dy) in ball}


def first_period(p: Pattern) -> list:
    return list(islice(moves(p), first_period_length(p)))


def descriptors_up_to_radius(r: int, h_values: int = 3, repeats: int = 3):
    """Every descriptor with bounding radius <= r (Cloudberry h and RepeatSeed n sampled)."""
    for x in range(r + 1):
        yield Seed(x)
        for n in range(repeats + 1):
            yield RepeatSeed(x, n)
    for x, y in product(range(r + 1), repeat=2):
        if x + y <= r:
            yield Berry(x, y)
    for x, y, z in product(range(r + 1), repeat=3):
        if x + y + z <= r:
            for h in range(min(h_values, ball_size(z) + 1)):
                yield Cloudberry(x, y, z, h)


# ---------------------------------------------------------------------------
# patterns
# ---------------------------------------------------------------------------


def _seed_coverage(x: int) -> tuple[bool, str]:
    route = list(moves(Seed(x)))
    nodes, edges = set(walk_nodes(route)), walk_edges(route)
    ok = nodes == ball_nodes(x) and edges == ball_edges(x)
    return ok, f"{len(nodes)} nodes, {len(edges)} edges"


def _seed_prefix(max_x: int) -> tuple[bool, str]:
    periods = [first_period(Seed(x)) for x in range(max_x + 1)]
    bad = [(a, b) for a in range(max_x + 1) for b in range(a, max_x + 1)
           if periods[b][:len(periods[a])] != periods[a]]
    return not bad, f"failing pairs {bad}" if bad else f"x <= {max_x}"


def _berry_prefix(max_sum: int) -> tuple[bool, str]:
    pairs = [(x, y) for x in range(max_sum + 1) for y in range(max_sum + 1) if x + y <= max_sum]
    periods = {xy: first_period(Berry(*xy)) for xy in pairs}
    bad = [(a, b) for a in pairs for b in pairs if sum(a) <= sum(b)
           and periods[b][:len(periods[a])] != periods[a]]
    return not bad, f"failing pairs {bad[:5]}" if bad else f"x+y <= {max_sum}"


def _second_period_backtracks(r: int) -> tuple[bool, str]:
    bad = []
    count = 0
    for p in descriptors_up_to_radius(r, h_values=2):
        if isinstance(p, RepeatSeed):
            continue
        count += 1
        route = list(moves(p))
        half = len(route) // 2
        if route[half:] != list(backtrack(route[:half])):
            bad.append(str(p))
    return not bad, f"failing {bad[:5]}" if bad else f"{count} descriptors"


def _repeat_is_copies() -> tuple[bool, str]:
    cases = [(x, n) for x in range(4) for n in range(4)]
    ok = all(list(moves(RepeatSeed(x, n))) == list(moves(Seed(x))) * n for x, n in cases)
    return ok, f"{len(cases)} descriptors"


def _berry_covers_seeds(max_sum: int) -> tuple[bool, str]:
    """Berry(x, y) traverses every edge of Seed(x) run from each node within y."""
    for x in range(max_sum + 1):
        for y in range(max_sum + 1 - x):
            have = walk_edges(moves(Berry(x, y)))
            seed = list(moves(Seed(x)))
            for v in ball_nodes(y):
                if not walk_edges(seed, v) <= have:
                    return False, f"Berry({x},{y}) misses Seed({x}) at {v}"
    return True, f"x+y <= {max_sum}"


def _closed_routes(r: int) -> tuple[bool, str]:
    bad = [str(p) for p in descriptors_up_to_radius(r) if position_at(p, cost(p)) != (0, 0)]
    return not bad, f"not closed {bad[:5]}" if bad else "all routes return to their start"


def _within_radius(r: int) -> tuple[bool, str]:
    bad = []
    for p in descriptors_up_to_radius(r, h_values=1, repeats=1):
        rad = bounding_radius(p)
        if any(abs(x) + abs(y) > rad for x, y in walk_nodes(moves(p))):
            bad.append(str(p))
    return not bad, f"escapes {bad[:5]}" if bad else "every route stays in its bounding ball"


def suite_patterns() -> list[Check]:
    s = "patterns"
    checks = [_timed(s, f"seed-covers-ball x={x}", lambda x=x: _seed_coverage(x)) for x in range(1, 7)]
    checks += [
        _timed(s, "seed-first-period-prefix", lambda: _seed_prefix(6)),
        _timed(s, "berry-first-period-prefix", lambda: _berry_prefix(4)),
        _timed(s, "second-period-is-backtrack", lambda: _second_period_backtracks(4)),
        _timed(s, "repeatseed-is-repeated-seed", _repeat_is_copies),
        _timed(s, "berry-runs-seed-around-ball", lambda: _berry_covers_seeds(3)),
        _timed(s, "routes-are-closed", lambda: _closed_routes(4)),
        _timed(s, "routes-within-bounding-radius", lambda: _within_radius(4)),
    ]
    return checks


# ---------------------------------------------------------------------------
# costs
# ---------------------------------------------------------------------------


def _cost_vs_enumeration(r: int) -> tuple[bool, str]:
    bad, count = [], 0
    for p in descriptors_up_to_radius(r):
        count += 1
        n = sum(1 for _ in moves(p))
        if n != cost(p):
            bad.append(f"{p}: {cost(p)} != {n}")
    return not bad, "; ".join(bad[:5]) if bad else f"{count} descriptors"


def _seed_closed_form(max_x: int) -> tuple[bool, str]:
    bad = [x for x in range(max_x + 1)
           if not cost(Seed(x)) == 8 * x * x + 10 * x == sum(1 for _ in moves(Seed(x)))]
    return not bad, f"failing x {bad}" if bad else f"x <= {max_x}"


def _exact(p: Pattern, value: int) -> tuple[bool, str]:
    n = sum(1 for _ in moves(p))
    return cost(p) == value == n, f"cost {cost(p)}, enumerated {n}"


def suite_costs() -> list[Check]:
    s = "costs"
    checks = [
        _timed(s, "cost-equals-route-length r<=5", lambda: _cost_vs_enumeration(5)),
        _timed(s, "seed-cost-closed-form", lambda: _seed_closed_form(50)),
        _timed(s, "berry(1,1)-cost", lambda: _exact(Berry(1, 1), 432)),
    ]
    checks += [_timed(s, f"cloudberry(1,1,1,{h})-cost", lambda h=h: _exact(Cloudberry(1, 1, 1, h), 4516))
               for h in range(5)]
    return checks


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------


def _lengths(d: int) -> tuple[bool, str]:
    label = transform(0)
    n1 = len(bd(Assumption(d), label))
    n2 = len(bd(Harvest(d), label))
    return n1 == l1_count(d) and n2 == l2_count(d), f"L1={n1}/{l1_count(d)} L2={n2}/{l2_count(d)}"


def _max_first(d: int) -> tuple[bool, str]:
    got = max(p.x for p in bd(Assumption(d), transform(0)))
    want = rho(2 * d) - 3 * d
    return got == want == max_first_param(d), f"max first parameter {got}, expected {want}"


def _step_shapes(d: int) -> tuple[bool, str]:
    for label in (0, 1, 5):
        for p, ctx in assumption_items(d, transform(label)):
            if ctx.part is not Part.STEP:
                continue
            if isinstance(p, Berry) and p.y != d:
                return False, f"{p} in step {ctx}"
            if isinstance(p, Cloudberry) and (p.y, p.z) != (d, d):
                return False, f"{p} in step {ctx}"
    return True, "step patterns carry d"


def _push_label_independent() -> tuple[bool, str]:
    a = bd(PushPattern(1, 2), transform(0))
    b = bd(PushPattern(1, 2), transform(5))
    return a == b, f"{len(a)} descriptors"


def _push_first_param(d1: int, d2: int) -> tuple[bool, str]:
    got = max(p.x for p in bd(PushPattern(d1, d2), transform(0)))
    bound = max_first_param(d1) + 3 * d2
    return got <= bound, f"{got} <= {bound}"


def _perfect(d: int) -> tuple[bool, str]:
    """The agent route is exactly bd(Assumption(d)) and each pattern returns home."""
    for label in (0, 1, 2, 5):
        t = transform(label)
        want = bd(Assumption(d), t)
        cursor = assumption_route(label, d)
        got, total = [], 0
        while (cur := cursor.current()) is not None:
            got.append(cur[0])
            total += cursor.finish_descriptor()
        if got != want or total != sum(cost(p) for p in want):
            return False, f"label {label}: route differs from decomposition"
        if any(position_at(p, cost(p)) != (0, 0) for p in want):
            return False, f"label {label}: a pattern does not return to its start"
        rv = rv_route(AgentProgram(label))
        rv.skip(sum(cost(p) for b in powers_of_two_below(d) for p in bd(Assumption(b), t)))
        if rv.current()[0] != want[0]:
            return False, f"label {label}: main loop does not reach Assumption({d})"
    return True, "labels 0, 1, 2, 5"


def suite_decomposition() -> list[Check]:
    s = "decomposition"
    checks = [_timed(s, f"decomposition-lengths d={d}", lambda d=d: _lengths(d)) for d in (1, 2, 4, 8)]
    checks += [_timed(s, f"max-first-parameter d={d}", lambda d=d: _max_first(d)) for d in (1, 2, 4)]
    checks += [_timed(s, f"step-patterns-use-d d={d}", lambda d=d: _step_shapes(d)) for d in (1, 2, 4)]
    checks.append(_timed(s, "pushpattern-label-independent", _push_label_independent))
    checks += [_timed(s, f"pushpattern-first-parameter d1={a} d2={b}",
                      lambda a=a, b=b: _push_first_param(a, b))
               for a, b in ((1, 2), (1, 4), (2, 4), (1, 8), (2, 8), (4, 8))]
    checks += [_timed(s, f"decomposition-is-perfect d={d}", lambda d=d: _perfect(d)) for d in (1, 2)]
    return checks


# ---------------------------------------------------------------------------
# push
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PushCase:
    """Route A runs from the origin, route B from ``offset``.

    kind "meet": A concurrently precedes B and every schedule must meet before
    either route finishes. kind "push": B (the leader) concurrently precedes A
    and A must push B.
    """

    family: str
    route_a: tuple[Pattern, ...]
    route_b: tuple[Pattern, ...]
    offset: tuple[int, int]
    kind: str

    @property
    def name(self) -> str:
        a = "+".join(map(str, self.route_a))
        b = "+".join(map(str, self.route_b))
        return f"{self.family} {a} vs {b} at {self.offset}"

    def holds(self) -> tuple[bool, str]:
        leader = "A" if self.kind == "meet" else "B"
        out = exhaustive_explore(self.route_a, self.route_b, self.offset, leader=leader,
                                 max_total_moves=10**6, max_states=10**10)
        ok = meets_by_min(out) if self.kind == "meet" else pushes(out, "A")
        return ok, ", ".join(sorted(map(str, out)))


def _push_cases() -> list[PushCase]:
    cases = []
    for x1, x2 in ((1, 1), (1, 2), (2, 2)):
        cases.append(PushCase("seeds-meet-by-min", (Seed(x1),), (Seed(x2),), (0, 0), "meet"))
    for a, b in (((1, 0), (1, 0)), ((1, 0), (0, 1)), ((0, 1), (1, 1)), ((1, 1), (1, 1)),
                 ((1, 0), (2, 0)), ((1, 1), (0, 2)), ((0, 2), (2, 0))):
        cases.append(PushCase("berries-meet-by-min", (Berry(*a),), (Berry(*b),), (0, 0), "meet"))
    for (x, y), off, x2 in (((1, 0), (1, 0), 2), ((1, 0), (0, -1), 2), ((0, 1), (1, 0), 2),
                            ((1, 0), (2, 0), 3), ((1, 0), (-1, 1), 3), ((1, 1), (1, 0), 3),
                            ((0, 2), (0, -1), 3), ((1, 1), (1, 1), 4)):
        b = Berry(x, y)
        cases.append(PushCase("repeatseed-pushes-berry", (RepeatSeed(x2, cost(b)),), (b,), off, "push"))
    for (x2, y), (x1, n), off in (((1, 1), (1, 3), (1, 0)), ((1, 2), (1, 2), (1, 1)),
                                  ((2, 1), (2, 2), (0, 1)), ((1, 2), (1, 3), (2, 0)),
                                  ((1, 2), (1, 3), (-1, 1)), ((2, 2), (2, 1), (2, 0)),
                                  ((2, 2), (1, 2), (1, -1))):
        cases.append(PushCase("berry-pushes-repeatseed", (Berry(x2, y),), (RepeatSeed(x1, n),), off, "push"))
    for cb, x2, off in ((Cloudberry(0, 1, 1, 0), 3, (1, 0)), (Cloudberry(1, 0, 1, 0), 3, (0, 1)),
                        (Cloudberry(0, 0, 1, 2), 2, (1, 0)), (Cloudberry(0, 0, 2, 1), 4, (2, 0))):
        cases.append(PushCase("repeatseed-pushes-cloudberry", (RepeatSeed(x2, cost(cb)),), (cb,), off, "push"))
    seq = (RepeatSeed(1, 1), Berry(1, 1))
    for h, off in product(range(5), ((1, 0), (0, -1))):
        cases.append(PushCase("cloudberry-pushes-sequence", (Cloudberry(1, 1, 1, h),), seq, off, "push"))
    return cases


PUSH_CASES = tuple(_push_cases())


def suite_push() -> list[Check]:
    return [_timed("push", c.name, c.holds) for c in PUSH_CASES]


_RUNNERS = {
    "patterns": suite_patterns,
    "decomposition": suite_decomposition,
    "push": suite_push,
    "costs": suite_costs,
}


def run_suite(name: str) -> list[Check]:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return _RUNNERS[name]()
