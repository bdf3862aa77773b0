"""Acceptance criteria 1-8. Each test prints a single PASS/FAIL line."""

from __future__ import annotations

import json
import math
import time
from itertools import islice, product

import pytest

from gridrv.agent import assumption_route
from gridrv.decomposition import (
    Assumption, Harvest, bd, cumulative_cost, l1_count, l2_count, max_first_param, rho,
)
from gridrv.grid import ball_size, backtrack
from gridrv.labels import transform
from gridrv.patterns import Berry, Cloudberry, RepeatSeed, Seed, cost, moves
from gridrv.simulator import Scenario, Simulation, StopReason, StrategySpec
from gridrv.verify import PUSH_CASES, descriptors_up_to_radius
from oracles import positions

LABELS = [(0, 1), (1, 2), (2, 5)]
OFFSETS = [(1, 0), (1, 1), (-2, 1)]  # D = 1, 2, 3
STRATEGIES = ["round_robin", "random:1", "random:2", "random:3", "freeze:B:3",
              "greedy_avoid", "mirror_progress"]
_E2E_SECONDS = [0.0]


@pytest.fixture
def say(capsys):
    def emit(n: int, ok: bool, detail: str, started: float) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {n} {'PASS' if ok else 'FAIL'}: {detail} "
                  f"[{time.perf_counter() - started:.1f}s]")
    return emit


def _first(p):
    return list(islice(moves(p), cost(p) // 2))


def test_criterion_1_seed_coverage(say):
    t0 = time.perf_counter()
    bad = []
    for x in range(1, 7):
        pts = positions(list(moves(Seed(x))))
        nodes = set(pts)
        edges = {frozenset(e) for e in zip(pts, pts[1:])}
        ball = {(a, b) for a in range(-x, x + 1) for b in range(-x, x + 1) if abs(a) + abs(b) <= x}
        inner = {frozenset(((a, b), (a + da, b + db))) for a, b in ball
                 for da, db in ((1, 0), (0, 1)) if (a + da, b + db) in ball}
        if nodes != ball or edges != inner:
            bad.append(x)
    ok = not bad
    say(1, ok, f"Seed(x) covers the ball exactly for x=1..6, failures {bad}", t0)
    assert ok


def test_criterion_2_prefix_and_backtrack(say):
    t0 = time.perf_counter()
    seeds = {x: _first(Seed(x)) for x in range(7)}
    seed_ok = all(seeds[b][:len(seeds[a])] == seeds[a] for a in range(7) for b in range(a, 7))
    pairs = [(x, y) for x in range(5) for y in range(5) if x + y <= 4]
    berries = {xy: _first(Berry(*xy)) for xy in pairs}
    berry_ok = all(berries[b][:len(berries[a])] == berries[a]
                   for a in pairs for b in pairs if sum(a) <= sum(b))
    back_bad = []
    for p in descriptors_up_to_radius(4, h_values=ball_size(4) + 1, repeats=0):
        if isinstance(p, RepeatSeed):
            continue
        route = list(moves(p))
        half = len(route) // 2
        if route[half:] != list(backtrack(route[:half])):
            back_bad.append(str(p))
    ok = seed_ok and berry_ok and not back_bad
    say(2, ok, f"seed prefix {seed_ok}, berry prefix {berry_ok}, backtrack failures {back_bad[:3]}", t0)
    assert ok


def test_criterion_3_cost_exactness(say):
    t0 = time.perf_counter()
    bad = []
    n = 0
    for p in descriptors_up_to_radius(5, h_values=ball_size(5) + 1):
        n += 1
        if sum(1 for _ in moves(p)) != cost(p):
            bad.append(str(p))
    seed_ok = all(cost(Seed(x)) == 8 * x * x + 10 * x == sum(1 for _ in moves(Seed(x)))
                  for x in range(51))
    berry_ok = cost(Berry(1, 1)) == 432 == sum(1 for _ in moves(Berry(1, 1)))
    cloud_ok = all(cost(Cloudberry(1, 1, 1, h)) == 4516 == sum(1 for _ in moves(Cloudberry(1, 1, 1, h)))
                   for h in range(5))
    ok = not bad and seed_ok and berry_ok and cloud_ok
    say(3, ok, f"{n} descriptors enumerated, mismatches {bad[:3]}, Seed/Berry/Cloudberry values "
               f"{seed_ok}/{berry_ok}/{cloud_ok}", t0)
    assert ok


def test_criterion_4_decomposition(say):
    t0 = time.perf_counter()
    t = transform(0)
    lengths = {d: (len(bd(Assumption(d), t)), len(bd(Harvest(d), t))) for d in (1, 2, 4, 8)}
    lengths_ok = all(v == (l1_count(d), l2_count(d)) for d, v in lengths.items())
    lengths_ok &= lengths[1][1] == 2
    maxima = {d: max(p.x for p in bd(Assumption(d), t)) for d in (1, 2, 4)}
    max_ok = all(maxima[d] == rho(2 * d) - 3 * d == max_first_param(d) for d in maxima)
    perfect = True
    for d, label in product((1, 2), (0, 1, 2, 5)):
        want = bd(Assumption(d), transform(label))
        cur = assumption_route(label, d)
        got, total = [], 0
        while (c := cur.current()) is not None:
            got.append(c[0])
            total += cur.finish_descriptor()
        perfect &= got == want and total == sum(cost(p) for p in want)
    ok = lengths_ok and max_ok and perfect
    say(4, ok, f"lengths {lengths}, max first params {maxima}, perfect {perfect}", t0)
    assert ok


def test_criterion_5_push_lemmas(say):
    t0 = time.perf_counter()
    failures = []
    for case in PUSH_CASES:
        holds, detail = case.holds()
        if not holds:
            failures.append(f"{case.name}: {detail}")
    ok = not failures
    families = sorted({c.family for c in PUSH_CASES})
    say(5, ok, f"{len(PUSH_CASES) - len(failures)}/{len(PUSH_CASES)} instances hold "
               f"over {len(families)} families; failures {failures[:2]}", t0)
    assert ok


@pytest.fixture(scope="module")
def end_to_end():
    started = time.perf_counter()
    rows = []
    for (la, lb), off, strat in product(LABELS, OFFSETS, STRATEGIES):
        probe = Scenario(la, lb, off)
        d1 = probe.good_assumption
        sc = Scenario(la, lb, off, StrategySpec.parse(strat), budget=10**60, stop_bound=d1)
        rows.append((sc, d1, Simulation(sc, fast_forward=True).run()))
    _E2E_SECONDS[0] = time.perf_counter() - started
    return rows


def test_criterion_6_end_to_end(say, end_to_end):
    t0 = time.perf_counter() - _E2E_SECONDS[0]
    misses = [f"{sc.label_a},{sc.label_b} {sc.offset} {sc.strategy}: {rep.stop_reason.value}"
              for sc, _, rep in end_to_end
              if not (rep.met and rep.stop_reason is StopReason.MEETING)]
    ok = not misses
    say(6, ok, f"{len(end_to_end) - len(misses)}/{len(end_to_end)} runs meet before Assumption(d1) "
               f"completes; misses {misses[:3]}", t0)
    assert ok


REGRESSION = [
    (0, 1, (1, 0), "round_robin", 10**6, None),
    (0, 1, (1, 0), "greedy_avoid", 400_000, None),
    (0, 1, (2, 0), "round_robin", 400_000, None),
    (0, 1, (-2, 1), "greedy_avoid", 300_000, None),
    (1, 2, (1, 1), "round_robin", 300_000, None),
    (1, 2, (0, 3), "mirror_progress", 10**6, None),
    (2, 5, (1, 0), "random:1", 10**6, None),
    (2, 5, (-2, 1), "random:2", 10**6, None),
    (0, 3, (3, 0), "random:3", 10**6, None),
    (0, 1, (1, 0), "freeze:B:3", 10**6, None),
    (1, 2, (2, 0), "freeze:A:2", 10**6, None),
    (0, 1, (9, 0), "freeze:B:1", 400_000, None),
    (4, 7, (6, -5), "round_robin", 300_000, None),
    (4, 7, (6, -5), "greedy_avoid", 300_000, None),
    (3, 6, (12, 0), "mirror_progress", 10**6, None),
    (0, 1, (1, 0), "round_robin", 10**6, 1),
    (1, 2, (30, 0), "round_robin", 300_000, None),
    (0, 2, (0, -7), "random:4", 10**6, None),
    (5, 9, (2, 2), "freeze:B:2", 500_000, None),
    (6, 1, (-1, -1), "greedy_avoid", 200_000, None),
]


def test_criterion_7_fast_forward_soundness(say):
    t0 = time.perf_counter()
    diffs = []
    reasons = set()
    for la, lb, off, strat, budget, bound in REGRESSION:
        sc = Scenario(la, lb, off, StrategySpec.parse(strat), budget, bound)
        fast = Simulation(sc, fast_forward=True).run()
        slow = Simulation(sc, fast_forward=False).run()
        reasons.add(fast.stop_reason.value)
        if json.dumps(fast.as_dict(), sort_keys=True) != json.dumps(slow.as_dict(), sort_keys=True):
            diffs.append(f"{la},{lb} {off} {strat}")
    ok = not diffs and len(REGRESSION) == 20
    say(7, ok, f"{len(REGRESSION) - len(diffs)}/{len(REGRESSION)} reports identical "
               f"(stop reasons {sorted(reasons)}); differing {diffs}", t0)
    assert ok


def test_criterion_8_cost_growth(say, end_to_end):
    t0 = time.perf_counter()
    t = transform(0)
    totals = {d: cumulative_cost(d, t) for d in (1, 2, 4, 8)}
    # Growth no faster than C * d^14: every doubling may multiply the total by at most 2^14.
    exponents = {d: math.log2(totals[2 * d] / totals[d]) for d in (1, 2, 4)}
    growth_ok = all(e <= 14 for e in exponents.values())
    over = [(sc.label_a, sc.label_b, sc.offset, str(sc.strategy)) for sc, d1, rep in end_to_end
            if rep.total > cumulative_cost(d1, transform(sc.label_a)) + cumulative_cost(d1, transform(sc.label_b))]
    bound_ok = not over
    ok = growth_ok and bound_ok
    say(8, ok, "per-doubling exponents "
               + ", ".join(f"{d}->{2 * d}: {e:.1f}" for d, e in exponents.items())
               + f" (limit 14) {'ok' if growth_ok else 'EXCEEDED'}; measured meeting cost within the "
               f"computed bound for {len(end_to_end) - len(over)}/{len(end_to_end)} runs", t0)
    assert ok
