"""The four basic movement patterns: Seed, RepeatSeed, Berry and Cloudberry.

Every route is produced lazily and can be entered at an arbitrary move offset.
Seeking relies on exact closed-form prefix sums, so offsets far beyond what can
be enumerated (costs routinely exceed 2**64) are located in logarithmic time.

Seed, Berry and Cloudberry are made of a first period followed by its
backtrack. Their first periods are concatenations of *units*; each unit of
Berry is a closed walk equal to its own backtrack, and the backtrack of a
Cloudberry unit simply swaps its Seed and Berry parts. That is what makes
reverse iteration cheap.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import lru_cache
from itertools import islice
from math import isqrt
from typing import Callable, Iterator, Union

from .grid import (
    Direction,
    E,
    N,
    Node,
    S,
    W,
    backtrack,
    ball_size,
    canonical_offset_path,
    displacement,
    ring_offsets,
)


def _check_non_negative(**params: int) -> None:
    for name, value in params.items():
        if not isinstance(value, int) or value < 0:
            raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


@dataclass(frozen=True)
class Seed:
    x: int

    def __post_init__(self) -> None:
        _check_non_negative(x=self.x)

    def __str__(self) -> str:
        return f"Seed({self.x})"


@dataclass(frozen=True)
class RepeatSeed:
    x: int
    n: int

    def __post_init__(self) -> None:
        _check_non_negative(x=self.x, n=self.n)

    def __str__(self) -> str:
        return f"RepeatSeed({self.x},{self.n})"


@dataclass(frozen=True)
class Berry:
    x: int
    y: int

    def __post_init__(self) -> None:
        _check_non_negative(x=self.x, y=self.y)

    def __str__(self) -> str:
        return f"Berry({self.x},{self.y})"


@dataclass(frozen=True)
class Cloudberry:
    x: int
    y: int
    z: int
    h: int

    def __post_init__(self) -> None:
        _check_non_negative(x=self.x, y=self.y, z=self.z, h=self.h)

    def __str__(self) -> str:
        return f"Cloudberry({self.x},{self.y},{self.z},{self.h})"


Pattern = Union[Seed, RepeatSeed, Berry, Cloudberry]

PATTERN_TYPES = {cls.__name__: cls for cls in (Seed, RepeatSeed, Berry, Cloudberry)}


def parse_pattern(text: str) -> Pattern:
    """Parse ``"Cloudberry(1,1,1,0)"`` style descriptors."""
    text = text.strip()
    name, sep, rest = text.partition("(")
    if not sep or not rest.endswith(")") or name not in PATTERN_TYPES:
        raise ValueError(f"malformed pattern descriptor: {text!r}")
    body = rest[:-1].strip()
    try:
        args = [int(a) for a in body.split(",")] if body else []
    except ValueError:
        raise ValueError(f"malformed pattern descriptor: {text!r}") from None
    try:
        return PATTERN_TYPES[name](*args)
    except TypeError:
        raise ValueError(f"wrong number of parameters in {text!r}") from None


def params(p: Pattern) -> tuple[int, ...]:
    if isinstance(p, Seed):
        return (p.x,)
    if isinstance(p, RepeatSeed):
        return (p.x, p.n)
    if isinstance(p, Berry):
        return (p.x, p.y)
    return (p.x, p.y, p.z, p.h)


# ---------------------------------------------------------------------------
# Exact costs and prefix sums
# ---------------------------------------------------------------------------


def seed_cost(x: int) -> int:
    return 8 * x * x + 10 * x


def _seed_first_len(x: int) -> int:
    return 4 * x * x + 5 * x


def _seed_phase_start(i: int) -> int:
    # moves before phase i (phases are 1-based, phase i has 8i + 1 moves)
    return 4 * i * i - 3 * i - 1


def _berry_outer_prefix(i: int) -> int:
    # first-period moves spent in outer iterations 1 .. i-1
    return i * (i - 1) * (i + 1) * (4 * i**3 + 21 * i**2 + 29 * i + 21) // 45


def _berry_middle_prefix(i: int, j: int) -> int:
    # moves of outer iteration i spent in middle iterations 0 .. j-1
    return (
        j
        * (
            80 * i * i * j * j
            + 40 * i * i
            - 120 * i * j**3
            + 180 * i * j * j
            + 90 * i
            + 48 * j**4
            - 125 * j**3
            + 50 * j * j
            - 10 * j
            + 37
        )
        // 15
    )


def _berry_ring_prefix(k: int, s: int) -> int:
    # moves spent on rings 0 .. k-1 when each visit costs 2*dist + s
    if k == 0:
        return 0
    return (8 * k**3 + 6 * k * k * s - 12 * k * k - 6 * k * s + 4 * k + 3 * s) // 3


def _berry_first_len(n: int) -> int:
    return _berry_outer_prefix(n + 1)


def berry_cost(x: int, y: int) -> int:
    return 2 * _berry_first_len(x + y)


def _ball_distance_sum(z: int) -> int:
    return 2 * z * (z + 1) * (2 * z + 1) // 3


def _cloudberry_unit_core(x: int, y: int) -> int:
    return seed_cost(x) + berry_cost(x, y)


def cloudberry_cost(x: int, y: int, z: int, h: int = 0) -> int:
    first = 2 * _ball_distance_sum(z) + ball_size(z) * _cloudberry_unit_core(x, y)
    return 2 * first


@lru_cache(maxsize=1 << 16)
def cost(p: Pattern) -> int:
    """Exact number of edge traversals of the pattern's route."""
    if isinstance(p, Seed):
        return seed_cost(p.x)
    if isinstance(p, RepeatSeed):
        return p.n * seed_cost(p.x)
    if isinstance(p, Berry):
        return berry_cost(p.x, p.y)
    if isinstance(p, Cloudberry):
        return cloudberry_cost(p.x, p.y, p.z, p.h)
    raise TypeError(f"not a pattern: {p!r}")


def bounding_radius(p: Pattern) -> int:
    """Largest L1 distance from the start node reached by the route."""
    if isinstance(p, (Seed, RepeatSeed)):
        return p.x if cost(p) else 0
    if isinstance(p, Berry):
        return p.x + p.y
    if isinstance(p, Cloudberry):
        return p.x + p.y + p.z
    raise TypeError(f"not a pattern: {p!r}")


def _largest(lo: int, hi: int, ok: Callable[[int], bool]) -> int:
    """Largest v in [lo, hi] with ok(v); ok must be monotone and ok(lo) true."""
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


# ---------------------------------------------------------------------------
# Seed
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _phase_word(i: int) -> tuple[Direction, ...]:
    return (N,) + (S, E) * i + (W, S) * i + (N, W) * i + (E, N) * i


@lru_cache(maxsize=4096)
def _phase_word_back(i: int) -> tuple[Direction, ...]:
    return backtrack(_phase_word(i))


_SMALL_SEED = 64


@lru_cache(maxsize=_SMALL_SEED + 1)
def _seed_tuple(x: int) -> tuple[Direction, ...]:
    first: list[Direction] = []
    for i in range(1, x + 1):
        first.extend(_phase_word(i))
    return tuple(first) + backtrack(first)


def _seed_locate(x: int, p: int) -> tuple[int, int]:
    """Phase and offset within it of first-period move index ``p``."""
    i = (3 + isqrt(9 + 16 * (p + 1))) // 8
    i = max(1, min(i, x))
    while i < x and _seed_phase_start(i + 1) <= p:
        i += 1
    while i > 1 and _seed_phase_start(i) > p:
        i -= 1
    return i, p - _seed_phase_start(i)


def _seed_first_fwd(x: int, p: int) -> Iterator[Direction]:
    if p >= _seed_first_len(x):
        return
    i, o = _seed_locate(x, p)
    yield from islice(_phase_word(i), o, None)
    for i in range(i + 1, x + 1):
        yield from _phase_word(i)


def _seed_back(x: int, b: int) -> Iterator[Direction]:
    first = _seed_first_len(x)
    if b >= first:
        return
    i, o = _seed_locate(x, first - 1 - b)
    word = _phase_word_back(i)
    yield from islice(word, len(word) - 1 - o, None)
    for i in range(i - 1, 0, -1):
        yield from _phase_word_back(i)


def seed_moves(x: int, start: int = 0) -> Iterator[Direction]:
    if x <= _SMALL_SEED:
        route = _seed_tuple(x)
        return iter(route) if start == 0 else islice(route, start, None)
    return _closed_moves(_seed_first_len(x), start, lambda p: _seed_first_fwd(x, p),
                         lambda b: _seed_back(x, b))


def _phase_position(i: int, o: int) -> tuple[int, int]:
    """Node reached after ``o`` moves of phase ``i``, which starts at (0, i-1)."""
    if o == 0:
        return 0, i - 1
    o -= 1
    leg, t = divmod(o, 2 * i)
    if leg == 4:
        return 0, i
    a, odd = divmod(t, 2)
    if leg == 0:  # (S,E)^i from (0, i)
        return a, i - a - odd
    if leg == 1:  # (W,S)^i from (i, 0)
        return i - a - odd, -a
    if leg == 2:  # (N,W)^i from (0, -i)
        return -a, -i + a + odd
    return -i + a + odd, a  # (E,N)^i from (-i, 0)


def _seed_first_position(x: int, q: int) -> tuple[int, int]:
    if q <= 0:
        return 0, 0
    if q >= _seed_first_len(x):
        return 0, x
    return _phase_position(*_seed_locate(x, q))


# ---------------------------------------------------------------------------
# Shared helpers for closed two-period patterns
# ---------------------------------------------------------------------------


def _closed_moves(first_len: int, start: int, fwd, back) -> Iterator[Direction]:
    if start < first_len:
        yield from fwd(start)
        start = first_len
    yield from back(start - first_len)


def _fold(first_len: int, m: int) -> int:
    """First-period offset with the same position as overall offset ``m``."""
    return m if m <= first_len else 2 * first_len - m


Part = tuple[int, Callable[[int], Iterator[Direction]]]


def _path_part(path: tuple[Direction, ...]) -> Part:
    return len(path), lambda o: islice(path, o, None)


def _parts_moves(parts: list[Part], o: int) -> Iterator[Direction]:
    for length, gen in parts:
        if o < length:
            yield from gen(o)
            o = 0
        else:
            o -= length


# ---------------------------------------------------------------------------
# Berry
# ---------------------------------------------------------------------------


def _berry_locate(n: int, p: int) -> tuple[int, int, int, int, int]:
    """Unit coordinates (i, j, k, ring index, offset in unit) of first-period move ``p``."""
    i = _largest(1, n, lambda v: _berry_outer_prefix(v) <= p)
    rem = p - _berry_outer_prefix(i)
    j = _largest(0, i, lambda v: _berry_middle_prefix(i, v) <= rem)
    rem -= _berry_middle_prefix(i, j)
    s = seed_cost(i - j)
    k = _largest(0, j, lambda v: _berry_ring_prefix(v, s) <= rem)
    rem -= _berry_ring_prefix(k, s)
    unit = 2 * k + s
    return i, j, k, rem // unit, rem % unit


def _berry_units_fwd(n, i, j, k, vi) -> Iterator[tuple[tuple[int, int], int]]:
    while i <= n:
        while j <= i:
            s = i - j
            while k <= j:
                ring = ring_offsets(k)
                for idx in range(vi, len(ring)):
                    yield ring[idx], s
                vi = 0
                k += 1
            k = 0
            j += 1
        j = 0
        i += 1


def _berry_units_rev(i, j, k, vi) -> Iterator[tuple[tuple[int, int], int]]:
    while i >= 1:
        while j >= 0:
            s = i - j
            while k >= 0:
                ring = ring_offsets(k)
                for idx in range(vi, -1, -1):
                    yield ring[idx], s
                k -= 1
                vi = 4 * k - 1 if k > 0 else 0
            j -= 1
            k = j
            vi = 4 * k - 1 if k > 0 else 0
        i -= 1
        j = k = i
        vi = 4 * k - 1 if k > 0 else 0


def _seed_unit_parts(v: tuple[int, int], s: int) -> list[Part]:
    there = canonical_offset_path(v[0], v[1])
    back = canonical_offset_path(-v[0], -v[1])
    return [_path_part(there), (seed_cost(s), lambda o: seed_moves(s, o)), _path_part(back)]


def _berry_first_fwd(n: int, p: int) -> Iterator[Direction]:
    if p >= _berry_first_len(n):
        return
    i, j, k, vi, o = _berry_locate(n, p)
    for v, s in _berry_units_fwd(n, i, j, k, vi):
        yield from _parts_moves(_seed_unit_parts(v, s), o)
        o = 0


def _berry_back(n: int, b: int) -> Iterator[Direction]:
    first = _berry_first_len(n)
    if b >= first:
        return
    i, j, k, vi, o = _berry_locate(n, first - 1 - b)
    # Units are their own backtrack: entering unit U backwards at index o is
    # the same as reading U forwards from len(U) - 1 - o.
    o = 2 * k + seed_cost(i - j) - 1 - o
    for v, s in _berry_units_rev(i, j, k, vi):
        yield from _parts_moves(_seed_unit_parts(v, s), o)
        o = 0


def berry_moves(x: int, y: int, start: int = 0) -> Iterator[Direction]:
    n = x + y
    return _closed_moves(_berry_first_len(n), start, lambda p: _berry_first_fwd(n, p),
                         lambda b: _berry_back(n, b))


def _path_position(dx: int, dy: int, o: int) -> tuple[int, int]:
    """Displacement after ``o`` moves of the canonical path to (dx, dy)."""
    sx = 1 if dx > 0 else -1
    if dy > 0:
        return (0, o) if o <= dy else (sx * (o - dy), dy)
    if o <= abs(dx):
        return sx * o, 0
    return dx, -(o - abs(dx))


def _seed_unit_position(v: tuple[int, int], s: int, o: int) -> tuple[int, int]:
    k = abs(v[0]) + abs(v[1])
    if o <= k:
        return _path_position(v[0], v[1], o)
    o -= k
    sl = seed_cost(s)
    if o <= sl:
        sx, sy = seed_position(s, o)
        return v[0] + sx, v[1] + sy
    bx, by = _path_position(-v[0], -v[1], o - sl)
    return v[0] + bx, v[1] + by


def _berry_first_position(n: int, q: int) -> tuple[int, int]:
    if q <= 0 or q >= _berry_first_len(n):
        return 0, 0
    i, j, k, vi, o = _berry_locate(n, q)
    return _seed_unit_position(ring_offsets(k)[vi], i - j, o)


# ---------------------------------------------------------------------------
# Cloudberry
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def first_visit_order(z: int) -> tuple[Node, ...]:
    """Nodes at distance <= z ordered by first visit along Seed(z) from the origin."""
    _check_non_negative(z=z)
    seen = {(0, 0)}
    order = [Node(0, 0)]
    x = y = 0
    for d in _seed_first_fwd(z, 0):
        dx, dy = d.value
        x += dx
        y += dy
        if (x, y) not in seen:
            seen.add((x, y))
            order.append(Node(x, y))
    return tuple(order)


@lru_cache(maxsize=1024)
def _cloudberry_layout(x: int, y: int, z: int, h: int):
    order = first_visit_order(z)
    size = len(order)
    core = _cloudberry_unit_core(x, y)
    nodes = []
    starts = [0]
    for t in range(size):
        v = order[(h + t) % size]
        nodes.append((v.x, v.y))
        starts.append(starts[-1] + 2 * (abs(v.x) + abs(v.y)) + core)
    return tuple(nodes), tuple(starts)


def _cloudberry_unit_parts(v, x: int, y: int, reverse: bool) -> list[Part]:
    there = canonical_offset_path(v[0], v[1])
    back = canonical_offset_path(-v[0], -v[1])
    seed = (seed_cost(x), lambda o: seed_moves(x, o))
    berry = (berry_cost(x, y), lambda o: berry_moves(x, y, o))
    middle = [berry, seed] if reverse else [seed, berry]
    return [_path_part(there), *middle, _path_part(back)]


def _cloudberry_first_fwd(p: Cloudberry, start: int) -> Iterator[Direction]:
    nodes, starts = _cloudberry_layout(p.x, p.y, p.z, p.h)
    if start >= starts[-1]:
        return
    t = bisect.bisect_right(starts, start) - 1
    o = start - starts[t]
    for v in nodes[t:]:
        yield from _parts_moves(_cloudberry_unit_parts(v, p.x, p.y, False), o)
        o = 0


def _cloudberry_back(p: Cloudberry, b: int) -> Iterator[Direction]:
    nodes, starts = _cloudberry_layout(p.x, p.y, p.z, p.h)
    first = starts[-1]
    if b >= first:
        return
    q = first - 1 - b
    t = bisect.bisect_right(starts, q) - 1
    o = starts[t + 1] - 1 - q
    for v in reversed(nodes[: t + 1]):
        yield from _parts_moves(_cloudberry_unit_parts(v, p.x, p.y, True), o)
        o = 0


def cloudberry_moves(x: int, y: int, z: int, h: int, start: int = 0) -> Iterator[Direction]:
    p = Cloudberry(x, y, z, h)
    first = cost(p) // 2
    return _closed_moves(first, start, lambda s: _cloudberry_first_fwd(p, s),
                         lambda b: _cloudberry_back(p, b))


def _cloudberry_first_position(p: Cloudberry, q: int) -> tuple[int, int]:
    nodes, starts = _cloudberry_layout(p.x, p.y, p.z, p.h)
    if q <= 0 or q >= starts[-1]:
        return 0, 0
    t = bisect.bisect_right(starts, q) - 1
    o = q - starts[t]
    v = nodes[t]
    k = abs(v[0]) + abs(v[1])
    if o <= k:
        return _path_position(v[0], v[1], o)
    o -= k
    sl = seed_cost(p.x)
    if o <= sl:
        sx, sy = seed_position(p.x, o)
        return v[0] + sx, v[1] + sy
    o -= sl
    bl = berry_cost(p.x, p.y)
    if o <= bl:
        bx, by = berry_position(p.x, p.y, o)
        return v[0] + bx, v[1] + by
    rx, ry = _path_position(-v[0], -v[1], o - bl)
    return v[0] + rx, v[1] + ry


# ---------------------------------------------------------------------------
# RepeatSeed
# ---------------------------------------------------------------------------


def repeat_seed_moves(x: int, n: int, start: int = 0) -> Iterator[Direction]:
    period = seed_cost(x)
    if period == 0 or start >= n * period:
        return
    rep, o = divmod(start, period)
    if x <= _SMALL_SEED:
        route = _seed_tuple(x)
        if o:
            yield from islice(route, o, None)
            rep += 1
        for _ in range(rep, n):
            yield from route
        return
    for _ in range(rep, n):
        yield from seed_moves(x, o)
        o = 0


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def seed_position(x: int, m: int) -> tuple[int, int]:
    return _seed_first_position(x, _fold(_seed_first_len(x), m))


def berry_position(x: int, y: int, m: int) -> tuple[int, int]:
    n = x + y
    return _berry_first_position(n, _fold(_berry_first_len(n), m))


def moves(p: Pattern, start: int = 0) -> Iterator[Direction]:
    """Lazy route of ``p`` from move offset ``start`` (relative to its start node)."""
    if start < 0:
        raise ValueError("offset must be non-negative")
    if isinstance(p, Seed):
        return seed_moves(p.x, start)
    if isinstance(p, RepeatSeed):
        return repeat_seed_moves(p.x, p.n, start)
    if isinstance(p, Berry):
        return berry_moves(p.x, p.y, start)
    if isinstance(p, Cloudberry):
        return cloudberry_moves(p.x, p.y, p.z, p.h, start)
    raise TypeError(f"not a pattern: {p!r}")


def position_at(p: Pattern, m: int) -> tuple[int, int]:
    """Displacement from the start node after the first ``m`` moves of ``p``."""
    total = cost(p)
    if not 0 <= m <= total:
        raise ValueError(f"offset {m} outside [0, {total}]")
    if isinstance(p, Seed):
        return seed_position(p.x, m)
    if isinstance(p, RepeatSeed):
        if m == total:
            return 0, 0
        return seed_position(p.x, m % seed_cost(p.x))
    if isinstance(p, Berry):
        return berry_position(p.x, p.y, m)
    return _cloudberry_first_position(p, _fold(total // 2, m))


def first_period_length(p: Pattern) -> int:
    if isinstance(p, RepeatSeed):
        raise TypeError("RepeatSeed has repetitions, not two periods")
    return cost(p) // 2


class PatternRoute:
    """Pull-based route of a pattern; never materialized."""

    def __init__(self, pattern: Pattern):
        self.pattern = pattern
        self.length = cost(pattern)

    def __iter__(self) -> Iterator[Direction]:
        return moves(self.pattern)

    def iter_from(self, offset: int) -> Iterator[Direction]:
        return moves(self.pattern, offset)

    def position_at(self, offset: int) -> tuple[int, int]:
        return position_at(self.pattern, offset)

    @property
    def first_period_length(self) -> int:
        return first_period_length(self.pattern)

    def first_period(self) -> Iterator[Direction]:
        return islice(moves(self.pattern), self.first_period_length)

    def second_period(self) -> Iterator[Direction]:
        return moves(self.pattern, self.first_period_length)

    @property
    def period(self) -> int:
        """Length of one Seed repetition (RepeatSeed only)."""
        if not isinstance(self.pattern, RepeatSeed):
            raise TypeError("only RepeatSeed is periodic")
        return seed_cost(self.pattern.x)

    @property
    def repetitions(self) -> int:
        if not isinstance(self.pattern, RepeatSeed):
            raise TypeError("only RepeatSeed is periodic")
        return self.pattern.n if self.period else 0

    def __repr__(self) -> str:
        return f"PatternRoute({self.pattern}, length={self.length})"


def seed_route(x: int) -> PatternRoute:
    return PatternRoute(Seed(x))


def repeat_seed_route(x: int, n: int) -> PatternRoute:
    return PatternRoute(RepeatSeed(x, n))


def berry_route(x: int, y: int) -> PatternRoute:
    return PatternRoute(Berry(x, y))


def cloudberry_route(x: int, y: int, z: int, h: int) -> PatternRoute:
    return PatternRoute(Cloudberry(x, y, z, h))
