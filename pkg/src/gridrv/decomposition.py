"""Sequences rho/r, basic decompositions of the procedures, and pattern counts.

A basic decomposition lists, in execution order, the basic pattern calls a
procedure issues. Every procedure of the algorithm is a plain concatenation of
such calls, so the decomposition describes its route exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterator, Union

from .labels import TransformedLabel, bit_at
from .patterns import Berry, Cloudberry, Pattern, RepeatSeed, cost


def is_power_of_two(i: int) -> bool:
    return isinstance(i, int) and i >= 1 and i & (i - 1) == 0


def _require_power_of_two(name: str, i: int) -> None:
    if not is_power_of_two(i):
        raise ValueError(f"{name} must be a power of two, got {i!r}")


def powers_of_two_below(d: int) -> list[int]:
    out, i = [], 1
    while i < d:
        out.append(i)
        i *= 2
    return out


@lru_cache(maxsize=None)
def rho(i: int) -> int:
    _require_power_of_two("i", i)
    if i == 1:
        return 1
    h = i // 2
    return r(h) + (3 * i // 2) * (h * (i * (h + 1) + 1) + 1)


def r(i: int) -> int:
    _require_power_of_two("i", i)
    return rho(i) + 3 * i


# ---------------------------------------------------------------------------
# Procedure calls
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assumption:
    d: int

    def __post_init__(self) -> None:
        _require_power_of_two("d", self.d)

    def __str__(self) -> str:
        return f"Assumption({self.d})"


@dataclass(frozen=True)
class Harvest:
    d: int

    def __post_init__(self) -> None:
        _require_power_of_two("d", self.d)

    def __str__(self) -> str:
        return f"Harvest({self.d})"


@dataclass(frozen=True)
class PushPattern:
    i: int
    d: int

    def __post_init__(self) -> None:
        _require_power_of_two("i", self.i)
        _require_power_of_two("d", self.d)
        if self.i >= self.d:
            raise ValueError(f"PushPattern needs i < d, got i={self.i}, d={self.d}")

    def __str__(self) -> str:
        return f"PushPattern({self.i},{self.d})"


Call = Union[Assumption, Harvest, PushPattern]


class Part(Enum):
    PUSH = "harvest-pushpattern"
    HARVEST_CLOUDBERRY = "harvest-cloudberry"
    HARVEST_SYNC = "harvest-sync"
    STEP = "step"
    SYNC = "sync-repeatseed"


@dataclass(frozen=True)
class Context:
    """Where a basic pattern sits inside the phase Assumption(d).

    ``index`` is the position of the descriptor in BD(Assumption(d)). ``bit``
    and ``step`` are the loop variables (i, j) of the step, ``push_i`` the
    first argument of the enclosing PushPattern.
    """

    d: int
    part: Part
    index: int = 0
    push_i: int | None = None
    bit: int | None = None
    step: int | None = None
    branch: str | None = None

    def __str__(self) -> str:
        s = f"d={self.d} {self.part.value}"
        if self.push_i is not None:
            s += f"({self.push_i})"
        if self.bit is not None:
            s += f" i={self.bit} j={self.step}"
        if self.branch is not None:
            s += f" {self.branch}"
        return s

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "part": self.part.value,
            "index": self.index,
            "push_i": self.push_i,
            "bit": self.bit,
            "step": self.step,
            "branch": self.branch,
        }


Item = tuple[Pattern, Context]


def push_image(p: Pattern, d: int) -> Pattern:
    """The pattern PushPattern(., d) executes in response to ``p``."""
    if isinstance(p, RepeatSeed):
        return Berry(p.x, d)
    if isinstance(p, (Berry, Cloudberry)):
        return RepeatSeed(d + p.x + 2 * p.y, cost(Cloudberry(p.x, p.y, p.y, 0)))
    raise TypeError(f"{p} cannot occur in a decomposition of Assumption")


def _label_key(label: TransformedLabel, d: int) -> tuple[int, ...]:
    # Assumption(d) and everything below it reads only bits 1..d.
    return tuple(bit_at(label, i) for i in range(1, d + 1))


@lru_cache(maxsize=64)
def _assumption_items(d: int, bits: tuple[int, ...]) -> tuple[Item, ...]:
    items: list[Item] = []

    def emit(p: Pattern, ctx: Context) -> None:
        items.append((p, replace(ctx, index=len(items))))

    for i in powers_of_two_below(d):
        for p, _ in _assumption_items(i, bits[:i]):
            emit(push_image(p, d), Context(d, Part.PUSH, push_i=i))
    harvest = Cloudberry(rho(d), d, d, 0)
    emit(harvest, Context(d, Part.HARVEST_CLOUDBERRY))
    emit(RepeatSeed(r(d), cost(harvest)), Context(d, Part.HARVEST_SYNC))

    radius = r(d)
    for i in range(1, d + 1):
        one = bits[i - 1] == 1
        for j in range(2 * d * (d + 1) + 1):
            if one:
                branch: Pattern = Cloudberry(radius, d, d, j)
                name = "cloudberry"
            else:
                branch = Berry(radius, d)
                name = "berry"
            emit(branch, Context(d, Part.STEP, bit=i, step=j, branch=name))
            radius += 3 * d
            sync = RepeatSeed(radius, cost(Cloudberry(radius - 3 * d, d, d, j)))
            emit(sync, Context(d, Part.SYNC, bit=i, step=j))
    return tuple(items)


def assumption_items(d: int, label: TransformedLabel) -> tuple[Item, ...]:
    """BD(Assumption(d)) with provenance, memoized per relevant label bits."""
    _require_power_of_two("d", d)
    return _assumption_items(d, _label_key(label, d))


def bd_items(call: Call, label: TransformedLabel) -> Iterator[Item]:
    if isinstance(call, Assumption):
        yield from assumption_items(call.d, label)
    elif isinstance(call, Harvest):
        for item in assumption_items(call.d, label):
            if item[1].part in (Part.STEP, Part.SYNC):
                break
            yield item
    elif isinstance(call, PushPattern):
        for p, ctx in assumption_items(call.i, label):
            yield push_image(p, call.d), Context(call.d, Part.PUSH, ctx.index, push_i=call.i)
    else:
        raise TypeError(f"not a procedure call: {call!r}")


def bd(call: Call, label: TransformedLabel) -> list[Pattern]:
    """Basic decomposition: the ordered basic pattern calls issued by ``call``."""
    return [p for p, _ in bd_items(call, label)]


# ---------------------------------------------------------------------------
# Counts and bounds
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def l2_count(i: int) -> int:
    """Number of basic patterns in BD(Harvest(i))."""
    _require_power_of_two("i", i)
    if i == 1:
        return 2
    return l2_count(i // 2) + l1_count(i // 2)


def l1_count(i: int) -> int:
    """Number of basic patterns in BD(Assumption(i))."""
    _require_power_of_two("i", i)
    return l2_count(i) + 2 * i * (2 * i * (i + 1) + 1)


def max_first_param(d: int) -> int:
    """Largest first parameter among the patterns of BD(Assumption(d))."""
    zero = TransformedLabel(())
    return max(p.x for p, _ in assumption_items(d, zero))


def phase_cost(d: int, label: TransformedLabel) -> int:
    """Exact number of edge traversals of Assumption(d) for this label."""
    return sum(cost(p) for p, _ in assumption_items(d, label))


def cumulative_cost(d1: int, label: TransformedLabel) -> int:
    """Traversals needed to complete every phase up to and including Assumption(d1)."""
    _require_power_of_two("d1", d1)
    return sum(phase_cost(d, label) for d in [*powers_of_two_below(d1), d1])
