"""Resumable move streams for the full rendezvous program and its procedures.

A cursor walks a sequence of *blocks*; each block is the basic decomposition of
one procedure call, a tuple of (pattern, context) items. For the main program
the blocks are the phases Assumption(1), Assumption(2), Assumption(4), ...
Every basic pattern starts and ends at the agent's start node, so the cursor
only has to remember (block, descriptor index, offset) to know where it is.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .decomposition import (
    Context,
    Harvest,
    PushPattern,
    assumption_items,
    bd_items,
    is_power_of_two,
)
from .grid import ORIGIN, Direction, Node
from .labels import TransformedLabel, transform
from .patterns import Pattern, cost, moves, position_at


class RouteKind(Enum):
    RV = "rv"
    ASSUMPTION = "assumption"
    HARVEST = "harvest"
    PUSH = "push"


@dataclass(frozen=True)
class AgentProgram:
    label: int
    start: Node = ORIGIN

    def __post_init__(self) -> None:
        if self.label < 0:
            raise ValueError("labels are non-negative integers")

    @property
    def transformed(self) -> TransformedLabel:
        return transform(self.label)


class RouteCursor:
    """Pull-based, checkpointable move stream with provenance.

    The state is (block, k, m): ``m`` moves of descriptor ``k`` of ``block``
    have been emitted. A finished descriptor is left as (k, cost) and only
    rolled over on the next pull, so completion is observable immediately.
    """

    def __init__(self, label: int, start: Node = ORIGIN, kind: RouteKind = RouteKind.RV,
                 d: int = 1, i: int | None = None):
        if kind is not RouteKind.RV and not is_power_of_two(d):
            raise ValueError(f"d must be a power of two, got {d!r}")
        if kind is RouteKind.PUSH and (i is None or not is_power_of_two(i) or i >= d):
            raise ValueError("push routes need a power of two i < d")
        self.label = label
        self.transformed = transform(label)
        self.start = Node(*start)
        self.kind = kind
        self.d = d
        self.i = i
        self.block = 0
        self.k = 0
        self.m = 0
        self.emitted = 0
        self._done_before = 0  # descriptors in blocks before the current one
        self._items = self._block_items(0)
        self._it: Iterator[Direction] | None = None
        self._peeked: Direction | None = None
        self._last_ctx: Context | None = None
        self._suffix: tuple[int, list[int]] | None = None

    # -- block structure ---------------------------------------------------

    def _block_items(self, b: int) -> tuple | None:
        label = self.transformed
        if self.kind is RouteKind.RV:
            return assumption_items(2**b, label)
        if b > 0:
            return None
        if self.kind is RouteKind.ASSUMPTION:
            return assumption_items(self.d, label)
        if self.kind is RouteKind.HARVEST:
            return tuple(bd_items(Harvest(self.d), label))
        return tuple(bd_items(PushPattern(self.i, self.d), label))

    def block_items(self, b: int | None = None) -> tuple | None:
        return self._items if b is None else self._block_items(b)

    def phase_of_block(self, b: int) -> int:
        return 2**b if self.kind is RouteKind.RV else self.d

    def _normalize(self) -> bool:
        """Roll past finished descriptors. False once a finite route is exhausted."""
        while self._items is not None:
            if self.k < len(self._items):
                if self.m < cost(self._items[self.k][0]):
                    return True
                self.k += 1
                self.m = 0
                self._it = None
                continue
            self._done_before += len(self._items)
            self.block += 1
            self.k = 0
            self._items = self._block_items(self.block)
        return False

    # -- pulling moves -----------------------------------------------------

    def next_move(self) -> Optional[Direction]:
        if self._peeked is not None:
            d, self._peeked = self._peeked, None
            self._advance_counters()
            return d
        if not self._normalize():
            return None
        if self._it is None:
            self._it = moves(self._items[self.k][0], self.m)
        d = next(self._it)
        self._advance_counters()
        return d

    def _advance_counters(self) -> None:
        self._last_ctx = self._items[self.k][1]
        self.m += 1
        self.emitted += 1

    def peek(self) -> Optional[Direction]:
        """The next move, without consuming it."""
        if self._peeked is None:
            if not self._normalize():
                return None
            if self._it is None:
                self._it = moves(self._items[self.k][0], self.m)
            self._peeked = next(self._it)
        return self._peeked

    def __iter__(self) -> Iterator[Direction]:
        while True:
            d = self.next_move()
            if d is None:
                return
            yield d

    def skip(self, n: int) -> None:
        """Advance exactly ``n`` moves without producing them."""
        if n < 0:
            raise ValueError("cannot skip backwards")
        if n == 0:
            return
        self._peeked = None
        while n:
            if not self._normalize():
                raise ValueError("skip past the end of a finite route")
            rem = cost(self._items[self.k][0]) - self.m
            step = min(n, rem)
            self.m += step
            self.emitted += step
            n -= step
            self._last_ctx = self._items[self.k][1]
        self._it = None

    def finish_descriptor(self) -> int:
        """Skip to the end of the current descriptor; returns the moves skipped."""
        cur = self.current()
        if cur is None:
            return 0
        rem = cost(cur[0]) - cur[2]
        self.skip(rem)
        return rem

    # -- inspection --------------------------------------------------------

    def current(self) -> tuple[Pattern, Context, int] | None:
        """Descriptor about to emit the next move, its context and offset."""
        if not self._normalize():
            return None
        p, ctx = self._items[self.k]
        return p, ctx, self.m

    @property
    def exhausted(self) -> bool:
        return not self._normalize()

    @property
    def context(self) -> Context | None:
        """Provenance of the last emitted move (or of the next one, before any move)."""
        if self._last_ctx is not None:
            return self._last_ctx
        cur = self.current()
        return cur[1] if cur else None

    @property
    def descriptors_completed(self) -> int:
        if self._items is None:
            return self._done_before
        done = self._done_before + self.k
        if self.k < len(self._items) and self.m == cost(self._items[self.k][0]):
            done += 1
        return done

    def phase_completed(self, d: int) -> bool:
        """Whether Assumption(d) (or the single procedure of a finite route) is finished."""
        if self.kind is not RouteKind.RV:
            return self.exhausted
        b = d.bit_length() - 1
        if self.block != b:
            return self.block > b
        return self.k == len(self._items) - 1 and self.m == cost(self._items[-1][0])

    def moves_left_in_block(self) -> int:
        if not self._normalize():
            return 0
        if self._suffix is None or self._suffix[0] != self.block:
            sums = [0]
            for p, _ in reversed(self._items):
                sums.append(sums[-1] + cost(p))
            self._suffix = (self.block, sums[::-1])
        return self._suffix[1][self.k] - self.m

    def moves_to_phase_end(self, d: int) -> int:
        """Moves left until Assumption(d) is complete (0 if it already is)."""
        if self.kind is not RouteKind.RV:
            return self.moves_left_in_block()
        target = d.bit_length() - 1
        if self.phase_completed(d) or self.block > target:
            return 0
        total = self.moves_left_in_block()
        for b in range(self.block + 1, target + 1):
            total += _block_cost(self.phase_of_block(b), self.transformed)
        return total

    def position_offset(self) -> tuple[int, int]:
        """Displacement from the start node after the moves emitted so far."""
        if self._items is None or self.k >= len(self._items):
            return 0, 0
        return position_at(self._items[self.k][0], self.m)

    def position(self) -> Node:
        dx, dy = self.position_offset()
        return self.start.shift(dx, dy)

    def same_stream_state(self, other: RouteCursor) -> bool:
        return (self.kind, self.d, self.i, self.block, self.k, self.m) == (
            other.kind, other.d, other.i, other.block, other.k, other.m)

    def common_moves(self, other: RouteCursor, limit: int) -> int:
        """Moves both cursors will emit identically from here (capped at ``limit``).

        Requires both cursors to be in the same stream state.
        """
        if not self.same_stream_state(other):
            return 0
        total = 0
        b, k, m = self.block, self.k, self.m
        mine, theirs = self._items, other._items
        while mine is not None and theirs is not None and total < limit:
            while k < len(mine) and total < limit:
                if k >= len(theirs) or mine[k][0] != theirs[k][0]:
                    return min(total, limit)
                total += cost(mine[k][0]) - m
                m = 0
                k += 1
            if k < len(mine) or len(theirs) != len(mine):
                break
            b += 1
            k = 0
            mine, theirs = self._block_items(b), other._block_items(b)
        return min(total, limit)

    # -- checkpointing -----------------------------------------------------

    def to_state(self) -> dict:
        return {
            "label": self.label,
            "start": [self.start.x, self.start.y],
            "kind": self.kind.value,
            "d": self.d,
            "i": self.i,
            "block": self.block,
            "k": self.k,
            "m": self.m,
            "emitted": self.emitted,
        }

    @classmethod
    def from_state(cls, state: dict) -> RouteCursor:
        c = cls(state["label"], Node(*state["start"]), RouteKind(state["kind"]),
                state["d"], state["i"])
        for b in range(state["block"]):
            c._done_before += len(c._block_items(b))
        c.block = state["block"]
        c._items = c._block_items(c.block)
        c.k, c.m, c.emitted = state["k"], state["m"], state["emitted"]
        if c.emitted and c._items is not None:
            if c.m:
                c._last_ctx = c._items[c.k][1]
            elif c.k:
                c._last_ctx = c._items[c.k - 1][1]
            else:
                c._last_ctx = c._block_items(c.block - 1)[-1][1]
        return c

    def copy(self) -> RouteCursor:
        return RouteCursor.from_state(self.to_state())

    def __repr__(self) -> str:
        return (f"RouteCursor(label={self.label}, kind={self.kind.value}, block={self.block}, "
                f"k={self.k}, m={self.m}, emitted={self.emitted})")


def _block_cost(d: int, label: TransformedLabel) -> int:
    return sum(cost(p) for p, _ in assumption_items(d, label))


def rv_route(program: AgentProgram) -> RouteCursor:
    """Infinite stream: Assumption(1), Assumption(2), Assumption(4), ..."""
    return RouteCursor(program.label, program.start, RouteKind.RV)


def assumption_route(label: int, d: int, start: Node = ORIGIN) -> RouteCursor:
    return RouteCursor(label, start, RouteKind.ASSUMPTION, d)


def harvest_route(label: int, d: int, start: Node = ORIGIN) -> RouteCursor:
    return RouteCursor(label, start, RouteKind.HARVEST, d)


def pushpattern_route(label: int, i: int, d: int, start: Node = ORIGIN) -> RouteCursor:
    return RouteCursor(label, start, RouteKind.PUSH, d, i)
