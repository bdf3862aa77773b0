"""Lattice geometry of the oriented infinite grid.

Coordinates follow the screen convention: north is +y, east is +x.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

COORD_LIMIT = 2**63


class Direction(Enum):
    """Cardinal port label. The value is the unit displacement."""

    N = (0, 1)
    E = (1, 0)
    S = (0, -1)
    W = (-1, 0)

    @property
    def dx(self) -> int:
        return self.value[0]

    @property
    def dy(self) -> int:
        return self.value[1]

    @property
    def inverse(self) -> Direction:
        return _INVERSE[self]

    def __str__(self) -> str:
        return self.name


N, E, S, W = Direction.N, Direction.E, Direction.S, Direction.W
_INVERSE = {N: S, S: N, E: W, W: E}


class Node(NamedTuple):
    x: int
    y: int

    def step(self, d: Direction) -> Node:
        return self.shift(d.dx, d.dy)

    def shift(self, dx: int, dy: int) -> Node:
        x, y = self.x + dx, self.y + dy
        if not (-COORD_LIMIT <= x < COORD_LIMIT and -COORD_LIMIT <= y < COORD_LIMIT):
            raise OverflowError(f"coordinate overflow at ({x}, {y})")
        return Node(x, y)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


ORIGIN = Node(0, 0)


def l1_distance(a: Sequence[int], b: Sequence[int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def ball_size(r: int) -> int:
    """Number of nodes at L1 distance at most ``r`` from a node."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    return 2 * r * (r + 1) + 1


def ring_size(k: int) -> int:
    return 1 if k == 0 else 4 * k


def backtrack(moves: Iterable[Direction]) -> tuple[Direction, ...]:
    """Reverse path: reversed order, every direction inverted."""
    return tuple(_INVERSE[d] for d in reversed(tuple(moves)))


def displacement(moves: Iterable[Direction]) -> tuple[int, int]:
    x = y = 0
    for d in moves:
        dx, dy = d.value
        x += dx
        y += dy
    return x, y


@lru_cache(maxsize=1 << 16)
def canonical_offset_path(dx: int, dy: int) -> tuple[Direction, ...]:
    horizontal = (E if dx > 0 else W,) * abs(dx)
    if dy > 0:
        return (N,) * dy + horizontal
    return horizontal + (S,) * (-dy)


def canonical_path(u: Sequence[int], v: Sequence[int]) -> tuple[Direction, ...]:
    """Shortest path from ``u`` to ``v`` using the northern row of their bounding box.

    Going up, all N moves come first; going down, the horizontal run comes first.
    Either way the horizontal edges lie on the top row of the rectangle.
    """
    return canonical_offset_path(v[0] - u[0], v[1] - u[1])


@lru_cache(maxsize=256)
def ring_offsets(k: int) -> tuple[tuple[int, int], ...]:
    """Offsets at distance exactly ``k``, clockwise starting from the North."""
    if k < 0:
        raise ValueError("ring index must be non-negative")
    if k == 0:
        return ((0, 0),)
    out = []
    out.extend((t, k - t) for t in range(k))
    out.extend((k - t, -t) for t in range(k))
    out.extend((-t, -k + t) for t in range(k))
    out.extend((-k + t, t) for t in range(k))
    return tuple(out)


def ring_clockwise(u: Sequence[int], k: int) -> list[Node]:
    return [Node(u[0] + dx, u[1] + dy) for dx, dy in ring_offsets(k)]


@dataclass(frozen=True)
class Position:
    """Exact location of an agent: a node, or a point strictly inside an edge.

    Always constructed through :func:`at_node` or :func:`on_edge`, which keep the
    value normalized: edge positions are anchored at the south/west endpoint and
    use direction N or E, so equal points compare equal.
    """

    node: Node
    direction: Direction | None = None
    fraction: Fraction = Fraction(0)

    @property
    def is_node(self) -> bool:
        return self.direction is None

    def endpoints(self) -> tuple[Node, Node]:
        if self.direction is None:
            return self.node, self.node
        return self.node, self.node.step(self.direction)

    def __str__(self) -> str:
        if self.direction is None:
            return str(self.node)
        return f"{self.node}+{self.direction.name}*{self.fraction}"


def at_node(node: Sequence[int]) -> Position:
    return Position(Node(node[0], node[1]))


def on_edge(origin: Sequence[int], d: Direction, fraction: Fraction | int) -> Position:
    f = Fraction(fraction)
    if not 0 <= f <= 1:
        raise ValueError(f"fraction {f} outside [0, 1]")
    u = Node(origin[0], origin[1])
    if f == 0:
        return Position(u)
    if f == 1:
        return Position(u.step(d))
    if d in (N, E):
        return Position(u, d, f)
    return Position(u.step(d), _INVERSE[d], 1 - f)
