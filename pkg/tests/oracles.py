"""Slow, obviously-correct reference implementations used by the tests."""

from __future__ import annotations

from itertools import combinations

from gridrv.explore import MEET, NOT_CONCURRENT, Outcome
from gridrv.grid import E, N, S, W, backtrack

STEP = {N: (0, 1), E: (1, 0), S: (0, -1), W: (-1, 0)}


def shortest_paths(u, v):
    """Every shortest path from u to v as a tuple of directions."""
    dx, dy = v[0] - u[0], v[1] - u[1]
    h, vert = E if dx > 0 else W, N if dy > 0 else S
    n = abs(dx) + abs(dy)
    out = []
    for cols in combinations(range(n), abs(dx)):
        out.append(tuple(h if t in cols else vert for t in range(n)))
    return out


def northern_path(u, v):
    """The shortest path that uses the edges of the northernmost row it can.

    Among all shortest paths pick one whose horizontal edges all sit at the
    largest y reached; ties cannot occur since all horizontal moves then share
    one row.
    """
    best, best_key = None, None
    for p in shortest_paths(u, v):
        x, y = u
        rows = []
        for d in p:
            if d in (E, W):
                rows.append(y)
            x, y = x + STEP[d][0], y + STEP[d][1]
        key = min(rows) if rows else 0
        if best_key is None or key > best_key:
            best, best_key = p, key
    return best


def ring(k):
    """Nodes at distance k, clockwise from the northernmost one."""
    if k == 0:
        return [(0, 0)]
    out = []
    for t in range(k):
        out.append((t, k - t))
    for t in range(k):
        out.append((k - t, -t))
    for t in range(k):
        out.append((-t, -k + t))
    for t in range(k):
        out.append((-k + t, t))
    return out


def naive_seed(x):
    first = []
    for i in range(1, x + 1):
        first += [N] + [S, E] * i + [W, S] * i + [N, W] * i + [E, N] * i
    return first + list(backtrack(first))


def _path(u, v):
    return list(northern_path(u, v))


def naive_berry(x, y):
    first = []
    for i in range(1, x + y + 1):
        for j in range(i + 1):
            for k in range(j + 1):
                for v in ring(k):
                    first += _path((0, 0), v) + naive_seed(i - j) + _path(v, (0, 0))
    return first + list(backtrack(first))


def naive_first_visits(z):
    seen, order = set(), []
    x = y = 0
    for d in [None] + naive_seed(z):
        if d is not None:
            x, y = x + STEP[d][0], y + STEP[d][1]
        if (x, y) not in seen:
            seen.add((x, y))
            order.append((x, y))
    return order


def naive_cloudberry(x, y, z, h):
    order = naive_first_visits(z)
    first = []
    for t in range(len(order)):
        v = order[(h + t) % len(order)]
        first += _path((0, 0), v) + naive_seed(x) + naive_berry(x, y) + _path(v, (0, 0))
    return first + list(backtrack(first))


def positions(route, start=(0, 0)):
    pts = [tuple(start)]
    for d in route:
        pts.append((pts[-1][0] + STEP[d][0], pts[-1][1] + STEP[d][1]))
    return pts


def brute_outcomes(pa, pb, leader="A"):
    """All outcomes by depth-first search over every interleaving of two node walks."""
    na, nb = len(pa) - 1, len(pb) - 1
    out, seen = set(), set()

    def go(i, j, moved):
        if (i, j, moved) in seen:
            return
        seen.add((i, j, moved))
        if (i, j) != (0, 0):
            if leader == "A" and i == na and j == 0:
                out.add(NOT_CONCURRENT)
                return
            if leader == "B" and j == nb and i == 0:
                out.add(NOT_CONCURRENT)
                return
            met = tuple(pa[i]) == tuple(pb[j])
            if met or (i == na and j == nb):
                if i == na and moved == "B":
                    out.add(Outcome(met, "A"))
                elif j == nb and moved == "A":
                    out.add(Outcome(met, "B"))
                else:
                    out.add(MEET)
                return
        if i < na and not (i == j == 0 and leader == "B"):
            go(i + 1, j, "A")
        if j < nb and not (i == j == 0 and leader == "A"):
            go(i, j + 1, "B")

    go(0, 0, None)
    return frozenset(out)
