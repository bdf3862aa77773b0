"""Exhaustive exploration of whole-edge interleavings of two finite routes.

A schedule at whole-edge granularity is a monotone lattice path over the joint
state (i, j) = (moves done by A, moves done by B). With both agents at nodes,
a move meets the other agent exactly when it ends on the other agent's node,
so states with equal positions absorb. A route that finishes stays parked at
its last node while the other keeps going, as in the definition of one
pattern pushing another. Reachability is propagated one row at a time with
numpy, which covers every schedule without enumerating paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain
from typing import Sequence

import numpy as np

from .patterns import Pattern, cost, moves


class ExplosionError(RuntimeError):
    """The joint state space exceeds the configured guard."""


@dataclass(frozen=True, order=True)
class Outcome:
    """How a class of schedules ends.

    ``first_finished`` names the route that completed first before any
    meeting ("A" or "B"), or is None when the agents met while both were
    still running (a meeting on a route's very last move counts as running).
    ``concurrent`` is False when the follower had not started by the time the
    leader finished; such schedules fall outside every push statement.
    """

    met: bool
    first_finished: str | None
    concurrent: bool = True

    def __str__(self) -> str:
        if not self.concurrent:
            return "not-concurrent"
        if self.first_finished is None:
            return "meet"
        return f"{self.first_finished}-first" + ("-then-meet" if self.met else "")


MEET = Outcome(True, None)
NOT_CONCURRENT = Outcome(False, None, False)


def route_positions(route: Sequence[Pattern], origin: Sequence[int] = (0, 0)) -> np.ndarray:
    """Nodes (n+1 rows of x, y) visited by executing ``route`` from ``origin``."""
    steps = [d.value for d in chain.from_iterable(moves(p) for p in route)]
    pos = np.zeros((len(steps) + 1, 2), dtype=np.int64)
    pos[:] = origin
    if steps:
        pos[1:] += np.cumsum(np.array(steps, dtype=np.int64), axis=0)
    return pos


def explore_positions(pa: np.ndarray, pb: np.ndarray, leader: str = "A") -> frozenset[Outcome]:
    """All outcomes over every whole-edge schedule in which ``leader`` moves first."""
    if leader not in ("A", "B"):
        raise ValueError("leader must be 'A' or 'B'")
    na, nb = len(pa) - 1, len(pb) - 1
    if na == 0 or nb == 0:
        raise ValueError("both routes need at least one move")
    cols = np.arange(nb + 1)
    outcomes: set[Outcome] = set()
    reach_prev = a_ok_prev = None

    for i in range(na + 1):
        meet = (pb[:, 0] == pa[i, 0]) & (pb[:, 1] == pa[i, 1])
        stop = meet.copy()
        if i == 0:
            stop[0] = meet[0] = False  # a shared start is not a meeting
        if i == na:
            stop[nb] = True
            if leader == "A":
                stop[0] = True  # A done before B moved
        if i == 0 and leader == "B":
            stop[nb] = True  # B done before A moved

        b_ok = ~stop
        b_ok[nb] = False
        a_ok = ~stop
        if i == na:
            a_ok[:] = False
        if i == 0:
            if leader == "A":
                b_ok[0] = False
            else:
                a_ok[0] = False

        if i == 0:
            seed = cols == 0
        else:
            seed = reach_prev & a_ok_prev
        last_seed = np.maximum.accumulate(np.where(seed, cols, -1))
        bad = np.where(~b_ok, cols, -1)
        last_bad = np.concatenate(([-1], np.maximum.accumulate(bad)[:-1]))
        reach = seed | ((last_seed >= 0) & (last_seed > last_bad))
        via_b = np.zeros(nb + 1, dtype=bool)
        via_b[1:] = reach[:-1] & b_ok[:-1]

        for j in np.nonzero(reach & stop)[0]:
            outcomes.update(_classify(i, int(j), na, nb, bool(seed[j]), bool(via_b[j]),
                                      bool(meet[j]), leader))
        reach_prev, a_ok_prev = reach, a_ok
    return frozenset(outcomes)


def _classify(i, j, na, nb, by_a, by_b, met, leader) -> list[Outcome]:
    if leader == "A" and i == na and j == 0 and nb > 0:
        return [NOT_CONCURRENT]
    if leader == "B" and i == 0 and j == nb and na > 0:
        return [NOT_CONCURRENT]
    out = []
    # Arriving by A's move means B was the one already parked, and vice versa.
    for moved, arrived in (("A", by_a), ("B", by_b)):
        if not arrived:
            continue
        a_done_before = i == na and moved == "B"
        b_done_before = j == nb and moved == "A"
        if a_done_before:
            out.append(Outcome(met, "A"))
        elif b_done_before:
            out.append(Outcome(met, "B"))
        elif met:
            out.append(MEET)
        else:  # pragma: no cover - a stop cell is a meeting or a finish
            raise AssertionError("unexpected stop cell")
    return out


def exhaustive_explore(route_a: Sequence[Pattern], route_b: Sequence[Pattern],
                       offset: Sequence[int], max_total_moves: int = 250_000,
                       leader: str = "A", max_states: int = 5 * 10**8) -> frozenset[Outcome]:
    """Explore every whole-edge schedule of route_a (from the origin) against
    route_b (from ``offset``) in which ``leader`` makes the first move."""
    na = sum(cost(p) for p in route_a)
    nb = sum(cost(p) for p in route_b)
    if na + nb > max_total_moves or (na + 1) * (nb + 1) > max_states:
        raise ExplosionError(f"{na} x {nb} moves exceed the exploration guard")
    return explore_positions(route_positions(route_a), route_positions(route_b, offset), leader)


def meets_by_min(outcomes: frozenset[Outcome]) -> bool:
    """Every concurrent schedule meets before either route finishes."""
    return all(o == MEET for o in outcomes if o.concurrent)


def pushes(outcomes: frozenset[Outcome], pusher: str) -> bool:
    """No concurrent schedule lets ``pusher`` finish first with no meeting at all."""
    return not any(o.concurrent and not o.met and o.first_finished == pusher for o in outcomes)
