"""Asynchronous two-agent execution with an adversarial scheduler.

Agents move one at a time (sequential-mover semantics). A meeting happens when
the segment swept by the moving agent contains the stationary agent's exact
position, so passing through the other agent counts. Positions inside edges
are exact fractions.

When a single decision lets one agent walk many edges, the other agent is
stationary for the whole span and long stretches are skipped without changing
the outcome: patterns whose bounding ball does not reach the opponent are
skipped whole, and once one full Seed repetition of a RepeatSeed has missed
the opponent, the remaining repetitions will miss it as well.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import IO, Union

from .agent import AgentProgram, RouteCursor, rv_route
from .decomposition import Context, is_power_of_two
from .grid import E, N, Direction, Node, Position, at_node, l1_distance, on_edge
from .labels import DuplicateLabelError, labels_first_diff
from .patterns import RepeatSeed, bounding_radius, cost, position_at, seed_cost


class AgentId(Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> AgentId:
        return AgentId.B if self is AgentId.A else AgentId.A


A, B = AgentId.A, AgentId.B


@dataclass(frozen=True)
class WholeEdges:
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("WholeEdges needs k >= 1")


@dataclass(frozen=True)
class ToFraction:
    q: Fraction

    def __post_init__(self) -> None:
        if not 0 < self.q <= 1:
            raise ValueError("ToFraction needs 0 < q <= 1")


Amount = Union[WholeEdges, ToFraction]


class StopReason(Enum):
    MEETING = "meeting"
    STOP_BOUND = "stop_bound"
    BUDGET = "budget"


def good_assumption(distance: int, first_diff: int) -> int:
    """Smallest power of two that is at least max(distance, first_diff)."""
    need = max(distance, first_diff, 1)
    return 1 << (need - 1).bit_length()


@dataclass(frozen=True)
class StrategySpec:
    """Adversary choice. ``agent``/``until`` only matter for freeze."""

    name: str
    seed: int | None = None
    agent: str = "B"
    until: int = 1

    NAMES = ("round_robin", "random", "freeze", "greedy_avoid", "mirror_progress")

    def __post_init__(self) -> None:
        if self.name not in self.NAMES:
            raise ValueError(f"unknown strategy {self.name!r}")
        if self.name == "random" and self.seed is None:
            raise ValueError("the random strategy needs a seed")
        if self.agent not in ("A", "B"):
            raise ValueError("agent must be 'A' or 'B'")

    @classmethod
    def parse(cls, text: str) -> StrategySpec:
        """Parse ``round_robin``, ``random:7``, ``freeze:B:3`` and so on."""
        name, *rest = text.split(":")
        if name == "random":
            if len(rest) != 1:
                raise ValueError("random needs a seed: random:SEED")
            return cls(name, seed=int(rest[0]))
        if name == "freeze":
            agent = rest[0] if rest else "B"
            until = int(rest[1]) if len(rest) > 1 else 1
            return cls(name, agent=agent, until=until)
        if rest:
            raise ValueError(f"strategy {name!r} takes no arguments")
        return cls(name)

    def __str__(self) -> str:
        if self.name == "random":
            return f"random:{self.seed}"
        if self.name == "freeze":
            return f"freeze:{self.agent}:{self.until}"
        return self.name


@dataclass(frozen=True)
class Scenario:
    label_a: int
    label_b: int
    offset: tuple[int, int]
    strategy: StrategySpec = StrategySpec("round_robin")
    budget: int = 10**7
    stop_bound: int | None = None

    def __post_init__(self) -> None:
        if self.label_a < 0 or self.label_b < 0:
            raise ValueError("labels are non-negative integers")
        if self.label_a == self.label_b:
            raise DuplicateLabelError("agents must carry distinct labels")
        if abs(self.offset[0]) + abs(self.offset[1]) < 1:
            raise ValueError("agents must start at distinct nodes")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        if self.stop_bound is not None and not is_power_of_two(self.stop_bound):
            raise ValueError("stop_bound must be a power of two")

    @property
    def distance(self) -> int:
        return abs(self.offset[0]) + abs(self.offset[1])

    @property
    def first_diff(self) -> int:
        return labels_first_diff(self.label_a, self.label_b)

    @property
    def good_assumption(self) -> int:
        return good_assumption(self.distance, self.first_diff)


@dataclass
class AgentState:
    cursor: RouteCursor
    node: Node
    pending: Direction | None = None  # edge currently being traversed
    progress: Fraction = Fraction(0)  # fraction of the pending edge done
    traversals: int = 0

    @property
    def position(self) -> Position:
        if self.pending is None:
            return at_node(self.node)
        return on_edge(self.node, self.pending, self.progress)


@dataclass(frozen=True)
class MeetingReport:
    met: bool
    location: Position | None
    traversals_a: int
    traversals_b: int
    context_a: Context | None
    context_b: Context | None
    stop_reason: StopReason
    decisions: int = 0

    @property
    def total(self) -> int:
        return self.traversals_a + self.traversals_b

    def as_dict(self) -> dict:
        return {
            "met": self.met,
            "location": str(self.location) if self.location is not None else None,
            "traversals_a": self.traversals_a,
            "traversals_b": self.traversals_b,
            "context_a": self.context_a.as_dict() if self.context_a else None,
            "context_b": self.context_b.as_dict() if self.context_b else None,
            "stop_reason": self.stop_reason.value,
            "decisions": self.decisions,
        }


class EngineFault(RuntimeError):
    """An internal invariant of the engine was violated."""


# ---------------------------------------------------------------------------
# Geometry of a single move
# ---------------------------------------------------------------------------


def _sweep_hits(node: Node, d: Direction, f0: Fraction, target: Position) -> Fraction | None:
    """Where along the edge (node -> node+d), from fraction f0 to 1, ``target`` is met.

    Returns the fraction of the hit, or None if the swept segment misses it.
    """
    if target.direction is None:
        t = target.node
        if t.x == node.x + d.dx and t.y == node.y + d.dy:
            return Fraction(1)
        if f0 == 0 and t == node:
            return Fraction(0)
        return None
    if d is N or d is E:
        if target.node == node and target.direction is d:
            g = target.fraction
            return g if g >= f0 else None
        return None
    if target.direction is d.inverse and target.node == node.step(d):
        g = 1 - target.fraction
        return g if g >= f0 else None
    return None


def _gap(node: Node, target: Position) -> int:
    """Fewest whole moves from ``node`` before ``target`` can be touched."""
    a, b = target.endpoints()
    return min(l1_distance(node, a), l1_distance(node, b))


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


class Strategy:
    """Adversary: chooses who moves next and by how much."""

    def decide(self, sim: Simulation) -> tuple[AgentId, Amount]:
        raise NotImplementedError

    # Smallest start distance at which two identical streams cannot meet
    # under this strategy's alternation (see Simulation._lockstep).
    lockstep_min_distance = 2

    def lockstep_ready(self, sim: Simulation) -> bool:
        """True when, from identical stream states, both agents take each common move in turn."""
        return False

    def alternating(self, sim: Simulation) -> bool:
        """True when, as long as no move can meet, both agents advance one edge in turn."""
        return False


class RoundRobin(Strategy):
    def __init__(self) -> None:
        self.turn = A

    def decide(self, sim):
        agent, self.turn = self.turn, self.turn.other
        return agent, WholeEdges(1)

    def lockstep_ready(self, sim):
        return self.turn is A

    def alternating(self, sim):
        return True


class RandomStrategy(Strategy):
    MAX_EDGES = 8

    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)

    def decide(self, sim):
        agent = A if self.rng.random() < 0.5 else B
        return agent, WholeEdges(self.rng.randint(1, self.MAX_EDGES))


class Freeze(Strategy):
    """The frozen agent waits until the other completes ``until`` descriptors."""

    def __init__(self, frozen: AgentId, until: int) -> None:
        self.frozen = frozen
        self.until = until
        self.after = RoundRobin()

    def decide(self, sim):
        mover = self.frozen.other
        state = sim.state(mover)
        if state.cursor.descriptors_completed < self.until:
            return mover, WholeEdges(max(1, sim.moves_left_in_descriptor(mover)))
        return self.after.decide(sim)

    def lockstep_ready(self, sim):
        return self._released(sim) and self.after.lockstep_ready(sim)

    def alternating(self, sim):
        return self._released(sim)

    def _released(self, sim) -> bool:
        return sim.state(self.frozen.other).cursor.descriptors_completed >= self.until


class GreedyAvoid(Strategy):
    """Move the agent with fewer traversals unless that move meets."""

    lockstep_min_distance = 1

    def decide(self, sim):
        a, b = sim.state(A).traversals, sim.state(B).traversals
        preferred = A if a <= b else B
        if not sim.would_meet(preferred):
            return preferred, WholeEdges(1)
        if not sim.would_meet(preferred.other):
            return preferred.other, WholeEdges(1)
        return preferred, WholeEdges(1)

    def lockstep_ready(self, sim):
        return sim.state(A).traversals == sim.state(B).traversals

    def alternating(self, sim):
        # Far from each other nothing is ever blocked, so the lagging agent
        # moves and the difference stays within one.
        return abs(sim.state(A).traversals - sim.state(B).traversals) <= 1


class MirrorProgress(Strategy):
    """The agent with fewer completed descriptors finishes its current one."""

    def decide(self, sim):
        a = sim.state(A).cursor.descriptors_completed
        b = sim.state(B).cursor.descriptors_completed
        agent = A if a <= b else B
        return agent, WholeEdges(max(1, sim.moves_left_in_descriptor(agent)))


def make_strategy(spec: StrategySpec) -> Strategy:
    if spec.name == "round_robin":
        return RoundRobin()
    if spec.name == "random":
        return RandomStrategy(spec.seed)
    if spec.name == "freeze":
        return Freeze(AgentId(spec.agent), spec.until)
    if spec.name == "greedy_avoid":
        return GreedyAvoid()
    return MirrorProgress()


def strategies() -> tuple[str, ...]:
    return StrategySpec.NAMES


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


class _Stop(Exception):
    def __init__(self, reason: StopReason, location: Position | None = None):
        self.reason = reason
        self.location = location


class Simulation:
    FAR_SKIP_MIN = 4

    def __init__(self, scenario: Scenario, fast_forward: bool = True,
                 trace: IO[str] | None = None, strategy: Strategy | None = None):
        self.scenario = scenario
        self.fast_forward = fast_forward
        self.trace = trace
        self.strategy = strategy or make_strategy(scenario.strategy)
        start_b = Node(*scenario.offset)
        self._states = {
            A: AgentState(rv_route(AgentProgram(scenario.label_a)), Node(0, 0)),
            B: AgentState(rv_route(AgentProgram(scenario.label_b, start_b)), start_b),
        }
        self.decisions = 0
        self.report: MeetingReport | None = None

    # -- views -------------------------------------------------------------

    def state(self, agent: AgentId) -> AgentState:
        return self._states[agent]

    @property
    def total(self) -> int:
        return self._states[A].traversals + self._states[B].traversals

    @property
    def budget_left(self) -> int:
        return max(0, self.scenario.budget - self.total)

    def moves_left_in_descriptor(self, agent: AgentId) -> int:
        cur = self._states[agent].cursor.current()
        return 0 if cur is None else cost(cur[0]) - cur[2]

    def would_meet(self, agent: AgentId) -> bool:
        """Whether completing the agent's next edge would meet the other agent."""
        s = self._states[agent]
        d = s.pending or s.cursor.peek()
        return _sweep_hits(s.node, d, s.progress, self._states[agent.other].position) is not None

    # -- stopping ----------------------------------------------------------

    def _bound_reached(self) -> bool:
        bound = self.scenario.stop_bound
        if bound is None:
            return False
        return any(s.cursor.phase_completed(bound) for s in self._states.values())

    def _check_limits(self) -> None:
        if self._bound_reached():
            raise _Stop(StopReason.STOP_BOUND)
        if self.total >= self.scenario.budget:
            raise _Stop(StopReason.BUDGET)

    # -- moving ------------------------------------------------------------

    def _step(self, agent: AgentId, to: Fraction = Fraction(1)) -> None:
        """Move ``agent`` along its current edge up to fraction ``to``."""
        s = self._states[agent]
        if s.pending is None:
            s.pending = s.cursor.next_move()
            s.progress = Fraction(0)
        other = self._states[agent.other].position
        hit = _sweep_hits(s.node, s.pending, s.progress, other)
        if hit is not None and hit <= to:
            s.progress = hit
            if hit == 1:
                self._complete_edge(s)
            raise _Stop(StopReason.MEETING, other)
        if to == 1:
            self._complete_edge(s)
        else:
            s.progress = to

    @staticmethod
    def _complete_edge(s: AgentState) -> None:
        s.node = s.node.step(s.pending)
        s.pending = None
        s.progress = Fraction(0)
        s.traversals += 1

    def _skip(self, agent: AgentId, n: int) -> None:
        """Skip ``n`` whole moves known not to meet; the node comes from the closed forms."""
        s = self._states[agent]
        c = s.cursor
        p, _, m = c.current()
        c.skip(n)
        dx, dy = position_at(p, m + n)
        s.node = c.start.shift(dx, dy)
        s.traversals += n

    def _whole_edges(self, agent: AgentId, k: int) -> None:
        s = self._states[agent]
        other = self._states[agent.other].position
        clean = 0  # consecutive non-meeting moves inside the current RepeatSeed
        clean_key = None
        while k > 0:
            self._check_limits()
            if self.fast_forward and s.pending is None:
                p, _, m = s.cursor.current()
                left = min(k, self.budget_left)
                if m == 0 and self._outside_ball(p, s.cursor.start, other):
                    n = min(left, cost(p))
                    self._skip(agent, n)
                    k -= n
                    continue
                repeat = isinstance(p, RepeatSeed)
                if repeat:
                    key = (s.cursor.block, s.cursor.k)
                    if key != clean_key:
                        clean_key, clean = key, 0
                    if clean >= seed_cost(p.x):
                        n = min(left, cost(p) - m)
                        self._skip(agent, n)
                        k -= n
                        continue
                # n moves stay within distance n of the current node
                n = min(left, cost(p) - m, _gap(s.node, other) - 1)
                if n >= 2:
                    self._skip(agent, n)
                    k -= n
                    clean += n
                    continue
                clean += 1
            self._step(agent)
            k -= 1

    @staticmethod
    def _outside_ball(p, center: Node, target: Position) -> bool:
        radius = bounding_radius(p)
        a, b = target.endpoints()
        return max(l1_distance(a, center), l1_distance(b, center)) > radius

    def advance(self, agent: AgentId, amount: Amount) -> None:
        """Apply one adversary decision (raises _Stop internally on any stop)."""
        if isinstance(amount, WholeEdges):
            self._whole_edges(agent, amount.k)
            return
        s = self._states[agent]
        if s.pending is not None and amount.q <= s.progress:
            raise EngineFault("fractional progress must strictly increase")
        self._check_limits()
        self._step(agent, amount.q)

    def _lockstep(self) -> bool:
        """Skip common moves of two identical translated routes taken in turn.

        Both cursors are in the same state and the start offset is w. Under
        strict alternation the mover's segment joins p(t) and p(t+1) while the
        other sits at p(t) + w or p(t+1) + w; neither lies on the segment unless
        w is 0 or the step itself, so |w| >= 2 is safe. Greedy avoidance is safe
        for any w != 0: when A's step equals w, B's identical step cannot reach
        A (that needs the step to be -w), B goes first and then A follows.
        Either way both agents take the step and the states coincide again.
        """
        sa, sb = self._states[A], self._states[B]
        if sa.pending is not None or sb.pending is not None:
            return False
        if self.scenario.distance < self.strategy.lockstep_min_distance:
            return False
        if not self.strategy.lockstep_ready(self):
            return False
        ca, cb = sa.cursor, sb.cursor
        if not ca.same_stream_state(cb):
            return False
        limit = self.budget_left // 2
        bound = self.scenario.stop_bound
        if bound is not None:
            limit = min(limit, ca.moves_to_phase_end(bound) - 1)
        h = ca.common_moves(cb, limit)
        if h <= 0:
            return False
        before = (sa.position, sb.position)
        for agent in (A, B):
            s = self._states[agent]
            s.cursor.skip(h)
            s.node = s.cursor.position()
            s.traversals += h
        self.decisions += 2 * h
        self._trace("AB", f"lockstep:{h}", before)
        return True

    def _far_skip(self) -> bool:
        """Advance both agents while they are too far apart to meet.

        At distance dist, t moves each with t < dist / 2 cannot bring the
        agents together, and strategies that alternate single edges when no
        move meets make exactly t moves with each agent.
        """
        sa, sb = self._states[A], self._states[B]
        if sa.pending is not None or sb.pending is not None:
            return False
        t = (l1_distance(sa.node, sb.node) - 1) // 2
        if t < self.FAR_SKIP_MIN or not self.strategy.alternating(self):
            return False
        t = min(t, self.budget_left // 2)
        bound = self.scenario.stop_bound
        if bound is not None:
            t = min(t, sa.cursor.moves_to_phase_end(bound) - 1,
                    sb.cursor.moves_to_phase_end(bound) - 1)
        if t < self.FAR_SKIP_MIN:
            return False
        before = (sa.position, sb.position)
        for s in (sa, sb):
            s.cursor.skip(t)
            s.node = s.cursor.position()
            s.traversals += t
        self.decisions += 2 * t
        self._trace("AB", f"far:{t}", before)
        return True

    def _trace(self, agent: str, amount: str, before) -> None:
        if self.trace is None:
            return
        sa, sb = self._states[A], self._states[B]
        rec = {
            "step": self.decisions,
            "agent": agent,
            "amount": amount,
            "context_a": sa.cursor.context.as_dict() if sa.cursor.context else None,
            "context_b": sb.cursor.context.as_dict() if sb.cursor.context else None,
            "before_a": str(before[0]),
            "before_b": str(before[1]),
            "after_a": str(sa.position),
            "after_b": str(sb.position),
            "traversals_a": sa.traversals,
            "traversals_b": sb.traversals,
        }
        self.trace.write(json.dumps(rec) + "\n")

    def run(self) -> MeetingReport:
        if self.report is not None:
            return self.report
        reason, location = StopReason.BUDGET, None
        try:
            while True:
                self._check_limits()
                if self.fast_forward and (self._lockstep() or self._far_skip()):
                    continue
                agent, amount = self.strategy.decide(self)
                before = (self._states[A].position, self._states[B].position)
                self.decisions += 1
                try:
                    self.advance(agent, amount)
                finally:
                    self._trace(agent.value, _amount_str(amount), before)
        except _Stop as stop:
            reason, location = stop.reason, stop.location
        sa, sb = self._states[A], self._states[B]
        self.report = MeetingReport(
            met=reason is StopReason.MEETING,
            location=location,
            traversals_a=sa.traversals,
            traversals_b=sb.traversals,
            context_a=sa.cursor.context,
            context_b=sb.cursor.context,
            stop_reason=reason,
            decisions=self.decisions,
        )
        return self.report


def _amount_str(amount: Amount) -> str:
    if isinstance(amount, WholeEdges):
        return f"edges:{amount.k}"
    return f"to:{amount.q}"


def run(scenario: Scenario, fast_forward: bool = True, trace: IO[str] | None = None) -> MeetingReport:
    return Simulation(scenario, fast_forward, trace).run()
