from fractions import Fraction

import pytest

from gridrv.decomposition import cumulative_cost
from gridrv.grid import E, N, W, Node, at_node, on_edge
from gridrv.labels import DuplicateLabelError, transform
from gridrv.patterns import RepeatSeed, cost
from gridrv.simulator import (
    A, B, EngineFault, Scenario, Simulation, StopReason, StrategySpec, ToFraction, WholeEdges,
    _sweep_hits, good_assumption, run, strategies,
)


def test_sweep_geometry():
    half = on_edge((0, 0), E, Fraction(1, 2))
    assert _sweep_hits(Node(0, 0), E, Fraction(0), half) == Fraction(1, 2)
    assert _sweep_hits(Node(1, 0), W, Fraction(0), half) == Fraction(1, 2)
    assert _sweep_hits(Node(0, 0), N, Fraction(0), at_node((5, 5))) is None
    assert _sweep_hits(Node(0, 0), N, Fraction(0), at_node((0, 1))) == 1
    # already past the point
    assert _sweep_hits(Node(0, 0), E, Fraction(3, 4), half) is None


def test_scenario_validation():
    with pytest.raises(DuplicateLabelError):
        Scenario(0, 0, (1, 0))
    with pytest.raises(ValueError):
        Scenario(0, 1, (0, 0))
    with pytest.raises(ValueError):
        Scenario(0, 1, (1, 0), stop_bound=3)
    with pytest.raises(ValueError):
        StrategySpec.parse("random")
    assert str(StrategySpec.parse("freeze:A:4")) == "freeze:A:4"
    assert set(strategies()) == {"round_robin", "random", "freeze", "greedy_avoid", "mirror_progress"}


def test_good_assumption():
    assert good_assumption(1, 1) == 1
    assert good_assumption(3, 1) == 4
    assert good_assumption(1, 5) == 8
    assert Scenario(2, 5, (1, 1)).good_assumption == 8


def test_round_robin_meets_within_first_phase():
    rep = run(Scenario(0, 1, (1, 0), stop_bound=1))
    assert rep.met and rep.stop_reason is StopReason.MEETING
    assert rep.total < cumulative_cost(1, transform(0))


def test_frozen_agent_is_found():
    rep = run(Scenario(0, 1, (1, 0), StrategySpec("freeze", agent="B", until=10**9)))
    assert rep.met and rep.traversals_b == 0


def test_budget_stop():
    rep = run(Scenario(0, 1, (-3, 2), StrategySpec("greedy_avoid"), budget=5000))
    assert not rep.met and rep.stop_reason is StopReason.BUDGET
    assert rep.total == 5000


def test_fractional_moves():
    sim = Simulation(Scenario(0, 1, (4, 4)))
    sim.advance(A, ToFraction(Fraction(1, 3)))
    assert not sim.state(A).position.is_node
    with pytest.raises(EngineFault):
        sim.advance(A, ToFraction(Fraction(1, 4)))
    sim.advance(A, ToFraction(Fraction(1)))
    assert sim.state(A).traversals == 1 and sim.state(A).position.is_node


def test_meeting_inside_an_edge():
    sim = Simulation(Scenario(0, 1, (1, 0)))
    sb = sim.state(B)
    # park B halfway along the first edge A is about to walk
    first = sim.state(A).cursor.peek()
    sb.node, sb.pending, sb.progress = Node(0, 0), first, Fraction(1, 2)
    rep = sim.run()
    assert rep.met and rep.traversals_a == 0
    assert rep.location == on_edge((0, 0), first, Fraction(1, 2))


def _park(sim, agent, node, d, f):
    s = sim.state(agent)
    s.node, s.pending, s.progress = Node(*node), d, Fraction(f)


def _count_steps(sim, monkeypatch):
    calls = []
    original = sim._step
    monkeypatch.setattr(sim, "_step", lambda *a, **k: (calls.append(1), original(*a, **k))[1])
    return calls


def test_ball_skip(monkeypatch):
    sim = Simulation(Scenario(0, 1, (9, 0), budget=10**9))
    sa = sim.state(A)
    sa.cursor.finish_descriptor()  # now at RepeatSeed(4, 4516)
    assert sa.cursor.current()[0] == RepeatSeed(4, 4516)
    calls = _count_steps(sim, monkeypatch)
    sim.advance(A, WholeEdges(758688))
    assert not calls and sa.traversals == 758688 and sa.node == Node(0, 0)


@pytest.mark.parametrize("fast", [True, False])
def test_repetition_skip(monkeypatch, fast):
    """An opponent on an edge leaving the ball is never touched by Seed(4)."""
    sim = Simulation(Scenario(0, 1, (9, 0), budget=10**9), fast_forward=fast)
    sa = sim.state(A)
    sa.cursor.finish_descriptor()
    _park(sim, B, (4, 0), E, Fraction(1, 2))
    calls = _count_steps(sim, monkeypatch)
    k = 168 * 40 + 17
    sim.advance(A, WholeEdges(k))
    assert sa.traversals == k
    assert sa.node == sa.cursor.position()
    if fast:
        assert len(calls) <= 2 * 168
    else:
        assert len(calls) == k


def test_whole_repeatseed_with_repetition_skip(monkeypatch):
    sim = Simulation(Scenario(0, 1, (9, 0), budget=10**9))
    sa = sim.state(A)
    sa.cursor.finish_descriptor()
    _park(sim, B, (4, 0), E, Fraction(1, 2))
    calls = _count_steps(sim, monkeypatch)
    sim.advance(A, WholeEdges(cost(RepeatSeed(4, 4516))))
    assert len(calls) <= 2 * 168 and sa.node == Node(0, 0)


def test_trace_lines(tmp_path):
    import io
    import json
    buf = io.StringIO()
    run(Scenario(0, 1, (1, 0)), trace=buf)
    lines = [json.loads(x) for x in buf.getvalue().splitlines()]
    assert lines and lines[-1]["agent"] in ("A", "B")
    assert {"context_a", "before_a", "after_b", "traversals_a"} <= set(lines[0])


class _Recorder:
    """Wraps a strategy and records its decisions."""

    def __init__(self, inner):
        self.inner, self.log = inner, []

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def decide(self, sim):
        d = self.inner.decide(sim)
        self.log.append(d)
        return d


class _Replay:
    lockstep_min_distance = 2

    def __init__(self, log):
        self.log = iter(log)

    def decide(self, sim):
        agent, amount = next(self.log)
        return agent.other, amount

    def lockstep_ready(self, sim):
        return False

    def alternating(self, sim):
        return False


@pytest.mark.parametrize("la,lb,off,strategy", [
    (0, 1, (1, 0), "random:5"),
    (1, 2, (1, 1), "random:9"),
    (2, 5, (-2, 1), "mirror_progress"),
    (3, 4, (0, 2), "round_robin"),
])
def test_swapping_roles_mirrors_the_outcome(la, lb, off, strategy):
    from gridrv.simulator import make_strategy
    sc = Scenario(la, lb, off, StrategySpec.parse(strategy), budget=200_000)
    rec = _Recorder(make_strategy(sc.strategy))
    first = Simulation(sc, fast_forward=False, strategy=rec).run()
    swapped = Scenario(lb, la, (-off[0], -off[1]), budget=200_000)
    second = Simulation(swapped, fast_forward=False, strategy=_Replay(rec.log)).run()
    assert first.met == second.met and first.stop_reason == second.stop_reason
    assert (first.traversals_a, first.traversals_b) == (second.traversals_b, second.traversals_a)
    if first.met:
        # B's frame is A's frame shifted by the offset
        a, b = first.location, second.location
        assert (b.node.x + off[0], b.node.y + off[1]) == tuple(a.node)
        assert (a.direction, a.fraction) == (b.direction, b.fraction)


def test_meeting_inside_edge_has_open_fraction():
    sim = Simulation(Scenario(0, 1, (1, 0)))
    first = sim.state(A).cursor.peek()
    _park(sim, B, (0, 0), first, Fraction(1, 3))
    rep = sim.run()
    assert 0 < rep.location.fraction < 1
