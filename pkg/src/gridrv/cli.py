"""Command-line front end.

    gridrv simulate --config experiments.json --out results/
    gridrv simulate --labels 0 1 --offset 1 0 --strategy greedy_avoid --stop-bound auto
    gridrv verify patterns push
    gridrv inspect transform 2 | inspect rho-r 2 | inspect bd 1 0 | inspect cost "Berry(1,1)"
    gridrv bd 1 0 --call harvest
    gridrv cost "Cloudberry(1,1,1,0)"

The experiment config is JSON:

    {"fast_forward": true, "trace": false, "out": "results",
     "defaults": {"budget": 1000000, "strategy": "round_robin", "stop_bound": "auto"},
     "scenarios": [{"labels": [0, 1], "offset": [1, 0], "strategy": "random:7"}]}

``stop_bound`` is a power of two, null, or "auto" for the smallest power of
two that is at least max(D, l'). Flags given on the command line override the
file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .decomposition import Assumption, Harvest, PushPattern, bd_items, cumulative_cost, phase_cost, r, rho
from .labels import DuplicateLabelError, transform
from .patterns import cost, params, parse_pattern
from .simulator import MeetingReport, Scenario, Simulation, StrategySpec
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_HEADER = ("index", "label_a", "label_b", "D", "l_prime", "d1", "strategy", "budget",
              "stop_bound", "met", "stop_reason", "traversals_a", "traversals_b", "total",
              "location", "context_a", "context_b")


class ConfigError(ValueError):
    """The experiment configuration is unusable."""


@dataclass(frozen=True)
class ExperimentConfig:
    scenarios: tuple[Scenario, ...]
    out: Path | None = None
    fast_forward: bool = True
    trace: bool = False


def _scenario(raw: dict, defaults: dict, budget: int | None, seed: int | None) -> Scenario:
    merged = {**defaults, **raw}
    unknown = set(merged) - {"labels", "offset", "strategy", "budget", "stop_bound"}
    if unknown:
        raise ConfigError(f"unknown scenario keys {sorted(unknown)}")
    try:
        la, lb = merged["labels"]
        dx, dy = merged["offset"]
    except (KeyError, TypeError, ValueError):
        raise ConfigError("each scenario needs labels [a, b] and offset [dx, dy]") from None
    text = str(merged.get("strategy", "round_robin"))
    if text == "random" and seed is not None:
        text = f"random:{seed}"
    strategy = StrategySpec.parse(text)
    limit = budget if budget is not None else int(merged.get("budget", 10**6))
    bound = merged.get("stop_bound")
    probe = Scenario(int(la), int(lb), (int(dx), int(dy)), strategy, limit)
    if bound == "auto":
        bound = probe.good_assumption
    return Scenario(probe.label_a, probe.label_b, probe.offset, strategy, limit,
                    None if bound is None else int(bound))


def load_config(data: dict, budget: int | None = None, seed: int | None = None) -> ExperimentConfig:
    """Validate every scenario before anything runs."""
    if not isinstance(data, dict):
        raise ConfigError("the config must be a JSON object")
    defaults = data.get("defaults", {})
    scenarios = []
    for n, raw in enumerate(data.get("scenarios", [])):
        try:
            scenarios.append(_scenario(raw, defaults, budget, seed))
        except (DuplicateLabelError, ValueError) as exc:
            raise ConfigError(f"scenario {n}: {exc}") from None
    out = data.get("out")
    return ExperimentConfig(tuple(scenarios), Path(out) if out else None,
                            bool(data.get("fast_forward", True)), bool(data.get("trace", False)))


def csv_row(index: int, sc: Scenario, rep: MeetingReport) -> list:
    return [index, sc.label_a, sc.label_b, sc.distance, sc.first_diff, sc.good_assumption,
            str(sc.strategy), sc.budget, "" if sc.stop_bound is None else sc.stop_bound,
            "true" if rep.met else "false", rep.stop_reason.value, rep.traversals_a,
            rep.traversals_b, rep.total, "" if rep.location is None else str(rep.location),
            str(rep.context_a or ""), str(rep.context_b or "")]


def run_experiments(cfg: ExperimentConfig, jobs: int = 1) -> tuple[list[MeetingReport], list[str]]:
    """Run all scenarios (optionally on worker threads); returns reports and traces in order."""

    def one(sc: Scenario) -> tuple[MeetingReport, str]:
        buf = io.StringIO() if cfg.trace else None
        rep = Simulation(sc, cfg.fast_forward, buf).run()
        return rep, buf.getvalue() if buf else ""

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(one, cfg.scenarios))
    return [r for r, _ in results], [t for _, t in results]


def write_csv(stream, cfg: ExperimentConfig, reports: list[MeetingReport]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for i, (sc, rep) in enumerate(zip(cfg.scenarios, reports)):
        w.writerow(csv_row(i, sc, rep))


def cmd_simulate(args) -> int:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if args.labels:
        if not args.offset:
            print("error: --labels needs --offset", file=sys.stderr)
            return EXIT_USAGE
        single = {"labels": args.labels, "offset": args.offset}
        if args.strategy:
            single["strategy"] = args.strategy
        if args.stop_bound:
            single["stop_bound"] = args.stop_bound if args.stop_bound == "auto" else int(args.stop_bound)
        data = {**data, "scenarios": [*data.get("scenarios", []), single]}
    try:
        cfg = load_config(data, args.budget, args.seed)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out) if args.out else cfg.out
    cfg = ExperimentConfig(cfg.scenarios, out, cfg.fast_forward and not args.no_fast_forward,
                           cfg.trace or args.trace)
    reports, traces = run_experiments(cfg, args.jobs)
    if out is None:
        write_csv(sys.stdout, cfg, reports)
    else:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "results.csv", "w", newline="") as f:
            write_csv(f, cfg, reports)
        if cfg.trace:
            for i, text in enumerate(traces):
                (out / f"trace_{i:03d}.jsonl").write_text(text)
    bounded = [rep for sc, rep in zip(cfg.scenarios, reports) if sc.stop_bound is not None]
    return EXIT_OK if all(rep.met for rep in bounded) else EXIT_FAIL


def cmd_verify(args) -> int:
    failed = []
    report = []
    for suite in args.suites:
        for check in run_suite(suite):
            report.append(check.as_dict())
            print(json.dumps(check.as_dict()), flush=True)
            if not check.passed:
                failed.append(f"{suite}: {check.name}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify.json").write_text(json.dumps(report, indent=2) + "\n")
    for name in failed:
        print(f"FAILED {name}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def _bd_call(d: int, call: str):
    if call == "assumption":
        return Assumption(d)
    if call == "harvest":
        return Harvest(d)
    kind, _, i = call.partition(":")
    if kind == "push" and i:
        return PushPattern(int(i), d)
    raise ValueError(f"unknown call {call!r}; use assumption, harvest or push:I")


def print_bd(d: int, label: int, call: str = "assumption", stream=None) -> None:
    w = csv.writer(stream or sys.stdout, lineterminator="\n")
    w.writerow(("index", "type", "parameters", "context"))
    for n, (p, ctx) in enumerate(bd_items(_bd_call(d, call), transform(label))):
        w.writerow((n, type(p).__name__, ",".join(map(str, params(p))), str(ctx)))


def print_cost(text: str) -> None:
    p = parse_pattern(text)
    print(cost(p))


def cmd_inspect(args, parser) -> int:
    what, rest = args.what, args.args
    try:
        if what == "transform" and len(rest) == 1:
            print(transform(int(rest[0])))
        elif what == "rho-r" and len(rest) == 1:
            d = int(rest[0])
            print(f"rho={rho(d)} r={r(d)}")
        elif what == "bd" and len(rest) == 2:
            print_bd(int(rest[0]), int(rest[1]))
        elif what == "cost" and len(rest) == 1:
            print_cost(rest[0])
        else:
            parser.error(f"cannot inspect {what} with arguments {rest}")
    except ValueError as exc:
        parser.error(str(exc))
    return EXIT_OK


def cmd_cost(args, parser) -> int:
    try:
        if args.descriptor:
            print_cost(args.descriptor)
        elif args.phase:
            t = transform(args.label)
            print(f"phase={phase_cost(args.phase, t)} cumulative={cumulative_cost(args.phase, t)}")
        else:
            parser.error("give a descriptor or --phase D")
    except ValueError as exc:
        parser.error(str(exc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gridrv", description="Asynchronous grid rendezvous toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run rendezvous scenarios and write a CSV summary")
    sim.add_argument("--config", help="JSON experiment file")
    sim.add_argument("--out", help="output directory (default: CSV on stdout)")
    sim.add_argument("--no-fast-forward", action="store_true")
    sim.add_argument("--trace", action="store_true", help="write JSON-lines traces (needs --out)")
    sim.add_argument("--budget", type=int, help="override every scenario's traversal budget")
    sim.add_argument("--seed", type=int, help="seed for scenarios that ask for plain 'random'")
    sim.add_argument("--jobs", type=int, default=1)
    sim.add_argument("--labels", type=int, nargs=2, metavar=("A", "B"))
    sim.add_argument("--offset", type=int, nargs=2, metavar=("DX", "DY"))
    sim.add_argument("--strategy", help="round_robin, random:SEED, freeze:AGENT:N, greedy_avoid, mirror_progress")
    sim.add_argument("--stop-bound", help="power of two or 'auto'")

    ver = sub.add_parser("verify", help="run property suites")
    ver.add_argument("suites", nargs="+", choices=SUITES)
    ver.add_argument("--out", help="directory for verify.json")

    ins = sub.add_parser("inspect", help="transform L | rho-r D | bd D LABEL | cost DESCRIPTOR")
    ins.add_argument("what", choices=("transform", "rho-r", "bd", "cost"))
    ins.add_argument("args", nargs="*")

    bdp = sub.add_parser("bd", help="basic decomposition as CSV rows")
    bdp.add_argument("d", type=int)
    bdp.add_argument("label", type=int)
    bdp.add_argument("--call", default="assumption", help="assumption, harvest or push:I")

    cp = sub.add_parser("cost", help="cost of a descriptor, or of a phase with --phase")
    cp.add_argument("descriptor", nargs="?")
    cp.add_argument("--phase", type=int)
    cp.add_argument("--label", type=int, default=0)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "inspect":
        return cmd_inspect(args, parser)
    if args.command == "bd":
        try:
            print_bd(args.d, args.label, args.call)
        except ValueError as exc:
            parser.error(str(exc))
        return EXIT_OK
    return cmd_cost(args, parser)


if __name__ == "__main__":
    sys.exit(main())
