import json

import pytest

from gridrv.cli import CSV_HEADER, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_inspect(capsys):
    assert run_cli(capsys, "inspect", "transform", "2")[1].strip() == "110001"
    assert run_cli(capsys, "inspect", "rho-r", "2")[1].strip() == "rho=22 r=28"
    code, out, _ = run_cli(capsys, "inspect", "bd", "1", "0")
    rows = out.strip().splitlines()
    assert code == 0 and len(rows) == 13
    assert rows[1].startswith('0,Cloudberry,"1,1,1,0"')
    assert rows[2].startswith('1,RepeatSeed,"4,4516"')


def test_cost_and_bd(capsys):
    assert run_cli(capsys, "cost", "Cloudberry(1,1,1,3)")[1].strip() == "4516"
    out = run_cli(capsys, "bd", "2", "0", "--call", "harvest")[1]
    assert len(out.strip().splitlines()) == 15
    with pytest.raises(SystemExit) as exc:
        main(["cost", "Cloudberry(1,1)x"])
    assert exc.value.code == 2


def test_simulate_single(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--labels", "0", "1", "--offset", "1", "0",
                           "--stop-bound", "auto")
    header, row = out.strip().splitlines()
    assert code == 0 and header == ",".join(CSV_HEADER)
    fields = dict(zip(CSV_HEADER, row.split(",")))
    assert fields["met"] == "true" and fields["d1"] == "1"


def test_simulate_config(tmp_path, capsys):
    cfg = {"defaults": {"budget": 200000, "stop_bound": "auto"},
           "scenarios": [{"labels": [0, 1], "offset": [1, 0], "strategy": "random"},
                         {"labels": [1, 2], "offset": [1, 1], "strategy": "greedy_avoid",
                          "stop_bound": None}]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for n in range(2):
        d = tmp_path / f"out{n}"
        code = main(["simulate", "--config", str(path), "--out", str(d), "--seed", "3",
                     "--trace", "--jobs", "2"])
        assert code == 0
        outs.append((d / "results.csv").read_bytes())
        assert (d / "trace_000.jsonl").exists()
    assert outs[0] == outs[1]
    assert b"random:3" in outs[0]


def test_simulate_errors(tmp_path, capsys):
    assert run_cli(capsys, "simulate", "--labels", "0", "0", "--offset", "1", "0")[0] == 2
    path = tmp_path / "empty.json"
    path.write_text('{"scenarios": []}')
    code, out, _ = run_cli(capsys, "simulate", "--config", str(path))
    assert code == 0 and out.strip() == ",".join(CSV_HEADER)
    path.write_text("{not json")
    assert run_cli(capsys, "simulate", "--config", str(path))[0] == 2
    # a bounded run that cannot meet within its budget fails the exit code
    code, _, _ = run_cli(capsys, "simulate", "--labels", "0", "1", "--offset", "3", "0",
                         "--strategy", "greedy_avoid", "--stop-bound", "4", "--budget", "100")
    assert code == 1


def test_verify(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "verify", "decomposition", "--out", str(tmp_path))
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and records and all(r["passed"] for r in records)
    assert json.loads((tmp_path / "verify.json").read_text()) == records
