import json
from fractions import Fraction as Q

import pytest

from gcbp.bench import BenchCase, bench, format_table, to_jsonl
from gcbp.cli import main
from gcbp.core import validate_instance
from gcbp.fileio import write_instance_file
from gcbp.generators import generate_random_instance


def flat_case(name, sizes):
    return BenchCase(name, validate_instance(sizes, [0] + [1] * len(sizes)))


def test_flat_set_within_bound():
    cases = [flat_case("a", [Q(1, 2)] * 4), flat_case("b", [Q(3, 10), Q(7, 10), Q(1, 5)])]
    rows = bench(cases, ["greedy", "aptas", "oracle"], [Q(1, 2)])
    assert len(rows) == 6 and all(r["status"] == "ok" and r["valid"] for r in rows)
    for r in rows:
        if r["algorithm"] == "aptas":
            assert r["within_bound"] and Q(r["cost"]) <= Q(r["bound"])
        assert Q(r["ratio"]) >= 1
    assert "aptas" in format_table(rows)


def test_empty_set():
    assert bench([], ["greedy"]) == []
    assert format_table([]).count("\n") == 2


def test_too_large_row_does_not_abort():
    big = flat_case("big", [0] * 50)
    rows = bench([big], ["oracle", "greedy"])
    assert rows[0]["status"] == "TooLarge" and rows[1]["status"] == "ok"
    assert rows[0]["reference_kind"] == "lower_bound"


def test_wrong_class_captured():
    rows = bench([flat_case("x", [0, 0, 0])], ["k1"])
    assert rows[0]["status"] == "WrongClass"


def test_records_without_timing_are_reproducible():
    cases = [flat_case("a", [Q(1, 3)] * 3)]
    a = to_jsonl(bench(cases, ["greedy", "aptas"], [1]))
    b = to_jsonl(bench(cases, ["greedy", "aptas"], [1]))
    assert a == b and "seconds" not in a
    assert "seconds" in to_jsonl(bench(cases, ["greedy"], timing=True))


@pytest.fixture
def instance_path(tmp_path):
    path = tmp_path / "inst.json"
    write_instance_file(path, generate_random_instance(5, cost_model="concave", seed=3))
    return path


def test_cli_solve_and_verify(tmp_path, instance_path, capsys):
    out = tmp_path / "p.json"
    assert main(["solve", str(instance_path), "--algorithm", "aptas", "--epsilon", "1", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["algorithm"] == "aptas" and "certificate" in doc
    assert main(["verify", str(instance_path), str(out)]) == 0
    assert capsys.readouterr().out.startswith("ok")


def test_cli_verify_failure_exit_code(tmp_path, instance_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"format": "gcbp-packing", "bins": [{"items": [1]}]}))
    assert main(["verify", str(instance_path), str(bad)]) == 2


def test_cli_budget_exit_code(instance_path, tmp_path, monkeypatch):
    monkeypatch.setenv("GCBP_BUDGET", "2")
    out = tmp_path / "p.json"
    assert main(["solve", str(instance_path), "--algorithm", "aptas", "--epsilon", "1/2", "-o", str(out)]) == 3


def test_cli_classify(instance_path, capsys):
    assert main(["classify", str(instance_path)]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] in ("PolyK1", "PolyK2", "NpHard")


def test_cli_errors_exit_one(tmp_path, instance_path):
    assert main(["solve", str(tmp_path / "missing.json")]) == 1
    assert main(["solve", str(instance_path), "--algorithm", "k1"]) in (0, 1)
    with pytest.raises(SystemExit) as info:
        main(["solve", str(instance_path), "--epsilon", "abc"])
    assert info.value.code == 1


def test_cli_gen_reduce_bench(tmp_path, capsys):
    inst = tmp_path / "g.json"
    assert main(["gen", "--n", "4", "--cost-model", "step", "--K", "2", "-o", str(inst)]) == 0
    assert json.loads(inst.read_text())["cost"] == ["0", "1", "1", "4", "4"]
    red = tmp_path / "r.json"
    assert main(["reduce-3p", "--integers", "2,2,2,2,2,2", "--bound", "6", "--k", "4", "-o", str(red)]) == 0
    assert "threshold 7" in capsys.readouterr().err
    assert main(["reduce-3p", "--integers", "1,2,3", "--bound", "6"]) == 1
    jl = tmp_path / "b.jsonl"
    assert main(["bench", str(inst), str(red), "--algorithms", "greedy,oracle", "--jsonl", str(jl)]) == 0
    assert len(jl.read_text().splitlines()) == 4
