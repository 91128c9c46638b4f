import json

import pytest

from metasub import cli


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = cli.main(argv + ["--out", str(out)])
    return code, out


def test_gen_analyze_solve_pipeline(tmp_path):
    code, inst = run(["gen", "metric-random", "--n", "8", "--seed", "5"], tmp_path, "inst.json")
    assert code == 0
    doc = json.loads(inst.read_text())
    assert doc["n"] == 8
    assert doc["metadata"]["sigma"] == 1.0

    code, rep = run(["analyze", str(inst)], tmp_path, "analyze.json")
    assert code == 0
    results = json.loads(rep.read_text())["results"]
    assert results["metric"]["semi_metric"]["sigma"] <= 1 + 1e-9
    assert results["gamma"]["gamma"] <= 1 + 1e-6
    assert results["classification"]["monotone"]
    assert all(c["passed"] is not False for c in results["lemmas"].values())

    code, rep = run(["solve", str(inst), "--with-opt"], tmp_path, "solve.json")
    assert code == 0
    payload = json.loads(rep.read_text())["results"]
    assert payload["chosen"]["value"] >= payload["matching_candidate"]["value"] - 1e-12
    assert payload["opt"]["ratio"] is None or payload["opt"]["ratio"] >= 1 - 1e-9


def test_gen_families_report_declared_parameters(tmp_path):
    _, inst = run(
        ["gen", "negtype-sqeuclid", "--n", "6", "--seed", "1"], tmp_path, "neg.json"
    )
    _, rep = run(["analyze", str(inst)], tmp_path, "negrep.json")
    res = json.loads(rep.read_text())["results"]
    assert res["metric"]["negative_type"]["holds"]
    assert res["metric"]["semi_metric"]["sigma"] <= 2 + 1e-6

    _, inst = run(
        ["gen", "semimetric-power", "--n", "6", "--power", "2", "--seed", "2"],
        tmp_path, "pow.json",
    )
    _, rep = run(["analyze", str(inst)], tmp_path, "powrep.json")
    res = json.loads(rep.read_text())["results"]
    assert res["metric"]["semi_metric"]["sigma"] <= 2 + 1e-6

    _, inst = run(["gen", "js-random", "--n", "6", "--seed", "3"], tmp_path, "js.json")
    _, rep = run(["analyze", str(inst)], tmp_path, "jsrep.json")
    res = json.loads(rep.read_text())["results"]
    assert res["metric"]["semi_metric"]["sigma"] <= 2 + 1e-6

    _, inst = run(["gen", "coverage-random", "--n", "6", "--seed", "4"], tmp_path, "cov.json")
    _, rep = run(["analyze", str(inst)], tmp_path, "covrep.json")
    res = json.loads(rep.read_text())["results"]
    assert res["classification"]["submodular"]
    assert res["gamma"]["vacuous"]


def test_roundtrip_digest_stable(tmp_path):
    _, inst = run(["gen", "metric-random", "--n", "6", "--seed", "9"], tmp_path, "inst.json")
    doc = json.loads(inst.read_text())
    assert cli.digest(doc) == cli.digest(json.loads(json.dumps(doc)))


def test_reports_are_deterministic(tmp_path):
    _, inst = run(["gen", "metric-random", "--n", "7", "--seed", "11"], tmp_path, "inst.json")
    blobs = set()
    for rep in range(3):
        _, out = run(["solve", str(inst), "--with-opt"], tmp_path, f"s{rep}.json")
        blobs.add(out.read_bytes())
    assert len(blobs) == 1


def test_csv_trace_format(tmp_path):
    _, inst = run(["gen", "metric-random", "--n", "7", "--seed", "2"], tmp_path, "inst.json")
    code, out = run(["solve", str(inst), "--format", "csv"], tmp_path, "trace.csv")
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "iteration,removed,inserted,value"
    for line in lines[1:]:
        assert len(line.split(",")) == 4


def test_epsilon_orders_iterations(tmp_path):
    _, inst = run(["gen", "metric-random", "--n", "9", "--seed", "13"], tmp_path, "inst.json")
    counts = {}
    for eps in ("0.5", "0.01"):
        _, out = run(["solve", str(inst), "--epsilon", eps], tmp_path, f"e{eps}.json")
        counts[eps] = json.loads(out.read_text())["results"]["iterations"]
    assert counts["0.01"] >= counts["0.5"]


def test_exit_code_validation_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["analyze", str(bad)]) == 2
    good_shape = tmp_path / "inconsistent.json"
    good_shape.write_text(json.dumps({
        "n": 3,
        "function": {"kind": "diversity", "distance": [[0, 1], [1, 0]]},
        "matroid": {"kind": "uniform", "r": 2},
    }))
    assert cli.main(["analyze", str(good_shape)]) == 2


def test_exit_code_guard_error(tmp_path):
    code, inst = run(["gen", "metric-random", "--n", "21", "--seed", "1"], tmp_path, "big.json")
    assert code == 0
    assert cli.main(["solve", str(inst), "--with-opt", "--out", str(tmp_path / "x.json")]) == 3


def test_exit_code_property_failure(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "verify_matching_suite", lambda rng, samples: [{"bad": True}])
    assert cli.main(["verify", "matching", "--out", str(tmp_path / "v.json")]) == 4


def test_verify_suites_pass(tmp_path):
    for suite, samples in (("matching", "15"), ("matroid", "10"), ("lemmas", "3")):
        code, out = run(
            ["verify", suite, "--samples", samples, "--seed", "7"], tmp_path, f"{suite}.json"
        )
        assert code == 0, suite
        assert json.loads(out.read_text())["results"]["passed"]


def test_unknown_generator_params_rejected(tmp_path):
    assert cli.main(["gen", "semimetric-power", "--n", "5", "--power", "0.5",
                     "--out", str(tmp_path / "x.json")]) == 2
    assert cli.main(["gen", "metric-random", "--n", "1",
                     "--out", str(tmp_path / "y.json")]) == 2
