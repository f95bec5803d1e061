import json

import numpy as np
from typer.testing import CliRunner

from wavelet_filter_kit.cli import app
from wavelet_filter_kit.storage import read_evaluations, read_signal

runner = CliRunner()


def _gen(*args):
    return runner.invoke(app, ["gen", *args])


def test_gen_is_deterministic_and_writes_a_trace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("a.json", "b.json"):
        result = _gen("--n", "3", "--index", "2", "--rho", "0.5", "--seed", "7", "-o", name)
        assert result.exit_code == 0, result.output
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    payload = json.loads((tmp_path / "a.json").read_text(encoding="utf-8"))
    assert payload["n"] == 3
    assert payload["m"] == 2
    assert payload["seed"] == 7

    lines = (tmp_path / "artifacts" / "traces.jsonl").read_text(encoding="utf-8").splitlines()
    record = json.loads(lines[-1])
    assert record["command"] == "gen"
    assert record["outcome"] == "ok"


def test_gen_reads_the_seed_from_the_environment(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert _gen("--n", "2", "--index", "1", "--seed", "5", "-o", "flag.json").exit_code == 0
    result = runner.invoke(
        app, ["gen", "--n", "2", "--index", "1", "-o", "env.json"], env={"WFK_SEED": "5"}
    )
    assert result.exit_code == 0
    assert (tmp_path / "flag.json").read_bytes() == (tmp_path / "env.json").read_bytes()


def test_gen_without_rho_is_fir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert _gen("--n", "2", "--index", "3", "-o", "fir.json").exit_code == 0
    payload = json.loads((tmp_path / "fir.json").read_text(encoding="utf-8"))
    assert all(factor["alpha"] == [0.0, 0.0] for factor in payload["factors"])


def test_gen_from_box_coordinates(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "box.json").write_text(json.dumps({"box": [0, 0, 0, 0]}), encoding="utf-8")
    result = _gen("--n", "2", "--index", "1", "--box", "box.json", "-o", "p.json")
    assert result.exit_code == 0, result.output
    payload = json.loads((tmp_path / "p.json").read_text(encoding="utf-8"))
    assert payload["factors"] == [{"v": [[1.0, 0.0], [0.0, 0.0]], "alpha": [0.0, 0.0]}]
    assert "seed" not in payload


def test_gen_rejects_a_single_band(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    result = _gen("--n", "1", "--index", "0", "-o", "p.json")
    assert result.exit_code == 2
    assert not (tmp_path / "p.json").exists()


def test_gen_box_with_wrong_length_is_a_usage_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "box.json").write_text("[0, 0, 0]", encoding="utf-8")
    result = _gen("--n", "2", "--index", "1", "--box", "box.json", "-o", "p.json")
    assert result.exit_code == 2
    assert "Error:" in result.output
    assert "--box" in result.output


def test_gen_box_outside_its_range_is_a_usage_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "box.json").write_text("[0, 0, 0, 0.7]", encoding="utf-8")
    result = _gen("--n", "2", "--index", "1", "--rho", "0.5", "--box", "box.json", "-o", "p.json")
    assert result.exit_code == 2
    assert "--box" in result.output
    assert "radius" in result.output
    assert not (tmp_path / "p.json").exists()


def test_realize_writes_the_expected_state_dimension(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "1", "--rho", "0.5", "--seed", "1", "-o", "p.json")
    result = runner.invoke(app, ["realize", "p.json", "-o", "r.json"])
    assert result.exit_code == 0, result.output
    assert "state dimension 3" in result.output
    payload = json.loads((tmp_path / "r.json").read_text(encoding="utf-8"))
    assert payload["state_dim"] == 3


def test_verify_passes_for_generated_parameters_and_realizations(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "3", "--index", "2", "--rho", "0.9", "--seed", "3", "-o", "p.json")
    runner.invoke(app, ["realize", "p.json", "-o", "r.json"])

    result = runner.invoke(app, ["verify", "p.json", "--out", "reports/p.json"])
    assert result.exit_code == 0, result.output
    assert "paraunitary: pass" in result.output
    report = json.loads((tmp_path / "reports" / "p.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert {check["name"] for check in report["checks"]} >= {
        "symmetry",
        "paraunitary",
        "frequency_pr",
        "degree",
        "transfer",
        "minimality",
        "stein",
    }
    assert (tmp_path / "reports" / "p.md").exists()

    result = runner.invoke(app, ["verify", "r.json", "--points", "64"])
    assert result.exit_code == 0, result.output


def test_verify_fails_for_a_perturbed_realization(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "1", "--rho", "0.5", "--seed", "2", "-o", "p.json")
    runner.invoke(app, ["realize", "p.json", "-o", "r.json"])
    payload = json.loads((tmp_path / "r.json").read_text(encoding="utf-8"))
    payload["a"]["data"] = [[1.01 * re, 1.01 * im] for re, im in payload["a"]["data"]]
    (tmp_path / "r.json").write_text(json.dumps(payload), encoding="utf-8")

    result = runner.invoke(app, ["verify", "r.json", "--out", "report.json"])
    assert result.exit_code == 1
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    verdicts = {check["name"]: check["passed"] for check in report["checks"]}
    assert verdicts["paraunitary"] is False
    assert verdicts["stein"] is False
    assert verdicts["minimality"] is True


def test_verify_reports_invariant_violations(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "1", "-o", "p.json")
    payload = json.loads((tmp_path / "p.json").read_text(encoding="utf-8"))
    payload["factors"][0]["v"] = [[1.0, 0.0], [1.0, 0.0]]
    (tmp_path / "p.json").write_text(json.dumps(payload), encoding="utf-8")
    result = runner.invoke(app, ["verify", "p.json"])
    assert result.exit_code == 3
    assert "unit norm" in result.output


def test_verify_rejects_a_realization_with_rectangular_d(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "0", "-o", "p.json")
    runner.invoke(app, ["realize", "p.json", "-o", "r.json"])
    payload = json.loads((tmp_path / "r.json").read_text(encoding="utf-8"))
    payload["b"] = {"rows": 1, "cols": 3, "data": [[0.0, 0.0]] * 3}
    payload["d"] = {"rows": 2, "cols": 3, "data": [[1.0, 0.0]] * 6}
    (tmp_path / "r.json").write_text(json.dumps(payload), encoding="utf-8")

    result = runner.invoke(app, ["verify", "r.json", "--points", "8"])
    assert result.exit_code == 2
    assert "N x N" in result.output


def test_verify_missing_file_is_a_usage_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    result = runner.invoke(app, ["verify", "nowhere.json"])
    assert result.exit_code == 2


def test_eval_at_one_point_and_on_the_circle(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "0", "-o", "p.json")
    result = runner.invoke(app, ["eval", "p.json", "--z", "1,0"])
    assert result.exit_code == 0, result.output
    assert "0.7071067811865" in result.output

    _gen("--n", "2", "--index", "2", "--rho", "0.5", "--seed", "4", "-o", "q.json")
    runner.invoke(app, ["realize", "q.json", "-o", "r.json"])
    assert runner.invoke(app, ["eval", "q.json", "--circle", "8", "-o", "q.csv"]).exit_code == 0
    assert runner.invoke(app, ["eval", "r.json", "--circle", "8", "-o", "r.csv"]).exit_code == 0
    from_params = read_evaluations(tmp_path / "q.csv")
    from_state = read_evaluations(tmp_path / "r.csv")
    assert len(from_params) == 8
    for (z1, f1), (z2, f2) in zip(from_params, from_state, strict=True):
        assert z1 == z2
        np.testing.assert_allclose(f1, f2, atol=1e-9)


def test_eval_needs_exactly_one_point_source(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "0", "-o", "p.json")
    assert runner.invoke(app, ["eval", "p.json"]).exit_code == 2
    assert runner.invoke(app, ["eval", "p.json", "--z", "1,0", "--circle", "4"]).exit_code == 2
    assert runner.invoke(app, ["eval", "p.json", "--z", "nope"]).exit_code == 2


def test_eval_at_a_pole_is_a_numeric_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "0", "-o", "p.json")
    result = runner.invoke(app, ["eval", "p.json", "--z", "0,0"])
    assert result.exit_code == 4
    record = json.loads(
        (tmp_path / "artifacts" / "traces.jsonl").read_text(encoding="utf-8").splitlines()[-1]
    )
    assert record["command"] == "eval"
    assert record["outcome"] == "error"


def test_haar_analysis_and_round_trip(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "0", "-o", "haar.json")
    (tmp_path / "ones.csv").write_text("1\n1\n1\n1\n", encoding="utf-8")
    result = runner.invoke(app, ["analyze", "haar.json", "--signal", "ones.csv", "--out", "bands"])
    assert result.exit_code == 0, result.output
    np.testing.assert_allclose(read_signal(tmp_path / "bands" / "band_0.csv"), [1, 1])
    np.testing.assert_allclose(read_signal(tmp_path / "bands" / "band_1.csv"), [1, 1])
    filters = json.loads((tmp_path / "bands" / "filters.json").read_text(encoding="utf-8"))
    assert filters["delay"] == 1


def test_fir_round_trip_through_files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "3", "--index", "2", "--seed", "9", "-o", "p.json")
    rng = np.random.default_rng(0)
    samples = rng.normal(size=48) + 1j * rng.normal(size=48)
    (tmp_path / "x.csv").write_text(
        "".join(f"{float(x.real)!r},{float(x.imag)!r}\n" for x in samples), encoding="utf-8"
    )
    assert (
        runner.invoke(app, ["analyze", "p.json", "--signal", "x.csv", "--out", "bands"]).exit_code
        == 0
    )
    result = runner.invoke(
        app,
        ["synthesize", "p.json", "--bands", "bands", "--out", "y.csv", "--signal", "x.csv"],
    )
    assert result.exit_code == 0, result.output
    sidecar = json.loads((tmp_path / "y.json").read_text(encoding="utf-8"))
    assert sidecar["n"] == 3
    assert sidecar["length"] == 48
    assert sidecar["relative_error"] <= 1e-9
    y = read_signal(tmp_path / "y.csv")
    np.testing.assert_allclose(y, np.roll(samples, sidecar["delay"]), atol=1e-9)


def test_analyze_rejects_odd_lengths_and_iir_filters(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _gen("--n", "2", "--index", "0", "-o", "fir.json")
    _gen("--n", "2", "--index", "1", "--rho", "0.5", "-o", "iir.json")
    (tmp_path / "odd.csv").write_text("1\n2\n3\n", encoding="utf-8")
    (tmp_path / "even.csv").write_text("1\n2\n3\n4\n", encoding="utf-8")

    odd = runner.invoke(app, ["analyze", "fir.json", "--signal", "odd.csv", "--out", "b"])
    assert odd.exit_code == 2
    iir = runner.invoke(app, ["analyze", "iir.json", "--signal", "even.csv", "--out", "b"])
    assert iir.exit_code == 5


def test_bad_config_file_is_a_usage_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "wfk.toml").write_text("[verification]\npoints = 0\n", encoding="utf-8")
    result = _gen("--n", "2", "--index", "0", "-o", "p.json", "--config", "wfk.toml")
    assert result.exit_code == 2
    assert _gen("--n", "2", "--index", "0", "-o", "p.json", "--config", "none.toml").exit_code == 2


def test_gen_from_quarter_turn_box(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "box.json").write_text(json.dumps([np.pi / 2, 0, 0, 0]), encoding="utf-8")
    result = _gen("--n", "2", "--index", "1", "--rho", "0.5", "--box", "box.json", "-o", "p.json")
    assert result.exit_code == 0, result.output
    factor = json.loads((tmp_path / "p.json").read_text(encoding="utf-8"))["factors"][0]
    np.testing.assert_allclose(factor["v"], [[0, 0], [1, 0]], atol=1e-15)
    assert factor["alpha"] == [0.0, 0.0]
