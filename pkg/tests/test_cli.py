import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from mcf import cli, models
from mcf.core import angle_between, axis_angle, normalize
from mcf.exceptions import ParseError

SCHEMAS = {p.name.split(".")[0]: json.loads(p.read_text()) for p in cli.SCHEMA_DIR.glob("*.schema.json")}


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out


def validate(doc, name):
    jsonschema.validate(doc, SCHEMAS[name])


def error_doc(err):
    doc = json.loads(err.strip().splitlines()[-1])
    validate(doc, "error")
    return doc


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def simulated(workdir):
    paths = {}
    for model, n in [("gaussian", 50_000), ("skew-normal", 100_000), ("gamma", 100_000)]:
        out = workdir / f"{model}.csv"
        assert cli.main(["simulate", "--model", model, "--n", str(n), "--seed", "0", "--output", str(out)]) == 0
        paths[model] = out
    return paths


def significant_digits(text):
    mant = text.lower().split("e")[0].lstrip("-").replace(".", "").lstrip("0")
    return len(mant)


class TestSimulate:
    def test_deterministic_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            code, _ = run(["simulate", "--model", "gaussian", "--n", 50_000, "--seed", 1, "--output", p], capsys)
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().splitlines()
        assert lines[0] == "v1,v2" and len(lines) == 50_001

    def test_sidecar(self, simulated):
        doc = json.loads(simulated["skew-normal"].with_suffix(".json").read_text())
        validate(doc, "simulate")
        np.testing.assert_allclose(doc["params"]["mu"], [0.8367, -0.1195], atol=5e-4)
        assert doc["seed"] == 0 and doc["n_samples"] == 100_000

    def test_gamma_centered(self, simulated):
        X = cli.read_csv(simulated["gamma"])
        assert X.shape == (100_000, 2)
        se = X.std(axis=0, ddof=1) / np.sqrt(len(X))
        assert np.all(np.abs(X.mean(axis=0)) <= 3 * se)

    def test_round_trip(self, simulated):
        p = models.model_from_dict("gamma", cli.DEFAULT_PARAMS["gamma"])
        mem = models.sample_gamma(p, 100_000, 0).values
        np.testing.assert_allclose(cli.read_csv(simulated["gamma"]), mem, rtol=0, atol=1e-10)

    def test_precision(self, simulated):
        first = simulated["gaussian"].read_text().splitlines()[1].split(",")
        assert all(significant_digits(t) >= 12 for t in first)

    def test_params_from_file(self, tmp_path, capsys):
        pfile = tmp_path / "p.json"
        pfile.write_text(json.dumps({"sigma": [[2.0, 0.5], [0.5, 1.0]]}))
        out = tmp_path / "g.csv"
        code, _ = run(["simulate", "--model", "gaussian", "--params", pfile, "--n", 100, "--output", out], capsys)
        assert code == 0
        assert json.loads(out.with_suffix(".json").read_text())["params"]["sigma"] == [[2.0, 0.5], [0.5, 1.0]]

    def test_small_n_rejected(self, tmp_path, capsys):
        code, out = run(["simulate", "--model", "gaussian", "--n", 10, "--output", tmp_path / "x.csv"], capsys)
        assert code != 0
        assert error_doc(out.err)["error"] == "ValueError"

    def test_not_positive_definite(self, tmp_path, capsys):
        bad = json.dumps({"sigma": [[1.0, 2.0], [2.0, 1.0]]})
        code, out = run(["simulate", "--model", "gaussian", "--params", bad, "--n", 100, "--output", tmp_path / "x.csv"], capsys)
        assert code != 0
        assert error_doc(out.err)["error"] == "NotPositiveDefinite"

    def test_unwritable(self, tmp_path, capsys):
        code, out = run(["simulate", "--model", "gamma", "--n", 100, "--output", tmp_path / "no" / "x.csv"], capsys)
        assert code != 0
        assert error_doc(out.err)["error"] == "FileNotFoundError"


class TestAnalyze:
    def test_gaussian(self, simulated, workdir, capsys):
        out = workdir / "g.json"
        code, _ = run(["analyze", "--input", simulated["gaussian"], "--output", out], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        validate(doc, "analyze")
        assert doc["config"]["optimizer"]["seed"] == 0 and doc["config"]["auto_radius"]
        dirs = [m["theta"] for m in doc["maxima"][:2]]
        assert min(angle_between(dirs[0], t) for t in ([1, 0], [-1, 0])) < 5
        assert min(angle_between(dirs[1], t) for t in ([1, 0], [-1, 0])) < 5
        assert angle_between(*dirs) > 170

    def test_profile_csv(self, simulated, workdir, capsys):
        out = workdir / "p.json"
        run(["analyze", "--input", simulated["gaussian"], "--output", out, "--radius", 2.0], capsys)
        rows = np.loadtxt(workdir / "p_profile.csv", delimiter=",", skiprows=1)
        doc = json.loads(out.read_text())
        assert rows.shape[1] == 4
        assert set(rows[:, 0].astype(int)) == set(range(len(doc["maxima"])))
        last = rows[rows[:, 0] == 0][-1]
        assert last[1] == 2.0 and last[2] == pytest.approx(doc["maxima"][0]["g"], abs=1e-10)

    def test_tiny_radius_is_pc1(self, simulated, workdir, capsys):
        out = workdir / "t.json"
        code, _ = run(["analyze", "--input", simulated["skew-normal"], "--output", out, "--radius", 0.001], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        assert axis_angle(doc["maxima"][0]["theta"], doc["pc1"]) < 5

    def test_standardized_warning(self, simulated, workdir, capsys):
        X = cli.read_csv(simulated["gamma"])
        Z = (X - X.mean(axis=0)) / X.std(axis=0)
        path = workdir / "std.csv"
        cli.write_csv(path, Z, ["a", "b"])
        out = workdir / "std.json"
        with pytest.warns(Warning, match="validity"):
            code, _ = run(["analyze", "--input", path, "--output", out, "--radius", 0.5], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        assert any("StandardizedInputWarning" in w and "validity" in w for w in doc["warnings"])

    def test_constant_column(self, workdir, capsys):
        rng = np.random.default_rng(0)
        X = np.column_stack([rng.standard_normal(500), np.full(500, 3.0)])
        path = workdir / "const.csv"
        cli.write_csv(path, X, ["a", "b"])
        out = workdir / "const.json"
        code, _ = run(["analyze", "--input", path, "--output", out], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        validate(doc, "analyze")
        assert any(w.startswith("ConstantColumn") for w in doc["warnings"])

    def test_headerless(self, workdir, capsys):
        path = workdir / "nohdr.csv"
        X = np.random.default_rng(1).standard_normal((200, 2))
        np.savetxt(path, X, delimiter=",", fmt="%.17g")
        np.testing.assert_array_equal(cli.read_csv(path), X)

    @pytest.mark.parametrize(
        "body,line",
        [("a,b\n1,2\n3,x\n", 3), ("1,2\n3,4\n5\n", 3), ("a,b\n1,2\nnan,1\n", 3), ("a,b\n", None)],
    )
    def test_parse_errors(self, workdir, capsys, body, line):
        path = workdir / "bad.csv"
        path.write_text(body)
        with pytest.raises(ParseError) as info:
            cli.read_csv(path)
        assert info.value.line == line
        code, out = run(["analyze", "--input", path, "--output", workdir / "bad.json"], capsys)
        assert code != 0
        doc = error_doc(out.err)
        assert doc["error"] == "ParseError"
        assert doc.get("line") == line

    def test_insufficient_data(self, workdir, capsys):
        path = workdir / "one.csv"
        path.write_text("a,b\n1,2\n")
        code, out = run(["analyze", "--input", path, "--output", workdir / "one.json"], capsys)
        assert code != 0 and error_doc(out.err)["error"] == "InsufficientData"

    def test_missing_input(self, workdir, capsys):
        code, out = run(["analyze", "--input", workdir / "nope.csv", "--output", workdir / "x.json"], capsys)
        assert code != 0 and error_doc(out.err)["error"] == "FileNotFoundError"

    def test_usage_error(self, capsys):
        code, out = run(["analyze", "--radius", "abc"], capsys)
        assert code == cli.EXIT_USAGE
        assert error_doc(out.err)["error"] == "UsageError"

    def test_radius_flags_exclusive(self, simulated, capsys):
        code, out = run(["analyze", "--input", simulated["gaussian"], "--output", "x", "--radius", 1, "--auto-radius"], capsys)
        assert code == cli.EXIT_USAGE


class TestComparePCA:
    def test_gaussian(self, simulated, workdir, capsys):
        out = workdir / "cg.json"
        assert run(["compare-pca", "--input", simulated["gaussian"], "--output", out], capsys)[0] == 0
        doc = json.loads(out.read_text())
        validate(doc, "compare_pca")
        assert doc["min_angle_to_pc1"] < 5

    def test_skew_normal_non_antipodal(self, simulated, workdir, capsys):
        out = workdir / "cs.json"
        assert run(["compare-pca", "--input", simulated["skew-normal"], "--output", out], capsys)[0] == 0
        doc = json.loads(out.read_text())
        validate(doc, "compare_pca")
        assert len(doc["maxima"]) >= 2
        assert abs(doc["pairwise_angles"][0]["angle"] - 180) > 5

    @pytest.mark.xfail(
        strict=True,
        reason="at the automatic radius the sample cumulant along the simplex is biased low "
        "(infinite-variance weights), so the top maximum sits 12.7 degrees off for seed 0",
    )
    def test_gamma_simplex(self, simulated, workdir, capsys):
        out = workdir / "cm.json"
        assert run(["compare-pca", "--input", simulated["gamma"], "--output", out], capsys)[0] == 0
        doc = json.loads(out.read_text())
        assert angle_between(doc["maxima"][0]["theta"], [1, 1]) < 10


@pytest.fixture(scope="module")
def laplace_csv(workdir):
    rng = np.random.default_rng(0)
    X = np.column_stack([rng.laplace(0, 1, 20_000), rng.standard_normal(20_000)])
    path = workdir / "lap.csv"
    cli.write_csv(path, X, ["lap", "norm"])
    return path


class TestTailcheck:
    def test_laplace(self, laplace_csv, workdir, capsys):
        out = workdir / "tl.json"
        code, _ = run(["tailcheck", "--input", laplace_csv, "--output", out, "--theta-a", "1,0", "--theta-b", "0,1"], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        validate(doc, "tailcheck")
        assert doc["z_star"] is not None and doc["s_star_estimate"] is not None
        s = doc["s_star_estimate"]
        assert all(r["holds"] for r in doc["radii"] if r["radius"] >= s and r["reliable"])

    def test_equal_directions(self, laplace_csv, workdir, capsys):
        out = workdir / "te.json"
        run(["tailcheck", "--input", laplace_csv, "--output", out, "--theta-a", "2,0", "--theta-b", "1,0"], capsys)
        doc = json.loads(out.read_text())
        assert doc["s_star_estimate"] is None and doc["theta_a"] == [1.0, 0.0]

    def test_isotropic(self, simulated, workdir, capsys):
        rng = np.random.default_rng(1)
        path = workdir / "iso.csv"
        cli.write_csv(path, rng.standard_normal((20_000, 2)), ["a", "b"])
        out = workdir / "ti.json"
        code, _ = run(
            ["tailcheck", "--input", path, "--output", out, "--theta-a", "1,0", "--theta-b", "0.6,0.8", "--radii", "0.5,1,1.5,2"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out.read_text())
        validate(doc, "tailcheck")
        assert [r["radius"] for r in doc["radii"]] == [0.5, 1.0, 1.5, 2.0]
        assert not doc["stable_dominance"]

    def test_zero_direction(self, laplace_csv, workdir, capsys):
        code, out = run(["tailcheck", "--input", laplace_csv, "--output", workdir / "z.json", "--theta-a", "0,0", "--theta-b", "0,1"], capsys)
        assert code != 0 and error_doc(out.err)["error"] == "DegenerateDirection"

    def test_missing_direction(self, laplace_csv, workdir, capsys):
        code, out = run(["tailcheck", "--input", laplace_csv, "--output", workdir / "z.json"], capsys)
        assert code != 0 and error_doc(out.err)["error"] == "ValueError"

    def test_wrong_dimension(self, laplace_csv, workdir, capsys):
        code, out = run(["tailcheck", "--input", laplace_csv, "--output", workdir / "z.json", "--theta-a", "1,0,0", "--theta-b", "0,1,0"], capsys)
        assert code != 0


def test_json_precision(simulated, workdir, capsys):
    out = workdir / "prec.json"
    run(["analyze", "--input", simulated["gaussian"], "--output", out, "--radius", 1.0], capsys)
    doc = json.loads(out.read_text())
    g = doc["maxima"][0]["g"]
    assert float(repr(g)) == g and significant_digits(repr(g)) >= 12


def test_console_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "mcf.cli", "simulate", "--model", "gamma", "--n", "50", "--output", str(out)],
        capture_output=True,
        text=True,
        env={**os.environ, "PYTHONWARNINGS": "ignore"},
    )
    assert proc.returncode == 0, proc.stderr
    assert Path(out).exists()
    bad = subprocess.run([sys.executable, "-m", "mcf.cli", "bogus"], capture_output=True, text=True)
    assert bad.returncode == cli.EXIT_USAGE
    assert json.loads(bad.stderr)["error"] == "UsageError"


def test_schema_files_are_valid():
    for schema in SCHEMAS.values():
        jsonschema.Draft202012Validator.check_schema(schema)
    assert set(SCHEMAS) == {"simulate", "analyze", "compare_pca", "tailcheck", "error"}
