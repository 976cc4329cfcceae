import json

import numpy as np
import pytest

from main import EXIT_DATA, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def _first_json(capsys):
    out = capsys.readouterr().out
    return json.loads(out.splitlines()[0])


@pytest.fixture
def points_file(tmp_path, capsys):
    path = tmp_path / "points.csv"
    assert main(["gen", "--distribution", "gaussian", "--n", "400", "--d", "3", "--seed", "7", "--out", str(path)]) == EXIT_OK
    capsys.readouterr()
    return path


def test_gen_is_deterministic(tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"

    assert main(["gen", "--n", "50", "--d", "2", "--seed", "3", "--out", str(first)]) == EXIT_OK
    line = _first_json(capsys)
    assert main(["gen", "--n", "50", "--d", "2", "--seed", "3", "--out", str(second)]) == EXIT_OK

    assert first.read_bytes() == second.read_bytes()
    assert line["n"] == 50 and line["d"] == 2


def test_gen_seed_defaults_to_the_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MEANCORE_SEED", "3")

    assert main(["gen", "--n", "20", "--out", str(tmp_path / "env.csv")]) == EXIT_OK
    assert main(["gen", "--n", "20", "--seed", "3", "--out", str(tmp_path / "flag.csv")]) == EXIT_OK

    assert (tmp_path / "env.csv").read_bytes() == (tmp_path / "flag.csv").read_bytes()


def test_build_then_verify_caratheodory(points_file, tmp_path, capsys):
    coreset = tmp_path / "u.csv"

    assert main(["build", str(points_file), "--algo", "cara", "--out", str(coreset)]) == EXIT_OK
    line = _first_json(capsys)
    assert line["algo"] == "cara"
    assert line["nnz"] <= 3 + 2

    assert main(["verify", str(points_file), str(coreset), "--checks", "worst,moments", "--eps", "1e-6", "--strict"]) == EXIT_OK
    report = _first_json(capsys)
    assert report["worst_case"] <= 1e-6


def test_stats_summary_is_verified_from_json(points_file, tmp_path, capsys):
    summary = tmp_path / "s.json"

    assert main(["build", str(points_file), "--algo", "stats", "--out", str(summary)]) == EXIT_OK
    capsys.readouterr()

    assert set(json.loads(summary.read_text())) == {"s0", "s1", "s2"}
    assert main(["verify", str(points_file), str(summary)]) == EXIT_OK
    assert _first_json(capsys)["worst_case"] <= 1e-9


def test_identity_coreset_verifies_with_zero_error(tmp_path, capsys):
    points = tmp_path / "p.csv"
    points.write_text("1,2\n3,4\n-1,0\n", encoding="utf-8")
    coreset = tmp_path / "u.csv"
    coreset.write_text("1,1\n2,1\n3,1\n", encoding="utf-8")

    assert main(["verify", str(points), str(coreset), "--queries", "50"]) == EXIT_OK
    report = _first_json(capsys)

    assert report["worst_case"] <= 1e-12
    assert report["empirical"] <= 1e-12


def test_strict_violation_exits_three(tmp_path, capsys):
    points = tmp_path / "p.csv"
    points.write_text("1\n-1\n", encoding="utf-8")
    coreset = tmp_path / "u.csv"
    coreset.write_text("1,2\n", encoding="utf-8")

    code = main(["verify", str(points), str(coreset), "--checks", "worst", "--eps", "0.5", "--strict"])

    assert code == EXIT_VIOLATION
    assert _first_json(capsys)["worst_case"] == pytest.approx(1.0)


def test_out_of_range_coreset_index_exits_two(tmp_path):
    points = tmp_path / "p.csv"
    points.write_text("1\n2\n3\n", encoding="utf-8")
    coreset = tmp_path / "u.csv"
    coreset.write_text("4,1.0\n", encoding="utf-8")

    assert main(["verify", str(points), str(coreset)]) == EXIT_DATA


@pytest.mark.parametrize("algo,bad_rows", [("cara", [17]), ("mom", slice(None))])
def test_non_finite_npy_input_exits_two(tmp_path, algo, bad_rows):
    points = np.random.default_rng(1).standard_normal((5000, 2))
    points[bad_rows, 0] = np.nan
    path = tmp_path / "p.npy"
    np.save(path, points)

    assert main(["build", str(path), "--algo", algo, "--out", str(tmp_path / "u.csv")]) == EXIT_DATA


def test_fractional_coreset_index_exits_two(tmp_path):
    points = tmp_path / "p.csv"
    points.write_text("1\n2\n3\n", encoding="utf-8")
    coreset = tmp_path / "u.csv"
    coreset.write_text("1.5,1.0\n", encoding="utf-8")

    assert main(["verify", str(points), str(coreset)]) == EXIT_DATA


def test_missing_input_exits_two(tmp_path):
    assert main(["build", str(tmp_path / "missing.csv"), "--algo", "cara"]) == EXIT_DATA


@pytest.mark.parametrize("argv", [
    ["build", "x.csv"],
    ["build", "x.csv", "--algo", "kmeans"],
    ["verify", "x.csv"],
    ["stream", "x.csv"],
    ["bench", "--trials", "0"],
    [],
])
def test_usage_errors_exit_one(argv):
    assert main(argv) == EXIT_USAGE


def test_invalid_eps_exits_one(points_file):
    assert main(["build", str(points_file), "--algo", "fw", "--eps", "1.5"]) == EXIT_USAGE


def test_sensitivity_on_weighted_input_exits_one(tmp_path):
    points = tmp_path / "w.csv"
    points.write_text("1,0.5\n2,1.5\n3,1.0\n", encoding="utf-8")

    assert main(["build", str(points), "--weighted", "--algo", "sens"]) == EXIT_USAGE


def test_stream_reports_depth(points_file, tmp_path, capsys):
    out = tmp_path / "stream.csv"

    assert main(["stream", str(points_file), "--chunk", "100", "--algo", "cara", "--out", str(out)]) == EXIT_OK
    line = _first_json(capsys)

    assert line["leaves"] == 4
    assert line["depth"] == 2
    assert line["worst_case"] <= 1e-6
    assert out.exists()


def test_stream_accepts_the_signed_builder(points_file, tmp_path, capsys):
    out = tmp_path / "signed.csv"

    assert main(["stream", str(points_file), "--chunk", "50", "--algo", "signed", "--out", str(out)]) == EXIT_OK
    line = _first_json(capsys)

    assert line["nnz"] <= 3 + 2
    assert line["depth"] == 3
    assert line["worst_case"] <= 1e-6


def test_stream_rejects_the_sensitivity_builder(points_file):
    assert main(["stream", str(points_file), "--chunk", "50", "--algo", "sens"]) == EXIT_USAGE


def test_bench_on_an_input_file(points_file, tmp_path, capsys):
    out = tmp_path / "report"

    code = main(["bench", str(points_file), "--algo", "cara,fw", "--eps", "0.5", "--trials", "2", "--queries", "0", "--out", str(out), "--strict"])

    assert code == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert [cell["algo"] for cell in report["cells"]] == ["cara", "fw"]
    assert (tmp_path / "report.csv").exists()


def test_bench_profile_from_directory(tmp_path, capsys):
    profiles = tmp_path / "profiles"
    profiles.mkdir()
    (profiles / "tiny.yaml").write_text(
        "name: tiny\n"
        "dataset: {distribution: uniform-cube, n: 300, d: 2, seed: 1}\n"
        "algos: [signed]\n"
        "trials: 2\n"
        "queries: 0\n",
        encoding="utf-8",
    )

    code = main(["bench", "--profile", "tiny", "--profiles-dir", str(profiles), "--out", str(tmp_path / "tiny")])

    assert code == EXIT_OK
    assert json.loads((tmp_path / "tiny.json").read_text())["cells"][0]["success_count"] == 2
    assert list((tmp_path / "log" / "runs").glob("*-bench-seed0.log"))


def test_bench_needs_algorithms_with_an_input(points_file):
    assert main(["bench", str(points_file)]) == EXIT_USAGE
