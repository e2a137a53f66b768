import csv
import io
import json
import subprocess
import sys

import pytest

from isoclass.cli import main, render_json


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_census_json_example(capsys):
    code, out, _ = run(["census", "--q", "5", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["counts"]["2"] == "3/4"
    assert data["total_mass"] == "5"
    assert list(data["counts"]) == [str(a) for a in (-4, -3, -2, -1, 1, 2, 3, 4)]


def test_census_table_q2_has_two_ordinary_rows(capsys):
    code, out, _ = run(["census", "--q", "2"], capsys)
    assert code == 0
    body = out.strip().splitlines()[3:]
    assert [line.split()[0] for line in body] == ["-1", "1"]


def test_census_all_flag_adds_supersingular_rows(capsys):
    _, out, _ = run(["census", "--q", "2", "--all", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["a", "weighted_count", "ordinary"]
    assert [r[0] for r in rows[1:]] == ["-2", "-1", "0", "1", "2"]


@pytest.mark.parametrize(
    "argv",
    [
        ["census", "--q", "6"],
        ["census", "--q", "53"],
        ["census", "--q", "32"],
        ["density", "--a", "0", "--q", "5", "--ell", "2"],
        ["density", "--a", "1", "--q", "2", "--ell", "9"],
        ["classnum", "--D", "5"],
        ["classnum"],
        ["verify", "--q-max", "50"],
        ["gekeler", "--q", "13", "--a", "1", "--prime-bound", "5"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert out == ""
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["census"])
    assert info.value.code == 2


def test_density_ladder(capsys):
    code, out, _ = run(["density", "--a", "1", "--q", "2", "--ell", "7", "--n-max", "3", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert [row["nu_n"] for row in data["ladder"]] == ["49/48", "1", "1"]
    assert data["stabilized_at"] == 2
    assert data["ring"] == "GL"
    # 7 divides the discriminant -7, so no Euler factor is reported
    assert "euler_factor" not in data


def test_density_at_characteristic(capsys):
    code, out, _ = run(["density", "--a", "2", "--q", "5", "--ell", "2", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["nu"] == "3/2"
    code, out, _ = run(["density", "--a", "2", "--q", "5", "--ell", "5", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["ring"] == "M2" and data["nu"] == "5/4"


def test_density_without_stabilisation_exits_1(capsys):
    code, out, _ = run(["density", "--a", "2", "--q", "5", "--ell", "2", "--n-max", "2", "--format", "json"], capsys)
    assert code == 1
    assert json.loads(out)["nu"] is None


def test_classnum(capsys):
    code, out, _ = run(["classnum", "--D", "-16", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["weighted_sum"] == "3/4" and data["hurwitz"] == "3/2"
    assert data["orders"] == [{"d": 1, "D": -4, "h": 1, "w": 4}, {"d": 2, "D": -16, "h": 1, "w": 2}]
    code, out, _ = run(["classnum", "--a", "1", "--q", "2", "--prime-bound", "1000", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["discriminant"] == -7 and data["L1_rational_part"] == "1/2"
    assert isinstance(data["L1_truncated"], float)


def test_gekeler(capsys):
    code, out, _ = run(["gekeler", "--q", "5", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0
    for row in data["classes"]:
        assert row["gekeler_exact"] == row["census"] == row["weighted_kronecker"]
        assert isinstance(row["gekeler_float"], float)


@pytest.mark.parametrize(
    "argv",
    [
        ["census", "--q", "9", "--all"],
        ["density", "--a", "1", "--q", "2", "--ell", "2", "--n-max", "4"],
        ["gekeler", "--q", "7", "--prime-bound", "500"],
        ["classnum", "--D", "-63", "--prime-bound", "500"],
        ["verify", "--q-max", "5", "--prime-bound", "200"],
    ],
)
def test_json_round_trip_is_byte_identical(argv, capsys):
    _, out, _ = run(argv + ["--format", "json"], capsys)
    assert render_json(json.loads(out)) == out


def test_verify_small(capsys):
    code, out, _ = run(["verify", "--q-max", "7", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["ok"] is True
    assert data["classes_checked"] == sum(1 for c in data["classes"])
    assert all(c["census"] == c["langlands_kottwitz"] == c["gekeler_exact"] for c in data["classes"])


def test_verify_perturbed_prime_is_named(capsys):
    code, out, _ = run(["verify", "--q-max", "7", "--perturb-ell", "3", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 1 and data["ok"] is False
    assert data["failing_primes"] == [3]
    code, out, _ = run(["verify", "--q-max", "5", "--perturb-ell", "3"], capsys)
    assert code == 1 and "FAILURES" in out and "primes [3]" in out


def test_jobs_env_default_and_flag_override(monkeypatch, capsys):
    from isoclass import cli

    monkeypatch.setenv("ISOCLASS_JOBS", "3")
    assert cli.build_parser().parse_args(["census", "--q", "5"]).jobs == 3
    assert cli.build_parser().parse_args(["census", "--q", "5", "--jobs", "1"]).jobs == 1
    monkeypatch.setenv("ISOCLASS_JOBS", "junk")
    assert cli.build_parser().parse_args(["census", "--q", "5"]).jobs == 1


def test_parallel_verify_matches_serial(capsys):
    _, serial, _ = run(["verify", "--q-max", "9", "--prime-bound", "300", "--format", "json"], capsys)
    _, parallel, _ = run(["verify", "--q-max", "9", "--prime-bound", "300", "--format", "json", "--jobs", "2"], capsys)
    assert serial == parallel


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "isoclass", "census", "--q", "3", "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["total_mass"] == "3"


def test_verify_with_numpy_kernels(numpy_kernels, capsys):
    code, out, _ = run(["verify", "--q-max", "9", "--prime-bound", "300", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["ok"]
