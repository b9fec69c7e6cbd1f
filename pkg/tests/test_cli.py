import csv
import json

import pytest

from laxchain import cli
from laxchain import verify as verify_mod


def run_cli(args):
    return cli.main(args)


def test_verify_subcommand_passes(tmp_path):
    out = tmp_path / "report.json"
    code = run_cli(
        ["verify", "--suite", "factorization", "--samples", "2", "--seed", "3",
         "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["suite"] == "factorization"
    assert payload["passes"] == 2


def test_verify_all_suites(tmp_path):
    out = tmp_path / "report.json"
    code = run_cli(["verify", "--suite", "all", "--samples", "1", "--seed", "5",
                    "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["passed"] is True
    assert {r["suite"] for r in payload["suites"]} == set(verify_mod.SUITES)


def test_verify_exit_status_reflects_failures(tmp_path, monkeypatch):
    # inject a failing suite evaluation
    def always_fail(config):
        return False, 1.0, {}

    monkeypatch.setitem(verify_mod._SUITE_EVALS, "chain", always_fail)
    out = tmp_path / "report.json"
    code = run_cli(["verify", "--suite", "chain", "--samples", "2", "--seed", "3",
                    "--out", str(out)])
    assert code == 1
    payload = json.loads(out.read_text())
    assert payload["passes"] == 0
    assert len(payload["failures"]) == 2


def test_verify_replay(tmp_path):
    cfg = verify_mod.draw_sample(seed=9, index=1)
    dump_path = tmp_path / "dump.json"
    dump_path.write_text(json.dumps(cfg.to_dump("lax-x", 1)))
    out = tmp_path / "replay.json"
    code = run_cli(["verify", "--replay", str(dump_path), "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["samples"] == 1 and payload["passes"] == 1


def test_verify_byte_identical_reports(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--suite", "chain", "--samples", "2", "--seed", "8"]
    assert run_cli(args + ["--out", str(out1)]) == 0
    assert run_cli(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_malformed_curve_is_config_error(tmp_path, capsys):
    code = run_cli(
        ["simulate", "--flow", "dkn", "--curve", "1,2", "--gamma", "1,2,3,4",
         "--h", "1e-3", "--steps", "5", "--csv", str(tmp_path / "t.csv"),
         "--out", str(tmp_path / "s.json")]
    )
    assert code == 2
    err = capsys.readouterr().err
    assert "curve" in err


def test_simulate_dkn_csv_and_summary(tmp_path):
    csv_path = tmp_path / "traj.csv"
    out = tmp_path / "summary.json"
    code = run_cli(
        ["simulate", "--flow", "dkn", "--curve", "0,-1,0",
         "--gamma=-0.82,-0.31,0.28,0.77", "--h", "1e-3", "--steps", "50",
         "--csv", str(csv_path), "--out", str(out)]
    )
    assert code == 0
    with open(csv_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["step", "x", "site", "gamma"]
    assert len(rows) == 1 + 51 * 4
    summary = json.loads(out.read_text())
    assert summary["flow"] == "dkn"
    assert summary["invariants"]["coupling_product"]["max_drift"] < 1e-8
    assert summary["invariants"]["spectral_value"]["max_drift"] < 1e-8


def test_simulate_vw_flow(tmp_path):
    csv_path = tmp_path / "traj.csv"
    out = tmp_path / "summary.json"
    code = run_cli(
        ["simulate", "--flow", "vw", "--v", "1,2,1.5,0.5", "--w", "0.5,-0.5,1,0",
         "--h", "1e-3", "--steps", "20", "--csv", str(csv_path), "--out", str(out)]
    )
    assert code == 0
    with open(csv_path) as fh:
        header = next(csv.reader(fh))
    assert header == ["step", "x", "site", "V", "W"]


def test_simulate_requires_stencil(tmp_path):
    code = run_cli(
        ["simulate", "--flow", "dkn", "--curve", "0,0,0", "--gamma", "1,2",
         "--h", "1e-3", "--steps", "5", "--csv", str(tmp_path / "t.csv"),
         "--out", str(tmp_path / "s.json")]
    )
    assert code == 2


def test_commutant_sharp(tmp_path):
    out = tmp_path / "commutant.json"
    code = run_cli(
        ["commutant", "--variant", "sharp", "--band", "3", "--degree", "9",
         "--r", "0,0,0,1", "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["dimension"] == 3
    assert payload["verified_exact"] is True


def test_commutant_flat(tmp_path):
    out = tmp_path / "commutant.json"
    code = run_cli(
        ["commutant", "--variant", "flat", "--band", "3", "--r", "0,1",
         "--window", "0,40", "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["nullity"] >= 3
    assert payload["gap"] >= 1e6


def test_commutant_custom(tmp_path):
    out = tmp_path / "commutant.json"
    code = run_cli(
        ["commutant", "--variant", "custom", "--band", "1", "--degree", "0",
         "--bands", '{"1": ["1"], "-1": ["1"]}', "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["dimension"] == 3


def test_elliptic_csv(tmp_path):
    csv_path = tmp_path / "wp.csv"
    code = run_cli(
        ["elliptic", "--curve", "0,-1,0", "--y-max", "2.0", "--h", "1e-3",
         "--csv", str(csv_path)]
    )
    assert code == 0
    with open(csv_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["y", "wp", "wp_prime", "energy_drift"]
    assert len(rows) == 1 + 2001
    assert all(abs(float(r[3])) < 1e-8 for r in rows[1:])


def test_darboux_subcommand(tmp_path):
    out = tmp_path / "darboux.json"
    code = run_cli(
        ["darboux", "--curve", "1/3,-2,5/7", "--gamma", "1,2,3,5",
         "--z0", "9/2", "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["factorization_zero"] is True
    assert payload["crosscheck_zero"] is True
    assert payload["lax_x_zero"] is True
    assert payload["lax_y_zero"] is True
    win = payload["transformed_operator"]
    assert win["band"] == [-2, 2]
    assert payload["solved_constants"]["s0"] == "1123/336"


def test_verify_with_user_constants_reports_residuals(tmp_path):
    out = tmp_path / "report.json"
    code = run_cli(
        ["verify", "--suite", "chain", "--samples", "1", "--seed", "3",
         "--constants", "1,0,0,0,0,0", "--out", str(out)]
    )
    assert code == 0  # structural identities still hold; outcome is recorded
    payload = json.loads(out.read_text())
    sample = payload["details"]["samples"]["0"]
    assert "user_constants_residuals" in sample
    rows = sample["user_constants_residuals"]
    # a lone s0 leaves R1 and R2 intact but breaks R3 at every site
    assert all(row[0] == 0.0 and row[1] == 0.0 for row in rows)
    assert all(row[2] > 0.0 for row in rows)


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[verify]\nsuite = factorization\nsamples = 5\nseed = 3\n"
    )
    out = tmp_path / "r.json"
    code = run_cli(
        ["verify", "--config", str(cfg), "--samples", "1", "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    # file picked the suite; the flag overrode the sample count
    assert payload["suite"] == "factorization"
    assert payload["samples"] == 1


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "broken.ini"
    cfg.write_text("not an ini file [[[")
    code = run_cli(["verify", "--config", str(cfg)])
    assert code == 2
    assert "config" in capsys.readouterr().err
