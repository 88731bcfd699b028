import subprocess
import sys

import pytest

from bornsim.cli import main
from bornsim.presets import SCENARIO_PRESETS


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_proc(*argv):
    return subprocess.run(
        [sys.executable, "-m", "bornsim", *argv],
        capture_output=True,
        text=True,
        timeout=120,
    )


def test_run_epr_records(capsys):
    code, out, err = run_cli(capsys, "run", "epr_bohm", "--format", "records")
    assert code == 0 and err == ""
    lines = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert lines["scenario"] == "epr_bohm"
    assert lines["kind"] == "epr"
    assert lines["seed"] == "1234"
    assert lines["p_ij.0.0"] == "0.5"
    assert lines["p_ij.1.1"] == "0.5"
    assert lines["p_ij.0.1"] == "0"
    assert lines["final_state.1"] == "0.707106781187+0i"
    assert lines["final_state.2"] == "-0.707106781187+0i"
    assert lines["max_projection_deviation"] == "0"


def test_run_epr_table(capsys):
    code, out, err = run_cli(capsys, "run", "epr_bohm")
    assert code == 0
    assert out.splitlines()[0] == "scenario epr_bohm  kind=epr  seed=1234"


@pytest.mark.parametrize("name", sorted(SCENARIO_PRESETS))
@pytest.mark.parametrize("fmt", ["table", "records"])
def test_every_preset_runs(capsys, name, fmt):
    code, out, err = run_cli(capsys, "run", name, "--format", fmt)
    assert code == 0 and err == ""
    assert out.strip()


def test_records_are_reproducible():
    # The Monte Carlo preset is seeded, so two runs are byte-identical.
    a = run_proc("run", "telepathy_nonborn", "--format", "records")
    b = run_proc("run", "telepathy_nonborn", "--format", "records")
    assert a.returncode == 0 and b.returncode == 0
    assert a.stdout == b.stdout
    assert "mc_shots=100000" in a.stdout


def test_telepathy_nonborn_gap(capsys):
    code, out, _ = run_cli(capsys, "run", "telepathy_nonborn", "--format", "records")
    assert code == 0
    lines = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert lines["rule"] == "nonborn_exponent"
    assert lines["q"] == "2"
    assert float(lines["signaling_gap"]) == pytest.approx(0.11964391691394659, abs=1e-12)
    assert abs(float(lines["mc_gap"]) - 0.11964391691394659) < 0.01


def test_scenario_file_with_matrix_observable(tmp_path, capsys):
    path = tmp_path / "demo.scn"
    path.write_text(
        "kind = two_pointer\n"
        "seed = 77\n"
        "state = 3 4  # normalized to (0.6, 0.8)\n"
        "obs_a = matrix 1 0; 0 -1\n"
        "obs_b = sigma_x\n"
    )
    code, out, err = run_cli(capsys, "run", str(path), "--format", "records")
    assert code == 0 and err == ""
    lines = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert lines["scenario"] == "demo"
    assert lines["seed"] == "77"
    assert lines["p_i.0"] == "0.64"
    assert lines["p_i.1"] == "0.36"
    assert lines["oracle_joint_max_dev"] == "0"


def test_scenario_file_with_branch_observable(tmp_path, capsys):
    path = tmp_path / "branches.scn"
    path.write_text(
        "kind = one_pointer\n"
        "state = 1 0\n"
        "obs_a = branches\n"
        "obs_a.eigenvalues = -1 1\n"
        "obs_a.projector.0 = 0 0; 0 1\n"
        "obs_a.projector.1 = 1 0; 0 0\n"
        "obs_b = sigma_x\n"
    )
    code, out, err = run_cli(capsys, "run", str(path), "--format", "records")
    assert code == 0 and err == ""
    lines = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert lines["p_i.1"] == "1"
    assert lines["p_i.0"] == "0"


def test_corrupt_projector_family_is_invariant_violation(tmp_path, capsys):
    path = tmp_path / "broken.scn"
    path.write_text(
        "kind = one_pointer\n"
        "state = 1 0\n"
        "obs_a = branches\n"
        "obs_a.eigenvalues = -1 1\n"
        "obs_a.projector.0 = 0.5 0; 0 0.5\n"
        "obs_a.projector.1 = 0.5 0; 0 0.5\n"
        "obs_b = sigma_x\n"
    )
    code, _, err = run_cli(capsys, "run", str(path))
    assert code == 3
    assert "invariant violation [InvalidProjectorFamilyError]" in err


def test_non_hermitian_matrix_is_invariant_violation(tmp_path, capsys):
    path = tmp_path / "nonherm.scn"
    path.write_text(
        "kind = one_pointer\nstate = plus\nobs_a = matrix 0 1; 0 0\nobs_b = sigma_x\n"
    )
    code, _, err = run_cli(capsys, "run", str(path))
    assert code == 3
    assert "invariant violation [NotHermitianError]" in err


@pytest.mark.parametrize(
    "body",
    [
        "kind = one_pointer\nstate = plus\nobs_a = sigma_z\nobs_b = sigma_x\nbogus = 1\n",
        "kind = telepathy\nstate = 0.5+zi 0.5\nstate_dims = 2 1\n",
        "kind = warp_drive\n",
        "kind = epr\nkind = epr\n",
        "kind = one_pointer\nstate = plus\nobs_a = sigma_z\n",  # missing obs_b
        "no equals sign here\n",
        "kind = telepathy\nstate = bell_pair\nrule = born\nq = 2\n",
        "kind = two_pointer\nstate = 0 0\nobs_a = sigma_z\nobs_b = sigma_x\n",
    ],
)
def test_malformed_scenarios_exit_2(tmp_path, capsys, body):
    path = tmp_path / "bad.scn"
    path.write_text(body)
    code, _, err = run_cli(capsys, "run", str(path))
    assert code == 2
    assert "parse error" in err


def test_missing_file_exit_2(capsys):
    code, _, err = run_cli(capsys, "run", "no/such/file.scn")
    assert code == 2
    assert "no such file or preset" in err


def test_presets_listing(capsys):
    code, out, err = run_cli(capsys, "presets")
    assert code == 0 and err == ""
    for section in ("states:", "observables:", "scenarios:"):
        assert section in out
    for name in ("bell_pair", "sigma_z", "epr_bohm", "stern_gerlach", "telepathy_nonborn"):
        assert name in out


def test_verify_small_run(capsys):
    code, out, _ = run_cli(capsys, "verify", "--trials", "6", "--dims-limit", "4")
    assert code == 0
    assert "epr_reproduction" in out
    assert "FAIL" not in out
    assert "all 9 properties passed" in out


def test_verify_rejects_bad_args(capsys):
    code, _, err = run_cli(capsys, "verify", "--trials", "0")
    assert code == 2 and "parse error" in err
    code, _, err = run_cli(capsys, "verify", "--dims-limit", "1")
    assert code == 2 and "parse error" in err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = run_proc("run", "epr_bohm")
    assert proc.returncode == 0
    assert "scenario epr_bohm" in proc.stdout
