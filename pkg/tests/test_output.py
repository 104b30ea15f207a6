import csv

import numpy as np
import pytest

from radeuler.config import parse_config
from radeuler.driver import run
from radeuler.initial_data import InitialDataSpec
from radeuler.output import (PROFILE_COLUMNS, OutputError, picard_csv, reconstruct_eulerian,
                             write_outputs)
from radeuler.picard import PicardResult

from conftest import state_for


def test_equilibrium_reconstruction(equilibrium_state):
    data, model, state = equilibrium_state
    prof = reconstruct_eulerian(state, model.grid)
    assert np.allclose(prof.rho, np.exp(-0.4), rtol=1e-14)
    assert np.allclose(prof.theta, np.exp(0.4), rtol=1e-14)
    assert prof.mass_error <= 1e-12 * model.grid.total_mass


def test_perturbed_reconstruction_mass():
    _, model, state = state_for(InitialDataSpec(epsilon=1e-2), 256)
    prof = reconstruct_eulerian(state, model.grid)
    assert prof.mass_error <= 1e-6 * model.grid.total_mass
    assert np.all(np.diff(prof.r) > 0)


def _cfg(**kw):
    base = {"grid.n": "32", "time.t_final": "0.2", "time.output_every": "0.1"}
    base.update(kw)
    return parse_config(overrides=base)


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_run_outputs(tmp_path):
    traj = run(_cfg())
    files = write_outputs(traj, tmp_path, figures=True)
    for name in ("profiles", "diagnostics", "summary", "plot_script", "profiles_png", "energy_png"):
        assert files[name].exists()
    rows = _rows(files["profiles"])
    assert tuple(rows[0]) == PROFILE_COLUMNS
    assert len(rows) == 3 * 33
    assert sorted({float(r["t"]) for r in rows}) == pytest.approx([0.0, 0.1, 0.2])
    diag = _rows(files["diagnostics"])
    assert len(diag) == 3 and "C0" in diag[0]
    assert "status = completed" in files["summary"].read_text()
    assert "[grid]" in files["summary"].read_text()


def test_zero_final_time_single_slice(tmp_path):
    traj = run(_cfg(**{"time.t_final": "0"}))
    files = write_outputs(traj, tmp_path, figures=False)
    assert {float(r["t"]) for r in _rows(files["profiles"])} == {0.0}
    assert "profiles_png" not in files


def test_reruns_are_byte_identical(tmp_path):
    for sub in ("a", "b"):
        write_outputs(run(_cfg()), tmp_path / sub, figures=False)
    for name in ("profiles.csv", "diagnostics.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_picard_mode_writes_iteration_table(tmp_path):
    traj = run(_cfg(**{"model.mode": "picard", "picard.T": "0.02", "picard.k_max": "3",
                       "picard.tol": "0"}))
    files = write_outputs(traj, tmp_path, figures=False)
    rows = _rows(files["picard"])
    assert [int(r["k"]) for r in rows] == [1, 2, 3]
    assert all(float(r["delta"]) > 0 for r in rows)
    assert rows[-1]["gamma"] == ""
    assert float(rows[0]["gamma"]) < 1


def test_picard_csv_blank_gamma():
    res = PicardResult([], [1e-20], [], [0.1])
    assert picard_csv(res).splitlines()[1] == "1,9.9999999999999995e-21,,0.10000000000000001"


def test_linearized_and_radiation_off_modes(tmp_path):
    for mode in ("linearized", "radiation-off"):
        traj = run(_cfg(**{"model.mode": mode}))
        assert traj.status == "completed" and len(traj.states) == 3
    assert np.all(traj.states[-1].q == 0)


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError):
        write_outputs(run(_cfg(**{"time.t_final": "0"})), blocker / "sub", figures=False)


def test_failed_run_keeps_partial_trajectory(tmp_path):
    traj = run(_cfg(**{"initial.epsilon": "3", "time.t_final": "5", "time.output_every": "0.5"}))
    assert traj.status == "failed" and traj.failure
    assert len(traj.states) >= 1
    files = write_outputs(traj, tmp_path, figures=False)
    assert "status = failed" in files["summary"].read_text()
