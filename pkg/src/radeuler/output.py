"""Eulerian reconstruction and on-disk outputs of a run.

Files written to the output directory:

``profiles.csv``
    ``t,x,P,u,s,q,r,rho,theta`` for every recorded time and node.
``diagnostics.csv``
    ``t,E0,D0,cum_D0,norm1_sq,norm2_sq,norm2_tan_sq,dissipation_sq,cum_dissipation,C0``
    followed by the ``l2_*`` columns.
``picard.csv``
    ``k,delta,gamma,wall_time`` (picard mode only; ``gamma`` empty when undefined).
``summary.txt``
    Config echo, mode, status, wall time and headline numbers.
``plot_profiles.py``
    A standalone script that redraws the figures from the CSV files.
``profiles.png``, ``energy.png``
    Rendered figures.

Numbers are written with 17 significant digits so that reruns of the same
config give byte-identical CSV files.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import to_ini
from .geometry import segment_masses

FMT = "%.17g"
PROFILE_COLUMNS = ("t", "x", "P", "u", "s", "q", "r", "rho", "theta")


class OutputError(OSError):
    pass


@dataclass
class EulerianProfile:
    """Radial samples of one state, paired node by node with the mass grid."""

    t: float
    r: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    P: np.ndarray
    s: np.ndarray
    q: np.ndarray
    mass: float
    total_mass: float

    @property
    def mass_error(self):
        return abs(self.mass - self.total_mass)


def reconstruct_eulerian(state, grid):
    """Eulerian profiles ``(r, rho, u, theta, P, s, q)`` with a mass check.

    The enclosed mass is integrated in radius with the density taken
    linear between nodes and the ``r^2`` weight integrated exactly.
    """
    mass = float(np.sum(segment_masses(state.r, state.rho)))
    return EulerianProfile(
        float(state.t), state.r.copy(), state.rho.copy(), state.u.copy(), state.theta.copy(),
        state.P.copy(), state.s.copy(), state.q.copy(), mass, grid.total_mass,
    )


def _fmt(value):
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return ""
    return FMT % value


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def profiles_csv(states, grid):
    x = grid.nodes
    lines = [",".join(PROFILE_COLUMNS)]
    for st in states:
        cols = [np.full_like(x, st.t), x, st.P, st.u, st.s, st.q, st.r, st.rho, st.theta]
        block = np.column_stack(cols)
        lines.extend(",".join(FMT % v for v in row) for row in block)
    return "\n".join(lines) + "\n"


def diagnostics_csv(report):
    cols = report.columns()
    names = list(cols)
    lines = [",".join(names)]
    for i in range(len(report.records)):
        lines.append(",".join(_fmt(float(cols[name][i])) for name in names))
    return "\n".join(lines) + "\n"


def picard_csv(result):
    gamma = dict(result.ratios)
    lines = ["k,delta,gamma,wall_time"]
    for k, delta in enumerate(result.deltas, start=1):
        lines.append(f"{k},{_fmt(delta)},{_fmt(gamma.get(k))},{_fmt(result.wall_times[k - 1])}")
    return "\n".join(lines) + "\n"


PLOT_SCRIPT = '''\
"""Redraw the run figures from profiles.csv and diagnostics.csv."""
import csv
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent


def read(name):
    with open(here / name) as fh:
        rows = list(csv.DictReader(fh))
    return {key: [float(r[key]) if r[key] else float("nan") for r in rows] for key in rows[0]}


prof = read("profiles.csv")
times = sorted(set(prof["t"]))
picks = [times[0], times[len(times) // 2], times[-1]]
fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
for ax, name in zip(axes.flat, ("P", "u", "s", "q")):
    for t in picks:
        idx = [i for i, v in enumerate(prof["t"]) if v == t]
        ax.plot([prof["r"][i] for i in idx], [prof[name][i] for i in idx], label=f"t={t:g}")
    ax.set_ylabel(name)
for ax in axes[1]:
    ax.set_xlabel("r")
axes[0, 0].legend()
fig.tight_layout()
fig.savefig(here / "profiles.png", dpi=120)

diag = here / "diagnostics.csv"
if diag.exists():
    d = read("diagnostics.csv")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(d["t"], d["E0"], label="E0")
    ax.plot(d["t"], d["D0"], label="D0")
    ax.set_xlabel("t")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(here / "energy.png", dpi=120)
'''


def summary_text(traj):
    cfg = traj.config
    lines = [
        "# run summary",
        f"mode = {cfg.mode}",
        f"status = {traj.status}",
        f"failure = {traj.failure or ''}",
        f"wall_time_s = {traj.wall_time:.3f}",
        f"n_records = {len(traj.states)}",
        f"final_time = {_fmt(traj.states[-1].t) if traj.states else ''}",
        f"total_mass = {_fmt(traj.model.grid.total_mass)}",
        f"initial_h2_norm = {_fmt(traj.data.h2_norm)}",
    ]
    if traj.states:
        prof = reconstruct_eulerian(traj.states[-1], traj.model.grid)
        lines.append(f"final_mass_error = {_fmt(prof.mass_error)}")
    if traj.report is not None and traj.report.records:
        c0 = traj.report.measured_c0()
        lines.append(f"measured_C0 = {_fmt(c0[-1])}")
        lines.append(f"cumulative_D0 = {_fmt(traj.report.cumulative_D0[-1])}")
    if traj.picard is not None:
        lines.append(f"picard_status = {traj.picard.status}")
        lines.append(f"picard_iterations = {len(traj.picard.deltas)}")
    lines.append("")
    lines.append("# configuration")
    return "\n".join(lines) + "\n" + to_ini(cfg)


def write_outputs(traj, out_dir, figures=True):
    """Write every output file for a trajectory and return their paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out}: {exc}") from exc
    grid = traj.model.grid
    written = {}
    written["profiles"] = out / "profiles.csv"
    _write(written["profiles"], profiles_csv(traj.states, grid))
    if traj.report is not None:
        written["diagnostics"] = out / "diagnostics.csv"
        _write(written["diagnostics"], diagnostics_csv(traj.report))
    if traj.picard is not None:
        written["picard"] = out / "picard.csv"
        _write(written["picard"], picard_csv(traj.picard))
    written["summary"] = out / "summary.txt"
    _write(written["summary"], summary_text(traj))
    written["plot_script"] = out / "plot_profiles.py"
    _write(written["plot_script"], PLOT_SCRIPT)
    if figures:
        from .plotting import energy_figure, profile_figure

        written["profiles_png"] = profile_figure(traj.states, out / "profiles.png")
        if traj.report is not None:
            written["energy_png"] = energy_figure(traj.report, out / "energy.png")
    return written
