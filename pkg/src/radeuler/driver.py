"""Run a configured simulation and collect its trajectory and diagnostics."""

from dataclasses import dataclass, field
import time

import numpy as np

from .config import initial_spec
from .diagnostics import build_report
from .eos import GasParams
from .evolution import Model, SimState, integrate, make_state, stable_dt, thermo
from .geometry import AnnulusGeometry
from .initial_data import build
from .picard import FrozenFieldError, FrozenFields, picard_iterate, solve_linearized, time_slices, trapezoid_in_time


@dataclass
class Trajectory:
    config: object
    model: Model
    data: object
    states: list = field(default_factory=list)
    status: str = "completed"
    failure: str = None
    wall_time: float = 0.0
    report: object = None
    picard: object = None

    @property
    def failed(self):
        return self.failure is not None


def setup(config, base_dir=None):
    """Initial data and model for a config."""
    params = GasParams(cv=config.cv, A=config.A)
    geom = AnnulusGeometry(config.a, config.b)
    data = build(initial_spec(config, base_dir), config.n, geom, params)
    model = Model(
        params, data.grid, closure=config.closure,
        radiation=0.0 if config.mode == "radiation-off" else 1.0,
        nu=config.nu, integrator=config.integrator,
    )
    return data, model


def _slice_states(iterate, r0, model, every):
    """Records of a space-time iterate at the output cadence (nearest slices)."""
    t = iterate.t
    r = r0[None, :] + trapezoid_in_time(iterate.u, t)
    n_out = max(1, int(round(t[-1] / every)))
    picks = sorted({int(np.argmin(np.abs(t - t[-1] * k / n_out))) for k in range(n_out + 1)})
    out = []
    for j in picks:
        rho, theta = thermo(iterate.P[j], iterate.s[j], model.params)
        out.append(SimState(float(t[j]), iterate.P[j].copy(), iterate.u[j].copy(), iterate.s[j].copy(),
                            r[j].copy(), rho, theta, iterate.q[j].copy(), step=j))
    return out


def run(config, base_dir=None):
    """Integrate according to ``config.mode`` and build the norm report.

    A positivity or monotonicity failure does not raise: the partial
    trajectory is returned with ``status = "failed"`` and the reason.
    """
    start = time.perf_counter()
    data, model = setup(config, base_dir)
    traj = Trajectory(config, model, data)
    initial = make_state(0.0, data.P, data.u, data.s, data.r, model)
    horizon = config.horizon
    if config.mode in ("nonlinear", "radiation-off"):
        states, exc = integrate(initial, model, horizon, cfl=config.cfl,
                                output_every=config.output_every)
        traj.states = states
        if exc is not None:
            traj.failure = str(exc)
    elif horizon == 0:
        traj.states = [initial]
    else:
        dt = stable_dt(initial, model, config.cfl)
        if config.mode == "linearized":
            t = time_slices(horizon, dt)
            try:
                frozen = FrozenFields.constant(data.P, data.u, data.s, data.r, t, model)
                iterate = solve_linearized(frozen, data.P, data.u, data.s)
                traj.states = _slice_states(iterate, data.r, model, config.output_every)
            except (FrozenFieldError, ArithmeticError) as exc:
                traj.failure = str(exc)
                traj.states = [initial]
        else:
            result = picard_iterate(data.P, data.u, data.s, data.r, model, horizon,
                                    k_max=config.k_max, tol=config.picard_tol, dt=dt)
            traj.picard = result
            traj.failure = result.failure
            traj.states = _slice_states(result.iterates[-1], data.r, model, config.output_every)
    if traj.failure:
        traj.status = "failed"
    if config.diagnostics:
        traj.report = build_report(traj.states, model)
    traj.wall_time = time.perf_counter() - start
    return traj
