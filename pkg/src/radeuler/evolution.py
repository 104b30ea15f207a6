"""Explicit integration of the Lagrangian radiative Euler system.

Unknowns are nodal ``(P, u, s, r)`` on the mass grid; ``rho`` and ``theta``
follow from the equation of state and ``q`` from the flux solve at every
Runge-Kutta stage.  The semi-discrete system is

    P_t = -(cv+1)/cv * P rho (r^2 u)_x - rho (r^2 q)_x / cv
    u_t = -r^2 P_x                      (u_t = 0 on boundary nodes)
    s_t = -(r^2 q)_x / theta
    r_t = u
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import taylor
from .differences import derivative
from .eos import GasParams, rho_from_P_s
from .geometry import MassGrid, advance_r
from .radiation import (EllipticProblem, apply_operator, assemble, flux_potential_sbp, flux_problem,
                        solve_elliptic, thomas)

INTEGRATORS = ("ssprk2", "ssprk3")


class StateInvalidError(RuntimeError):
    """A positivity or monotonicity invariant failed during integration."""

    def __init__(self, field_name, node, time, value):
        self.field = field_name
        self.node = node
        self.time = time
        self.value = value
        super().__init__(f"{field_name} invalid at node {node}, t={time:.6g}: value {value!r}")


@dataclass(frozen=True)
class Model:
    """Discretization and physics switches shared by all solvers.

    Parameters
    ----------
    params : GasParams
    grid : MassGrid
    closure : {"sbp", "central2"}
        Boundary rows of the first-derivative stencil.
    radiation : float
        Multiplier on the flux source; ``0.0`` gives ``q = 0`` identically.
    nu : float
        Artificial dissipation ``nu * dx^2 * f_xx`` on ``(P, u, s)``.
    integrator : {"ssprk3", "ssprk2"}
    """

    params: GasParams
    grid: MassGrid
    closure: str = "sbp"
    radiation: float = 1.0
    nu: float = 0.0
    integrator: str = "ssprk3"

    def __post_init__(self):
        derivative(self.closure)
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}; expected one of {INTEGRATORS}")
        if self.nu < 0:
            raise ValueError("nu must be non-negative")

    @property
    def dx(self):
        return self.grid.dx

    def ddx(self, f):
        if isinstance(f, taylor.Jet):
            return f.map(lambda g: derivative(self.closure)(g, self.grid.dx))
        return derivative(self.closure)(f, self.grid.dx)


@dataclass
class SimState:
    """Nodal fields at one time instant with derived caches."""

    t: float
    P: np.ndarray
    u: np.ndarray
    s: np.ndarray
    r: np.ndarray
    rho: np.ndarray = field(repr=False, default=None)
    theta: np.ndarray = field(repr=False, default=None)
    q: np.ndarray = field(repr=False, default=None)
    step: int = 0

    @property
    def w(self):
        return self.r**2 * self.q


@dataclass
class Tendencies:
    P: np.ndarray
    u: np.ndarray
    s: np.ndarray
    r: np.ndarray

    def max_norm(self):
        return max(float(np.max(np.abs(f))) for f in (self.P, self.u, self.s, self.r))


def _check(name, values, t, test):
    bad = ~test(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise StateInvalidError(name, i, t, float(values[i]))


def thermo(P, s, params):
    """Density and temperature for arrays or jets."""
    if isinstance(P, taylor.Jet) or isinstance(s, taylor.Jet):
        k = params.cv / (params.cv + 1.0)
        rho = (taylor.log(P) * k - s / (params.cv + 1.0)).exp() * params.A**-k
        return rho, P / rho
    rho = rho_from_P_s(P, s, params)
    return rho, P / rho


def flux_potential(P, s, rho, theta, r, model):
    """``w = r^2 q`` from the flux solve (zero at both ends)."""
    if model.radiation == 0.0:
        return np.zeros_like(P)
    if model.closure == "sbp" and np.ndim(P) == 1:
        return flux_potential_sbp(P, s, rho, theta, r, model.params.cv, model.dx, model.radiation)
    problem = flux_problem(P, s, rho, theta, r, model.params.cv, model.dx, model.closure, model.radiation)
    return solve_elliptic(problem, model.dx)


def make_state(t, P, u, s, r, model, step=0):
    """Validate fields, evaluate the equation of state and solve for ``q``."""
    P = np.asarray(P, dtype=float)
    # one combined test on the fast path; locate the culprit only on failure
    if not (P.min() > 0 and np.isfinite(u.sum() + s.sum() + P.sum()) and (r[1:] > r[:-1]).all()):
        _check("P", P, t, lambda v: np.isfinite(v) & (v > 0))
        _check("u", np.asarray(u), t, np.isfinite)
        _check("s", np.asarray(s), t, np.isfinite)
        dr = np.diff(r)
        i = int(np.flatnonzero(~(dr > 0))[0])
        raise StateInvalidError("r", i + 1, t, float(r[i + 1]))
    rho, theta = thermo(P, s, model.params)
    if not (rho.min() > 0 and theta.min() > 0 and np.isfinite(rho.sum() + theta.sum())):
        _check("rho", rho, t, lambda v: np.isfinite(v) & (v > 0))
        _check("theta", theta, t, lambda v: np.isfinite(v) & (v > 0))
    w = flux_potential(P, s, rho, theta, r, model)
    q = w / r**2
    q[0] = q[-1] = 0.0
    return SimState(t=t, P=P, u=np.asarray(u, dtype=float), s=np.asarray(s, dtype=float),
                    r=np.asarray(r, dtype=float), rho=rho, theta=theta, q=q, step=step)


def tendencies(P, u, s, r, w, rho, theta, model):
    """Right-hand sides of the Lagrangian system for arrays or jets."""
    cv = model.params.cv
    wx = model.ddx(w)
    r2 = r * r
    P_t = -model.params.gamma * P * rho * model.ddx(r2 * u) - rho * wx / cv
    u_t = -r2 * model.ddx(P)
    s_t = -wx / theta
    if isinstance(u_t, taylor.Jet):
        u_t.c[..., 0] = 0.0
        u_t.c[..., -1] = 0.0
    else:
        u_t[0] = u_t[-1] = 0.0
    return P_t, u_t, s_t, u


def _dissipation(f, nu):
    out = np.zeros_like(f)
    out[1:-1] = nu * (f[2:] - 2.0 * f[1:-1] + f[:-2])
    return out


def rhs_nonlinear(state, model):
    """Tendencies ``(P_t, u_t, s_t, r_t)`` at a validated state."""
    P_t, u_t, s_t, r_t = tendencies(state.P, state.u, state.s, state.r, state.w,
                                    state.rho, state.theta, model)
    if model.nu > 0:
        # dx^2 * f_xx written as a plain second difference
        P_t = P_t + _dissipation(state.P, model.nu)
        u_t = u_t + _dissipation(state.u, model.nu)
        s_t = s_t + _dissipation(state.s, model.nu)
    return Tendencies(P_t, u_t, s_t, np.array(r_t, copy=True))


def max_wave_speed(state, model):
    return float(np.max(state.r**2 * np.sqrt(model.params.gamma * state.P * state.rho)))


def stable_dt(state, model, cfl=0.4):
    """Characteristic time step ``cfl * dx / max(r^2 sqrt(gamma P rho))``."""
    if not (0.0 < cfl <= 1.0):
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    return cfl * model.dx / max_wave_speed(state, model)


def _stage(state, dt, model):
    k = rhs_nonlinear(state, model)
    P = state.P + dt * k.P
    u = state.u + dt * k.u
    u[0] = u[-1] = 0.0
    s = state.s + dt * k.s
    r = advance_r(state.r, k.r, dt)
    return P, u, s, r


def _combine(state, stage, a, t, model, step):
    b = 1.0 - a
    P = a * state.P + b * stage[0]
    u = a * state.u + b * stage[1]
    u[0] = u[-1] = 0.0
    s = a * state.s + b * stage[2]
    r = a * state.r + b * stage[3]
    return make_state(t, P, u, s, r, model, step)


def step(state, dt, model):
    """Advance one strong-stability-preserving Runge-Kutta step.

    ``ssprk2`` is Heun's method; ``ssprk3`` is the three-stage Shu-Osher
    scheme.  The caller is responsible for ``dt <= stable_dt(state, model, 1)``.
    """
    t1 = state.t + dt
    n = state.step + 1
    s1 = make_state(t1, *_stage(state, dt, model), model, n)
    if model.integrator == "ssprk2":
        return _combine(state, _stage(s1, dt, model), 0.5, t1, model, n)
    s2 = _combine(state, _stage(s1, dt, model), 0.75, state.t + 0.5 * dt, model, n)
    return _combine(state, _stage(s2, dt, model), 1.0 / 3.0, t1, model, n)


def integrate(state, model, t_final, cfl=0.4, output_every=None, callback=None, dt=None,
              on_step=None):
    """Integrate to ``t_final``, recording states at the output cadence.

    The last step is shortened to land on ``t_final`` and on each output
    time.  ``callback`` sees every recorded state and ``on_step`` every
    accepted step.  Returns the recorded states and the exception that
    stopped the run (``None`` on success).
    """
    recorded = [state]
    if callback is not None:
        callback(state)
    if t_final <= state.t:
        return recorded, None
    cadence = output_every if output_every else t_final - state.t
    n_out = max(1, int(round((t_final - state.t) / cadence)))
    targets = [state.t + (t_final - state.t) * (k + 1) / n_out for k in range(n_out)]
    try:
        for target in targets:
            while target - state.t > 1e-12 * max(1.0, abs(target)):
                h = dt if dt is not None else stable_dt(state, model, cfl)
                h = min(h, target - state.t)
                state = step(state, h, model)
                if on_step is not None:
                    on_step(state)
            state = replace(state, t=target)
            recorded.append(state)
            if callback is not None:
                callback(state)
    except (StateInvalidError, ArithmeticError) as exc:
        return recorded, exc
    return recorded, None


def time_jets(P, u, s, r, model, order):
    """Time-Taylor expansion of the discrete system at a state.

    Starting from the nodal values, ``q`` is solved at order ``k``, the
    right-hand sides evaluated at order ``k`` supply the order ``k + 1``
    coefficients of ``(P, u, s, r)``, and the flux equation differentiated
    ``k + 1`` times gives the next coefficient of ``w = r^2 q``.

    Returns a dict of :class:`~radeuler.taylor.Jet` for ``P, u, s, r`` (up
    to ``order``) and ``w, q`` (up to ``order``).
    """
    n = len(P)
    shape = (order + 1, n)
    jets = {name: np.zeros(shape) for name in ("P", "u", "s", "r", "w")}
    for name, val in (("P", P), ("u", u), ("s", s), ("r", r)):
        jets[name][0] = val
    cv = model.params.cv
    dx = model.dx
    for k in range(order + 1):
        Pj, sj, rj = (taylor.Jet(jets[name][: k + 1]) for name in ("P", "s", "r"))
        rho, theta = thermo(Pj, sj, model.params)
        if model.radiation != 0.0:
            alpha = 1.0 / (rj**4 * rho)
            gsrc = -model.radiation * 4.0 * theta**3 / ((cv + 1.0) * rho) * (model.ddx(Pj) + Pj * model.ddx(sj))
            rhs = gsrc.c[k].copy()
            for i in range(1, k + 1):
                rhs -= apply_operator(alpha.c[i], rho.c[i], jets["w"][k - i], dx)
            problem = EllipticProblem(alpha.c[0], rho.c[0], rhs)
            jets["w"][k, 1:-1] = thomas(assemble(problem, dx))
        if k == order:
            break
        uj = taylor.Jet(jets["u"][: k + 1])
        wj = taylor.Jet(jets["w"][: k + 1])
        rates = tendencies(Pj, uj, sj, rj, wj, rho, theta, model)
        for name, rate in zip(("P", "u", "s", "r"), rates):
            jets[name][k + 1] = rate.c[k] / (k + 1)
    out = {name: taylor.Jet(c) for name, c in jets.items()}
    q = out["w"] / (out["r"] * out["r"])
    q.c[:, 0] = q.c[:, -1] = 0.0
    out["q"] = q
    return out


def derivative_fields(jets):
    """Convert jets to lists of time derivatives ``[f, f_t, f_tt, ...]``."""
    return {name: jet.derivatives() for name, jet in jets.items()}
