"""Discrete norms, energy functionals and a priori monitors.

Time derivatives never come from differencing stored slices.  They are
obtained by substituting the discrete equations at the current state (see
:func:`radeuler.evolution.time_jets`), so every norm below is a function of
a single state.  Spatial derivatives use central differences with
second-order one-sided boundary rows, and integrals use trapezoid weights.

For a scalar field with time derivatives ``f_k = d^k f / dt^k``::

    |||f|||_m     = sum_{k <= m} ||f_k||_{H^{m-k}}
    |||f|||_m,tan = sum_{k <= m} ||f_k||_{L2}

and a tuple of fields is combined in the Euclidean sense,
``|||(f, g)|||^2 = |||f|||^2 + |||g|||^2``.
"""

from dataclasses import dataclass, field

import numpy as np

from .differences import ddx_central2, l2_norm, trapezoid
from .eos import equilibrium_constants
from .evolution import SimState, derivative_fields, time_jets

MAX_M = 2


def _check_m(m):
    if m not in (0, 1, 2):
        raise ValueError(f"norm order m must be 0, 1 or 2, got {m}")


def sobolev_norm(f, j, dx):
    """Discrete ``H^j`` norm: ``sqrt(sum_{i <= j} ||d^i f / dx^i||^2)``."""
    total = 0.0
    g = np.asarray(f, dtype=float)
    for i in range(j + 1):
        if i:
            g = ddx_central2(g, dx)
        total += l2_norm(g, dx) ** 2
    return float(np.sqrt(total))


def _as_derivs(f, m):
    # a bare array is a time-independent field
    if isinstance(f, np.ndarray) and f.ndim == 1:
        return [f] + [np.zeros_like(f)] * m
    return list(f)


def triple_norm(derivs, m, dx):
    """``|||f|||_m`` from ``[f, f_t, ..., d^m f/dt^m]`` (or a plain array)."""
    _check_m(m)
    derivs = _as_derivs(derivs, m)
    if len(derivs) < m + 1:
        raise ValueError(f"need {m + 1} time derivatives, got {len(derivs)}")
    return float(sum(sobolev_norm(derivs[k], m - k, dx) for k in range(m + 1)))


def tangential_norm(derivs, m, dx):
    """``|||f|||_{m,tan}``: time derivatives only."""
    _check_m(m)
    derivs = _as_derivs(derivs, m)
    return float(sum(l2_norm(derivs[k], dx) for k in range(m + 1)))


def combined(values):
    """Euclidean combination of per-field norms."""
    return float(np.sqrt(sum(v * v for v in values)))


def perturbation_derivatives(state, model, order=MAX_M):
    """Time-derivative lists of ``P - 1, u, s - 1, q, q_x`` and ``P_x, s_x`` at a state."""
    jets = time_jets(state.P, state.u, state.s, state.r, model, order)
    d = derivative_fields(jets)
    dx = model.dx
    out = {
        "P": [d["P"][0] - 1.0] + d["P"][1:],
        "u": d["u"],
        "s": [d["s"][0] - 1.0] + d["s"][1:],
        "q": d["q"],
    }
    for name in ("q", "P", "s"):
        out[name + "x"] = [ddx_central2(f, dx) for f in out[name]]
    return out


def discrete_norm(obj, m, model=None, names=("P", "u", "s", "q", "qx"), tangential=False):
    """``|||.|||_m`` of a state, a single field, or derivative lists.

    Parameters
    ----------
    obj : SimState, ndarray, dict or list
        A state (norms of the perturbation fields in ``names``); a nodal
        array (time independent); a derivative list ``[f, f_t, ...]``; or a
        dict of such lists.
    m : {0, 1, 2}
    model : Model
        Needed for states (grid spacing and the substituted equations) and
        for the grid spacing otherwise.
    """
    _check_m(m)
    dx = model.dx
    norm = tangential_norm if tangential else triple_norm
    if isinstance(obj, SimState):
        obj = perturbation_derivatives(obj, model, max(m, 1))
    if isinstance(obj, dict):
        return combined(norm(obj[name], m, dx) for name in names)
    return norm(obj, m, dx)


def energy_m0(state, params, dx):
    """Zeroth-order energy ``E0`` and dissipation ``D0``.

    ``E0 = int cv/((cv+1) c_rho) (P-1)^2 + u^2 + c_theta/((cv+1) c_rho) (s-1)^2``
    and ``D0 = int q^2/(4 c_theta^3) + c_rho^2/(4 c_theta^3) ((r^2 q)_x)^2``.
    """
    c_rho, c_theta = equilibrium_constants(params)
    cv = params.cv
    e = (cv / ((cv + 1.0) * c_rho) * (state.P - 1.0) ** 2 + state.u**2
         + c_theta / ((cv + 1.0) * c_rho) * (state.s - 1.0) ** 2)
    wx = ddx_central2(state.r**2 * state.q, dx)
    d = state.q**2 / (4.0 * c_theta**3) + c_rho**2 / (4.0 * c_theta**3) * wx**2
    return float(trapezoid(e, dx)), float(trapezoid(d, dx))


def perturbation_sources(state, params, dx):
    """Nodal source fields ``S1, S3, S4`` of the equations linearized at equilibrium.

    With ``Pt = P - 1``, ``w = r^2 q`` and equilibrium ``c_rho, c_theta``::

        S1 = gamma (c_rho - rho) (r^2 u)_x - gamma rho Pt (r^2 u)_x + (c_rho - rho) w_x / cv
        S3 = (1/c_theta - 1/theta) w_x
        S4 = r^2 (rho^2 - c_rho^2) w_xx + 4 r^2 (c_theta^3 - theta^3)/(cv+1) (P_x + s_x)
             + r^2 (rho^2)_x w_x / 2 - 4 r^2 theta^3 / (cv+1) Pt s_x

    Each is a sum of products of two perturbation quantities.
    """
    c_rho, c_theta = equilibrium_constants(params)
    cv, gamma = params.cv, params.gamma
    r2 = state.r**2
    rho, theta = state.rho, state.theta
    Pt = state.P - 1.0
    D = lambda f: ddx_central2(f, dx)
    vx = D(r2 * state.u)
    w = r2 * state.q
    wx = D(w)
    wxx = D(wx)
    Px, sx = D(state.P), D(state.s)
    S1 = gamma * (c_rho - rho) * vx - gamma * rho * Pt * vx + (c_rho - rho) * wx / cv
    S3 = (1.0 / c_theta - 1.0 / theta) * wx
    S4 = (r2 * (rho**2 - c_rho**2) * wxx
          + 4.0 * r2 * (c_theta**3 - theta**3) / (cv + 1.0) * (Px + sx)
          + 0.5 * r2 * D(rho**2) * wx
          - 4.0 * r2 * theta**3 / (cv + 1.0) * Pt * sx)
    return S1, S3, S4


def perturbation_residuals(state, params, dx):
    """L2 norms of ``S1, S3, S4`` as a dict."""
    S1, S3, S4 = perturbation_sources(state, params, dx)
    return {"S1": l2_norm(S1, dx), "S3": l2_norm(S3, dx), "S4": l2_norm(S4, dx)}


@dataclass
class NormRecord:
    t: float
    E0: float
    D0: float
    l2: dict
    norm1_sq: float  # |||(P-1, u, s-1, q, q_x)|||_1^2
    norm2_sq: float  # |||(P-1, u, s-1, q, q_x)|||_2^2
    norm2_tan_sq: float
    data2_sq: float  # |||(P-1, u, s-1)|||_2^2
    dissipation_sq: float  # |||(DP, Ds)|||_1^2 + |||(u, q, q_x)|||_2^2


def norm_record(state, model):
    """All per-time diagnostics at one state."""
    dx = model.dx
    d = perturbation_derivatives(state, model, MAX_M)
    n1 = {k: triple_norm(d[k], 1, dx) for k in ("P", "u", "s", "q", "qx")}
    n2 = {k: triple_norm(d[k], 2, dx) for k in ("P", "u", "s", "q", "qx")}
    tan2 = {k: tangential_norm(d[k], 2, dx) for k in ("P", "u", "s", "q", "qx")}
    # DP = (P_t, P_x), Ds = (s_t, s_x) measured in |||.|||_1
    dP = [triple_norm(d["P"][1:], 1, dx), triple_norm(d["Px"][:2], 1, dx)]
    ds = [triple_norm(d["s"][1:], 1, dx), triple_norm(d["sx"][:2], 1, dx)]
    diss = sum(v * v for v in dP + ds) + sum(n2[k] ** 2 for k in ("u", "q", "qx"))
    E0, D0 = energy_m0(state, model.params, dx)
    l2 = {k: l2_norm(d[k][0], dx) for k in ("P", "u", "s", "q", "qx")}
    l2.update({k + "_t": l2_norm(d[k][1], dx) for k in ("P", "u", "s", "q")})
    l2.update({k + "_x": l2_norm(ddx_central2(d[k][0], dx), dx) for k in ("P", "u", "s")})
    return NormRecord(
        t=float(state.t), E0=E0, D0=D0, l2=l2,
        norm1_sq=sum(v * v for v in n1.values()),
        norm2_sq=sum(v * v for v in n2.values()),
        norm2_tan_sq=sum(v * v for v in tan2.values()),
        data2_sq=sum(n2[k] ** 2 for k in ("P", "u", "s")),
        dissipation_sq=diss,
    )


def _cumulative(values, t):
    out = np.zeros(len(values))
    if len(values) > 1:
        out[1:] = np.cumsum(0.5 * np.diff(t) * (values[1:] + values[:-1]))
    return out


@dataclass
class NormReport:
    """Time series of :class:`NormRecord` with cumulative integrals."""

    records: list = field(default_factory=list)

    @property
    def t(self):
        return np.array([r.t for r in self.records])

    def series(self, name):
        return np.array([getattr(r, name) for r in self.records])

    @property
    def cumulative_D0(self):
        return _cumulative(self.series("D0"), self.t)

    @property
    def cumulative_dissipation(self):
        return _cumulative(self.series("dissipation_sq"), self.t)

    def apriori_lhs(self):
        """``sup_{t' <= t} |||.|||_2^2 + int_0^t dissipation``."""
        return np.maximum.accumulate(self.series("norm2_sq")) + self.cumulative_dissipation

    def measured_c0(self):
        """Running smallest constant validating the a priori inequality."""
        if not self.records:
            return np.zeros(0)
        lhs = self.apriori_lhs()
        rhs0 = self.records[0].data2_sq
        if rhs0 <= 0.0:
            return np.ones_like(lhs) if np.all(lhs <= 0.0) else np.full_like(lhs, np.inf)
        return np.maximum.accumulate(lhs / rhs0)

    def columns(self):
        """Ordered diagnostic columns for serialization."""
        cols = {
            "t": self.t,
            "E0": self.series("E0"),
            "D0": self.series("D0"),
            "cum_D0": self.cumulative_D0,
            "norm1_sq": self.series("norm1_sq"),
            "norm2_sq": self.series("norm2_sq"),
            "norm2_tan_sq": self.series("norm2_tan_sq"),
            "dissipation_sq": self.series("dissipation_sq"),
            "cum_dissipation": self.cumulative_dissipation,
            "C0": self.measured_c0(),
        }
        for key in self.records[0].l2 if self.records else ():
            cols["l2_" + key] = np.array([r.l2[key] for r in self.records])
        return cols


def build_report(states, model):
    return NormReport([norm_record(s, model) for s in states])


def apriori_monitor(trajectory, model=None, ceiling=100.0):
    """Measured ``C0`` of the a priori inequality along a trajectory.

    Parameters
    ----------
    trajectory : NormReport or list of SimState
    ceiling : float
        Pass threshold for the measured constant.

    Returns
    -------
    passed : bool
    c0 : float
        Smallest constant making the inequality hold at every recorded time
        (1 for an unperturbed trajectory by convention).
    margin : ndarray
        ``ceiling - C(t)`` where ``C(t)`` is the running constant.
    """
    report = trajectory if isinstance(trajectory, NormReport) else build_report(trajectory, model)
    c = report.measured_c0()
    c0 = float(c[-1])
    return bool(c0 <= ceiling), c0, ceiling - c
