"""Linearized system at frozen coefficients and the Picard iteration built on it.

Given frozen space-time fields ``(Pb, ub, sb)`` on uniform time slices, one
linear solve produces a new ``(P, u, s, q)``:

* ``w = r^2 q`` per slice from the flux equation with coefficients and source
  taken from the frozen fields only;
* ``s_t = -w_x / thetab`` integrated by the time trapezoid rule;
* ``P_t = -gamma Pb rhob (rb^2 u)_x - rhob w_x / cv``, ``u_t = -rb^2 P_x``
  advanced by Heun's method with ``u = 0`` on the boundary.

The frozen radius is ``rb = r0 + int_0^t ub``.  Slice spacing equals the time
step, so Runge-Kutta stages sit on slices and no interpolation is needed.
"""

from dataclasses import dataclass, field
import time

import numpy as np

from .differences import l2_norm
from .eos import DomainError
from .evolution import Model, thermo
from .radiation import flux_problem, solve_elliptic


class FrozenFieldError(DomainError):
    """A frozen coefficient field violated positivity or monotonicity."""

    def __init__(self, message, slice_index=None):
        super().__init__(message)
        self.slice_index = slice_index


def time_slices(T, dt_max):
    """Uniform slices ``0 = t_0 < ... < t_N = T`` with spacing at most ``dt_max``."""
    if not T > 0:
        raise ValueError(f"horizon T must be positive, got {T}")
    n = max(1, int(np.ceil(T / dt_max - 1e-12)))
    return np.linspace(0.0, T, n + 1)


def trapezoid_in_time(f, t):
    """Running time integral of slice data ``f[j]`` (first axis is time)."""
    out = np.zeros_like(f)
    dt = np.diff(t)[:, None]
    out[1:] = np.cumsum(0.5 * dt * (f[1:] + f[:-1]), axis=0)
    return out


@dataclass
class FrozenFields:
    """Space-time coefficient fields, shape ``(n_slices, n_nodes)``."""

    t: np.ndarray
    P: np.ndarray
    u: np.ndarray
    s: np.ndarray
    r0: np.ndarray
    model: Model
    r: np.ndarray = field(init=False, repr=False)
    rho: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        self.u = np.array(self.u, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        if np.any(self.u[:, [0, -1]] != 0.0):
            raise FrozenFieldError("frozen velocity must vanish on boundary nodes")
        for j in range(len(self.t)):
            if not (np.all(np.isfinite(self.P[j])) and self.P[j].min() > 0):
                raise FrozenFieldError(f"frozen pressure not positive at slice {j}", j)
        self.r = self.r0[None, :] + trapezoid_in_time(self.u, self.t)
        self.rho, self.theta = thermo(self.P, self.s, self.model.params)
        for j in range(len(self.t)):
            if not (self.rho[j].min() > 0 and self.theta[j].min() > 0):
                raise FrozenFieldError(f"frozen density or temperature not positive at slice {j}", j)
            if not np.all(np.diff(self.r[j]) > 0):
                raise FrozenFieldError(f"frozen radius not increasing at slice {j}", j)

    @classmethod
    def constant(cls, P, u, s, r0, t, model):
        n = len(t)
        return cls(t, np.tile(P, (n, 1)), np.tile(u, (n, 1)), np.tile(s, (n, 1)), r0, model)

    @property
    def n_slices(self):
        return len(self.t)


@dataclass
class Iterate:
    """Space-time fields ``(P, u, s, q)`` on the slices ``t``."""

    t: np.ndarray
    P: np.ndarray
    u: np.ndarray
    s: np.ndarray
    q: np.ndarray

    def difference(self, other, dx):
        """``sup_t ||(P, u, s) - (P', u', s')||_{L2}``."""
        sup = 0.0
        for j in range(len(self.t)):
            total = sum(l2_norm(a[j] - b[j], dx) ** 2
                        for a, b in ((self.P, other.P), (self.u, other.u), (self.s, other.s)))
            sup = max(sup, np.sqrt(total))
        return float(sup)


def frozen_flux(frozen):
    """``w = r^2 q`` per slice from the frozen fields alone."""
    m = frozen.model
    w = np.zeros_like(frozen.P)
    if m.radiation == 0.0:
        return w
    for j in range(frozen.n_slices):
        problem = flux_problem(frozen.P[j], frozen.s[j], frozen.rho[j], frozen.theta[j], frozen.r[j],
                               m.params.cv, m.dx, m.closure, m.radiation)
        w[j] = solve_elliptic(problem, m.dx)
    return w


def _acoustic_rhs(j, P, u, frozen, wx):
    m = frozen.model
    r2 = frozen.r[j] ** 2
    rho = frozen.rho[j]
    P_t = -m.params.gamma * frozen.P[j] * rho * m.ddx(r2 * u) - rho * wx[j] / m.params.cv
    u_t = -r2 * m.ddx(P)
    u_t[0] = u_t[-1] = 0.0
    return P_t, u_t


def linear_sweep(frozen, P0, u0, s0, w):
    """Advance ``(P, u, s)`` through the frozen slices for a given flux ``w``.

    The map ``(P0 - Pe, u0, s0 - se, w) -> (P - Pe, u, s - se)`` is linear
    for any constants ``Pe, se``.
    """
    m = frozen.model
    t = frozen.t
    n = frozen.n_slices
    wx = m.ddx(w)
    P = np.empty((n,) + np.shape(P0))
    u = np.empty_like(P)
    P[0], u[0] = P0, u0
    u[0, [0, -1]] = 0.0
    for j in range(n - 1):
        dt = t[j + 1] - t[j]
        k1P, k1u = _acoustic_rhs(j, P[j], u[j], frozen, wx)
        Pe = P[j] + dt * k1P
        ue = u[j] + dt * k1u
        k2P, k2u = _acoustic_rhs(j + 1, Pe, ue, frozen, wx)
        P[j + 1] = P[j] + 0.5 * dt * (k1P + k2P)
        u[j + 1] = u[j] + 0.5 * dt * (k1u + k2u)
        u[j + 1, [0, -1]] = 0.0
    s = s0[None, :] - trapezoid_in_time(wx / frozen.theta, t)
    return P, u, s


def solve_linearized(frozen, P0, u0, s0):
    """One linear solve at frozen coefficients.

    Parameters
    ----------
    frozen : FrozenFields
    P0, u0, s0 : ndarray
        Initial fields (absolute values); ``u0`` must vanish on the boundary.

    Returns
    -------
    Iterate
    """
    u0 = np.asarray(u0, dtype=float)
    if u0[0] != 0.0 or u0[-1] != 0.0:
        raise ValueError("initial velocity must vanish on the boundary")
    w = frozen_flux(frozen)
    P, u, s = linear_sweep(frozen, np.asarray(P0, dtype=float), u0, np.asarray(s0, dtype=float), w)
    q = w / frozen.r**2
    q[:, [0, -1]] = 0.0
    return Iterate(frozen.t.copy(), P, u, s, q)


@dataclass
class PicardResult:
    iterates: list
    deltas: list
    ratios: list  # (k, gamma_k) with gamma_k = delta_{k+1} / delta_k
    wall_times: list
    converged: bool = False
    failure: str = None

    @property
    def status(self):
        if self.failure:
            return "failed"
        return "converged" if self.converged else "max-iterations"


def ratios_from_deltas(deltas, floor=1e-14):
    out = []
    for k in range(len(deltas) - 1):
        if deltas[k] >= floor:
            out.append((k + 1, deltas[k + 1] / deltas[k]))
    return out


def picard_iterate(P0, u0, s0, r0, model, T, k_max=8, tol=1e-12, dt=None, cfl=0.4):
    """Successive linear solves starting from the data held constant in time.

    ``deltas[k-1] = sup_t ||iterate_k - iterate_{k-1}||``.  The ratio list
    pairs each ``k`` with ``deltas[k] / deltas[k-1]``, skipping
    denominators below ``1e-14``.  A frozen-field failure stops the loop and
    the partial sequence is returned with ``failure`` set.
    """
    from .evolution import make_state, stable_dt

    if dt is None:
        dt = stable_dt(make_state(0.0, P0, u0, s0, r0, model), model, cfl)
    t = time_slices(T, dt)
    q0 = make_state(0.0, P0, u0, s0, r0, model).q
    first = Iterate(t, *(np.tile(f, (len(t), 1)) for f in (P0, u0, s0, q0)))
    result = PicardResult([first], [], [], [])
    for k in range(1, k_max + 1):
        start = time.perf_counter()
        prev = result.iterates[-1]
        try:
            frozen = FrozenFields(t, prev.P, prev.u, prev.s, r0, model)
        except FrozenFieldError as exc:
            result.failure = f"iterate {k - 1}: {exc}"
            break
        nxt = solve_linearized(frozen, P0, u0, s0)
        result.iterates.append(nxt)
        result.deltas.append(nxt.difference(prev, model.dx))
        result.wall_times.append(time.perf_counter() - start)
        if result.deltas[-1] <= tol:
            result.converged = True
            break
    result.ratios = ratios_from_deltas(result.deltas)
    return result
