"""Radiative flux from the elliptic equation at a frozen fluid state.

With ``w = r^2 q`` the flux equation, divided by ``r^2 rho``, reads

    alpha * w - (beta * w_x)_x = g,   w(0) = w(M) = 0,

with ``alpha = 1 / (r^4 rho)``, ``beta = rho`` and
``g = -4 theta^3 / ((cv + 1) rho) * (P_x + P s_x)``.
"""

from dataclasses import dataclass

import numba
import numpy as np

from .differences import derivative
from .eos import DomainError


class EllipticSolveError(ArithmeticError):
    """The assembled flux system is not positive definite."""


@dataclass
class EllipticProblem:
    """Self-adjoint two-point problem on the mass grid nodes."""

    alpha: np.ndarray
    beta: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta"):
            coef = np.asarray(getattr(self, name), dtype=float)
            if coef.min() > 0 and np.isfinite(coef.sum()):
                continue
            bad = ~(np.isfinite(coef) & (coef > 0))
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise DomainError(f"{name} must be positive and finite; node {i} has {coef[i]!r}")


@dataclass
class TridiagonalSystem:
    """Interior rows of the Dirichlet problem; ``lower[i]`` couples row i+1 to row i."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)


def assemble(problem, dx):
    """Three-point stencil with arithmetic-mean half-node diffusion.

    Row ``i`` (node ``i = 1..n-1``) is
    ``alpha_i w_i - (b_{i+1/2}(w_{i+1} - w_i) - b_{i-1/2}(w_i - w_{i-1})) / dx^2``.
    """
    beta = np.asarray(problem.beta, dtype=float)
    half = 0.5 * (beta[1:] + beta[:-1]) / dx**2
    diag = np.asarray(problem.alpha, dtype=float)[1:-1] + half[:-1] + half[1:]
    off = -half[1:-1]
    return TridiagonalSystem(off.copy(), diag, off.copy(), np.asarray(problem.rhs, dtype=float)[1:-1].copy())


@numba.njit(cache=True)
def _thomas(lower, diag, upper, rhs):
    n = diag.shape[0]
    c = np.empty(n)
    g = np.empty(n)
    x = np.empty(n)
    m = diag[0]
    if not m > 0.0:
        return x, 0
    c[0] = upper[0] / m if n > 1 else 0.0
    g[0] = rhs[0] / m
    for i in range(1, n):
        m = diag[i] - lower[i - 1] * c[i - 1]
        if not m > 0.0:
            return x, i
        if i < n - 1:
            c[i] = upper[i] / m
        g[i] = (rhs[i] - lower[i - 1] * g[i - 1]) / m
    x[n - 1] = g[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = g[i] - c[i] * x[i + 1]
    return x, -1


def thomas(system):
    """Solve a tridiagonal system by forward elimination and back substitution.

    Pivots are required to stay positive, which holds for the symmetric
    positive-definite flux matrices; a non-positive pivot raises
    :class:`EllipticSolveError` naming the row.
    """
    x, bad = _thomas(
        np.ascontiguousarray(system.lower, dtype=float),
        np.ascontiguousarray(system.diag, dtype=float),
        np.ascontiguousarray(system.upper, dtype=float),
        np.ascontiguousarray(system.rhs, dtype=float),
    )
    if bad >= 0:
        raise EllipticSolveError(
            f"non-positive pivot at interior row {bad} (diag={system.diag[bad]!r}); "
            "coefficients are corrupted or the system is not positive definite"
        )
    return x


def apply_operator(alpha, beta, w, dx):
    """Evaluate ``alpha w - (beta w_x)_x`` with the assembly stencil at interior nodes.

    Bilinear in ``(alpha, w)`` and ``(beta, w)``; boundary entries are zero.
    """
    half = 0.5 * (beta[..., 1:] + beta[..., :-1])
    flux = half * (w[..., 1:] - w[..., :-1]) / dx
    out = np.zeros(np.broadcast_shapes(np.shape(alpha), np.shape(w)))
    out[..., 1:-1] = alpha[..., 1:-1] * w[..., 1:-1] - (flux[..., 1:] - flux[..., :-1]) / dx
    return out


def solve_elliptic(problem, dx):
    """Nodal solution with homogeneous Dirichlet data at both ends."""
    w = np.zeros_like(np.asarray(problem.alpha, dtype=float))
    w[1:-1] = thomas(assemble(problem, dx))
    return w


def radiative_source(P, s, rho, theta, cv, dx, closure="sbp", scale=1.0):
    """Right-hand side ``g`` of the flux problem."""
    ddx = derivative(closure)
    return -scale * 4.0 * theta**3 / ((cv + 1.0) * rho) * (ddx(P, dx) + P * ddx(s, dx))


def flux_problem(P, s, rho, theta, r, cv, dx, closure="sbp", scale=1.0):
    """Assemble the :class:`EllipticProblem` for ``w = r^2 q``."""
    return EllipticProblem(
        alpha=1.0 / (r**4 * rho),
        beta=np.asarray(rho, dtype=float),
        rhs=radiative_source(P, s, rho, theta, cv, dx, closure, scale),
    )


@numba.njit(cache=True)
def _flux_sbp(P, s, rho, theta, r, cv, dx, scale):
    # source, assembly and elimination in one pass; same stencils as flux_problem
    n = P.shape[0]
    g = np.empty(n)
    for i in range(n):
        if i == 0:
            Px, sx = (P[1] - P[0]) / dx, (s[1] - s[0]) / dx
        elif i == n - 1:
            Px, sx = (P[i] - P[i - 1]) / dx, (s[i] - s[i - 1]) / dx
        else:
            Px, sx = (P[i + 1] - P[i - 1]) / (2.0 * dx), (s[i + 1] - s[i - 1]) / (2.0 * dx)
        g[i] = -scale * 4.0 * theta[i] ** 3 / ((cv + 1.0) * rho[i]) * (Px + P[i] * sx)
    m = n - 2
    lower = np.empty(max(m - 1, 0))
    diag = np.empty(m)
    inv = 1.0 / dx**2
    for i in range(m):
        hl = 0.5 * (rho[i + 1] + rho[i]) * inv
        hr = 0.5 * (rho[i + 2] + rho[i + 1]) * inv
        diag[i] = 1.0 / (r[i + 1] ** 4 * rho[i + 1]) + hl + hr
        if i < m - 1:
            lower[i] = -hr
    x, bad = _thomas(lower, diag, lower, g[1:-1].copy())
    w = np.zeros(n)
    w[1:-1] = x
    return w, bad


def flux_potential_sbp(P, s, rho, theta, r, cv, dx, scale=1.0):
    """Fast path of ``solve_elliptic(flux_problem(...))`` for the ``sbp`` closure.

    Coefficients must already be validated (positive density and radius).
    """
    w, bad = _flux_sbp(P, s, rho, theta, r, float(cv), float(dx), float(scale))
    if bad >= 0:
        raise EllipticSolveError(f"non-positive pivot at interior row {bad}")
    return w


def solve_radiative_flux(P, s, rho, theta, r, grid, params, closure="sbp", scale=1.0):
    """Radiative flux ``q`` at a frozen state; zero at both boundaries.

    Parameters
    ----------
    P, s, rho, theta, r : ndarray
        Nodal pressure, entropy, density, temperature and radius.
    grid : MassGrid
    params : GasParams
    closure : {"sbp", "central2"}
        Boundary rows of the gradient stencil for ``P_x`` and ``s_x``.
    scale : float
        Multiplier on the source; ``0`` switches radiation off.
    """
    if not np.all(np.diff(r) > 0):
        raise DomainError("radius field must be strictly increasing")
    problem = flux_problem(P, s, rho, theta, r, params.cv, grid.dx, closure, scale)
    w = solve_elliptic(problem, grid.dx)
    q = w / r**2
    q[0] = q[-1] = 0.0
    return q
