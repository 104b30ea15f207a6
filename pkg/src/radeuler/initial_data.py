"""Admissible initial data, their time derivatives at t = 0, and compatibility.

Profiles are shapes in the normalized radius ``xi = (r - a) / (b - a)``.
The Eulerian data ``P = 1 + eps wP phi``, ``s = 1 + eps ws phi`` fix the
initial density, hence the mass map ``h`` and the grid; each mass node is
then placed at ``r0 = h^{-1}(x)`` and the fields are sampled there.
"""

from dataclasses import dataclass, field

import numpy as np

from .differences import ddx_central2, derivative, l2_norm
from .eos import GasParams, rho_from_P_s
from .evolution import Model, derivative_fields, time_jets, thermo
from .geometry import AnnulusGeometry, MassGrid, load_profile, mass_coordinate, r0_from_x
from .radiation import radiative_source

PROFILES = ("sine-bump", "compact-bump", "custom")

MAX_ORDER = 2


class UnsupportedOrderError(ValueError):
    pass


@dataclass
class InitialDataSpec:
    """Perturbation of the equilibrium ``(P, u, s) = (1, 0, 1)``.

    ``weights`` scales the shape separately for ``(P, u, s)``.  For the
    sine family ``flatness_order`` is the power of ``sin(pi xi)``; the
    compact bump is flat to all orders.  Custom shapes are sampled at
    ``n_cells + 1`` uniform points in ``xi``, one array per field.
    """

    epsilon: float = 1e-3
    profile: str = "compact-bump"
    flatness_order: int = 1
    weights: tuple = (1.0, 1.0, 1.0)
    custom: dict = field(default_factory=dict)
    center: float = 0.5
    half_width: float = 0.35

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; expected one of {PROFILES}")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        if int(self.flatness_order) != self.flatness_order or self.flatness_order < 1:
            raise ValueError("flatness_order must be an integer >= 1")
        if not (0 < self.half_width and 0 < self.center - self.half_width
                and self.center + self.half_width < 1):
            raise ValueError("compact bump support must lie strictly inside (0, 1)")


def compact_bump(xi, center=0.5, half_width=0.35):
    """Smooth bump with unit peak, identically zero outside ``center +- half_width``."""
    z = (np.asarray(xi, dtype=float) - center) / half_width
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
    return out


def sine_bump(xi, power=1):
    return np.sin(np.pi * np.asarray(xi, dtype=float)) ** power


def load_custom_profile(path, n_cells):
    """Read ``(xi, value)`` samples and resample to ``n_cells + 1`` uniform points."""
    xi, values = load_profile(path)
    return np.interp(np.linspace(0.0, 1.0, n_cells + 1), xi, values)


def _shapes(spec, xi, n_cells):
    if spec.profile == "compact-bump":
        phi = compact_bump(xi, spec.center, spec.half_width)
        return phi, phi, phi
    if spec.profile == "sine-bump":
        phi = sine_bump(xi, spec.flatness_order)
        return phi, phi, phi
    out = []
    uniform = np.linspace(0.0, 1.0, n_cells + 1)
    for name in ("P", "u", "s"):
        samples = spec.custom.get(name)
        if samples is None:
            out.append(np.zeros_like(xi))
            continue
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (n_cells + 1,):
            raise ValueError(
                f"custom samples for {name} have length {samples.size}, grid needs {n_cells + 1}"
            )
        out.append(np.interp(xi, uniform, samples))
    return tuple(out)


@dataclass
class InitialData:
    grid: MassGrid
    P: np.ndarray
    u: np.ndarray
    s: np.ndarray
    r: np.ndarray
    h2_norm: float
    spec: InitialDataSpec
    mass_table: object = field(repr=False, default=None)
    h2_norm_mass: float = None


def perturbation_h2(P, u, s, dx):
    """Discrete ``H^2`` norm of ``(P - 1, u, s - 1)``."""
    total = 0.0
    for f in (P - 1.0, u, s - 1.0):
        d1 = ddx_central2(f, dx)
        d2 = ddx_central2(d1, dx)
        total += l2_norm(f, dx) ** 2 + l2_norm(d1, dx) ** 2 + l2_norm(d2, dx) ** 2
    return float(np.sqrt(total))


def build(spec, n_cells, geom=None, params=None, radius_samples=4097):
    """Construct nodal initial data and the mass grid it defines.

    Returns
    -------
    InitialData
        ``u`` vanishes exactly on the boundary nodes; ``r[0] = a`` and
        ``r[-1] = b``.  ``h2_norm`` is the discrete ``H^2`` norm of the
        Eulerian perturbation on ``n_cells + 1`` uniform radii, which is
        exactly linear in ``epsilon``; ``h2_norm_mass`` is the same norm
        on the mass grid, whose spacing itself depends on ``epsilon``.
    """
    geom = geom or AnnulusGeometry()
    params = params or GasParams()
    eps = spec.epsilon
    wP, wu, ws = spec.weights
    xi_fine = np.linspace(0.0, 1.0, radius_samples)
    phiP, _, phis = _shapes(spec, xi_fine, n_cells)
    rho0 = rho_from_P_s(1.0 + eps * wP * phiP, 1.0 + eps * ws * phis, params)
    M, table = mass_coordinate(rho0, geom)
    grid = MassGrid(n_cells, M, geom)
    r = r0_from_x(grid.nodes, table)
    r[0], r[-1] = geom.a, geom.b
    xi = (r - geom.a) / (geom.b - geom.a)
    phiP, phiu, phis = _shapes(spec, xi, n_cells)
    P = 1.0 + eps * wP * phiP
    u = eps * wu * phiu
    u[0] = u[-1] = 0.0
    s = 1.0 + eps * ws * phis
    xi_u = np.linspace(0.0, 1.0, n_cells + 1)
    eP, eu, es = (eps * w * phi for w, phi in zip(spec.weights, _shapes(spec, xi_u, n_cells)))
    eu[0] = eu[-1] = 0.0
    h2 = perturbation_h2(1.0 + eP, eu, 1.0 + es, (geom.b - geom.a) / n_cells)
    return InitialData(grid, P, u, s, r, h2, spec, table, perturbation_h2(P, u, s, grid.dx))


def time_derivatives_at_zero(data, k, model):
    """Time derivatives of the data implied by the discrete equations.

    Returns a dict mapping ``"P", "u", "s", "r"`` to ``[f, f_t, ...]`` up to
    order ``k`` and ``"q"`` to ``[q, q_t, ...]`` up to order ``k`` (one order
    beyond ``k - 1`` because the flux solve is instantaneous).
    """
    if k not in (1, 2):
        raise UnsupportedOrderError(f"time derivatives are available for k = 1, 2; got {k}")
    jets = time_jets(data.P, data.u, data.s, data.r, model, k)
    return derivative_fields(jets)


@dataclass
class CompatibilityReport:
    epsilon: float
    threshold: float
    values: list  # (order, |left|, |right|)

    def passed(self, order):
        _, left, right = self.values[order]
        return max(left, right) <= self.threshold

    @property
    def all_passed(self):
        return all(self.passed(k) for k in range(len(self.values)))

    def first_failure(self):
        for k in range(len(self.values)):
            if not self.passed(k):
                return k
        return None


def boundary_u_derivatives(data, model, order):
    """Boundary values of ``d^k u / dt^k`` at t = 0 for ``k <= order``.

    The boundary rows of the evolution force ``u_t = 0``, so the values are
    taken from the differentiated momentum equation before that row is
    imposed: ``u_t = -r^2 P_x`` and
    ``u_tt = -2 r u P_x - r^2 (P_t)_x`` with
    ``(P_t)_x = -gamma ((P rho)_x v_x + P rho v_xx) - (rho w_x)_x / cv``,
    ``v = r^2 u``.  At a boundary node the flux divergence
    ``(rho w_x)_x`` is replaced by ``alpha w - g`` from the flux equation.
    """
    if order > MAX_ORDER:
        raise UnsupportedOrderError(f"compatibility is checked up to order {MAX_ORDER}")
    dx = model.dx
    P, u, s, r = data.P, data.u, data.s, data.r
    ddx = derivative(model.closure)
    idx = [0, -1]
    out = [np.abs(u[idx])]
    if order >= 1:
        Px = ddx(P, dx)
        out.append(np.abs(-r[idx] ** 2 * Px[idx]))
    if order >= 2:
        params = model.params
        rho, theta = thermo(P, s, params)
        v = r**2 * u
        vx = ddx_central2(v, dx)
        vxx = ddx_central2(vx, dx)
        Prho_x = ddx_central2(P * rho, dx)
        g = radiative_source(P, s, rho, theta, params.cv, dx, model.closure, model.radiation)
        # w = 0 on the boundary, so alpha * w - g reduces to -g there
        flux_div = -g
        Pt_x = -params.gamma * (Prho_x * vx + P * rho * vxx) - flux_div / params.cv
        utt = -2.0 * r * u * Px - r**2 * Pt_x
        out.append(np.abs(utt[idx]))
    return out


def check_compatibility(data, order, model, rel_threshold=1e-10):
    """Report ``|d^k u/dt^k(0)|`` on both boundaries against ``rel_threshold * eps``."""
    values = boundary_u_derivatives(data, model, order)
    report = [(k, float(v[0]), float(v[1])) for k, v in enumerate(values)]
    return CompatibilityReport(data.spec.epsilon, rel_threshold * data.spec.epsilon, report)


def equilibrium_data(n_cells, geom=None, params=None, radius_samples=4097):
    """Exact equilibrium on the grid it induces."""
    return build(InitialDataSpec(epsilon=0.0), n_cells, geom, params, radius_samples)


def model_for(data, params=None, **options):
    return Model(params or GasParams(), data.grid, **options)


__all__ = [
    "InitialDataSpec",
    "InitialData",
    "CompatibilityReport",
    "build",
    "time_derivatives_at_zero",
    "check_compatibility",
    "equilibrium_data",
    "compact_bump",
    "sine_bump",
]
