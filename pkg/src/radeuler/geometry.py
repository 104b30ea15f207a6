"""Annulus geometry and the Eulerian/Lagrangian coordinate maps.

The Lagrangian coordinate of a shell at radius ``z`` is the enclosed mass
``h(z) = int_a^z y^2 rho0(y) dy``.  Masses are kept in physical units, so
the mass interval is ``[0, M]`` with ``M = h(b)``.
"""

from dataclasses import dataclass

import numpy as np

from .differences import cumulative_trapezoid, ddx_central2
from .eos import DomainError


@dataclass(frozen=True)
class AnnulusGeometry:
    a: float = 1.0
    b: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.a < self.b < np.inf):
            raise DomainError(f"need 0 < a < b < inf, got a={self.a}, b={self.b}")

    @property
    def volume(self):
        """``(b^3 - a^3) / 3``, the volume per unit solid angle."""
        return (self.b**3 - self.a**3) / 3.0


@dataclass(frozen=True)
class MassGrid:
    """Uniform node grid on the mass interval ``[0, total_mass]``."""

    n_cells: int
    total_mass: float
    geometry: AnnulusGeometry

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValueError(f"n_cells must be an integer >= 2, got {self.n_cells}")
        if not self.total_mass > 0:
            raise DomainError(f"total mass must be positive, got {self.total_mass}")

    @property
    def n_nodes(self):
        return self.n_cells + 1

    @property
    def dx(self):
        return self.total_mass / self.n_cells

    @property
    def nodes(self):
        x = np.arange(self.n_nodes) * self.dx
        x[-1] = self.total_mass
        return x


@dataclass(frozen=True)
class MassTable:
    """Monotone radius-to-mass map built from density samples.

    The density is taken piecewise linear between samples and the ``y^2``
    weight is integrated exactly, so a constant density gives the exact
    shell mass.
    """

    radius: np.ndarray
    density: np.ndarray
    cumulative: np.ndarray

    @property
    def total_mass(self):
        return float(self.cumulative[-1])

    def _segment_mass(self, j, z):
        # mass between radius[j] and z for z inside segment j
        r0 = self.radius[j]
        slope = (self.density[j + 1] - self.density[j]) / (self.radius[j + 1] - r0)
        cube = (z**3 - r0**3) / 3.0
        quart = (z**4 - r0**4) / 4.0 - r0 * cube
        return self.density[j] * cube + slope * quart

    def _segment_density(self, j, z):
        r0 = self.radius[j]
        slope = (self.density[j + 1] - self.density[j]) / (self.radius[j + 1] - r0)
        return self.density[j] + slope * (z - r0)

    def h(self, z):
        """Enclosed mass between ``a`` and ``z``."""
        z = np.asarray(z, dtype=float)
        j = np.clip(np.searchsorted(self.radius, z, side="right") - 1, 0, len(self.radius) - 2)
        out = self.cumulative[j] + self._segment_mass(j, z)
        return out if out.ndim else float(out)


def segment_masses(radius, rho):
    """Shell masses ``int y^2 rho dy`` per interval, ``rho`` linear in ``y``.

    The ``y^2`` weight is integrated exactly, so the rule is exact for
    piecewise-linear densities on any increasing radius grid.
    """
    r0, r1 = radius[:-1], radius[1:]
    slope = np.diff(rho) / (r1 - r0)
    cube = (r1**3 - r0**3) / 3.0
    quart = (r1**4 - r0**4) / 4.0 - r0 * cube
    return rho[:-1] * cube + slope * quart


def mass_coordinate(rho0, geom):
    """Build the mass map from densities on a uniform radius grid over ``[a, b]``.

    Returns
    -------
    M : float
        Total mass ``h(b)``.
    table : MassTable
    """
    rho0 = np.asarray(rho0, dtype=float)
    if rho0.ndim != 1 or rho0.size < 8:
        raise ValueError("need at least 8 density samples")
    if not np.all(rho0 > 0):
        raise DomainError("initial density must be strictly positive")
    radius = np.linspace(geom.a, geom.b, rho0.size)
    cumulative = np.concatenate(([0.0], np.cumsum(segment_masses(radius, rho0))))
    table = MassTable(radius, rho0, cumulative)
    return table.total_mass, table


def r0_from_x(x, table, tol=1e-12):
    """Invert the mass map: the radius ``r`` with ``h(r) = x``.

    The segment is bracketed by a sorted search over the tabulated masses,
    then refined by safeguarded Newton iteration to ``tol * b``.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    M = table.total_mass
    span = 1e-14 * M
    if np.any(x < -span) or np.any(x > M + span):
        raise DomainError(f"mass coordinate outside [0, {M}]")
    x = np.clip(x, 0.0, M)
    cum = table.cumulative
    j = np.clip(np.searchsorted(cum, x, side="right") - 1, 0, len(cum) - 2)
    lo = table.radius[j].copy()
    hi = table.radius[j + 1].copy()
    target = x - cum[j]
    seg_mass = cum[j + 1] - cum[j]
    z = lo + (hi - lo) * np.where(seg_mass > 0, target / seg_mass, 0.0)
    atol = tol * table.radius[-1]
    for _ in range(100):
        f = table._segment_mass(j, z) - target
        lo = np.where(f < 0, z, lo)
        hi = np.where(f > 0, z, hi)
        step = f / (z**2 * table._segment_density(j, z))
        z_new = z - step
        outside = (z_new <= lo) | (z_new >= hi)
        z_new = np.where(outside, 0.5 * (lo + hi), z_new)
        done = np.abs(z_new - z) <= atol
        z = z_new
        if np.all(done):
            break
    z[x == 0.0] = table.radius[0]
    z[x == M] = table.radius[-1]
    return float(z[0]) if scalar else z


def reconstruct_r(rho, grid):
    """Radius field from density: ``r^3 = a^3 + 3 int_0^x dxi / rho``."""
    rho = np.asarray(rho, dtype=float)
    if not np.all(rho > 0):
        raise DomainError("density must be strictly positive")
    a = grid.geometry.a
    r = np.cbrt(a**3 + 3.0 * cumulative_trapezoid(1.0 / rho, grid.dx))
    r[0] = a
    return r


def advance_r(r, u, dt):
    """Forward stage of ``r_t = u``."""
    return r + dt * u


def density_from_r(r, grid):
    """Density from the radius field through ``r_x = 1 / (r^2 rho)``."""
    r = np.asarray(r, dtype=float)
    if not np.all(np.diff(r) > 0):
        raise DomainError("radius field is not strictly increasing (mesh tangling)")
    return 1.0 / (r**2 * ddx_central2(r, grid.dx))


def load_profile(path):
    """Read two-column ``(coordinate, value)`` text samples."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, found {data.shape[1]}")
    order = np.argsort(data[:, 0])
    return data[order, 0], data[order, 1]


def resample_density(radius, density, geom, n_samples=None):
    """Resample ``(radius, density)`` pairs onto a uniform grid over ``[a, b]``."""
    n = len(radius) if n_samples is None else n_samples
    uniform = np.linspace(geom.a, geom.b, n)
    return np.interp(uniform, radius, density)
