"""Polytropic ideal gas relations in the (P, s) variables.

The specific gas constant and the radiation constants are fixed to one,
so ``P = rho * theta`` and only ``cv`` and ``A`` remain free.
"""

from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a relation."""


@dataclass(frozen=True)
class GasParams:
    """Thermodynamic constants of a polytropic gas.

    Parameters
    ----------
    cv : float
        Specific heat at constant volume.
    A : float
        Gas constant in ``P = A rho^((cv+1)/cv) exp(s/cv)``.
    """

    cv: float = 1.5
    A: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.cv) and self.cv > 0):
            raise DomainError(f"cv must be positive, got {self.cv}")
        if not (np.isfinite(self.A) and self.A > 0):
            raise DomainError(f"A must be positive, got {self.A}")

    @property
    def gamma(self):
        """Ratio ``(cv + 1) / cv`` multiplying ``P div u``."""
        return (self.cv + 1.0) / self.cv


def _check_pressure(P):
    P = np.asarray(P, dtype=float)
    if not np.all(P > 0):
        raise DomainError("pressure must be strictly positive")
    return P


def rho_from_P_s(P, s, params):
    """Density from pressure and specific entropy.

    Parameters
    ----------
    P : float or ndarray
        Pressure, strictly positive.
    s : float or ndarray
        Specific entropy (any sign).
    params : GasParams

    Returns
    -------
    ndarray or float
        ``(P / A)^(cv/(cv+1)) exp(-s/(cv+1))``, the inverse of
        ``P = A rho^((cv+1)/cv) exp(s/cv)``.
    """
    P = _check_pressure(P)
    cv = params.cv
    k = cv / (cv + 1.0)
    out = (P / params.A) ** k * np.exp(-np.asarray(s, dtype=float) / (cv + 1.0))
    return out if out.ndim else float(out)


def theta_from_P_s(P, s, params):
    """Temperature from pressure and specific entropy.

    Evaluated as ``A rho^(1/cv) exp(s/cv)`` with ``rho`` from
    :func:`rho_from_P_s`; this agrees with ``P / rho`` to rounding.
    """
    rho = np.asarray(rho_from_P_s(P, s, params))
    cv = params.cv
    out = params.A * rho ** (1.0 / cv) * np.exp(np.asarray(s, dtype=float) / cv)
    return out if out.ndim else float(out)


def entropy_from_rho_theta(rho, theta, params):
    """Inverse map: specific entropy from density and temperature."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if not (np.all(rho > 0) and np.all(theta > 0)):
        raise DomainError("density and temperature must be strictly positive")
    cv = params.cv
    out = cv * np.log(theta / (params.A * rho ** (1.0 / cv)))
    return out if out.ndim else float(out)


def equilibrium_constants(params):
    """Density and temperature ``(c_rho, c_theta)`` at ``(P, s) = (1, 1)``."""
    return rho_from_P_s(1.0, 1.0, params), theta_from_P_s(1.0, 1.0, params)
