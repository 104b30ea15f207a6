"""Finite-difference and quadrature helpers on a uniform node grid.

All operators act along the last axis so that stacked fields (for example
Taylor coefficients in time) are differentiated in one call.
"""

import numpy as np

CLOSURES = ("sbp", "central2")


def ddx_sbp(f, dx):
    """Central first derivative with first-order one-sided boundary rows.

    This is the classical diagonal-norm summation-by-parts operator paired
    with trapezoid weights: ``sum_H(g * D f) + sum_H(f * D g) = f g |_0^M``.
    """
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    if f.ndim == 1:
        np.subtract(f[2:], f[:-2], out=out[1:-1])
        out[1:-1] *= 0.5 / dx
        out[0] = (f[1] - f[0]) / dx
        out[-1] = (f[-1] - f[-2]) / dx
        return out
    out[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2.0 * dx)
    out[..., 0] = (f[..., 1] - f[..., 0]) / dx
    out[..., -1] = (f[..., -1] - f[..., -2]) / dx
    return out


def ddx_central2(f, dx):
    """Central first derivative with second-order one-sided boundary rows."""
    return np.gradient(np.asarray(f, dtype=float), dx, axis=-1, edge_order=2)


def derivative(closure):
    """Return the first-derivative operator for a boundary closure name."""
    if closure == "sbp":
        return ddx_sbp
    if closure == "central2":
        return ddx_central2
    raise ValueError(f"unknown boundary closure {closure!r}; expected one of {CLOSURES}")


def trapezoid_weights(n_nodes, dx):
    w = np.full(n_nodes, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


def trapezoid(f, dx):
    """Composite trapezoid rule along the last axis."""
    f = np.asarray(f, dtype=float)
    return dx * (f[..., 1:-1].sum(axis=-1) + 0.5 * (f[..., 0] + f[..., -1]))


def cumulative_trapezoid(f, dx):
    """Running trapezoid integral starting from zero at the first node."""
    f = np.asarray(f, dtype=float)
    out = np.zeros_like(f)
    out[..., 1:] = np.cumsum(0.5 * dx * (f[..., 1:] + f[..., :-1]), axis=-1)
    return out


def l2_norm(f, dx):
    """Discrete L2 norm with trapezoid weights."""
    return float(np.sqrt(trapezoid(np.asarray(f) ** 2, dx)))
