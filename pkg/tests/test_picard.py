import numpy as np
import pytest
from scipy.linalg import expm

from radeuler.evolution import integrate, make_state, stable_dt
from radeuler.initial_data import InitialDataSpec, build, equilibrium_data, model_for
from radeuler.picard import (FrozenFieldError, FrozenFields, Iterate, linear_sweep, picard_iterate,
                             ratios_from_deltas, solve_linearized, time_slices, trapezoid_in_time)


def test_time_slices():
    t = time_slices(1.0, 0.3)
    assert len(t) == 5 and t[-1] == 1.0
    assert np.all(np.diff(t) <= 0.3)
    with pytest.raises(ValueError):
        time_slices(0.0, 0.1)


def test_trapezoid_in_time_exact_for_linear():
    t = np.linspace(0, 2, 9)
    f = np.outer(3 * t, np.ones(4))
    assert np.allclose(trapezoid_in_time(f, t)[:, 0], 1.5 * t**2)


def test_ratios_skip_tiny_denominators():
    assert ratios_from_deltas([1.0, 0.5, 0.0, 0.0]) == [(1, 0.5), (2, 0.0)]
    assert ratios_from_deltas([1e-15, 1e-16]) == []


def test_equilibrium_is_fixed_point():
    data = equilibrium_data(32)
    model = model_for(data)
    res = picard_iterate(data.P, data.u, data.s, data.r, model, 0.05, k_max=3, tol=0.0)
    assert max(res.deltas) <= 1e-13
    assert res.ratios == []
    assert res.status == "converged"


def test_equilibrium_converges_with_tolerance():
    data = equilibrium_data(32)
    res = picard_iterate(data.P, data.u, data.s, data.r, model_for(data), 0.05, k_max=5)
    assert res.converged and len(res.deltas) == 1


def _dense(op, n):
    return np.column_stack([op(e) for e in np.eye(n)])


def _acoustic_matrix(data, model):
    """Dense generator of the (P, u) system frozen at the data held constant."""
    n = len(data.P)
    D = _dense(model.ddx, n)
    st = make_state(0.0, data.P, data.u, data.s, data.r, model)
    r2 = np.diag(data.r**2)
    L = np.zeros((2 * n, 2 * n))
    L[:n, n:] = -model.params.gamma * np.diag(data.P * st.rho) @ D @ r2
    L[n:, :n] = -r2 @ D
    L[n, :] = L[-1, :] = 0.0
    return L


def test_linear_solve_against_matrix_oracle():
    n, T = 64, 0.05
    data = equilibrium_data(n)
    model = model_for(data)
    xi = data.grid.nodes / data.grid.total_mass
    phi = np.sin(np.pi * xi) ** 4
    P0 = data.P + 1e-3 * phi
    st = make_state(0.0, data.P, data.u, data.s, data.r, model)
    t = time_slices(T, stable_dt(st, model, 0.4))
    frozen = FrozenFields.constant(data.P, data.u, data.s, data.r, t, model)
    it = solve_linearized(frozen, P0, data.u, data.s)
    L = _acoustic_matrix(data, model)
    z0 = np.concatenate([P0 - 1.0, data.u])
    n = len(P0)
    dt = t[1] - t[0]
    heun = np.linalg.matrix_power(np.eye(2 * n) + dt * L + 0.5 * (dt * L) @ (dt * L), len(t) - 1)
    z_heun = heun @ z0
    z_exact = expm(T * L) @ z0
    got = np.concatenate([it.P[-1] - 1.0, it.u[-1]])
    assert np.abs(got - z_heun).max() <= 1e-12
    assert np.abs(got - z_exact).max() <= 1e-6
    assert np.all(it.s == 1.0) and np.all(it.q == 0.0)


def test_zero_perturbation_gives_equilibrium():
    data = equilibrium_data(32)
    model = model_for(data)
    t = time_slices(0.02, 1e-3)
    frozen = FrozenFields.constant(data.P, data.u, data.s, data.r, t, model)
    it = solve_linearized(frozen, data.P, data.u, data.s)
    assert np.all(it.P == 1.0) and np.all(it.u == 0.0) and np.all(it.s == 1.0)


def test_sweep_is_linear(rng):
    data = build(InitialDataSpec(epsilon=1e-2), 48)
    model = model_for(data)
    t = time_slices(0.02, 1e-3)
    frozen = FrozenFields.constant(data.P, data.u, data.s, data.r, t, model)
    n = len(data.P)
    dP, du, ds = rng.normal(size=(3, n)) * 1e-3
    du[[0, -1]] = 0.0
    w = rng.normal(size=(len(t), n)) * 1e-3
    w[:, [0, -1]] = 0.0
    Pe, se = 1.3, 0.7
    base = linear_sweep(frozen, np.full(n, Pe), np.zeros(n), np.full(n, se), np.zeros_like(w))
    one = linear_sweep(frozen, Pe + dP, du, se + ds, w)
    two = linear_sweep(frozen, Pe + 2 * dP, 2 * du, se + 2 * ds, 2 * w)
    for b, x1, x2 in zip(base, one, two):
        assert np.allclose(x2 - b, 2 * (x1 - b), rtol=1e-9, atol=1e-15)


def _nonlinear_slices(data, model, T, steps):
    st = make_state(0.0, data.P, data.u, data.s, data.r, model)
    rec = [st]
    integrate(st, model, T, dt=T / steps, on_step=rec.append)
    assert len(rec) == steps + 1
    return rec


def _fixed_point_gap(steps):
    data = build(InitialDataSpec(epsilon=1e-2), 48)
    model = model_for(data)
    T = 0.05
    rec = _nonlinear_slices(data, model, T, steps)
    t = np.linspace(0, T, steps + 1)
    frozen = FrozenFields(t, *(np.array([getattr(s, f) for s in rec]) for f in "Pus"), data.r, model)
    it = solve_linearized(frozen, data.P, data.u, data.s)
    exact = Iterate(t, *(np.array([getattr(s, f) for s in rec]) for f in ("P", "u", "s", "q")))
    return it.difference(exact, model.dx)


def test_nonlinear_solution_is_fixed_point_up_to_time_error():
    coarse, fine = _fixed_point_gap(40), _fixed_point_gap(80)
    assert fine < 1e-6
    assert coarse / fine >= 3.0


def test_contraction_and_shorter_horizon():
    data = build(InitialDataSpec(epsilon=1e-3), 64)
    model = model_for(data, integrator="ssprk2")
    st = make_state(0.0, data.P, data.u, data.s, data.r, model)
    dt = stable_dt(st, model, 0.4)
    full = picard_iterate(data.P, data.u, data.s, data.r, model, 0.05, k_max=5, tol=0.0, dt=dt)
    half = picard_iterate(data.P, data.u, data.s, data.r, model, 0.025, k_max=5, tol=0.0, dt=dt)
    g = [r for _, r in full.ratios]
    gh = [r for _, r in half.ratios]
    assert len(g) == 4 and all(x < 1 for x in g)
    assert all(b < a for a, b in zip(g, gh))
    assert len(full.iterates) == 6 and len(full.wall_times) == 5


def test_frozen_fields_reject_bad_input():
    data = equilibrium_data(16)
    model = model_for(data)
    t = np.linspace(0, 0.01, 3)
    P = np.tile(data.P, (3, 1))
    P[1, 4] = -1.0
    with pytest.raises(FrozenFieldError) as info:
        FrozenFields(t, P, np.zeros_like(P), np.ones_like(P), data.r, model)
    assert info.value.slice_index == 1
    u = np.ones_like(P)
    with pytest.raises(FrozenFieldError):
        FrozenFields(t, np.ones_like(P), u, np.ones_like(P), data.r, model)


def test_nonzero_boundary_velocity_rejected():
    data = equilibrium_data(16)
    model = model_for(data)
    frozen = FrozenFields.constant(data.P, data.u, data.s, data.r, np.linspace(0, 0.01, 3), model)
    u0 = np.zeros_like(data.u)
    u0[0] = 1e-3
    with pytest.raises(ValueError):
        solve_linearized(frozen, data.P, u0, data.s)


def test_failure_returns_partial_sequence():
    # over a long horizon the frozen radius of a large-amplitude start folds over
    data = build(InitialDataSpec(epsilon=0.9), 32)
    model = model_for(data)
    res = picard_iterate(data.P, data.u, data.s, data.r, model, 3.0, k_max=6, tol=0.0)
    assert res.status == "failed"
    assert "iterate" in res.failure
    assert len(res.iterates) >= 1
    assert len(res.deltas) == len(res.iterates) - 1
