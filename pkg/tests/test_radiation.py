import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from radeuler.acceptance import manufactured_errors
from radeuler.differences import ddx_central2, l2_norm
from radeuler.eos import DomainError
from radeuler.radiation import (EllipticProblem, EllipticSolveError, TridiagonalSystem, apply_operator,
                                assemble, solve_elliptic, solve_radiative_flux, thomas)

from conftest import state_for
from radeuler.initial_data import InitialDataSpec


def random_problem(rng, n):
    return EllipticProblem(rng.uniform(0.1, 3, n + 1), rng.uniform(0.1, 3, n + 1), rng.normal(size=n + 1))


def test_unit_coefficients_stencil():
    n = 4
    dx = 1.0 / n
    system = assemble(EllipticProblem(np.ones(n + 1), np.ones(n + 1), np.zeros(n + 1)), dx)
    assert np.allclose(system.diag, 1 + 2 / dx**2)
    assert np.allclose(system.lower, -1 / dx**2)
    assert np.allclose(system.upper, -1 / dx**2)


def test_assembled_matrix_symmetric(rng):
    A = assemble(random_problem(rng, 30), 0.1).to_dense()
    assert np.array_equal(A, A.T)
    assert np.all(np.linalg.eigvalsh(A) > 0)


def test_thomas_matches_banded_oracle(rng):
    system = assemble(random_problem(rng, 64), 1 / 64)
    ab = np.zeros((3, system.diag.size))
    ab[0, 1:] = system.upper
    ab[1] = system.diag
    ab[2, :-1] = system.lower
    ref = scipy.linalg.solve_banded((1, 1), ab, system.rhs)
    assert np.abs(thomas(system) - ref).max() <= 1e-12 * np.abs(ref).max()


def test_non_positive_pivot_reported():
    system = TridiagonalSystem(np.array([1.0]), np.array([1.0, -2.0]), np.array([1.0]), np.ones(2))
    with pytest.raises(EllipticSolveError, match="row"):
        thomas(system)


@pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
def test_coefficients_must_be_positive(bad):
    alpha = np.ones(9)
    alpha[4] = bad
    with pytest.raises(DomainError, match="node 4"):
        EllipticProblem(alpha, np.ones(9), np.zeros(9))


def test_manufactured_second_order():
    errs = manufactured_errors((128, 256, 512))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


def test_apply_operator_inverts_solve(rng):
    p = random_problem(rng, 40)
    w = solve_elliptic(p, 0.05)
    assert w[0] == w[-1] == 0
    assert np.allclose(apply_operator(p.alpha, p.beta, w, 0.05)[1:-1], p.rhs[1:-1], atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), sign=st.sampled_from([-1.0, 1.0]))
def test_maximum_principle(seed, sign):
    rng = np.random.default_rng(seed)
    n = 50
    g = sign * rng.uniform(0, 1, n + 1)
    p = EllipticProblem(rng.uniform(0.1, 3, n + 1), rng.uniform(0.1, 3, n + 1), g)
    w = solve_elliptic(p, 1 / n)
    assert np.all(sign * w >= 0)


def test_constant_state_gives_zero_flux(equilibrium_state):
    _, model, st = equilibrium_state
    q = solve_radiative_flux(st.P, st.s, st.rho, st.theta, st.r, model.grid, model.params)
    assert np.all(q == 0.0)


def test_flux_boundary_and_residual(bump_state):
    _, model, st = bump_state
    q = solve_radiative_flux(st.P, st.s, st.rho, st.theta, st.r, model.grid, model.params)
    assert q[0] == q[-1] == 0.0
    assert np.abs(q).max() > 0


def test_flux_linear_in_amplitude():
    qs = []
    for eps in (1e-3, 5e-4):
        _, _, st = state_for(InitialDataSpec(epsilon=eps, profile="sine-bump"), 128)
        qs.append(np.abs(st.q).max())
    assert qs[0] / qs[1] == pytest.approx(2.0, rel=0.01)


def test_tangled_radius_rejected(bump_state):
    _, model, st = bump_state
    r = st.r.copy()
    r[5] = r[7]
    with pytest.raises(DomainError):
        solve_radiative_flux(st.P, st.s, st.rho, st.theta, r, model.grid, model.params)


def _energy_constant(n):
    worst = 0.0
    for seed in range(4):
        w3 = tuple(np.random.default_rng(seed).uniform(-1, 1, 3))
        _, model, st = state_for(InitialDataSpec(epsilon=1e-3, weights=w3), n)
        dx = model.dx
        lhs = l2_norm(st.q, dx) ** 2 + l2_norm(ddx_central2(st.r**2 * st.q, dx), dx) ** 2
        rhs = l2_norm(ddx_central2(st.P, dx), dx) ** 2 + l2_norm(ddx_central2(st.s, dx), dx) ** 2
        worst = max(worst, lhs / rhs)
    return worst


def test_elliptic_energy_constant_stable_under_refinement():
    c1, c2 = _energy_constant(64), _energy_constant(128)
    assert np.isfinite(c1) and np.isfinite(c2)
    assert c2 == pytest.approx(c1, rel=0.1)


@pytest.mark.parametrize("n", [16, 128])
def test_fused_sbp_path_matches_general_solve(n):
    from radeuler.radiation import flux_potential_sbp, flux_problem

    _, model, st = state_for(InitialDataSpec(epsilon=1e-2), n)
    general = solve_elliptic(flux_problem(st.P, st.s, st.rho, st.theta, st.r, model.params.cv, model.dx),
                             model.dx)
    fused = flux_potential_sbp(st.P, st.s, st.rho, st.theta, st.r, model.params.cv, model.dx)
    assert np.abs(fused - general).max() <= 1e-12 * np.abs(general).max()
    assert fused[0] == fused[-1] == 0.0
