import numpy as np
import pytest

from radeuler.diagnostics import norm_record
from radeuler.differences import ddx_sbp, l2_norm
from radeuler.evolution import integrate, make_state, rhs_nonlinear, stable_dt
from radeuler.initial_data import (InitialDataSpec, UnsupportedOrderError, build, check_compatibility,
                                   compact_bump, equilibrium_data, model_for, sine_bump,
                                   time_derivatives_at_zero)


def test_zero_amplitude_is_equilibrium():
    data = build(InitialDataSpec(epsilon=0.0), 32)
    assert np.all(data.P == 1) and np.all(data.u == 0) and np.all(data.s == 1)
    assert data.h2_norm == 0.0
    assert data.r[0] == 1.0 and data.r[-1] == 2.0
    assert data.grid.total_mass == pytest.approx(np.exp(-0.4) * 7 / 3, rel=1e-14)


def test_reported_norm_linear_in_amplitude():
    a = build(InitialDataSpec(epsilon=1e-3, profile="sine-bump"), 128)
    b = build(InitialDataSpec(epsilon=5e-4, profile="sine-bump"), 128)
    assert a.h2_norm / b.h2_norm == pytest.approx(2.0, abs=1e-6)


def test_compact_bump_flat_at_boundary():
    data = build(InitialDataSpec(epsilon=1e-3), 128)
    for f in (data.P, data.s):
        d = ddx_sbp(f, data.grid.dx)
        assert abs(d[0]) <= 1e-12 and abs(d[-1]) <= 1e-12
    assert data.u[0] == data.u[-1] == 0.0


def test_profiles():
    xi = np.linspace(0, 1, 101)
    phi = compact_bump(xi)
    assert phi.max() == pytest.approx(1.0)
    assert np.all(phi[xi <= 0.15] == 0) and np.all(phi[xi >= 0.85] == 0)
    assert sine_bump(0.5, 3) == pytest.approx(1.0)


def test_radius_matches_reconstruction():
    from radeuler.geometry import reconstruct_r

    errs = []
    for n in (64, 128):
        data = build(InitialDataSpec(epsilon=1e-2), n)
        rho = make_state(0.0, data.P, data.u, data.s, data.r, model_for(data)).rho
        errs.append(np.abs(reconstruct_r(rho, data.grid) - data.r).max())
    assert errs[1] < 1e-5
    assert errs[0] / errs[1] >= 3.5


@pytest.mark.parametrize("bad", [
    dict(epsilon=-1.0), dict(profile="gaussian"), dict(flatness_order=0), dict(center=0.1, half_width=0.2),
])
def test_invalid_spec(bad):
    with pytest.raises(ValueError):
        InitialDataSpec(**bad)


def test_custom_length_mismatch():
    spec = InitialDataSpec(profile="custom", custom={"P": np.zeros(10)})
    with pytest.raises(ValueError, match="length"):
        build(spec, 32)


def test_custom_profile_matches_named_one():
    xi = np.linspace(0, 1, 65)
    phi = compact_bump(xi)
    custom = build(InitialDataSpec(epsilon=1e-3, profile="custom", custom={"P": phi, "u": phi, "s": phi}), 64)
    named = build(InitialDataSpec(epsilon=1e-3), 64)
    assert np.abs(custom.P - named.P).max() < 1e-5


def test_equilibrium_derivatives_vanish():
    data = equilibrium_data(32)
    d = time_derivatives_at_zero(data, 2, model_for(data))
    for name in ("u", "q"):
        for f in d[name]:
            assert np.all(f == 0)
    for f in d["P"][1:] + d["s"][1:]:
        assert np.all(f == 0)


def test_first_derivatives_equal_rhs(bump_state):
    data, model, st = bump_state
    d = time_derivatives_at_zero(data, 1, model)
    k = rhs_nonlinear(st, model)
    for name in ("P", "u", "s"):
        assert np.allclose(d[name][1], getattr(k, name), rtol=1e-12, atol=1e-18)
    assert np.allclose(d["q"][0], st.q, atol=1e-18)


def test_unsupported_order(bump_state):
    data, model, _ = bump_state
    with pytest.raises(UnsupportedOrderError):
        time_derivatives_at_zero(data, 3, model)


def _fd_error(data, model, st, h, order):
    d = time_derivatives_at_zero(data, 2, model)
    states, _ = integrate(st, model, h, dt=h)
    end = states[-1]
    total = 0.0
    for name in ("P", "u", "s"):
        approx = (getattr(end, name) - getattr(st, name)) / h
        if order == 2:
            approx = 2 * (approx - d[name][1]) / h
        total += l2_norm(approx - d[name][order], model.dx) ** 2
    return np.sqrt(total)


@pytest.mark.parametrize("order", [1, 2])
def test_derivatives_against_small_step_runs(order):
    data = build(InitialDataSpec(epsilon=1e-3), 64)
    model = model_for(data)
    st = make_state(0.0, data.P, data.u, data.s, data.r, model)
    h = stable_dt(st, model, 0.4) / 4
    e1, e2 = _fd_error(data, model, st, h, order), _fd_error(data, model, st, h / 2, order)
    assert e1 / e2 >= 1.8


def test_flux_time_derivative_against_finite_difference(bump_state):
    data, model, st = bump_state
    d = time_derivatives_at_zero(data, 2, model)
    h = stable_dt(st, model, 0.4) / 16
    fwd = integrate(st, model, h, dt=h)[0][-1]
    assert np.abs((fwd.q - st.q) / h - d["q"][1]).max() <= 0.05 * np.abs(d["q"][1]).max()


def test_derivative_fields_linear_in_amplitude():
    fields = []
    for eps in (1e-3, 5e-4):
        data = build(InitialDataSpec(epsilon=eps), 64)
        fields.append(time_derivatives_at_zero(data, 2, model_for(data)))
    for name in ("P", "u", "s", "q"):
        for k in (1, 2):
            ratio = np.abs(fields[0][name][k]).max() / np.abs(fields[1][name][k]).max()
            assert ratio == pytest.approx(2.0, rel=0.05)


def test_compatibility_compact_bump_passes():
    data = build(InitialDataSpec(epsilon=1e-3), 128)
    report = check_compatibility(data, 2, model_for(data))
    assert report.all_passed and report.first_failure() is None
    assert report.threshold == pytest.approx(1e-13)


def test_compatibility_sine_bump_fails_at_first_order():
    data = build(InitialDataSpec(epsilon=1e-3, profile="sine-bump"), 128)
    report = check_compatibility(data, 2, model_for(data))
    assert report.passed(0)
    assert report.first_failure() == 1


def test_compatibility_equilibrium():
    data = equilibrium_data(32)
    assert check_compatibility(data, 2, model_for(data)).all_passed


def test_initial_norm_bound_stable_under_refinement():
    consts = []
    for n in (128, 256):
        data = build(InitialDataSpec(epsilon=1e-3), n)
        model = model_for(data)
        rec = norm_record(make_state(0.0, data.P, data.u, data.s, data.r, model), model)
        consts.append(np.sqrt(rec.norm2_sq) / data.h2_norm_mass)
    assert np.all(np.isfinite(consts))
    assert consts[1] == pytest.approx(consts[0], rel=0.15)
