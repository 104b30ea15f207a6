"""Acceptance checks shared by ``radeuler check`` and the test suite.

Each ``criterion_N`` runs one fixed experiment and returns a
:class:`CriterionResult` whose ``passed`` flag includes the runtime budget.
"""

from dataclasses import dataclass, field
import time

import numpy as np

from .differences import l2_norm, trapezoid
from .diagnostics import build_report, energy_m0, perturbation_residuals
from .eos import GasParams
from .evolution import Model, integrate, make_state, stable_dt, step
from .initial_data import (InitialDataSpec, build, check_compatibility, equilibrium_data, model_for,
                           time_derivatives_at_zero)
from .picard import picard_iterate
from .radiation import EllipticProblem, TridiagonalSystem, assemble, solve_elliptic, thomas


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    runtime: float = 0.0
    budget: float = None

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"[{flag}] {self.number:2d} {self.title}: {parts}; runtime {self.runtime:.2f}s (< {self.budget:g}s)"


def _short(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def _timed(number, title, budget, fn):
    start = time.perf_counter()
    ok, measured = fn()
    runtime = time.perf_counter() - start
    return CriterionResult(number, title, bool(ok) and runtime < budget, measured, runtime, budget)


def _initial_state(spec, n, **model_options):
    data = build(spec, n)
    model = model_for(data, **model_options)
    return data, model, make_state(0.0, data.P, data.u, data.s, data.r, model)


def _pus_distance(a, b, dx, stride=1):
    return float(np.sqrt(sum(l2_norm(getattr(a, f)[::stride] - getattr(b, f), dx) ** 2 for f in "Pus")))


def criterion_1():
    """Equilibrium is a discrete fixed point over 10^4 steps."""
    def body():
        data = equilibrium_data(128)
        model = model_for(data)
        st = make_state(0.0, data.P, data.u, data.s, data.r, model)
        dt = stable_dt(st, model, 0.4)
        for _ in range(10_000):
            st = step(st, dt, model)
        dev = max(np.abs(st.P - 1).max(), np.abs(st.u).max(), np.abs(st.s - 1).max())
        return dev <= 1e-12, {"max_deviation": dev}

    return _timed(1, "equilibrium fixed point", 10.0, body)


def manufactured_errors(ns=(128, 256, 512)):
    """Max-norm errors of the flux solve for ``w = sin(pi x)`` on ``[0, 1]``."""
    errors = []
    for n in ns:
        x = np.linspace(0.0, 1.0, n + 1)
        problem = EllipticProblem(np.ones_like(x), np.ones_like(x), (np.pi**2 + 1.0) * np.sin(np.pi * x))
        w = solve_elliptic(problem, 1.0 / n)
        errors.append(float(np.abs(w - np.sin(np.pi * x)).max()))
    return errors


def criterion_2():
    def body():
        errs = manufactured_errors()
        orders = [float(np.log2(errs[i] / errs[i + 1])) for i in range(len(errs) - 1)]
        rng = np.random.default_rng(7)
        n = 64
        problem = EllipticProblem(rng.uniform(0.5, 2, n + 1), rng.uniform(0.5, 2, n + 1), rng.normal(size=n + 1))
        system = assemble(problem, 1.0 / n)
        w = thomas(system)
        ref = np.linalg.solve(system.to_dense(), system.rhs)
        rel = float(np.abs(w - ref).max() / np.abs(ref).max())
        return min(orders) >= 1.9 and rel <= 1e-12, {"orders": orders, "thomas_vs_dense": rel}

    return _timed(2, "elliptic solver order and oracle", 1.0, body)


def criterion_3():
    def body():
        data, model, st = _initial_state(InitialDataSpec(epsilon=1e-3), 256)
        a, b = model.grid.geometry.a, model.grid.geometry.b
        vol0 = trapezoid(1.0 / st.rho, model.dx)
        worst = {"inner_exact": True, "outer_dev": 0.0, "volume_drift": 0.0}

        def watch(s):
            worst["inner_exact"] &= bool(s.r[0] == a)
            worst["outer_dev"] = max(worst["outer_dev"], abs(s.r[-1] - b) / b)
            worst["volume_drift"] = max(worst["volume_drift"],
                                        abs(trapezoid(1.0 / s.rho, model.dx) - vol0) / vol0)

        _, exc = integrate(st, model, 5.0, on_step=watch)
        ok = (exc is None and worst["inner_exact"] and worst["outer_dev"] <= 1e-8
              and worst["volume_drift"] <= 1e-8)
        return ok, worst

    return _timed(3, "geometry pinning and volume", 30.0, body)


def stability_run(n, eps=1e-3, t_final=10.0, every=0.05):
    data, model, st = _initial_state(InitialDataSpec(epsilon=eps), n)
    states, exc = integrate(st, model, t_final, output_every=every)
    return build_report(states, model), exc


def criterion_4():
    def body():
        rep, exc = stability_run(256)
        rep2, exc2 = stability_run(512)
        n1 = rep.series("norm1_sq")
        growth = float(n1.max() / n1[0])
        cum = float(rep.cumulative_dissipation[-1])
        c0, c0_fine = float(rep.measured_c0()[-1]), float(rep2.measured_c0()[-1])
        spread = abs(c0_fine / c0 - 1.0)
        ok = exc is None and exc2 is None and growth <= 4.0 and np.isfinite(cum) and spread <= 0.2
        return ok, {"norm1_growth": growth, "cum_dissipation": cum, "C0_256": c0,
                    "C0_512": c0_fine, "C0_spread": spread}

    return _timed(4, "a priori boundedness", 60.0, body)


def criterion_5():
    def body():
        data, model, st = _initial_state(InitialDataSpec(epsilon=1e-4), 256)
        E0, D0 = energy_m0(st, model.params, model.dx)
        track = {"min_D0": D0, "max_E_ratio": 1.0}

        def watch(s):
            E, D = energy_m0(s, model.params, model.dx)
            track["min_D0"] = min(track["min_D0"], D)
            track["max_E_ratio"] = max(track["max_E_ratio"], E / E0)

        _, exc = integrate(st, model, 10.0, on_step=watch)
        ok = exc is None and track["min_D0"] >= 0.0 and track["max_E_ratio"] <= 1.1
        return ok, track

    return _timed(5, "energy decay", 60.0, body)


def picard_experiment(n=128, eps=1e-3, T=0.05, k_max=8):
    data, model, st = _initial_state(InitialDataSpec(epsilon=eps), n, integrator="ssprk2")
    dt = stable_dt(st, model, 0.4)
    return picard_iterate(data.P, data.u, data.s, data.r, model, T, k_max=k_max, tol=0.0, dt=dt), dt


def criterion_6():
    def body():
        res, dt = picard_experiment()
        half, _ = picard_experiment(T=0.025)
        gam = [g for _, g in res.ratios[:5]]
        gam_half = [g for _, g in half.ratios[:5]]
        # nonlinear reference and its Richardson estimate at (dx, dt) and (dx/2, dt/2)
        ref = []
        for n, h in ((128, dt), (256, 0.5 * dt)):
            _, model, st = _initial_state(InitialDataSpec(epsilon=1e-3), n)
            states, _ = integrate(st, model, 0.05, dt=h)
            ref.append((states[-1], model.dx))
        richardson = 4.0 / 3.0 * _pus_distance(ref[1][0], ref[0][0], ref[0][1], stride=2)
        it = res.iterates[8]
        last = type("Slice", (), {f: getattr(it, f)[-1] for f in "Pus"})
        gap = _pus_distance(last, ref[0][0], ref[0][1])
        ok = (len(gam) == 5 and all(g < 1 for g in gam) and len(gam_half) == 5
              and all(h < g for g, h in zip(gam, gam_half)) and gap < richardson)
        return ok, {"gamma": gam, "gamma_half_T": gam_half, "iterate8_gap": gap, "richardson": richardson}

    return _timed(6, "Picard contraction", 120.0, body)


def criterion_7():
    def body():
        res = []
        for eps in (1e-3, 5e-4):
            _, model, st = _initial_state(InitialDataSpec(epsilon=eps), 256)
            res.append(perturbation_residuals(st, model.params, model.dx))
        r1 = res[0]["S1"] / res[1]["S1"]
        r4 = res[0]["S4"] / res[1]["S4"]
        return 3.5 <= r1 <= 4.5 and 3.5 <= r4 <= 4.5, {"S1_ratio": r1, "S4_ratio": r4}

    return _timed(7, "quadratic smallness of sources", 10.0, body)


def acoustic_operator(model, r):
    """Dense matrix of the (P, u) system linearized at equilibrium with ``q = 0``."""
    from .eos import equilibrium_constants

    n = model.grid.n_nodes
    c_rho, _ = equilibrium_constants(model.params)
    D = model.ddx(np.eye(n))
    R2 = np.diag(r**2)
    top = -model.params.gamma * c_rho * D @ R2
    bottom = -R2 @ D
    bottom[[0, -1], :] = 0.0
    L = np.zeros((2 * n, 2 * n))
    L[:n, n:] = top
    L[n:, :n] = bottom
    return L


def lowest_frequency_oracle(model, r):
    eig = np.linalg.eigvals(acoustic_operator(model, r))
    freq = np.abs(eig.imag)
    return float(freq[freq > 1e-8].min())


def dominant_frequency(t, signal, pad=64):
    """Angular frequency of the lowest strong spectral peak (Hann window, zero padding)."""
    y = signal - signal.mean()
    y = y * np.hanning(len(y))
    n = pad * len(y)
    spec = np.abs(np.fft.rfft(y, n))
    omega = 2.0 * np.pi * np.fft.rfftfreq(n, d=t[1] - t[0])
    threshold = 0.2 * spec.max()
    for i in range(1, len(spec) - 1):
        if spec[i] >= threshold and spec[i] >= spec[i - 1] and spec[i] >= spec[i + 1]:
            a, b, c = np.log(spec[i - 1:i + 2])
            shift = 0.5 * (a - c) / (a - 2 * b + c)
            return float(omega[i] + shift * (omega[1] - omega[0]))
    return float(omega[np.argmax(spec)])


def criterion_8():
    def body():
        n = 64
        data, model, st = _initial_state(InitialDataSpec(epsilon=1e-4), n, radiation=0.0)
        weight = np.sin(np.pi * model.grid.nodes / model.grid.total_mass)
        s0 = st.s.copy()
        every = 0.02
        states, exc = integrate(st, model, 25.0, output_every=every)
        t = np.array([s.t for s in states])
        sig = np.array([trapezoid(s.u * weight, model.dx) for s in states])
        measured = dominant_frequency(t, sig)
        oracle = lowest_frequency_oracle(model, data.r)
        rel = abs(measured / oracle - 1.0)
        s_drift = float(max(np.abs(s.s - s0).max() for s in states))
        ok = exc is None and rel <= 0.01 and s_drift <= 1e-13
        return ok, {"omega_run": measured, "omega_eig": oracle, "rel_diff": rel, "s_drift": s_drift}

    return _timed(8, "acoustic eigen-oracle", 30.0, body)


def criterion_9():
    def body():
        data, model, st = _initial_state(InitialDataSpec(epsilon=1e-3), 128)
        derivs = time_derivatives_at_zero(data, 1, model)
        base = stable_dt(st, model, 0.4)
        errs = []
        for h in (base / 4, base / 8):
            states, _ = integrate(st, model, h, dt=h)
            end = states[-1]
            errs.append(float(np.sqrt(sum(
                l2_norm((getattr(end, f) - getattr(st, f)) / h - derivs[f][1], model.dx) ** 2
                for f in "Pus"))))
        ratio = errs[0] / errs[1]
        compat = check_compatibility(data, 2, model)
        sine = build(InitialDataSpec(epsilon=1e-3, profile="sine-bump"), 128)
        neg = check_compatibility(sine, 2, model_for(sine))
        ok = ratio >= 1.8 and compat.all_passed and neg.first_failure() == 1
        return ok, {"dt_ratio": ratio, "compact_passes": compat.all_passed,
                    "sine_first_failure": neg.first_failure()}

    return _timed(9, "initial data and compatibility", 20.0, body)


def criterion_10():
    def body():
        spec = InitialDataSpec(epsilon=1e-3, profile="sine-bump", flatness_order=4)
        finals = []
        for n in (64, 128, 256):
            _, model, st = _initial_state(spec, n)
            states, _ = integrate(st, model, 1.0)
            finals.append((states[-1], model.dx))
        d1 = _pus_distance(finals[1][0], finals[0][0], finals[0][1], stride=2)
        d2 = _pus_distance(finals[2][0], finals[1][0], finals[1][1], stride=2)
        return d1 / d2 >= 3.5, {"diff_coarse": d1, "diff_fine": d2, "ratio": d1 / d2}

    return _timed(10, "self-convergence", 60.0, body)


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def run_all(which=None, report=print):
    results = []
    for k in which or sorted(CRITERIA):
        res = CRITERIA[k]()
        if report is not None:
            report(res.line())
        results.append(res)
    return results
