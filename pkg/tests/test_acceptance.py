"""Acceptance suite: one test per acceptance criterion, one PASS/FAIL line each.

Run with `pytest -v tests/test_acceptance.py` (or `-s` to see the lines
inline).  Every test prints exactly one `criterion NN [PASS|FAIL]` line and
then asserts, so a failure is visible both in the line and in the pytest
verdict.
"""

import math
import time

import numpy as np
import pytest

from nlslab import (BootstrapBound, CartesianGrid, ModelParams, SweepConfig,
                    ThresholdSet, bootstrap_monitor, classify_plane_point,
                    embed_radial, energy, field_norms, gaussian_with_norms,
                    gn_constant_formula, gn_constant_minimize, make_phi_ab,
                    polish_stationary, run_sweep, solve_shooting,
                    split_step_evolve, sweep_csv, virial_residuals)
from nlslab.evolution import BLOW_UP_DETECTED
from nlslab.ground_state import pohozaev_residuals

DETECTOR_OPTS = {"growth_factor": 1e4, "window": 4}


def report(num, name, ok, detail=""):
    line = f"criterion {num:02d} [{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f": {detail}"
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------

def test_criterion_01_pohozaev_certification():
    worst = 0.0
    slowest = 0.0
    for dim, alpha in ((1, 8.0), (1, 6.0), (2, 3.0), (3, 2.0)):
        t0 = time.perf_counter()
        gs = solve_shooting(ModelParams(dim, alpha, lam=1.0, omega=1.0))
        elapsed = time.perf_counter() - t0
        worst = max(worst, max(pohozaev_residuals(gs)))
        slowest = max(slowest, elapsed)
    ok = worst < 1e-6 and slowest < 10.0
    report(1, "ground-state identity residuals", ok,
           f"max residual {worst:.2e} (tol 1e-6), slowest solve {slowest:.1f}s")


def test_criterion_02_closed_form_oracle(gs18):
    r = gs18.profile.grid.nodes
    alpha = 8.0
    exact = ((alpha + 2) / 2.0) ** (1 / alpha) / np.cosh(alpha * r / 2) ** (2 / alpha)
    sup = float(np.max(np.abs(gs18.profile.values - exact)))
    report(2, "1D shooting matches the sech closed form", sup < 1e-6,
           f"sup error {sup:.2e} (tol 1e-6)")


def test_criterion_03_sharp_constant():
    details = []
    ok = True
    for dim, alpha in ((1, 8.0), (2, 2.0)):
        params = ModelParams(dim, alpha, lam=1.0, omega=1.0)
        t0 = time.perf_counter()
        gs = solve_shooting(params)
        c_min = gn_constant_minimize(params, init=gs)
        elapsed = time.perf_counter() - t0
        c_formula = gn_constant_formula(params, gs.l2)
        rel = abs(c_min - c_formula) / c_formula
        ok = ok and rel < 5e-3 and elapsed < 60.0
        details.append(f"({dim},{alpha:g}): rel {rel:.2e} in {elapsed:.1f}s")
    report(3, "sharp constant, minimizer vs formula (tol 0.5%)", ok,
           "; ".join(details))


def test_criterion_04_threshold_algebra(ts18):
    inv_worst = 0.0
    for a in np.geomspace(0.1, 10.0, 25):
        a = float(a)
        inv_worst = max(
            inv_worst,
            abs(ts18.gamma_star(ts18.gamma_star_inv(a)) - a) / a,
            abs(ts18.r_star(ts18.r_star_inv(a)) - a) / a,
            abs(ts18.rho_star(ts18.rho_star_inv(a)) - a) / a)
    ordering = all(
        ts18.gamma_star(float(a)) < ts18.r_star(float(a)) < ts18.rho_star(float(a))
        for a in np.geomspace(0.05, 20.0, 100))
    ratio_worst = 0.0
    for a in (0.3, 1.0, 3.0):
        r = ts18.r_star(a)
        ratio_worst = max(ratio_worst,
                          abs(ts18.gamma_star(a) / r - 2.0 ** (-1 / 6)),
                          abs(ts18.rho_star(a) / r - 2.0 ** (1 / 6)))
    ok = inv_worst < 1e-12 and ordering and ratio_worst < 1e-12
    report(4, "threshold algebra", ok,
           f"inverse pairs {inv_worst:.2e}, ordering on 100 pts "
           f"{'ok' if ordering else 'BROKEN'}, ratio residual {ratio_worst:.2e}")


def test_criterion_05_critical_limit():
    gamma_diffs, r_diffs = [], []
    for d_alpha in (0.2, 0.1, 0.05):
        alpha = 4.0 + d_alpha
        gs = solve_shooting(ModelParams(1, alpha, lam=1.0, omega=1.0))
        ts = ThresholdSet.from_ground_state(gs)
        limit = gs.l2  # lam^{-1/alpha} ||R_alpha|| at lam = 1
        gamma_diffs.append(abs(ts.gamma_star(1.0) - limit))
        r_diffs.append(abs(ts.r_star(1.0) - limit))
    mono = (all(b < a for a, b in zip(gamma_diffs, gamma_diffs[1:]))
            and all(b < a for a, b in zip(r_diffs, r_diffs[1:])))
    report(5, "critical-limit convergence of gamma* and r*", mono,
           f"gamma* gaps {[f'{d:.3e}' for d in gamma_diffs]}, "
           f"r* gaps {[f'{d:.3e}' for d in r_diffs]}")


def test_criterion_06_conservation():
    params = ModelParams(1, 8.0, lam=1.0, omega=1.0)
    phi = gaussian_with_norms(1.0, 1.0, CartesianGrid(1, 30.0, 2048))
    drifts = {}
    for dt in (1e-4, 5e-5):
        _, series = split_step_evolve(phi, params, t_end=1.0, dt0=dt,
                                      observer_stride=100)
        m = series.column("mass")
        e = series.column("energy")
        drifts[dt] = (float(np.max(np.abs(m - m[0])) / m[0]),
                      float(np.max(np.abs(e - e[0])) / abs(e[0])))
    mass_drift, energy_drift = drifts[1e-4]
    ratio = energy_drift / max(drifts[5e-5][1], 1e-300)
    ok = mass_drift < 1e-12 and energy_drift < 1e-6 and 3.0 < ratio < 5.0
    report(6, "mass/energy conservation over unit time", ok,
           f"mass {mass_drift:.2e} (tol 1e-12), energy {energy_drift:.2e} "
           f"(tol 1e-6), halving-dt shrink x{ratio:.2f} (want ~4)")


def test_criterion_07_virial_identity():
    params = ModelParams(1, 8.0, lam=1.0, omega=1.0)
    phi = gaussian_with_norms(1.0, 1.0, CartesianGrid(1, 30.0, 2048))
    residuals = []
    for dt in (1e-3, 5e-4):
        _, series = split_step_evolve(phi, params, t_end=0.2, dt0=dt,
                                      observer_stride=10)
        r8q, _ = virial_residuals(series)
        residuals.append(float(np.max(r8q)))
    ok = residuals[0] < 1e-3 and residuals[1] < residuals[0]
    report(7, "virial identity h'' = 8Q on a Gaussian run", ok,
           f"residual {residuals[0]:.2e} at dt=1e-3 (tol 1e-3), "
           f"{residuals[1]:.2e} at dt=5e-4")


def test_criterion_08_global_dynamics_below_threshold(ts18):
    params = ModelParams(1, 8.0, lam=1.0, omega=1.0)
    b = 1.0
    a = 0.9 * ts18.gamma_star(b)
    phi = gaussian_with_norms(a, b, CartesianGrid(1, 250.0, 8192))
    bound = BootstrapBound.from_datum(a ** 2, b ** 2, params, ts18.C_star,
                                      threshold_set=ts18)
    t0 = time.perf_counter()
    out, series = split_step_evolve(phi, params, t_end=10.0, dt0=1e-3,
                                    observer_stride=20)
    elapsed = time.perf_counter() - t0
    g_max = float(np.max(series.column("grad_sq")))
    barrier = ts18.r_star_inv(a) ** 2
    monitor = bootstrap_monitor(series, bound)
    ok = (g_max < barrier and monitor.passed and monitor.margin > 0
          and elapsed < 300.0)
    report(8, "sub-threshold datum stays below the gradient barrier", ok,
           f"max grad_sq {g_max:.4f} < barrier {barrier:.4f}, monitor margin "
           f"{monitor.margin:.3f}, status {out.status}, {elapsed:.0f}s")


def test_criterion_09_blow_up_family(ts18, gs18):
    a = gs18.l2  # construction frequency is exactly 1 at this mass
    grid = CartesianGrid(1, 20.0, 16384)
    details = []
    ok = True
    for beta in (1.2, 1.5, 2.0):
        b = beta * ts18.r_star_inv(a)
        cert = make_phi_ab(a, b, ts18, gs18, grid=grid)
        out, series = split_step_evolve(cert.field, ts18.params, t_end=1.0,
                                        dt0=1e-3, observer_stride=5,
                                        detector_opts=DETECTOR_OPTS,
                                        max_steps=200_000)
        fired = out.status == BLOW_UP_DETECTED
        # h'' = 8Q stays below the certified negative bound 8(S - m)
        h2_bound = 8.0 * (cert.s_value - cert.m_value) + 1e-6
        q_max = float(np.max(series.column("q")))
        concave = 8.0 * q_max <= h2_bound and h2_bound < 0
        # E-sign at construction matches the a vs rho*(b) classification
        lab = classify_plane_point(ts18, a, b)
        rho = ts18.rho_star(b)
        if abs(a - rho) <= 1e-8 * rho:
            sign_ok = abs(cert.e_value) < 1e-8 * cert.grad_sq
        else:
            sign_ok = (cert.e_value > 0) == (a < rho) \
                and lab.e_sign == ("positive" if cert.e_value > 0 else "negative")
        ok = ok and fired and concave and sign_ok
        details.append(
            f"beta={beta:g}: {'fired' if fired else 'NO-FIRE'} "
            f"T*~{out.blow_up_time_estimate if out.blow_up_time_estimate else float('nan'):.3f}, "
            f"8Q_max {8 * q_max:.3f} <= {h2_bound:.3f}, E {cert.e_value:+.3f} "
            f"({'ok' if sign_ok else 'SIGN-MISMATCH'})")
    report(9, "explicit blow-up family detonates with certified concavity", ok,
           "; ".join(details))


def test_criterion_10_negative_energy_and_soliton(gs18):
    params = ModelParams(1, 8.0, lam=1.0, omega=1.0)
    phi = gaussian_with_norms(1.5, 2.0, CartesianGrid(1, 20.0, 8192))
    e0 = energy(field_norms(phi, exponents=(10.0,)), params)
    out_neg, _ = split_step_evolve(phi, params, t_end=1.0, dt0=1e-3,
                                   observer_stride=5,
                                   detector_opts=DETECTOR_OPTS,
                                   max_steps=200_000)
    fired = e0 < 0 and out_neg.status == BLOW_UP_DETECTED

    grid = CartesianGrid(1, 40.0, 2048)
    soliton = polish_stationary(embed_radial(gs18.profile, grid), params)
    out_sol, _ = split_step_evolve(soliton, params, t_end=5.0, dt0=1e-3,
                                   observer_stride=10,
                                   detector_opts=DETECTOR_OPTS)
    never = out_sol.status != BLOW_UP_DETECTED
    ok = fired and never
    report(10, "negative energy detonates, the soliton never does", ok,
           f"E={e0:.3f} run {out_neg.status}; soliton run {out_sol.status}")


SWEEP_33 = """
dim = 1
alpha = 8.0
a_min = 1.0
a_max = 1.5
a_count = 3
b_min = 1.1
b_max = 1.4
b_count = 3
t_end = 1.0
dt0 = 1e-3
half_width = 45.0
points_per_axis = 8192
growth_factor = 1e3
window = 4
max_steps = 100000
reproducible = true
"""


def test_criterion_11_sweep_reproducibility(tmp_path):
    cfg_path = tmp_path / "sweep.cfg"
    cfg_path.write_text(SWEEP_33)
    texts = []
    for par in (1, 4):
        cfg = SweepConfig.from_file(
            cfg_path, {"parallelism": par, "cache_dir": str(tmp_path / "cache")})
        texts.append(sweep_csv(run_sweep(cfg)))
    identical = texts[0] == texts[1]
    n_rows = len(texts[0].strip().split("\n")) - 1
    report(11, "3x3 sweep CSV byte-identical across parallelism", identical,
           f"{n_rows} rows, parallelism 1 vs 4 "
           f"{'identical' if identical else 'DIFFER'}")
