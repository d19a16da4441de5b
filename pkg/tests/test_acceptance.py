"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line with its wall-clock time so the whole
gate can be read off the terminal at a glance.
"""

import itertools
import math
import os
import time

import numpy as np
import pytest
from scipy import stats

import gicselect as G
from gicselect.families import GAUSSIAN
from gicselect.penalties import (
    PenaltySpec,
    penalty_derivative,
    penalty_value,
    scalar_threshold_update,
)


def _report(capsys, num, label, ok, elapsed, detail=""):
    tail = f" — {detail}" if detail else ""
    with capsys.disabled():
        print(f"\n[acceptance {num}] {'PASS' if ok else 'FAIL'} "
              f"({elapsed:.1f}s) {label}{tail}")


def test_acceptance_1_gic_dominates_proxy(capsys):
    """GIC >= GIC* at every path entry, 50 datasets, SCAD and Lasso."""
    t0 = time.time()
    rng = np.random.default_rng(1)
    n, p = 100, 200
    a_list = [2.0, math.log(n), math.log(math.log(n)) * math.log(p)]
    worst = math.inf
    for i in range(50):
        x = rng.standard_normal((n, p))
        if i % 2 == 0:
            fam = G.Family("gaussian", phi=1.0)
            y = x[:, 0] * 1.5 - x[:, 3] + rng.standard_normal(n)
        else:
            fam = G.Family("binomial")
            eta = x[:, 0] * 1.5 - x[:, 3]
            y = (rng.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
        ds = G.standardize(x, y)
        for penalty in ("scad", "lasso"):
            path = G.fit_path(fam, ds, PenaltySpec(penalty), grid_count=60)
            stars = {}
            for fit in path.fits:
                if fit.support not in stars:
                    try:
                        stars[fit.support] = G.restricted_mle(
                            fam, ds, fit.support).deviance
                    except G.diagnostics.SeparationError:
                        # proxy undefined: the restricted MLE does not exist
                        stars[fit.support] = None
                star_dev = stars[fit.support]
                if star_dev is None:
                    continue
                for a_n in a_list:
                    gic = (fit.deviance + a_n * len(fit.support)) / n
                    star = (star_dev + a_n * len(fit.support)) / n
                    worst = min(worst, gic - star)
    elapsed = time.time() - t0
    ok = worst >= -1e-8 and elapsed < 120
    _report(capsys, 1, "GIC >= GIC* - 1e-8 on 50 datasets x {SCAD,Lasso}",
            ok, elapsed, f"worst gap {worst:.2e}")
    assert worst >= -1e-8
    assert elapsed < 120


def test_acceptance_2_solver_oracles(capsys):
    """Orthogonal-design soft-threshold path; lam=0 vs Newton refits."""
    t0 = time.time()
    rng = np.random.default_rng(2)
    n, p = 60, 10
    q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    x = q * np.sqrt(n)
    y = x @ np.r_[2.0, -1.0, 0.5, np.zeros(7)] + 0.3 * rng.standard_normal(n)
    ds = G.Dataset(x=x, y=y, column_scales=np.ones(p), zero_columns=())
    fam = G.Family("gaussian", phi=1.0)
    path = G.fit_path(fam, ds, PenaltySpec("lasso"), grid_count=50)
    z = x.T @ y / n
    max_err = 0.0
    for lam, fit in zip(path.lambdas, path.fits):
        closed = np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)
        max_err = max(max_err, float(np.max(np.abs(fit.beta - closed))))

    for kind in ("gaussian", "binomial", "poisson"):
        fam_k = G.Family(kind, phi=2.0 if kind == "gaussian" else 1.0)
        xk = rng.standard_normal((50, 4))
        eta = xk @ np.array([0.5, -0.3, 0.2, 0.0])
        if kind == "gaussian":
            yk = eta + rng.standard_normal(50)
        elif kind == "binomial":
            yk = (rng.random(50) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
        else:
            yk = rng.poisson(np.exp(eta)).astype(float)
        dsk = G.standardize(xk, yk)
        fit0 = G.fit_penalized(fam_k, dsk, PenaltySpec("lasso"), 0.0)
        newton = G.restricted_mle(fam_k, dsk, (0, 1, 2, 3))
        max_err = max(max_err, float(np.max(np.abs(fit0.beta - newton.beta))))

    elapsed = time.time() - t0
    ok = max_err <= 1e-6 and elapsed < 60
    _report(capsys, 2, "solver matches closed-form/Newton oracles", ok,
            elapsed, f"max coordinate error {max_err:.2e}")
    assert max_err <= 1e-6
    assert elapsed < 60


def test_acceptance_3_gaussian_identity(capsys):
    """D(a) - D(a0) = -Z_a on 100 random nested instances."""
    t0 = time.time()
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        n = 50
        p = int(rng.integers(6, 10))
        x = rng.standard_normal((n, p))
        beta0 = np.zeros(p)
        beta0[[0, 1]] = rng.standard_normal(2) * 2.0 + np.array([2.0, -2.0])
        fam = G.Family("gaussian", phi=1.0)
        ctx = G.make_context(fam, x, beta0)
        y = x @ beta0 + rng.standard_normal(n)
        ds = G.Dataset(x=x, y=y, column_scales=np.ones(p), zero_columns=())
        extra = int(rng.integers(0, 5))
        alpha = tuple(sorted({0, 1} | set(
            rng.choice(np.arange(2, p), size=extra, replace=False).tolist())))
        lhs, rhs, gap = G.verify_gaussian_deviance_identity(ds, ctx, alpha)
        worst = max(worst, gap)
    elapsed = time.time() - t0
    ok = worst <= 1e-7 and elapsed < 30
    _report(capsys, 3, "Gaussian deviance identity on 100 nested instances",
            ok, elapsed, f"max gap {worst:.2e}")
    assert worst <= 1e-7
    assert elapsed < 30


def test_acceptance_4_chi_square(capsys):
    """Z_a mean within 3 SE of its df and KS below the 1% critical value."""
    t0 = time.time()
    rng = np.random.default_rng(4)
    n, p = 60, 6
    x = rng.standard_normal((n, p))
    beta0 = np.zeros(p)
    beta0[[0, 1]] = (1.5, -1.0)
    fam = G.Family("gaussian", phi=1.0)
    ctx = G.make_context(fam, x, beta0)
    alpha = (0, 1, 2, 4, 5)
    df = len(alpha) - 2
    mu0 = x @ beta0
    reps = 2000
    draws = np.empty(reps)
    for r in range(reps):
        y = mu0 + rng.standard_normal(n)
        ds = G.Dataset(x=x, y=y, column_scales=np.ones(p), zero_columns=())
        draws[r] = G.projection_quadform(fam, ds, ctx, alpha)
    se = math.sqrt(2.0 * df / reps)
    mean_ok = abs(draws.mean() - df) <= 3 * se
    ks = stats.kstest(draws, stats.chi2(df).cdf).statistic
    ks_crit = 1.62762 / math.sqrt(reps)  # asymptotic 1% critical value
    elapsed = time.time() - t0
    ok = mean_ok and ks < ks_crit and elapsed < 60
    _report(capsys, 4, "Z_a ~ chi-square(df) Monte Carlo", ok, elapsed,
            f"mean {draws.mean():.3f} vs df {df}, KS {ks:.4f} < {ks_crit:.4f}")
    assert mean_ok
    assert ks < ks_crit
    assert elapsed < 60


def test_acceptance_5_kl_delta_oracles(capsys):
    """KL oracles: zero at the truth, toy delta_n, Gaussian closed form."""
    t0 = time.time()
    rng = np.random.default_rng(5)
    zero_ok = True
    for kind in ("gaussian", "binomial", "poisson"):
        fam = G.Family(kind, phi=2.0 if kind == "gaussian" else 1.0)
        x = rng.standard_normal((12, 3))
        b = rng.standard_normal(3)
        zero_ok &= G.kl_divergence(fam, x, b, b) == 0.0

    toy_x = np.array([[math.sqrt(2.0), 0.0], [0.0, math.sqrt(2.0)]])
    delta = G.delta_min(G.Family("gaussian", phi=1.0), toy_x,
                        np.array([1.0, 1.0]), 2)
    toy_ok = abs(delta - 0.5) < 1e-12

    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(5, 30))
        pdim = int(rng.integers(1, 6))
        x = rng.standard_normal((n, pdim))
        b0 = rng.standard_normal(pdim)
        b1 = rng.standard_normal(pdim)
        phi = float(rng.uniform(0.2, 5.0))
        got = G.kl_divergence(G.Family("gaussian", phi=phi), x, b0, b1)
        want = float(np.sum((x @ (b0 - b1)) ** 2)) / (2 * phi)
        worst = max(worst, abs(got - want))
    elapsed = time.time() - t0
    ok = zero_ok and toy_ok and worst <= 1e-10 and elapsed < 30
    _report(capsys, 5, "KL and delta_n oracles", ok, elapsed,
            f"toy delta {delta:.3f}, closed-form error {worst:.2e}")
    assert zero_ok
    assert toy_ok
    assert worst <= 1e-10
    assert elapsed < 30


def test_acceptance_6_schedules(capsys):
    """Dimension and coefficient schedules at their anchors."""
    t0 = time.time()
    ok = True
    ok &= G.dimension_schedule(100) == 157
    ok &= G.dimension_schedule(500) == 18376

    b = G.beta0_schedule("linear", 100)
    ok &= np.array_equal(b[:5], [3.0, 1.5, 0.0, 0.0, 2.0]) and not b[5:].any()
    b = G.beta0_schedule("linear", 140)
    ok &= b[5] == 2.5 and np.count_nonzero(b) == 4
    b = G.beta0_schedule("linear", 180)
    ok &= b[6] == 2.5 and np.count_nonzero(b) == 5
    b = G.beta0_schedule("linear", 260)
    ok &= np.count_nonzero(b) == 7

    b = G.beta0_schedule("logistic", 100)
    ok &= np.array_equal(b[:5], [-3.0, 1.5, 0.0, 0.0, -2.0]) and not b[5:].any()
    b = G.beta0_schedule("logistic", 140)
    ok &= np.count_nonzero(b) == 3
    b = G.beta0_schedule("logistic", 180)
    ok &= b[5] == 2.0 and np.count_nonzero(b) == 4
    b = G.beta0_schedule("logistic", 260)
    ok &= b[6] == -2.0 and np.count_nonzero(b) == 5

    elapsed = time.time() - t0
    _report(capsys, 6, "dimension/coefficient schedule anchors", bool(ok),
            elapsed)
    assert ok


@pytest.mark.slow
def test_acceptance_7_figure_trends(capsys):
    """Paired ordinal comparison of gic_lll vs bic, SCAD, 100 replications."""
    t0 = time.time()
    n_jobs = int(os.environ.get("GICSELECT_THREADS", "0")) or None
    failures = []
    summary = []
    for model, grid in (("linear", (100, 200)), ("logistic", (100, 180))):
        rep = G.run_study(model, grid, penalties=("scad",),
                          criteria=("gic_lll", "bic"), reps=100, base_seed=0,
                          n_jobs=n_jobs or 1)
        for n in grid:
            g = rep.cell(n, "scad", "gic_lll")
            b = rep.cell(n, "scad", "bic")
            if g["percent_correct"] < b["percent_correct"]:
                failures.append(f"{model} n={n}: correct "
                                f"{g['percent_correct']} < {b['percent_correct']}")
            if g["mean_false_positives"] > b["mean_false_positives"]:
                failures.append(f"{model} n={n}: FP "
                                f"{g['mean_false_positives']} > "
                                f"{b['mean_false_positives']}")
            summary.append(f"{model}/{n}: correct {g['percent_correct']:.2f}"
                           f" (bic {b['percent_correct']:.2f})")
        lo, hi = grid
        g_lo = rep.cell(lo, "scad", "gic_lll")
        g_hi = rep.cell(hi, "scad", "gic_lll")
        if g_hi["percent_correct"] < g_lo["percent_correct"]:
            failures.append(f"{model}: correct not increasing in n")
        if (g_hi["median_relative_model_error"]
                > g_lo["median_relative_model_error"]):
            failures.append(f"{model}: median relative model error not "
                            "decreasing in n")
    elapsed = time.time() - t0
    ok = not failures
    _report(capsys, 7, "ordinal selection trends (SCAD, 100 reps)", ok,
            elapsed, "; ".join(summary + failures)
            + f"; runtime target 1800s, observed {elapsed:.0f}s")
    assert not failures, failures


def test_acceptance_8_property_suites(capsys):
    """Penalty calculus, threshold oracle, KKT residuals, sim determinism."""
    t0 = time.time()
    rng = np.random.default_rng(8)
    specs = {
        "lasso": PenaltySpec("lasso"),
        "scad": PenaltySpec("scad"),
        "mcp": PenaltySpec("mcp"),
    }

    # finite differences away from kinks
    fd_worst = 0.0
    for spec in specs.values():
        for lam in (0.3, 1.0, 2.5):
            kinks = {lam, spec.scad_a * lam, spec.mcp_gamma * lam}
            for t in np.linspace(0.05, 4.0 * lam, 40):
                if min(abs(t - k) for k in kinks) < 1e-3:
                    continue
                h = 1e-7
                fd = (penalty_value(spec, lam, t + h)
                      - penalty_value(spec, lam, t - h)) / (2 * h)
                fd_worst = max(
                    fd_worst, abs(fd - penalty_derivative(spec, lam, t)))

    # threshold updates against a two-stage grid oracle: 9000 cases
    def grid_oracle(spec, lam, z, v):
        width = max(5.0, abs(z / v) + 1.0)
        bs = np.arange(-width, width, 1e-3)
        obj = 0.5 * v * (bs - z / v) ** 2 + np.array(
            [penalty_value(spec, lam, abs(b)) for b in bs])
        center = bs[int(np.argmin(obj))]
        bs = np.arange(center - 2e-3, center + 2e-3, 1e-6)
        obj = 0.5 * v * (bs - z / v) ** 2 + np.array(
            [penalty_value(spec, lam, abs(b)) for b in bs])
        return float(obj.min())

    thr_worst = 0.0
    for spec in specs.values():
        for lam in (0.2, 1.0, 3.0):
            for _ in range(1000):
                z = float(rng.uniform(-6, 6))
                v = float(rng.uniform(0.2, 3.0))
                b = scalar_threshold_update(spec, lam, z, v)
                got = 0.5 * v * (b - z / v) ** 2 + penalty_value(
                    spec, lam, abs(b))
                thr_worst = max(thr_worst, got - grid_oracle(spec, lam, z, v))

    # KKT residuals on Lasso fits
    kkt_worst = 0.0
    for seed in range(10):
        r2 = np.random.default_rng(seed)
        x = r2.standard_normal((80, 25))
        y = x[:, 0] - 0.5 * x[:, 4] + r2.standard_normal(80)
        ds = G.standardize(x, y)
        fam = G.Family("gaussian", phi=1.0)
        lam = 0.3 * G.compute_lambda_max(fam, ds, specs["lasso"])
        fit = G.fit_penalized(fam, ds, specs["lasso"], lam)
        resid = G.kkt_residuals(fam, ds, fit)
        for j in range(25):
            if j in fit.support:
                kkt_worst = max(
                    kkt_worst, abs(resid[j] - lam * np.sign(fit.beta[j])))
            else:
                kkt_worst = max(kkt_worst, abs(resid[j]) - lam)

    # byte-exact simulation determinism
    kwargs = dict(model="linear", n_grid=(100,), penalties=("lasso",),
                  criteria=("gic_lll", "bic"), reps=3, base_seed=99)
    det_ok = (G.run_study(**kwargs).to_csv() == G.run_study(**kwargs).to_csv())

    elapsed = time.time() - t0
    ok = (fd_worst <= 1e-5 and thr_worst <= 1e-8 and kkt_worst <= 1e-6
          and det_ok)
    _report(capsys, 8, "property suites", ok, elapsed,
            f"FD {fd_worst:.2e}, threshold {thr_worst:.2e}, "
            f"KKT {kkt_worst:.2e}, determinism {det_ok}")
    assert fd_worst <= 1e-5
    assert thr_worst <= 1e-8
    assert kkt_worst <= 1e-6
    assert det_ok
