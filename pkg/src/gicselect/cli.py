"""Command-line interface: fit, path, select, simulate, diagnose, profile.

CSV is the canonical numeric output; SVG charts are presentation-only and
regenerable from the CSV.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, simulate
from .data import accuracy_profile, load_matrix, oracle_profile, standardize
from .families import GAUSSIAN, Family
from .path import CRITERIA, complexity_constant, fit_path, select_model
from .penalties import PenaltySpec
from .solver import fit_penalized

FAMILIES = ("gaussian", "binomial", "poisson")
PENALTIES = ("lasso", "scad", "mcp", "adaptive_lasso")


class UsageError(ValueError):
    pass


def _parse_phi(text):
    if text == "plugin":
        return "plugin"
    if text.startswith("known:"):
        v = float(text.split(":", 1)[1])
        if v <= 0:
            raise UsageError("phi must be positive")
        return v
    raise UsageError("--phi must be 'known:<value>' or 'plugin'")


def _threads_default():
    env = os.environ.get("GICSELECT_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def build_parser():
    ap = argparse.ArgumentParser(
        prog="gicselect",
        description="Penalized GLM paths with information-criterion tuning",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_data_opts(p):
        p.add_argument("--data", required=True, help="design matrix CSV/TSV")
        p.add_argument("--response", required=True, help="response CSV (one column)")
        p.add_argument("--header", action="store_true", help="data file has a header row")
        p.add_argument("--format", choices=("csv", "tsv"), default="csv")
        p.add_argument("--family", choices=FAMILIES, default="gaussian")
        p.add_argument("--phi", default="known:1.0",
                       help="Gaussian dispersion: known:<value> or plugin")
        p.add_argument("--intercept", action="store_true")

    def add_common(p):
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("fit", help="single penalized fit at one lambda")
    add_data_opts(p)
    p.add_argument("--penalty", choices=PENALTIES, default="scad")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    add_common(p)

    p = sub.add_parser("path", help="full regularization path")
    add_data_opts(p)
    p.add_argument("--penalty", choices=PENALTIES, default="scad")
    p.add_argument("--grid-count", type=int, default=200)
    add_common(p)

    p = sub.add_parser("select", help="path plus criterion-based selection")
    add_data_opts(p)
    p.add_argument("--penalty", choices=PENALTIES, default="scad")
    p.add_argument("--grid-count", type=int, default=200)
    p.add_argument("--criteria", default="gic_lll",
                   help="comma-separated subset of " + ",".join(CRITERIA))
    add_common(p)

    p = sub.add_parser("simulate", help="replicated selection study")
    p.add_argument("--model", choices=("linear", "logistic"), required=True)
    p.add_argument("--n", default="100", help="comma-separated sample sizes")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--penalties", default="scad,lasso")
    p.add_argument("--criteria", default="bic,logp,gic_lll")
    p.add_argument("--grid-count", type=int, default=200)
    p.add_argument("--threads", type=int, default=None)
    add_common(p)

    p = sub.add_parser("diagnose", help="toy-scale diagnostics suite")
    p.add_argument("--seed", type=int, default=0)
    add_common(p)

    p = sub.add_parser("profile", help="accuracy profile from scores and labels")
    p.add_argument("--scores", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--precision", action="store_true",
                   help="report precision within top fraction instead of capture")
    add_common(p)

    return ap


def _load_xy(args):
    x = load_matrix(args.data, fmt=args.format, has_header=args.header).values
    y = load_matrix(args.response, fmt=args.format, has_header=False).values
    if y.shape[1] != 1:
        raise UsageError("response file must have exactly one column")
    return standardize(x, y[:, 0])


def _family(args, phi_value):
    phi = phi_value if args.family == GAUSSIAN else 1.0
    return Family(kind=args.family, phi=phi)


def _resolve_phi(args, dataset, spec, grid_count=200):
    """Plug-in dispersion: RSS/n of the largest (last) path entry fitted at
    phi = 1."""
    phi = _parse_phi(args.phi)
    if phi != "plugin":
        return float(phi)
    if args.family != GAUSSIAN:
        return 1.0
    family = Family(kind=GAUSSIAN, phi=1.0)
    path = fit_path(family, dataset, spec, grid_count=grid_count,
                    intercept=args.intercept)
    return path.fits[-1].deviance / dataset.n


def _spec(args):
    return PenaltySpec(kind=args.penalty)


def cmd_fit(args, out):
    dataset = _load_xy(args)
    spec = _spec(args)
    phi = _resolve_phi(args, dataset, spec)
    family = _family(args, phi)
    fit = fit_penalized(family, dataset, spec, args.lam, intercept=args.intercept)
    payload = {
        "family": args.family,
        "penalty": args.penalty,
        "phi": phi,
        "lambda": fit.lam,
        "intercept": fit.intercept,
        "coefficients_standardized": fit.beta.tolist(),
        "coefficients_raw": (fit.beta / dataset.column_scales).tolist(),
        "support": list(fit.support),
        "deviance": fit.deviance,
        "objective": fit.objective,
        "converged": fit.converged,
        "outer_iters": fit.outer_iters,
        "inner_iters": fit.inner_iters,
    }
    _write_json(out / "fit.json", payload)


def cmd_path(args, out):
    dataset = _load_xy(args)
    spec = _spec(args)
    phi = _resolve_phi(args, dataset, spec, args.grid_count)
    family = _family(args, phi)
    path = fit_path(family, dataset, spec, grid_count=args.grid_count,
                    intercept=args.intercept)
    with open(out / "path.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("lambda,support_size,deviance,converged\n")
        for lam, fit in zip(path.lambdas, path.fits):
            fh.write(
                f"{lam:.10g},{len(fit.support)},{fit.deviance:.10g},"
                f"{int(fit.converged)}\n"
            )


def cmd_select(args, out):
    dataset = _load_xy(args)
    spec = _spec(args)
    criteria = [c.strip() for c in args.criteria.split(",") if c.strip()]
    for c in criteria:
        if c not in CRITERIA:
            raise UsageError(f"unknown criterion {c!r}")
    phi = _resolve_phi(args, dataset, spec, args.grid_count)
    family = _family(args, phi)
    path = fit_path(family, dataset, spec, grid_count=args.grid_count,
                    intercept=args.intercept)
    selections = {}
    for crit in criteria:
        report = select_model(path, crit, dataset.n, dataset.p)
        selections[crit] = {
            "a_n": report.a_n,
            "chosen_lambda": report.chosen_lambda,
            "chosen_index": report.chosen_index,
            "chosen_support": list(report.chosen_support),
        }
        with open(out / f"gic_{crit}.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("lambda,support_size,gic\n")
            for lam, fit, g in zip(path.lambdas, path.fits, report.gic_values):
                fh.write(f"{lam:.10g},{len(fit.support)},{g:.10g}\n")
    payload = {
        "family": args.family,
        "penalty": args.penalty,
        "phi": phi,
        "n": dataset.n,
        "p": dataset.p,
        "selections": selections,
    }
    _write_json(out / "selection.json", payload)


def cmd_simulate(args, out):
    from .plots import write_line_chart

    n_grid = [int(v) for v in args.n.split(",") if v.strip()]
    penalties = [v.strip() for v in args.penalties.split(",") if v.strip()]
    criteria = [v.strip() for v in args.criteria.split(",") if v.strip()]
    threads = args.threads if args.threads is not None else _threads_default()
    report = simulate.run_study(
        args.model,
        n_grid,
        penalties=penalties,
        criteria=criteria,
        reps=args.reps,
        base_seed=args.seed,
        grid_count=args.grid_count,
        n_jobs=threads,
    )
    report.to_csv(out / "simreport.csv")
    report.to_json(out / "simreport.json")
    panels = {
        "percent_correct": "fraction of exactly recovered supports",
        "mean_false_positives": "mean false positives",
        "median_relative_model_error": "median relative model error",
        "median_chosen_lambda": "median selected lambda",
    }
    for key, title in panels.items():
        series = {}
        for pen in penalties:
            for crit in criteria:
                xs, ys = [], []
                for n in n_grid:
                    cell = report.cell(n, pen, crit)
                    if not math.isnan(cell[key]):
                        xs.append(n)
                        ys.append(cell[key])
                if xs:
                    series[f"{pen}/{crit}"] = (xs, ys)
        write_line_chart(
            out / f"{key}.svg", series, title=title, xlabel="n", ylabel=key
        )


def cmd_diagnose(args, out):
    results = run_toy_diagnostics(seed=args.seed)
    _write_json(out / "diagnostics.json", results)
    if not results["all_passed"]:
        raise RuntimeError("diagnostics suite reported failures")


def run_toy_diagnostics(seed=0):
    """Small exact-answer suite: KL at the truth, the two-column toy design's
    minimal signal strength, the projection form at the true support, and the
    Gaussian deviance identity on a random nested instance."""
    from .data import Dataset

    checks = {}
    fam = Family(kind=GAUSSIAN, phi=1.0)
    x = np.array([[math.sqrt(2.0), 0.0], [0.0, math.sqrt(2.0)]])
    beta0 = np.array([1.0, 1.0])
    checks["kl_at_truth_zero"] = (
        abs(diagnostics.kl_divergence(fam, x, beta0, beta0)) < 1e-12
    )
    dm = diagnostics.delta_min(fam, x, beta0, 2)
    checks["toy_delta_min"] = abs(dm - 0.5) < 1e-10

    rng = np.random.default_rng(seed)
    n, p = 50, 8
    xr = standardize(rng.standard_normal((n, p)), np.zeros(n)).x
    b0 = np.zeros(p)
    b0[:2] = (1.5, -2.0)
    y = xr @ b0 + rng.standard_normal(n)
    ds = Dataset(x=xr, y=y, column_scales=np.ones(p))
    ctx = diagnostics.make_context(fam, xr, b0)
    z_at_truth = diagnostics.projection_quadform(fam, ds, ctx, ctx.alpha0)
    checks["projection_zero_at_truth"] = abs(z_at_truth) < 1e-10
    lhs, rhs, gap = diagnostics.verify_gaussian_deviance_identity(
        ds, ctx, (0, 1, 2, 3)
    )
    checks["gaussian_deviance_identity"] = gap <= 1e-8 * (1.0 + abs(lhs))
    return {
        "delta_min_toy": dm,
        "identity_gap": gap,
        "checks": checks,
        "all_passed": all(checks.values()),
    }


def cmd_profile(args, out):
    from .plots import write_line_chart

    scores = load_matrix(args.scores, fmt="csv", has_header=False).values[:, 0]
    labels = load_matrix(args.labels, fmt="csv", has_header=False).values[:, 0]
    mode = "precision" if args.precision else "capture"
    prof = accuracy_profile(scores, labels, mode=mode)
    oracle = oracle_profile(labels, mode=mode)
    with open(out / "profile.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("fraction_inspected,fraction_captured\n")
        for x, y in prof.points:
            fh.write(f"{x:.10g},{y:.10g}\n")
    write_line_chart(
        out / "profile.svg",
        {
            "profile": (prof.points[:, 0], prof.points[:, 1]),
            "oracle": (oracle.points[:, 0], oracle.points[:, 1]),
        },
        title="accuracy profile",
        xlabel="fraction inspected",
        ylabel="fraction captured" if mode == "capture" else "precision",
    )


COMMANDS = {
    "fit": cmd_fit,
    "path": cmd_path,
    "select": cmd_select,
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
    "profile": cmd_profile,
}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](args, out)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    return 0


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    raise SystemExit(main())
