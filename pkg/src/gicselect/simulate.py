"""Replicated variable-selection studies on the scaling linear and logistic
designs: data generation, selection-quality metrics, and aggregation.

Dimension and signal schedules are tied to the sample size: the design
width is floor(exp((n - 20)^0.37)) and the number of true covariates grows
in steps of 40 (linear) or 80 (logistic) observations.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics
from .data import Dataset, standardize
from .diagnostics import make_context, restricted_mle
from .families import BINOMIAL, GAUSSIAN, Family
from .path import CRITERIA, fit_path, select_model
from .penalties import PenaltySpec

LINEAR = "linear"
LOGISTIC = "logistic"
SIGMA_LINEAR = 3.0

CSV_HEADER = [
    "model",
    "n",
    "penalty",
    "criterion",
    "replications",
    "failures",
    "percent_correct",
    "overfit_rate",
    "underfit_rate",
    "mean_false_positives",
    "mean_false_negatives",
    "median_relative_model_error",
    "median_chosen_lambda",
]


class SimulationError(ValueError):
    pass


def dimension_schedule(n):
    """Design width p = floor(exp((n - 20)^0.37))."""
    if n <= 20:
        raise SimulationError("n must exceed 20")
    return int(math.floor(math.exp((n - 20) ** 0.37)))


def sparsity_schedule(model, n):
    if n < 100:
        raise SimulationError("schedules are anchored at n >= 100")
    step = 40 if model == LINEAR else 80
    return 3 + (n - 100) // step


def beta0_schedule(model, n, p=None):
    """True coefficient vector: a fixed 5-coordinate base pattern plus one
    extra signal per schedule step, appended at coordinates 6, 7, ...

    Linear base (3.0, 1.5, 0, 0, 2.0) with additions of 2.5; logistic base
    (-3.0, 1.5, 0, 0, -2.0) with additions alternating 2.0, -2.0.
    """
    if model not in (LINEAR, LOGISTIC):
        raise SimulationError(f"unknown model {model!r}")
    if p is None:
        p = dimension_schedule(n)
    s = sparsity_schedule(model, n)
    beta = np.zeros(p)
    if model == LINEAR:
        beta[:5] = (3.0, 1.5, 0.0, 0.0, 2.0)
        extras = [2.5] * (s - 3)
    else:
        beta[:5] = (-3.0, 1.5, 0.0, 0.0, -2.0)
        extras = [2.0 if i % 2 == 0 else -2.0 for i in range(s - 3)]
    for i, v in enumerate(extras):
        beta[5 + i] = v
    return beta


@dataclass(frozen=True)
class SimDesign:
    model: str
    n: int
    seed: int
    sigma: float = SIGMA_LINEAR

    def __post_init__(self):
        if self.model not in (LINEAR, LOGISTIC):
            raise SimulationError(f"unknown model {self.model!r}")
        if self.n < 100:
            raise SimulationError("schedules are anchored at n >= 100")

    @property
    def p(self):
        return dimension_schedule(self.n)

    @property
    def s(self):
        return sparsity_schedule(self.model, self.n)

    @property
    def beta0(self):
        return beta0_schedule(self.model, self.n)

    @property
    def family(self):
        if self.model == LINEAR:
            return Family(kind=GAUSSIAN, phi=self.sigma**2)
        return Family(kind=BINOMIAL)


def gen_dataset(design):
    """Draw one dataset: iid standard-Gaussian rows, columns scaled to norm
    sqrt(n), response from the true model on the standardized design."""
    rng = np.random.default_rng(design.seed)
    n, p = design.n, design.p
    x = rng.standard_normal((n, p))
    beta0 = design.beta0
    xs = standardize(x, np.zeros(n)).x
    eta = xs @ beta0
    if design.model == LINEAR:
        y = eta + design.sigma * rng.standard_normal(n)
    else:
        y = (rng.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
    dataset = Dataset(x=xs, y=y, column_scales=np.full(p, 1.0))
    ctx = make_context(design.family, xs, beta0)
    return dataset, ctx


def model_error(beta_hat, beta0, sigma_x=None):
    """Expected squared prediction gap (beta_hat - beta0)' Sigma (beta_hat
    - beta0); Sigma defaults to the identity of the standard design."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    if beta_hat.shape != beta0.shape:
        raise SimulationError("coefficient vectors differ in length")
    d = beta_hat - beta0
    if sigma_x is None:
        return float(d @ d)
    sigma_x = np.asarray(sigma_x, dtype=float)
    if sigma_x.shape != (d.size, d.size):
        raise SimulationError("covariance shape does not match beta")
    return float(d @ sigma_x @ d)


def classify_support(selected, alpha0):
    """exact / overfit (strict superset) / underfit (misses a true index)."""
    sel = set(int(j) for j in selected)
    tru = set(int(j) for j in alpha0)
    if sel == tru:
        return "exact"
    if sel > tru:
        return "overfit"
    return "underfit"


@dataclass(frozen=True)
class SimReport:
    cells: tuple  # dicts keyed by CSV_HEADER entries
    meta: dict = field(default_factory=dict)

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
        w.writeheader()
        for cell in self.cells:
            w.writerow({k: _fmt(cell[k]) for k in CSV_HEADER})
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        return None

    def to_json(self, path=None):
        nested = {}
        for cell in self.cells:
            nested.setdefault(str(cell["n"]), {}).setdefault(
                cell["penalty"], {}
            )[cell["criterion"]] = {
                k: cell[k] for k in CSV_HEADER if k not in ("n", "penalty", "criterion")
            }
        payload = {"meta": self.meta, "results": nested}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        if path is None:
            return text
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        return None

    def cell(self, n, penalty, criterion):
        for c in self.cells:
            if (
                c["n"] == n
                and c["penalty"] == penalty
                and c["criterion"] == criterion
            ):
                return c
        raise KeyError((n, penalty, criterion))


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".10g")
    return v


def _penalty_spec(name):
    return PenaltySpec(kind=name)


def run_replication(model, n, rep_seed, penalties, criteria, *, grid_count=200):
    """One replication: generate, fit a path per penalty, select per
    criterion, and score the selection against the truth."""
    design = SimDesign(model=model, n=n, seed=rep_seed)
    dataset, ctx = gen_dataset(design)
    family = design.family
    alpha0 = set(ctx.alpha0)
    oracle = restricted_mle(family, dataset, ctx.alpha0)
    me_oracle = model_error(oracle.beta, ctx.beta0)
    out = {}
    for pen in penalties:
        path = fit_path(family, dataset, _penalty_spec(pen), grid_count=grid_count)
        for crit in criteria:
            report = select_model(path, crit, dataset.n, dataset.p)
            sel = set(report.chosen_support)
            try:
                refit = restricted_mle(family, dataset, report.chosen_support)
                me = model_error(refit.beta, ctx.beta0)
                rel_me = me / me_oracle if me_oracle > 0 else math.inf
            except diagnostics.DiagnosticsError:
                rel_me = math.nan
            out[(pen, crit)] = {
                "class": classify_support(sel, alpha0),
                "false_positives": len(sel - alpha0),
                "false_negatives": len(alpha0 - sel),
                "relative_model_error": rel_me,
                "chosen_lambda": report.chosen_lambda,
            }
    return out


def run_study(
    model,
    n_grid,
    penalties=("scad", "lasso"),
    criteria=CRITERIA,
    reps=100,
    base_seed=0,
    *,
    grid_count=200,
    n_jobs=1,
):
    """Replicated study over a grid of sample sizes.

    Replication r uses seed base_seed XOR r, so cells are paired across
    penalties and criteria and the whole report is deterministic. Failed
    replications are excluded per (n,) with their count reported.
    """
    if reps < 1:
        raise SimulationError("reps must be at least 1")
    cells = []
    for n in n_grid:
        results, failures = _run_cell(
            model, n, penalties, criteria, reps, base_seed, grid_count, n_jobs
        )
        for pen in penalties:
            for crit in criteria:
                rows = [r[(pen, crit)] for r in results]
                classes = [r["class"] for r in rows]
                rel = [
                    r["relative_model_error"]
                    for r in rows
                    if not math.isnan(r["relative_model_error"])
                ]
                cells.append(
                    {
                        "model": model,
                        "n": n,
                        "penalty": pen,
                        "criterion": crit,
                        "replications": len(results),
                        "failures": failures,
                        "percent_correct": _rate(classes, "exact"),
                        "overfit_rate": _rate(classes, "overfit"),
                        "underfit_rate": _rate(classes, "underfit"),
                        "mean_false_positives": statistics.fmean(
                            r["false_positives"] for r in rows
                        ),
                        "mean_false_negatives": statistics.fmean(
                            r["false_negatives"] for r in rows
                        ),
                        "median_relative_model_error": (
                            statistics.median(rel) if rel else math.nan
                        ),
                        "median_chosen_lambda": statistics.median(
                            r["chosen_lambda"] for r in rows
                        ),
                    }
                )
    meta = {
        "model": model,
        "n_grid": list(n_grid),
        "penalties": list(penalties),
        "criteria": list(criteria),
        "reps": reps,
        "base_seed": base_seed,
        "grid_count": grid_count,
        "extra_signal_coordinates": "appended at 6, 7, ... after the base pattern",
    }
    return SimReport(cells=tuple(cells), meta=meta)


def _run_cell(model, n, penalties, criteria, reps, base_seed, grid_count, n_jobs):
    args = [
        (model, n, base_seed ^ r, tuple(penalties), tuple(criteria))
        for r in range(reps)
    ]
    if n_jobs != 1:
        from joblib import Parallel, delayed

        raw = Parallel(n_jobs=n_jobs)(
            delayed(_safe_replication)(*a, grid_count) for a in args
        )
    else:
        raw = [_safe_replication(*a, grid_count) for a in args]
    results = [r for r in raw if r is not None]
    return results, len(raw) - len(results)


def _safe_replication(model, n, seed, penalties, criteria, grid_count):
    try:
        return run_replication(
            model, n, seed, penalties, criteria, grid_count=grid_count
        )
    except Exception:
        return None


def _rate(classes, label):
    return sum(1 for c in classes if c == label) / len(classes)
