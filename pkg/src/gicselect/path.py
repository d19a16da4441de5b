"""Regularization-path construction and GIC-based tuning-parameter selection."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import families
from .solver import Fit, compute_lambda_max, fit_penalized, fit_adaptive_lasso
from .penalties import ADAPTIVE_LASSO, PenaltySpec

LAMBDA_DESCENT = 0.95
LAMBDA_FLOOR_RATIO = 1e-4
DEFAULT_GRID_COUNT = 200
# fraction of the null deviance below which a fit counts as saturated;
# descending lambda further only produces near-interpolating models
SATURATION_RATIO = 1e-2

CRITERIA = ("aic", "bic", "mbic", "logp", "gic_lll")


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class PathFit:
    lambdas: np.ndarray  # strictly decreasing
    fits: tuple  # Fit per lambda
    support_cap: int


@dataclass(frozen=True)
class SelectionReport:
    criterion: str
    a_n: float
    chosen_index: int
    chosen_lambda: float
    chosen_support: tuple
    gic_values: np.ndarray


def support_cap_for(n):
    """Path is truncated once the fitted support exceeds floor(3 sqrt(n))."""
    return int(math.floor(3.0 * math.sqrt(n)))


def build_lambda_grid(lam_min, lam_max, count=DEFAULT_GRID_COUNT):
    """Geometric grid from lam_max down to lam_min, inclusive."""
    if lam_min <= 0:
        raise PathError(f"lam_min must be positive, got {lam_min}")
    if lam_max <= lam_min:
        raise PathError("lam_max must exceed lam_min")
    if count < 2:
        raise PathError("grid needs at least 2 points")
    return np.exp(np.linspace(math.log(lam_max), math.log(lam_min), count))


def determine_lambda_min(family, dataset, spec, lam_max, *, target=None,
                         intercept=False):
    """Descend lambda by factor 0.95 from lam_max until the fitted support
    first reaches floor(3 sqrt(n)), or lambda falls below lam_max * 1e-4.
    """
    if target is None:
        target = support_cap_for(dataset.n)
    lam = lam_max
    warm = None
    floor = lam_max * LAMBDA_FLOOR_RATIO
    null_dev = families.deviance(
        family, family.b_prime(np.zeros(dataset.n)), dataset.y
    )
    while True:
        lam *= LAMBDA_DESCENT
        if lam < floor:
            warnings.warn(
                f"support never reached {target}; lambda_min floored at {floor:g}"
            )
            return floor
        fit = fit_penalized(family, dataset, spec, lam, warm_start=warm,
                            intercept=intercept)
        warm = fit.beta
        if len(fit.support) >= target:
            return lam
        # saturated fit: smaller lambda only yields near-interpolators
        if fit.deviance <= SATURATION_RATIO * max(1.0, null_dev):
            warnings.warn(
                f"fit saturated at lambda={lam:g} with support "
                f"{len(fit.support)}; stopping the descent early"
            )
            return lam


def fit_path(
    family,
    dataset,
    spec,
    *,
    grid_count=DEFAULT_GRID_COUNT,
    support_cap=None,
    intercept=False,
):
    """Fit the full descending-lambda path with warm starts.

    Entries whose support exceeds the cap are dropped from the tail. The
    adaptive lasso runs its stage-1 lasso path alongside so every lambda's
    weights come from the lasso fit at the same lambda.
    """
    if support_cap is None:
        support_cap = support_cap_for(dataset.n)
    adaptive = spec.kind == ADAPTIVE_LASSO
    base_spec = PenaltySpec(kind="lasso") if adaptive else spec
    lam_max = compute_lambda_max(family, dataset, base_spec)
    if lam_max <= 0:
        raise PathError("degenerate data: lambda_max is zero")
    lam_min = determine_lambda_min(
        family, dataset, base_spec, lam_max, target=support_cap,
        intercept=intercept,
    )
    grid = build_lambda_grid(lam_min, lam_max, grid_count)
    null_dev = families.deviance(
        family, family.b_prime(np.zeros(dataset.n)), dataset.y
    )
    fits = []
    lambdas = []
    warm = None
    warm_lasso = None
    for lam in grid:
        try:
            if adaptive:
                stage1 = fit_penalized(
                    family, dataset, base_spec, lam, warm_start=warm_lasso,
                    intercept=intercept,
                )
                warm_lasso = stage1.beta
                fit = fit_adaptive_lasso(
                    family, dataset, lam, scad_a=spec.scad_a,
                    intercept=intercept, stage1=stage1,
                )
            else:
                fit = fit_penalized(
                    family, dataset, spec, lam, warm_start=warm,
                    intercept=intercept,
                )
        except Exception as exc:
            raise PathError(f"solver failed at lambda={lam:g}: {exc}") from exc
        if len(fit.support) > support_cap:
            break
        fits.append(fit)
        lambdas.append(lam)
        warm = fit.beta
        if fit.deviance <= SATURATION_RATIO * max(1.0, null_dev):
            break
    if not fits:
        raise PathError("no path entries within the support cap")
    return PathFit(
        lambdas=np.asarray(lambdas), fits=tuple(fits), support_cap=support_cap
    )


def complexity_constant(kind, n, p):
    """Model-complexity penalty a_n for the named criterion (natural logs)."""
    if p < 2:
        raise PathError("p must be at least 2")
    if kind == "aic":
        return 2.0
    if kind in ("mbic", "gic_lll") and n < 3:
        raise PathError("log log n requires n >= 3")
    if kind == "bic":
        return math.log(n)
    if kind == "mbic":
        return math.log(math.log(n)) * math.log(n)
    if kind == "logp":
        return math.log(p)
    if kind == "gic_lll":
        return math.log(math.log(n)) * math.log(p)
    raise PathError(f"unknown criterion {kind!r}")


def select_model(path, kind, n, p):
    """Minimize (deviance + a_n |support|)/n over the path.

    Ties break toward the smaller support, then the larger lambda (earlier
    path entry).
    """
    if not path.fits:
        raise PathError("empty path")
    a_n = complexity_constant(kind, n, p)
    gic = np.array(
        [(f.deviance + a_n * len(f.support)) / n for f in path.fits]
    )
    best = 0
    for i in range(1, len(path.fits)):
        if gic[i] < gic[best] or (
            gic[i] == gic[best]
            and len(path.fits[i].support) < len(path.fits[best].support)
        ):
            best = i
    return SelectionReport(
        criterion=kind,
        a_n=a_n,
        chosen_index=best,
        chosen_lambda=float(path.lambdas[best]),
        chosen_support=path.fits[best].support,
        gic_values=gic,
    )
