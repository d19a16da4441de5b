"""Sparsity penalties (lasso, SCAD, MCP, weighted/adaptive lasso): values,
derivatives, and the scalar thresholding step used by coordinate descent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LASSO = "lasso"
SCAD = "scad"
MCP = "mcp"
ADAPTIVE_LASSO = "adaptive_lasso"

_KINDS = (LASSO, SCAD, MCP, ADAPTIVE_LASSO)


class PenaltyError(ValueError):
    pass


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family with its shape constants.

    ``weights`` applies only to the adaptive (weighted) lasso: coordinate j
    is penalized at level ``weights[j] * lam``. The solver supplies the
    weights from a first-stage lasso fit; scalar operations here treat the
    weight as folded into lam.
    """

    kind: str
    scad_a: float = 3.7
    mcp_gamma: float = 3.0
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise PenaltyError(f"unknown penalty kind: {self.kind!r}")
        if self.kind == SCAD and self.scad_a <= 2.0:
            raise PenaltyError("SCAD requires a > 2")
        if self.kind == MCP and self.mcp_gamma <= 1.0:
            raise PenaltyError("MCP requires gamma > 1")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if np.any(w < 0):
                raise PenaltyError("adaptive weights must be nonnegative")
            object.__setattr__(self, "weights", w)


def _check_args(lam, t):
    if lam < 0:
        raise PenaltyError(f"lam must be nonnegative, got {lam}")
    if t < 0:
        raise PenaltyError(f"t must be nonnegative, got {t}")


def penalty_value(spec, lam, t):
    """p_lam(t) for t >= 0."""
    _check_args(lam, t)
    if spec.kind in (LASSO, ADAPTIVE_LASSO):
        return lam * t
    if spec.kind == SCAD:
        a = spec.scad_a
        if t <= lam:
            return lam * t
        if t <= a * lam:
            return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0))
        return lam * lam * (a + 1.0) / 2.0
    # MCP
    g = spec.mcp_gamma
    if t <= g * lam:
        return lam * t - t * t / (2.0 * g)
    return g * lam * lam / 2.0


def penalty_derivative(spec, lam, t):
    """p'_lam(t) for t > 0; non-increasing in t."""
    if t <= 0:
        raise PenaltyError("penalty_derivative requires t > 0")
    _check_args(lam, t)
    if spec.kind in (LASSO, ADAPTIVE_LASSO):
        return lam
    if spec.kind == SCAD:
        a = spec.scad_a
        if t <= lam:
            return lam
        return max(a * lam - t, 0.0) / (a - 1.0)
    return max(lam - t / spec.mcp_gamma, 0.0)


def penalty_derivative_at_zero(spec, lam):
    """One-sided limit p'_lam(0+); equals lam for all supported kinds."""
    _check_args(lam, 0.0)
    return lam


def soft_threshold(z, lam):
    return np.sign(z) * max(abs(z) - lam, 0.0)


def scalar_threshold_update(spec, lam, z, v):
    """Global minimizer of q(b) = v (b - z/v)^2 / 2 + p_lam(|b|).

    Candidate stationary points from every penalty piece are evaluated
    exactly; ties at piece boundaries resolve toward smaller |b|.
    """
    if v <= 0:
        raise PenaltyError(f"curvature v must be positive, got {v}")
    if lam < 0:
        raise PenaltyError(f"lam must be nonnegative, got {lam}")
    if lam == 0.0:
        return z / v
    if spec.kind in (LASSO, ADAPTIVE_LASSO):
        return soft_threshold(z, lam) / v

    sign = 1.0 if z >= 0 else -1.0
    az = abs(z)
    candidates = [0.0]
    if spec.kind == SCAD:
        a = spec.scad_a
        # piece 1: |b| in (0, lam], derivative lam
        b1 = soft_threshold(az, lam) / v
        candidates.append(min(b1, lam))
        # piece 2: |b| in (lam, a*lam], derivative (a*lam - |b|)/(a - 1)
        denom = v - 1.0 / (a - 1.0)
        if denom > 0:
            b2 = (az - a * lam / (a - 1.0)) / denom
            candidates.append(min(max(b2, lam), a * lam))
        else:
            candidates.extend([lam, a * lam])
        # piece 3: |b| > a*lam, flat penalty
        candidates.append(max(az / v, a * lam))

        def pval(t):
            if t <= lam:
                return lam * t
            if t <= a * lam:
                return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0))
            return lam * lam * (a + 1.0) / 2.0
    else:  # MCP
        g = spec.mcp_gamma
        denom = v - 1.0 / g
        if denom > 0:
            b1 = soft_threshold(az, lam) / denom
            candidates.append(min(b1, g * lam))
        else:
            candidates.append(g * lam)
        candidates.append(max(az / v, g * lam))

        def pval(t):
            if t <= g * lam:
                return lam * t - t * t / (2.0 * g)
            return g * lam * lam / 2.0

    # since sign(b) matches sign(z), q depends only on |b|; ties at piece
    # boundaries resolve toward smaller |b|
    azv = az / v
    best = 0.0
    best_q = 0.5 * v * azv * azv
    for t in candidates[1:]:
        qt = 0.5 * v * (t - azv) ** 2 + pval(t)
        if qt < best_q or (qt == best_q and t < best):
            best = t
            best_q = qt
    return sign * best
