"""Worst-case Laplacian quadratic risk over a moment uncertainty region, as a
function of the edge-weight vector.

For moments (mean, cov) estimated from data, the adversary may move the mean
anywhere in an L-ellipsoid of radius rho1 around the estimate and the
covariance anywhere in a Frobenius ball of radius rho2 (intersected with the
PSD cone).  Both inner maximizations have closed forms:

    sup over means:        (sqrt(mean @ L @ mean) + rho1)^2
    sup over covariances:  trace(cov @ L) + rho2 * ||L||_F

attained at a rescaled lift of the mean and at cov + rho2 * L / ||L||_F.
Dropping the constant rho1^2 and writing L = expand(w) gives the objective
actually minimized over the simplex:

    g(w) = w @ quad_coeff + rho2 * ||expand(w)||_F + sqrt(a @ w) + h(expand(w))

with quad_coeff = adjoint(cov + outer(mean, mean)) and
a_k = 4 rho1^2 (mean_i - mean_j)^2 >= 0.  h is an optional penalty: a
log-barrier -alpha * sum(log(degrees)) that forces every node to keep
positive degree, and/or a squared off-diagonal penalty used by the
non-robust log-degree model.

g is convex but not smooth where a @ w = 0; gradient() refuses to evaluate
there rather than returning garbage, and callers are expected to treat that
as a hard stop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .laplacian import edge_count, pair_indices, validate_simplex
from .moments import EmpiricalMoments

REGULARIZERS = ("none", "log_barrier")

# w is accepted as feasible when within this relative distance of the simplex.
FEASIBILITY_TOL = 1e-9


class InfeasiblePointError(ValueError):
    """Evaluation requested outside the weight simplex."""


class NonsmoothPointError(RuntimeError):
    """Gradient requested where the square-root term is not differentiable."""


class BarrierDomainError(RuntimeError):
    """Gradient requested where some degree is outside the log-barrier domain."""


@dataclass(frozen=True)
class ModelConfig:
    """Objective hyperparameters.

    rho1, rho2: uncertainty radii for mean and covariance (0 disables).
    s: simplex scale, i.e. half the Laplacian trace.
    regularizer: "none" or "log_barrier"; alpha is the barrier weight.
    quad_weight: coefficient of the squared off-diagonal penalty
        (quad_weight / 2) * sum_{i != j} L_ij^2, used by the non-robust
        log-degree model; 0 disables it.
    sqrt_floor: relative floor under a @ w below which the square-root term
        counts as nonsmooth.
    """

    rho1: float = 0.0
    rho2: float = 0.0
    s: float = 1.0
    regularizer: str = "none"
    alpha: float = 0.5
    quad_weight: float = 0.0
    sqrt_floor: float = 1e-12

    def __post_init__(self):
        if self.rho1 < 0 or self.rho2 < 0:
            raise ValueError(f"radii must be nonnegative, got rho1={self.rho1}, rho2={self.rho2}")
        if not self.s > 0:
            raise ValueError(f"simplex scale must be positive, got s={self.s}")
        if self.regularizer not in REGULARIZERS:
            raise ValueError(
                f"unknown regularizer {self.regularizer!r}, expected one of {REGULARIZERS}"
            )
        if self.regularizer == "log_barrier" and not self.alpha > 0:
            raise ValueError(f"log_barrier needs alpha > 0, got {self.alpha}")
        if self.quad_weight < 0:
            raise ValueError(f"quad_weight must be nonnegative, got {self.quad_weight}")
        if not self.sqrt_floor > 0:
            raise ValueError(f"sqrt_floor must be positive, got {self.sqrt_floor}")


@dataclass(frozen=True)
class ObjectiveContext:
    """Moments, config, and the precomputed pair-space coefficient vectors."""

    moments: EmpiricalMoments
    config: ModelConfig
    m: int
    quad_coeff: np.ndarray  # adjoint(cov + outer(mean, mean))
    mean_gap_sq: np.ndarray  # (mean_i - mean_j)^2 per pair
    sqrt_coeff: np.ndarray  # a = 4 rho1^2 * mean_gap_sq
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)

    @property
    def n_pairs(self) -> int:
        return self.quad_coeff.size

    def degrees(self, w: np.ndarray) -> np.ndarray:
        """Weighted degree of each node under pair weights w."""
        deg = np.zeros(self.m)
        np.add.at(deg, self.rows, w)
        np.add.at(deg, self.cols, w)
        return deg


def build_context(moments: EmpiricalMoments, config: ModelConfig) -> ObjectiveContext:
    """Precompute the pair-space coefficients of the objective.

    The quadratic coefficient folds mean and covariance together through the
    adjoint map; the square-root coefficient a uses the squared mean gaps
    directly, which keeps it exactly nonnegative.
    """
    mean = np.asarray(moments.mean, dtype=float)
    cov = np.asarray(moments.cov, dtype=float)
    m = mean.size
    if cov.shape != (m, m):
        raise ValueError(f"covariance shape {cov.shape} does not match mean size {m}")
    if m < 2:
        raise ValueError(f"need at least two nodes, got m={m}")
    rows, cols = pair_indices(m)
    gaps = mean[rows] - mean[cols]
    mean_gap_sq = gaps * gaps
    # adjoint(cov + outer(mean)) splits into adjoint(cov) + mean_gap_sq; the
    # covariance part is the variance of the pairwise signal difference.
    d = np.diag(cov)
    quad_coeff = d[rows] + d[cols] - 2.0 * cov[rows, cols] + mean_gap_sq
    sqrt_coeff = 4.0 * config.rho1**2 * mean_gap_sq
    for arr in (quad_coeff, mean_gap_sq, sqrt_coeff):
        arr.flags.writeable = False
    return ObjectiveContext(
        moments=moments,
        config=config,
        m=m,
        quad_coeff=quad_coeff,
        mean_gap_sq=mean_gap_sq,
        sqrt_coeff=sqrt_coeff,
        rows=rows,
        cols=cols,
    )


def _check_feasible(ctx: ObjectiveContext, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.size != ctx.n_pairs:
        raise InfeasiblePointError(
            f"weight vector has {w.size} entries, expected {ctx.n_pairs}"
        )
    if not validate_simplex(w, ctx.config.s, tol=FEASIBILITY_TOL):
        raise InfeasiblePointError(
            f"w outside the scale-{ctx.config.s} simplex "
            f"(sum={w.sum():.6g}, min={w.min():.6g})"
        )
    return w


def _frobenius(ctx: ObjectiveContext, w: np.ndarray, deg: np.ndarray) -> float:
    # ||expand(w)||_F^2 = sum(deg^2) + 2 sum(w^2), no matrix needed.
    return math.sqrt(float(deg @ deg + 2.0 * (w @ w)))


def objective_value(ctx: ObjectiveContext, w: np.ndarray) -> float:
    """g(w), the worst-case risk minus its constant rho1^2 offset.

    Returns +inf when the log-barrier is active and some degree is
    nonpositive; that is the extended-value convention line searches rely on.
    Raises InfeasiblePointError outside the simplex.
    """
    w = _check_feasible(ctx, w)
    cfg = ctx.config
    val = float(w @ ctx.quad_coeff)
    deg = ctx.degrees(w)
    if cfg.rho2 > 0:
        val += cfg.rho2 * _frobenius(ctx, w, deg)
    if cfg.rho1 > 0:
        val += math.sqrt(max(float(ctx.sqrt_coeff @ w), 0.0))
    if cfg.quad_weight > 0:
        # (quad_weight/2) * sum_{i!=j} L_ij^2 counts each pair twice.
        val += cfg.quad_weight * float(w @ w)
    if cfg.regularizer == "log_barrier":
        if deg.min() <= 0.0:
            return math.inf
        val -= cfg.alpha * float(np.log(deg).sum())
    return val


def gradient(ctx: ObjectiveContext, w: np.ndarray) -> np.ndarray:
    """Gradient of g at a feasible w.

    The square-root term contributes a / (2 sqrt(a @ w)); when a @ w falls at
    or below sqrt_floor * max(a) * s this raises NonsmoothPointError, which
    also catches the degenerate constant-mean case where a vanishes
    identically.  The log-barrier contributes -alpha (1/deg_i + 1/deg_j) per
    pair and raises BarrierDomainError off its domain.
    """
    w = _check_feasible(ctx, w)
    cfg = ctx.config
    grad = ctx.quad_coeff.copy()
    deg = ctx.degrees(w)
    if cfg.rho1 > 0:
        a = ctx.sqrt_coeff
        aw = float(a @ w)
        if aw <= cfg.sqrt_floor * float(a.max()) * cfg.s:
            raise NonsmoothPointError(
                f"square-root term nonsmooth: a @ w = {aw:.3g} at or below the "
                f"floor {cfg.sqrt_floor:.3g} * max(a) * s"
            )
        grad += a / (2.0 * math.sqrt(aw))
    if cfg.rho2 > 0:
        frob = _frobenius(ctx, w, deg)
        # adjoint(expand(w)) = deg_i + deg_j + 2 w_k per pair.
        grad += cfg.rho2 * (deg[ctx.rows] + deg[ctx.cols] + 2.0 * w) / frob
    if cfg.quad_weight > 0:
        grad += 2.0 * cfg.quad_weight * w
    if cfg.regularizer == "log_barrier":
        if deg.min() <= 0.0:
            raise BarrierDomainError(
                f"log-barrier domain violated: min degree {deg.min():.3g} <= 0"
            )
        grad -= cfg.alpha * (1.0 / deg[ctx.rows] + 1.0 / deg[ctx.cols])
    return grad


def worst_case_mean_risk(L: np.ndarray, mean: np.ndarray, rho1: float) -> float:
    """sup of mu @ L @ mu over the rho1-ellipsoid of means around the estimate.

    Closed form (sqrt(mean @ L @ mean) + rho1)^2; the quadratic form is
    clamped at zero before the square root to absorb round-off on the PSD
    cone boundary.
    """
    if rho1 < 0:
        raise ValueError(f"rho1 must be nonnegative, got {rho1}")
    q = float(np.asarray(mean) @ np.asarray(L) @ np.asarray(mean))
    return (math.sqrt(max(q, 0.0)) + rho1) ** 2


def worst_case_cov_risk(L: np.ndarray, cov: np.ndarray, rho2: float) -> float:
    """sup of trace(S @ L) over the rho2 Frobenius ball of covariances.

    Closed form trace(cov @ L) + rho2 * ||L||_F, attained at
    cov + rho2 * L / ||L||_F (which stays PSD because L is).
    """
    if rho2 < 0:
        raise ValueError(f"rho2 must be nonnegative, got {rho2}")
    L = np.asarray(L, dtype=float)
    return float(np.sum(np.asarray(cov) * L)) + rho2 * float(np.linalg.norm(L))


def worst_case_value(ctx: ObjectiveContext, w: np.ndarray) -> float:
    """Full worst-case risk at w, i.e. g(w) plus the constant rho1^2.

    The constant is irrelevant to the minimization but belongs in any
    reported risk value.
    """
    return objective_value(ctx, w) + ctx.config.rho1**2
