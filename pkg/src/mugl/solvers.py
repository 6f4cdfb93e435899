"""Projected-gradient solvers over the scaled weight simplex.

Two variants share the projection and the stopping logic:

* pgd_solve: fixed step size.  Cheap per iteration, but the step is a user
  choice and nothing guards against overshoot, so prefer the line-search
  variant unless you know the objective's curvature.
* ls_pgd_solve: computes the projected step once per iteration at the
  maximum step size, then backtracks along the segment toward it until a
  sufficient-decrease (Armijo) condition holds.  Because the trial points
  are convex combinations of feasible points they stay feasible, and
  because a rejected trial can return +inf (log-barrier) the backtracking
  also acts as the domain guard: iterates never leave the barrier domain.

Stationarity is measured by the projected-gradient residual
||w - project(w - t * grad)|| / t, which vanishes exactly at constrained
stationary points.  Both solvers stop on the disjunction of a step-size
tolerance (infinity norm of the update) and a residual tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import objective as obj

TERMINATIONS = ("step_tol", "kkt_tol", "max_iters", "nonsmooth_abort")

# Armijo predicted-decrease quantities must be nonpositive up to round-off;
# anything above this signals a corrupted gradient and aborts loudly.
DECREASE_SLACK = 1e-12

DEFAULT_RESIDUAL_PROBE = 1e-3


class LineSearchStallError(RuntimeError):
    """Backtracking exhausted its budget without sufficient decrease."""


@dataclass(frozen=True)
class SolverOptions:
    """Iteration budget, step sizes, and stopping tolerances.

    step is the fixed PGD step; eta_max is the line-search base step with
    eta_min its lower guard; beta and gamma are the Armijo acceptance slope
    and backtracking ratio; tol_step and tol_kkt are the stopping
    tolerances; max_backtracks caps the backtracking exponent.
    """

    max_iters: int = 10_000
    step: float = 0.01
    eta_min: float = 1e-6
    eta_max: float = 1.0
    beta: float = 1e-4
    gamma: float = 0.5
    tol_step: float = 1e-8
    tol_kkt: float = 1e-6
    max_backtracks: int = 60

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not 0 < self.eta_min <= self.eta_max:
            raise ValueError(
                f"need 0 < eta_min <= eta_max, got ({self.eta_min}, {self.eta_max})"
            )
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.tol_step < 0 or self.tol_kkt < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.max_backtracks < 1:
            raise ValueError(f"max_backtracks must be positive, got {self.max_backtracks}")


@dataclass
class SolveReport:
    """Final iterate plus the diagnostics needed to audit a run."""

    w_final: np.ndarray
    objective_trace: list[float]
    iters: int
    kkt_residual: float
    termination: str

    @property
    def converged(self) -> bool:
        return self.termination in ("step_tol", "kkt_tol")


def project_simplex(v: np.ndarray, s: float) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum(w) = s}.

    Sort-based thresholding: find the largest support for which shifting by
    a common offset keeps all supported entries positive, clamp the rest to
    zero.  The surviving entries are then shifted once more by the residual
    mass so the sum equals s to the last bit.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a nonempty vector, got shape {v.shape}")
    if not s > 0:
        raise ValueError(f"simplex scale must be positive, got s={s}")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    support = u - (css - s) / idx > 0
    rho = int(np.nonzero(support)[0][-1]) + 1
    tau = (css[rho - 1] - s) / rho
    w = np.maximum(v - tau, 0.0)
    pos = w > 0
    w[pos] += (s - w.sum()) / pos.sum()
    return w


def stationarity_residual(
    ctx: obj.ObjectiveContext,
    w: np.ndarray,
    probe_step: float = DEFAULT_RESIDUAL_PROBE,
) -> float:
    """||w - project(w - probe_step * grad)||_2 / probe_step.

    Zero exactly at constrained stationary points, for any probe step.
    """
    if not probe_step > 0:
        raise ValueError(f"probe step must be positive, got {probe_step}")
    g = obj.gradient(ctx, w)
    moved = project_simplex(w - probe_step * g, ctx.config.s)
    return float(np.linalg.norm(w - moved)) / probe_step


def _final_residual(ctx: obj.ObjectiveContext, w: np.ndarray) -> float:
    try:
        return stationarity_residual(ctx, w)
    except (obj.NonsmoothPointError, obj.BarrierDomainError):
        return math.nan


def pgd_solve(
    ctx: obj.ObjectiveContext, w0: np.ndarray, opts: SolverOptions | None = None
) -> SolveReport:
    """Fixed-step projected gradient descent from a feasible w0.

    Each iteration projects w - step * grad back onto the simplex.  A
    nonsmooth square-root point encountered at an iterate aborts the run
    with termination "nonsmooth_abort"; an infeasible w0 raises.
    """
    opts = opts or SolverOptions()
    s = ctx.config.s
    w = np.asarray(w0, dtype=float).copy()
    trace = [obj.objective_value(ctx, w)]
    termination = "max_iters"
    iters = 0
    for iters in range(1, opts.max_iters + 1):
        try:
            g = obj.gradient(ctx, w)
        except obj.NonsmoothPointError:
            return SolveReport(w, trace, iters - 1, math.nan, "nonsmooth_abort")
        w_next = project_simplex(w - opts.step * g, s)
        delta = w_next - w
        w = w_next
        trace.append(obj.objective_value(ctx, w))
        if float(np.linalg.norm(delta)) / opts.step <= opts.tol_kkt:
            termination = "kkt_tol"
            break
        if float(np.abs(delta).max()) <= opts.tol_step:
            termination = "step_tol"
            break
    return SolveReport(w, trace, iters, _final_residual(ctx, w), termination)


def ls_pgd_solve(
    ctx: obj.ObjectiveContext, w0: np.ndarray, opts: SolverOptions | None = None
) -> SolveReport:
    """Projected gradient with Armijo backtracking along the projection arc.

    Per iteration: take the full projected step v at eta_max, then accept
    w + gamma^t * v for the smallest t whose objective sits below the
    Armijo line through the predicted decrease
    Gamma = grad @ v + ||v||^2 / (2 eta).  Gamma <= 0 by the projection
    theorem, so accepted objectives never increase.  Trial points outside
    the log-barrier domain evaluate to +inf and are rejected like any other
    insufficient decrease.
    """
    opts = opts or SolverOptions()
    s = ctx.config.s
    # Constant base-step schedule; eta_min is the guard rail any adaptive
    # schedule would have to respect, kept for option validation.
    eta = opts.eta_max
    w = np.asarray(w0, dtype=float).copy()
    f_cur = obj.objective_value(ctx, w)
    if not math.isfinite(f_cur):
        raise obj.BarrierDomainError("infeasible start: objective not finite at w0")
    trace = [f_cur]
    termination = "max_iters"
    iters = 0
    for iters in range(1, opts.max_iters + 1):
        try:
            g = obj.gradient(ctx, w)
        except obj.NonsmoothPointError:
            return SolveReport(w, trace, iters - 1, math.nan, "nonsmooth_abort")
        v = project_simplex(w - eta * g, s) - w
        v_norm = float(np.linalg.norm(v))
        if v_norm / eta <= opts.tol_kkt:
            termination = "kkt_tol"
            break
        predicted = float(g @ v) + v_norm**2 / (2.0 * eta)
        if predicted > DECREASE_SLACK:
            raise RuntimeError(
                f"projected step predicts increase ({predicted:.3g} > 0); "
                "gradient and projection are inconsistent"
            )
        accepted = False
        scale = 1.0
        for _ in range(opts.max_backtracks + 1):
            trial = w + scale * v
            f_trial = obj.objective_value(ctx, trial)
            if f_trial <= f_cur + opts.beta * scale * predicted:
                accepted = True
                break
            scale *= opts.gamma
        if not accepted:
            raise LineSearchStallError(
                f"no sufficient decrease within {opts.max_backtracks} backtracks "
                f"at iteration {iters}"
            )
        step_inf = scale * float(np.abs(v).max())
        w = trial
        f_cur = f_trial
        trace.append(f_cur)
        if step_inf <= opts.tol_step:
            termination = "step_tol"
            break
    return SolveReport(w, trace, iters, _final_residual(ctx, w), termination)
