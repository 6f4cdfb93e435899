"""Empirical first and second moments of signal matrices, and the
sample-size-driven radii that bound how far those estimates can sit from the
population moments.

Signals are columns of an m x n matrix X (m nodes, n observations).  The
empirical covariance uses the 1/n convention, so the plug-in risk identity

    trace(cov @ L) + mean @ L @ mean == (1/n) * trace(X.T @ L @ X)

holds exactly.  The radii come from sub-Gaussian concentration bounds: the
mean estimate lives in an ellipsoid of radius rho1, the covariance estimate
in a Frobenius ball of radius rho2, each shrinking in n at the usual
1/sqrt(n) rate up to logarithmic factors in the confidence level delta.
Absolute constants in those bounds are not identifiable from data, so they
are exposed as parameters c0, c1, c2 defaulting to 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

# delta may not exceed exp(-2); beyond that the mean bound's derivation no
# longer applies, so we reject rather than silently extrapolate.
DELTA_MAX = math.exp(-2.0)

POWER_ITER_REL_TOL = 1e-8
POWER_ITER_MAX = 100_000


@dataclass(frozen=True)
class EmpiricalMoments:
    """Sample mean, 1/n sample covariance, and the sample count behind them."""

    mean: np.ndarray
    cov: np.ndarray
    n: int


@dataclass(frozen=True)
class RadiusParams:
    """Knobs of the confidence-radius formulas.

    sigma_norm is the spectral-norm scale of the covariance appearing in the
    covariance bound; None means "plug in the spectral norm of the sample
    covariance at calibration time".
    """

    delta: float = 0.05
    c0: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    sigma_norm: float | None = None

    def __post_init__(self):
        if not (0.0 < self.delta <= DELTA_MAX):
            raise ValueError(
                f"delta must lie in (0, e^-2] ~ (0, {DELTA_MAX:.4f}], got {self.delta}"
            )
        for name in ("c0", "c1", "c2"):
            val = getattr(self, name)
            if not val > 0.0:
                raise ValueError(f"{name} must be positive, got {val}")
        if self.sigma_norm is not None and not self.sigma_norm > 0.0:
            raise ValueError(f"sigma_norm must be positive, got {self.sigma_norm}")


def empirical_moments(X: np.ndarray) -> EmpiricalMoments:
    """Mean and 1/n covariance of the columns of X (m x n)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"signal matrix must be 2-d, got shape {X.shape}")
    m, n = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 observations for a covariance, got n={n}")
    if not np.isfinite(X).all():
        raise ValueError("signal matrix contains non-finite entries")
    mean = X.mean(axis=1)
    centered = X - mean[:, None]
    cov = (centered @ centered.T) / n
    return EmpiricalMoments(mean=mean, cov=cov, n=n)


def expected_risk(mean: np.ndarray, cov: np.ndarray, L: np.ndarray) -> float:
    """Laplacian quadratic risk trace(cov @ L) + mean @ L @ mean."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    L = np.asarray(L, dtype=float)
    if cov.shape != L.shape or mean.size != L.shape[0]:
        raise ValueError(
            f"shape mismatch: mean {mean.shape}, cov {cov.shape}, L {L.shape}"
        )
    return float(np.sum(cov * L) + mean @ L @ mean)


def rho1_radius(params: RadiusParams, n: int) -> float:
    """Confidence radius for the mean estimate after n observations.

    Square root of the high-probability bound 4 c0 e^2 ln^2(1/delta) / n on
    the squared ellipsoid distance between sample and population mean.
    """
    if n < 1:
        raise ValueError(f"sample count must be positive, got n={n}")
    return math.sqrt(4.0 * params.c0 * math.e**2 * math.log(1.0 / params.delta) ** 2 / n)


def rho2_radius(params: RadiusParams, m: int, n: int) -> float:
    """Confidence radius for the covariance estimate in Frobenius norm.

    Two-term bound: a 1/sqrt(n) term scaled by the covariance spectral norm
    with a log^{3/2}(2 m^{3/2}/delta) factor, plus a faster 1/n term.
    Requires a concrete sigma_norm; calibrate one first if the params carry
    the plug-in sentinel.
    """
    if n < 1:
        raise ValueError(f"sample count must be positive, got n={n}")
    if m < 1:
        raise ValueError(f"node count must be positive, got m={m}")
    if params.sigma_norm is None:
        raise ValueError(
            "sigma_norm unresolved; replace the None sentinel with a concrete "
            "spectral-norm scale before evaluating the covariance radius"
        )
    slow = (
        4.0
        * params.c1
        * (2.0 * math.e / 3.0) ** 1.5
        * math.log(2.0 * m**1.5 / params.delta) ** 1.5
        * params.sigma_norm
        / math.sqrt(n)
    )
    fast = 4.0 * params.c2 * math.e**2 * math.log(2.0 / params.delta) ** 2 / n
    return slow + fast


def calibrated(params: RadiusParams, cov: np.ndarray) -> RadiusParams:
    """Resolve the sigma_norm plug-in against a concrete sample covariance."""
    if params.sigma_norm is not None:
        return params
    return replace(params, sigma_norm=max(spectral_norm(cov), np.finfo(float).tiny))


def spectral_norm(A: np.ndarray, rel_tol: float = POWER_ITER_REL_TOL) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Deterministic: the starting vector comes from a fixed-seed generator, so
    repeated calls on the same matrix give bit-identical results.  Stops when
    the Rayleigh quotient moves by less than rel_tol relatively.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = np.abs(A).max()
    if scale == 0.0:
        return 0.0
    rng = np.random.default_rng(0x5EED)
    v = rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(POWER_ITER_MAX):
        Av = A @ v
        norm_Av = np.linalg.norm(Av)
        if norm_Av == 0.0:
            return 0.0
        v = Av / norm_Av
        lam_next = float(v @ A @ v)
        if abs(lam_next - lam) <= rel_tol * max(abs(lam_next), scale * 1e-300):
            return lam_next
        lam = lam_next
    return lam


def write_signals_csv(path, X: np.ndarray) -> None:
    """Write signals as CSV: header node_1..node_m, one row per observation.

    The on-disk layout is the transpose of the in-memory m x n matrix.
    Floats carry 17 significant digits for an exact round-trip.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"signal matrix must be 2-d, got shape {X.shape}")
    m = X.shape[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"node_{i}" for i in range(1, m + 1)])
        for row in X.T:
            writer.writerow([f"{x:.17g}" for x in row])


def read_signals_csv(path) -> np.ndarray:
    """Parse a signals CSV back into an m x n matrix.

    The header fixes m; every data row must have exactly m fields.  Errors
    cite the offending row number.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty signals file") from None
        expected = [f"node_{i}" for i in range(1, len(header) + 1)]
        if header != expected:
            raise ValueError(
                f"{path}: bad header {header[:4]}..., expected node_1..node_{len(header)}"
            )
        m = len(header)
        rows = []
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != m:
                raise ValueError(
                    f"{path}: row {rownum} has {len(row)} fields, expected {m}"
                )
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                raise ValueError(f"{path}: row {rownum} has a non-numeric field") from None
    if not rows:
        raise ValueError(f"{path}: no observation rows")
    return np.array(rows).T
