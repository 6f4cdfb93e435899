"""Edge-weight vectors, graph Laplacians, and the linear maps between them.

A weighted undirected graph on m nodes with no self-loops is fully described
by the m(m-1)/2 weights on its node pairs.  We keep those weights in a flat
vector ``w`` ordered column-by-column over the strictly-lower triangle:
(2,1), (3,1), ..., (m,1), (3,2), ..., (m,m-1) with 1-based node labels.
``expand`` turns such a vector into the combinatorial Laplacian
L = D - W, and ``adjoint`` is the transpose of that linear map, so that
trace(expand(w) @ M) == w @ adjoint(M) for every symmetric M.

Constraining w to the scaled simplex {w >= 0, sum(w) = s} is equivalent to
constraining L to the set of Laplacians with trace 2s, which is how the
optimization modules use these maps.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np

# Tolerances for validation helpers.  Feasibility checks are relative to the
# scale of the object being checked, never absolute.
DEFAULT_TOL = 1e-9

# Asymmetry beyond this (relative to max |entry|) triggers a warning in
# adjoint(); smaller asymmetry is silently symmetrized since floating-point
# products of symmetric factors routinely drift at round-off level.
SYMMETRY_WARN_RTOL = 1e-8


def edge_count(m: int) -> int:
    """Number of node pairs, m(m-1)/2."""
    if m < 1:
        raise ValueError(f"need at least one node, got m={m}")
    return m * (m - 1) // 2


def node_count(n_pairs: int) -> int:
    """Inverse of edge_count; raises if n_pairs is not a triangular number."""
    m = int(round((1 + np.sqrt(1 + 8 * n_pairs)) / 2))
    if m < 1 or m * (m - 1) // 2 != n_pairs:
        raise ValueError(f"{n_pairs} is not m(m-1)/2 for any node count m")
    return m


@lru_cache(maxsize=None)
def pair_indices(m: int):
    """0-based (rows, cols) arrays of the pair ordering for m nodes.

    rows[k] > cols[k] for every k, and the pairs run column-major over the
    strictly-lower triangle.  Arrays are cached per m and marked read-only.
    """
    if m < 1:
        raise ValueError(f"need at least one node, got m={m}")
    upper_r, upper_c = np.triu_indices(m, 1)
    # Row-major upper-triangle pairs, transposed, are exactly the
    # column-major lower-triangle ordering.
    rows, cols = upper_c.copy(), upper_r.copy()
    rows.flags.writeable = False
    cols.flags.writeable = False
    return rows, cols


def pair_to_linear(i: int, j: int, m: int) -> int:
    """1-based linear index of the pair (i, j), j < i, under the column-major
    lower-triangle ordering: k = i - j + (j-1)(2m-j)/2."""
    if not (1 <= j < i <= m):
        raise ValueError(f"pair ({i},{j}) invalid for m={m}: need 1 <= j < i <= m")
    return i - j + (j - 1) * (2 * m - j) // 2


def linear_to_pair(k: int, m: int) -> tuple[int, int]:
    """1-based (i, j) of linear index k; inverse of pair_to_linear."""
    mbar = edge_count(m)
    if not (1 <= k <= mbar):
        raise ValueError(f"linear index {k} out of range 1..{mbar} for m={m}")
    rows, cols = pair_indices(m)
    return int(rows[k - 1]) + 1, int(cols[k - 1]) + 1


def expand(w: np.ndarray, m: int | None = None) -> np.ndarray:
    """Laplacian L = D - W of the graph with pair weights w.

    Off-diagonals are -w_k at the corresponding pair, diagonals are the
    weighted degrees.  The result is symmetric by construction and its rows
    sum to zero up to round-off.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise ValueError(f"weight vector must be 1-d, got shape {w.shape}")
    if m is None:
        m = node_count(w.size)
    if w.size != edge_count(m):
        raise ValueError(
            f"weight vector has {w.size} entries, expected {edge_count(m)} for m={m}"
        )
    rows, cols = pair_indices(m)
    L = np.zeros((m, m))
    L[rows, cols] = -w
    L[cols, rows] = -w
    deg = np.zeros(m)
    np.add.at(deg, rows, w)
    np.add.at(deg, cols, w)
    L[np.arange(m), np.arange(m)] = deg
    return L


def adjoint(M: np.ndarray) -> np.ndarray:
    """Adjoint of expand applied to a symmetric matrix M.

    Entry k of the result is M_ii - M_ij - M_ji + M_jj for the pair (i, j)
    at linear position k.  Inputs that are only asymmetric at round-off are
    symmetrized silently; material asymmetry additionally raises a warning.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    m = M.shape[0]
    sym_gap = np.abs(M - M.T).max() if m > 1 else 0.0
    if sym_gap > SYMMETRY_WARN_RTOL * max(1.0, np.abs(M).max()):
        warnings.warn(
            f"adjoint() input asymmetric (max gap {sym_gap:.3g}); symmetrizing",
            stacklevel=2,
        )
    S = 0.5 * (M + M.T)
    rows, cols = pair_indices(m)
    d = np.diag(S)
    return d[rows] + d[cols] - 2.0 * S[rows, cols]


def validate_simplex(w: np.ndarray, s: float, tol: float = DEFAULT_TOL) -> bool:
    """True iff w >= -tol entrywise and |sum(w) - s| <= tol * max(1, s)."""
    w = np.asarray(w, dtype=float)
    if s <= 0:
        raise ValueError(f"simplex scale must be positive, got s={s}")
    if w.size == 0:
        return False
    return bool(w.min() >= -tol and abs(w.sum() - s) <= tol * max(1.0, s))


def is_laplacian(L: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Check symmetry, nonpositive off-diagonals, and zero row sums.

    All comparisons are relative to max(1, ||L||_F).
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        return False
    scale = max(1.0, float(np.linalg.norm(L)))
    if np.abs(L - L.T).max() > tol * scale:
        return False
    off = L - np.diag(np.diag(L))
    if off.max() > tol * scale:
        return False
    return bool(np.abs(L.sum(axis=1)).max() <= tol * scale)


def write_edge_list(path, w: np.ndarray, m: int) -> None:
    """Write the nonzero pair weights as an edge-list text file.

    Format: a header line ``# m=<nodes>`` followed by one ``i j weight`` line
    per nonzero pair, 1-based with i > j, weights at 17 significant digits so
    the round-trip through text is exact.
    """
    w = np.asarray(w, dtype=float)
    if w.size != edge_count(m):
        raise ValueError(
            f"weight vector has {w.size} entries, expected {edge_count(m)} for m={m}"
        )
    rows, cols = pair_indices(m)
    lines = [f"# m={m}"]
    for k in np.flatnonzero(w):
        lines.append(f"{rows[k] + 1} {cols[k] + 1} {w[k]:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edge_list(path) -> tuple[np.ndarray, int]:
    """Parse an edge-list file back into (weights, m).

    Unlisted pairs get weight zero.  Malformed headers or lines, out-of-range
    node labels, i <= j, and duplicate pairs all raise ValueError with the
    offending line number.
    """
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or not raw[0].startswith("# m="):
        raise ValueError(f"{path}: missing '# m=<nodes>' header")
    try:
        m = int(raw[0][len("# m=") :])
    except ValueError:
        raise ValueError(f"{path}: unparseable node count in header {raw[0]!r}") from None
    if m < 1:
        raise ValueError(f"{path}: node count must be positive, got {m}")
    w = np.zeros(edge_count(m))
    seen = set()
    for lineno, line in enumerate(raw[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'i j weight', got {line!r}")
        try:
            i, j, weight = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: unparseable edge line {line!r}") from None
        try:
            k = pair_to_linear(i, j, m)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        if k in seen:
            raise ValueError(f"{path}:{lineno}: duplicate pair ({i},{j})")
        seen.add(k)
        w[k - 1] = weight
    return w, m
