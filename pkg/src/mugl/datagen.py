"""Synthetic graphs and smooth signals for benchmarking graph learners.

Three graph families:

* gaussian: nodes dropped uniformly in the unit square, pair weight
  exp(-dist^2 / (2 sigma^2)), edge kept with that weight when it reaches the
  threshold.  With the defaults (sigma 0.5, threshold 0.75) pairs closer
  than about 0.379 become edges.
* er: every pair independently an edge with probability p, weight 1.
* pa: preferential attachment.  theta0 initial nodes connected in a path,
  then each arriving node attaches to theta distinct existing nodes with
  probability proportional to degree (urn of repeated edge endpoints,
  redrawing duplicates), weight 1.

Signals follow the factor-analysis model tied to the graph: with
eigendecomposition L = U diag(lam) U', draw latent factors with variance
1/lam on the non-null eigenvectors (exactly zero variance on the null
space), add the offset mu_star and isotropic noise of scale epsilon.  The
resulting distribution is N(mu_star, pinv(L) + epsilon^2 I), so signal
energy concentrates on the graph's smooth spectral directions.

Randomness is split into named streams: graph topology and signal draws use
independent child generators of the spec seed, so regenerating signals never
perturbs the graph stream and vice versa.  Everything is bit-reproducible
for a fixed seed.  Disconnected draws are returned as-is; the connected flag
in the provenance is how downstream consumers find out.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .laplacian import edge_count, expand, pair_indices

GRAPH_FAMILIES = ("gaussian", "er", "pa")

# spawn_key values of the child generators (the stream-splitting rule).
GRAPH_STREAM = 0
SIGNAL_STREAM = 1

# Laplacian eigenvalues at or below RANK_TOL * lam_max count as null
# directions and get exactly zero latent variance.
RANK_TOL = 1e-10


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Child generator of `seed` for the given named stream."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream,)))


@dataclass(frozen=True)
class GraphSpec:
    """Family selector plus that family's parameters.

    Only the parameters of the chosen family are consulted; the rest keep
    their defaults and are ignored.
    """

    family: str
    m: int
    seed: int
    sigma: float = 0.5
    threshold: float = 0.75
    p: float = 0.2
    theta0: int = 2
    theta: int = 1

    def __post_init__(self):
        if self.family not in GRAPH_FAMILIES:
            raise ValueError(
                f"unknown graph family {self.family!r}, expected one of {GRAPH_FAMILIES}"
            )
        if self.m < 2:
            raise ValueError(f"need at least two nodes, got m={self.m}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.family == "gaussian":
            if not self.sigma > 0:
                raise ValueError(f"sigma must be positive, got {self.sigma}")
            if not 0 < self.threshold <= 1:
                raise ValueError(f"threshold must lie in (0, 1], got {self.threshold}")
        if self.family == "er" and not 0 <= self.p <= 1:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p}")
        if self.family == "pa":
            if self.theta0 < 2:
                raise ValueError(f"need at least two initial nodes, got theta0={self.theta0}")
            if self.theta0 > self.m:
                raise ValueError(
                    f"theta0={self.theta0} exceeds node count m={self.m}"
                )
            if not 1 <= self.theta <= self.theta0:
                raise ValueError(
                    f"attachment count theta={self.theta} must lie in 1..theta0"
                )


@dataclass(frozen=True)
class SignalSpec:
    """Observation count, noise scale, offset, and the signal-stream seed."""

    n: int
    epsilon: float
    seed: int
    mu_star: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one observation, got n={self.n}")
        if self.epsilon < 0:
            raise ValueError(f"noise scale must be nonnegative, got {self.epsilon}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")


@dataclass(frozen=True)
class GeneratedGraph:
    """Pair weights of a sampled graph plus its provenance facts."""

    weights: np.ndarray
    m: int
    family: str
    seed: int
    coords: np.ndarray | None = None

    @property
    def laplacian(self) -> np.ndarray:
        return expand(self.weights, self.m)

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(self.weights))

    @cached_property
    def connected(self) -> bool:
        rows, cols = pair_indices(self.m)
        nz = self.weights > 0
        adj = coo_matrix(
            (np.ones(int(nz.sum())), (rows[nz], cols[nz])), shape=(self.m, self.m)
        )
        n_comp, _ = connected_components(adj, directed=False)
        return n_comp == 1


def gen_graph(spec: GraphSpec) -> GeneratedGraph:
    """Dispatch to the generator of spec.family."""
    return {
        "gaussian": gen_gaussian_graph,
        "er": gen_er_graph,
        "pa": gen_pa_graph,
    }[spec.family](spec)


def rbf_weights(coords: np.ndarray, sigma: float) -> np.ndarray:
    """Pairwise exp(-dist^2 / (2 sigma^2)) in pair-index order."""
    coords = np.asarray(coords, dtype=float)
    rows, cols = pair_indices(coords.shape[0])
    diff = coords[rows] - coords[cols]
    dist_sq = np.sum(diff * diff, axis=1)
    return np.exp(-dist_sq / (2.0 * sigma**2))


def gen_gaussian_graph(spec: GraphSpec) -> GeneratedGraph:
    """Random geometric graph with RBF weights, thresholded."""
    if spec.family != "gaussian":
        raise ValueError(f"spec is for family {spec.family!r}")
    rng = stream_rng(spec.seed, GRAPH_STREAM)
    coords = rng.random((spec.m, 2))
    w = rbf_weights(coords, spec.sigma)
    w = np.where(w >= spec.threshold, w, 0.0)
    return GeneratedGraph(w, spec.m, spec.family, spec.seed, coords=coords)


def gen_er_graph(spec: GraphSpec) -> GeneratedGraph:
    """Independent unit-weight edges with probability p."""
    if spec.family != "er":
        raise ValueError(f"spec is for family {spec.family!r}")
    rng = stream_rng(spec.seed, GRAPH_STREAM)
    w = (rng.random(edge_count(spec.m)) < spec.p).astype(float)
    return GeneratedGraph(w, spec.m, spec.family, spec.seed)


def gen_pa_graph(spec: GraphSpec) -> GeneratedGraph:
    """Preferential attachment with unit weights.

    The urn holds one token per edge endpoint, so drawing uniformly from it
    is degree-proportional sampling.  Each arrival redraws until it has
    theta distinct targets, then its edges join the urn.
    """
    if spec.family != "pa":
        raise ValueError(f"spec is for family {spec.family!r}")
    rng = stream_rng(spec.seed, GRAPH_STREAM)
    m = spec.m
    edges = [(t, t - 1) for t in range(1, spec.theta0)]  # 0-based path seed
    urn = [node for e in edges for node in e]
    for arrival in range(spec.theta0, m):
        targets: set[int] = set()
        while len(targets) < spec.theta:
            targets.add(urn[rng.integers(len(urn))])
        for t in sorted(targets):
            edges.append((arrival, t))
            urn.extend((arrival, t))
    w = np.zeros(edge_count(m))
    rows, cols = pair_indices(m)
    lookup = {(int(i), int(j)): k for k, (i, j) in enumerate(zip(rows, cols))}
    for i, j in edges:
        w[lookup[(max(i, j), min(i, j))]] = 1.0
    return GeneratedGraph(w, m, spec.family, spec.seed)


def gen_signals(
    L: np.ndarray, spec: SignalSpec, rng: np.random.Generator | None = None
) -> np.ndarray:
    """Sample n signals from N(mu_star, pinv(L) + epsilon^2 I), one per column.

    Latent factors are drawn in the eigenbasis of L with variance 1/lam for
    eigenvalues above RANK_TOL * lam_max and exactly zero otherwise, then
    rotated back and corrupted by isotropic noise.  Pass an explicit rng to
    override the spec-seeded signal stream (tests use this to pin draws).
    """
    L = np.asarray(L, dtype=float)
    m = L.shape[0]
    if L.shape != (m, m):
        raise ValueError(f"Laplacian must be square, got shape {L.shape}")
    if spec.mu_star is not None and np.asarray(spec.mu_star).size != m:
        raise ValueError(
            f"mu_star has {np.asarray(spec.mu_star).size} entries, expected {m}"
        )
    if rng is None:
        rng = stream_rng(spec.seed, SIGNAL_STREAM)
    lam, U = np.linalg.eigh(L)
    lam_max = float(lam[-1])
    keep = lam > RANK_TOL * max(lam_max, 0.0)
    scale = np.zeros(m)
    scale[keep] = 1.0 / np.sqrt(lam[keep])
    latent = scale[:, None] * rng.standard_normal((m, spec.n))
    X = U @ latent
    if spec.mu_star is not None:
        X = X + np.asarray(spec.mu_star, dtype=float)[:, None]
    if spec.epsilon > 0:
        X = X + spec.epsilon * rng.standard_normal((m, spec.n))
    return X
