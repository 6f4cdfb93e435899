"""Model presets and the seeded benchmark loop.

Four presets cover the model family:

* mugl_o: robust objective, no regularizer.
* mugl_l: robust objective plus the log-degree barrier.
* vsgl: both radii forced to zero, no regularizer; the plain smoothness
  baseline whose minimizers concentrate on few pairs.
* log_model: radii zero, log-degree barrier plus the squared off-diagonal
  penalty; the classical non-robust log-degree model.

Robust presets take their radii either explicitly or, by default, from the
sample-size calibration with the covariance spectral norm plugged in.  The
simplex scale is tied to the node count (s = m), matching how the synthetic
benchmarks are run.  Smooth presets solve with fixed-step PGD; whenever the
barrier is active the line-search solver is used, since its rejection of
+inf trials is what keeps iterates inside the barrier domain.

run_experiment draws (graph, signals) pairs from per-run child seeds of a
master seed, learns every preset on every draw, scores edge recovery
against the generating graph, and aggregates mean and normalized standard
deviation per model and metric.  A solver failure on one draw is recorded
and skipped, never fatal.  Results are deterministic functions of the
master seed, including under seed-level threading.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import solvers
from .datagen import GeneratedGraph, GraphSpec, SignalSpec, gen_graph, gen_signals
from .evaluation import DEFAULT_REL_THRESHOLD, metric_record
from .laplacian import edge_count, expand
from .moments import EmpiricalMoments, RadiusParams, calibrated, empirical_moments, rho1_radius, rho2_radius
from .objective import ModelConfig, build_context
from .serialize import format_float

PRESET_NAMES = ("mugl_o", "mugl_l", "vsgl", "log_model")
SUMMARY_METRICS = ("precision", "recall", "f_measure", "nmi")

DEFAULT_ALPHA = 0.5
DEFAULT_QUAD_WEIGHT = 0.5


@dataclass(frozen=True)
class ModelPreset:
    """A named model with its radii source, penalties, and solver options.

    rho1/rho2 left as None means calibrate from the data via radius_params
    (robust presets only; the non-robust presets pin both radii to zero and
    reject explicit nonzero values).  label distinguishes multiple presets
    of the same name in one experiment, e.g. a grid over alpha.
    """

    name: str
    label: str | None = None
    rho1: float | None = None
    rho2: float | None = None
    radius_params: RadiusParams = field(default_factory=RadiusParams)
    alpha: float = DEFAULT_ALPHA
    quad_weight: float = DEFAULT_QUAD_WEIGHT
    solver: solvers.SolverOptions = field(default_factory=solvers.SolverOptions)

    def __post_init__(self):
        if self.name not in PRESET_NAMES:
            raise ValueError(f"unknown preset {self.name!r}, expected one of {PRESET_NAMES}")
        if self.name in ("vsgl", "log_model"):
            for radius in (self.rho1, self.rho2):
                if radius is not None and radius != 0.0:
                    raise ValueError(f"{self.name} is non-robust; radii must be 0 or omitted")
        for radius in (self.rho1, self.rho2):
            if radius is not None and radius < 0:
                raise ValueError(f"radii must be nonnegative, got {radius}")

    @property
    def display_name(self) -> str:
        return self.label if self.label is not None else self.name

    @property
    def uses_barrier(self) -> bool:
        return self.name in ("mugl_l", "log_model")


def resolve_config(preset: ModelPreset, moments: EmpiricalMoments, m: int) -> ModelConfig:
    """Concrete objective config for this preset on this data (s = m)."""
    if preset.name in ("vsgl", "log_model"):
        rho1 = rho2 = 0.0
    else:
        params = calibrated(preset.radius_params, moments.cov)
        rho1 = preset.rho1 if preset.rho1 is not None else rho1_radius(params, moments.n)
        rho2 = preset.rho2 if preset.rho2 is not None else rho2_radius(params, m, moments.n)
    return ModelConfig(
        rho1=rho1,
        rho2=rho2,
        s=float(m),
        regularizer="log_barrier" if preset.uses_barrier else "none",
        alpha=preset.alpha,
        quad_weight=preset.quad_weight if preset.name == "log_model" else 0.0,
    )


def learn(preset: ModelPreset, X: np.ndarray) -> tuple[np.ndarray, solvers.SolveReport]:
    """Fit the preset to signals X and return (Laplacian, solve report).

    Starts from the simplex centroid.  The returned Laplacian has trace 2m;
    the weight vector itself sits in the report.
    """
    X = np.asarray(X, dtype=float)
    m = X.shape[0]
    moments = empirical_moments(X)
    config = resolve_config(preset, moments, m)
    ctx = build_context(moments, config)
    mbar = edge_count(m)
    w0 = np.full(mbar, config.s / mbar)
    solve = solvers.ls_pgd_solve if preset.uses_barrier else solvers.pgd_solve
    report = solve(ctx, w0, preset.solver)
    return expand(report.w_final, m), report


@dataclass
class ExperimentSummary:
    """Everything a benchmark run produced, aggregated and per-seed."""

    graph_spec: GraphSpec
    signal_spec: SignalSpec
    presets: tuple[ModelPreset, ...]
    n_seeds: int
    master_seed: int
    rel_threshold: float
    records: list[dict]
    failures: list[dict]
    stats: list[dict]


def run_seeds(master_seed: int, n_seeds: int) -> list[tuple[int, int]]:
    """Per-run (graph_seed, signal_seed) pairs derived from the master seed.

    Run r spawns child entropy via SeedSequence(master_seed, spawn_key=(r,)),
    so runs are independent and any prefix of the schedule is stable when
    n_seeds grows.
    """
    pairs = []
    for r in range(n_seeds):
        ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(r,))
        g, s = ss.generate_state(2, dtype=np.uint64)
        pairs.append((int(g), int(s)))
    return pairs


def _run_one(
    graph_spec: GraphSpec,
    signal_spec: SignalSpec,
    presets: tuple[ModelPreset, ...],
    rel_threshold: float,
    seed_index: int,
    graph_seed: int,
    signal_seed: int,
) -> dict:
    graph = gen_graph(replace(graph_spec, seed=graph_seed))
    X = gen_signals(graph.laplacian, replace(signal_spec, seed=signal_seed))
    truth_mask = graph.weights > 0
    record = {
        "seed_index": seed_index,
        "graph_seed": graph_seed,
        "signal_seed": signal_seed,
        "n_edges_true": graph.n_edges,
        "connected": graph.connected,
        "models": {},
    }
    for preset in presets:
        try:
            _, report = learn(preset, X)
        except (RuntimeError, np.linalg.LinAlgError) as exc:
            record["models"][preset.display_name] = {"error": str(exc)}
            continue
        if report.termination == "nonsmooth_abort":
            record["models"][preset.display_name] = {"error": "nonsmooth_abort"}
            continue
        entry = metric_record(report.w_final, truth_mask, rel_threshold)
        entry["iters"] = report.iters
        entry["termination"] = report.termination
        entry["objective"] = report.objective_trace[-1]
        record["models"][preset.display_name] = entry
    return record


def run_experiment(
    graph_spec: GraphSpec,
    signal_spec: SignalSpec,
    presets,
    n_seeds: int,
    master_seed: int = 0,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
    threads: int = 1,
) -> ExperimentSummary:
    """Generate, learn, and score n_seeds independent draws.

    threads > 1 runs whole seeds concurrently; results are merged in seed
    order so the output is identical to the sequential run.
    """
    presets = tuple(presets)
    if not presets:
        raise ValueError("need at least one preset")
    if n_seeds < 1:
        raise ValueError(f"need at least one seed, got n_seeds={n_seeds}")
    labels = [p.display_name for p in presets]
    if len(set(labels)) != len(labels):
        raise ValueError(f"preset labels must be unique, got {labels}")
    seeds = run_seeds(master_seed, n_seeds)
    jobs = [
        (graph_spec, signal_spec, presets, rel_threshold, r, g, s)
        for r, (g, s) in enumerate(seeds)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda args: _run_one(*args), jobs))
    else:
        records = [_run_one(*args) for args in jobs]
    failures = [
        {"seed_index": rec["seed_index"], "model": label, "error": entry["error"]}
        for rec in records
        for label, entry in rec["models"].items()
        if "error" in entry
    ]
    stats = summarize(records, labels)
    return ExperimentSummary(
        graph_spec=graph_spec,
        signal_spec=signal_spec,
        presets=presets,
        n_seeds=n_seeds,
        master_seed=master_seed,
        rel_threshold=rel_threshold,
        records=records,
        failures=failures,
        stats=stats,
    )


def summarize(records: list[dict], labels) -> list[dict]:
    """Mean and normalized std (population, as percent of the mean) per
    model and metric, over the seeds where that model succeeded."""
    stats = []
    for label in labels:
        values = {metric: [] for metric in SUMMARY_METRICS}
        for rec in records:
            entry = rec["models"].get(label)
            if entry is None or "error" in entry:
                continue
            for metric in SUMMARY_METRICS:
                values[metric].append(entry[metric])
        for metric in SUMMARY_METRICS:
            vals = np.array(values[metric], dtype=float)
            if vals.size:
                mean = float(vals.mean())
                spread = 100.0 * float(vals.std()) / mean if mean != 0.0 else 0.0
            else:
                mean, spread = 0.0, 0.0
            stats.append(
                {
                    "model": label,
                    "metric": metric,
                    "mean": mean,
                    "normalized_std_percent": spread,
                    "n_seeds": int(vals.size),
                }
            )
    return stats


def write_summary_csv(path, summary: ExperimentSummary) -> None:
    """Aggregate table: one row per model and metric."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "metric", "mean", "normalized_std_percent", "n_seeds"])
        for row in summary.stats:
            writer.writerow(
                [
                    row["model"],
                    row["metric"],
                    format_float(row["mean"]),
                    format_float(row["normalized_std_percent"]),
                    row["n_seeds"],
                ]
            )


def summary_doc(summary: ExperimentSummary) -> dict:
    """JSON-ready document with provenance, per-seed records, and stats."""
    from . import __version__

    graph_doc = asdict(summary.graph_spec)
    signal_doc = asdict(summary.signal_spec)
    if signal_doc["mu_star"] is not None:
        signal_doc["mu_star"] = [float(x) for x in signal_doc["mu_star"]]
    return {
        "version": __version__,
        "graph_spec": graph_doc,
        "signal_spec": signal_doc,
        "presets": [preset_doc(p) for p in summary.presets],
        "n_seeds": summary.n_seeds,
        "master_seed": summary.master_seed,
        "rel_threshold": summary.rel_threshold,
        "records": summary.records,
        "failures": summary.failures,
        "stats": summary.stats,
    }


def preset_doc(preset: ModelPreset) -> dict:
    doc = asdict(preset)
    doc["label"] = preset.display_name
    return doc
