"""Random-graph survey: how often the criterion certifies, and at what k.

Generates acyclic graphs with Bernoulli upper-triangular adjacency, runs
the decision procedure at several bounds on the latent cut size, repeats
the decision on each graph's canonical form, and tabulates the counts per
edge probability into a CSV.  The graph stream is a pure function of the
config seed, so the count columns of two runs with the same config are
identical; the timing column is wall-clock and is not.
"""

from __future__ import annotations

import csv
import io
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .criterion import decide, verify_certificate
from .graphs import LatentDigraph, canonicalize

#: Branch-and-bound node budget per decision, matching the harness default.
DEFAULT_NODE_BUDGET = 100_000


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one survey run.

    Attributes:
        n_observed: Observed nodes per graph.
        n_latent: Latent nodes per graph.
        edge_probs: Edge probabilities to sweep, each in (0, 1).
        graphs_per_prob: Graphs drawn per probability.
        k_bounds: Bounds on |H1| + |H2| to decide each graph at.
        seed: Seed of the graph stream.
        parallelism: Worker processes; 1 runs in-process.
        node_budget: Branch-and-bound node budget per decision.
    """

    n_observed: int = 10
    n_latent: int = 5
    edge_probs: tuple[float, ...] = (0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45)
    graphs_per_prob: int = 100
    k_bounds: tuple[int, ...] = (1, 2)
    seed: int = 0
    parallelism: int = 1
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self) -> None:
        if self.n_observed <= 0 or self.n_latent <= 0:
            raise ValueError("node counts must be positive")
        if self.graphs_per_prob < 0:
            raise ValueError("graphs_per_prob must be nonnegative")
        if not self.k_bounds or any(k < 0 for k in self.k_bounds):
            raise ValueError("k_bounds must be nonnegative")
        if self.parallelism <= 0:
            raise ValueError("parallelism must be positive")
        for p in self.edge_probs:
            if not 0.0 < p < 1.0:
                raise ValueError(f"edge probability {p} outside (0, 1)")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ValueError("config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        for key in ("edge_probs", "k_bounds"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)


def random_graph(
    n_observed: int,
    n_latent: int,
    p: float,
    rng: random.Random,
) -> LatentDigraph:
    """Draw one acyclic graph with Bernoulli(p) upper-triangular adjacency.

    Nodes are created in a fixed generation order; each forward pair
    (i, j), i < j, gets an edge with probability p, scanned row by row.
    The observed/latent split is then a uniform sample of the requested
    sizes.  All randomness comes from ``rng``, so the same generator
    state always yields the same graph.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"edge probability {p} outside (0, 1)")
    n = n_observed + n_latent
    names = [f"x{i + 1}" for i in range(n)]
    edges = [
        (names[i], names[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    latent = set(rng.sample(names, n_latent))
    return LatentDigraph(
        observed=[v for v in names if v not in latent],
        latent=[v for v in names if v in latent],
        edges=edges,
    )


@dataclass
class CellCounts:
    """Aggregated counts for one (edge probability, k) cell.

    Attributes:
        n_total: Graphs decided.
        n_lsc: Graphs certified at this k.
        n_lsc_can: Graphs whose canonical form is certified (at max k).
        n_g_not_can: Certified at this k but canonical form not.
        n_can_not_g: Canonical form certified but this k not.
        n_timeout: Decisions at this k that hit the node budget without
            certifying.
        seconds: Wall-clock spent on this cell's decisions.
    """

    n_total: int = 0
    n_lsc: int = 0
    n_lsc_can: int = 0
    n_g_not_can: int = 0
    n_can_not_g: int = 0
    n_timeout: int = 0
    seconds: float = 0.0


@dataclass
class ExperimentResult:
    """Counts per (edge probability, k) plus run-level bookkeeping.

    Attributes:
        config: The config the run used.
        cells: Mapping (edge_prob, k) -> CellCounts.
        canonical_timeouts: Canonical-form decisions that hit the budget
            without certifying (counted as not certified).
        certificate_failures: Certified graphs whose certificate failed
            re-verification; always expected to be zero.
    """

    config: ExperimentConfig
    cells: dict[tuple[float, int], CellCounts] = field(default_factory=dict)
    canonical_timeouts: int = 0
    certificate_failures: int = 0

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            [
                "edge_prob",
                "k",
                "n_total",
                "n_lsc",
                "n_lsc_can",
                "n_G_not_can",
                "n_can_not_G",
                "n_timeout",
                "seconds",
            ]
        )
        for (p, k) in sorted(self.cells):
            cell = self.cells[(p, k)]
            writer.writerow(
                [
                    p,
                    k,
                    cell.n_total,
                    cell.n_lsc,
                    cell.n_lsc_can,
                    cell.n_g_not_can,
                    cell.n_can_not_g,
                    cell.n_timeout,
                    f"{cell.seconds:.3f}",
                ]
            )
        return out.getvalue()

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as handle:
            handle.write(self.to_csv())


def _graph_seed(seed: int, p: float, i: int) -> str:
    # String seeds hash deterministically across processes and runs.
    return f"{seed}:{p!r}:{i}"


def _decide_graph(
    args: tuple[int, int, float, str, tuple[int, ...], int],
) -> dict:
    """Worker: generate one graph and decide it at every bound.

    Returns plain data only, so results are cheap to ship between
    processes: per-k certified/timeout flags and timings, plus the same
    for the canonical form at the largest bound.
    """
    n_obs, n_lat, p, seed_key, k_bounds, budget = args
    rng = random.Random(seed_key)
    G = random_graph(n_obs, n_lat, p, rng)
    k_max = max(k_bounds)
    out: dict = {"k": {}, "bad_certificate": False}
    for k in k_bounds:
        start = time.perf_counter()
        result = decide(G, k_bound=k, node_budget=budget)
        elapsed = time.perf_counter() - start
        if result.certified and not verify_certificate(G, result.certificate).ok:
            out["bad_certificate"] = True
        timeout = bool(
            not result.certified and result.failure and result.failure.budget_exhausted
        )
        out["k"][k] = (bool(result.certified), timeout, elapsed)
    start = time.perf_counter()
    can_result = decide(canonicalize(G), k_bound=k_max, node_budget=budget)
    out["can"] = (
        bool(can_result.certified),
        bool(
            not can_result.certified
            and can_result.failure
            and can_result.failure.budget_exhausted
        ),
        time.perf_counter() - start,
    )
    return out


def run_experiment(
    cfg: ExperimentConfig,
    csv_path: Optional[str] = None,
) -> ExperimentResult:
    """Run the survey and optionally write the CSV.

    Every graph is decided once per entry of ``cfg.k_bounds`` and its
    canonical form once at the largest bound; the set-difference columns
    compare each k column against that canonical decision.  Decisions
    that exhaust the node budget count as not certified and are tallied
    in ``n_timeout`` (canonical ones in ``canonical_timeouts``).
    """
    result = ExperimentResult(config=cfg)
    jobs = [
        (
            cfg.n_observed,
            cfg.n_latent,
            p,
            _graph_seed(cfg.seed, p, i),
            tuple(cfg.k_bounds),
            cfg.node_budget,
        )
        for p in cfg.edge_probs
        for i in range(cfg.graphs_per_prob)
    ]
    for p in cfg.edge_probs:
        for k in cfg.k_bounds:
            result.cells[(p, k)] = CellCounts()

    if cfg.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            outcomes = list(pool.map(_decide_graph, jobs, chunksize=4))
    else:
        outcomes = [_decide_graph(job) for job in jobs]

    k_max = max(cfg.k_bounds)
    for job, outcome in zip(jobs, outcomes):
        p = job[2]
        can_certified, can_timeout, can_elapsed = outcome["can"]
        if outcome["bad_certificate"]:
            result.certificate_failures += 1
        if can_timeout:
            result.canonical_timeouts += 1
        for k in cfg.k_bounds:
            certified, timeout, elapsed = outcome["k"][k]
            cell = result.cells[(p, k)]
            cell.n_total += 1
            cell.n_lsc += certified
            cell.n_lsc_can += can_certified
            cell.n_g_not_can += certified and not can_certified
            cell.n_can_not_g += can_certified and not certified
            cell.n_timeout += timeout
            cell.seconds += elapsed
            if k == k_max:
                cell.seconds += can_elapsed

    if csv_path is not None:
        result.write_csv(csv_path)
    return result
