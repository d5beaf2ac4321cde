"""Numeric engine: parameter sampling, covariance assembly, and recovery.

Everything in this module works with concrete double-precision values on a
LatentDigraph.  It draws generic parameter points, assembles the observed
covariance through several independent routes (block formula, full-graph
formula, trek-rule enumeration), replays a certificate to recover the
semi-direct effects from the observed covariance alone, and runs Monte
Carlo determinant checks on subgraph trek matrices.

Index conventions: matrices over all nodes follow ``G.nodes`` order, and
observed-only matrices follow ``G.observed`` order.  Entry ``(i, j)`` of a
coefficient matrix is the weight of the edge ``nodes[i] -> nodes[j]``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .criterion import LscCertificate, CertificateStep, decide
from .graphs import (
    GraphError,
    LatentDigraph,
    canonicalize,
    enumerate_treks,
    extended_latent_reachable,
    semi_direct_parents,
)

#: Both structural determinants must clear this for a sampled point.
REGULARITY_TOL = 1e-6

#: A recovery step whose system matrix is conditioned worse than this is
#: treated as numerically singular and aborted.
CONDITION_LIMIT = 1e12

#: Determinants below this, after row and column scaling, count as zero.
SCALED_ZERO_TOL = 1e-9


class NumericError(RuntimeError):
    """Sampling, solving, or a guard in the numeric pipeline failed."""


# -- parameter points ----------------------------------------------------


@dataclass(frozen=True)
class SamplingConfig:
    """Knobs for drawing random parameter points.

    Attributes:
        coef_range: Magnitude interval for edge coefficients; each draw
            gets an independent random sign.
        var_range: Interval for the (positive) error variances.
        max_tries: Resampling budget before giving up on regularity.
        regularity_tol: Both structural determinants must exceed this in
            absolute value for a point to be accepted.
    """

    coef_range: tuple[float, float] = (0.5, 1.5)
    var_range: tuple[float, float] = (0.5, 1.5)
    max_tries: int = 100
    regularity_tol: float = REGULARITY_TOL


@dataclass
class ParameterPoint:
    """A concrete parameter assignment for one graph.

    Attributes:
        lam: Edge coefficients keyed by (tail, head).  Keys must be edges
            of the graph the point is used with; missing edges read as 0.
        phi: Positive error variance per node.
        seed: RNG seed the point was drawn from, or -1 for built points.
    """

    lam: dict[tuple[str, str], float]
    phi: dict[str, float]
    seed: int = -1

    def lambda_matrix(self, G: LatentDigraph) -> np.ndarray:
        """Full coefficient matrix in ``G.nodes`` order."""
        edge_set = set(G.edges)
        n = len(G.nodes)
        out = np.zeros((n, n))
        for (tail, head), value in self.lam.items():
            if (tail, head) not in edge_set:
                raise GraphError(f"coefficient on non-edge {tail} -> {head}")
            out[G.index(tail), G.index(head)] = value
        return out

    def phi_vector(self, G: LatentDigraph) -> np.ndarray:
        """Error variances in ``G.nodes`` order."""
        out = np.empty(len(G.nodes))
        for i, v in enumerate(G.nodes):
            if v not in self.phi:
                raise GraphError(f"no variance for node {v}")
            if self.phi[v] <= 0:
                raise GraphError(f"variance for node {v} is not positive")
            out[i] = self.phi[v]
        return out


def _block_indices(G: LatentDigraph) -> tuple[list[int], list[int]]:
    obs = [G.index(v) for v in G.observed]
    lat = [G.index(h) for h in G.latent]
    return obs, lat


def _regularity_dets(G: LatentDigraph, point: ParameterPoint) -> tuple[float, float]:
    """det(I - Lambda_LL) and det(I - semi-direct matrix)."""
    lam = point.lambda_matrix(G)
    obs, lat = _block_indices(G)
    d_lat = float(np.linalg.det(np.eye(len(lat)) - lam[np.ix_(lat, lat)]))
    if abs(d_lat) <= np.finfo(float).tiny:
        return d_lat, 0.0
    d_bar = float(np.linalg.det(np.eye(len(obs)) - _semi_direct_from(lam, obs, lat)))
    return d_lat, d_bar


def sample_parameters(
    G: LatentDigraph,
    seed: int,
    config: Optional[SamplingConfig] = None,
) -> ParameterPoint:
    """Draw a random regular parameter point for G.

    Coefficients are uniform in +-[coef_range] with a random sign and
    variances uniform in var_range.  The draw is repeated (up to
    ``config.max_tries`` times) until both regularity determinants exceed
    ``config.regularity_tol``; on acyclic graphs the first draw always
    succeeds since both determinants are exactly 1.

    Raises:
        NumericError: if no regular point is found within the budget.
    """
    cfg = config or SamplingConfig()
    rng = random.Random(seed)
    lo, hi = cfg.coef_range
    d_lat = d_bar = 0.0
    for _ in range(cfg.max_tries):
        lam = {}
        for edge in G.edges:
            magnitude = rng.uniform(lo, hi)
            lam[edge] = magnitude if rng.random() < 0.5 else -magnitude
        phi = {v: rng.uniform(*cfg.var_range) for v in G.nodes}
        point = ParameterPoint(lam, phi, seed)
        d_lat, d_bar = _regularity_dets(G, point)
        if abs(d_lat) > cfg.regularity_tol and abs(d_bar) > cfg.regularity_tol:
            return point
    raise NumericError(
        f"no regular point after {cfg.max_tries} tries "
        f"(last determinants {d_lat:.3e}, {d_bar:.3e})"
    )


# -- covariance assembly -------------------------------------------------


def _semi_direct_from(lam: np.ndarray, obs: list[int], lat: list[int]) -> np.ndarray:
    loo = lam[np.ix_(obs, obs)]
    if not lat:
        return loo
    lol = lam[np.ix_(obs, lat)]
    lll = lam[np.ix_(lat, lat)]
    llo = lam[np.ix_(lat, obs)]
    try:
        w = np.linalg.solve(np.eye(len(lat)) - lll, llo)
    except np.linalg.LinAlgError as exc:
        raise NumericError("latent coefficient block is singular") from exc
    return loo + lol @ w


def semi_direct_matrix(G: LatentDigraph, point: ParameterPoint) -> np.ndarray:
    """Matrix of semi-direct effects between observed nodes.

    Entry (v, w) sums the direct v -> w coefficient with every product of
    coefficients along directed v -> w paths whose interior is all latent.
    Rows and columns follow ``G.observed``.
    """
    obs, lat = _block_indices(G)
    return _semi_direct_from(point.lambda_matrix(G), obs, lat)


def omega_matrix(G: LatentDigraph, point: ParameterPoint) -> np.ndarray:
    """Error covariance of the observed equations after absorbing latents.

    This is the covariance of the noise seen by the observed block once
    latent variables are marginalized: W^T Phi_LL W + Phi_OO where
    W = (I - Lambda_LL)^{-1} Lambda_LO.  Symmetric positive definite at
    any regular point.
    """
    lam = point.lambda_matrix(G)
    phi = point.phi_vector(G)
    obs, lat = _block_indices(G)
    out = np.diag(phi[obs])
    if lat:
        llo = lam[np.ix_(lat, obs)]
        try:
            w = np.linalg.solve(np.eye(len(lat)) - lam[np.ix_(lat, lat)], llo)
        except np.linalg.LinAlgError as exc:
            raise NumericError("latent coefficient block is singular") from exc
        out = out + w.T @ (phi[lat, None] * w)
    return 0.5 * (out + out.T)


def sigma_matrix(
    G: LatentDigraph,
    point: ParameterPoint,
    route: str = "factored",
) -> np.ndarray:
    """Observed covariance implied by the model at the given point.

    Two independent routes are available and agree at regular points:

    * ``"factored"``: K^T Omega K with K = (I - semi_direct_matrix)^{-1},
      going through the observed-level factorization.
    * ``"full"``: the covariance of the complete system,
      B^T Phi B with B = (I - Lambda)^{-1}, restricted to observed rows
      and columns.
    """
    if route == "factored":
        lam_bar = semi_direct_matrix(G, point)
        omega = omega_matrix(G, point)
        try:
            k = np.linalg.inv(np.eye(len(G.observed)) - lam_bar)
        except np.linalg.LinAlgError as exc:
            raise NumericError("observed coefficient block is singular") from exc
        sig = k.T @ omega @ k
    elif route == "full":
        lam = point.lambda_matrix(G)
        phi = point.phi_vector(G)
        try:
            b = np.linalg.inv(np.eye(len(G.nodes)) - lam)
        except np.linalg.LinAlgError as exc:
            raise NumericError("coefficient matrix is singular") from exc
        obs, _ = _block_indices(G)
        sig = (b.T @ (phi[:, None] * b))[np.ix_(obs, obs)]
    else:
        raise ValueError(f"unknown route {route!r}")
    return 0.5 * (sig + sig.T)


@dataclass(frozen=True)
class CovariancePair:
    """Observed covariance together with its error-covariance factor.

    Attributes:
        sigma: Observed covariance matrix, ``G.observed`` order.
        omega: Error covariance of the observed equations, same order.
    """

    sigma: np.ndarray
    omega: np.ndarray


def covariance_pair(G: LatentDigraph, point: ParameterPoint) -> CovariancePair:
    return CovariancePair(sigma_matrix(G, point), omega_matrix(G, point))


def trek_rule_sigma(G: LatentDigraph, point: ParameterPoint) -> np.ndarray:
    """Observed covariance by direct trek enumeration.

    Entry (v, w) sums, over all treks between v and w, the top node's
    variance times the product of coefficients along both trek parts (an
    edge used by both parts contributes its coefficient squared).  Only
    meaningful on acyclic graphs, where the trek set is finite.
    """
    if not G.is_acyclic():
        raise GraphError("trek enumeration needs an acyclic graph")
    obs = G.observed
    n = len(obs)
    out = np.zeros((n, n))
    for i, v in enumerate(obs):
        for j in range(i, n):
            total = 0.0
            for trek in enumerate_treks(G, v, obs[j]):
                monomial = point.phi[trek.top]
                for edge in trek.edge_multiset():
                    monomial *= point.lam.get(edge, 0.0)
                total += monomial
            out[i, j] = out[j, i] = total
    return out


# -- recovery from a certificate -----------------------------------------


@dataclass(frozen=True)
class StepRecord:
    """Per-step numerics of a recovery run.

    Attributes:
        v: The node whose incoming semi-direct effects were solved.
        condition: Condition number of the step's square system.
        residual: Max-abs residual of the solved system.
        aborted: True when the system was too ill-conditioned to solve.
    """

    v: str
    condition: float
    residual: float
    aborted: bool = False


@dataclass
class RecoveryReport:
    """Outcome of replaying a certificate against a covariance matrix.

    Attributes:
        nodes: Observed nodes, fixing the index order of both matrices.
        lambda_bar_hat: Recovered semi-direct effect matrix.
        omega_hat: (I - lambda_bar_hat)^T Sigma (I - lambda_bar_hat).
        steps: One StepRecord per certificate step, in order.
        max_err_lambda: Max-abs error against the generating point, when
            one was supplied.
        max_err_omega: Same for the error covariance.
    """

    nodes: tuple[str, ...]
    lambda_bar_hat: np.ndarray
    omega_hat: np.ndarray
    steps: tuple[StepRecord, ...]
    max_err_lambda: Optional[float] = None
    max_err_omega: Optional[float] = None

    @property
    def aborted(self) -> bool:
        return any(s.aborted for s in self.steps)

    def to_json(self) -> str:
        doc = {
            "nodes": list(self.nodes),
            "lambda_bar_hat": [[float(x) for x in row] for row in self.lambda_bar_hat],
            "omega_hat": [[float(x) for x in row] for row in self.omega_hat],
            "steps": [
                {
                    "v": s.v,
                    "condition": s.condition,
                    "residual": s.residual,
                    "aborted": s.aborted,
                }
                for s in self.steps
            ],
            "max_err_lambda": self.max_err_lambda,
            "max_err_omega": self.max_err_omega,
        }
        return json.dumps(doc, indent=2) + "\n"


def assemble_step_system(
    G: LatentDigraph,
    sigma: np.ndarray,
    step: CertificateStep,
    lam_hat: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...], tuple[str, ...]]:
    """Build the square linear system of one certificate step.

    The rows are indexed by Y in certificate order and split into two
    kinds.  Writing T = I - lam_hat (current partial estimate), a row for
    y reachable from Z u {v} through the latent part (extended reach with
    the roles of the two cut sets swapped) reads

        [T^T Sigma]_{y, pa}  [T^T Sigma T]_{y, Z}  |  [T^T Sigma]_{y, v}

    and any other row reads

        [Sigma]_{y, pa}  [Sigma T]_{y, Z}  |  [Sigma]_{y, v}.

    Only columns of lam_hat indexed by Z and by the reachable part of Y
    are read, which is what makes step-by-step recovery sound.

    Returns:
        (matrix, rhs, y_reach, y_rest): the (n+r) x (n+r) system, its
        right-hand side, and the two row groups in certificate order.
    """
    obs = G.observed
    oi = {v: i for i, v in enumerate(obs)}
    pa = semi_direct_parents(G, step.v)
    pa_idx = [oi[w] for w in pa]
    z_idx = [oi[w] for w in step.z]
    v_idx = oi[step.v]

    reach = extended_latent_reachable(G, step.h2, step.h1, step.z + (step.v,))
    y_reach = tuple(y for y in step.y if y in reach)
    y_rest = tuple(y for y in step.y if y not in reach)

    t = np.eye(len(obs)) - lam_hat
    ts = t.T @ sigma
    tst = ts @ t
    st = sigma @ t

    rows = []
    rhs = []
    for y in step.y:
        yi = oi[y]
        if y in reach:
            rows.append(np.concatenate([ts[yi, pa_idx], tst[yi, z_idx]]))
            rhs.append(ts[yi, v_idx])
        else:
            rows.append(np.concatenate([sigma[yi, pa_idx], st[yi, z_idx]]))
            rhs.append(sigma[yi, v_idx])
    size = len(pa) + len(step.z)
    matrix = np.array(rows).reshape(size, size)
    return matrix, np.array(rhs), y_reach, y_rest


def recover_effects(
    G: LatentDigraph,
    cert: LscCertificate,
    sigma: np.ndarray,
    truth: Optional[ParameterPoint] = None,
) -> RecoveryReport:
    """Recover all semi-direct effects from the observed covariance.

    Replays the certificate step by step: each step contributes one square
    linear solve whose solution fills the column of the node being
    certified.  The caller is expected to pass a certificate that
    verifies against G; steps whose system is conditioned worse than
    CONDITION_LIMIT are aborted and flagged, which at a generic point
    only happens for non-generic (or wrong) inputs.

    Args:
        G: The graph the certificate talks about.
        cert: A verified certificate covering all observed nodes.
        sigma: Observed covariance in ``G.observed`` order.
        truth: Optional generating point; when given, the report carries
            max-abs errors of both recovered matrices.
    """
    obs = G.observed
    n = len(obs)
    sig = np.asarray(sigma, dtype=float)
    if sig.shape != (n, n):
        raise NumericError(f"covariance shape {sig.shape} does not match {n} observed nodes")
    oi = {v: i for i, v in enumerate(obs)}
    lam_hat = np.zeros((n, n))
    records = []
    for step in cert.steps:
        pa = semi_direct_parents(G, step.v)
        if not pa and not step.z:
            records.append(StepRecord(step.v, 1.0, 0.0))
            continue
        matrix, rhs, _, _ = assemble_step_system(G, sig, step, lam_hat)
        condition = float(np.linalg.cond(matrix))
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            records.append(StepRecord(step.v, condition, float("nan"), aborted=True))
            continue
        solution = np.linalg.solve(matrix, rhs)
        residual = float(np.max(np.abs(matrix @ solution - rhs)))
        for w, value in zip(pa, solution[: len(pa)]):
            lam_hat[oi[w], oi[step.v]] = value
        records.append(StepRecord(step.v, condition, residual))
    t = np.eye(n) - lam_hat
    omega_hat = t.T @ sig @ t
    report = RecoveryReport(tuple(obs), lam_hat, 0.5 * (omega_hat + omega_hat.T), tuple(records))
    if truth is not None:
        report.max_err_lambda = float(
            np.max(np.abs(lam_hat - semi_direct_matrix(G, truth)))
        )
        report.max_err_omega = float(
            np.max(np.abs(report.omega_hat - omega_matrix(G, truth)))
        )
    return report


# -- the measurement-chain cross-ratio -----------------------------------


def verify_c2_formula(G: LatentDigraph, point: ParameterPoint) -> float:
    """Cross-ratio of recovered error covariances on a measurement chain.

    On the anonymous relabeling of the traffic graph (latent chain
    h1 -> h3 with h1 measuring v2, v3 and h3 measuring v5, v6, all latent
    variances fixed to one) the ratio

        omega_{v2,v6} omega_{v3,v5}
        / (omega_{v2,v3} omega_{v5,v6} - omega_{v2,v6} omega_{v3,v5})

    computed from a full certify-and-recover pass equals the square of
    the h1 -> h3 coefficient at the generating point.  The sign of that
    coefficient is not recoverable; only its square is.

    Raises:
        NumericError: if a latent variance differs from one, the graph is
            not certifiable, or the denominator is numerically zero.
    """
    for h in G.latent:
        if point.phi.get(h) != 1.0:
            raise NumericError("latent variances must be fixed to one")
    for name in ("v2", "v3", "v5", "v6"):
        if name not in G.observed:
            raise GraphError(f"expected observed node {name}")
    result = decide(G)
    if not result.certified:
        raise NumericError("graph is not certifiable; nothing to recover")
    sigma = sigma_matrix(G, point)
    report = recover_effects(G, result.certificate, sigma)
    if report.aborted:
        raise NumericError("recovery aborted on a near-singular step")
    oi = {v: i for i, v in enumerate(report.nodes)}
    w = report.omega_hat
    crossed = w[oi["v2"], oi["v6"]] * w[oi["v3"], oi["v5"]]
    straight = w[oi["v2"], oi["v3"]] * w[oi["v5"], oi["v6"]]
    denominator = straight - crossed
    if abs(denominator) <= 1e-6:
        raise NumericError("cross-ratio denominator is numerically zero")
    return crossed / denominator


# -- subgraph trek matrices ----------------------------------------------


@dataclass(frozen=True)
class SubgraphTrekMatrixSpec:
    """A determinant instance built from a host graph and two subgraphs.

    The full matrix has rows indexed by ``rows_a + rows_b`` and columns by
    ``cols_c + cols_d``; rows in ``rows_a`` are taken from the inverse
    restricted to the ``d1`` subgraph and columns in ``cols_d`` from the
    inverse restricted to ``d2``, with the node variances in the middle.

    When ``source_rows`` is given, the instance instead targets the left
    factor alone: the submatrix of path polynomials with rows
    ``source_rows`` and columns ``rows_a + rows_b`` (columns in ``rows_a``
    restricted to ``d1``).  In that mode both column sets must be empty.

    Attributes:
        graph: Host graph; the observed/latent split plays no role here.
        d1_edges: Edge subset restricting rows_a (or cols rows_a in the
            left-factor mode).
        d2_edges: Edge subset restricting cols_d.
        rows_a: Row nodes under the d1 restriction.
        rows_b: Row nodes without restriction.
        cols_c: Column nodes without restriction.
        cols_d: Column nodes under the d2 restriction.
        source_rows: Optional row set selecting the left-factor mode.
    """

    graph: LatentDigraph
    d1_edges: frozenset[tuple[str, str]] = frozenset()
    d2_edges: frozenset[tuple[str, str]] = frozenset()
    rows_a: tuple[str, ...] = ()
    rows_b: tuple[str, ...] = ()
    cols_c: tuple[str, ...] = ()
    cols_d: tuple[str, ...] = ()
    source_rows: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        nodes = set(self.graph.nodes)
        edges = set(self.graph.edges)
        for name, group in (
            ("rows_a", self.rows_a),
            ("rows_b", self.rows_b),
            ("cols_c", self.cols_c),
            ("cols_d", self.cols_d),
            ("source_rows", self.source_rows or ()),
        ):
            unknown = set(group) - nodes
            if unknown:
                raise ValueError(f"{name} has unknown nodes {sorted(unknown)}")
        if set(self.rows_a) & set(self.rows_b):
            raise ValueError("row sets overlap")
        if set(self.cols_c) & set(self.cols_d):
            raise ValueError("column sets overlap")
        for name, sub in (("d1_edges", self.d1_edges), ("d2_edges", self.d2_edges)):
            if not set(sub) <= edges:
                raise ValueError(f"{name} is not a subset of the graph's edges")
        n_rows = len(self.rows_a) + len(self.rows_b)
        if self.source_rows is None:
            if n_rows != len(self.cols_c) + len(self.cols_d):
                raise ValueError("row and column counts differ")
            if n_rows == 0:
                raise ValueError("empty instance")
        else:
            if self.cols_c or self.cols_d:
                raise ValueError("left-factor mode takes no column sets")
            if len(self.source_rows) != n_rows:
                raise ValueError("source row count must match the column count")


def _restricted_inverse(
    G: LatentDigraph,
    point: ParameterPoint,
    edges: Iterable[tuple[str, str]],
) -> np.ndarray:
    n = len(G.nodes)
    lam = np.zeros((n, n))
    for tail, head in edges:
        lam[G.index(tail), G.index(head)] = point.lam.get((tail, head), 0.0)
    return np.linalg.inv(np.eye(n) - lam)


def _left_factor(spec: SubgraphTrekMatrixSpec, point: ParameterPoint) -> np.ndarray:
    """Path-polynomial columns for rows_a (d1-restricted) and rows_b."""
    G = spec.graph
    inv_d1 = _restricted_inverse(G, point, spec.d1_edges)
    inv_full = _restricted_inverse(G, point, G.edges)
    a_idx = [G.index(v) for v in spec.rows_a]
    b_idx = [G.index(v) for v in spec.rows_b]
    return np.hstack([inv_d1[:, a_idx], inv_full[:, b_idx]])


def m_matrix(spec: SubgraphTrekMatrixSpec, point: ParameterPoint) -> np.ndarray:
    """Evaluate the full trek matrix of the spec at a parameter point.

    Rows follow ``rows_a + rows_b`` and columns ``cols_c + cols_d``.
    """
    if spec.source_rows is not None:
        raise ValueError("left-factor spec has no full matrix")
    G = spec.graph
    left = _left_factor(spec, point)
    inv_full = _restricted_inverse(G, point, G.edges)
    inv_d2 = _restricted_inverse(G, point, spec.d2_edges)
    c_idx = [G.index(v) for v in spec.cols_c]
    d_idx = [G.index(v) for v in spec.cols_d]
    right = np.hstack([inv_full[:, c_idx], inv_d2[:, d_idx]])
    phi = point.phi_vector(G)
    return left.T @ (phi[:, None] * right)


def l_factor_matrix(spec: SubgraphTrekMatrixSpec, point: ParameterPoint) -> np.ndarray:
    """Evaluate the left factor on the spec's source rows."""
    if spec.source_rows is None:
        raise ValueError("spec does not select the left-factor mode")
    left = _left_factor(spec, point)
    s_idx = [spec.graph.index(v) for v in spec.source_rows]
    return left[s_idx, :]


def _scaled_abs_det(matrix: np.ndarray) -> float:
    """|det| after normalizing each row and column by its largest entry."""
    work = np.array(matrix, dtype=float)
    for axis in (1, 0):
        scale = np.max(np.abs(work), axis=axis, keepdims=True)
        if np.any(scale == 0.0):
            return 0.0
        work = work / scale
    return abs(float(np.linalg.det(work)))


@dataclass(frozen=True)
class DetCheckResult:
    """Monte Carlo verdict on a determinant instance.

    Attributes:
        verdict: "nonzero-witnessed" or "all-zero".
        trials_used: Number of parameter points evaluated.
        witness_seed: Seed of the first nonzero witness, if any.
        max_scaled_det: Largest scaled determinant seen.
    """

    verdict: str
    trials_used: int
    witness_seed: Optional[int]
    max_scaled_det: float

    def __bool__(self) -> bool:
        return self.verdict == "nonzero-witnessed"


def subgraph_trek_det_check(
    spec: SubgraphTrekMatrixSpec,
    trials: int = 20,
    seed: int = 0,
) -> DetCheckResult:
    """Probe the spec's determinant at random parameter points.

    The determinant is either identically zero as a polynomial or nonzero
    at almost every point, so a single witness above SCALED_ZERO_TOL
    (after row and column scaling) settles the question in practice.
    """
    max_det = 0.0
    used = 0
    for t in range(trials):
        used = t + 1
        try:
            point = sample_parameters(spec.graph, seed + t)
            if spec.source_rows is not None:
                matrix = l_factor_matrix(spec, point)
            else:
                matrix = m_matrix(spec, point)
        except (NumericError, np.linalg.LinAlgError):
            continue
        value = _scaled_abs_det(matrix)
        max_det = max(max_det, value)
        if value > SCALED_ZERO_TOL:
            return DetCheckResult("nonzero-witnessed", used, seed + t, value)
    return DetCheckResult("all-zero", used, None, max_det)


def numerical_rank(matrix: np.ndarray, rel_tol: float = 1e-9) -> int:
    """Rank by singular values, relative to the largest one."""
    values = np.linalg.svd(np.asarray(matrix, dtype=float), compute_uv=False)
    if values.size == 0 or values[0] == 0.0:
        return 0
    return int(np.sum(values > rel_tol * values[0]))


# -- canonical reparametrization -----------------------------------------


def canonical_parameters(
    G: LatentDigraph,
    point: ParameterPoint,
) -> tuple[LatentDigraph, ParameterPoint]:
    """Transport a parameter point onto the canonical graph.

    The canonical graph replaces latent-to-latent structure by direct
    latent-to-observed edges.  Setting the observed-to-observed block to
    the semi-direct matrix, the latent-to-observed block to
    (I - Lambda_LL)^{-1} Lambda_LO, and keeping all variances produces a
    point whose observed covariance is unchanged.

    Returns:
        (canonical graph, transported point).
    """
    G_can = canonicalize(G)
    lam_bar = semi_direct_matrix(G, point)
    obs, lat = _block_indices(G)
    oi = {v: i for i, v in enumerate(G.observed)}
    li = {h: i for i, h in enumerate(G.latent)}
    if lat:
        lam = point.lambda_matrix(G)
        w = np.linalg.solve(
            np.eye(len(lat)) - lam[np.ix_(lat, lat)], lam[np.ix_(lat, obs)]
        )
    lam_new = {}
    for tail, head in G_can.edges:
        if tail in oi:
            lam_new[(tail, head)] = float(lam_bar[oi[tail], oi[head]])
        else:
            lam_new[(tail, head)] = float(w[li[tail], oi[head]])
    return G_can, ParameterPoint(lam_new, dict(point.phi), point.seed)
