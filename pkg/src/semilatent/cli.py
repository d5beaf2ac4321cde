"""Command-line front end.

Subcommands: ``check`` decides a graph and writes its certificate,
``verify`` re-checks a stored certificate, ``recover`` runs a sampled
round trip through the recovery pipeline, ``canon`` prints the canonical
graph, ``treks`` lists treks between two nodes, ``experiment`` runs the
random-graph survey, and ``oracle`` cross-checks the fast machinery
against brute force on a single graph.

Exit status: 0 on success (or a "yes" answer), 1 on a "no" answer or a
failed verification, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .criterion import decide, parse_certificate, verify_certificate
from .experiments import DEFAULT_NODE_BUDGET, ExperimentConfig, run_experiment
from .flows import (
    brute_force_path_system,
    brute_force_trek_system,
    has_path_system,
    has_trek_system,
)
from .graphs import GraphError, LatentDigraph, canonicalize, enumerate_treks, load_graph
from .numeric import (
    NumericError,
    canonical_parameters,
    recover_effects,
    sample_parameters,
    sigma_matrix,
    trek_rule_sigma,
)


def _load_certificate(path: str):
    with open(path) as handle:
        return parse_certificate(handle.read())


def _cmd_check(args: argparse.Namespace) -> int:
    G = load_graph(args.graph)
    result = decide(G, k_bound=args.k, node_budget=args.budget)
    if not result.certified:
        print("no")
        print(result.failure)
        return 1
    cert_path = args.cert or str(Path(args.graph).with_suffix("")) + ".cert.json"
    with open(cert_path, "w") as handle:
        handle.write(result.certificate.to_json())
    print("yes")
    print(cert_path)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    G = load_graph(args.graph)
    cert = _load_certificate(args.cert)
    outcome = verify_certificate(G, cert)
    if outcome.ok:
        print("certificate verifies")
        return 0
    for problem in outcome.problems:
        print(problem)
    return 1


def _cmd_recover(args: argparse.Namespace) -> int:
    G = load_graph(args.graph)
    cert = _load_certificate(args.cert)
    outcome = verify_certificate(G, cert)
    if not outcome.ok:
        print("certificate does not verify:", file=sys.stderr)
        for problem in outcome.problems:
            print(f"  {problem}", file=sys.stderr)
        return 1
    point = sample_parameters(G, args.seed)
    sigma = sigma_matrix(G, point)
    report = recover_effects(G, cert, sigma, truth=point)
    print(report.to_json(), end="")
    if report.aborted:
        print("recovery aborted on a near-singular step", file=sys.stderr)
        return 1
    print(f"max error: {max(report.max_err_lambda, report.max_err_omega):.3e}")
    return 0


def _cmd_canon(args: argparse.Namespace) -> int:
    print(canonicalize(load_graph(args.graph)).to_json(), end="")
    return 0


def _cmd_treks(args: argparse.Namespace) -> int:
    G = load_graph(args.graph)
    for trek in enumerate_treks(G, args.source, args.target):
        print(trek)
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    with open(args.config) as handle:
        cfg = ExperimentConfig.from_json(handle.read())
    result = run_experiment(cfg, csv_path=args.out)
    print(f"wrote {args.out}")
    for (p, k) in sorted(result.cells):
        cell = result.cells[(p, k)]
        print(
            f"p={p} k={k}: {cell.n_lsc}/{cell.n_total} certified, "
            f"canonical {cell.n_lsc_can}, timeouts {cell.n_timeout}, "
            f"{cell.seconds:.1f}s"
        )
    if result.canonical_timeouts:
        print(f"canonical decisions hitting the budget: {result.canonical_timeouts}")
    if result.certificate_failures:
        print(f"certificates failing re-verification: {result.certificate_failures}")
        return 1
    return 0


def _oracle_checks(G: LatentDigraph, seed: int):
    """Yield (name, passed, detail) for every desk-scale cross-check."""
    result = decide(G)
    if result.certified:
        outcome = verify_certificate(G, result.certificate)
        yield "certificate re-verifies", outcome.ok, "; ".join(outcome.problems)
        again = decide(G)
        yield (
            "decision is deterministic",
            again.certified and again.certificate.to_json() == result.certificate.to_json(),
            "",
        )
    else:
        yield "decision", True, f"not certified ({len(result.failure.unsolved)} unsolved)"

    worst = 0.0
    for s in range(3):
        point = sample_parameters(G, seed + s)
        factored = sigma_matrix(G, point, route="factored")
        full = sigma_matrix(G, point, route="full")
        worst = max(worst, float(np.max(np.abs(factored - full)) / np.max(np.abs(factored))))
    yield "covariance routes agree", worst < 1e-10, f"relative gap {worst:.2e}"

    if G.is_acyclic() and len(G.nodes) <= 10:
        worst = 0.0
        for s in range(3):
            point = sample_parameters(G, seed + s)
            factored = sigma_matrix(G, point)
            treks = trek_rule_sigma(G, point)
            worst = max(
                worst, float(np.max(np.abs(factored - treks)) / np.max(np.abs(factored)))
            )
        yield "trek rule agrees", worst < 1e-10, f"relative gap {worst:.2e}"

    if result.certified:
        worst = 0.0
        aborted = False
        for s in range(5):
            point = sample_parameters(G, seed + s)
            report = recover_effects(
                G, result.certificate, sigma_matrix(G, point), truth=point
            )
            aborted = aborted or report.aborted
            worst = max(worst, report.max_err_lambda, report.max_err_omega)
        yield "recovery round trip", not aborted and worst < 1e-8, f"max error {worst:.2e}"

    worst = 0.0
    for s in range(3):
        point = sample_parameters(G, seed + s)
        G_can, point_can = canonical_parameters(G, point)
        sigma = sigma_matrix(G, point)
        gap = float(
            np.max(np.abs(sigma - sigma_matrix(G_can, point_can))) / np.max(np.abs(sigma))
        )
        worst = max(worst, gap)
    yield "canonical form keeps the covariance", worst < 1e-10, f"relative gap {worst:.2e}"

    if len(G.nodes) <= 10:
        rng = random.Random(seed)
        mismatches = 0
        for _ in range(100):
            d1 = frozenset(e for e in G.edges if rng.random() < 0.5)
            pool = list(G.nodes)
            z = rng.sample(pool, rng.randint(0, min(2, len(pool))))
            rest = [v for v in pool if v not in z]
            targets = rng.sample(rest, rng.randint(0, min(2, len(rest))))
            sources = rng.sample(pool, rng.randint(0, len(pool)))
            fast = has_path_system(G, d1, z, targets, sources).found
            slow = brute_force_path_system(G, d1, z, targets, sources)
            mismatches += fast != slow
        yield "path systems match brute force", mismatches == 0, f"{mismatches} mismatches"

    if G.is_acyclic() and len(G.nodes) <= 10:
        rng = random.Random(seed + 1)
        mismatches = 0
        for _ in range(50):
            pool = list(G.nodes)
            z = rng.sample(pool, rng.randint(0, min(2, len(pool))))
            rest = [v for v in pool if v not in z]
            targets = rng.sample(rest, rng.randint(0, min(2, len(rest))))
            sources = rng.sample(pool, rng.randint(0, len(pool)))
            fast = has_trek_system(G, z, targets, sources).found
            slow = brute_force_trek_system(G, z, targets, sources)
            mismatches += fast != slow
        yield "trek systems match brute force", mismatches == 0, f"{mismatches} mismatches"


def _cmd_oracle(args: argparse.Namespace) -> int:
    G = load_graph(args.graph)
    failed = 0
    for name, passed, detail in _oracle_checks(G, args.seed):
        tag = "ok" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"{tag}: {name}{suffix}")
        failed += not passed
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semilatent",
        description="Certify and recover semi-direct effects in linear models "
        "with latent variables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide a graph and write its certificate")
    p.add_argument("graph", help="graph JSON file")
    p.add_argument("--k", type=int, default=None, help="bound on |H1| + |H2|")
    p.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_NODE_BUDGET,
        help="branch-and-bound node budget",
    )
    p.add_argument("--cert", default=None, help="certificate output path")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("verify", help="re-check a stored certificate")
    p.add_argument("graph")
    p.add_argument("cert")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("recover", help="sampled round trip through recovery")
    p.add_argument("graph")
    p.add_argument("cert")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("canon", help="print the canonical graph")
    p.add_argument("graph")
    p.set_defaults(func=_cmd_canon)

    p = sub.add_parser("treks", help="list treks between two nodes (acyclic)")
    p.add_argument("graph")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=_cmd_treks)

    p = sub.add_parser("experiment", help="run the random-graph survey")
    p.add_argument("config", help="config JSON file")
    p.add_argument("--out", default="experiment.csv", help="CSV output path")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("oracle", help="cross-check fast paths against brute force")
    p.add_argument("graph")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, NumericError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
