"""Shared helpers for the test suite.

Everything here is deliberately independent of the solver internals: the
random generators use the stdlib random module with explicit seeds, and
the oracle routines re-derive answers from first principles (exhaustive
enumeration, direct definition chasing) so that agreement with the
library is meaningful evidence.
"""

from __future__ import annotations

import random
from itertools import combinations

from semilatent.graphs import (
    LatentDigraph,
    extended_latent_reachable,
    latent_subgraph,
    semi_direct_parents,
    trek_separates,
)
from semilatent.flows import brute_force_trek_system


def random_mixed_graph(
    rng: random.Random,
    n_obs: int,
    n_lat: int,
    p: float,
) -> LatentDigraph:
    """Random acyclic graph with a shuffled observed/latent split.

    Edges run forward along a random node order, so the result is acyclic
    but latent nodes may sit anywhere in the order (observed parents of
    latent nodes included).
    """
    names = [f"n{i}" for i in range(1, n_obs + n_lat + 1)]
    order = names[:]
    rng.shuffle(order)
    edges = [
        (order[i], order[j])
        for i in range(len(order))
        for j in range(i + 1, len(order))
        if rng.random() < p
    ]
    lat = set(rng.sample(names, n_lat))
    return LatentDigraph(
        [v for v in names if v not in lat],
        [v for v in names if v in lat],
        edges,
    )


def random_cyclic_graph(
    rng: random.Random, n_obs: int, n_lat: int, p: float
) -> LatentDigraph:
    """Random digraph that permits directed cycles (no self-loops)."""
    names = [f"n{i}" for i in range(1, n_obs + n_lat + 1)]
    edges = [
        (a, b)
        for a in names
        for b in names
        if a != b and rng.random() < p
    ]
    lat = set(rng.sample(names, n_lat))
    return LatentDigraph(
        [v for v in names if v not in lat],
        [v for v in names if v in lat],
        edges,
    )


def random_flow_instance(rng: random.Random, n_max: int = 7):
    """A random path-system query: (G, d1_edges, z, p, ya).

    G is an acyclic plain digraph of at most n_max nodes, d1 a random
    edge subset, z and p disjoint sink sets of size at most 2 each, and
    ya an arbitrary node subset (overlaps with sinks allowed; a sink that
    is its own source is served by a trivial path).
    """
    n = rng.randint(2, n_max)
    p_edge = rng.choice((0.2, 0.35, 0.5))
    names = [f"n{i}" for i in range(1, n + 1)]
    edges = [
        (names[i], names[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p_edge
    ]
    d1 = frozenset(e for e in edges if rng.random() < 0.6)
    pool = names[:]
    rng.shuffle(pool)
    nz = rng.randint(0, 2)
    np_ = rng.randint(0, 2)
    z = tuple(pool[:nz])
    p_sinks = tuple(pool[nz : nz + np_])
    ya = tuple(v for v in names if rng.random() < 0.6)
    G = LatentDigraph(names, [], edges)
    return G, d1, z, p_sinks, ya


def check_path_witness(G, d1, z, p, paths) -> None:
    """Assert that a path-system witness is valid for its query."""
    d1 = frozenset(d1)
    zt = tuple(G.sort_nodes(set(z)))
    pt = tuple(G.sort_nodes(set(p)))
    assert len(paths) == len(zt) + len(pt)
    used: set[str] = set()
    for path, sink in zip(paths, zt + pt):
        assert path[-1] == sink
        restricted = sink in set(zt)
        for a, b in zip(path, path[1:]):
            assert G.has_edge(a, b), f"witness uses non-edge {a}->{b}"
            if restricted:
                assert (a, b) in d1, f"z-path leaves the restricted edges at {a}->{b}"
        assert not (set(path) & used), "witness paths share a node"
        used |= set(path)


def check_trek_witness(G, z, p, ya, system) -> None:
    """Assert that a trek-system witness is valid for its query."""
    dlat = frozenset(e for e in G.edges if G.is_latent(e[0]))
    zt = tuple(G.sort_nodes(set(z)))
    pt = tuple(G.sort_nodes(set(p)))
    assert len(system.treks) == len(zt) + len(pt)
    assert system.has_no_sided_intersection()
    assert set(system.sources()) <= set(ya)
    for trek, sink in zip(system.treks, zt + pt):
        assert trek.target == sink
        left_edges = set(zip(trek.left, trek.left[1:]))
        right_edges = set(zip(trek.right, trek.right[1:]))
        for a, b in left_edges | right_edges:
            assert G.has_edge(a, b)
        assert left_edges <= dlat, "left part leaves the latent subgraph"
        if sink in set(zt):
            assert right_edges <= dlat, "z-trek right part leaves the latent subgraph"


def lsc_holds_brute(G, v, y, z, h1, h2) -> bool:
    """Criterion check by direct definition chasing.

    Uses only the separation routine and the exhaustive trek-system
    search, no allowed-set pruning and no integer program, so it serves
    as an oracle for check_tuple and decide on small acyclic graphs.
    """
    pa = set(semi_direct_parents(G, v))
    y, z = set(y), set(z)
    h1, h2 = set(h1), set(h2)
    if len(y) != len(pa) + len(z) or len(z) != len(h1) + len(h2):
        return False
    if (z & pa) or (y & (z | {v})):
        return False
    if not trek_separates(latent_subgraph(G), y, z | {v}, h1, h2):
        return False
    return brute_force_trek_system(G, sorted(z), sorted(pa), sorted(y))


def exhaustive_closure(G: LatentDigraph, k_bound: int | None = None) -> set[str]:
    """Solved set of the criterion recursion by exhaustive tuple search.

    Iterates to a fixpoint; a node v joins the solved set as soon as any
    tuple (Y, Z, H1, H2) with |H1| + |H2| <= k_bound passes
    lsc_holds_brute and has all its prerequisites
    Z + (Y intersected with elr_{H2,H1}(Z + v)) solved already.  Requires
    an acyclic graph small enough for trek enumeration.
    """
    obs = list(G.observed)
    lat = list(G.latent)
    k_max = 2 * len(lat) if k_bound is None else min(k_bound, 2 * len(lat))

    def solvable(v: str, solved: set[str]) -> bool:
        pa = set(semi_direct_parents(G, v))
        rest = [w for w in obs if w != v]
        for total in range(k_max + 1):
            for s1 in range(total + 1):
                for H1 in combinations(lat, s1):
                    for H2 in combinations(lat, total - s1):
                        z_pool = [
                            w for w in rest if w in solved and w not in pa
                        ]
                        for Z in combinations(z_pool, total):
                            elr = extended_latent_reachable(
                                G, H2, H1, set(Z) | {v}
                            )
                            y_pool = [w for w in rest if w not in Z]
                            for Y in combinations(y_pool, len(pa) + total):
                                if not (set(Y) & elr) <= solved:
                                    continue
                                if lsc_holds_brute(G, v, Y, Z, H1, H2):
                                    return True
        return False

    solved: set[str] = set()
    progress = True
    while progress:
        progress = False
        for v in obs:
            if v not in solved and solvable(v, solved):
                solved.add(v)
                progress = True
    return solved
