"""Directed graphs with observed and latent nodes.

A latent digraph partitions its nodes into an observed set and a latent set.
Deleting every edge whose tail is observed leaves the latent subgraph; treks
inside it describe the confounding that survives marginalizing the latent
nodes.  This module holds the graph type plus the combinatorial primitives
used by the identifiability machinery: semi-direct parents, descendants,
trek enumeration and separation, latent-reachability sets, canonicalization
and the confounding-free test.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable


class GraphError(ValueError):
    """Raised when a graph description is malformed."""


class LatentDigraph:
    """A directed graph over named nodes split into observed and latent parts.

    Nodes keep their declaration order (observed first, then latent) and
    edges keep their input order, so that every operation downstream can
    iterate deterministically.  Self-loops and duplicate edges are rejected.

    Attributes:
        observed: Tuple of observed node names, in declaration order.
        latent: Tuple of latent node names, in declaration order.
        edges: Tuple of (tail, head) pairs, in input order.
        nodes: observed + latent.
    """

    def __init__(
        self,
        observed: Iterable[str],
        latent: Iterable[str],
        edges: Iterable[tuple[str, str]],
    ) -> None:
        obs = tuple(observed)
        lat = tuple(latent)
        for name in obs + lat:
            if not isinstance(name, str) or not name:
                raise GraphError(f"node names must be nonempty strings, got {name!r}")
        if len(set(obs)) != len(obs):
            raise GraphError("duplicate observed node")
        if len(set(lat)) != len(lat):
            raise GraphError("duplicate latent node")
        if set(obs) & set(lat):
            overlap = sorted(set(obs) & set(lat))
            raise GraphError(f"nodes declared both observed and latent: {overlap}")
        self.observed = obs
        self.latent = lat
        self.nodes = obs + lat
        self._observed_set = frozenset(obs)
        self._latent_set = frozenset(lat)
        self._index = {v: i for i, v in enumerate(self.nodes)}

        edge_list: list[tuple[str, str]] = []
        seen: set[tuple[str, str]] = set()
        children: dict[str, list[str]] = {v: [] for v in self.nodes}
        parents: dict[str, list[str]] = {v: [] for v in self.nodes}
        for e in edges:
            try:
                tail, head = e
            except (TypeError, ValueError):
                raise GraphError(f"edge must be a (tail, head) pair, got {e!r}") from None
            if tail not in self._index or head not in self._index:
                raise GraphError(f"edge {tail!r} -> {head!r} references an undeclared node")
            if tail == head:
                raise GraphError(f"self-loop at {tail!r}")
            if (tail, head) in seen:
                raise GraphError(f"duplicate edge {tail!r} -> {head!r}")
            seen.add((tail, head))
            edge_list.append((tail, head))
            children[tail].append(head)
            parents[head].append(tail)
        self.edges = tuple(edge_list)
        self._edge_set = seen
        self._children = {v: tuple(ws) for v, ws in children.items()}
        self._parents = {v: tuple(ws) for v, ws in parents.items()}
        self._acyclic: bool | None = None

    # -- basic queries ----------------------------------------------------

    def is_observed(self, v: str) -> bool:
        return v in self._observed_set

    def is_latent(self, v: str) -> bool:
        return v in self._latent_set

    def children(self, v: str) -> tuple[str, ...]:
        return self._children[v]

    def parents(self, v: str) -> tuple[str, ...]:
        return self._parents[v]

    def has_edge(self, tail: str, head: str) -> bool:
        return (tail, head) in self._edge_set

    def index(self, v: str) -> int:
        """Position of v in declaration order."""
        return self._index[v]

    def sort_nodes(self, nodes: Iterable[str]) -> list[str]:
        """Return the given nodes sorted into declaration order."""
        return sorted(nodes, key=self._index.__getitem__)

    def is_acyclic(self) -> bool:
        if self._acyclic is None:
            indeg = {v: len(self._parents[v]) for v in self.nodes}
            queue = [v for v in self.nodes if indeg[v] == 0]
            removed = 0
            while queue:
                v = queue.pop()
                removed += 1
                for w in self._children[v]:
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        queue.append(w)
            self._acyclic = removed == len(self.nodes)
        return self._acyclic

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "observed": list(self.observed),
            "latent": list(self.latent),
            "edges": [[tail, head] for tail, head in self.edges],
        }
        return json.dumps(payload, indent=2) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatentDigraph):
            return NotImplemented
        return (
            self.observed == other.observed
            and self.latent == other.latent
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.observed, self.latent, self.edges))

    def __repr__(self) -> str:
        return (
            f"LatentDigraph(observed={list(self.observed)}, "
            f"latent={list(self.latent)}, |D|={len(self.edges)})"
        )


def parse_graph(text: str) -> LatentDigraph:
    """Parse the JSON graph format.

    The format is an object with exactly the keys "observed", "latent" and
    "edges", where the first two are lists of node names and the third is a
    list of [tail, head] pairs.  Serializing the result with
    ``LatentDigraph.to_json`` reproduces canonically formatted input byte for
    byte.

    Args:
        text: JSON document.

    Returns:
        The parsed graph.

    Raises:
        GraphError: If the document is not valid JSON, has missing or
            unexpected keys, or describes an invalid graph (unknown node in
            an edge, self-loop, duplicate node or edge).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise GraphError("top-level value must be an object")
    expected = {"observed", "latent", "edges"}
    if set(data) != expected:
        missing = expected - set(data)
        extra = set(data) - expected
        parts = []
        if missing:
            parts.append(f"missing keys {sorted(missing)}")
        if extra:
            parts.append(f"unexpected keys {sorted(extra)}")
        raise GraphError("; ".join(parts))
    for key in ("observed", "latent", "edges"):
        if not isinstance(data[key], list):
            raise GraphError(f'"{key}" must be a list')
    edges = []
    for e in data["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise GraphError(f"edge must be a [tail, head] pair, got {e!r}")
        edges.append((e[0], e[1]))
    return LatentDigraph(data["observed"], data["latent"], edges)


def load_graph(path: str) -> LatentDigraph:
    """Read and parse a graph JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


# -- subgraphs and parent sets -------------------------------------------


def latent_subgraph(G: LatentDigraph) -> LatentDigraph:
    """Delete every edge whose tail is observed.

    The node set is unchanged; latent nodes keep all their outgoing edges,
    observed nodes become pure sinks.
    """
    kept = [(tail, head) for tail, head in G.edges if G.is_latent(tail)]
    return LatentDigraph(G.observed, G.latent, kept)


def semi_direct_parents(G: LatentDigraph, v: str) -> list[str]:
    """Observed nodes w with a semi-direct path w to v.

    A semi-direct path is either the edge w -> v or a directed path from w
    to v all of whose intermediate nodes are latent.  In a cyclic graph a
    latent-mediated cycle can put v itself into the result; the literal
    definition is kept.

    Args:
        G: The graph.
        v: An observed node.

    Returns:
        The semi-direct parents in declaration order.
    """
    if not G.is_observed(v):
        raise GraphError(f"{v!r} is not an observed node")
    found: set[str] = set()
    # Walk backwards from v; only latent nodes may be crossed.
    stack = list(G.parents(v))
    seen_latent: set[str] = set()
    while stack:
        p = stack.pop()
        if G.is_observed(p):
            found.add(p)
        elif p not in seen_latent:
            seen_latent.add(p)
            stack.extend(G.parents(p))
    return G.sort_nodes(found)


def descendants(G: LatentDigraph, v: str) -> set[str]:
    """All nodes reachable from v by a directed path, including v itself."""
    if v not in G._index:
        raise GraphError(f"unknown node {v!r}")
    out = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in G.children(u):
            if w not in out:
                out.add(w)
                stack.append(w)
    return out


# -- treks ----------------------------------------------------------------


@dataclass(frozen=True)
class Trek:
    """A trek: two directed paths out of a shared top node.

    The left part runs from the top down to the trek's source endpoint, the
    right part from the same top down to its target endpoint.  Either part
    may be the single-node path, and the trivial trek at v has both parts
    equal to (v,).

    Attributes:
        left: Node sequence top -> ... -> source.
        right: Node sequence top -> ... -> target.
    """

    left: tuple[str, ...]
    right: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.left or not self.right:
            raise GraphError("trek parts must be nonempty")
        if self.left[0] != self.right[0]:
            raise GraphError("trek parts must share their top node")

    @property
    def top(self) -> str:
        return self.left[0]

    @property
    def source(self) -> str:
        return self.left[-1]

    @property
    def target(self) -> str:
        return self.right[-1]

    def is_trivial(self) -> bool:
        return len(self.left) == 1 and len(self.right) == 1

    def edge_multiset(self) -> list[tuple[str, str]]:
        """All edges of both parts, with shared edges counted twice."""
        out = []
        for part in (self.left, self.right):
            out.extend(zip(part, part[1:]))
        return out

    def __str__(self) -> str:
        left = " <- ".join(reversed(self.left))
        right = " -> ".join(self.right[1:])
        return f"{left} -> {right}" if right else left


@dataclass(frozen=True)
class TrekSystem:
    """A finite collection of treks, checked for sided intersections.

    Attributes:
        treks: The member treks.
    """

    treks: tuple[Trek, ...]

    def sources(self) -> list[str]:
        return [t.source for t in self.treks]

    def targets(self) -> list[str]:
        return [t.target for t in self.treks]

    def has_no_sided_intersection(self) -> bool:
        """True if the left parts are pairwise node-disjoint and so are the
        right parts.  A left part may share nodes with another trek's right
        part; within one trek the parts always share the top."""
        lefts: set[str] = set()
        rights: set[str] = set()
        for t in self.treks:
            lpart = set(t.left)
            rpart = set(t.right)
            if lefts & lpart or rights & rpart:
                return False
            lefts |= lpart
            rights |= rpart
        return True


def _all_paths(G: LatentDigraph, s: str, t: str) -> list[tuple[str, ...]]:
    # All directed paths s -> t in an acyclic graph (simple by acyclicity).
    if s == t:
        return [(s,)]
    out = []
    for c in G.children(s):
        out.extend((s,) + rest for rest in _all_paths(G, c, t))
    return out


def enumerate_treks(G: LatentDigraph, v: str, w: str, max_nodes: int = 10) -> list[Trek]:
    """All treks from v to w in an acyclic graph.

    Intended as a small-instance oracle; the number of treks is exponential
    in general, so graphs above max_nodes are rejected.

    Args:
        G: An acyclic graph.
        v: Source endpoint.
        w: Target endpoint.
        max_nodes: Size guard, default 10.

    Returns:
        Every trek (pair of directed paths out of a common top), in a
        deterministic order: tops in declaration order, then left and right
        paths in child-declaration order.
    """
    if not G.is_acyclic():
        raise GraphError("trek enumeration requires an acyclic graph")
    if len(G.nodes) > max_nodes:
        raise GraphError(
            f"graph has {len(G.nodes)} nodes; enumeration is limited to {max_nodes}"
        )
    for endpoint in (v, w):
        if endpoint not in G._index:
            raise GraphError(f"unknown node {endpoint!r}")
    treks = []
    for top in G.nodes:
        lefts = _all_paths(G, top, v)
        if not lefts:
            continue
        rights = _all_paths(G, top, w)
        for lp in lefts:
            for rp in rights:
                treks.append(Trek(left=lp, right=rp))
    return treks


def trek_separates(
    G: LatentDigraph,
    A: Iterable[str],
    B: Iterable[str],
    c_a: Iterable[str],
    c_b: Iterable[str],
) -> bool:
    """Decide whether (c_a, c_b) trek separates A from B in G.

    Separation holds when every trek from a node in A to a node in B has a
    left-part node in c_a or a right-part node in c_b (endpoints and top
    included).  Decided by reachability in the doubled graph: an L-copy of G
    walked against the edges, an R-copy walked along them, crossover L(t) ->
    R(t) at every surviving node t; deleting L(c_a) and R(c_b) kills exactly
    the blocked treks.  Only reachability is used, so cyclic graphs are fine.
    """
    ca = frozenset(c_a)
    cb = frozenset(c_b)
    targets = {b for b in B if b not in cb}
    if not targets:
        return True
    # state (v, 0) is L(v), (v, 1) is R(v)
    seen: set[tuple[str, int]] = set()
    stack: list[tuple[str, int]] = []
    for a in A:
        if a not in ca and (a, 0) not in seen:
            seen.add((a, 0))
            stack.append((a, 0))
    while stack:
        v, side = stack.pop()
        if side == 0:
            for p in G.parents(v):
                if p not in ca and (p, 0) not in seen:
                    seen.add((p, 0))
                    stack.append((p, 0))
            if v not in cb and (v, 1) not in seen:
                seen.add((v, 1))
                stack.append((v, 1))
        else:
            if v in targets:
                return False
            for c in G.children(v):
                if c not in cb and (c, 1) not in seen:
                    seen.add((c, 1))
                    stack.append((c, 1))
    return True


# -- latent reachability --------------------------------------------------


def latent_reachable(
    G: LatentDigraph,
    h1: Iterable[str],
    h2: Iterable[str],
    sources: Iterable[str],
) -> set[str]:
    """Observed nodes reachable from the sources by an (h1, h2)-avoiding
    latent trek.

    A latent trek is a trek in the latent subgraph of G.  A node w qualifies
    when some latent trek from a source a to w has its left part (a up to
    the top) disjoint from h1 and its right part (top down to w) disjoint
    from h2; both parts include the top and their endpoint.  The trivial
    trek makes a source a member of its own result exactly when a is
    observed and lies outside h1 and h2.

    Args:
        G: The graph; treks are taken in its latent subgraph.
        h1: Nodes forbidden on left parts.
        h2: Nodes forbidden on right parts.
        sources: Trek starting endpoints (observed or latent).

    Returns:
        The reachable observed nodes.
    """
    ca = frozenset(h1)
    cb = frozenset(h2)
    for name, group in (("h1", ca), ("h2", cb)):
        bad = [v for v in group if v not in G._index or not G.is_latent(v)]
        if bad:
            raise GraphError(f"{name} contains non-latent nodes {sorted(bad)}")
    seen: set[tuple[str, int]] = set()
    stack: list[tuple[str, int]] = []
    for a in sources:
        if a not in G._index:
            raise GraphError(f"unknown source node {a!r}")
        if a not in ca and (a, 0) not in seen:
            seen.add((a, 0))
            stack.append((a, 0))
    out: set[str] = set()
    while stack:
        v, side = stack.pop()
        if side == 0:
            # Latent-subgraph parents: only latent tails survive.
            for p in G.parents(v):
                if G.is_latent(p) and p not in ca and (p, 0) not in seen:
                    seen.add((p, 0))
                    stack.append((p, 0))
            if v not in cb and (v, 1) not in seen:
                seen.add((v, 1))
                stack.append((v, 1))
        else:
            if G.is_observed(v):
                out.add(v)
            if G.is_latent(v):
                for c in G.children(v):
                    if c not in cb and (c, 1) not in seen:
                        seen.add((c, 1))
                        stack.append((c, 1))
    return out


def extended_latent_reachable(
    G: LatentDigraph,
    h1: Iterable[str],
    h2: Iterable[str],
    sources: Iterable[str],
) -> set[str]:
    """Descendant closure of the latent-reachable set.

    Every node with a directed path (in the full graph) out of some
    observed member of latent_reachable(G, h1, h2, sources) is included, so
    the result may contain latent nodes; intersect with G.observed where
    only observed nodes are wanted.
    """
    out: set[str] = set()
    for u in latent_reachable(G, h1, h2, sources):
        out |= descendants(G, u)
    return out


# -- canonicalization and confounding ------------------------------------


def canonicalize(G: LatentDigraph) -> LatentDigraph:
    """The canonical graph: every latent node becomes a source node.

    Keeps the node split and rewires the edges: an observed pair gains the
    edge v -> w whenever v has a semi-direct path to w, and a latent node h
    gains the edge h -> w to every observed w it reaches by a directed path
    in the latent subgraph.  Latent-to-latent and observed-to-latent edges
    disappear.
    """
    edges: list[tuple[str, str]] = []
    pa = {w: set(semi_direct_parents(G, w)) for w in G.observed}
    for v in G.observed:
        for w in G.observed:
            if v != w and v in pa[w]:
                edges.append((v, w))
    glat = latent_subgraph(G)
    for h in G.latent:
        reach = descendants(glat, h)
        for w in G.observed:
            if w in reach:
                edges.append((h, w))
    return LatentDigraph(G.observed, G.latent, edges)


def is_confounding_free_acyclic(G: LatentDigraph) -> bool:
    """True when G is acyclic and no semi-direct effect is confounded.

    A pair (u, v) with a semi-direct path u to v is confounded when some
    latent trek joins u and v, which for distinct observed endpoints means
    a latent node reaches both of them in the latent subgraph.
    """
    if not G.is_acyclic():
        return False
    glat = latent_subgraph(G)
    lat_reach = {h: descendants(glat, h) for h in G.latent}
    for v in G.observed:
        for u in semi_direct_parents(G, v):
            for h in G.latent:
                if u in lat_reach[h] and v in lat_reach[h]:
                    return False
    return True
