"""Built-in example graphs.

Each builder returns one graph from the repository catalog; the figures/
directory ships the same graphs as JSON (byte-identical to ``to_json``).
They cover the corners the test-suite leans on: measurement-style graphs
whose latent nodes form chains, a graph with an observed-to-latent back
edge, graphs whose canonicalization gains or loses identifiability, and a
small flow instance.
"""

from __future__ import annotations

from .graphs import LatentDigraph


def fig1() -> LatentDigraph:
    """Air-quality style graph: six observed, three latent nodes.

    Two observed roots (T, NO2) feed latent nodes; the latent chain
    AP -> I fans out to three observed sinks.
    """
    return LatentDigraph(
        observed=["T", "CO", "NO2", "sV", "sI", "CRP"],
        latent=["AP", "I", "U"],
        edges=[
            ("T", "AP"),
            ("NO2", "U"),
            ("AP", "I"),
            ("AP", "CO"),
            ("AP", "NO2"),
            ("I", "sV"),
            ("I", "sI"),
            ("I", "CRP"),
            ("U", "sV"),
        ],
    )


def fig4() -> LatentDigraph:
    """The fig1 graph with anonymous labels (v1..v6, h1..h3)."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5", "v6"],
        latent=["h1", "h2", "h3"],
        edges=[
            ("v1", "h1"),
            ("v3", "h2"),
            ("h1", "h3"),
            ("h1", "v2"),
            ("h1", "v3"),
            ("h3", "v4"),
            ("h3", "v5"),
            ("h3", "v6"),
            ("h2", "v4"),
        ],
    )


def fig2a() -> LatentDigraph:
    """Latent chain h1 -> h2 fanning out to four observed nodes, with one
    observed root wired into the chain and one observed edge v3 -> v4."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5"],
        latent=["h1", "h2"],
        edges=[
            ("v1", "h1"),
            ("h1", "h2"),
            ("h2", "v2"),
            ("h2", "v3"),
            ("h2", "v4"),
            ("h2", "v5"),
            ("v3", "v4"),
        ],
    )


def fig2b() -> LatentDigraph:
    """Graph with an observed-to-latent edge (v4 -> h1) inside a latent
    chain, plus two observed edges into v5."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5", "v6"],
        latent=["h1", "h2"],
        edges=[
            ("h2", "h1"),
            ("h1", "v1"),
            ("h1", "v3"),
            ("h1", "v5"),
            ("h2", "v2"),
            ("h2", "v6"),
            ("v4", "h1"),
            ("v2", "v5"),
            ("v6", "v5"),
        ],
    )


def fig5a() -> LatentDigraph:
    """Canonicalization example: observed root v1 points back into the
    latent layer (v1 -> h3)."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5"],
        latent=["h1", "h2", "h3"],
        edges=[
            ("h1", "v1"),
            ("h1", "v2"),
            ("h1", "h2"),
            ("h2", "v2"),
            ("h2", "v3"),
            ("h2", "v4"),
            ("h2", "v5"),
            ("h3", "v3"),
            ("h3", "v4"),
            ("v1", "h3"),
        ],
    )


def fig5a_canonical() -> LatentDigraph:
    """Expected canonicalization of fig5a (latent nodes become sources)."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5"],
        latent=["h1", "h2", "h3"],
        edges=[
            ("v1", "v3"),
            ("v1", "v4"),
            ("h1", "v1"),
            ("h1", "v2"),
            ("h1", "v3"),
            ("h1", "v4"),
            ("h1", "v5"),
            ("h2", "v2"),
            ("h2", "v3"),
            ("h2", "v4"),
            ("h2", "v5"),
            ("h3", "v3"),
            ("h3", "v4"),
        ],
    )


def fig5b() -> LatentDigraph:
    """Canonicalization example: a pure latent chain h1 -> h2 -> h3 with
    one observed edge v5 -> v6."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5", "v6"],
        latent=["h1", "h2", "h3"],
        edges=[
            ("h1", "v1"),
            ("h1", "h2"),
            ("h2", "v2"),
            ("h2", "h3"),
            ("h3", "v3"),
            ("h3", "v4"),
            ("h3", "v5"),
            ("h3", "v6"),
            ("v5", "v6"),
        ],
    )


def fig5b_canonical() -> LatentDigraph:
    """Expected canonicalization of fig5b."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5", "v6"],
        latent=["h1", "h2", "h3"],
        edges=[
            ("v5", "v6"),
            ("h1", "v1"),
            ("h1", "v2"),
            ("h1", "v3"),
            ("h1", "v4"),
            ("h1", "v5"),
            ("h1", "v6"),
            ("h2", "v2"),
            ("h2", "v3"),
            ("h2", "v4"),
            ("h2", "v5"),
            ("h2", "v6"),
            ("h3", "v3"),
            ("h3", "v4"),
            ("h3", "v5"),
            ("h3", "v6"),
        ],
    )


def fig6() -> LatentDigraph:
    """Graph whose canonicalization changes the certification verdict: two
    observed roots feed latent h1, and h2/h3 confound the two paths into
    the sink v5."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5"],
        latent=["h1", "h2", "h3"],
        edges=[
            ("v1", "h1"),
            ("v2", "h1"),
            ("h1", "v3"),
            ("h1", "v4"),
            ("v3", "v5"),
            ("v4", "v5"),
            ("h2", "v3"),
            ("h2", "v5"),
            ("h3", "v4"),
            ("h3", "v5"),
        ],
    )


def fig6_canonical() -> LatentDigraph:
    """Expected canonicalization of fig6."""
    return LatentDigraph(
        observed=["v1", "v2", "v3", "v4", "v5"],
        latent=["h1", "h2", "h3"],
        edges=[
            ("v1", "v3"),
            ("v1", "v4"),
            ("v2", "v3"),
            ("v2", "v4"),
            ("v3", "v5"),
            ("v4", "v5"),
            ("h1", "v3"),
            ("h1", "v4"),
            ("h2", "v3"),
            ("h2", "v5"),
            ("h3", "v4"),
            ("h3", "v5"),
        ],
    )


def fig7() -> LatentDigraph:
    """Host graph of the small flow instance (all nodes observed)."""
    return LatentDigraph(
        observed=["y1", "y2", "v", "w", "z", "p"],
        latent=[],
        edges=[
            ("y1", "v"),
            ("y1", "w"),
            ("y2", "v"),
            ("v", "z"),
            ("v", "p"),
            ("y2", "p"),
            ("w", "z"),
        ],
    )


def fig7_instance() -> dict:
    """The fig7 flow query: restricted edge set, sinks and allowed sources.

    Returns:
        Dict with keys graph, d1_edges, z, p, ya.  The expected maximum is
        2, attained by the path system {y1 -> v -> z, y2 -> p} with the
        z-path inside the restricted edges.
    """
    G = fig7()
    d1 = frozenset(
        [("y1", "v"), ("y1", "w"), ("y2", "v"), ("v", "z"), ("v", "p")]
    )
    return {
        "graph": G,
        "d1_edges": d1,
        "z": ("z",),
        "p": ("p",),
        "ya": ("y1", "y2"),
    }


FIXTURES = {
    "fig1": fig1,
    "fig2a": fig2a,
    "fig2b": fig2b,
    "fig4": fig4,
    "fig5a": fig5a,
    "fig5b": fig5b,
    "fig6": fig6,
    "fig7": fig7,
}

CANONICAL_FIXTURES = {
    "fig5a": fig5a_canonical,
    "fig5b": fig5b_canonical,
    "fig6": fig6_canonical,
}
