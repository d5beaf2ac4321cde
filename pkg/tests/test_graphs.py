"""Tests for the combinatorial graph layer."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semilatent import fixtures
from semilatent.graphs import (
    GraphError,
    LatentDigraph,
    canonicalize,
    descendants,
    enumerate_treks,
    extended_latent_reachable,
    is_confounding_free_acyclic,
    latent_reachable,
    latent_subgraph,
    parse_graph,
    semi_direct_parents,
    trek_separates,
)

from util import random_cyclic_graph, random_mixed_graph


# -- construction and parsing ---------------------------------------------


def test_fixture_json_files_round_trip():
    for name, builder in fixtures.FIXTURES.items():
        text = open(f"figures/{name}.json").read()
        G = parse_graph(text)
        assert G == builder()
        assert G.to_json() == text


def test_parse_rejects_duplicate_node():
    with pytest.raises(GraphError, match="duplicate observed"):
        LatentDigraph(["a", "a"], [], [])


def test_parse_rejects_overlapping_partitions():
    with pytest.raises(GraphError, match="both observed and latent.*'a'"):
        LatentDigraph(["a"], ["a"], [])


def test_parse_rejects_unknown_endpoint():
    with pytest.raises(GraphError, match="'b'"):
        LatentDigraph(["a"], [], [("a", "b")])


def test_parse_rejects_self_loop():
    with pytest.raises(GraphError, match="self-loop at 'a'"):
        LatentDigraph(["a", "b"], [], [("a", "a")])


def test_parse_rejects_duplicate_edge():
    with pytest.raises(GraphError, match="duplicate edge"):
        LatentDigraph(["a", "b"], [], [("a", "b"), ("a", "b")])


def test_singleton_graph_is_valid():
    G = LatentDigraph(["a"], [], [])
    assert G.observed == ("a",)
    assert G.edges == ()
    assert G.is_acyclic()


def test_parse_graph_rejects_malformed_json():
    with pytest.raises(GraphError):
        parse_graph("{not json")
    with pytest.raises(GraphError):
        parse_graph('{"observed": ["a"]}')


# -- latent subgraph ------------------------------------------------------


def test_latent_subgraph_fig2a():
    glat = latent_subgraph(fixtures.fig2a())
    assert set(glat.edges) == {
        ("h1", "h2"),
        ("h2", "v2"),
        ("h2", "v3"),
        ("h2", "v4"),
        ("h2", "v5"),
    }
    assert glat.observed == fixtures.fig2a().observed
    assert glat.latent == fixtures.fig2a().latent


def test_latent_subgraph_no_latent_is_edgeless():
    G = LatentDigraph(["a", "b"], [], [("a", "b")])
    assert latent_subgraph(G).edges == ()


def test_latent_subgraph_all_latent_tails_is_identity():
    G = LatentDigraph(["a", "b"], ["h"], [("h", "a"), ("h", "b")])
    assert latent_subgraph(G).edges == G.edges


def test_latent_subgraph_idempotent_and_monotone():
    for builder in fixtures.FIXTURES.values():
        G = builder()
        glat = latent_subgraph(G)
        assert set(glat.edges) <= set(G.edges)
        assert latent_subgraph(glat) == glat


# -- semi-direct parents --------------------------------------------------


def test_semi_direct_parents_fig2b_v5():
    assert semi_direct_parents(fixtures.fig2b(), "v5") == ["v2", "v4", "v6"]


def test_semi_direct_parents_fig4_v4():
    assert semi_direct_parents(fixtures.fig4(), "v4") == ["v1", "v3"]


def test_semi_direct_parents_no_latent_is_plain_parents():
    G = LatentDigraph(["a", "b", "c"], [], [("a", "c"), ("b", "c")])
    assert semi_direct_parents(G, "c") == ["a", "b"]


def test_semi_direct_parents_rejects_latent_node():
    with pytest.raises(GraphError):
        semi_direct_parents(fixtures.fig2a(), "h1")


def test_semi_direct_parents_latent_mediated_cycle():
    # v -> h -> v puts v into its own semi-direct parent set.
    G = LatentDigraph(["v"], ["h"], [("v", "h"), ("h", "v")])
    assert semi_direct_parents(G, "v") == ["v"]


# -- descendants ----------------------------------------------------------


def test_descendants_fig2b_v6():
    assert descendants(fixtures.fig2b(), "v6") == {"v5", "v6"}


def test_descendants_sink_is_itself():
    assert descendants(fixtures.fig2a(), "v4") == {"v4"}


def test_descendants_fig4_h1():
    # Both intermediate latent nodes are on directed paths out of h1: h3
    # directly and h2 through v3.
    assert descendants(fixtures.fig4(), "h1") == {
        "h1",
        "h2",
        "h3",
        "v2",
        "v3",
        "v4",
        "v5",
        "v6",
    }


# -- latent reachability --------------------------------------------------


def test_latent_reachable_fig2b_avoid_left():
    # With h1 forbidden on left parts only, the trek v2 <- h2 -> h1 -> v5
    # still qualifies: its left part h2 -> v2 avoids h1.
    out = latent_reachable(fixtures.fig2b(), ("h1",), (), ("v2",))
    assert out == {"v1", "v2", "v3", "v5", "v6"}
    assert "v5" in out and "v6" in out


def test_latent_reachable_fig2b_avoid_both():
    out = latent_reachable(fixtures.fig2b(), ("h1",), ("h1",), ("v2",))
    assert out == {"v2", "v6"}
    assert "v5" not in out


def test_latent_reachable_empty_sources():
    assert latent_reachable(fixtures.fig2b(), ("h1",), (), ()) == set()


def test_latent_reachable_rejects_non_latent_avoid_set():
    with pytest.raises(GraphError, match="non-latent"):
        latent_reachable(fixtures.fig2b(), ("v1",), (), ("v2",))
    with pytest.raises(GraphError, match="unknown source"):
        latent_reachable(fixtures.fig2b(), (), (), ("zzz",))


def test_latent_reachable_source_in_avoid_set_excluded():
    # A latent source sitting in h1 cannot even start a trek.
    G = fixtures.fig2b()
    assert latent_reachable(G, ("h1",), (), ("h1",)) == set()


def test_extended_latent_reachable_fig2b():
    out = extended_latent_reachable(fixtures.fig2b(), ("h1",), ("h1",), ("v2",))
    assert out == {"v2", "v5", "v6"}


def test_extended_latent_reachable_empty_sources():
    assert extended_latent_reachable(fixtures.fig2b(), (), (), ()) == set()


def test_lr_subset_of_elr_random():
    rng = random.Random(11)
    for _ in range(30):
        G = random_cyclic_graph(rng, rng.randint(1, 4), rng.randint(1, 3), 0.3)
        lats = list(G.latent)
        h1 = tuple(v for v in lats if rng.random() < 0.4)
        h2 = tuple(v for v in lats if rng.random() < 0.4)
        src = tuple(v for v in G.nodes if rng.random() < 0.4)
        lr = latent_reachable(G, h1, h2, src)
        elr = extended_latent_reachable(G, h1, h2, src)
        assert lr <= elr


def test_elr_unavoided_monotone_in_edges():
    rng = random.Random(12)
    for _ in range(20):
        G = random_mixed_graph(rng, 4, 2, 0.5)
        if not G.edges:
            continue
        kept = [e for e in G.edges if rng.random() < 0.6]
        H = LatentDigraph(G.observed, G.latent, kept)
        src = tuple(v for v in G.nodes if rng.random() < 0.5)
        assert extended_latent_reachable(H, (), (), src) <= extended_latent_reachable(
            G, (), (), src
        )


def test_elr_is_descendant_closure_of_lr():
    rng = random.Random(13)
    for _ in range(20):
        G = random_mixed_graph(rng, 4, 2, 0.4)
        lats = list(G.latent)
        h1 = tuple(v for v in lats if rng.random() < 0.5)
        h2 = tuple(v for v in lats if rng.random() < 0.5)
        src = tuple(v for v in G.observed if rng.random() < 0.5)
        lr = latent_reachable(G, h1, h2, src)
        want = set()
        for u in lr:
            want |= descendants(G, u)
        assert extended_latent_reachable(G, h1, h2, src) == want


# -- trek enumeration -----------------------------------------------------


def test_enumerate_treks_fig2a_v3_v4_has_seven():
    treks = enumerate_treks(fixtures.fig2a(), "v3", "v4")
    assert len(treks) == 7
    assert len(set(map(str, treks))) == 7
    # the direct edge appears as the trek with trivial left part
    assert any(t.left == ("v3",) and t.right == ("v3", "v4") for t in treks)
    # deterministic order
    assert [str(t) for t in enumerate_treks(fixtures.fig2a(), "v3", "v4")] == [
        str(t) for t in treks
    ]


def test_enumerate_treks_trivial():
    treks = enumerate_treks(fixtures.fig2a(), "v1", "v1")
    assert len(treks) == 1
    assert treks[0].is_trivial()


def test_enumerate_treks_disconnected():
    G = LatentDigraph(["a", "b"], [], [])
    assert enumerate_treks(G, "a", "b") == []


def test_enumerate_treks_rejects_cycles():
    G = LatentDigraph(["a", "b"], [], [("a", "b"), ("b", "a")])
    with pytest.raises(GraphError, match="acyclic"):
        enumerate_treks(G, "a", "b")


def test_enumerate_treks_size_bound():
    names = [f"n{i}" for i in range(12)]
    G = LatentDigraph(names, [], [])
    with pytest.raises(GraphError):
        enumerate_treks(G, "n0", "n1")
    assert enumerate_treks(G, "n0", "n1", max_nodes=12) == []


def test_enumerate_treks_unknown_endpoint():
    with pytest.raises(GraphError, match="unknown node 'nope'"):
        enumerate_treks(fixtures.fig2a(), "v1", "nope")


# -- trek separation ------------------------------------------------------


def test_trek_separates_fig2b_no_small_cut():
    G = fixtures.fig2b()
    A, B = {"v1", "v2"}, {"v5", "v6"}
    assert not trek_separates(G, A, B, (), ())
    for c in G.nodes:
        assert not trek_separates(G, A, B, (c,), ())
        assert not trek_separates(G, A, B, (), (c,))


def test_trek_separates_ca_equals_a():
    G = fixtures.fig2b()
    assert trek_separates(G, {"v1", "v2"}, {"v5", "v6"}, {"v1", "v2"}, ())


def _brute_separated(G, A, B, ca, cb):
    for a in A:
        for b in B:
            for trek in enumerate_treks(G, a, b):
                if not (set(trek.left) & ca) and not (set(trek.right) & cb):
                    return False
    return True


def test_trek_separates_matches_enumeration():
    rng = random.Random(99)
    samples = 0
    while samples < 1000:
        G = random_mixed_graph(rng, rng.randint(2, 5), rng.randint(0, 3), 0.4)
        nodes = list(G.nodes)
        for _ in range(10):
            A = set(rng.sample(nodes, rng.randint(1, 2)))
            B = set(rng.sample(nodes, rng.randint(1, 2)))
            ca = set(v for v in nodes if rng.random() < 0.25)
            cb = set(v for v in nodes if rng.random() < 0.25)
            assert trek_separates(G, A, B, ca, cb) == _brute_separated(
                G, A, B, ca, cb
            )
            samples += 1


def test_trek_separates_on_cyclic_graph():
    G = LatentDigraph(["a", "b"], [], [("a", "b"), ("b", "a")])
    assert not trek_separates(G, {"a"}, {"b"}, (), ())
    assert trek_separates(G, {"a"}, {"b"}, ("a",), ())
    assert trek_separates(G, {"a"}, {"b"}, (), ("b",))


# -- canonicalization -----------------------------------------------------


def test_canonicalize_fixture_pairs():
    for name, expected in fixtures.CANONICAL_FIXTURES.items():
        assert canonicalize(fixtures.FIXTURES[name]()) == expected()


def test_canonicalize_idempotent():
    for builder in fixtures.FIXTURES.values():
        can = canonicalize(builder())
        assert canonicalize(can) == can


def test_canonicalize_latent_nodes_become_sources():
    for builder in fixtures.FIXTURES.values():
        can = canonicalize(builder())
        for h in can.latent:
            assert can.parents(h) == ()


def test_canonicalize_fixed_point_on_canonical_fixture():
    can = fixtures.fig5a_canonical()
    assert canonicalize(can) == can


# -- confounding-free predicate -------------------------------------------


def test_confounding_free_no_latent():
    G = LatentDigraph(["a", "b", "c"], [], [("a", "b"), ("b", "c")])
    assert is_confounding_free_acyclic(G)


def test_confounding_free_rejects_fig2a_and_fig4():
    assert not is_confounding_free_acyclic(fixtures.fig2a())
    assert not is_confounding_free_acyclic(fixtures.fig4())


def test_confounding_free_pure_measurement_graph():
    # h confounds v1 and v2 but neither has a semi-direct effect on the
    # other, so the pair is not confounded in the relevant sense.
    G = LatentDigraph(["v1", "v2"], ["h"], [("h", "v1"), ("h", "v2")])
    assert is_confounding_free_acyclic(G)


def test_confounding_free_rejects_cyclic():
    G = LatentDigraph(["a", "b"], [], [("a", "b"), ("b", "a")])
    assert not is_confounding_free_acyclic(G)


# -- property tests -------------------------------------------------------


@st.composite
def small_graphs(draw):
    n_obs = draw(st.integers(1, 5))
    n_lat = draw(st.integers(0, 3))
    names = [f"n{i}" for i in range(n_obs + n_lat)]
    edges = []
    for i in range(len(names)):
        for j in range(len(names)):
            if i != j and draw(st.booleans()):
                edges.append((names[i], names[j]))
    return LatentDigraph(names[:n_obs], names[n_obs:], edges)


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_json_round_trip_property(G):
    assert parse_graph(G.to_json()) == G


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_canonicalize_idempotent_property(G):
    can = canonicalize(G)
    assert canonicalize(can) == can
    for h in can.latent:
        assert can.parents(h) == ()
