"""Ingestion, condensation, classification, component and exclusion ops."""
import random

import pytest

from hourglass import (
    InputError,
    VertexClass,
    build_raw,
    class_counts,
    classify,
    condense,
    exclude_vertices,
    largest_wcc,
)

import oracle


def net(pairs):
    g, _ = condense(build_raw(pairs))
    return g


# --- build_raw ---------------------------------------------------------------


def test_build_raw_collapses_duplicates():
    raw = build_raw([("a", "b"), ("a", "b")])
    assert raw.edges == frozenset({("a", "b")})
    assert raw.duplicate_edges_dropped == 1


def test_build_raw_drops_self_loops():
    raw = build_raw([("a", "a"), ("a", "b")])
    assert raw.edges == frozenset({("a", "b")})
    assert raw.self_loops_dropped == 1


def test_build_raw_direct_construction():
    raw = build_raw([("s1", "a"), ("s2", "a"), ("a", "t1"), ("a", "t2")])
    assert len(raw.vertices) == 5
    assert len(raw.edges) == 4


def test_build_raw_empty_is_an_error():
    with pytest.raises(InputError, match="empty graph"):
        build_raw([])


# --- condense ----------------------------------------------------------------


def test_condense_two_cycle():
    g, report = condense(build_raw([("x", "y"), ("y", "x"), ("x", "z")]))
    assert g.vertices == frozenset({"scc:x:2", "z"})
    assert g.edges == frozenset({("scc:x:2", "z")})
    assert g.members["scc:x:2"] == frozenset({"x", "y"})
    assert report.super_vertex_count == 1
    assert report.sizes == (2,)


def test_condense_is_identity_on_dags():
    raw = build_raw([("a", "b"), ("b", "c")])
    g, report = condense(raw)
    assert g.vertices == raw.vertices
    assert g.edges == raw.edges
    assert report.super_vertex_count == 0
    assert report.size_mean == 0.0


def test_condense_five_cycle_with_chord():
    pairs = [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e"), ("e", "c")]
    g, report = condense(build_raw(pairs))
    assert g.vertices == frozenset({"scc:a:5"})
    assert g.edges == frozenset()
    assert g.members["scc:a:5"] == frozenset("abcde")
    assert g.classes["scc:a:5"] is VertexClass.ISOLATED
    assert report.sizes == (5,)


def test_condense_name_collision_gets_suffix():
    pairs = [("a", "b"), ("b", "a"), ("scc:a:2", "a")]
    g, _ = condense(build_raw(pairs))
    assert "scc:a:2" in g.vertices
    assert "scc:a:2+" in g.vertices
    assert g.members["scc:a:2+"] == frozenset({"a", "b"})


def test_condensation_report_statistics():
    pairs = [
        ("a", "b"), ("b", "a"),
        ("c", "d"), ("d", "e"), ("e", "c"),
        ("scc:a:2", "c"),
    ]
    _, report = condense(build_raw(pairs))
    assert report.super_vertex_count == 2
    assert report.sizes == (3, 2)
    assert report.size_mean == pytest.approx(2.5)
    assert report.size_std == pytest.approx(0.5)


# --- classify ----------------------------------------------------------------


def test_classify_diamond():
    g = net([("s1", "a"), ("s2", "a"), ("a", "t1"), ("a", "t2")])
    classes = classify(g)
    assert classes["s1"] is VertexClass.SOURCE
    assert classes["s2"] is VertexClass.SOURCE
    assert classes["a"] is VertexClass.INTERMEDIATE
    assert classes["t1"] is VertexClass.TARGET
    assert classes["t2"] is VertexClass.TARGET


def test_classify_chain():
    g = net([("s", "m"), ("m", "t")])
    counts = class_counts(g)
    assert counts[VertexClass.SOURCE] == 1
    assert counts[VertexClass.INTERMEDIATE] == 1
    assert counts[VertexClass.TARGET] == 1


def test_single_vertex_without_edges_is_isolated():
    g = net([("a", "b"), ("b", "a")])
    assert g.classes["scc:a:2"] is VertexClass.ISOLATED


# --- largest_wcc -------------------------------------------------------------


def test_largest_wcc_picks_bigger_component():
    g = net([("a", "b"), ("b", "c"), ("x", "y")])
    assert largest_wcc(g).vertices == frozenset({"a", "b", "c"})


def test_largest_wcc_identity_when_connected():
    g = net([("a", "b"), ("b", "c")])
    assert largest_wcc(g).vertices == g.vertices
    assert largest_wcc(g).edges == g.edges


def test_largest_wcc_tie_breaks_on_smallest_id():
    g = net([("c", "d"), ("a", "b")])
    assert largest_wcc(g).vertices == frozenset({"a", "b"})


# --- exclude_vertices ----------------------------------------------------------


def test_exclude_cut_vertex_isolates_the_rest():
    g = net([("s1", "a"), ("s2", "a"), ("a", "t1"), ("a", "t2")])
    out, unknown = exclude_vertices(g, {"a"})
    assert unknown == 0
    assert out.vertices == frozenset({"s1", "s2", "t1", "t2"})
    assert out.edges == frozenset()
    assert all(cls is VertexClass.ISOLATED for cls in out.classes.values())


def test_exclude_nothing_is_identity():
    g = net([("a", "b")])
    out, unknown = exclude_vertices(g, set())
    assert unknown == 0
    assert out.vertices == g.vertices
    assert out.edges == g.edges


def test_exclude_unknown_names_are_counted():
    g = net([("a", "b")])
    out, unknown = exclude_vertices(g, {"zzz"})
    assert unknown == 1
    assert out.vertices == g.vertices


def test_exclude_recomputes_classes():
    g = net([("s", "m"), ("m", "t"), ("s", "t")])
    out, _ = exclude_vertices(g, {"t"})
    assert out.classes["m"] is VertexClass.TARGET
    assert out.classes["s"] is VertexClass.SOURCE


# --- randomized properties -----------------------------------------------------


def test_condense_properties_on_random_digraphs():
    rng = random.Random(0)
    for _ in range(1000):
        pairs = oracle.random_digraph(rng, max_v=50, p=0.08)
        raw = build_raw(pairs)
        g, report = condense(raw)

        assert oracle.is_topological(set(g.vertices), set(g.edges))

        merged = set()
        total = 0
        for members in g.members.values():
            assert not (merged & members)
            merged |= members
            total += len(members)
        assert merged == set(raw.vertices)
        assert total == len(raw.vertices)

        sizes = [len(m) for m in g.members.values() if len(m) > 1]
        assert sorted(sizes, reverse=True) == list(report.sizes)

        if g.edges:
            counts = class_counts(g)
            assert counts[VertexClass.SOURCE] >= 1
            assert counts[VertexClass.TARGET] >= 1


def test_condense_idempotent_on_random_digraphs():
    rng = random.Random(1)
    for _ in range(200):
        pairs = oracle.random_digraph(rng, max_v=30, p=0.1)
        g, _ = condense(build_raw(pairs))
        if not g.edges:
            continue
        again, report = condense(build_raw(sorted(g.edges)))
        assert report.super_vertex_count == 0
        assert again.edges == g.edges
        non_isolated = {
            v for v in g.vertices if g.classes[v] is not VertexClass.ISOLATED
        }
        assert again.vertices == frozenset(non_isolated)
