"""Flattened baseline, H-score, core vertex coverage, core location."""
import random

import pytest

from hourglass import (
    Core,
    CoreElement,
    InputError,
    VertexClass,
    avg_core_location,
    brute_force_core,
    build_raw,
    compute_path_stats,
    condense,
    core_vertex_coverage,
    flatten,
    greedy_core,
    h_from_sizes,
    h_score,
)

import oracle


def net(pairs):
    g, _ = condense(build_raw(pairs))
    return g


HUB = [("s1", "m"), ("s2", "m"), ("m", "t1"), ("m", "t2")]
CHAIN = [("s", "m"), ("m", "t")]
SHORTCUT = [("s", "t"), ("s", "m"), ("m", "t")]
TWO_CHAINS = [("s1", "m1"), ("m1", "t1"), ("s2", "m2"), ("m2", "t2")]

# Original needs three picks (the waist plus two equivalent pairs) while
# the flat baseline is a complete 2x2 graph needing two.
WIDE_WAIST = [
    ("v1", "v2"), ("v1", "v5"), ("v2", "v0"), ("v3", "v0"),
    ("v3", "v1"), ("v4", "v1"), ("v4", "v5"),
]

# Already flat, and adversarial for the unrestricted greedy: it picks
# the popular targets a and b first, strands the two leftover pairs
# (c,q) and (d,r), and ends with four elements although the three
# sources cover all eight edges.
GREEDY_TRAP = [
    ("p", "a"), ("p", "b"),
    ("q", "a"), ("q", "b"), ("q", "c"),
    ("r", "a"), ("r", "b"), ("r", "d"),
]


# --- flatten ---------------------------------------------------------------------


def test_flatten_hub_gives_complete_bipartite():
    flat = flatten(net(HUB))
    assert flat.vertices == frozenset({"s1", "s2", "t1", "t2"})
    assert flat.edges == frozenset(
        {("s1", "t1"), ("s1", "t2"), ("s2", "t1"), ("s2", "t2")}
    )


def test_flatten_chain_and_shortcut_collapse():
    assert flatten(net(CHAIN)).edges == frozenset({("s", "t")})
    assert flatten(net(SHORTCUT)).edges == frozenset({("s", "t")})


def test_flatten_is_idempotent():
    rng = random.Random(31)
    for _ in range(50):
        g = net(oracle.random_dag(rng))
        flat = flatten(g)
        again = flatten(flat)
        assert again.vertices == flat.vertices
        assert again.edges == flat.edges


def test_flatten_edges_iff_reachable():
    rng = random.Random(32)
    for _ in range(100):
        g = net(oracle.random_dag(rng))
        adj = oracle.out_adjacency(set(g.vertices), set(g.edges))

        def reach(start):
            seen = set()
            stack = [start]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            return seen

        flat = flatten(g)
        sources = {v for v, c in g.classes.items() if c is VertexClass.SOURCE}
        targets = {v for v, c in g.classes.items() if c is VertexClass.TARGET}
        expected = {
            (s, t) for s in sources for t in reach(s) if t in targets
        }
        assert flat.edges == expected


def test_flatten_requires_sources_and_targets():
    g = net([("x", "y"), ("y", "x")])
    with pytest.raises(InputError, match="no source-target paths"):
        flatten(g)


# --- h_from_sizes ----------------------------------------------------------------


def test_h_from_sizes():
    assert h_from_sizes(2, 3) == pytest.approx(1 - 2 / 3, abs=1e-9)
    assert h_from_sizes(1, 1) == 0.0
    assert h_from_sizes(3, 2) == pytest.approx(-0.5)
    with pytest.raises(InputError, match="positive"):
        h_from_sizes(1, 0)


# --- h_score examples --------------------------------------------------------------


def test_h_score_chain_is_flat_like():
    report = h_score(net(CHAIN))
    assert report.core_size == 1
    assert report.flat_core_size == 1
    assert report.h_score == 0.0


def test_h_score_hub():
    report = h_score(net(HUB))
    assert report.core_size == 1
    assert report.flat_core_size == 2
    assert report.h_score == 0.5
    assert report.core_vertex_coverage == 1.0
    assert report.avg_core_location == 0.5
    assert report.location_samples == ((0.5, 1.0),)


def test_h_score_can_go_negative():
    report = h_score(net(WIDE_WAIST))
    assert report.core_size == 3
    assert report.flat_core_size == 2
    assert report.h_score == pytest.approx(-0.5)


def test_h_score_rejects_pathless_networks():
    with pytest.raises(InputError, match="no source-target paths"):
        h_score(net([("x", "y"), ("y", "x")]))


def test_flat_core_respects_side_bound():
    g = net(GREEDY_TRAP)
    stats = compute_path_stats(g)
    assert greedy_core(g, stats).size == 4

    report = h_score(g)
    assert report.core_size == 4
    assert report.flat_core_size == 3
    assert report.h_score == pytest.approx(1 - 4 / 3)
    flat_members = [sorted(el.members) for el in report.flat_core.elements]
    assert flat_members == [["q"], ["r"], ["p"]]
    assert report.flat_core.coverage == 1.0
    assert report.flat_core.tie_events == 1


def test_minimum_covers_never_prefer_the_original():
    # With exact minimum covers at tau=1, the flat core can never be
    # smaller than the original one: choosing the endpoints of a flat
    # cover covers every original path too.
    rng = random.Random(35)

    def min_cover_size(g, stats):
        for k in range(1, len(g.vertices) + 1):
            score, _ = brute_force_core(g, stats, k)
            if score == 1.0:
                return k
        raise AssertionError("no full cover found")

    checked = 0
    for _ in range(30):
        g = net(oracle.random_dag(rng, max_v=8))
        stats = compute_path_stats(g)
        if stats.total == 0:
            continue
        flat = flatten(g)
        flat_stats = compute_path_stats(flat)
        original = min_cover_size(g, stats)
        baseline = min_cover_size(flat, flat_stats)
        assert original <= baseline
        checked += 1
    assert checked > 20


# --- core vertex coverage -----------------------------------------------------------


def test_coverage_full_when_core_is_the_waist():
    g = net(HUB)
    stats = compute_path_stats(g)
    core = greedy_core(g, stats)
    assert core_vertex_coverage(g, stats, core) == 1.0


def test_coverage_half_for_untouched_chain():
    g = net(TWO_CHAINS)
    stats = compute_path_stats(g)
    core = greedy_core(g, stats, tau=0.5)
    assert [sorted(el.members) for el in core.elements] == [["m1", "s1", "t1"]]
    assert core_vertex_coverage(g, stats, core) == 0.5


def test_coverage_ignores_vertices_off_paths():
    # The contracted cycle is isolated and sits on no ST-path, so it is
    # excluded from the denominator rather than diluting the fraction.
    g = net([("x", "y"), ("y", "x"), ("s", "t")])
    stats = compute_path_stats(g)
    core = greedy_core(g, stats, tau=1.0)
    assert core_vertex_coverage(g, stats, core) == 1.0


# --- core location -------------------------------------------------------------------


def test_location_of_pes_is_member_median():
    g = net(SHORTCUT)
    stats = compute_path_stats(g)
    core = greedy_core(g, stats)
    assert core.elements[0].members == frozenset({"s", "t"})
    assert avg_core_location(g, stats, core) == 0.5

    g = net(CHAIN)
    stats = compute_path_stats(g)
    assert avg_core_location(g, stats, greedy_core(g, stats)) == 0.5


def test_location_weights_by_coverage():
    g = net(HUB)
    stats = compute_path_stats(g)
    core = Core(
        elements=(
            CoreElement(members=frozenset({"m"}), weight=0.75),
            CoreElement(members=frozenset({"s1"}), weight=0.25),
        ),
        coverage=1.0,
        tau=0.9,
        tie_events=0,
    )
    assert avg_core_location(g, stats, core) == pytest.approx(0.375)


def test_location_skips_undefined_members():
    g = net([("x", "y"), ("y", "x"), ("s", "t")])
    stats = compute_path_stats(g)
    core = Core(
        elements=(
            CoreElement(members=frozenset({"scc:x:2"}), weight=0.5),
            CoreElement(members=frozenset({"s"}), weight=0.5),
        ),
        coverage=1.0,
        tau=0.9,
        tie_events=0,
    )
    assert avg_core_location(g, stats, core) == 0.0

    only_bad = Core(
        elements=(CoreElement(members=frozenset({"scc:x:2"}), weight=1.0),),
        coverage=1.0,
        tau=0.9,
        tie_events=0,
    )
    with pytest.raises(InputError, match="defined location"):
        avg_core_location(g, stats, only_bad)


# --- randomized invariants ------------------------------------------------------------


def test_h_score_invariants_on_random_dags():
    rng = random.Random(33)
    for _ in range(150):
        g = net(oracle.random_dag(rng))
        report = h_score(g, tau=1.0)
        sources = sum(
            1 for c in g.classes.values() if c is VertexClass.SOURCE
        )
        targets = sum(
            1 for c in g.classes.values() if c is VertexClass.TARGET
        )
        assert report.flat_core_size <= min(sources, targets)
        assert report.h_score == h_from_sizes(
            report.core_size, report.flat_core_size
        )
        assert 0.0 <= report.core_vertex_coverage <= 1.0
        assert 0.0 <= report.avg_core_location <= 1.0
        for loc, weight in report.location_samples:
            assert 0.0 <= loc <= 1.0
            assert weight > 0.0


def test_core_sizes_grow_with_tau():
    rng = random.Random(34)
    taus = [0.3, 0.6, 0.9, 1.0]
    for _ in range(50):
        g = net(oracle.random_dag(rng))
        stats = compute_path_stats(g)
        sizes = [greedy_core(g, stats, tau=tau).size for tau in taus]
        flat = flatten(g)
        flat_stats = compute_path_stats(flat)
        flat_sizes = [
            greedy_core(flat, flat_stats, tau=tau).size for tau in taus
        ]
        assert sizes == sorted(sizes)
        assert flat_sizes == sorted(flat_sizes)
