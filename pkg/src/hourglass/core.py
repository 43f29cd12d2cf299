"""Core identification: greedy path-coverage search with tie handling.

The core of a network is a small vertex set covering at least a fraction
tau of all source-to-target paths. Selection is greedy by residual path
centrality, which carries the classic (1 - 1/e) guarantee because path
coverage is monotone and submodular. Ties are detected by exact integer
comparison, grouped into path-equivalent sets (vertices traversed by
exactly the same residual paths), and broken by policy.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .centrality import Engine, PathStats
from .errors import InputError, InvariantError
from .graph import DependencyNetwork, VertexClass

#: Greedy coverage after k picks is at least this fraction of the best
#: achievable with k vertices.
APPROXIMATION_FACTOR = 1.0 - 1.0 / 2.718281828459045

_TIE_POLICIES = ("det", "seeded")

# Defensive bound on tie-branch exploration in enumerate_cores.
_MAX_EXPLORED_NODES = 10_000


@dataclass(frozen=True)
class CoreElement:
    """One core entry: a single vertex or a whole path-equivalent set."""

    members: frozenset[str]
    weight: float

    @property
    def kind(self) -> str:
        return "pes" if len(self.members) > 1 else "single"


@dataclass
class Core:
    """Result of a core search, in selection order."""

    elements: tuple[CoreElement, ...]
    coverage: float
    tau: float
    tie_events: int

    @property
    def size(self) -> int:
        return len(self.elements)

    def member_union(self) -> frozenset[str]:
        out: set[str] = set()
        for el in self.elements:
            out |= el.members
        return frozenset(out)


# --- coverage -----------------------------------------------------------


def _vertex_indices(stats: PathStats, names: Iterable[str]) -> set[int]:
    ix = stats.engine.index
    out = set()
    for name in names:
        if name not in ix:
            raise InputError(f"unknown vertex {name!r}")
        out.add(ix[name])
    return out

def covered_paths(g: DependencyNetwork, stats: PathStats, removed: Iterable[str]) -> int:
    """Exact number of ST-paths traversing at least one removed vertex.

    Computed by difference: total paths minus paths surviving the
    deletion. No path enumeration takes place.
    """
    skip = _vertex_indices(stats, removed)
    if not skip:
        return 0
    _, _, residual = stats.engine.counts(skip)
    return stats.total - residual


def coverage(g: DependencyNetwork, stats: PathStats, removed: Iterable[str]) -> float:
    """Fraction of all ST-paths covered by the removed set."""
    if stats.total == 0:
        raise InputError("no source-target paths")
    return float(Fraction(covered_paths(g, stats, removed), stats.total))


# --- path-equivalent sets ------------------------------------------------


def _scratch_counts(
    eng: Engine, active: list[int], skip: int
) -> tuple[list[int], list[int]]:
    """DP over `active` minus one probe vertex, on fresh arrays."""
    n = len(eng.ids)
    ps = [0] * n
    pt = [0] * n
    is_source, is_target = eng.is_source, eng.is_target
    in_adj, out_adj = eng.in_adj, eng.out_adj
    for v in active:
        if v == skip:
            continue
        if is_source[v]:
            ps[v] = 1
        else:
            acc = 0
            for u in in_adj[v]:
                acc += ps[u]
            ps[v] = acc
    for v in reversed(active):
        if v == skip:
            continue
        if is_target[v]:
            pt[v] = 1
        else:
            acc = 0
            for u in out_adj[v]:
                acc += pt[u]
            pt[v] = acc
    return ps, pt


def _zeroed_by_probe(eng: Engine, active: list[int], probe: int, check: Sequence[int]) -> list[int]:
    """Which of `check` lose all their residual paths when probe is deleted."""
    ps, pt = _scratch_counts(eng, active, probe)
    return [w for w in check if w != probe and ps[w] * pt[w] == 0]


def _pes_partition(eng: Engine, active: list[int], tied: list[int]) -> list[list[int]]:
    """Partition a tied set into path-equivalent groups.

    Repeatedly take the smallest remaining vertex, delete it, and sweep
    the others whose residual centrality drops to zero into its group.
    Because the tied vertices share one exact path count, dropping to
    zero is equivalent to having had the identical path set.
    """
    groups: list[list[int]] = []
    rest = sorted(tied)
    while rest:
        u = rest[0]
        zeroed = set(_zeroed_by_probe(eng, active, u, rest[1:]))
        groups.append([u] + [w for w in rest[1:] if w in zeroed])
        rest = [w for w in rest[1:] if w not in zeroed]
    return groups


def identify_pes(
    g: DependencyNetwork, stats: PathStats, tied: Iterable[str]
) -> list[frozenset[str]]:
    """Group equally central vertices into path-equivalent sets.

    All supplied vertices must carry the same positive path centrality;
    the result is a partition ordered by smallest member id.
    """
    idx = sorted(_vertex_indices(stats, tied))
    if not idx:
        raise InputError("empty tied set")
    eng = stats.engine
    cents = {stats.p[eng.ids[i]] for i in idx}
    if len(cents) != 1:
        raise InputError("tied vertices must share one path centrality")
    if cents == {0}:
        raise InputError("tied vertices lie on no ST-path")
    active = [v for v in eng.order if stats.p[eng.ids[v]] > 0]
    groups = _pes_partition(eng, active, idx)
    return [frozenset(eng.ids[i] for i in grp) for grp in groups]


# --- greedy core search ---------------------------------------------------


def _check_search_args(stats: PathStats, tau: float, tie: str) -> None:
    if not 0.0 < tau <= 1.0:
        raise InputError(f"tau must be in (0, 1], got {tau}")
    if tie not in _TIE_POLICIES:
        raise InputError(f"tie policy must be one of {_TIE_POLICIES}, got {tie!r}")
    if stats.total == 0:
        raise InputError("no source-target paths")


def _is_flat(g: DependencyNetwork) -> bool:
    classes = g.classes
    return all(
        classes[u] is VertexClass.SOURCE and classes[v] is VertexClass.TARGET
        for u, v in g.edges
    )


def _greedy_generic(
    eng: Engine,
    total: int,
    tau: float,
    tie: str,
    rng: random.Random | None,
    pes_grouping: bool,
) -> tuple[list[tuple[list[int], int]], int, int]:
    """Greedy loop on the full DP. Returns (picks, covered, tie_events).

    Each iteration recomputes counts over the surviving positive-
    centrality vertices only. Entries of deleted or exhausted vertices
    are pinned at zero, which keeps the restricted DP exact: a pruned
    in-neighbour of a live vertex necessarily contributes zero paths.
    """
    n = len(eng.ids)
    ps = [0] * n
    pt = [0] * n
    is_source, is_target = eng.is_source, eng.is_target
    in_adj, out_adj = eng.in_adj, eng.out_adj
    active = list(eng.order)
    picks: list[tuple[list[int], int]] = []
    tie_events = 0

    while True:
        for v in active:
            if is_source[v]:
                ps[v] = 1
            else:
                acc = 0
                for u in in_adj[v]:
                    acc += ps[u]
                ps[v] = acc
        for v in reversed(active):
            if is_target[v]:
                pt[v] = 1
            else:
                acc = 0
                for u in out_adj[v]:
                    acc += pt[u]
                pt[v] = acc
        residual = 0
        for v in active:
            if is_target[v]:
                residual += ps[v]
        covered = total - residual
        if residual == 0 or float(Fraction(covered, total)) >= tau:
            return picks, covered, tie_events

        survivors = []
        best = 0
        for v in active:
            c = ps[v] * pt[v]
            if c > 0:
                survivors.append(v)
                if c > best:
                    best = c
            else:
                ps[v] = 0
                pt[v] = 0
        active = survivors
        if best == 0:
            raise InvariantError("positive residual paths but no central vertex")
        tied = [v for v in active if ps[v] * pt[v] == best]

        if len(tied) == 1:
            members = tied
            multi = False
        elif not pes_grouping:
            members = [min(tied)] if rng is None else [tied[rng.randrange(len(tied))]]
            multi = True
        elif rng is None:
            # Deterministic policy: the winning group is the one holding
            # the smallest tied id, so a single probe suffices. `tied`
            # follows engine order, so the smallest id is min, not [0].
            u = min(tied)
            members = [u] + _zeroed_by_probe(eng, active, u, tied)
            multi = len(members) < len(tied)
        else:
            groups = _pes_partition(eng, active, tied)
            multi = len(groups) > 1
            members = groups[rng.randrange(len(groups))]
        if multi:
            tie_events += 1

        picks.append((members, best))
        gone = set(members)
        for v in members:
            ps[v] = 0
            pt[v] = 0
        active = [v for v in active if v not in gone]


def _greedy_flat(
    eng: Engine,
    total: int,
    tau: float,
    tie: str,
    rng: random.Random | None,
    pes_grouping: bool,
) -> tuple[list[tuple[list[int], int]], int, int]:
    """Greedy loop specialised to flat (source-to-target only) networks.

    Every ST-path is a single edge there, so residual centrality is the
    residual degree and the DP collapses to degree bookkeeping. Element
    choice, weights and tie accounting replicate the generic loop
    exactly; path-equivalent groups can only be mutual degree-one pairs.
    """
    n = len(eng.ids)
    adj: list[set[int]] = [set(eng.out_adj[v]) | set(eng.in_adj[v]) for v in range(n)]
    deg = [len(adj[v]) for v in range(n)]
    residual = total
    picks: list[tuple[list[int], int]] = []
    tie_events = 0

    while True:
        covered = total - residual
        if residual == 0 or float(Fraction(covered, total)) >= tau:
            return picks, covered, tie_events
        best = max(deg)
        tied = [v for v in range(n) if deg[v] == best]

        if len(tied) == 1:
            members = tied
            multi = False
        elif not pes_grouping:
            members = [tied[0]] if rng is None else [tied[rng.randrange(len(tied))]]
            multi = True
        elif best > 1:
            # Degree >= 2 vertices cannot share their whole edge set.
            if rng is None:
                members = [tied[0]]
            else:
                members = [tied[rng.randrange(len(tied))]]
            multi = True
        else:
            # All positive-degree vertices are matched in disjoint pairs.
            if rng is None:
                u = tied[0]
                members = [u, next(iter(adj[u]))]
                multi = len(tied) > 2
            else:
                groups = []
                seen: set[int] = set()
                for v in tied:
                    if v in seen:
                        continue
                    partner = next(iter(adj[v]))
                    seen.add(v)
                    seen.add(partner)
                    groups.append([v, partner])
                multi = len(groups) > 1
                members = groups[rng.randrange(len(groups))]
        if multi:
            tie_events += 1

        picks.append((sorted(members), best))
        for v in members:
            for w in adj[v]:
                adj[w].discard(v)
                deg[w] -= 1
            residual -= len(adj[v])
            adj[v] = set()
            deg[v] = 0


def greedy_core(
    g: DependencyNetwork,
    stats: PathStats,
    tau: float = 0.9,
    tie: str = "det",
    seed: int = 0,
    pes_grouping: bool = True,
    _force_generic: bool = False,
) -> Core:
    """Find a path-coverage core greedily.

    Repeatedly selects the element with maximum residual path
    centrality until the covered fraction reaches tau (or all paths are
    covered, which handles tau = 1). Exactly tied vertices are grouped
    into path-equivalent sets when pes_grouping is on; cross-group ties
    go to the lexicographically smallest member ("det") or to a group
    drawn uniformly from the seeded stream ("seeded").
    """
    _check_search_args(stats, tau, tie)
    eng = stats.engine
    rng = random.Random(seed) if tie == "seeded" else None
    runner = _greedy_flat if _is_flat(g) and not _force_generic else _greedy_generic
    picks, covered, tie_events = runner(eng, stats.total, tau, tie, rng, pes_grouping)
    ids = eng.ids
    elements = tuple(
        CoreElement(
            members=frozenset(ids[i] for i in members),
            weight=float(Fraction(gain, stats.total)),
        )
        for members, gain in picks
    )
    return Core(
        elements=elements,
        coverage=float(Fraction(covered, stats.total)),
        tau=tau,
        tie_events=tie_events,
    )


def enumerate_cores(
    g: DependencyNetwork,
    stats: PathStats,
    tau: float = 0.9,
    limit: int = 64,
) -> tuple[list[Core], bool]:
    """Explore every cross-group tie branch of the greedy search.

    Returns the distinct cores found (deduplicated by their element
    member-sets, ignoring selection order) and a flag saying whether
    exploration was cut off by `limit`.
    """
    _check_search_args(stats, tau, "det")
    if limit < 1:
        raise InputError(f"limit must be at least 1, got {limit}")
    eng = stats.engine
    total = stats.total
    results: list[Core] = []
    families: set[frozenset[frozenset[str]]] = set()
    truncated = False
    nodes_explored = 0

    def explore(
        removed: frozenset[int],
        picked: tuple[tuple[tuple[int, ...], int], ...],
        tie_events: int,
    ) -> None:
        nonlocal truncated, nodes_explored
        if len(results) >= limit:
            truncated = True
            return
        nodes_explored += 1
        if nodes_explored > _MAX_EXPLORED_NODES:
            truncated = True
            return
        ps, pt, residual = eng.counts(removed)
        covered = total - residual
        if residual == 0 or float(Fraction(covered, total)) >= tau:
            elements = tuple(
                CoreElement(
                    members=frozenset(eng.ids[i] for i in members),
                    weight=float(Fraction(gain, total)),
                )
                for members, gain in picked
            )
            family = frozenset(el.members for el in elements)
            if family not in families:
                families.add(family)
                results.append(
                    Core(
                        elements=elements,
                        coverage=float(Fraction(covered, total)),
                        tau=tau,
                        tie_events=tie_events,
                    )
                )
            return
        active = [v for v in eng.order if v not in removed and ps[v] * pt[v] > 0]
        best = 0
        for v in active:
            c = ps[v] * pt[v]
            if c > best:
                best = c
        tied = [v for v in active if ps[v] * pt[v] == best]
        groups = _pes_partition(eng, active, tied)
        bump = 1 if len(groups) > 1 else 0
        for grp in groups:
            explore(
                removed | frozenset(grp),
                picked + ((tuple(grp), best),),
                tie_events + bump,
            )
            if len(results) >= limit and grp is not groups[-1]:
                truncated = True
                break

    explore(frozenset(), (), 0)
    results.sort(key=lambda c: sorted(sorted(el.members) for el in c.elements))
    return results, truncated


def brute_force_core(
    g: DependencyNetwork, stats: PathStats, k: int
) -> tuple[float, frozenset[str]]:
    """Best coverage achievable with exactly k vertices, by exhaustion.

    Restricted to small instances; this is the oracle the greedy bound
    is checked against, not a production search.
    """
    n = len(g.vertices)
    if n > 20:
        raise InputError("oracle restricted to small instances (at most 20 vertices)")
    if k < 0 or k > n:
        raise InputError(f"k must be between 0 and {n}, got {k}")
    if stats.total == 0:
        raise InputError("no source-target paths")
    if k == 0:
        return 0.0, frozenset()
    eng = stats.engine
    names = eng.ids
    best_count = -1
    best_set: tuple[int, ...] = ()
    for combo in combinations(range(len(names)), k):
        _, _, residual = eng.counts(set(combo))
        count = stats.total - residual
        if count > best_count:
            best_count = count
            best_set = combo
    return (
        float(Fraction(best_count, stats.total)),
        frozenset(names[i] for i in best_set),
    )


def jaccard_core_similarity(cores: Sequence[Core]) -> float:
    """Mean pairwise Jaccard similarity of core member sets."""
    if len(cores) < 2:
        raise InputError("need at least two cores to compare")
    sets = [core.member_union() for core in cores]
    sims = []
    for a, b in combinations(sets, 2):
        union = a | b
        sims.append(len(a & b) / len(union) if union else 1.0)
    return sum(sims) / len(sims)
