"""Directed dependency graphs: ingestion, condensation, vertex classes.

A dependency network is a DAG obtained by contracting every strongly
connected component of the raw input digraph into a single super-vertex.
Vertices are classified by degree: a source has no inputs, a target has
no outputs, an isolated vertex has neither, everything else is an
intermediate.
"""
from __future__ import annotations

import statistics
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import InputError


class VertexClass(str, Enum):
    SOURCE = "source"
    INTERMEDIATE = "intermediate"
    TARGET = "target"
    ISOLATED = "isolated"


@dataclass(frozen=True)
class RawDigraph:
    """Deduplicated digraph as ingested, before condensation."""

    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]
    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0


@dataclass(eq=False)
class DependencyNetwork:
    """Condensed DAG with super-vertex membership and degree classes.

    Treated as immutable: every operation returns a new network. The
    members map sends each vertex id to the set of original vertex ids
    it stands for (a singleton unless the vertex is a contracted SCC).
    """

    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]
    members: dict[str, frozenset[str]]
    classes: dict[str, VertexClass]

    def inputs(self) -> dict[str, tuple[str, ...]]:
        """Sorted in-neighbour lists, built once and cached."""
        cached = self.__dict__.get("_inputs")
        if cached is None:
            cached = _adjacency(self.vertices, self.edges, reverse=True)
            self.__dict__["_inputs"] = cached
        return cached

    def outputs(self) -> dict[str, tuple[str, ...]]:
        """Sorted out-neighbour lists, built once and cached."""
        cached = self.__dict__.get("_outputs")
        if cached is None:
            cached = _adjacency(self.vertices, self.edges, reverse=False)
            self.__dict__["_outputs"] = cached
        return cached


@dataclass(frozen=True)
class CondensationReport:
    """Summary of the SCC contraction step."""

    super_vertex_count: int
    sizes: tuple[int, ...]
    size_mean: float
    size_std: float


def _adjacency(
    vertices: Iterable[str], edges: Iterable[tuple[str, str]], reverse: bool
) -> dict[str, tuple[str, ...]]:
    out: dict[str, list[str]] = {v: [] for v in vertices}
    for u, v in edges:
        if reverse:
            out[v].append(u)
        else:
            out[u].append(v)
    return {v: tuple(sorted(ns)) for v, ns in out.items()}


def build_raw(edge_pairs: Iterable[tuple[str, str]]) -> RawDigraph:
    """Build a RawDigraph from (tail, head) pairs.

    Duplicate pairs collapse to one edge, self-loops are dropped and
    tallied, and the vertex set is the union of all endpoints (so a
    vertex mentioned only in a self-loop is still declared).
    """
    pairs = list(edge_pairs)
    if not pairs:
        raise InputError("empty graph")
    vertices: set[str] = set()
    edges: set[tuple[str, str]] = set()
    loops = 0
    dups = 0
    for u, v in pairs:
        vertices.add(u)
        vertices.add(v)
        if u == v:
            loops += 1
        elif (u, v) in edges:
            dups += 1
        else:
            edges.add((u, v))
    return RawDigraph(frozenset(vertices), frozenset(edges), loops, dups)


# --- SCC condensation ---


def _tarjan_sccs(
    vertices: list[str], adj: Mapping[str, tuple[str, ...]]
) -> list[list[str]]:
    """Iterative Tarjan; returns SCCs in reverse topological order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            v, child = work.pop()
            if child == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            descended = False
            neighbours = adj[v]
            while child < len(neighbours):
                w = neighbours[child]
                child += 1
                if w not in index:
                    work.append((v, child))
                    work.append((w, 0))
                    descended = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                sccs.append(component)
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
    return sccs


def _compute_classes(
    vertices: Iterable[str], edges: Iterable[tuple[str, str]]
) -> dict[str, VertexClass]:
    indeg: Counter[str] = Counter()
    outdeg: Counter[str] = Counter()
    for u, v in edges:
        outdeg[u] += 1
        indeg[v] += 1
    classes = {}
    for v in vertices:
        has_in = indeg[v] > 0
        has_out = outdeg[v] > 0
        if has_in and has_out:
            classes[v] = VertexClass.INTERMEDIATE
        elif has_out:
            classes[v] = VertexClass.SOURCE
        elif has_in:
            classes[v] = VertexClass.TARGET
        else:
            classes[v] = VertexClass.ISOLATED
    return classes


def _make_network(
    vertices: Iterable[str],
    edges: Iterable[tuple[str, str]],
    members: Mapping[str, frozenset[str]],
) -> DependencyNetwork:
    vs = frozenset(vertices)
    es = frozenset(edges)
    return DependencyNetwork(vs, es, {v: members[v] for v in vs}, _compute_classes(vs, es))


def _super_vertex_name(component: list[str], taken: set[str]) -> str:
    # Shortest member id (ties broken lexicographically) plus member count.
    base = min(component, key=lambda s: (len(s), s))
    name = f"scc:{base}:{len(component)}"
    while name in taken:
        name += "+"
    return name


def condense(raw: RawDigraph) -> tuple[DependencyNetwork, CondensationReport]:
    """Contract every SCC of the raw digraph into one super-vertex.

    Intra-component edges disappear; parallel edges created by the
    contraction collapse to one. Super-vertices are named after their
    shortest member id so reruns are stable.
    """
    order = sorted(raw.vertices)
    adj = _adjacency(order, raw.edges, reverse=False)
    sccs = _tarjan_sccs(order, adj)

    singles = {c[0] for c in sccs if len(c) == 1}
    taken = set(singles)
    rename: dict[str, str] = {}
    sizes: list[int] = []
    members: dict[str, frozenset[str]] = {v: frozenset((v,)) for v in singles}
    for component in sorted((c for c in sccs if len(c) > 1), key=min):
        name = _super_vertex_name(component, taken)
        taken.add(name)
        sizes.append(len(component))
        members[name] = frozenset(component)
        for v in component:
            rename[v] = name

    def cid(v: str) -> str:
        return rename.get(v, v)

    edges = {
        (cid(u), cid(v)) for u, v in raw.edges if cid(u) != cid(v)
    }
    net = _make_network(members.keys(), edges, members)
    report = CondensationReport(
        super_vertex_count=len(sizes),
        sizes=tuple(sorted(sizes, reverse=True)),
        size_mean=statistics.fmean(sizes) if sizes else 0.0,
        size_std=statistics.pstdev(sizes) if sizes else 0.0,
    )
    return net, report


def classify(g: DependencyNetwork) -> dict[str, VertexClass]:
    """Recompute degree-based classes for g (identical to g.classes)."""
    return _compute_classes(g.vertices, g.edges)


def class_counts(g: DependencyNetwork) -> Counter[VertexClass]:
    """Number of vertices in each class."""
    return Counter(g.classes.values())


def largest_wcc(g: DependencyNetwork) -> DependencyNetwork:
    """Induced subgraph on the largest weakly connected component.

    Ties go to the component containing the lexicographically smallest
    vertex id. Isolated vertices form singleton components.
    """
    if not g.vertices:
        raise InputError("empty graph")
    undirected: dict[str, set[str]] = {v: set() for v in g.vertices}
    for u, v in g.edges:
        undirected[u].add(v)
        undirected[v].add(u)
    seen: set[str] = set()
    best: set[str] | None = None
    best_key: tuple[int, str] | None = None
    for start in sorted(g.vertices):
        if start in seen:
            continue
        component = {start}
        queue = deque((start,))
        while queue:
            x = queue.popleft()
            for y in undirected[x]:
                if y not in component:
                    component.add(y)
                    queue.append(y)
        seen |= component
        key = (-len(component), min(component))
        if best_key is None or key < best_key:
            best_key = key
            best = component
    assert best is not None
    edges = {(u, v) for u, v in g.edges if u in best}
    return _make_network(best, edges, g.members)


def exclude_vertices(
    g: DependencyNetwork, names: Iterable[str]
) -> tuple[DependencyNetwork, int]:
    """Drop the named vertices and their incident edges.

    Returns the reduced network and the number of names that were not
    present (ignored with a warning count rather than an error, so that
    user-supplied exclusion lists can be reused across datasets).
    """
    drop = set(names)
    unknown = len(drop - g.vertices)
    keep = g.vertices - drop
    edges = {(u, v) for u, v in g.edges if u in keep and v in keep}
    return _make_network(keep, edges, g.members), unknown
