"""Source/target path counts, path centrality, and the location metric.

Counts are exact arbitrary-precision integers: the number of distinct
source-to-target paths in a dependency network grows combinatorially,
so floats would silently lose the tie structure the core search needs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, InvariantError
from .graph import DependencyNetwork, VertexClass


class Engine:
    """Array-indexed view of a DependencyNetwork for tight DP loops.

    Vertex ids are mapped to dense integer indices (sorted order, so
    index order is also lexicographic order). Source and target roles
    are frozen from the network's degree classes at construction time;
    residual computations after deletions keep the original roles, which
    is what makes residual counts mean "surviving original ST-paths".
    """

    __slots__ = (
        "ids", "index", "in_adj", "out_adj", "is_source", "is_target",
        "order", "source_ix", "target_ix",
    )

    def __init__(self, g: DependencyNetwork) -> None:
        self.ids: list[str] = sorted(g.vertices)
        self.index: dict[str, int] = {v: i for i, v in enumerate(self.ids)}
        n = len(self.ids)
        self.in_adj: list[list[int]] = [[] for _ in range(n)]
        self.out_adj: list[list[int]] = [[] for _ in range(n)]
        ix = self.index
        for u, v in g.edges:
            ui, vi = ix[u], ix[v]
            self.out_adj[ui].append(vi)
            self.in_adj[vi].append(ui)
        for lst in self.in_adj:
            lst.sort()
        for lst in self.out_adj:
            lst.sort()
        classes = g.classes
        self.is_source = [classes[v] is VertexClass.SOURCE for v in self.ids]
        self.is_target = [classes[v] is VertexClass.TARGET for v in self.ids]
        self.source_ix = [i for i in range(n) if self.is_source[i]]
        self.target_ix = [i for i in range(n) if self.is_target[i]]
        self.order = self._topological_order()

    def _topological_order(self) -> list[int]:
        n = len(self.ids)
        remaining = [len(self.in_adj[v]) for v in range(n)]
        ready = [v for v in range(n) if remaining[v] == 0]
        order: list[int] = []
        while ready:
            v = ready.pop()
            order.append(v)
            for w in self.out_adj[v]:
                remaining[w] -= 1
                if remaining[w] == 0:
                    ready.append(w)
        if len(order) != n:
            raise InputError("graph must be acyclic; condense it first")
        return order

    def counts(
        self, removed: set[int] | frozenset[int] | None = None
    ) -> tuple[list[int], list[int], int]:
        """Bottom-up P_S / P_T passes; returns (ps, pt, total paths).

        With `removed`, counts cover exactly the original ST-paths that
        avoid every removed vertex. Entries for removed vertices stay 0.
        """
        n = len(self.ids)
        ps = [0] * n
        pt = [0] * n
        skip = removed or ()
        is_source, is_target = self.is_source, self.is_target
        in_adj, out_adj = self.in_adj, self.out_adj
        for v in self.order:
            if v in skip:
                continue
            if is_source[v]:
                ps[v] = 1
            else:
                acc = 0
                for u in in_adj[v]:
                    acc += ps[u]
                ps[v] = acc
        for v in reversed(self.order):
            if v in skip:
                continue
            if is_target[v]:
                pt[v] = 1
            else:
                acc = 0
                for u in out_adj[v]:
                    acc += pt[u]
                pt[v] = acc
        total = sum(ps[t] for t in self.target_ix if t not in skip)
        check = sum(pt[s] for s in self.source_ix if s not in skip)
        if total != check:
            raise InvariantError(
                f"path conservation violated: {total} via targets, {check} via sources"
            )
        return ps, pt, total


@dataclass(eq=False)
class PathStats:
    """Per-vertex path statistics for one network."""

    ps: dict[str, int]
    pt: dict[str, int]
    p: dict[str, int]
    location: dict[str, float | None]
    total: int
    engine: Engine = field(repr=False)

    @property
    def has_st_paths(self) -> bool:
        return self.total > 0


def location_of(ps: int, pt: int, cls: VertexClass) -> float | None:
    """Normalized position between sources (0) and targets (1).

    Sources and targets are pinned to the endpoints. An intermediate on
    a single through-path (ps == pt == 1) sits at 0.5; the ratio is 0/0
    there but the vertex is exactly midway by symmetry. A vertex on no
    ST-path has no location.
    """
    if ps * pt == 0:
        return None
    if cls is VertexClass.SOURCE:
        return 0.0
    if cls is VertexClass.TARGET:
        return 1.0
    denom = (ps - 1) + (pt - 1)
    if denom == 0:
        return 0.5
    return (ps - 1) / denom


def compute_path_stats(g: DependencyNetwork) -> PathStats:
    """Exact path counts and locations for every vertex of a DAG.

    Isolated vertices carry zero counts and an undefined location; they
    sit on no ST-path by definition.
    """
    eng = Engine(g)
    ps_arr, pt_arr, total = eng.counts()
    ps = {}
    pt = {}
    p = {}
    loc: dict[str, float | None] = {}
    for i, v in enumerate(eng.ids):
        ps[v] = ps_arr[i]
        pt[v] = pt_arr[i]
        p[v] = ps_arr[i] * pt_arr[i]
        loc[v] = location_of(ps_arr[i], pt_arr[i], g.classes[v])
    return PathStats(ps=ps, pt=pt, p=p, location=loc, total=total, engine=eng)


def avg_st_path_length(g: DependencyNetwork, stats: PathStats) -> float:
    """Mean ST-path length in edges.

    Every ST-path of length L is counted once by each of its L edges,
    so summing ps(tail) * pt(head) over edges and dividing by the path
    count gives the exact mean.
    """
    if stats.total == 0:
        raise InputError("no source-target paths")
    eng = stats.engine
    ps = stats.ps
    pt = stats.pt
    hops = 0
    for u, v in g.edges:
        hops += ps[u] * pt[v]
    return float(Fraction(hops, stats.total))
