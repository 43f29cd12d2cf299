"""Text formats and the analysis report.

Input side: whitespace edge lists ("u v" means v depends on u) and
reaction lists ("A + B -> C"). Output side: a metrics CSV with one row
per vertex, a DOT rendering with vertices ranked by location bin, and a
key-sorted JSON report that is byte-identical across runs for equal
inputs, flags and seed.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from io import StringIO
from typing import Sequence

from .centrality import PathStats, avg_st_path_length
from .core import Core, jaccard_core_similarity
from .errors import InputError
from .graph import (
    CondensationReport,
    DependencyNetwork,
    RawDigraph,
    VertexClass,
    build_raw,
)
from .metrics import HourglassReport

TOOL_VERSION = "0.1.0"

CSV_HEADER = (
    "vertex",
    "class",
    "ps",
    "pt",
    "p",
    "p_frac",
    "location",
    "in_core",
    "core_weight",
)


# --- parsers ----------------------------------------------------------------


def parse_edgelist(text: str) -> RawDigraph:
    """Parse "u v" lines into a raw digraph.

    '#' starts a comment; blank lines are skipped; anything else must be
    exactly two whitespace-separated tokens.
    """
    pairs: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.split()
        if len(tokens) != 2:
            raise InputError(
                f"line {lineno}: expected 'u v', got {line.strip()!r}"
            )
        pairs.append((tokens[0], tokens[1]))
    return build_raw(pairs)


def parse_reactions(text: str) -> RawDigraph:
    """Parse reaction lines like "A + B -> C + D".

    Every substrate gains an edge to every product. Reversible reactions
    must be written as two lines; the arrow's direction is the only one
    used. Names are trimmed; duplicates collapse at ingestion.
    """
    pairs: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.strip()
        if not body:
            continue
        if "->" not in body:
            raise InputError(f"line {lineno}: missing '->' in {body!r}")
        left, _, right = body.partition("->")
        if "->" in right:
            raise InputError(f"line {lineno}: more than one '->' in {body!r}")
        substrates = [name.strip() for name in left.split("+")]
        products = [name.strip() for name in right.split("+")]
        if any(not name for name in substrates):
            raise InputError(f"line {lineno}: empty substrate name")
        if any(not name for name in products):
            raise InputError(f"line {lineno}: empty product name")
        for s in substrates:
            for p in products:
                pairs.append((s, p))
    return build_raw(pairs)


def write_edgelist(g: DependencyNetwork) -> str:
    """One sorted "u v" line per edge. Isolated vertices do not appear."""
    lines = [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + ("\n" if lines else "")


# --- metrics CSV ------------------------------------------------------------


def write_metrics_csv(
    g: DependencyNetwork, stats: PathStats, core: Core
) -> str:
    """One row per vertex with counts, location and core membership.

    Path counts are emitted as decimal strings so arbitrarily large
    values survive spreadsheet-hostile tooling; an undefined location is
    an empty field, as is the core weight of a non-member.
    """
    if stats.total <= 0:
        raise InputError("no source-target paths")
    weight_of: dict[str, float] = {}
    for element in core.elements:
        for member in element.members:
            weight_of[member] = element.weight
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for v in sorted(g.vertices):
        location = stats.location[v]
        p_frac = float(Fraction(stats.p[v], stats.total))
        writer.writerow(
            (
                v,
                g.classes[v].value,
                str(stats.ps[v]),
                str(stats.pt[v]),
                str(stats.p[v]),
                repr(p_frac),
                "" if location is None else repr(location),
                "true" if v in weight_of else "false",
                repr(weight_of[v]) if v in weight_of else "",
            )
        )
    return buf.getvalue()


# --- DOT rendering ----------------------------------------------------------


def _log1p_big(n: int) -> float:
    """log(1 + n) that survives integers far beyond float range."""
    if n < 0:
        raise ValueError(f"negative count {n}")
    m = n + 1
    if m.bit_length() <= 52:
        return math.log(m)
    shift = m.bit_length() - 53
    return math.log(m >> shift) + shift * math.log(2.0)


def _dot_quote(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _location_bin(
    cls: VertexClass, location: float | None, bins: int
) -> int | None:
    if cls is VertexClass.SOURCE:
        return 0
    if cls is VertexClass.TARGET:
        return bins + 1
    if location is None:
        return None
    return max(1, math.ceil(location * bins))


def write_dot(
    g: DependencyNetwork, stats: PathStats, core: Core, bins: int = 12
) -> str:
    """Render the network with vertices ranked by location bin.

    Sources occupy bin 0 and targets the top bin; intermediates fall
    into `bins` interior bins over (0, 1]. Fill darkness grows with
    log(1 + P(v)), core members get a heavy colored outline, and
    vertices on no ST-path are dotted and left out of the rank groups.
    """
    if bins < 1:
        raise InputError(f"need at least one interior bin, got {bins}")
    core_members = core.member_union()
    p_max = max(stats.p.values(), default=0)
    log_max = _log1p_big(p_max) if p_max > 0 else 0.0

    by_bin: dict[int, list[str]] = {}
    lines = [
        "digraph {",
        "  rankdir=BT;",
        '  node [shape=ellipse, style=filled, fontcolor=black];',
    ]
    for v in sorted(g.vertices):
        cls = g.classes[v]
        bin_index = _location_bin(cls, stats.location[v], bins)
        if bin_index is not None:
            by_bin.setdefault(bin_index, []).append(v)
        if log_max > 0.0:
            darkness = _log1p_big(stats.p[v]) / log_max
        else:
            darkness = 0.0
        # gray95 (faint) down to gray35 (dark); text stays readable.
        gray = 95 - round(60 * darkness)
        attrs = [f'fillcolor="gray{gray}"']
        if v in core_members:
            attrs.append('color="firebrick"')
            attrs.append("penwidth=3")
        if stats.location[v] is None:
            attrs.append('style="filled,dotted"')
        lines.append(f"  {_dot_quote(v)} [{', '.join(attrs)}];")
    for u, v in sorted(g.edges):
        lines.append(f"  {_dot_quote(u)} -> {_dot_quote(v)};")
    for bin_index in sorted(by_bin):
        names = " ".join(f"{_dot_quote(v)};" for v in by_bin[bin_index])
        lines.append(f"  {{ rank=same; {names} }}  // bin {bin_index}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- analysis report ---------------------------------------------------------


@dataclass(frozen=True)
class NetworkSummary:
    vertices_raw: int
    edges_raw: int
    self_loops_dropped: int
    duplicate_edges_dropped: int
    excluded: int
    excluded_unknown: int
    vertices: int
    edges: int
    lwcc_fraction: float
    avg_degree: float
    sources: int
    intermediates: int
    targets: int
    isolated: int
    source_fraction: float
    intermediate_fraction: float
    target_fraction: float
    isolated_fraction: float
    super_vertex_count: int
    super_vertex_size_mean: float
    super_vertex_size_std: float
    st_path_count: int
    avg_st_path_length: float


@dataclass(frozen=True)
class CoreElementReport:
    members: tuple[str, ...]
    weight: float
    p_frac: float


@dataclass(frozen=True)
class CoreSummary:
    tau: float
    size: int
    fraction: float
    coverage: float
    tie_events: int
    flat_core_size: int
    h_score: float
    core_vertex_coverage: float
    avg_core_location: float
    scc_elements_in_core: int
    pes_elements: int
    distinct_cores: int | None
    enumeration_truncated: bool | None
    jaccard_mean: float | None
    elements: tuple[CoreElementReport, ...]


@dataclass(frozen=True)
class Provenance:
    input: str
    format: str
    tau: float
    seed: int
    tie: str
    lwcc: bool
    exclude: str | None
    tool_version: str


@dataclass(frozen=True)
class AnalysisReport:
    network: NetworkSummary
    core: CoreSummary
    provenance: Provenance

    def to_json(self) -> str:
        doc = asdict(self)
        doc["network"]["st_path_count"] = str(self.network.st_path_count)
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        try:
            doc = json.loads(text)
            network = dict(doc["network"])
            network["st_path_count"] = int(network["st_path_count"])
            core = dict(doc["core"])
            core["elements"] = tuple(
                CoreElementReport(
                    members=tuple(e["members"]),
                    weight=e["weight"],
                    p_frac=e["p_frac"],
                )
                for e in core["elements"]
            )
            return cls(
                network=NetworkSummary(**network),
                core=CoreSummary(**core),
                provenance=Provenance(**doc["provenance"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed report: {exc}") from exc


def build_report(
    g: DependencyNetwork,
    stats: PathStats,
    hourglass: HourglassReport,
    condensation: CondensationReport,
    raw: RawDigraph,
    provenance: Provenance,
    lwcc_fraction: float,
    cores: Sequence[Core] | None = None,
    cores_truncated: bool | None = None,
    excluded: int = 0,
    excluded_unknown: int = 0,
) -> AnalysisReport:
    """Assemble the full report for one analyzed network."""
    counts = {cls: 0 for cls in VertexClass}
    for cls in g.classes.values():
        counts[cls] += 1
    n = len(g.vertices)
    core = hourglass.core
    elements = []
    for element in core.elements:
        representative = min(element.members)
        elements.append(
            CoreElementReport(
                members=tuple(sorted(element.members)),
                weight=element.weight,
                p_frac=float(Fraction(stats.p[representative], stats.total)),
            )
        )
    member_union = core.member_union()
    network = NetworkSummary(
        vertices_raw=len(raw.vertices),
        edges_raw=len(raw.edges),
        self_loops_dropped=raw.self_loops_dropped,
        duplicate_edges_dropped=raw.duplicate_edges_dropped,
        excluded=excluded,
        excluded_unknown=excluded_unknown,
        vertices=n,
        edges=len(g.edges),
        lwcc_fraction=lwcc_fraction,
        avg_degree=len(g.edges) / n,
        sources=counts[VertexClass.SOURCE],
        intermediates=counts[VertexClass.INTERMEDIATE],
        targets=counts[VertexClass.TARGET],
        isolated=counts[VertexClass.ISOLATED],
        source_fraction=counts[VertexClass.SOURCE] / n,
        intermediate_fraction=counts[VertexClass.INTERMEDIATE] / n,
        target_fraction=counts[VertexClass.TARGET] / n,
        isolated_fraction=counts[VertexClass.ISOLATED] / n,
        super_vertex_count=condensation.super_vertex_count,
        super_vertex_size_mean=condensation.size_mean,
        super_vertex_size_std=condensation.size_std,
        st_path_count=stats.total,
        avg_st_path_length=avg_st_path_length(g, stats),
    )
    jaccard = None
    if cores is not None and len(cores) >= 2:
        jaccard = jaccard_core_similarity(cores)
    core_summary = CoreSummary(
        tau=core.tau,
        size=core.size,
        fraction=core.size / n,
        coverage=core.coverage,
        tie_events=core.tie_events,
        flat_core_size=hourglass.flat_core_size,
        h_score=hourglass.h_score,
        core_vertex_coverage=hourglass.core_vertex_coverage,
        avg_core_location=hourglass.avg_core_location,
        scc_elements_in_core=sum(
            1 for v in member_union if len(g.members[v]) > 1
        ),
        pes_elements=sum(1 for el in core.elements if len(el.members) > 1),
        distinct_cores=len(cores) if cores is not None else None,
        enumeration_truncated=cores_truncated,
        jaccard_mean=jaccard,
        elements=tuple(elements),
    )
    return AnalysisReport(network=network, core=core_summary, provenance=provenance)
