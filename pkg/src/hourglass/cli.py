"""Command-line surface: analyze, flatten, generate, fit, sweep.

Every subcommand is a thin orchestration layer over the library. All
randomness flows from --seed; reports are byte-identical for equal
inputs, flags and seed. Exit status: 0 success, 1 input problem,
2 internal invariant failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
from io import StringIO
from pathlib import Path
from typing import NoReturn, Sequence

from .centrality import compute_path_stats
from .core import enumerate_cores, greedy_core
from .errors import InputError, InvariantError
from .generative import (
    ConstIndegree,
    EdgeCopyConfig,
    IndegreeLaw,
    PoissonPlusOne,
    RpConfig,
    edge_copy_generate_fitted,
    ensemble_sweep,
    fit_alpha,
    layered_scaffold_from,
    rp_generate,
    rp_generate_fitted,
)
from .graph import DependencyNetwork, condense, exclude_vertices, largest_wcc
from .io import (
    Provenance,
    TOOL_VERSION,
    build_report,
    parse_edgelist,
    parse_reactions,
    write_dot,
    write_edgelist,
    write_metrics_csv,
)
from .metrics import flatten, h_score

SWEEP_CSV_HEADER = (
    "param",
    "value",
    "runs",
    "h_mean",
    "h_ci",
    "core_mean",
    "core_ci",
    "vertex_coverage_mean",
    "vertex_coverage_ci",
    "location_mean",
    "location_ci",
)


class _Parser(argparse.ArgumentParser):
    """argparse with exit status 1 on usage problems, per the contract."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


# --- small helpers -----------------------------------------------------------


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_network(
    path: str, fmt: str
) -> tuple[DependencyNetwork, "object", "object"]:
    text = _read_text(path)
    raw = parse_edgelist(text) if fmt == "edgelist" else parse_reactions(text)
    g, condensation = condense(raw)
    return g, condensation, raw


def _read_names(path: str) -> frozenset[str]:
    names = set()
    for line in _read_text(path).splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            names.add(body)
    return frozenset(names)


def _parse_indegree(spec: str) -> IndegreeLaw:
    kind, _, value = spec.partition(":")
    try:
        if kind == "const":
            return ConstIndegree(int(value))
        if kind == "poisson":
            return PoissonPlusOne(float(value))
    except ValueError:
        pass
    raise InputError(
        f"in-degree law must be 'const:N' or 'poisson:MEAN', got {spec!r}"
    )


def _parse_floats(spec: str, flag: str) -> list[float]:
    try:
        values = [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated numbers, got {spec!r}")
    if not values:
        raise InputError(f"{flag} received no values")
    return values


def _scaffold_from_file(path: str, fmt: str):
    g, _, _ = _load_network(path, fmt)
    return layered_scaffold_from(g)


# --- subcommand handlers -------------------------------------------------------


def _cmd_analyze(args: argparse.Namespace) -> int:
    g, condensation, raw = _load_network(args.file, args.format)
    excluded = 0
    excluded_unknown = 0
    if args.exclude:
        names = _read_names(args.exclude)
        before = len(g.vertices)
        g, excluded_unknown = exclude_vertices(g, names)
        excluded = before - len(g.vertices)
    lwcc = largest_wcc(g)
    lwcc_fraction = len(lwcc.vertices) / len(g.vertices)
    if args.lwcc:
        g = lwcc
    stats = compute_path_stats(g)
    if stats.total == 0:
        raise InputError("no source-target paths")
    core = greedy_core(g, stats, tau=args.tau, tie=args.tie, seed=args.seed)
    hourglass = h_score(
        g, tau=args.tau, tie=args.tie, seed=args.seed, stats=stats, core=core
    )
    cores = None
    truncated = None
    if args.enumerate_cores > 0:
        cores, truncated = enumerate_cores(
            g, stats, tau=args.tau, limit=args.enumerate_cores
        )
    provenance = Provenance(
        input=args.file,
        format=args.format,
        tau=args.tau,
        seed=args.seed,
        tie=args.tie,
        lwcc=args.lwcc,
        exclude=args.exclude,
        tool_version=TOOL_VERSION,
    )
    report = build_report(
        g,
        stats,
        hourglass,
        condensation,
        raw,
        provenance,
        lwcc_fraction,
        cores=cores,
        cores_truncated=truncated,
        excluded=excluded,
        excluded_unknown=excluded_unknown,
    )
    emitted = False
    if args.json:
        _emit(args.json, report.to_json())
        emitted = True
    if args.csv:
        _emit(args.csv, write_metrics_csv(g, stats, core))
        emitted = True
    if args.dot:
        _emit(args.dot, write_dot(g, stats, core))
        emitted = True
    if not emitted:
        sys.stdout.write(_human_summary(report))
    return 0


def _human_summary(report) -> str:
    net = report.network
    core = report.core
    lines = [
        f"vertices           {net.vertices} (raw {net.vertices_raw})",
        f"edges              {net.edges}",
        (
            f"classes            {net.sources} source / "
            f"{net.intermediates} intermediate / {net.targets} target / "
            f"{net.isolated} isolated"
        ),
        f"super-vertices     {net.super_vertex_count}",
        f"st paths           {net.st_path_count}",
        f"avg path length    {net.avg_st_path_length:.3f}",
        (
            f"core (tau={core.tau:g})     size {core.size}, "
            f"coverage {core.coverage:.4f}, tie events {core.tie_events}"
        ),
        f"flat core          {core.flat_core_size}",
        f"h score            {core.h_score:.4f}",
        f"core vertex cover  {core.core_vertex_coverage:.4f}",
        f"avg core location  {core.avg_core_location:.4f}",
    ]
    if core.distinct_cores is not None:
        suffix = " (truncated)" if core.enumeration_truncated else ""
        lines.append(f"distinct cores     {core.distinct_cores}{suffix}")
    for element in core.elements:
        members = " ".join(element.members)
        lines.append(f"  core element     {members} (weight {element.weight:.4f})")
    return "\n".join(lines) + "\n"


def _cmd_flatten(args: argparse.Namespace) -> int:
    g, _, _ = _load_network(args.file, args.format)
    _emit(args.out, write_edgelist(flatten(g)))
    return 0


def _cmd_generate_rp(args: argparse.Namespace) -> int:
    if args.template:
        scaffold = _scaffold_from_file(args.template, args.format)
        net = rp_generate_fitted(scaffold, args.alpha, args.seed)
    else:
        missing = [
            flag
            for flag, value in (
                ("--sources", args.sources),
                ("--intermediates", args.intermediates),
                ("--targets", args.targets),
                ("--indegree", args.indegree),
            )
            if value is None
        ]
        if missing:
            raise InputError(
                "generate rp needs " + ", ".join(missing) + " (or --template)"
            )
        cfg = RpConfig(
            sources=args.sources,
            intermediates=args.intermediates,
            targets=args.targets,
            alpha=args.alpha,
            indegree=_parse_indegree(args.indegree),
            seed=args.seed,
        )
        net = rp_generate(cfg)
    _emit(args.out, write_edgelist(net))
    return 0


def _cmd_generate_edgecopy(args: argparse.Namespace) -> int:
    scaffold = _scaffold_from_file(args.template, args.format)
    net = edge_copy_generate_fitted(scaffold, args.beta, args.seed)
    _emit(args.out, write_edgelist(net))
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    g, _, _ = _load_network(args.file, args.format)
    result = fit_alpha(
        g,
        alpha_min=args.alpha_min,
        alpha_max=args.alpha_max,
        alpha_step=args.alpha_step,
        ensemble=args.ensemble,
        tau=args.tau,
        seed=args.seed,
        workers=args.workers,
    )
    sys.stdout.write(
        f"best alpha {result.alpha:g} (observed h {result.target_h:.4f})\n"
    )
    if args.csv:
        buf = StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("alpha", "h_mean", "h_ci"))
        for row in result.rows:
            writer.writerow((repr(row.alpha), repr(row.h_mean), repr(row.h_ci)))
        _emit(args.csv, buf.getvalue())
    return 0


def _write_sweep_csv(rows) -> str:
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for row in rows:
        writer.writerow(
            (
                row.param,
                repr(row.value),
                row.runs,
                repr(row.h_mean),
                repr(row.h_ci),
                repr(row.core_mean),
                repr(row.core_ci),
                repr(row.vertex_coverage_mean),
                repr(row.vertex_coverage_ci),
                repr(row.location_mean),
                repr(row.location_ci),
            )
        )
    return buf.getvalue()


def _cmd_sweep_rp(args: argparse.Namespace) -> int:
    cfg = RpConfig(
        sources=args.sources,
        intermediates=args.intermediates,
        targets=args.targets,
        alpha=0.0,
        indegree=_parse_indegree(args.indegree),
        seed=args.seed,
    )
    rows = ensemble_sweep(
        cfg,
        _parse_floats(args.alphas, "--alphas"),
        runs=args.runs,
        tau=args.tau,
        workers=args.workers,
    )
    _emit(args.csv, _write_sweep_csv(rows))
    return 0


def _cmd_sweep_edgecopy(args: argparse.Namespace) -> int:
    scaffold = _scaffold_from_file(args.template, args.format)
    cfg = EdgeCopyConfig(beta=0.0, seed=args.seed)
    rows = ensemble_sweep(
        cfg,
        _parse_floats(args.betas, "--betas"),
        runs=args.runs,
        tau=args.tau,
        scaffold=scaffold,
        workers=args.workers,
    )
    _emit(args.csv, _write_sweep_csv(rows))
    return 0


# --- parser wiring -------------------------------------------------------------


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=("edgelist", "reactions"),
        default="edgelist",
        help="input file format (default: edgelist)",
    )


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="hourglass",
        description="Path-centrality core analysis for dependency networks.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {TOOL_VERSION}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full analysis of one network")
    p.add_argument("file")
    _add_format(p)
    p.add_argument("--tau", type=float, default=0.9, help="coverage threshold")
    _add_seed(p)
    p.add_argument("--tie", choices=("det", "seeded"), default="det")
    p.add_argument("--exclude", help="file of vertex names to drop")
    p.add_argument(
        "--lwcc",
        action="store_true",
        help="restrict to the largest weakly connected component",
    )
    p.add_argument(
        "--enumerate-cores",
        type=int,
        default=64,
        metavar="N",
        help="enumerate distinct cores up to N (0 disables)",
    )
    p.add_argument("--json", metavar="PATH", help="write report ('-' stdout)")
    p.add_argument("--csv", metavar="PATH", help="write per-vertex metrics")
    p.add_argument("--dot", metavar="PATH", help="write DOT rendering")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("flatten", help="emit the flat baseline network")
    p.add_argument("file")
    _add_format(p)
    p.add_argument("--out", default="-", metavar="PATH")
    p.set_defaults(func=_cmd_flatten)

    gen = sub.add_parser("generate", help="grow model networks")
    gen_sub = gen.add_subparsers(dest="model", required=True)

    p = gen_sub.add_parser("rp", help="reuse-preference model")
    p.add_argument("--sources", type=int)
    p.add_argument("--intermediates", type=int)
    p.add_argument("--targets", type=int)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--indegree", metavar="LAW", help="const:N or poisson:MEAN")
    p.add_argument("--template", help="rewire this network's scaffold instead")
    _add_format(p)
    _add_seed(p)
    p.add_argument("--out", default="-", metavar="PATH")
    p.set_defaults(func=_cmd_generate_rp)

    p = gen_sub.add_parser("edgecopy", help="edge-copying null model")
    p.add_argument("--template", required=True)
    p.add_argument("--beta", type=float, required=True)
    _add_format(p)
    _add_seed(p)
    p.add_argument("--out", default="-", metavar="PATH")
    p.set_defaults(func=_cmd_generate_edgecopy)

    p = sub.add_parser("fit", help="estimate the reuse exponent of a network")
    p.add_argument("file")
    _add_format(p)
    p.add_argument("--alpha-min", type=float, default=-2.0)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--alpha-step", type=float, default=0.1)
    p.add_argument("--ensemble", type=int, default=100)
    p.add_argument("--tau", type=float, default=0.9)
    _add_seed(p)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", metavar="PATH", help="write the grid ('-' stdout)")
    p.set_defaults(func=_cmd_fit)

    sweep = sub.add_parser("sweep", help="ensemble sweeps over a model parameter")
    sweep_sub = sweep.add_subparsers(dest="model", required=True)

    p = sweep_sub.add_parser("rp", help="sweep alpha for the RP model")
    p.add_argument("--sources", type=int, required=True)
    p.add_argument("--intermediates", type=int, required=True)
    p.add_argument("--targets", type=int, required=True)
    p.add_argument("--indegree", required=True, metavar="LAW")
    p.add_argument("--alphas", required=True, help="comma-separated values")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--tau", type=float, default=0.9)
    _add_seed(p)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", default="-", metavar="PATH")
    p.set_defaults(func=_cmd_sweep_rp)

    p = sweep_sub.add_parser("edgecopy", help="sweep beta on a template scaffold")
    p.add_argument("--template", required=True)
    _add_format(p)
    p.add_argument("--betas", required=True, help="comma-separated values")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--tau", type=float, default=0.9)
    _add_seed(p)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", default="-", metavar="PATH")
    p.set_defaults(func=_cmd_sweep_edgecopy)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
