"""Command-line surface: translate queries, execute either engine, and run
the cross-engine equivalence verification.

Exit codes: 0 success, 1 I/O problems, 2 parse or unsupported-feature
errors, 3 runtime type errors, 4 verification found non-equivalent
queries.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass, replace

from .ast import SparqlAst
from .emit import emit_bytecode, emit_groovy
from .engine import execute
from .errors import (ClassificationError, EvalTypeError, GraphLoadError,
                     ParseError, S2gError, ScopeError, UnsupportedFeatureError)
from .graphs import (PrefixRegistry, RdfGraph, load_ntriples, load_pg,
                     rdf_to_pg)
from .parser import parse
from .refeval import normalize, ref_evaluate
from .translate import translate

PREFIX_CONFIG_ENV = "S2G_PREFIX_CONFIG"

_FEATURES = [("Gc", "GROUP COUNT"), ("Op", "OPTIONAL"), ("C", "CGP"),
             ("F", "CONDITION"), ("L", "RESTRICTION"), ("G", "GROUP BY"),
             ("O", "ORDER BY"), ("U", "UNION"), ("M", "MIXED"), ("S", "STAR")]


def feature_of(query_id: str) -> str:
    stem = re.match(r"[A-Za-z]+", query_id)
    prefix = stem.group(0) if stem else ""
    for tag, feature in _FEATURES:
        if prefix == tag:
            return feature
    return "UNKNOWN"


@dataclass
class RunReport:
    query_id: str
    feature: str
    translate_us: int
    rdf_rows: int
    pg_rows: int
    equivalent: bool
    note: str = ""


def load_registry() -> PrefixRegistry:
    path = os.environ.get(PREFIX_CONFIG_ENV)
    if not path:
        return PrefixRegistry()
    fields: dict[str, object] = {}
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "edge_property_keys":
                fields[key] = frozenset(
                    k.strip() for k in value.split(",") if k.strip())
            elif key in ("vertex_prefix", "edge_prefix",
                         "vertex_label_key", "edge_label_key"):
                fields[key] = value
            else:
                raise GraphLoadError(f"unknown registry key {key!r} in {path}")
    return PrefixRegistry(**fields)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as handle:
        return handle.read()


_PARSE_ERRORS = (ParseError, UnsupportedFeatureError, ScopeError,
                 ClassificationError, GraphLoadError)


def cmd_translate(args) -> int:
    try:
        text = _read(args.query)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        ir = translate(parse(text), load_registry())
    except _PARSE_ERRORS as exc:
        print(exc.diagnostic(args.query), file=sys.stderr)
        return 2
    if args.format == "bytecode":
        sys.stdout.write(emit_bytecode(ir))
    else:
        print(emit_groovy(ir))
    return 0


def cmd_exec(args) -> int:
    try:
        query_text = _read(args.query)
        graph_text = _read(args.graph)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        registry = load_registry()
        ast = parse(query_text)
    except _PARSE_ERRORS as exc:
        print(exc.diagnostic(args.query), file=sys.stderr)
        return 2
    try:
        if args.graph.endswith(".nt"):
            graph = load_ntriples(graph_text)
        elif args.graph.endswith(".pgl"):
            graph = load_pg(graph_text)
        else:
            print(f"error: {args.graph}: expected a .nt or .pgl graph file",
                  file=sys.stderr)
            return 1
    except _PARSE_ERRORS as exc:
        print(exc.diagnostic(args.graph), file=sys.stderr)
        return 2
    try:
        if isinstance(graph, RdfGraph):
            result = ref_evaluate(ast, graph)
        else:
            result = execute(translate(ast, registry), graph)
    except EvalTypeError as exc:
        print(exc.diagnostic(args.query), file=sys.stderr)
        return 3
    except _PARSE_ERRORS as exc:
        print(exc.diagnostic(args.query), file=sys.stderr)
        return 2
    sys.stdout.write(result.to_tsv())
    return 0


def _strip_limit(ast: SparqlAst) -> SparqlAst:
    return replace(ast, limit=None, offset=None)


def verify_query(ast: SparqlAst, rdf, pg, registry: PrefixRegistry,
                 order_insensitive: bool) -> tuple[bool, int, int, int]:
    """Run both engines and compare; returns (equivalent, us, rdf_rows, pg_rows)."""
    started = time.perf_counter()
    ir = translate(ast, registry)
    translate_us = int((time.perf_counter() - started) * 1_000_000)
    rdf_rows = normalize(ref_evaluate(ast, rdf), registry)
    pg_rows = normalize(execute(ir, pg), registry)
    if len(rdf_rows.columns) != len(pg_rows.columns):
        return False, translate_us, len(rdf_rows), len(pg_rows)
    if order_insensitive:
        # limit-without-order: engines legitimately pick different row
        # subsets, so compare the unlimited bags plus the limited sizes
        bare = _strip_limit(ast)
        full_rdf = normalize(ref_evaluate(bare, rdf), registry)
        full_pg = normalize(execute(translate(bare, registry), pg), registry)
        ok = (full_rdf.counter() == full_pg.counter()
              and len(rdf_rows) == len(pg_rows))
    elif ast.order_by:
        ok = rdf_rows.rows == pg_rows.rows
    else:
        ok = rdf_rows.counter() == pg_rows.counter()
    return ok, translate_us, len(rdf_rows), len(pg_rows)


def run_verify(corpus_dir: str, rdf_path: str,
               registry: PrefixRegistry | None = None) -> tuple[list[RunReport], int]:
    registry = registry or PrefixRegistry()
    try:
        names = sorted(n for n in os.listdir(corpus_dir) if n.endswith(".rq"))
    except OSError as exc:
        raise GraphLoadError(f"cannot list corpus dir: {exc}")
    manifest_path = os.path.join(corpus_dir, "manifest.json")
    order_insensitive: set[str] = set()
    if os.path.exists(manifest_path):
        manifest = json.loads(_read(manifest_path))
        order_insensitive = set(manifest.get("order_insensitive", []))
    rdf = load_ntriples(_read(rdf_path))
    pg = rdf_to_pg(rdf, registry)
    reports: list[RunReport] = []
    for name in names:
        qid = name[:-3]
        feature = feature_of(qid)
        try:
            ast = parse(_read(os.path.join(corpus_dir, name)))
            ok, us, nr, np_ = verify_query(ast, rdf, pg, registry,
                                           qid in order_insensitive)
            reports.append(RunReport(qid, feature, us, nr, np_, ok))
        except (S2gError, OSError) as exc:
            reports.append(RunReport(qid, feature, 0, 0, 0, False, str(exc)))
    failures = sum(not r.equivalent for r in reports)
    return reports, failures


def _print_reports(reports: list[RunReport], fmt: str):
    if fmt == "tsv":
        print("query\tfeature\ttranslate_us\trdf_rows\tpg_rows\tequivalent")
        for r in reports:
            print(f"{r.query_id}\t{r.feature}\t{r.translate_us}\t{r.rdf_rows}"
                  f"\t{r.pg_rows}\t{str(r.equivalent).lower()}")
        return
    header = f"{'query':<6} {'feature':<12} {'t(us)':>7} {'rdf':>6} {'pg':>6}  result"
    print(header)
    print("-" * len(header))
    for r in reports:
        status = "equivalent" if r.equivalent else f"MISMATCH {r.note}".rstrip()
        print(f"{r.query_id:<6} {r.feature:<12} {r.translate_us:>7} "
              f"{r.rdf_rows:>6} {r.pg_rows:>6}  {status}")


def cmd_verify(args) -> int:
    try:
        reports, failures = run_verify(args.corpus, args.rdf, load_registry())
    except (S2gError, OSError) as exc:
        message = exc.diagnostic(args.rdf) if isinstance(exc, S2gError) else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return 1
    _print_reports(reports, args.report)
    good = sum(r.equivalent for r in reports)
    print(f"{good}/{len(reports)} equivalent")
    if not reports:
        print("warning: corpus directory holds no .rq files", file=sys.stderr)
        return 0
    if failures:
        bad = ", ".join(r.query_id for r in reports if not r.equivalent)
        print(f"non-equivalent queries: {bad}", file=sys.stderr)
        return 4
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="s2g", description="SPARQL to Gremlin traversal compiler")
    sub = top.add_subparsers(dest="command", required=True)
    p_translate = sub.add_parser("translate", help="translate one query")
    p_translate.add_argument("query")
    p_translate.add_argument("--format", choices=("groovy", "bytecode"),
                             default="groovy")
    p_translate.set_defaults(func=cmd_translate)
    p_exec = sub.add_parser("exec", help="run a query on a .nt or .pgl graph")
    p_exec.add_argument("query")
    p_exec.add_argument("graph")
    p_exec.set_defaults(func=cmd_exec)
    p_verify = sub.add_parser("verify",
                              help="check both engines agree on a query corpus")
    p_verify.add_argument("corpus")
    p_verify.add_argument("rdf")
    p_verify.add_argument("--report", choices=("tsv", "pretty"), default="pretty")
    p_verify.set_defaults(func=cmd_verify)
    return top


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
