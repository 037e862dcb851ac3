"""Reference bag-semantics evaluator over the RDF graph.

Deliberately plain: exhaustive triple-pattern matching with nested-loop
joins in source order, then filters, then left joins for optionals, then
solution modifiers in the same canonical order the translator emits. This
is the RDF-side half of the cross-engine equivalence check, so it shares
no evaluation machinery with the traversal engine.
"""

from __future__ import annotations

from decimal import Decimal

from .ast import (Comparison, CountProjection, FilterAnd, FilterExpr,
                  GroupPattern, SparqlAst, TriplePattern, Var)
from .errors import EvalTypeError, NormalizationError
from .graphs import (CANONICAL_ID_KEY, IRI, NUMBER, STRING, Edge, PrefixRegistry,
                     RdfGraph, RdfTerm, Vertex, canonical_number, numeric_literal)
from .results import UNBOUND, SolutionMultiset
from .translate import validate_query

Row = dict[str, object]          # var name -> RdfTerm | UNBOUND


def _term_eq(a: RdfTerm, b: RdfTerm) -> bool:
    if a.kind == NUMBER and b.kind == NUMBER:
        return a.number == b.number
    return a.kind == b.kind and a.lexical == b.lexical


def _match_pattern(tp: TriplePattern, g: RdfGraph, row: Row) -> list[Row]:
    subject = tp.subject
    if isinstance(subject, Var):
        bound = row.get(subject.name)
        if bound is UNBOUND:
            return []            # a row cannot rebind an explicitly unbound var
        subject_term = bound if isinstance(bound, RdfTerm) else None
    else:
        subject_term = subject
    if subject_term is not None and subject_term.kind != IRI:
        return []
    if subject_term is not None:
        candidates = g.triples_with_subject_predicate(
            subject_term.lexical, tp.predicate.lexical)
    else:
        candidates = g.triples_with_predicate(tp.predicate.lexical)
    obj = tp.object
    obj_term = None
    if isinstance(obj, Var):
        bound = row.get(obj.name)
        if isinstance(bound, RdfTerm):
            obj_term = bound
        elif bound is UNBOUND:
            return []            # a row cannot rebind an explicitly unbound var
    else:
        obj_term = obj
    out: list[Row] = []
    for s, _, o in candidates:
        if obj_term is not None and not _term_eq(o, obj_term):
            continue
        new = dict(row)
        if isinstance(subject, Var):
            new[subject.name] = s
        if isinstance(obj, Var):
            new[obj.name] = o
        out.append(new)
    return out


def _term_sort_key(value) -> tuple:
    if value is UNBOUND:
        return (0,)
    assert isinstance(value, RdfTerm)
    if value.kind == NUMBER:
        return (1, value.number)
    if value.kind == STRING:
        return (2, value.lexical)
    return (3, value.lexical)


def _compare_terms(lhs: RdfTerm, op: str, rhs: RdfTerm) -> bool:
    if lhs.kind == NUMBER and rhs.kind == NUMBER:
        a, b = lhs.number, rhs.number
    elif lhs.kind == STRING and rhs.kind == STRING:
        a, b = lhs.lexical, rhs.lexical
    elif lhs.kind == IRI and rhs.kind == IRI:
        if op not in ("=", "!="):
            raise EvalTypeError("only equality comparisons are defined on IRIs")
        a, b = lhs.lexical, rhs.lexical
    else:
        raise EvalTypeError(
            f"cannot compare a {lhs.kind} value with a {rhs.kind} value")
    return {"=": a == b, "!=": a != b, "<": a < b,
            "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _eval_filter(expr: FilterExpr, row: Row) -> bool:
    if isinstance(expr, Comparison):
        lhs = row.get(expr.lhs.name, UNBOUND)
        if lhs is UNBOUND:
            return False
        rhs = expr.rhs
        if isinstance(rhs, Var):
            rhs = row.get(rhs.name, UNBOUND)
            if rhs is UNBOUND:
                return False
        return _compare_terms(lhs, expr.op, rhs)
    if isinstance(expr, FilterAnd):
        return _eval_filter(expr.left, row) and _eval_filter(expr.right, row)
    return _eval_filter(expr.left, row) or _eval_filter(expr.right, row)


def _eval_group(group: GroupPattern, g: RdfGraph, seed: Row) -> list[Row]:
    rows = [dict(seed)]
    for tp in group.patterns:
        rows = [ext for row in rows for ext in _match_pattern(tp, g, row)]
    if group.unions:
        left, right = group.unions[0]
        rows = ([ext for row in rows for ext in _eval_group(left, g, row)]
                + [ext for row in rows for ext in _eval_group(right, g, row)])
    if group.filters:
        rows = [row for row in rows
                if all(_eval_filter(f, row) for f in group.filters)]
    for opt in group.optionals:
        opt_vars = sorted(opt.all_variables())
        joined: list[Row] = []
        for row in rows:
            extensions = _eval_group(opt, g, row)
            if extensions:
                joined.extend(extensions)
            else:
                widened = dict(row)
                for name in opt_vars:
                    widened.setdefault(name, UNBOUND)
                joined.append(widened)
        rows = joined
    return rows


def ref_evaluate(ast: SparqlAst, g: RdfGraph) -> SolutionMultiset:
    """Evaluate the query and apply solution modifiers in canonical order:
    order, group, dedup, range, count (projection last materializes)."""
    validate_query(ast)
    rows = _eval_group(ast.where, g, {})
    columns = []
    for item in ast.projection:
        columns.append(item.alias if isinstance(item, CountProjection)
                       else item.var.name)
    select_vars = [item.var.name for item in ast.projection]
    count_item = next((item for item in ast.projection
                       if isinstance(item, CountProjection)), None)

    if ast.order_by:
        for var, direction in reversed(ast.order_by):
            rows.sort(key=lambda r: _term_sort_key(r.get(var.name, UNBOUND)),
                      reverse=(direction == "desc"))

    tuples: list[tuple] | None = None
    if ast.group_by is not None:
        key = ast.group_by.name
        if count_item is not None:
            if count_item.distinct:
                rows = _dedup_rows(rows, (key, count_item.var.name))
            groups: dict[tuple, list] = {}
            for row in rows:
                value = row.get(key, UNBOUND)
                groups.setdefault(_term_sort_key(value), [value, 0])[1] += 1
            tuples = [(groups[sig][0], numeric_literal(str(groups[sig][1])))
                      for sig in sorted(groups)]
        else:
            rows.sort(key=lambda r: _term_sort_key(r.get(key, UNBOUND)))

    if ast.distinct:
        if tuples is not None:
            tuples = _dedup_tuples(tuples)
        else:
            rows = _dedup_rows(rows, tuple(select_vars))

    if ast.limit is not None or ast.offset is not None:
        low = ast.offset or 0
        high = None if ast.limit is None else low + ast.limit
        if tuples is not None:
            tuples = tuples[low:high]
        else:
            rows = rows[low:high]

    if count_item is not None and ast.group_by is None:
        if count_item.distinct:
            rows = _dedup_rows(rows, (count_item.var.name,))
        tuples = [(numeric_literal(str(len(rows))),)]

    if tuples is not None:
        return SolutionMultiset(tuple(columns), tuples)
    materialized = [tuple(row.get(name, UNBOUND) for name in select_vars)
                    for row in rows]
    return SolutionMultiset(tuple(columns), materialized)


def _dedup_rows(rows: list[Row], keys: tuple[str, ...]) -> list[Row]:
    seen = set()
    out = []
    for row in rows:
        sig = tuple(_term_sort_key(row.get(k, UNBOUND)) for k in keys)
        if sig not in seen:
            seen.add(sig)
            out.append(row)
    return out


def _dedup_tuples(tuples: list[tuple]) -> list[tuple]:
    seen = set()
    out = []
    for row in tuples:
        sig = tuple(_term_sort_key(v) for v in row)
        if sig not in seen:
            seen.add(sig)
            out.append(row)
    return out


# ---------------------------------------------------------------------------
# Cross-model normalization


def _normalize_cell(value, row_index: int):
    if value is UNBOUND:
        return UNBOUND
    if isinstance(value, RdfTerm):
        if value.kind == NUMBER:
            return canonical_number(value.number)
        if value.kind == IRI:
            return value.local_name()
        return value.lexical
    if isinstance(value, Decimal):
        return canonical_number(value)
    if isinstance(value, str):
        return value
    if isinstance(value, (Vertex, Edge)):
        ident = value.props.get(CANONICAL_ID_KEY)
        if ident is None:
            raise NormalizationError(
                f"row {row_index}: element {value!r} has no "
                f"{CANONICAL_ID_KEY!r} property to compare by")
        return canonical_number(ident) if isinstance(ident, Decimal) else ident
    raise NormalizationError(f"row {row_index}: unmappable value {value!r}")


def normalize(result: SolutionMultiset,
              registry: PrefixRegistry | None = None) -> SolutionMultiset:
    """Map both engines' value spaces onto common comparison keys: IRIs and
    element references collapse to the canonical id (the IRI's local name),
    numbers to canonical decimal text."""
    rows = [tuple(_normalize_cell(v, i) for v in row)
            for i, row in enumerate(result.rows)]
    return SolutionMultiset(result.columns, rows)
