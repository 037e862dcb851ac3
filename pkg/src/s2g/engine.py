"""Executes traversal IR against a property graph under bag semantics.

Execution tokens are traversers: a graph location, a variable-binding map,
and a bulk count standing for that many identical tokens. The pattern stage
solves match patterns by recursive binding with consistency checks; each
consistent variable assignment yields exactly one traverser, so result
multiplicities agree with homomorphism-based bag semantics. The incoming
traverser's element pins the first pattern's start variable, which is how
the vertex seeding of the graph step feeds the declarative match.

Stream order is deterministic: after the pattern stage traversers sort by
ascending element id, then binding-tuple order, and every later step is
order-preserving, so range and order output is reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .errors import EvalTypeError
from .graphs import CANONICAL_ID_KEY, Edge, Element, PropertyGraph, Vertex
from .ir import (ChooseStep, CountStep, DedupStep, GraphStep, GroupCountStep,
                 GroupStep, IrStep, MatchStep, OrderStep, PredAnd,
                 PredicateTree, PredOr, RangeStep, SelectStep, TraversalIR,
                 UnionStep, WhereTraversalStep, check_ir, produced_vars)
from .results import UNBOUND, SolutionMultiset
from .sst import (OUT, HasLabelStep, HasStep, PropertiesStep,
                  SstInstruction, VertexStep)


@dataclass
class Traverser:
    location: object                      # Element, property value, or None
    bindings: dict[str, object]
    bulk: int = 1


# ---------------------------------------------------------------------------
# Ordering


def _value_key(value) -> tuple:
    if value is UNBOUND:
        return (0,)
    if isinstance(value, Decimal):
        return (1, value)
    if isinstance(value, str):
        return (2, value)
    if isinstance(value, Vertex):
        return (3, value.id)
    if isinstance(value, Edge):
        return (4, value.id)
    return (5, str(value))


def _bindings_key(bindings: dict) -> tuple:
    return tuple((name, _value_key(bindings[name])) for name in sorted(bindings))


def _traverser_key(t: Traverser) -> tuple:
    return (_value_key(t.location if t.location is not None else UNBOUND),
            _bindings_key(t.bindings))


def _canonical(rows: list[Traverser], use_bulk: bool) -> list[Traverser]:
    rows = sorted(rows, key=_traverser_key)
    if not use_bulk:
        return rows
    merged: list[Traverser] = []
    for t in rows:
        if merged and _traverser_key(merged[-1]) == _traverser_key(t):
            merged[-1].bulk += t.bulk
        else:
            merged.append(Traverser(t.location, dict(t.bindings), t.bulk))
    return merged


# ---------------------------------------------------------------------------
# Value comparisons


def _pv_eq(a, b) -> bool:
    if isinstance(a, Decimal) and isinstance(b, Decimal):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return False


def _compare(lhs, op: str, rhs) -> bool:
    """Typed comparison; mismatched kinds raise, UNBOUND never matches."""
    if lhs is UNBOUND or rhs is UNBOUND:
        return False
    if isinstance(lhs, Decimal) and isinstance(rhs, Decimal):
        pass
    elif isinstance(lhs, str) and isinstance(rhs, str):
        pass
    else:
        raise EvalTypeError(
            f"cannot compare {type(lhs).__name__} value with "
            f"{type(rhs).__name__} value")
    if op == "eq":
        return lhs == rhs
    if op == "neq":
        return lhs != rhs
    if op == "lt":
        return lhs < rhs
    if op == "lte":
        return lhs <= rhs
    if op == "gt":
        return lhs > rhs
    if op == "gte":
        return lhs >= rhs
    raise ValueError(f"unknown comparison op {op!r}")


def _eval_pred(tree: PredicateTree, bindings: dict) -> bool:
    if isinstance(tree, PredAnd):
        return all(_eval_pred(c, bindings) for c in tree.children)
    if isinstance(tree, PredOr):
        return any(_eval_pred(c, bindings) for c in tree.children)
    lhs = bindings.get(tree.key, UNBOUND)
    if lhs is UNBOUND:
        return False
    if tree.iri_local is not None:
        if tree.op not in ("eq", "neq"):
            raise EvalTypeError("only equality comparisons are defined on IRIs")
        if not isinstance(lhs, (Vertex, Edge)):
            raise EvalTypeError("cannot compare a literal value with an IRI")
        ident = lhs.props.get(CANONICAL_ID_KEY)
        if ident is None:
            raise EvalTypeError(
                f"element {lhs!r} has no {CANONICAL_ID_KEY!r} property to compare")
        same = _pv_eq(ident, tree.iri_local)
        return same if tree.op == "eq" else not same
    rhs = bindings.get(tree.var, UNBOUND) if tree.var is not None else tree.value
    if isinstance(lhs, (Vertex, Edge)) or isinstance(rhs, (Vertex, Edge)):
        raise EvalTypeError("cannot compare graph elements with literal values")
    return _compare(lhs, tree.op, rhs)


# ---------------------------------------------------------------------------
# Match solving


def _core_results(core, element, g: PropertyGraph) -> list:
    """Locations reachable from one element through one core step."""
    if isinstance(core, HasStep):
        if isinstance(element, (Vertex, Edge)) and \
                _pv_eq(element.props.get(core.key), core.value):
            return [element]
        return []
    if isinstance(core, HasLabelStep):
        if isinstance(element, (Vertex, Edge)) and element.label == core.label:
            return [element]
        return []
    if isinstance(core, PropertiesStep):
        if isinstance(element, (Vertex, Edge)) and core.key in element.props:
            return [element.props[core.key]]
        return []
    if isinstance(core, VertexStep):
        if not isinstance(element, Vertex):
            return []
        if core.direction == OUT:
            targets = {e.dst for e in g.out_edges(element.id, core.label)}
        else:
            targets = {e.src for e in g.in_edges(element.id, core.label)}
        return [g.vertices[i] for i in sorted(targets)]
    raise TypeError(f"unknown core step {core!r}")


def _start_domain(core, g: PropertyGraph) -> list[Element]:
    if isinstance(core, VertexStep):
        return g.sorted_vertices()
    return g.elements()


def _end_matches(value, bound) -> bool:
    if isinstance(bound, (Vertex, Edge)) or isinstance(value, (Vertex, Edge)):
        return value == bound and type(value) is type(bound)
    return _pv_eq(value, bound)


def match_solve(patterns: tuple[SstInstruction, ...], g: PropertyGraph,
                seed: dict, pinned: Element | None) -> list[dict]:
    """All complete, consistent variable assignments extending ``seed``.

    ``pinned`` pins the first pattern's start variable to the incoming
    traverser's element when that variable is not already bound.
    """
    solutions: list[dict] = []

    def solve(index: int, bindings: dict):
        if index == len(patterns):
            solutions.append(bindings)
            return
        pat = patterns[index]
        start_var = pat.start.var
        if start_var in bindings:
            starts = [bindings[start_var]]
        elif index == 0 and pinned is not None:
            starts = [pinned]
        else:
            starts = _start_domain(pat.core, g)
        end_var = pat.end.var
        for start in starts:
            after_start = dict(bindings)
            after_start[start_var] = start
            for reached in _core_results(pat.core, start, g):
                # end-variable consistency includes the self-loop reading,
                # where the end variable is the start variable itself
                if end_var is not None and end_var in after_start:
                    if not _end_matches(reached, after_start[end_var]):
                        continue
                new = dict(after_start)
                if end_var is not None:
                    new[end_var] = reached
                solve(index + 1, new)

    solve(0, dict(seed))
    return solutions


def _first_start_location(patterns: tuple[SstInstruction, ...], bindings: dict):
    if patterns:
        return bindings.get(patterns[0].start.var)
    return None


def _solve_step(patterns: tuple[SstInstruction, ...], incoming: list[Traverser],
                g: PropertyGraph, use_bulk: bool) -> list[Traverser]:
    out: list[Traverser] = []
    for t in incoming:
        pinned = t.location if isinstance(t.location, (Vertex, Edge)) else None
        for bindings in match_solve(patterns, g, t.bindings, pinned):
            out.append(Traverser(_first_start_location(patterns, bindings),
                                 bindings, t.bulk))
    return _canonical(out, use_bulk)


# ---------------------------------------------------------------------------
# Step execution


def _run_sub(steps: tuple[IrStep, ...], incoming: list[Traverser],
             g: PropertyGraph, use_bulk: bool) -> list[Traverser]:
    rows = incoming
    for step in steps:
        rows = execute_step(step, rows, g, use_bulk)
    return rows


def _bulk_slice(rows: list[Traverser], low: int, high: int | None) -> list[Traverser]:
    out: list[Traverser] = []
    seen = 0
    for t in rows:
        start = max(low, seen)
        stop = seen + t.bulk if high is None else min(high, seen + t.bulk)
        take = stop - start
        if take > 0:
            out.append(Traverser(t.location, dict(t.bindings), take))
        seen += t.bulk
        if high is not None and seen >= high:
            break
    return out


def execute_step(step: IrStep, traversers: list[Traverser], g: PropertyGraph,
                 use_bulk: bool = False) -> list[Traverser]:
    """One step's transformation of a traverser set (binding-world steps)."""
    if isinstance(step, GraphStep):
        return [Traverser(v, {}, 1) for v in g.sorted_vertices()]
    if isinstance(step, MatchStep):
        return _solve_step(step.patterns, traversers, g, use_bulk)
    if isinstance(step, SstInstruction):
        return _solve_step((step,), traversers, g, use_bulk)
    if isinstance(step, UnionStep):
        out: list[Traverser] = []
        for branch in step.branches:
            out.extend(_run_sub(branch, traversers, g, use_bulk))
        return out
    if isinstance(step, ChooseStep):
        sub_vars = sorted(produced_vars(step.sub))
        out = []
        for t in traversers:
            seed = Traverser(None, dict(t.bindings), t.bulk)
            matched = _run_sub(step.sub, [seed], g, use_bulk)
            if matched:
                out.extend(matched)
            else:
                extended = dict(t.bindings)
                for name in sub_vars:
                    extended.setdefault(name, UNBOUND)
                out.append(Traverser(t.location, extended, t.bulk))
        return out
    if isinstance(step, WhereTraversalStep):
        return [t for t in traversers if _eval_pred(step.predicate, t.bindings)]
    if isinstance(step, SelectStep):
        return traversers
    if isinstance(step, OrderStep):
        rows = list(traversers)
        for key, direction in reversed(step.keys):
            rows.sort(key=lambda t: _value_key(t.bindings.get(key, UNBOUND)),
                      reverse=(direction == "desc"))
        return rows
    if isinstance(step, GroupStep):
        return sorted(traversers,
                      key=lambda t: _value_key(t.bindings.get(step.key, UNBOUND)))
    if isinstance(step, DedupStep):
        keys = step.keys or None
        seen = set()
        out = []
        for t in traversers:
            if keys is None:
                sig = _bindings_key(t.bindings)
            else:
                sig = tuple(_value_key(t.bindings.get(k, UNBOUND)) for k in keys)
            if sig in seen:
                continue
            seen.add(sig)
            out.append(Traverser(t.location, dict(t.bindings), 1))
        return out
    if isinstance(step, RangeStep):
        return _bulk_slice(traversers, step.low, step.high)
    raise TypeError(f"step {step!r} is not a traverser-set transformation")


# ---------------------------------------------------------------------------
# Full execution


@dataclass
class _AggRows:
    columns: tuple[str, ...]
    rows: list[tuple[tuple, int]]      # (row tuple, bulk)


def _group_count(traversers: list[Traverser], key: str) -> _AggRows:
    totals: dict[tuple, tuple] = {}
    counts: dict[tuple, int] = {}
    for t in traversers:
        value = t.bindings.get(key, UNBOUND)
        sig = _value_key(value)
        totals.setdefault(sig, (value,))
        counts[sig] = counts.get(sig, 0) + t.bulk
    rows = [((totals[sig][0], Decimal(counts[sig])), 1) for sig in sorted(counts)]
    return _AggRows((key, "count"), rows)


def execute(ir: TraversalIR, g: PropertyGraph, use_bulk: bool = True) -> SolutionMultiset:
    """Run a structurally sound traversal and project the surviving
    traversers into a solution multiset."""
    check_ir(ir)
    rows = execute_step(ir.steps[0], [], g, use_bulk)
    projection: tuple[str, ...] | None = None
    agg: _AggRows | None = None
    for step in ir.steps[1:]:
        if isinstance(step, SelectStep):
            projection = step.keys
        elif isinstance(step, GroupCountStep):
            agg = _group_count(rows, step.key)
            rows = []
        elif isinstance(step, CountStep):
            total = sum(b for _, b in agg.rows) if agg is not None \
                else sum(t.bulk for t in rows)
            agg = _AggRows(("count",), [((Decimal(total),), 1)])
            rows = []
        elif agg is not None:
            if isinstance(step, DedupStep):
                seen = set()
                deduped = []
                for row, _ in agg.rows:
                    sig = tuple(_value_key(v) for v in row)
                    if sig not in seen:
                        seen.add(sig)
                        deduped.append((row, 1))
                agg = _AggRows(agg.columns, deduped)
            elif isinstance(step, RangeStep):
                flat: list[tuple[tuple, int]] = []
                seen_n = 0
                for row, bulk in agg.rows:
                    start = max(step.low, seen_n)
                    stop = seen_n + bulk if step.high is None \
                        else min(step.high, seen_n + bulk)
                    if stop - start > 0:
                        flat.append((row, stop - start))
                    seen_n += bulk
                    if step.high is not None and seen_n >= step.high:
                        break
                agg = _AggRows(agg.columns, flat)
            else:
                raise EvalTypeError(
                    f"step {type(step).__name__} cannot follow an aggregation")
        elif isinstance(step, DedupStep) and not step.keys and projection:
            # whole-row dedup keys on the projected view at this stage
            seen = set()
            deduped_rows = []
            for t in rows:
                sig = tuple(_value_key(t.bindings.get(k, UNBOUND))
                            for k in projection)
                if sig not in seen:
                    seen.add(sig)
                    deduped_rows.append(Traverser(t.location, dict(t.bindings), 1))
            rows = deduped_rows
        else:
            rows = execute_step(step, rows, g, use_bulk)
    if agg is not None:
        out_rows: list[tuple] = []
        for row, bulk in agg.rows:
            out_rows.extend([row] * bulk)
        return SolutionMultiset(agg.columns, out_rows)
    if projection is None:
        names: set[str] = set()
        for t in rows:
            names.update(t.bindings)
        projection = tuple(sorted(names))
    out_rows = []
    for t in rows:
        row = tuple(t.bindings.get(k, UNBOUND) for k in projection)
        out_rows.extend([row] * t.bulk)
    return SolutionMultiset(projection, out_rows)
