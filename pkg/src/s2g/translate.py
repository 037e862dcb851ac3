"""Assembles classified single-step traversals into a full traversal.

The composition order is fixed and shared with the reference evaluator:

    Match -> Where(filters) -> Choose(optionals) -> Select -> Order ->
    Group/GroupCount -> Dedup -> Range -> Count

Notes on the two aggregate wrinkles:
  * COUNT(DISTINCT ?v) inserts its deduplication right before the step that
    consumes it: before CountStep when ungrouped, before GroupCountStep
    (keyed on group variable plus counted variable) when grouped.
  * A query-level DISTINCT deduplicates the full projected row, so it keys
    on the plain projected variables, or on the whole current row when the
    projection is aggregate-only.
"""

from __future__ import annotations

from itertools import count as _count

from .ast import (Comparison, CountProjection, FilterAnd, FilterExpr,
                  GroupPattern, SparqlAst, TriplePattern, Var, VarProjection,
                  get_all_bgps)
from .errors import ScopeError, UnsupportedFeatureError
from .graphs import NUMBER, PrefixRegistry, RdfTerm
from .ir import (COMPARISON_OPS, ChooseStep, CountStep, DedupStep, GraphStep,
                 GroupCountStep, GroupStep, IrStep, MatchStep, OrderStep, Pred,
                 PredAnd, PredicateTree, PredOr, RangeStep, SelectStep,
                 TraversalIR, UnionStep, WhereTraversalStep, check_ir)
from .sst import (HasStep, MatchEndStep, MatchStartStep, SstInstruction,
                  classify, map_to_instruction)
from .graphs import CANONICAL_ID_KEY


class _FreshVars:
    """Deterministic fresh-variable names that dodge the query's own."""

    def __init__(self, used: set[str]):
        self._used = set(used)
        self._counter = _count()

    def next(self) -> Var:
        while True:
            name = f"k{next(self._counter)}"
            if name not in self._used:
                self._used.add(name)
                return Var(name)


def _id_check_instruction(var: Var, term: RdfTerm) -> SstInstruction:
    return SstInstruction(MatchStartStep(var.name),
                          HasStep(CANONICAL_ID_KEY, "eq", term.local_name()),
                          MatchEndStep())


def compile_pattern(tp: TriplePattern, registry: PrefixRegistry,
                    fresh: _FreshVars) -> list[SstInstruction]:
    """One pattern, one instruction, except that constant endpoints desugar
    into a fresh variable pinned by an equality on the canonical id key."""
    out: list[SstInstruction] = []
    subject = tp.subject
    if isinstance(subject, RdfTerm):
        var = fresh.next()
        out.append(_id_check_instruction(var, subject))
        subject = var
    case = classify(TriplePattern(subject, tp.predicate, tp.object), registry)
    if case.tag == "Eout" and isinstance(case.object, RdfTerm):
        var = fresh.next()
        hop = classify(TriplePattern(subject, tp.predicate, var), registry)
        out.append(map_to_instruction(hop))
        out.append(_id_check_instruction(var, case.object))
    else:
        out.append(map_to_instruction(case))
    return out


def build_predicate(expr: FilterExpr) -> PredicateTree:
    if isinstance(expr, Comparison):
        op = COMPARISON_OPS[expr.op]
        rhs = expr.rhs
        if isinstance(rhs, Var):
            return Pred(expr.lhs.name, op, var=rhs.name)
        if rhs.is_iri:
            return Pred(expr.lhs.name, op, iri_local=rhs.local_name())
        value = rhs.number if rhs.kind == NUMBER else rhs.lexical
        return Pred(expr.lhs.name, op, value=value)
    children = (build_predicate(expr.left), build_predicate(expr.right))
    return PredAnd(children) if isinstance(expr, FilterAnd) else PredOr(children)


def _conjoin(filters: tuple[FilterExpr, ...]) -> PredicateTree:
    trees = tuple(build_predicate(f) for f in filters)
    return trees[0] if len(trees) == 1 else PredAnd(trees)


def _group_steps(group: GroupPattern, registry: PrefixRegistry,
                 fresh: _FreshVars) -> list[IrStep]:
    """Pattern stage for one group: match/inline, filters, nested optionals."""
    steps: list[IrStep] = []
    instructions: list[SstInstruction] = []
    for tp in group.patterns:
        instructions.extend(compile_pattern(tp, registry, fresh))
    if len(instructions) == 1:
        steps.append(instructions[0])
    elif instructions:
        steps.append(MatchStep(tuple(instructions)))
    if group.filters:
        steps.append(WhereTraversalStep(_conjoin(group.filters)))
    for opt in group.optionals:
        steps.append(ChooseStep(tuple(_group_steps(opt, registry, fresh))))
    return steps


def validate_query(ast: SparqlAst):
    """Semantic checks shared by the translator and the reference evaluator."""
    bound = ast.where.all_variables()
    counts = [item for item in ast.projection if isinstance(item, CountProjection)]
    plain = [item for item in ast.projection if isinstance(item, VarProjection)]
    if len(counts) > 1:
        raise UnsupportedFeatureError(
            "multiple aggregates", "at most one COUNT per projection is supported")
    for item in plain:
        if item.var.name not in bound:
            raise ScopeError(f"projection of undeclared variable ?{item.var.name}")
    for item in counts:
        if item.var.name not in bound:
            raise ScopeError(f"COUNT of undeclared variable ?{item.var.name}")
    if counts and plain and ast.group_by is None:
        raise UnsupportedFeatureError(
            "implicit grouping",
            "COUNT mixed with plain variables requires an explicit GROUP BY")


def translate(ast: SparqlAst, registry: PrefixRegistry | None = None) -> TraversalIR:
    """The full pipeline from AST to traversal IR; pure and deterministic."""
    registry = registry or PrefixRegistry()
    validate_query(ast)
    fresh = _FreshVars(ast.where.all_variables())
    steps: list[IrStep] = [GraphStep()]
    where = ast.where
    if where.unions:
        left, right = where.unions[0]
        steps.append(UnionStep((
            tuple(_group_steps(left, registry, fresh)),
            tuple(_group_steps(right, registry, fresh)),
        )))
        if where.filters:
            steps.append(WhereTraversalStep(_conjoin(where.filters)))
    else:
        instructions: list[SstInstruction] = []
        for tp in get_all_bgps(ast):
            instructions.extend(compile_pattern(tp, registry, fresh))
        if len(instructions) == 1:
            steps.append(instructions[0])
        elif instructions:
            steps.append(MatchStep(tuple(instructions)))
        if where.filters:
            steps.append(WhereTraversalStep(_conjoin(where.filters)))
        for opt in where.optionals:
            steps.append(ChooseStep(tuple(_group_steps(opt, registry, fresh))))
    select_keys = []
    for item in ast.projection:
        select_keys.append(item.var.name)
    steps.append(SelectStep(tuple(select_keys)))
    ir = apply_modifiers(TraversalIR(tuple(steps)), ast)
    return check_ir(ir)


def apply_modifiers(ir: TraversalIR, ast: SparqlAst) -> TraversalIR:
    """Append the solution-modifier tail in the fixed canonical order."""
    steps = list(ir.steps)
    count_item = next((item for item in ast.projection
                       if isinstance(item, CountProjection)), None)
    if ast.order_by:
        steps.append(OrderStep(tuple((v.name, d) for v, d in ast.order_by)))
    if ast.group_by is not None:
        if count_item is not None:
            if count_item.distinct:
                steps.append(DedupStep((ast.group_by.name, count_item.var.name)))
            steps.append(GroupCountStep(ast.group_by.name))
        else:
            steps.append(GroupStep(ast.group_by.name))
    if ast.distinct:
        plain = tuple(item.var.name for item in ast.projection
                      if isinstance(item, VarProjection))
        if count_item is None and plain:
            steps.append(DedupStep(plain))
        else:
            steps.append(DedupStep(()))
    if ast.limit is not None or ast.offset is not None:
        low = ast.offset or 0
        high = None if ast.limit is None else low + ast.limit
        steps.append(RangeStep(low, high))
    if count_item is not None and ast.group_by is None:
        if count_item.distinct:
            steps.append(DedupStep((count_item.var.name,)))
        steps.append(CountStep())
    return TraversalIR(tuple(steps))
