"""Traversal intermediate representation.

A ``TraversalIR`` is an ordered step list starting at ``GraphStep``. Pattern
work is carried either by one top-level ``MatchStep`` (several patterns) or
by a single inlined ``SstInstruction``; everything after that is filtering,
projection, and solution modifiers. Sub-traversals (union branches, optional
bodies, filter predicates) nest as step tuples.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ScopeError
from .graphs import PropertyValue
from .sst import SstInstruction

ASC = "asc"
DESC = "desc"


@dataclass(frozen=True)
class GraphStep:
    """The g.V() source: one traverser per vertex."""


@dataclass(frozen=True)
class MatchStep:
    patterns: tuple[SstInstruction, ...]


# -- filter predicates -------------------------------------------------------


@dataclass(frozen=True)
class Pred:
    key: str
    op: str                      # eq neq lt lte gt gte
    value: PropertyValue | None = None
    var: str | None = None       # set instead of value for var-vs-var
    iri_local: str | None = None  # set instead of value for IRI comparisons


@dataclass(frozen=True)
class PredAnd:
    children: tuple["PredicateTree", ...]


@dataclass(frozen=True)
class PredOr:
    children: tuple["PredicateTree", ...]


PredicateTree = Pred | PredAnd | PredOr

COMPARISON_OPS = {"=": "eq", "!=": "neq", "<": "lt", "<=": "lte", ">": "gt", ">=": "gte"}


def predicate_keys(tree: PredicateTree) -> set[str]:
    if isinstance(tree, Pred):
        keys = {tree.key}
        if tree.var is not None:
            keys.add(tree.var)
        return keys
    out: set[str] = set()
    for child in tree.children:
        out |= predicate_keys(child)
    return out


# -- steps after the pattern stage -------------------------------------------


@dataclass(frozen=True)
class WhereTraversalStep:
    predicate: PredicateTree


@dataclass(frozen=True)
class UnionStep:
    branches: tuple[tuple["IrStep", ...], ...]


@dataclass(frozen=True)
class ChooseStep:
    sub: tuple["IrStep", ...]


@dataclass(frozen=True)
class SelectStep:
    keys: tuple[str, ...]


@dataclass(frozen=True)
class DedupStep:
    keys: tuple[str, ...] = ()   # empty: deduplicate the whole current row


UNBOUNDED = None


@dataclass(frozen=True)
class RangeStep:
    low: int
    high: int | None             # None means unbounded

    def __post_init__(self):
        if self.low < 0:
            raise ValueError("range low must be >= 0")
        if self.high is not None and self.high < self.low:
            raise ValueError("range high must be >= low")


@dataclass(frozen=True)
class OrderStep:
    keys: tuple[tuple[str, str], ...]   # (variable, asc|desc)


@dataclass(frozen=True)
class GroupStep:
    key: str


@dataclass(frozen=True)
class GroupCountStep:
    key: str


@dataclass(frozen=True)
class CountStep:
    pass


IrStep = (GraphStep | MatchStep | SstInstruction | WhereTraversalStep | UnionStep
          | ChooseStep | SelectStep | DedupStep | RangeStep | OrderStep
          | GroupStep | GroupCountStep | CountStep)


@dataclass(frozen=True)
class TraversalIR:
    steps: tuple[IrStep, ...]


def produced_vars(steps: tuple[IrStep, ...]) -> set[str]:
    """Variables introduced by match starts/ends anywhere in the steps."""
    out: set[str] = set()
    for step in steps:
        if isinstance(step, SstInstruction):
            out.update(step.bound_vars())
        elif isinstance(step, MatchStep):
            for pat in step.patterns:
                out.update(pat.bound_vars())
        elif isinstance(step, UnionStep):
            for branch in step.branches:
                out |= produced_vars(branch)
        elif isinstance(step, ChooseStep):
            out |= produced_vars(step.sub)
    return out


def check_ir(ir: TraversalIR):
    """Single linear scan for structural soundness.

    Checks: the IR starts with GraphStep, has at most one top-level
    MatchStep, and every variable consumed by select/where/order/group/dedup
    is produced by some earlier match start or end.
    """
    steps = ir.steps
    if not steps or not isinstance(steps[0], GraphStep):
        raise ScopeError("traversal must begin with the graph step")
    if sum(isinstance(s, MatchStep) for s in steps) > 1:
        raise ScopeError("at most one match step may appear at the top level")
    seen: set[str] = set()

    def need(keys, what: str):
        for key in keys:
            if key not in seen:
                raise ScopeError(f"{what} consumes ?{key} before any pattern binds it")

    for step in steps:
        if isinstance(step, (SstInstruction, MatchStep, UnionStep, ChooseStep)):
            seen |= produced_vars((step,))
        elif isinstance(step, WhereTraversalStep):
            need(sorted(predicate_keys(step.predicate)), "where")
        elif isinstance(step, SelectStep):
            need(step.keys, "select")
        elif isinstance(step, OrderStep):
            need([k for k, _ in step.keys], "order")
        elif isinstance(step, (GroupStep, GroupCountStep)):
            need([step.key], "group")
        elif isinstance(step, DedupStep):
            need(step.keys, "dedup")
    return ir
