"""AST for the supported SPARQL 1.0 SELECT subset.

Nodes compare structurally; source positions ride along for diagnostics but
are excluded from equality so that parse(pretty(ast)) == ast holds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graphs import NUMBER, RdfTerm


@dataclass(frozen=True)
class Var:
    """A query variable, stored without the leading '?'."""

    name: str
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)

    def __repr__(self):
        return f"?{self.name}"


SubjectTerm = Var | RdfTerm       # IRI when constant
ObjectTerm = Var | RdfTerm        # IRI or literal when constant


@dataclass(frozen=True)
class TriplePattern:
    subject: SubjectTerm
    predicate: RdfTerm            # always a constant IRI
    object: ObjectTerm
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)

    def variables(self) -> list[Var]:
        out = []
        if isinstance(self.subject, Var):
            out.append(self.subject)
        if isinstance(self.object, Var):
            out.append(self.object)
        return out


@dataclass(frozen=True)
class Comparison:
    op: str                       # one of = != < <= > >=
    lhs: Var
    rhs: RdfTerm | Var
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FilterAnd:
    left: "FilterExpr"
    right: "FilterExpr"


@dataclass(frozen=True)
class FilterOr:
    left: "FilterExpr"
    right: "FilterExpr"


FilterExpr = Comparison | FilterAnd | FilterOr


def filter_variables(expr: FilterExpr) -> set[str]:
    if isinstance(expr, Comparison):
        names = {expr.lhs.name}
        if isinstance(expr.rhs, Var):
            names.add(expr.rhs.name)
        return names
    return filter_variables(expr.left) | filter_variables(expr.right)


@dataclass(frozen=True)
class GroupPattern:
    patterns: tuple[TriplePattern, ...] = ()
    filters: tuple[FilterExpr, ...] = ()
    optionals: tuple["GroupPattern", ...] = ()
    unions: tuple[tuple["GroupPattern", "GroupPattern"], ...] = ()

    def all_variables(self) -> set[str]:
        """Every variable bound anywhere in this group, recursively."""
        names: set[str] = set()
        for tp in self.patterns:
            names.update(v.name for v in tp.variables())
        for opt in self.optionals:
            names |= opt.all_variables()
        for left, right in self.unions:
            names |= left.all_variables() | right.all_variables()
        return names


@dataclass(frozen=True)
class VarProjection:
    var: Var


@dataclass(frozen=True)
class CountProjection:
    var: Var
    distinct: bool
    alias: str


ProjectionItem = VarProjection | CountProjection


@dataclass(frozen=True)
class SparqlAst:
    prefixes: tuple[tuple[str, str], ...]
    projection: tuple[ProjectionItem, ...]
    distinct: bool
    where: GroupPattern
    group_by: Var | None = None
    order_by: tuple[tuple[Var, str], ...] = ()   # direction: "asc" | "desc"
    limit: int | None = None
    offset: int | None = None


def get_all_bgps(ast: SparqlAst) -> list[TriplePattern]:
    """Triple patterns of the top-level group in source order; patterns
    inside optional or union sub-groups are left to the translator."""
    return list(ast.where.patterns)


# ---------------------------------------------------------------------------
# Pretty printer


def _term_text(term: RdfTerm | Var) -> str:
    if isinstance(term, Var):
        return f"?{term.name}"
    if term.is_iri:
        return f"<{term.lexical}>"
    if term.kind == NUMBER:
        return term.lexical
    return json.dumps(term.lexical)


def _filter_text(expr: FilterExpr) -> str:
    if isinstance(expr, Comparison):
        return f"{_term_text(expr.lhs)} {expr.op} {_term_text(expr.rhs)}"
    op = "&&" if isinstance(expr, FilterAnd) else "||"
    return f"({_filter_text(expr.left)} {op} {_filter_text(expr.right)})"


def _group_text(group: GroupPattern, indent: str = "  ") -> str:
    parts = []
    for tp in group.patterns:
        parts.append(f"{indent}{_term_text(tp.subject)} {_term_text(tp.predicate)} "
                     f"{_term_text(tp.object)} .")
    for expr in group.filters:
        parts.append(f"{indent}FILTER ({_filter_text(expr)})")
    for opt in group.optionals:
        parts.append(f"{indent}OPTIONAL {{")
        parts.append(_group_text(opt, indent + "  "))
        parts.append(f"{indent}}}")
    for left, right in group.unions:
        parts.append(f"{indent}{{")
        parts.append(_group_text(left, indent + "  "))
        parts.append(f"{indent}}} UNION {{")
        parts.append(_group_text(right, indent + "  "))
        parts.append(f"{indent}}}")
    return "\n".join(parts)


def pretty(ast: SparqlAst) -> str:
    """Deterministic query text that reparses to an equal AST."""
    lines = []
    for name, base in ast.prefixes:
        lines.append(f"PREFIX {name}: <{base}>")
    proj = []
    for item in ast.projection:
        if isinstance(item, VarProjection):
            proj.append(f"?{item.var.name}")
        else:
            inner = f"DISTINCT ?{item.var.name}" if item.distinct else f"?{item.var.name}"
            proj.append(f"(COUNT({inner}) AS ?{item.alias})")
    head = "SELECT " + ("DISTINCT " if ast.distinct else "") + " ".join(proj)
    lines.append(head)
    lines.append("WHERE {")
    body = _group_text(ast.where)
    if body:
        lines.append(body)
    lines.append("}")
    if ast.group_by is not None:
        lines.append(f"GROUP BY (?{ast.group_by.name})")
    if ast.order_by:
        keys = " ".join(f"{d.upper()}(?{v.name})" for v, d in ast.order_by)
        lines.append(f"ORDER BY {keys}")
    if ast.limit is not None:
        lines.append(f"LIMIT {ast.limit}")
    if ast.offset is not None:
        lines.append(f"OFFSET {ast.offset}")
    return "\n".join(lines) + "\n"
