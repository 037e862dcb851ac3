"""Lexer and recursive-descent parser for the supported SELECT subset.

Supported: SELECT with DISTINCT and COUNT(...) / COUNT(DISTINCT ...)
aggregates aliased via AS, basic graph patterns, FILTER with comparisons
combined by && and ||, OPTIONAL, a two-branch UNION, GROUP BY on one
variable, ORDER BY ASC/DESC, LIMIT and OFFSET.

Constructs that are recognized but rejected each raise a named
UnsupportedFeatureError: variable predicates, REGEX, ASK/CONSTRUCT/DESCRIBE
forms, property paths, and blank-node syntax.

Prefixed names expand against declared PREFIX bases at parse time. A
prefixed name with no declaration keeps its compact text as the IRI, which
is how the v:/e: marker vocabulary reaches the classifier unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (Comparison, CountProjection, FilterAnd, FilterExpr, FilterOr,
                  GroupPattern, ProjectionItem, SparqlAst, TriplePattern, Var,
                  VarProjection, filter_variables)
from .errors import ParseError, ScopeError, UnsupportedFeatureError
from .graphs import RdfTerm, iri, numeric_literal, string_literal

RDF_TYPE_IRI = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_KEYWORDS = {
    "SELECT", "DISTINCT", "WHERE", "FILTER", "OPTIONAL", "UNION", "PREFIX",
    "BASE", "GROUP", "ORDER", "BY", "ASC", "DESC", "LIMIT", "OFFSET",
    "COUNT", "AS", "A",
}

# Query forms and 1.1 features we name explicitly instead of failing with a
# generic syntax error.
_REJECTED_FORMS = {"ASK", "CONSTRUCT", "DESCRIBE"}
_REJECTED_IN_GROUP = {"BIND", "VALUES", "MINUS", "GRAPH", "SERVICE", "SELECT"}
_REJECTED_AGGREGATES = {"SUM", "AVG", "MIN", "MAX", "SAMPLE", "GROUP_CONCAT"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def _is_name_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c in "_-"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def push(kind: str, tok_text: str, tok_line: int, tok_col: int):
        tokens.append(Token(kind, tok_text, tok_line, tok_col))

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c == "<":
            # IRI only when a '>' closes it before whitespace or an illegal
            # IRI character; otherwise this is the less-than operator.
            j = i + 1
            while j < n and text[j] not in "> \t\r\n<\"{}|^`":
                j += 1
            if j < n and text[j] == ">" and j > i + 1:
                push("IRI", text[i + 1:j], start_line, start_col)
                col += j - i + 1
                i = j + 1
            elif i + 1 < n and text[i + 1] == "=":
                push("LTE", "<=", start_line, start_col)
                col += 2
                i += 2
            else:
                push("LT", "<", start_line, start_col)
                col += 1
                i += 1
            continue
        if c in "\"'":
            quote = c
            j = i + 1
            out = []
            while j < n and text[j] != quote:
                if text[j] == "\n":
                    raise ParseError("unterminated string literal", start_line, start_col)
                if text[j] == "\\":
                    if j + 1 >= n:
                        raise ParseError("dangling escape", start_line, start_col)
                    esc = text[j + 1]
                    mapped = {"n": "\n", "t": "\t", "r": "\r",
                              '"': '"', "'": "'", "\\": "\\"}.get(esc)
                    if mapped is None:
                        raise ParseError(f"unknown escape \\{esc}", start_line, start_col)
                    out.append(mapped)
                    j += 2
                    continue
                out.append(text[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", start_line, start_col)
            push("STRING", "".join(out), start_line, start_col)
            col += j - i + 1
            i = j + 1
            continue
        if c == "?" and i + 1 < n and _is_name_start(text[i + 1]):
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            push("VAR", text[i + 1:j], start_line, start_col)
            col += j - i
            i = j
            continue
        if c.isdigit() or (c in "+-" and i + 1 < n and
                           (text[i + 1].isdigit() or text[i + 1] == ".")) or \
                (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            if text[j] in "+-":
                j += 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            push("NUMBER", text[i:j], start_line, start_col)
            col += j - i
            i = j
            continue
        if _is_name_start(c):
            j = i
            while j < n and _is_name_char(text[j]):
                j += 1
            name = text[i:j]
            if j < n and text[j] == ":":
                if name == "_":
                    raise UnsupportedFeatureError(
                        "blank node", "blank-node syntax ('_:') is not supported",
                        start_line, start_col)
                j += 1
                k = j
                while k < n and _is_name_char(text[k]):
                    k += 1
                push("PNAME", f"{name}:{text[j:k]}", start_line, start_col)
                col += k - i
                i = k
                continue
            push("IDENT", name, start_line, start_col)
            col += j - i
            i = j
            continue
        if c == ":":
            # empty-prefix pname, e.g. :name
            j = i + 1
            k = j
            while k < n and _is_name_char(text[k]):
                k += 1
            push("PNAME", f":{text[j:k]}", start_line, start_col)
            col += k - i
            i = k
            continue
        two = text[i:i + 2]
        if two in ("&&", "||", "!=", "<=", ">="):
            kind = {"&&": "ANDAND", "||": "OROR", "!=": "NEQ",
                    "<=": "LTE", ">=": "GTE"}[two]
            push(kind, two, start_line, start_col)
            i += 2
            col += 2
            continue
        singles = {"{": "LBRACE", "}": "RBRACE", "(": "LPAREN", ")": "RPAREN",
                   ".": "DOT", ",": "COMMA", ";": "SEMI", "=": "EQ",
                   ">": "GT", "*": "STAR", "/": "SLASH", "|": "PIPE",
                   "^": "CARET", "+": "PLUS", "[": "LBRACKET", "]": "RBRACKET"}
        if c in singles:
            push(singles[c], c, start_line, start_col)
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", start_line, start_col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    # -- token plumbing ------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, *expected_names: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            names = expected_names or (kind,)
            raise ParseError(f"unexpected {tok.kind} {tok.text!r}", tok.line, tok.col,
                             expected=names)
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.upper == word

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if not self.at_keyword(word):
            raise ParseError(f"unexpected {tok.kind} {tok.text!r}", tok.line, tok.col,
                             expected=(word,))
        return self.advance()

    # -- terms ---------------------------------------------------------

    def expand_pname(self, tok: Token) -> RdfTerm:
        prefix, _, local = tok.text.partition(":")
        if prefix in self.prefixes:
            return iri(self.prefixes[prefix] + local)
        return iri(tok.text)

    def parse_iri_term(self) -> RdfTerm:
        tok = self.peek()
        if tok.kind == "IRI":
            self.advance()
            return iri(tok.text)
        if tok.kind == "PNAME":
            self.advance()
            return self.expand_pname(tok)
        raise ParseError(f"unexpected {tok.kind} {tok.text!r}", tok.line, tok.col,
                         expected=("IRI", "prefixed name"))

    def parse_var(self) -> Var:
        tok = self.expect("VAR", "variable")
        return Var(tok.text, tok.line, tok.col)

    # -- query ---------------------------------------------------------

    def parse_query(self) -> SparqlAst:
        while self.at_keyword("PREFIX") or self.at_keyword("BASE"):
            if self.at_keyword("BASE"):
                tok = self.peek()
                raise UnsupportedFeatureError(
                    "BASE", "BASE declarations are not supported", tok.line, tok.col)
            self.advance()
            name_tok = self.expect("PNAME", "prefix name")
            prefix, _, local = name_tok.text.partition(":")
            if local:
                raise ParseError("prefix declaration must end with ':'",
                                 name_tok.line, name_tok.col)
            base = self.expect("IRI", "IRI").text
            self.prefixes[prefix] = base
        head = self.peek()
        if head.kind == "IDENT" and head.upper in _REJECTED_FORMS:
            raise UnsupportedFeatureError(
                head.upper, f"{head.upper} queries are not supported; only SELECT",
                head.line, head.col)
        self.expect_keyword("SELECT")
        distinct = False
        if self.at_keyword("DISTINCT"):
            self.advance()
            distinct = True
        projection = self.parse_projection()
        self.expect_keyword("WHERE")
        where = self.parse_group(top_level=True)
        group_by, order_by, limit, offset = self.parse_modifiers()
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError(f"unexpected trailing {tok.kind} {tok.text!r}",
                             tok.line, tok.col)
        ast = SparqlAst(
            prefixes=tuple(sorted(self.prefixes.items())),
            projection=tuple(projection),
            distinct=distinct,
            where=where,
            group_by=group_by,
            order_by=tuple(order_by),
            limit=limit,
            offset=offset,
        )
        self.validate(ast)
        return ast

    def parse_projection(self) -> list[ProjectionItem]:
        items: list[ProjectionItem] = []
        while True:
            tok = self.peek()
            if tok.kind == "VAR":
                items.append(VarProjection(self.parse_var()))
            elif tok.kind == "STAR":
                raise UnsupportedFeatureError(
                    "SELECT *", "SELECT * is not supported; name the variables",
                    tok.line, tok.col)
            elif tok.kind == "LPAREN":
                items.append(self.parse_count_projection())
            else:
                break
        if not items:
            tok = self.peek()
            raise ParseError("projection must name at least one variable",
                             tok.line, tok.col, expected=("variable", "(COUNT(...) AS ?x)"))
        return items

    def parse_count_projection(self) -> CountProjection:
        self.expect("LPAREN")
        tok = self.peek()
        if tok.kind == "IDENT" and tok.upper in _REJECTED_AGGREGATES:
            raise UnsupportedFeatureError(
                tok.upper, f"aggregate {tok.upper} is not supported; only COUNT",
                tok.line, tok.col)
        self.expect_keyword("COUNT")
        self.expect("LPAREN")
        count_distinct = False
        if self.at_keyword("DISTINCT"):
            self.advance()
            count_distinct = True
        # the counted variable may carry its own parentheses: COUNT(DISTINCT (?x))
        extra_paren = False
        if self.peek().kind == "LPAREN":
            self.advance()
            extra_paren = True
        var = self.parse_var()
        if extra_paren:
            self.expect("RPAREN")
        self.expect("RPAREN")
        self.expect_keyword("AS")
        alias = self.parse_var()
        self.expect("RPAREN")
        return CountProjection(var, count_distinct, alias.name)

    # -- group patterns --------------------------------------------------

    def parse_group(self, top_level: bool, in_union: bool = False,
                    in_optional: bool = False) -> GroupPattern:
        open_tok = self.expect("LBRACE", "{")
        patterns: list[TriplePattern] = []
        filters: list[FilterExpr] = []
        optionals: list[GroupPattern] = []
        unions: list[tuple[GroupPattern, GroupPattern]] = []
        while True:
            tok = self.peek()
            if tok.kind == "RBRACE":
                self.advance()
                break
            if tok.kind == "EOF":
                raise ParseError("unterminated group (missing '}')",
                                 open_tok.line, open_tok.col)
            if tok.kind == "IDENT" and tok.upper in _REJECTED_IN_GROUP:
                raise UnsupportedFeatureError(
                    tok.upper, f"{tok.upper} is not supported inside a group",
                    tok.line, tok.col)
            if tok.kind in ("LBRACKET", "RBRACKET"):
                raise UnsupportedFeatureError(
                    "blank node", "blank-node syntax ('[...]') is not supported",
                    tok.line, tok.col)
            if self.at_keyword("FILTER"):
                self.advance()
                filters.append(self.parse_filter())
                continue
            if self.at_keyword("OPTIONAL"):
                if in_union:
                    raise UnsupportedFeatureError(
                        "OPTIONAL in UNION", "OPTIONAL inside a UNION branch "
                        "is not supported", tok.line, tok.col)
                self.advance()
                opt = self.parse_group(top_level=False, in_optional=True)
                if not opt.patterns:
                    raise ParseError("OPTIONAL group must contain at least one pattern",
                                     tok.line, tok.col)
                optionals.append(opt)
                continue
            if tok.kind == "LBRACE":
                if in_union or in_optional:
                    raise UnsupportedFeatureError(
                        "nested UNION", "only one level of UNION nesting is supported",
                        tok.line, tok.col)
                left = self.parse_group(top_level=False, in_union=True)
                self.expect_keyword("UNION")
                right = self.parse_group(top_level=False, in_union=True)
                if self.at_keyword("UNION"):
                    nxt = self.peek()
                    raise UnsupportedFeatureError(
                        "nested UNION", "only a single two-branch UNION is supported",
                        nxt.line, nxt.col)
                unions.append((left, right))
                continue
            patterns.append(self.parse_triple())
            if self.peek().kind == "DOT":
                self.advance()
        if unions and (patterns or optionals or len(unions) > 1):
            raise UnsupportedFeatureError(
                "UNION composition", "a group may hold either one UNION pair or "
                "plain patterns, not both", open_tok.line, open_tok.col)
        group = GroupPattern(tuple(patterns), tuple(filters),
                             tuple(optionals), tuple(unions))
        self.check_filter_scope(group)
        return group

    def parse_triple(self) -> TriplePattern:
        tok = self.peek()
        subject: Var | RdfTerm
        if tok.kind == "VAR":
            subject = self.parse_var()
        else:
            subject = self.parse_iri_term()
        pred_tok = self.peek()
        if pred_tok.kind == "VAR":
            raise UnsupportedFeatureError(
                "variable predicate",
                f"variable predicate ?{pred_tok.text} is not supported: the predicate "
                "must be a known IRI for a traversal to be generated",
                pred_tok.line, pred_tok.col)
        if pred_tok.kind == "CARET":
            raise UnsupportedFeatureError(
                "property path", "property paths are not supported",
                pred_tok.line, pred_tok.col)
        if pred_tok.kind == "IDENT" and pred_tok.upper == "A":
            self.advance()
            predicate = iri(RDF_TYPE_IRI)
        else:
            predicate = self.parse_iri_term()
        follow = self.peek()
        if follow.kind in ("SLASH", "PIPE", "CARET", "PLUS", "STAR"):
            raise UnsupportedFeatureError(
                "property path", "property paths are not supported",
                follow.line, follow.col)
        obj_tok = self.peek()
        obj: Var | RdfTerm
        if obj_tok.kind == "VAR":
            obj = self.parse_var()
        elif obj_tok.kind == "STRING":
            self.advance()
            obj = string_literal(obj_tok.text)
        elif obj_tok.kind == "NUMBER":
            self.advance()
            obj = numeric_literal(obj_tok.text)
        elif obj_tok.kind in ("IRI", "PNAME"):
            obj = self.parse_iri_term()
        else:
            raise ParseError(f"unexpected {obj_tok.kind} {obj_tok.text!r}",
                             obj_tok.line, obj_tok.col,
                             expected=("variable", "IRI", "literal"))
        return TriplePattern(subject, predicate, obj, tok.line, tok.col)

    # -- filters ---------------------------------------------------------

    def parse_filter(self) -> FilterExpr:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.check_filter_function(tok)
        self.expect("LPAREN", "(")
        expr = self.parse_or_expr()
        self.expect("RPAREN")
        return expr

    def check_filter_function(self, tok: Token):
        if tok.upper == "REGEX":
            raise UnsupportedFeatureError(
                "REGEX", "REGEX is not supported: the traversal language has no "
                "regular expression predicate", tok.line, tok.col)
        raise UnsupportedFeatureError(
            tok.text, f"filter function {tok.text!r} is not supported",
            tok.line, tok.col)

    def parse_or_expr(self) -> FilterExpr:
        left = self.parse_and_expr()
        while self.peek().kind == "OROR":
            self.advance()
            left = FilterOr(left, self.parse_and_expr())
        return left

    def parse_and_expr(self) -> FilterExpr:
        left = self.parse_primary_expr()
        while self.peek().kind == "ANDAND":
            self.advance()
            left = FilterAnd(left, self.parse_primary_expr())
        return left

    _RELOPS = {"EQ": "=", "NEQ": "!=", "LT": "<", "LTE": "<=", "GT": ">", "GTE": ">="}
    _MIRROR = {"=": "=", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}

    def parse_primary_expr(self) -> FilterExpr:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.check_filter_function(tok)
        if tok.kind == "LPAREN":
            self.advance()
            expr = self.parse_or_expr()
            self.expect("RPAREN")
            return expr
        lhs = self.parse_operand()
        op_tok = self.peek()
        if op_tok.kind not in self._RELOPS:
            raise ParseError(f"unexpected {op_tok.kind} {op_tok.text!r}",
                             op_tok.line, op_tok.col,
                             expected=tuple(self._RELOPS.values()))
        self.advance()
        op = self._RELOPS[op_tok.kind]
        rhs = self.parse_operand()
        if isinstance(lhs, Var):
            return Comparison(op, lhs, rhs, op_tok.line, op_tok.col)
        if isinstance(rhs, Var):
            return Comparison(self._MIRROR[op], rhs, lhs, op_tok.line, op_tok.col)
        raise ParseError("comparison requires at least one variable operand",
                         op_tok.line, op_tok.col)

    def parse_operand(self) -> Var | RdfTerm:
        tok = self.peek()
        if tok.kind == "VAR":
            return self.parse_var()
        if tok.kind == "STRING":
            self.advance()
            return string_literal(tok.text)
        if tok.kind == "NUMBER":
            self.advance()
            return numeric_literal(tok.text)
        if tok.kind in ("IRI", "PNAME"):
            return self.parse_iri_term()
        if tok.kind == "IDENT":
            self.check_filter_function(tok)
        raise ParseError(f"unexpected {tok.kind} {tok.text!r}", tok.line, tok.col,
                         expected=("variable", "literal", "IRI"))

    # -- solution modifiers ------------------------------------------------

    def parse_modifiers(self):
        group_by: Var | None = None
        order_by: list[tuple[Var, str]] = []
        limit: int | None = None
        offset: int | None = None
        if self.at_keyword("GROUP"):
            self.advance()
            self.expect_keyword("BY")
            paren = self.peek().kind == "LPAREN"
            if paren:
                self.advance()
            group_by = self.parse_var()
            if paren:
                self.expect("RPAREN")
        if self.at_keyword("HAVING"):
            tok = self.peek()
            raise UnsupportedFeatureError("HAVING", "HAVING is not supported",
                                          tok.line, tok.col)
        if self.at_keyword("ORDER"):
            self.advance()
            self.expect_keyword("BY")
            while True:
                tok = self.peek()
                if tok.kind == "IDENT" and tok.upper in ("ASC", "DESC"):
                    self.advance()
                    direction = tok.upper.lower()
                    self.expect("LPAREN")
                    order_by.append((self.parse_var(), direction))
                    self.expect("RPAREN")
                elif tok.kind == "LPAREN":
                    self.advance()
                    order_by.append((self.parse_var(), "asc"))
                    self.expect("RPAREN")
                elif tok.kind == "VAR":
                    order_by.append((self.parse_var(), "asc"))
                else:
                    break
            if not order_by:
                tok = self.peek()
                raise ParseError("ORDER BY needs at least one sort key",
                                 tok.line, tok.col, expected=("variable",))
        while self.at_keyword("LIMIT") or self.at_keyword("OFFSET"):
            which = self.advance().upper
            tok = self.expect("NUMBER", "non-negative integer")
            if not tok.text.isdigit():
                raise ParseError(f"{which} must be a non-negative integer",
                                 tok.line, tok.col)
            value = int(tok.text)
            if which == "LIMIT":
                if limit is not None:
                    raise ParseError("duplicate LIMIT", tok.line, tok.col)
                limit = value
            else:
                if offset is not None:
                    raise ParseError("duplicate OFFSET", tok.line, tok.col)
                offset = value
        return group_by, order_by, limit, offset

    # -- validation -------------------------------------------------------

    def check_filter_scope(self, group: GroupPattern):
        declared = {v.name for tp in group.patterns for v in tp.variables()}
        for expr in group.filters:
            for name in sorted(filter_variables(expr)):
                if name not in declared:
                    raise ScopeError(
                        f"filter references ?{name}, which is not bound by the "
                        "enclosing group's patterns")

    def validate(self, ast: SparqlAst):
        aliases = [item.alias for item in ast.projection
                   if isinstance(item, CountProjection)]
        if len(aliases) != len(set(aliases)):
            raise ParseError("duplicate aggregate alias in projection")
        in_where = ast.where.all_variables()
        if ast.group_by is not None and ast.group_by.name not in in_where:
            raise ScopeError(f"GROUP BY variable ?{ast.group_by.name} does not "
                             "appear in the WHERE clause")
        for var, _ in ast.order_by:
            if var.name not in in_where:
                raise ScopeError(f"ORDER BY variable ?{var.name} does not appear "
                                 "in the WHERE clause")


def parse(text: str) -> SparqlAst:
    """Parse query text into a SparqlAst, or raise ParseError /
    UnsupportedFeatureError / ScopeError with position info."""
    return _Parser(tokenize(text)).parse_query()
