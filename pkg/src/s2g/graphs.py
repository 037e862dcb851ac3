"""Graph data models and loaders.

Two in-memory carriers live here: ``RdfGraph`` (a set of triples over IRIs
and literals) and ``PropertyGraph`` (labeled vertices/edges with key-value
properties), together with loaders for their textual serializations and the
prefix-convention converter ``rdf_to_pg`` that pairs an RDF dataset with a
property-graph counterpart.

The pairing convention: a predicate's local name (the part after the final
'/' or '#') starts with a registered marker that says what the triple means
on the property-graph side.

    v:label  "person"   -> vertex label
    v:name   "marko"    -> vertex property name=marko
    e:created <lop>     -> edge labeled "created" to the object's vertex
    e:weight  0.5       -> edge property (only meaningful on the PG side;
                           declared via the registry's edge_property_keys)

Graphs are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Mapping

from .errors import ClassificationError, GraphLoadError, ParseError, UnsupportedFeatureError

# ---------------------------------------------------------------------------
# Values

# Property values are plain Python: strings stay str, numbers are Decimal so
# that numeric lexical forms round-trip exactly and 0.50 == 0.5.
PropertyValue = str | Decimal

_NUMERIC_RE = re.compile(r"[+-]?(?:\d+\.\d+|\d+|\.\d+)$")


def is_numeric_lexical(token: str) -> bool:
    return bool(_NUMERIC_RE.match(token))


def canonical_number(value: Decimal) -> str:
    """Exponent-free decimal text without trailing zeros (0.50 -> 0.5)."""
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("", "-0"):
        text = "0"
    return text


def value_sort_key(value: PropertyValue) -> tuple:
    # Numbers order before strings; within a kind the natural order applies.
    if isinstance(value, Decimal):
        return (0, value)
    return (1, value)


# ---------------------------------------------------------------------------
# RDF model

IRI = "iri"
STRING = "string"
NUMBER = "number"


@dataclass(frozen=True)
class RdfTerm:
    """An IRI, string literal, or numeric literal.

    ``lexical`` is the surface text; numeric terms also carry their exact
    decimal value. Blank nodes are not represented.
    """

    kind: str
    lexical: str
    number: Decimal | None = None

    def __post_init__(self):
        if self.kind == IRI and (not self.lexical or any(c.isspace() for c in self.lexical)):
            raise ValueError(f"invalid IRI lexical: {self.lexical!r}")
        if self.kind == NUMBER and self.number is None:
            raise ValueError("numeric term without a value")

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_literal(self) -> bool:
        return self.kind in (STRING, NUMBER)

    def local_name(self) -> str:
        """The segment after the final '/' or '#' (whole text if neither)."""
        return re.split(r"[/#]", self.lexical)[-1]

    def __repr__(self):
        if self.kind == IRI:
            return f"<{self.lexical}>"
        if self.kind == NUMBER:
            return self.lexical
        return json.dumps(self.lexical)


def iri(text: str) -> RdfTerm:
    return RdfTerm(IRI, text)


def string_literal(text: str) -> RdfTerm:
    return RdfTerm(STRING, text)


def numeric_literal(lexical: str) -> RdfTerm:
    try:
        return RdfTerm(NUMBER, lexical, Decimal(lexical))
    except InvalidOperation as exc:
        raise ValueError(f"not a numeric lexical: {lexical!r}") from exc


Triple = tuple[RdfTerm, RdfTerm, RdfTerm]


@dataclass(frozen=True)
class RdfGraph:
    """A duplicate-free set of (subject, predicate, object) triples."""

    triples: frozenset[Triple]

    def __post_init__(self):
        for s, p, _ in self.triples:
            if not s.is_iri or not p.is_iri:
                raise ValueError("subject and predicate must be IRIs")
        # Nested-loop pattern matching scans per predicate; precompute the
        # buckets once since the graph never changes.
        by_pred: dict[str, list[Triple]] = {}
        by_subj_pred: dict[tuple[str, str], list[Triple]] = {}
        for t in self.sorted_triples():
            by_pred.setdefault(t[1].lexical, []).append(t)
            by_subj_pred.setdefault((t[0].lexical, t[1].lexical), []).append(t)
        object.__setattr__(self, "_by_pred", by_pred)
        object.__setattr__(self, "_by_subj_pred", by_subj_pred)

    def __len__(self):
        return len(self.triples)

    def sorted_triples(self) -> list[Triple]:
        return sorted(self.triples, key=lambda t: (t[0].lexical, t[1].lexical, t[2].lexical))

    def triples_with_predicate(self, predicate: str) -> list[Triple]:
        return self._by_pred.get(predicate, [])

    def triples_with_subject_predicate(self, subject: str, predicate: str) -> list[Triple]:
        return self._by_subj_pred.get((subject, predicate), [])


# ---------------------------------------------------------------------------
# Property-graph model


@dataclass(frozen=True)
class Vertex:
    id: int
    label: str
    props: Mapping[str, PropertyValue] = field(compare=False, default_factory=dict)

    def __repr__(self):
        return f"v[{self.id}]"


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    label: str
    dst: int
    props: Mapping[str, PropertyValue] = field(compare=False, default_factory=dict)

    def __repr__(self):
        return f"e[{self.id}]"


Element = Vertex | Edge


class PropertyGraph:
    """Immutable labeled multigraph with adjacency indexes."""

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Edge]):
        self.vertices: dict[int, Vertex] = {}
        self.edges: dict[int, Edge] = {}
        for v in vertices:
            if v.id in self.vertices:
                raise GraphLoadError(f"duplicate vertex id {v.id}")
            self.vertices[v.id] = v
        for e in edges:
            if e.id in self.edges:
                raise GraphLoadError(f"duplicate edge id {e.id}")
            if e.src not in self.vertices:
                raise GraphLoadError(f"edge {e.id} references missing vertex {e.src}")
            if e.dst not in self.vertices:
                raise GraphLoadError(f"edge {e.id} references missing vertex {e.dst}")
            self.edges[e.id] = e
        self._out: dict[int, list[Edge]] = {v: [] for v in self.vertices}
        self._in: dict[int, list[Edge]] = {v: [] for v in self.vertices}
        for e in sorted(self.edges.values(), key=lambda e: e.id):
            self._out[e.src].append(e)
            self._in[e.dst].append(e)

    def sorted_vertices(self) -> list[Vertex]:
        return [self.vertices[i] for i in sorted(self.vertices)]

    def sorted_edges(self) -> list[Edge]:
        return [self.edges[i] for i in sorted(self.edges)]

    def elements(self) -> list[Element]:
        return [*self.sorted_vertices(), *self.sorted_edges()]

    def out_edges(self, vertex_id: int, label: str | None = None) -> list[Edge]:
        edges = self._out.get(vertex_id, [])
        return edges if label is None else [e for e in edges if e.label == label]

    def in_edges(self, vertex_id: int, label: str | None = None) -> list[Edge]:
        edges = self._in.get(vertex_id, [])
        return edges if label is None else [e for e in edges if e.label == label]

    def __eq__(self, other):
        if not isinstance(other, PropertyGraph):
            return NotImplemented
        return (self.vertices == other.vertices and self.edges == other.edges
                and all(self.vertices[i].props == other.vertices[i].props for i in self.vertices)
                and all(self.edges[i].props == other.edges[i].props for i in self.edges))


# ---------------------------------------------------------------------------
# Prefix registry

# Key under which a converted vertex remembers the local name of its source
# IRI; this doubles as the cross-model comparison key during verification.
CANONICAL_ID_KEY = "id"


@dataclass(frozen=True)
class PrefixRegistry:
    """The marker vocabulary that drives triple classification."""

    vertex_prefix: str = "v:"
    edge_prefix: str = "e:"
    vertex_label_key: str = "v:label"
    edge_label_key: str = "e:label"
    edge_property_keys: frozenset[str] = frozenset({"weight"})

    def __post_init__(self):
        markers = (self.vertex_prefix, self.edge_prefix,
                   self.vertex_label_key, self.edge_label_key)
        if len(set(markers)) != 4:
            raise ValueError("registry markers must be pairwise distinct")
        if not self.vertex_prefix.endswith(":") or not self.edge_prefix.endswith(":"):
            raise ValueError("prefixes must end with ':'")

    def classify_predicate(self, predicate: RdfTerm) -> tuple[str, str]:
        """Map a predicate IRI to (role, key).

        Roles: ``vlabel``/``elabel`` (label markers), ``vprop``/``eprop``
        (property keys), ``edge`` (edge label). Raises ClassificationError
        when the local name carries no registered marker.
        """
        local = predicate.local_name()
        if local == self.vertex_label_key:
            return ("vlabel", "")
        if local == self.edge_label_key:
            return ("elabel", "")
        if local.startswith(self.vertex_prefix):
            return ("vprop", local[len(self.vertex_prefix):])
        if local.startswith(self.edge_prefix):
            suffix = local[len(self.edge_prefix):]
            if suffix in self.edge_property_keys:
                return ("eprop", suffix)
            return ("edge", suffix)
        raise ClassificationError(
            f"predicate <{predicate.lexical}> carries no registered marker "
            f"(expected local name under {self.vertex_prefix!r} or {self.edge_prefix!r})")


# ---------------------------------------------------------------------------
# N-Triples subset loader

_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\"}


def _unescape(text: str, lineno: int) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\":
            if i + 1 >= len(text):
                raise ParseError("dangling escape in string literal", lineno)
            nxt = text[i + 1]
            if nxt not in _ESCAPES:
                raise ParseError(f"unknown escape \\{nxt} in string literal", lineno)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _nt_tokens(line: str, lineno: int) -> list[RdfTerm]:
    """Split one N-Triples line into term tokens, expecting a final dot."""
    terms: list[RdfTerm] = []
    i = 0
    n = len(line)
    saw_dot = False
    while i < n:
        c = line[i]
        if c.isspace():
            i += 1
            continue
        if saw_dot:
            raise ParseError("content after terminating '.'", lineno, i + 1)
        if c == "<":
            end = line.find(">", i)
            if end < 0:
                raise ParseError("unterminated IRI", lineno, i + 1)
            text = line[i + 1:end]
            if not text or any(ch.isspace() for ch in text):
                raise ParseError(f"invalid IRI <{text}>", lineno, i + 1)
            terms.append(iri(text))
            i = end + 1
        elif c == '"':
            j = i + 1
            while j < n:
                if line[j] == "\\":
                    j += 2
                    continue
                if line[j] == '"':
                    break
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", lineno, i + 1)
            terms.append(string_literal(_unescape(line[i + 1:j], lineno)))
            i = j + 1
        elif c == "_":
            raise UnsupportedFeatureError(
                "blank node", "blank-node syntax ('_:') is not supported", lineno, i + 1)
        elif c == "." and not (i + 1 < n and line[i + 1].isdigit()):
            saw_dot = True
            i += 1
        else:
            j = i
            while j < n and not line[j].isspace():
                j += 1
            chunk = line[i:j]
            # `29.` packs the line terminator against the numeral.
            if chunk.endswith(".") and is_numeric_lexical(chunk[:-1]):
                terms.append(numeric_literal(chunk[:-1]))
                saw_dot = True
            elif is_numeric_lexical(chunk):
                terms.append(numeric_literal(chunk))
            else:
                raise ParseError(f"unrecognized token {chunk!r}", lineno, i + 1)
            i = j
    if not saw_dot:
        raise ParseError("missing terminating '.'", lineno, n)
    return terms


def load_ntriples(text: str) -> RdfGraph:
    """Parse the line-oriented N-Triples subset into an RdfGraph.

    Lines whose first non-space character is '#' are comments. Objects may
    be IRIs in angle brackets, double-quoted strings, or bare numerals.
    Duplicate triples collapse (set semantics).
    """
    triples: set[Triple] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        terms = _nt_tokens(raw, lineno)
        if len(terms) != 3:
            raise ParseError(f"expected 3 terms before '.', found {len(terms)}", lineno)
        s, p, o = terms
        if not s.is_iri:
            raise ParseError("subject must be an IRI", lineno)
        if not p.is_iri:
            raise ParseError("predicate must be an IRI", lineno)
        triples.add((s, p, o))
    return RdfGraph(frozenset(triples))


def serialize_ntriples(graph: RdfGraph) -> str:
    lines = []
    for s, p, o in graph.sorted_triples():
        if o.is_iri:
            obj = f"<{o.lexical}>"
        elif o.kind == NUMBER:
            obj = o.lexical
        else:
            obj = json.dumps(o.lexical)
        lines.append(f"<{s.lexical}> <{p.lexical}> {obj} .")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Property-graph line format (.pgl)


def _load_pg_props(raw, lineno: int) -> dict[str, PropertyValue]:
    if not isinstance(raw, dict):
        raise GraphLoadError(f"props must be an object", lineno)
    props: dict[str, PropertyValue] = {}
    for key, value in raw.items():
        if isinstance(value, str):
            props[key] = value
        elif isinstance(value, (int, Decimal)) and not isinstance(value, bool):
            props[key] = Decimal(value)
        else:
            raise GraphLoadError(f"property {key!r} must be a string or number", lineno)
    return props


def load_pg(text: str) -> PropertyGraph:
    """Parse the line-delimited property-graph format.

    Each non-blank line is one JSON object: ``type`` ("v"|"e"), ``id``,
    ``label``, for edges ``src``/``dst``, and ``props``. Referential
    integrity is enforced: every edge endpoint must name a loaded vertex.
    """
    vertices: list[Vertex] = []
    edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rec = json.loads(line, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed record: {exc.msg}", lineno) from exc
        if not isinstance(rec, dict) or "type" not in rec:
            raise GraphLoadError("record must be an object with a 'type' field", lineno)
        kind = rec.get("type")
        if kind not in ("v", "e"):
            raise GraphLoadError(f"unknown record type {kind!r}", lineno)
        if not isinstance(rec.get("id"), int):
            raise GraphLoadError("missing or non-integer 'id'", lineno)
        label = rec.get("label")
        if not isinstance(label, str) or not label:
            raise GraphLoadError(f"{'vertex' if kind == 'v' else 'edge'} "
                                 f"{rec['id']} is missing a label", lineno)
        props = _load_pg_props(rec.get("props", {}), lineno)
        if kind == "v":
            vertices.append(Vertex(rec["id"], label, props))
        else:
            if not isinstance(rec.get("src"), int) or not isinstance(rec.get("dst"), int):
                raise GraphLoadError(f"edge {rec['id']} needs integer src/dst", lineno)
            edges.append(Edge(rec["id"], rec["src"], label, rec["dst"], props))
    return PropertyGraph(vertices, edges)


def _pg_value_text(value: PropertyValue) -> str:
    if isinstance(value, Decimal):
        return canonical_number(value)
    return json.dumps(value)


def _pg_props_text(props: Mapping[str, PropertyValue]) -> str:
    inner = ",".join(f"{json.dumps(k)}:{_pg_value_text(props[k])}" for k in sorted(props))
    return "{" + inner + "}"


def serialize_pg(graph: PropertyGraph) -> str:
    """Canonical text: vertices before edges, each sorted by id, fixed field
    order, sorted property keys, numbers without trailing zeros."""
    lines = []
    for v in graph.sorted_vertices():
        lines.append(f'{{"type":"v","id":{v.id},"label":{json.dumps(v.label)},'
                     f'"props":{_pg_props_text(v.props)}}}')
    for e in graph.sorted_edges():
        lines.append(f'{{"type":"e","id":{e.id},"label":{json.dumps(e.label)},'
                     f'"src":{e.src},"dst":{e.dst},"props":{_pg_props_text(e.props)}}}')
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# RDF -> property graph conversion


def rdf_to_pg(graph: RdfGraph, registry: PrefixRegistry | None = None) -> PropertyGraph:
    """Convert an RDF graph to its property-graph counterpart.

    Deterministic: triples are processed in (s, p, o) text order; subjects
    and IRI objects receive vertex ids 1..n by first appearance, edges get
    ids n+1.. in the same pass. Every vertex records the local name of its
    source IRI under the canonical id key and gets label "vertex" unless a
    label triple says otherwise.
    """
    registry = registry or PrefixRegistry()
    ordered = graph.sorted_triples()

    vertex_ids: dict[str, int] = {}

    def vertex_for(term: RdfTerm) -> int:
        if term.lexical not in vertex_ids:
            vertex_ids[term.lexical] = len(vertex_ids) + 1
        return vertex_ids[term.lexical]

    # First pass fixes vertex identity so edge ids can start at n+1.
    for s, p, o in ordered:
        role, _ = registry.classify_predicate(p)
        vertex_for(s)
        if role == "edge" and o.is_iri:
            vertex_for(o)

    labels: dict[int, str] = {}
    props: dict[int, dict[str, PropertyValue]] = {}
    edges: list[Edge] = []
    next_edge_id = len(vertex_ids) + 1

    def assign_prop(vid: int, key: str, value: PropertyValue, source: RdfTerm):
        bucket = props.setdefault(vid, {})
        if key in bucket and bucket[key] != value:
            raise GraphLoadError(
                f"conflicting values for property {key!r} on <{source.lexical}>")
        bucket.setdefault(key, value)

    for term_text, vid in vertex_ids.items():
        assign_prop(vid, CANONICAL_ID_KEY, iri(term_text).local_name(), iri(term_text))

    for s, p, o in ordered:
        role, key = registry.classify_predicate(p)
        svid = vertex_ids[s.lexical]
        if role in ("vlabel", "elabel"):
            if o.kind != STRING:
                raise GraphLoadError(
                    f"label value for <{s.lexical}> must be a string literal")
            if svid in labels and labels[svid] != o.lexical:
                raise GraphLoadError(f"conflicting labels for <{s.lexical}>")
            labels[svid] = o.lexical
        elif role == "vprop":
            if o.is_iri:
                raise GraphLoadError(
                    f"vertex property <{p.lexical}> on <{s.lexical}> has an IRI object; "
                    "only string or numeric literals are allowed")
            value = o.number if o.kind == NUMBER else o.lexical
            assign_prop(svid, key, value, s)
        elif role == "eprop":
            raise GraphLoadError(
                f"edge-property triple <{s.lexical}> <{p.lexical}> cannot be expressed "
                "without edge reification; declare edge properties in the .pgl file instead")
        else:  # edge
            if not o.is_iri:
                raise GraphLoadError(
                    f"edge triple <{s.lexical}> <{p.lexical}> requires an IRI object")
            edges.append(Edge(next_edge_id, svid, key, vertex_ids[o.lexical], {}))
            next_edge_id += 1

    vertices = [Vertex(vid, labels.get(vid, "vertex"), props.get(vid, {}))
                for vid in sorted(vertex_ids.values())]
    return PropertyGraph(vertices, edges)
