"""Classification of triple patterns into single-step traversals.

Every supported triple pattern resolves to exactly one of eight cases based
on its predicate marker and object kind:

    Lv / Le      label equality          -> HasLabelStep
    Pv1 / Pe1    property equality       -> HasStep(key eq value)
    Pv2 / Pe2    property read           -> PropertiesStep(key)
    Eout / Ein   hop across an edge      -> VertexStep(OUT|IN, label)

The predicate marker alone cannot distinguish an edge property from an edge
label (both live under the edge prefix), so the registry's
``edge_property_keys`` set decides: listed suffixes are property keys,
everything else under the edge prefix is an edge label.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .ast import TriplePattern, Var
from .errors import ClassificationError
from .graphs import NUMBER, PrefixRegistry, PropertyValue, RdfTerm

OUT = "OUT"
IN = "IN"

LV, LE = "Lv", "Le"
PV1, PE1 = "Pv1", "Pe1"
PV2, PE2 = "Pv2", "Pe2"
EOUT, EIN = "Eout", "Ein"


# -- step records -----------------------------------------------------------


@dataclass(frozen=True)
class MatchStartStep:
    var: str


@dataclass(frozen=True)
class MatchEndStep:
    var: str | None = None


@dataclass(frozen=True)
class HasStep:
    key: str
    op: str
    value: PropertyValue


@dataclass(frozen=True)
class HasLabelStep:
    label: str


@dataclass(frozen=True)
class PropertiesStep:
    key: str


@dataclass(frozen=True)
class VertexStep:
    direction: str        # OUT | IN
    label: str


CoreStep = HasStep | HasLabelStep | PropertiesStep | VertexStep


@dataclass(frozen=True)
class SstInstruction:
    """MatchStartStep, exactly one core step, MatchEndStep."""

    start: MatchStartStep
    core: CoreStep
    end: MatchEndStep

    def steps(self) -> tuple:
        return (self.start, self.core, self.end)

    def bound_vars(self) -> list[str]:
        out = [self.start.var]
        if self.end.var is not None:
            out.append(self.end.var)
        return out


@dataclass(frozen=True)
class SstCase:
    tag: str
    key: str                      # property name, edge label, or label value
    subject: Var | RdfTerm
    object: Var | RdfTerm | None  # None for label/property-equality cases


def _literal_value(term: RdfTerm) -> PropertyValue:
    if term.kind == NUMBER:
        assert isinstance(term.number, Decimal)
        return term.number
    return term.lexical


def classify(tp: TriplePattern, registry: PrefixRegistry | None = None) -> SstCase:
    """Deterministic tag per the predicate marker and object kind."""
    registry = registry or PrefixRegistry()
    role, key = registry.classify_predicate(tp.predicate)
    obj = tp.object
    obj_is_var = isinstance(obj, Var)
    if role in ("vlabel", "elabel"):
        if obj_is_var or obj.kind != "string":
            raise ClassificationError(
                f"label pattern on <{tp.predicate.lexical}> requires a constant "
                "string value")
        return SstCase(LV if role == "vlabel" else LE, obj.lexical, tp.subject, None)
    if role == "vprop":
        if obj_is_var:
            return SstCase(PV2, key, tp.subject, obj)
        if obj.is_iri:
            raise ClassificationError(
                f"vertex property <{tp.predicate.lexical}> cannot be matched "
                "against an IRI; only literal values")
        return SstCase(PV1, key, tp.subject, obj)
    if role == "eprop":
        if obj_is_var:
            return SstCase(PE2, key, tp.subject, obj)
        if obj.is_iri:
            raise ClassificationError(
                f"edge property <{tp.predicate.lexical}> cannot be matched "
                "against an IRI; only literal values")
        return SstCase(PE1, key, tp.subject, obj)
    # edge hop: the object names (or binds) the target vertex
    if not obj_is_var and not obj.is_iri:
        raise ClassificationError(
            f"edge pattern <{tp.predicate.lexical}> requires an IRI or variable "
            "object, not a literal")
    return SstCase(EOUT, key, tp.subject, obj)


def from_object_perspective(case: SstCase) -> SstCase:
    """The equivalent incoming-hop reading of an outgoing edge pattern."""
    if case.tag != EOUT:
        raise ValueError(f"only {EOUT} cases have an object-perspective form")
    assert case.object is not None
    return SstCase(EIN, case.key, case.object, case.subject)


def _start_var(term: Var | RdfTerm) -> str:
    if not isinstance(term, Var):
        raise ValueError(
            "constant endpoints must be desugared to fresh variables before "
            "instruction mapping")
    return term.name


def map_to_instruction(case: SstCase) -> SstInstruction:
    """The step triple for a classified case."""
    start = MatchStartStep(_start_var(case.subject))
    if case.tag in (LV, LE):
        return SstInstruction(start, HasLabelStep(case.key), MatchEndStep())
    if case.tag in (PV1, PE1):
        assert isinstance(case.object, RdfTerm)
        return SstInstruction(start, HasStep(case.key, "eq", _literal_value(case.object)),
                              MatchEndStep())
    if case.tag in (PV2, PE2):
        assert isinstance(case.object, Var)
        return SstInstruction(start, PropertiesStep(case.key),
                              MatchEndStep(case.object.name))
    if case.tag == EOUT:
        return SstInstruction(start, VertexStep(OUT, case.key),
                              MatchEndStep(_start_var(case.object)))
    if case.tag == EIN:
        return SstInstruction(start, VertexStep(IN, case.key),
                              MatchEndStep(_start_var(case.object)))
    raise ValueError(f"unknown case tag {case.tag!r}")
