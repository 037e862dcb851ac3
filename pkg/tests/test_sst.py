from decimal import Decimal

import pytest

from s2g.ast import TriplePattern, Var
from s2g.errors import ClassificationError
from s2g.graphs import PrefixRegistry, iri, numeric_literal, string_literal
from s2g.sst import (EIN, EOUT, LE, LV, PE1, PE2, PV1, PV2, HasLabelStep,
                     HasStep, MatchEndStep, MatchStartStep, PropertiesStep,
                     VertexStep, classify, from_object_perspective,
                     map_to_instruction)

X, Y = Var("x"), Var("y")


def tp(pred, obj, subj=X):
    return TriplePattern(subj, iri(pred), obj)


@pytest.mark.parametrize("pattern,tag", [
    (tp("v:label", string_literal("person")), LV),
    (tp("e:label", string_literal("knows")), LE),
    (tp("v:name", string_literal("marko")), PV1),
    (tp("e:weight", numeric_literal("0.8")), PE1),
    (tp("v:name", Y), PV2),
    (tp("v:age", Var("d")), PV2),
    (tp("e:weight", Y), PE2),
    (tp("e:knows", Y), EOUT),
    (tp("e:knows", iri("vadas")), EOUT),
])
def test_classify_decision_table(pattern, tag):
    assert classify(pattern).tag == tag


def test_classify_partitions_marker_object_space():
    # every (marker kind, object kind) combination lands on exactly one tag
    objects = {"var": Y, "string": string_literal("s"),
               "number": numeric_literal("1"), "iri": iri("other")}
    outcomes = {}
    for marker, pred in [("vlabel", "v:label"), ("elabel", "e:label"),
                         ("vprop", "v:name"), ("eprop", "e:weight"),
                         ("edge", "e:knows")]:
        for kind, obj in objects.items():
            try:
                outcomes[(marker, kind)] = classify(tp(pred, obj)).tag
            except ClassificationError:
                outcomes[(marker, kind)] = "rejected"
    expected = {
        ("vlabel", "var"): "rejected", ("vlabel", "string"): LV,
        ("vlabel", "number"): "rejected", ("vlabel", "iri"): "rejected",
        ("elabel", "var"): "rejected", ("elabel", "string"): LE,
        ("elabel", "number"): "rejected", ("elabel", "iri"): "rejected",
        ("vprop", "var"): PV2, ("vprop", "string"): PV1,
        ("vprop", "number"): PV1, ("vprop", "iri"): "rejected",
        ("eprop", "var"): PE2, ("eprop", "string"): PE1,
        ("eprop", "number"): PE1, ("eprop", "iri"): "rejected",
        ("edge", "var"): EOUT, ("edge", "string"): "rejected",
        ("edge", "number"): "rejected", ("edge", "iri"): EOUT,
    }
    assert outcomes == expected


def test_unprefixed_predicate_is_classification_error():
    with pytest.raises(ClassificationError):
        classify(tp("name", string_literal("x")))


def test_edge_property_keys_drive_disambiguation():
    reg = PrefixRegistry(edge_property_keys=frozenset({"since"}))
    assert classify(tp("e:weight", Y), reg).tag == EOUT
    assert classify(tp("e:since", Y), reg).tag == PE2


def test_map_pv1():
    inst = map_to_instruction(classify(tp("v:name", string_literal("marko"))))
    assert inst.steps() == (MatchStartStep("x"),
                            HasStep("name", "eq", "marko"),
                            MatchEndStep(None))


def test_map_pe1_numeric():
    inst = map_to_instruction(classify(tp("e:weight", numeric_literal("0.8"))))
    assert inst.core == HasStep("weight", "eq", Decimal("0.8"))


def test_map_labels():
    assert map_to_instruction(
        classify(tp("v:label", string_literal("person")))).core == \
        HasLabelStep("person")
    assert map_to_instruction(
        classify(tp("e:label", string_literal("knows")))).core == \
        HasLabelStep("knows")


def test_map_pv2_binds_end_var():
    inst = map_to_instruction(classify(tp("v:name", Y)))
    assert inst.core == PropertiesStep("name")
    assert inst.end == MatchEndStep("y")


def test_map_eout():
    inst = map_to_instruction(classify(tp("e:knows", Y)))
    assert inst.steps() == (MatchStartStep("x"),
                            VertexStep("OUT", "knows"),
                            MatchEndStep("y"))


def test_object_perspective_gives_ein():
    case = from_object_perspective(classify(tp("e:knows", Y)))
    assert case.tag == EIN
    inst = map_to_instruction(case)
    assert inst.steps() == (MatchStartStep("y"),
                            VertexStep("IN", "knows"),
                            MatchEndStep("x"))


def test_object_perspective_only_for_edge_hops():
    with pytest.raises(ValueError):
        from_object_perspective(classify(tp("v:name", Y)))


def test_instruction_shapes_injective():
    # distinct (predicate, object-kind) pairs produce structurally distinct
    # instructions once variable names are normalized away
    pairs = [
        tp("v:label", string_literal("person")),
        tp("e:label", string_literal("knows")),
        tp("v:name", string_literal("person")),
        tp("e:weight", numeric_literal("1")),
        tp("v:name", Y),
        tp("e:weight", Y),
        tp("e:knows", Y),
    ]

    def shape(inst):
        core = inst.core
        return (type(core).__name__, getattr(core, "key", None),
                getattr(core, "label", None), getattr(core, "direction", None),
                inst.end.var is not None)

    shapes = [shape(map_to_instruction(classify(p))) for p in pairs]
    assert len(set(shapes)) == len(shapes)
