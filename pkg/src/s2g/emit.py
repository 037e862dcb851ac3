"""Serializers for the traversal IR.

Two formats: a bytecode-style instruction listing (canonical JSON, one
top-level array of step arrays, nested traversals marked by a leading
"__"), and a Gremlin-Groovy-flavored traversal string for inspection.
Both are deterministic byte-for-byte so they can back golden-file tests.
"""

from __future__ import annotations

import json
from decimal import Decimal

from .graphs import PropertyValue, canonical_number
from .ir import (ChooseStep, CountStep, DedupStep, GraphStep, GroupCountStep,
                 GroupStep, IrStep, MatchStep, OrderStep, Pred, PredAnd,
                 PredicateTree, RangeStep, SelectStep, TraversalIR,
                 UnionStep, WhereTraversalStep)
from .sst import (HasLabelStep, HasStep, PropertiesStep, SstInstruction,
                  VertexStep)

# ---------------------------------------------------------------------------
# Bytecode


def _sst_step_docs(sst: SstInstruction) -> list:
    docs: list = [["as", sst.start.var]]
    core = sst.core
    if isinstance(core, HasStep):
        docs.append(["has", core.key, core.op, core.value])
    elif isinstance(core, HasLabelStep):
        docs.append(["hasLabel", core.label])
    elif isinstance(core, PropertiesStep):
        docs.append(["values", core.key])
    elif isinstance(core, VertexStep):
        docs.append([core.direction.lower(), core.label])
    if sst.end.var is not None:
        docs.append(["as", sst.end.var])
    return docs


def _pred_doc(tree: PredicateTree) -> list:
    if isinstance(tree, Pred):
        if tree.var is not None:
            operand: object = ["var", tree.var]
        elif tree.iri_local is not None:
            operand = ["iri", tree.iri_local]
        else:
            operand = tree.value
        return ["__", ["select", tree.key], ["is", tree.op, operand]]
    op = "and" if isinstance(tree, PredAnd) else "or"
    return ["__", [op, *[_pred_doc(c) for c in tree.children]]]


def _step_docs(step: IrStep) -> list[list]:
    if isinstance(step, GraphStep):
        return [["V"]]
    if isinstance(step, SstInstruction):
        return _sst_step_docs(step)
    if isinstance(step, MatchStep):
        return [["match", *[["__", *_sst_step_docs(p)] for p in step.patterns]]]
    if isinstance(step, WhereTraversalStep):
        return [["where", _pred_doc(step.predicate)]]
    if isinstance(step, UnionStep):
        branches = [["__", *[doc for s in branch for doc in _step_docs(s)]]
                    for branch in step.branches]
        return [["union", *branches]]
    if isinstance(step, ChooseStep):
        sub = ["__", *[doc for s in step.sub for doc in _step_docs(s)]]
        return [["optional", sub]]
    if isinstance(step, SelectStep):
        return [["select", *step.keys]]
    if isinstance(step, DedupStep):
        return [["dedup", *step.keys]]
    if isinstance(step, RangeStep):
        return [["range", step.low, -1 if step.high is None else step.high]]
    if isinstance(step, OrderStep):
        flat: list = ["order"]
        for key, direction in step.keys:
            flat.extend([key, direction])
        return [flat]
    if isinstance(step, GroupStep):
        return [["group", step.key]]
    if isinstance(step, GroupCountStep):
        return [["groupCount", step.key]]
    if isinstance(step, CountStep):
        return [["count"]]
    raise TypeError(f"unknown IR step {step!r}")


def bytecode_doc(ir: TraversalIR) -> list:
    return [doc for step in ir.steps for doc in _step_docs(step)]


def _doc_text(doc) -> str:
    if isinstance(doc, list):
        return "[" + ",".join(_doc_text(d) for d in doc) + "]"
    if isinstance(doc, str):
        return json.dumps(doc, ensure_ascii=False)
    if isinstance(doc, Decimal):
        return canonical_number(doc)
    if isinstance(doc, int):
        return str(doc)
    raise TypeError(f"unserializable bytecode value {doc!r}")


def emit_bytecode(ir: TraversalIR) -> str:
    """Canonical one-line JSON text; parseable back into an equal doc."""
    return _doc_text(bytecode_doc(ir)) + "\n"


def parse_bytecode(text: str):
    return json.loads(text, parse_float=Decimal)


# ---------------------------------------------------------------------------
# Groovy


def _quote(text: str) -> str:
    out = text.replace("\\", "\\\\").replace("'", "\\'")
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f"'{out}'"


def _value_text(value: PropertyValue) -> str:
    if isinstance(value, Decimal):
        return canonical_number(value)
    return _quote(value)


def _pred_groovy(tree: PredicateTree) -> str:
    if isinstance(tree, Pred):
        if tree.var is not None:
            operand = f"select({_quote(tree.var)})"
        elif tree.iri_local is not None:
            operand = f"iri({_quote(tree.iri_local)})"
        else:
            operand = _value_text(tree.value)
        return f"__.select({_quote(tree.key)}).is({tree.op}({operand}))"
    op = "and" if isinstance(tree, PredAnd) else "or"
    return f"__.{op}({', '.join(_pred_groovy(c) for c in tree.children)})"


def _sst_groovy(sst: SstInstruction) -> str:
    parts = [f".as({_quote(sst.start.var)})"]
    core = sst.core
    if isinstance(core, HasStep):
        parts.append(f".has({_quote(core.key)},{_value_text(core.value)})")
    elif isinstance(core, HasLabelStep):
        parts.append(f".hasLabel({_quote(core.label)})")
    elif isinstance(core, PropertiesStep):
        parts.append(f".values({_quote(core.key)})")
    elif isinstance(core, VertexStep):
        parts.append(f".{core.direction.lower()}({_quote(core.label)})")
    if sst.end.var is not None:
        parts.append(f".as({_quote(sst.end.var)})")
    return "".join(parts)


def _step_groovy(step: IrStep) -> str:
    if isinstance(step, GraphStep):
        return "g.V()"
    if isinstance(step, SstInstruction):
        return _sst_groovy(step)
    if isinstance(step, MatchStep):
        inner = ", ".join("__" + _sst_groovy(p) for p in step.patterns)
        return f".match({inner})"
    if isinstance(step, WhereTraversalStep):
        return f".where({_pred_groovy(step.predicate)})"
    if isinstance(step, UnionStep):
        branches = ", ".join("__" + "".join(_step_groovy(s) for s in branch)
                             for branch in step.branches)
        return f".union({branches})"
    if isinstance(step, ChooseStep):
        sub = "__" + "".join(_step_groovy(s) for s in step.sub)
        return f".optional({sub})"
    if isinstance(step, SelectStep):
        return f".select({','.join(_quote(k) for k in step.keys)})"
    if isinstance(step, DedupStep):
        return f".dedup({','.join(_quote(k) for k in step.keys)})"
    if isinstance(step, RangeStep):
        high = -1 if step.high is None else step.high
        return f".range({step.low},{high})"
    if isinstance(step, OrderStep):
        bys = "".join(f".by({_quote(k)}, {d})" for k, d in step.keys)
        return f".order(){bys}"
    if isinstance(step, GroupStep):
        return f".group().by({_quote(step.key)})"
    if isinstance(step, GroupCountStep):
        return f".groupCount().by({_quote(step.key)})"
    if isinstance(step, CountStep):
        return ".count()"
    raise TypeError(f"unknown IR step {step!r}")


def emit_groovy(ir: TraversalIR) -> str:
    """Single-line traversal text beginning at g.V()."""
    return "".join(_step_groovy(step) for step in ir.steps)
