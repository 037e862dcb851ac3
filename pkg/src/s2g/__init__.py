"""SPARQL SELECT to Gremlin pattern-matching traversal compiler.

The pipeline: parse a query, classify each triple pattern into a
single-step traversal, assemble the traversal IR, and serialize it as
bytecode or Groovy text. Two small engines, a reference SPARQL evaluator
over RDF graphs and a traversal interpreter over property graphs, verify
every translation by multiset equivalence on paired datasets.
"""

from .ast import SparqlAst, get_all_bgps, pretty
from .emit import emit_bytecode, emit_groovy, parse_bytecode
from .engine import execute, execute_step
from .graphs import (PrefixRegistry, PropertyGraph, RdfGraph, load_ntriples,
                     load_pg, rdf_to_pg, serialize_ntriples, serialize_pg)
from .parser import parse
from .refeval import normalize, ref_evaluate
from .results import UNBOUND, SolutionMultiset
from .sst import classify, from_object_perspective, map_to_instruction
from .translate import apply_modifiers, translate

__all__ = [
    "SparqlAst", "get_all_bgps", "pretty",
    "emit_bytecode", "emit_groovy", "parse_bytecode",
    "execute", "execute_step",
    "PrefixRegistry", "PropertyGraph", "RdfGraph",
    "load_ntriples", "load_pg", "rdf_to_pg",
    "serialize_ntriples", "serialize_pg",
    "parse", "normalize", "ref_evaluate",
    "UNBOUND", "SolutionMultiset",
    "classify", "from_object_perspective", "map_to_instruction",
    "apply_modifiers", "translate",
]
