"""Solution multisets, the common result currency of both engines."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import Decimal

from .graphs import CANONICAL_ID_KEY, Edge, RdfTerm, Vertex, canonical_number


class _Unbound:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUND"


UNBOUND = _Unbound()

# A cell is one of: UNBOUND, a string, a Decimal, an RdfTerm (reference
# evaluator), or a Vertex/Edge element reference (traversal engine).
Cell = object


def cell_text(value: Cell) -> str:
    """Display text used by the TSV serialization (UNBOUND prints empty)."""
    if value is UNBOUND:
        return ""
    if isinstance(value, Decimal):
        return canonical_number(value)
    if isinstance(value, str):
        return value
    if isinstance(value, RdfTerm):
        if value.kind == "number":
            return canonical_number(value.number)
        return value.lexical
    if isinstance(value, (Vertex, Edge)):
        ident = value.props.get(CANONICAL_ID_KEY)
        if ident is not None:
            return cell_text(ident)
        return repr(value)
    return str(value)


@dataclass
class SolutionMultiset:
    columns: tuple[str, ...]
    rows: list[tuple]            # bag: repeated rows stay repeated

    def __len__(self):
        return len(self.rows)

    def counter(self) -> Counter:
        return Counter(self.rows)

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(cell_text(v) for v in row))
        return "\n".join(lines) + "\n"
