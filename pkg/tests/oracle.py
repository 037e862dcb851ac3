"""Independent oracles and random generators for engine testing.

The assignment oracle enumerates variable-to-candidate maps and filters by
the pattern-match conditions directly (variables map to constants, every
pattern edge maps to a graph edge, structure preserved). It shares no code
with the traversal engine's solver: different search order, different
candidate model, no traversers.
"""

from __future__ import annotations

import random
from collections import Counter
from decimal import Decimal

from s2g.graphs import Edge, PropertyGraph, Vertex
from s2g.ir import GraphStep, MatchStep, TraversalIR
from s2g.sst import (IN, OUT, HasLabelStep, HasStep, MatchEndStep,
                     MatchStartStep, PropertiesStep, SstInstruction, VertexStep)

# Vertex and edge vocabularies are disjoint so that label/property checks
# pin down the element kind on their own.
VERTEX_LABELS = ["person", "software", "place"]
EDGE_LABELS = ["knows", "created", "likes"]
VERTEX_KEYS = ["name", "age"]
EDGE_KEYS = ["weight", "since"]
NAMES = ["marko", "vadas", "josh", "lop"]
AGES = [Decimal(27), Decimal(29), Decimal(32)]
WEIGHTS = [Decimal("0.4"), Decimal("0.5"), Decimal(1)]


def random_pg(rng: random.Random, max_vertices: int = 12) -> PropertyGraph:
    n = rng.randint(2, max_vertices)
    vertices = []
    for vid in range(1, n + 1):
        props = {}
        if rng.random() < 0.8:
            props["name"] = rng.choice(NAMES)
        if rng.random() < 0.6:
            props["age"] = rng.choice(AGES)
        vertices.append(Vertex(vid, rng.choice(VERTEX_LABELS), props))
    edges = []
    for eid in range(n + 1, n + 1 + rng.randint(1, 2 * n)):
        props = {}
        if rng.random() < 0.6:
            props["weight"] = rng.choice(WEIGHTS)
        if rng.random() < 0.3:
            props["since"] = rng.choice(AGES)
        edges.append(Edge(eid, rng.randint(1, n), rng.choice(EDGE_LABELS),
                          rng.randint(1, n), props))
    return PropertyGraph(vertices, edges)


def _random_core(rng: random.Random, vertex_only: bool):
    kind = rng.randrange(4)
    if kind == 0:
        labels = VERTEX_LABELS if vertex_only else VERTEX_LABELS + EDGE_LABELS
        return HasLabelStep(rng.choice(labels)), False
    if kind == 1:
        if vertex_only or rng.random() < 0.6:
            key = rng.choice(VERTEX_KEYS)
            value = rng.choice(NAMES) if key == "name" else rng.choice(AGES)
        else:
            key = rng.choice(EDGE_KEYS)
            value = rng.choice(WEIGHTS) if key == "weight" else rng.choice(AGES)
        return HasStep(key, "eq", value), False
    if kind == 2:
        keys = VERTEX_KEYS if vertex_only else VERTEX_KEYS + EDGE_KEYS
        return PropertiesStep(rng.choice(keys)), True
    return VertexStep(rng.choice((OUT, IN)), rng.choice(EDGE_LABELS)), True


def random_match_ir(rng: random.Random, max_patterns: int = 4) -> TraversalIR:
    """MatchStep-only IR whose first pattern is vertex-rooted."""
    # alphabetical order matches introduction order, which keeps the
    # oracle's variable-by-variable enumeration well pruned
    var_pool = ["a", "b", "c", "d"]
    used = ["a"]
    patterns = []
    for index in range(rng.randint(1, max_patterns)):
        core, has_end = _random_core(rng, vertex_only=(index == 0))
        start = "a" if index == 0 else rng.choice(used)
        end = None
        if has_end:
            fresh = [v for v in var_pool if v not in used]
            candidates = used + fresh[:1]
            end = rng.choice(candidates)
            if end not in used:
                used.append(end)
        patterns.append(SstInstruction(MatchStartStep(start), core,
                                       MatchEndStep(end)))
    return TraversalIR((GraphStep(), MatchStep(tuple(patterns))))


# ---------------------------------------------------------------------------
# Assignment enumeration


def _value_eq(a, b) -> bool:
    if isinstance(a, Decimal) and isinstance(b, Decimal):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return isinstance(a, (Vertex, Edge)) and a == b and type(a) is type(b)


def _pattern_holds(pattern: SstInstruction, assignment: dict,
                   g: PropertyGraph, edge_set: set) -> bool:
    start = assignment[pattern.start.var]
    core = pattern.core
    end = assignment.get(pattern.end.var) if pattern.end.var else None
    if isinstance(core, HasLabelStep):
        return isinstance(start, (Vertex, Edge)) and start.label == core.label
    if isinstance(core, HasStep):
        return (isinstance(start, (Vertex, Edge))
                and core.key in start.props
                and _value_eq(start.props[core.key], core.value))
    if isinstance(core, PropertiesStep):
        if not isinstance(start, (Vertex, Edge)) or core.key not in start.props:
            return False
        return end is None or _value_eq(start.props[core.key], end)
    if isinstance(core, VertexStep):
        if not isinstance(start, Vertex) or not isinstance(end, Vertex):
            return False
        if core.direction == OUT:
            return (start.id, core.label, end.id) in edge_set
        return (end.id, core.label, start.id) in edge_set
    raise TypeError(core)


def enumerate_assignments(patterns, g: PropertyGraph) -> Counter:
    """Multiset of full variable assignments satisfying every pattern."""
    edge_set = {(e.src, e.label, e.dst) for e in g.edges.values()}
    variables: list[str] = []
    for pat in patterns:
        for name in pat.bound_vars():
            if name not in variables:
                variables.append(name)
    variables.sort()
    values = []
    seen_values = set()
    for el in g.elements():
        for v in el.props.values():
            marker = ("d", str(v)) if isinstance(v, Decimal) else ("s", v)
            if marker not in seen_values:
                seen_values.add(marker)
                values.append(v)
    domain = list(g.elements()) + values

    def checkable(bound: set[str]):
        return [p for p in patterns
                if set(p.bound_vars()) <= bound]

    results: Counter = Counter()

    def assign(index: int, current: dict, checked: set):
        if index == len(variables):
            row = tuple(current[name] for name in variables)
            results[_row_key(row)] += 1
            return
        name = variables[index]
        bound = set(variables[:index + 1])
        for candidate in domain:
            current[name] = candidate
            ok = True
            for pat in checkable(bound):
                if id(pat) in checked:
                    continue
                if not _pattern_holds(pat, current, g, edge_set):
                    ok = False
                    break
            if ok:
                newly = {id(p) for p in checkable(bound)}
                assign(index + 1, current, checked | newly)
        del current[name]

    assign(0, {}, set())
    return results


def _cell_key(value):
    if isinstance(value, Vertex):
        return ("v", value.id)
    if isinstance(value, Edge):
        return ("e", value.id)
    if isinstance(value, Decimal):
        return ("d", str(value.normalize()))
    return ("s", value)


def _row_key(row: tuple) -> tuple:
    return tuple(_cell_key(v) for v in row)


def result_counter(result) -> Counter:
    """Engine output rows keyed the same way as oracle assignments."""
    return Counter(_row_key(row) for row in result.rows)
