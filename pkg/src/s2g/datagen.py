"""Synthetic dataset generator.

Produces N-Triples text over the same vocabulary as the bundled toy graph
(persons with name/age, software with name/lang, knows/created edges), so
one query corpus runs unchanged against graphs of any size. The six crew
vertices are always present, which keeps constant-valued filters in the
corpus satisfiable at every scale.
"""

from __future__ import annotations

import random

LANGS = ("java", "python", "go", "rust", "scala")

_CREW = [
    ("marko", "person", [("v:name", '"marko"'), ("v:age", "29")]),
    ("vadas", "person", [("v:name", '"vadas"'), ("v:age", "27")]),
    ("josh", "person", [("v:name", '"josh"'), ("v:age", "32")]),
    ("peter", "person", [("v:name", '"peter"'), ("v:age", "35")]),
    ("lop", "software", [("v:name", '"lop"'), ("v:lang", '"java"')]),
    ("ripple", "software", [("v:name", '"ripple"'), ("v:lang", '"java"')]),
]

_CREW_EDGES = [
    ("marko", "e:knows", "vadas"),
    ("marko", "e:knows", "josh"),
    ("marko", "e:created", "lop"),
    ("josh", "e:created", "ripple"),
    ("josh", "e:created", "lop"),
    ("peter", "e:created", "lop"),
]


def random_graph_nt(n_vertices: int = 1000, seed: int = 7) -> str:
    """Crew graph padded with random persons and software to n_vertices."""
    if n_vertices < 6:
        raise ValueError("need at least the 6 crew vertices")
    rng = random.Random(seed)
    lines: list[str] = []
    persons: list[str] = []
    software: list[str] = []
    for name, label, props in _CREW:
        (persons if label == "person" else software).append(name)
        lines.append(f"<{name}> <v:label> \"{label}\" .")
        for pred, obj in props:
            lines.append(f"<{name}> <{pred}> {obj} .")
    extra = n_vertices - 6
    n_soft = extra * 3 // 10
    n_pers = extra - n_soft
    for i in range(n_pers):
        name = f"person{i}"
        persons.append(name)
        lines.append(f"<{name}> <v:label> \"person\" .")
        lines.append(f"<{name}> <v:name> \"{name}\" .")
        lines.append(f"<{name}> <v:age> {rng.randint(18, 70)} .")
    for i in range(n_soft):
        name = f"sw{i}"
        software.append(name)
        lines.append(f"<{name}> <v:label> \"software\" .")
        lines.append(f"<{name}> <v:name> \"{name}\" .")
        lines.append(f"<{name}> <v:lang> \"{rng.choice(LANGS)}\" .")
    for s, p, o in _CREW_EDGES:
        lines.append(f"<{s}> <{p}> <{o}> .")
    for src in persons:
        for dst in rng.sample(persons, k=min(len(persons), rng.randint(0, 3))):
            if dst != src:
                lines.append(f"<{src}> <e:knows> <{dst}> .")
        if software and rng.random() < 0.7:
            for dst in rng.sample(software, k=min(len(software), rng.randint(1, 2))):
                lines.append(f"<{src}> <e:created> <{dst}> .")
    return "\n".join(lines) + "\n"
