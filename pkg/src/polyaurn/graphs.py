"""Finite simple graphs, Cartesian products, and random-walk urns.

A simple random walk on a graph is an urn: one ball, colours are vertices,
the activity of a vertex is its degree, and drawing a vertex moves the ball
to a uniformly random neighbour. The walk urn of a Cartesian product graph
is strictly isomorphic to the product of the factor walk urns, which
verify_walk_product checks constructively.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .algebra import product, strict_isomorphic
from .errors import InputError
from .urn import PolyaUrn, ReplacementMeasure, dirac, make_urn


@dataclass(frozen=True)
class SimpleGraph:
    vertex_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(
            self,
            "edges",
            frozenset((min(i, j), max(i, j)) for i, j in self.edges),
        )
        for i, j in self.edges:
            if i == j:
                raise InputError(f"loop at vertex {i}")
            if not 0 <= i < self.vertex_count or not 0 <= j < self.vertex_count:
                raise InputError(f"edge ({i}, {j}) outside 0..{self.vertex_count - 1}")

    def degree(self, v: int) -> int:
        return sum(1 for i, j in self.edges if v in (i, j))

    def neighbours(self, v: int) -> list[int]:
        out = [j if i == v else i for i, j in self.edges if v in (i, j)]
        return sorted(out)

    def to_json(self) -> dict:
        return {"vertices": self.vertex_count, "edges": sorted(map(list, self.edges))}

    @classmethod
    def from_json(cls, doc: dict) -> "SimpleGraph":
        try:
            n = int(doc["vertices"])
            edges = frozenset((int(i), int(j)) for i, j in doc["edges"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed graph document: {exc}") from exc
        return cls(n, edges)


def load_graph(path) -> SimpleGraph:
    try:
        with open(path) as fh:
            return SimpleGraph.from_json(json.load(fh))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def complete_graph(n: int) -> SimpleGraph:
    return SimpleGraph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def path_graph(n: int) -> SimpleGraph:
    return SimpleGraph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> SimpleGraph:
    return SimpleGraph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def star_graph(leaves: int) -> SimpleGraph:
    return SimpleGraph(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)))


def cartesian_product(g: SimpleGraph, g2: SimpleGraph) -> SimpleGraph:
    """Vertices are pairs flattened as v * |V'| + v'; (i, j) ~ (k, l) iff one
    coordinate is equal and the other pair is an edge."""
    n2 = g2.vertex_count
    edges = set()
    for i, k in g.edges:
        for j in range(n2):
            edges.add((i * n2 + j, k * n2 + j))
    for j, l in g2.edges:
        for i in range(g.vertex_count):
            edges.add((i * n2 + j, i * n2 + l))
    return SimpleGraph(g.vertex_count * n2, frozenset(edges))


def walk_urn(g: SimpleGraph, v0: int) -> PolyaUrn:
    """The one-ball urn realizing the simple random walk on g from v0.

    Isolated vertices get activity 0 with the inert measure; a walk started
    there is essentially extinct immediately.
    """
    if not 0 <= v0 < g.vertex_count:
        raise InputError(f"start vertex {v0} outside 0..{g.vertex_count - 1}")
    n = g.vertex_count
    measures = []
    activities = []
    for v in range(n):
        nbrs = g.neighbours(v)
        deg = len(nbrs)
        activities.append(Fraction(deg))
        if deg == 0:
            measures.append(dirac((0,) * n))
            continue
        atoms = []
        for w in nbrs:
            x = [0] * n
            x[v] -= 1
            x[w] += 1
            atoms.append((tuple(x), Fraction(1, deg)))
        measures.append(ReplacementMeasure(tuple(atoms)))
    initial = [1 if v == v0 else 0 for v in range(n)]
    labels = [f"v{v}" for v in range(n)]
    return make_urn(n, measures, activities, initial, labels)


def verify_walk_product(
    g: SimpleGraph, g2: SimpleGraph, v0: int, v0_2: int, cap: int = 64
):
    """Witness that product(walk(g, v0), walk(g2, v0_2)) is strictly
    isomorphic to the walk urn of the Cartesian product graph; with the
    shared lexicographic vertex order the identity is the expected witness."""
    lhs = product(walk_urn(g, v0), walk_urn(g2, v0_2))
    rhs = walk_urn(cartesian_product(g, g2), v0 * g2.vertex_count + v0_2)
    return strict_isomorphic(lhs, rhs, cap=cap)
