"""
Small complexes and posets shared by the test suite.
"""

import itertools
from typing import Dict, List, Tuple

from combifold.poset import Element, Poset
from combifold.simplicial import SimplicialComplex


def torus7() -> SimplicialComplex:
    """Seven-vertex torus."""
    facets = set()
    for i in range(7):
        facets.add(tuple(sorted((i, (i + 1) % 7, (i + 3) % 7))))
        facets.add(tuple(sorted((i, (i + 2) % 7, (i + 3) % 7))))
    return SimplicialComplex(sorted(facets))


def theta() -> SimplicialComplex:
    """Two vertices joined by three paths of length two."""
    return SimplicialComplex([[0, 2], [1, 2], [0, 3], [1, 3], [0, 4], [1, 4]])


def path_poset(edges: int, prefix: str = "") -> Poset:
    """Face poset of a path with vertices v0..vn and edges e1..en."""
    elements: List[Element] = [f"{prefix}v{i}" for i in range(edges + 1)]
    elements += [f"{prefix}e{i}" for i in range(1, edges + 1)]
    covers = []
    for i in range(1, edges + 1):
        covers.append((f"{prefix}v{i - 1}", f"{prefix}e{i}"))
        covers.append((f"{prefix}v{i}", f"{prefix}e{i}"))
    return Poset(elements, covers)


def edge_poset() -> Poset:
    """A single closed edge a - e - b."""
    return Poset(["a", "b", "e"], [("a", "e"), ("b", "e")])


def square_poset() -> Poset:
    """A square 2-cell with four vertices and four edges."""
    vertices = ["v0", "v1", "v2", "v3"]
    edges = ["e01", "e12", "e23", "e30"]
    covers = []
    for k, edge in enumerate(edges):
        covers.append((vertices[k], edge))
        covers.append((vertices[(k + 1) % 4], edge))
    covers.extend((edge, "F") for edge in edges)
    return Poset(vertices + edges + ["F"], covers)


def broken_poset() -> Poset:
    """A 2-cell glued onto a path: its boundary is not a circle."""
    covers = [("v0", "e01"), ("v1", "e01"), ("v1", "e12"), ("v2", "e12")]
    covers += [("e01", "F"), ("e12", "F")]
    return Poset(["v0", "v1", "v2", "e01", "e12", "F"], covers)


def collapse_path_map() -> Dict[Element, Element]:
    """path_poset(2) -> edge_poset(), squashing both edges onto e."""
    return {"v0": "a", "v1": "e", "v2": "b", "e1": "e", "e2": "e"}


def merge_at(poset: Poset, vertex: Element) -> Tuple[List[Element], List[Element]]:
    """
    Ball and boundary for merging the two edges of a 1-complex that meet at
    an interior vertex.
    """
    first, second = poset.upper_covers(vertex)
    ball = {first, second}
    for edge in (first, second):
        ball.update(poset.lower_covers(edge))
    boundary = [x for x in ball if poset.rank(x) == 0 and x != vertex]
    return sorted(ball, key=poset.index), boundary


def interior_vertices(poset: Poset) -> List[Element]:
    return [x for x in poset.elements if poset.rank(x) == 0 and len(poset.upper_covers(x)) == 2]


def simplex_faces(n: int) -> List[Tuple[int, ...]]:
    return [
        face for size in range(1, n + 2) for face in itertools.combinations(range(n + 1), size)
    ]
