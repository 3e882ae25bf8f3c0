"""
Abstract simplicial complexes and combinatorial-manifold operations.

A complex is stored by its facets (maximal simplices) over integer vertex
ids. Everything else (faces, f-vector, stars, links, subdivisions, the face
poset) is derived on demand and cached, since complexes are immutable.
"""

import itertools
import logging
from collections import Counter, deque
from functools import cached_property
from typing import (
    TYPE_CHECKING,
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import networkx as nx

from .errors import DimensionError, InputError

if TYPE_CHECKING:
    from .poset import Poset
    from .recognition import Verdict

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


def _as_simplex(vertices: Iterable[int], field: str = "simplex") -> Simplex:
    """Normalize an iterable of vertex ids to a sorted tuple."""
    verts = list(vertices)
    for v in verts:
        if isinstance(v, bool) or not isinstance(v, int):
            raise InputError(f"vertex ids must be integers, got {v!r}", field)
    simplex = tuple(sorted(set(verts)))
    if len(simplex) != len(verts):
        raise InputError(f"repeated vertex in {verts}", field)
    return simplex


def _proper_faces(simplex: Simplex) -> Iterator[Simplex]:
    """Yield every nonempty proper face of a simplex."""
    for size in range(1, len(simplex)):
        yield from itertools.combinations(simplex, size)


class SimplicialComplex:
    """
    Finite abstract simplicial complex given by its facets.

    The complex {∅} (facets == [()]) is the (-1)-sphere: it is what the link
    of a facet and the order complex of the empty poset evaluate to. A complex
    with no facets at all is the void complex.

    Attributes:
        facets: Maximal simplices, sorted by (size, vertices)
        local_order: Optional pairs (u, v) meaning u < v; totally orders
            every simplex when present
        labels: Optional vertex -> label map (order complexes and subdivisions
            record which poset element or face a vertex stands for)
    """

    def __init__(
        self,
        facets: Iterable[Iterable[int]],
        local_order: Optional[Iterable[Tuple[int, int]]] = None,
        labels: Optional[Mapping[int, Hashable]] = None,
    ):
        normalized: Set[Simplex] = set()
        for i, facet in enumerate(facets):
            normalized.add(_as_simplex(facet, f"facets[{i}]"))

        if () in normalized and len(normalized) > 1:
            raise InputError("the empty simplex can only appear in the complex {∅}", "facets")

        # Repeated facets are dropped by the set; containment is an error.
        for facet in normalized:
            for face in _proper_faces(facet):
                if face in normalized:
                    raise InputError(
                        f"facet list is not an antichain: {list(face)} is contained in "
                        f"{list(facet)}",
                        "facets",
                    )

        self._init(normalized, local_order, labels)

    def _init(
        self,
        facets: Iterable[Simplex],
        local_order: Optional[Iterable[Tuple[int, int]]],
        labels: Optional[Mapping[int, Hashable]],
    ) -> None:
        self.facets: Tuple[Simplex, ...] = tuple(sorted(facets, key=lambda f: (len(f), f)))
        self.labels: Optional[Dict[int, Hashable]] = dict(labels) if labels is not None else None
        self.local_order: Optional[Tuple[Tuple[int, int], ...]] = None
        self._order_position: Optional[Dict[int, int]] = None
        if local_order is not None:
            self._set_local_order(local_order)

    @classmethod
    def from_antichain(
        cls,
        facets: Iterable[Simplex],
        local_order: Optional[Iterable[Tuple[int, int]]] = None,
        labels: Optional[Mapping[int, Hashable]] = None,
    ) -> "SimplicialComplex":
        """
        Build a complex from sorted facets already known to form an antichain.

        Used by constructions (order complexes, subdivisions) whose output is
        an antichain by construction, skipping the containment scan.
        """
        complex_ = cls.__new__(cls)
        complex_._init(set(facets), local_order, labels)
        return complex_

    def _set_local_order(self, pairs: Iterable[Tuple[int, int]]) -> None:
        checked = []
        known = set(self.vertices)
        for i, (u, v) in enumerate(pairs):
            for x in (u, v):
                if isinstance(x, bool) or not isinstance(x, int):
                    raise InputError(
                        f"vertex ids must be integers, got {x!r}", f"local_order[{i}]"
                    )
                if x not in known:
                    raise InputError(f"vertex {x} is not in the complex", f"local_order[{i}]")
            checked.append((u, v))
        pairs = tuple(checked)
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(pairs)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise InputError(f"local order has a cycle: {cycle}", "local_order")

        closure = nx.transitive_closure_dag(graph)
        for facet in self.facets:
            for u, v in itertools.combinations(facet, 2):
                if not (closure.has_edge(u, v) or closure.has_edge(v, u)):
                    raise InputError(
                        f"local order does not totally order simplex {list(facet)} "
                        f"({u} and {v} are incomparable)",
                        "local_order",
                    )

        linear = nx.lexicographical_topological_sort(graph)
        self.local_order = pairs
        self._order_position = {v: i for i, v in enumerate(linear)}

    # ------------------------------------------------------------------
    # Basic structure
    # ------------------------------------------------------------------

    @cached_property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted({v for facet in self.facets for v in facet}))

    @cached_property
    def dimension(self) -> int:
        if not self.facets:
            return -1
        return max(len(f) for f in self.facets) - 1

    @cached_property
    def faces(self) -> Dict[int, Tuple[Simplex, ...]]:
        """All nonempty faces grouped by dimension."""
        by_dim: Dict[int, Set[Simplex]] = {d: set() for d in range(self.dimension + 1)}
        for facet in self.facets:
            for size in range(1, len(facet) + 1):
                by_dim[size - 1].update(itertools.combinations(facet, size))
        return {d: tuple(sorted(s)) for d, s in by_dim.items()}

    @cached_property
    def _face_set(self) -> Set[Simplex]:
        return {face for group in self.faces.values() for face in group}

    def all_faces(self) -> List[Simplex]:
        """Nonempty faces ordered by (dimension, lexicographic vertices)."""
        return [face for d in sorted(self.faces) for face in self.faces[d]]

    def contains(self, simplex: Iterable[int]) -> bool:
        s = tuple(sorted(simplex))
        if not s:
            return bool(self.facets)
        return s in self._face_set

    def is_void(self) -> bool:
        return not self.facets

    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.faces[d]) for d in range(self.dimension + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.f_vector()))

    def ordered(self, simplex: Iterable[int]) -> Simplex:
        """Return a simplex listed in its local order (vertex order if none is set)."""
        s = tuple(sorted(simplex))
        if self._order_position is None:
            return s
        return tuple(sorted(s, key=self._order_position.__getitem__))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.facets == other.facets

    def __hash__(self) -> int:
        return hash(self.facets)

    def __repr__(self) -> str:
        return f"SimplicialComplex(dim={self.dimension}, f={self.f_vector()})"

    def _require_face(self, simplex: Iterable[int]) -> Simplex:
        s = _as_simplex(simplex)
        if not self.contains(s):
            raise InputError(f"{list(s)} is not a simplex of the complex", "simplex")
        return s

    # ------------------------------------------------------------------
    # Stars, links, joins, cones, boundaries
    # ------------------------------------------------------------------

    def star(self, simplex: Iterable[int]) -> "SimplicialComplex":
        """Closed star: all facets containing the simplex, with their faces."""
        s = set(self._require_face(simplex))
        return SimplicialComplex.from_antichain(f for f in self.facets if s.issubset(f))

    def link(self, simplex: Iterable[int]) -> "SimplicialComplex":
        """Link {t : t ∪ s ∈ K, t ∩ s = ∅}; {∅} when s is a facet."""
        s = set(self._require_face(simplex))
        return SimplicialComplex.from_antichain(
            tuple(v for v in f if v not in s) for f in self.facets if s.issubset(f)
        )

    def join(self, other: "SimplicialComplex") -> "SimplicialComplex":
        """Join with a complex on a disjoint vertex set."""
        shared = set(self.vertices) & set(other.vertices)
        if shared:
            raise InputError(f"join needs disjoint vertex sets, shared: {sorted(shared)}")
        return SimplicialComplex.from_antichain(
            tuple(sorted(f + g)) for f in self.facets for g in other.facets
        )

    def cone(self, apex: Optional[int] = None) -> "SimplicialComplex":
        """Cone from a new apex vertex (default: one past the largest vertex id)."""
        if apex is None:
            apex = self.next_vertex()
        elif apex in self.vertices:
            raise InputError(f"apex {apex} is already a vertex")
        return SimplicialComplex.from_antichain(tuple(sorted(f + (apex,))) for f in self.facets)

    def next_vertex(self) -> int:
        return self.vertices[-1] + 1 if self.vertices else 0

    def ridge_degrees(self) -> Counter:
        """Number of facets containing each codimension-1 face of a pure complex."""
        counts: Counter = Counter()
        for facet in self.facets:
            for i in range(len(facet)):
                counts[facet[:i] + facet[i + 1 :]] += 1
        return counts

    def boundary(self) -> "SimplicialComplex":
        """
        Boundary of a pure complex: codimension-1 faces lying in exactly one
        facet, closed under faces. Void when there are none.
        """
        self._require_pure()
        if self.dimension < 1:
            return SimplicialComplex([])
        ridges = [r for r, n in self.ridge_degrees().items() if n == 1]
        return SimplicialComplex.from_antichain(ridges)

    def _require_pure(self, dimension: Optional[int] = None) -> None:
        if not self.is_pure():
            sizes = sorted({len(f) - 1 for f in self.facets})
            raise DimensionError(f"complex is not pure (facet dimensions {sizes})")
        if dimension is not None and self.dimension != dimension:
            raise DimensionError(
                f"expected a pure complex of dimension {dimension}, got {self.dimension}"
            )

    def is_closed_pseudomanifold(self) -> bool:
        """Pure, and every codimension-1 face lies in exactly two facets."""
        if not self.is_pure() or self.dimension < 1:
            return False
        return all(n == 2 for n in self.ridge_degrees().values())

    def one_skeleton(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for facet in self.facets:
            graph.add_edges_from(itertools.combinations(facet, 2))
        return graph

    def is_connected(self) -> bool:
        if len(self.vertices) <= 1:
            return True
        return nx.is_connected(self.one_skeleton())

    def is_orientable(self) -> bool:
        """
        Orientability of a closed pseudomanifold (used for surfaces).

        Facet orientations are propagated across shared ridges; a conflict
        means the complex is not orientable.
        """
        if not self.is_closed_pseudomanifold():
            raise DimensionError("orientability is only defined here for closed pseudomanifolds")

        by_ridge: Dict[Simplex, List[Tuple[Simplex, int]]] = {}
        for facet in self.facets:
            for i in range(len(facet)):
                by_ridge.setdefault(facet[:i] + facet[i + 1 :], []).append((facet, i))

        sign: Dict[Simplex, int] = {}
        for start in self.facets:
            if start in sign:
                continue
            sign[start] = 1
            queue = deque([start])
            while queue:
                facet = queue.popleft()
                for i in range(len(facet)):
                    ridge = facet[:i] + facet[i + 1 :]
                    for other, j in by_ridge[ridge]:
                        if other == facet:
                            continue
                        # Induced orientations on the shared ridge must be opposite.
                        wanted = -sign[facet] * (-1) ** (i + j)
                        if other not in sign:
                            sign[other] = wanted
                            queue.append(other)
                        elif sign[other] != wanted:
                            return False
        return True

    # ------------------------------------------------------------------
    # Subdivisions and the face poset
    # ------------------------------------------------------------------

    def face_poset(self) -> "Poset":
        """Poset of nonempty faces ordered by inclusion."""
        from .poset import Poset

        faces = self.all_faces()
        covers = [
            (face[:i] + face[i + 1 :], face)
            for face in faces
            if len(face) > 1
            for i in range(len(face))
        ]
        return Poset(faces, covers)

    def barycentric_subdivision(self, iterations: int = 1) -> "SimplicialComplex":
        """
        Iterated barycentric subdivision sd_n K.

        sd_1 K is the order complex of the face poset; vertex i of the result
        stands for face i in (dimension, lexicographic) order, and the local
        order is the chain order (by face dimension).
        """
        if iterations < 0:
            raise InputError(f"iterations must be non-negative, got {iterations}", "iterations")
        result = self
        for step in range(iterations):
            result = result.face_poset().order_complex()
            logger.debug(f"sd_{step + 1}: f-vector {result.f_vector()}")
        return result

    def stellar_subdivide(self, simplex: Iterable[int]) -> "SimplicialComplex":
        """
        Stellar subdivision at a simplex of dimension >= 1.

        The star of s is replaced by the cone from a new vertex over
        ∂s * link(s).
        """
        s = self._require_face(simplex)
        if len(s) < 2:
            raise InputError(
                f"stellar subdivision needs a simplex of dimension >= 1, got {list(s)}"
            )

        apex = self.next_vertex()
        s_set = set(s)
        kept = [f for f in self.facets if not s_set.issubset(f)]
        added = [
            tuple(sorted(set(f) - {x} | {apex}))
            for f in self.facets
            if s_set.issubset(f)
            for x in s
        ]
        return SimplicialComplex.from_antichain(kept + added)

    # ------------------------------------------------------------------
    # Manifold recognition
    # ------------------------------------------------------------------

    def is_combinatorial_manifold(
        self,
        dimension: int,
        allow_boundary: bool = False,
        budget: Optional[int] = None,
    ) -> "Verdict":
        """
        Decide whether every vertex link is a PL (d-1)-sphere.

        With allow_boundary, a link may also be a (d-1)-ball. Unknown link
        verdicts propagate.

        Args:
            dimension: Expected dimension d of the pure complex
            allow_boundary: Accept ball links (manifolds with boundary)
            budget: Flip budget per link recognition

        Returns:
            Verdict with per-vertex witness on refutation

        Raises:
            DimensionError: If the complex is not pure of dimension d
        """
        from .recognition import Status, Verdict, is_ball, is_sphere, DEFAULT_FLIP_BUDGET

        self._require_pure(dimension)
        budget = DEFAULT_FLIP_BUDGET if budget is None else budget

        used = 0
        unknown: List[int] = []
        for v in self.vertices:
            link = self.link((v,))
            verdict = is_sphere(link, dimension - 1, budget=budget)
            if allow_boundary and verdict.status is not Status.VERIFIED:
                ball = is_ball(link, dimension - 1, budget=budget)
                if ball.status is Status.VERIFIED or verdict.status is Status.REFUTED:
                    verdict = ball
            used += verdict.budget_used
            if verdict.status is Status.REFUTED:
                logger.debug(f"vertex {v}: link refuted ({verdict.witness})")
                return Verdict.refuted(
                    {
                        "vertex": v,
                        "reason": "vertex link is not a sphere",
                        "link": verdict.to_dict(),
                    },
                    budget_used=used,
                )
            if verdict.status is Status.UNKNOWN:
                unknown.append(v)

        if unknown:
            return Verdict.unknown({"unresolved_vertices": unknown}, budget_used=used)
        return Verdict.verified(
            {"method": "vertex-links", "vertices": len(self.vertices)}, budget_used=used
        )


def simplex(vertices: Sequence[int]) -> SimplicialComplex:
    """The full simplex on the given vertices."""
    return SimplicialComplex([vertices])


def simplex_boundary(n: int) -> SimplicialComplex:
    """∂Δ^n on vertices 0..n (an (n-1)-sphere)."""
    if n < 1:
        raise InputError(f"∂Δ^n needs n >= 1, got {n}")
    return SimplicialComplex(itertools.combinations(range(n + 1), n))
