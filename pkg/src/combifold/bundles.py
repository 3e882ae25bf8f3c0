"""
Bundle-building constructions: colorings of locally ordered triangulations,
prismatic decompositions of assembly chains, the Gauss tangent functor and
the total space of its diagram.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .assembly import Assembly, identity, verify_assembly
from .ballcomplex import BallComplex, validate
from .config import DEFAULT_FLIP_BUDGET
from .errors import DimensionError, InputError
from .poset import Element, Poset, PosetDiagram, format_id, grothendieck_total
from .recognition import Status, Verdict
from .simplicial import Simplex, SimplicialComplex, simplex

logger = logging.getLogger(__name__)

MARK = "M"

Edge = Tuple[int, int]


# ----------------------------------------------------------------------
# Colorings
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Coloring:
    """
    A locally ordered triangulation colored by ball complexes.

    Attributes:
        base: Simplicial complex with a local order
        vertex_label: Vertex -> ball complex
        edge_label: Oriented edge (u, v), u before v -> assembly label(u) -> label(v)
    """

    base: SimplicialComplex
    vertex_label: Dict[int, BallComplex]
    edge_label: Dict[Edge, Assembly] = field(default_factory=dict)

    def oriented_edges(self) -> List[Edge]:
        return [
            (edge[0], edge[1])
            for edge in (self.base.ordered(e) for e in self.base.faces.get(1, ()))
        ]

    def oriented_triangles(self) -> List[Tuple[int, int, int]]:
        return [
            (t[0], t[1], t[2])
            for t in (self.base.ordered(f) for f in self.base.faces.get(2, ()))
        ]


def validate_coloring(coloring: Coloring) -> Verdict:
    """
    Check endpoint labels on every edge and commutativity on every 2-simplex.

    Returns:
        Verified, or Refuted with the first offending edge or 2-simplex

    Raises:
        InputError: If the base carries no local order
    """
    base = coloring.base
    if base.local_order is None:
        raise InputError("coloring base has no local order", "local_order")

    for v in base.vertices:
        if v not in coloring.vertex_label:
            return Verdict.refuted({"reason": "unlabeled vertex", "vertex": v})

    edges = coloring.oriented_edges()
    for u, v in edges:
        label = coloring.edge_label.get((u, v))
        if label is None:
            return Verdict.refuted({"reason": "unlabeled edge", "edge": [u, v]})
        if (
            label.source.poset != coloring.vertex_label[u].poset
            or label.target.poset != coloring.vertex_label[v].poset
        ):
            return Verdict.refuted({"reason": "edge label endpoints do not match", "edge": [u, v]})
        if label.verdict.status is Status.REFUTED:
            return Verdict.refuted({"reason": "edge label is not an assembly", "edge": [u, v]})

    triangles = coloring.oriented_triangles()
    for u, v, w in triangles:
        first, second = coloring.edge_label[(u, v)], coloring.edge_label[(v, w)]
        direct = coloring.edge_label[(u, w)].mapping
        composite = second.compose_map(first)
        for x in coloring.vertex_label[u].elements:
            if composite[x] != direct[x]:
                return Verdict.refuted(
                    {
                        "reason": "triangle does not commute",
                        "simplex": [u, v, w],
                        "element": format_id(x),
                        "composite": format_id(composite[x]),
                        "direct": format_id(direct[x]),
                    }
                )

    unknown = [
        list(e) for e in edges if coloring.edge_label[e].verdict.status is Status.UNKNOWN
    ]
    witness = {"vertices": len(base.vertices), "edges": len(edges), "triangles": len(triangles)}
    if unknown:
        return Verdict.unknown({**witness, "unproven_edges": unknown})
    return Verdict.verified(witness)


def constant_coloring(base: SimplicialComplex, label: BallComplex) -> Coloring:
    """Every vertex labeled by the same complex, every edge by its identity."""
    if base.local_order is None:
        order = [(e[0], e[1]) for e in base.faces.get(1, ())]
        base = SimplicialComplex(base.facets, local_order=order, labels=base.labels)
    unit = identity(label)
    edges = {(e[0], e[1]): unit for e in (base.ordered(f) for f in base.faces.get(1, ()))}
    return Coloring(base, {v: label for v in base.vertices}, edges)


# ----------------------------------------------------------------------
# Prismatic decomposition
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrismChain:
    """
    A chain Q_0 -> Q_1 -> ... -> Q_m of assemblies.

    Raises:
        InputError: If the number of steps is wrong or endpoints do not chain
    """

    complexes: Tuple[BallComplex, ...]
    steps: Tuple[Assembly, ...] = ()

    def __post_init__(self) -> None:
        if not self.complexes:
            raise InputError("a prism chain needs at least one complex", "complexes")
        if len(self.steps) != len(self.complexes) - 1:
            raise InputError(
                f"{len(self.complexes)} complexes need {len(self.complexes) - 1} steps, "
                f"got {len(self.steps)}",
                "steps",
            )
        for i, step in enumerate(self.steps):
            if step.source.poset != self.complexes[i].poset:
                raise InputError(f"step {i} does not start at complex {i}", f"steps[{i}]")
            if step.target.poset != self.complexes[i + 1].poset:
                raise InputError(f"step {i} does not end at complex {i + 1}", f"steps[{i}]")

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(s.verdict for s in self.steps)

    def composite(self, start: int, stop: int) -> Dict[Element, Element]:
        """Composite cell map Q_start -> Q_stop (start <= stop)."""
        mapping = {x: x for x in self.complexes[start].elements}
        for step in self.steps[start:stop]:
            mapping = {x: step.mapping[y] for x, y in mapping.items()}
        return mapping


@dataclass(frozen=True, eq=False)
class PrismComplex:
    """
    Result of prism_complex.

    Attributes:
        complex: The ball complex T(Q) on pairs (k, B)
        projection: (k, B) -> k, a cell of the face poset of Δ^m
        base: Face poset of Δ^m
    """

    complex: BallComplex
    projection: Dict[Element, Simplex]
    base: Poset


def prism_complex(
    chain: PrismChain,
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
) -> PrismComplex:
    """
    Prismatic decomposition of a chain of assemblies.

    Cells are pairs (k, B) with k a nonempty subset of {0..m} and B a cell
    of Q_max(k); (k0, B0) <= (k1, B1) iff k0 ⊆ k1 and the image of B0 in
    Q_max(k1) lies below B1.

    Raises:
        RefutedError: If some step is refuted or the result is not a ball complex
    """
    chain.verdict.require(strict, what="prism chain")
    m = chain.length
    subsets: List[Simplex] = [
        k for size in range(1, m + 2) for k in itertools.combinations(range(m + 1), size)
    ]
    composites = {(i, j): chain.composite(i, j) for i in range(m + 1) for j in range(i, m + 1)}

    elements: List[Element] = [(k, b) for k in subsets for b in chain.complexes[k[-1]].elements]
    relations = []
    for k0, k1 in itertools.product(subsets, repeat=2):
        if k0 == k1 or not set(k0) <= set(k1):
            continue
        image = composites[(k0[-1], k1[-1])]
        top = chain.complexes[k1[-1]].poset
        for b0 in chain.complexes[k0[-1]].elements:
            above = top.up(image[b0])
            relations.extend(((k0, b0), (k1, b1)) for b1 in above)
    for k in subsets:
        relations.extend(((k, a), (k, b)) for a, b in chain.complexes[k[-1]].poset.covers)

    result = validate(Poset(elements, relations), strict=strict, budget=budget, threads=threads)
    base = simplex(range(m + 1)).face_poset()
    logger.info(f"prism complex over a {m}-step chain: {len(result)} cells, f={result.f_vector()}")
    return PrismComplex(result, {e: e[0] for e in elements}, base)


# ----------------------------------------------------------------------
# Gauss functor
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TangentTotal:
    """
    Total space of the Gauss diagram.

    Attributes:
        poset: Grothendieck total poset on pairs (face, cell)
        complex: Its order complex
        projection: Pair -> base face
    """

    poset: Poset
    complex: SimplicialComplex
    projection: Dict[Element, Element]


class GaussFunctor:
    """
    The Gauss functor of a closed combinatorial n-manifold.

    G(s) is the face poset of the closed star of s with one marked n-cell
    glued along ∂s * link(s); G(s0 ⊂ s1) keeps the cells of star(s0) that lie
    in star(s1) and sends every other cell into the marked cell.
    """

    def __init__(
        self, manifold: SimplicialComplex, budget: int = DEFAULT_FLIP_BUDGET, threads: int = 1
    ):
        if not manifold.is_pure() or manifold.dimension < 1:
            raise DimensionError("the Gauss functor needs a pure manifold of dimension >= 1")
        self.manifold = manifold
        self.dimension = manifold.dimension
        self.budget = budget
        self.threads = threads
        self.verdict = manifold.is_combinatorial_manifold(self.dimension, budget=budget)
        self.verdict.require(strict=True, what="closed combinatorial manifold check")
        self._objects: Dict[Simplex, BallComplex] = {}
        self._morphisms: Dict[Tuple[Simplex, Simplex], Assembly] = {}

    def _face(self, face: Sequence[int]) -> Simplex:
        s = tuple(sorted(face))
        if not s or not self.manifold.contains(s):
            raise InputError(f"{list(s)} is not a face of the manifold", "simplex")
        return s

    def object(self, face: Sequence[int]) -> BallComplex:
        """Marked n-sphere ball complex G(s)."""
        s = self._face(face)
        if s not in self._objects:
            star = self.manifold.star(s)
            cells: List[Element] = list(star.all_faces())
            covers = [
                (c[:i] + c[i + 1 :], c)
                for c in star.all_faces()
                if len(c) > 1
                for i in range(len(c))
            ]
            rim = {
                tuple(v for v in f if v != x)
                for f in self.manifold.facets
                if set(s) <= set(f)
                for x in s
            }
            covers.extend((r, MARK) for r in sorted(rim))
            poset = Poset(cells + [MARK], covers)
            self._objects[s] = validate(
                poset, budget=self.budget, threads=self.threads, marked=MARK
            )
            logger.debug(f"G({list(s)}): {self._objects[s]!r}")
        return self._objects[s]

    def morphism_map(self, smaller: Sequence[int], larger: Sequence[int]) -> Dict[Element, Element]:
        s0, s1 = self._face(smaller), self._face(larger)
        if not set(s0) <= set(s1):
            raise InputError(f"{list(s0)} is not a face of {list(s1)}", "simplex")
        mapping: Dict[Element, Element] = {}
        for cell in self.object(s0).elements:
            if cell == MARK:
                mapping[cell] = MARK
            else:
                mapping[cell] = cell if self.manifold.contains(set(cell) | set(s1)) else MARK
        return mapping

    def morphism(self, smaller: Sequence[int], larger: Sequence[int]) -> Assembly:
        """The marked assembly G(s0 ⊂ s1): G(s0) -> G(s1)."""
        key = (self._face(smaller), self._face(larger))
        if key not in self._morphisms:
            mapping = self.morphism_map(*key)
            self._morphisms[key] = verify_assembly(
                mapping,
                self.object(key[0]),
                self.object(key[1]),
                budget=self.budget,
                threads=self.threads,
            )
        return self._morphisms[key]

    def diagram(self) -> PosetDiagram:
        """
        The functor as a diagram over the face poset ordered by inclusion, with
        transitions G(s0 ⊂ s1) on covers. Arrows of the indexing category run
        from a face to the faces containing it, so no opposite is taken here.
        """
        base = self.manifold.face_poset()
        fibers = {s: self.object(s).poset for s in base.elements}
        transitions = {(a, b): self.morphism_map(a, b) for a, b in base.covers}
        return PosetDiagram(base, fibers, transitions)

    def coloring(self) -> Coloring:
        """
        Coloring of sd_1 M: vertex i (standing for face s_i) is labeled G(s_i);
        an edge runs from the smaller face to the larger one, matching the
        direction of G(s0 ⊂ s1).
        """
        base = self.manifold.barycentric_subdivision(1)
        assert base.labels is not None
        labels = {v: self.object(base.labels[v]) for v in base.vertices}
        edges: Dict[Edge, Assembly] = {}
        for e in base.faces.get(1, ()):
            u, v = base.ordered(e)
            edges[(u, v)] = self.morphism(base.labels[u], base.labels[v])
        return Coloring(base, labels, edges)

    def total(self) -> TangentTotal:
        total = grothendieck_total(self.diagram())
        complex_ = total.order_complex()
        logger.info(
            f"tangent total of a {self.dimension}-manifold: {len(total)} cells, "
            f"χ = {complex_.euler_characteristic()}"
        )
        return TangentTotal(total, complex_, {e: e[0] for e in total.elements})


def gauss_object(
    manifold: SimplicialComplex, face: Sequence[int], budget: int = DEFAULT_FLIP_BUDGET
) -> BallComplex:
    return GaussFunctor(manifold, budget=budget).object(face)


def gauss_morphism(
    manifold: SimplicialComplex,
    smaller: Sequence[int],
    larger: Sequence[int],
    budget: int = DEFAULT_FLIP_BUDGET,
) -> Assembly:
    return GaussFunctor(manifold, budget=budget).morphism(smaller, larger)


def gauss_coloring(manifold: SimplicialComplex, budget: int = DEFAULT_FLIP_BUDGET) -> Coloring:
    return GaussFunctor(manifold, budget=budget).coloring()


def tangent_total(
    manifold: SimplicialComplex, budget: int = DEFAULT_FLIP_BUDGET, threads: int = 1
) -> TangentTotal:
    return GaussFunctor(manifold, budget=budget, threads=threads).total()


def chain_from_steps(steps: Sequence[Assembly]) -> PrismChain:
    """Prism chain whose complexes are read off a nonempty list of steps."""
    if not steps:
        raise InputError("need at least one step", "steps")
    complexes = [steps[0].source] + [s.target for s in steps]
    return PrismChain(tuple(complexes), tuple(steps))

