"""
Finite posets, ideals, ranks, order complexes, and the Grothendieck total
poset of a poset-indexed diagram of posets.

Element ids are opaque hashables (strings, integers, or tuples built by the
constructions in this package). Internally every poset is densely indexed in
the order its elements were given; that order is kept in every output, which
is what makes golden files reproducible.
"""

import logging
from functools import cached_property
from typing import (
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import networkx as nx
import numpy as np

from .config import DEFAULT_ENUMERATION_BUDGET
from .errors import BudgetExceededError, FunctorialityError, InputError
from .simplicial import SimplicialComplex

logger = logging.getLogger(__name__)

Element = Hashable
ElementMap = Dict[Element, Element]


def format_id(element: Element) -> str:
    """
    Printable id of an element.

    Strings and integers print as themselves; tuples (faces, Grothendieck
    pairs) print as "(a|b|...)" with their parts formatted recursively.
    """
    if isinstance(element, tuple):
        return "(" + "|".join(format_id(part) for part in element) + ")"
    return str(element)


class Poset:
    """
    Finite partially ordered set.

    The order is the reflexive-transitive closure of the generating relation
    passed at construction; it is computed eagerly into a boolean matrix
    (``leq_matrix[i, j]`` is True iff element i <= element j).

    Attributes:
        elements: Element ids in construction order
        covers: Cover pairs (a, b), "a is covered by b", in index order
    """

    def __init__(
        self,
        elements: Iterable[Element],
        relations: Iterable[Tuple[Element, Element]] = (),
    ):
        elements = tuple(elements)
        index: Dict[Element, int] = {}
        for i, element in enumerate(elements):
            if element in index:
                raise InputError(f"duplicate element id {format_id(element)!r}", f"elements[{i}]")
            index[element] = i

        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(elements)))
        for k, pair in enumerate(relations):
            a, b = pair
            for end in (a, b):
                if end not in index:
                    raise InputError(
                        f"unknown element id {format_id(end)!r}", f"covers[{k}]"
                    )
            if a != b:
                graph.add_edge(index[a], index[b])

        if not nx.is_directed_acyclic_graph(graph):
            cycle = [
                (format_id(elements[u]), format_id(elements[v])) for u, v in nx.find_cycle(graph)
            ]
            raise InputError(f"cover relation has a directed cycle: {cycle}", "covers")

        leq = np.eye(len(elements), dtype=bool)
        for node in reversed(list(nx.topological_sort(graph))):
            for succ in graph.successors(node):
                leq[node] |= leq[succ]

        self._setup(elements, index, leq)

    def _setup(
        self, elements: Tuple[Element, ...], index: Dict[Element, int], leq: np.ndarray
    ) -> None:
        leq.setflags(write=False)
        self.elements: Tuple[Element, ...] = elements
        self._index = index
        self.leq_matrix: np.ndarray = leq

    @classmethod
    def from_matrix(cls, elements: Sequence[Element], leq: np.ndarray) -> "Poset":
        """Build a poset from a closed order matrix (reflexive, transitive, antisymmetric)."""
        elements = tuple(elements)
        poset = cls.__new__(cls)
        poset._setup(elements, {e: i for i, e in enumerate(elements)}, np.array(leq, dtype=bool))
        return poset

    # ------------------------------------------------------------------
    # Relation queries
    # ------------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __contains__(self, element: object) -> bool:
        try:
            return element in self._index
        except TypeError:
            return False

    def __repr__(self) -> str:
        return f"Poset({len(self)} elements, {len(self.covers)} covers)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        if set(self.elements) != set(other.elements):
            return False
        perm = [other._index[e] for e in self.elements]
        return bool(np.array_equal(self.leq_matrix, other.leq_matrix[np.ix_(perm, perm)]))

    def __hash__(self) -> int:
        return hash(frozenset(self.elements))

    def index(self, element: Element) -> int:
        try:
            return self._index[element]
        except (KeyError, TypeError):
            raise InputError(f"unknown element id {format_id(element)!r}")

    def leq(self, a: Element, b: Element) -> bool:
        return bool(self.leq_matrix[self.index(a), self.index(b)])

    def lt(self, a: Element, b: Element) -> bool:
        return a != b and self.leq(a, b)

    def down(self, element: Element, strict: bool = False) -> List[Element]:
        i = self.index(element)
        column = self.leq_matrix[:, i]
        return [e for j, e in enumerate(self.elements) if column[j] and not (strict and j == i)]

    def up(self, element: Element, strict: bool = False) -> List[Element]:
        i = self.index(element)
        row = self.leq_matrix[i]
        return [e for j, e in enumerate(self.elements) if row[j] and not (strict and j == i)]

    @cached_property
    def _strict_matrix(self) -> np.ndarray:
        return self.leq_matrix & ~np.eye(len(self), dtype=bool)

    @cached_property
    def _cover_matrix(self) -> np.ndarray:
        lt = self._strict_matrix.astype(np.int64)
        return self._strict_matrix & ~((lt @ lt) > 0)

    @cached_property
    def covers(self) -> Tuple[Tuple[Element, Element], ...]:
        rows, cols = np.nonzero(self._cover_matrix)
        return tuple((self.elements[i], self.elements[j]) for i, j in zip(rows, cols))

    def lower_covers(self, element: Element) -> List[Element]:
        """Elements covered by the given element."""
        column = self._cover_matrix[:, self.index(element)]
        return [e for j, e in enumerate(self.elements) if column[j]]

    def upper_covers(self, element: Element) -> List[Element]:
        row = self._cover_matrix[self.index(element)]
        return [e for j, e in enumerate(self.elements) if row[j]]

    def maximal_elements(self) -> List[Element]:
        has_above = self._strict_matrix.any(axis=1)
        return [e for j, e in enumerate(self.elements) if not has_above[j]]

    def minimal_elements(self) -> List[Element]:
        has_below = self._strict_matrix.any(axis=0)
        return [e for j, e in enumerate(self.elements) if not has_below[j]]

    def cover_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.elements)
        graph.add_edges_from(self.covers)
        return graph

    # ------------------------------------------------------------------
    # Derived posets
    # ------------------------------------------------------------------

    def induced(self, subset: Iterable[Element]) -> "Poset":
        """Induced subposet; elements keep their relative order."""
        wanted = {self.index(e) for e in subset}
        keep = [i for i in range(len(self)) if i in wanted]
        return Poset.from_matrix(
            [self.elements[i] for i in keep], self.leq_matrix[np.ix_(keep, keep)]
        )

    def lower_ideal(self, element: Element, strict: bool = False) -> "Poset":
        """Induced subposet on {x : x <= p} (or x < p when strict)."""
        return self.induced(self.down(element, strict=strict))

    def opposite(self) -> "Poset":
        """The same elements with the order reversed."""
        return Poset.from_matrix(self.elements, self.leq_matrix.T)

    def relabel(self, mapping: Mapping[Element, Element]) -> "Poset":
        """Rename elements through an injective mapping (missing ids are kept)."""
        renamed = [mapping.get(e, e) for e in self.elements]
        if len(set(renamed)) != len(renamed):
            raise InputError("relabeling is not injective")
        return Poset.from_matrix(renamed, self.leq_matrix)

    def is_isomorphic(self, other: "Poset") -> bool:
        if len(self) != len(other) or len(self.covers) != len(other.covers):
            return False
        return nx.is_isomorphic(self.cover_graph(), other.cover_graph())

    # ------------------------------------------------------------------
    # Ranks and chains
    # ------------------------------------------------------------------

    @cached_property
    def ranks(self) -> Dict[Element, int]:
        """Length of the longest chain below each element (minimal elements have rank 0)."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self)))
        rows, cols = np.nonzero(self._cover_matrix)
        graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
        rank = [0] * len(self)
        for node in nx.topological_sort(graph):
            for succ in graph.successors(node):
                rank[succ] = max(rank[succ], rank[node] + 1)
        return {e: rank[i] for i, e in enumerate(self.elements)}

    def rank(self, element: Element) -> int:
        self.index(element)
        return self.ranks[element]

    @property
    def height(self) -> int:
        """Largest rank; -1 for the empty poset."""
        return max(self.ranks.values(), default=-1)

    def maximal_chains(self) -> Iterator[Tuple[int, ...]]:
        """Maximal chains as index tuples, bottom first (saturated cover paths)."""
        above = [np.nonzero(self._cover_matrix[i])[0].tolist() for i in range(len(self))]
        below_any = self._strict_matrix.any(axis=0)

        def extend(chain: List[int]) -> Iterator[Tuple[int, ...]]:
            succ = above[chain[-1]]
            if not succ:
                yield tuple(chain)
                return
            for j in succ:
                chain.append(j)
                yield from extend(chain)
                chain.pop()

        for i in range(len(self)):
            if not below_any[i]:
                yield from extend([i])

    def order_complex(self) -> SimplicialComplex:
        """
        Simplicial complex of chains.

        Vertex i is element i (recorded in ``labels``); the local order is the
        chain order, given by the cover relation. The empty poset yields {∅}.
        """
        if not len(self):
            return SimplicialComplex([()])
        facets = {tuple(sorted(chain)) for chain in self.maximal_chains()}
        rows, cols = np.nonzero(self._cover_matrix)
        return SimplicialComplex.from_antichain(
            facets,
            local_order=list(zip(rows.tolist(), cols.tolist())),
            labels={i: e for i, e in enumerate(self.elements)},
        )


def lower_ideal(poset: Poset, element: Element, strict: bool = False) -> Poset:
    return poset.lower_ideal(element, strict=strict)


def rank(poset: Poset, element: Element) -> int:
    return poset.rank(element)


def opposite(poset: Poset) -> Poset:
    return poset.opposite()


def order_complex(poset: Poset) -> SimplicialComplex:
    return poset.order_complex()


def find_monotonicity_violation(
    mapping: Mapping[Element, Element], source: Poset, target: Poset
) -> Optional[Tuple[Element, Element]]:
    """
    Return a pair a <= b with f(a) not <= f(b), or None if f is monotone.

    Raises:
        InputError: If the map is not total on the source or leaves the target
    """
    missing = [e for e in source.elements if e not in mapping]
    if missing:
        raise InputError(f"map is not total, missing {[format_id(e) for e in missing[:5]]}", "map")
    image = np.array([target.index(mapping[e]) for e in source.elements], dtype=np.int64)
    mapped = target.leq_matrix[np.ix_(image, image)]
    bad = source.leq_matrix & ~mapped
    if bad.any():
        i, j = (int(x) for x in np.argwhere(bad)[0])
        return source.elements[i], source.elements[j]
    return None


def is_monotone(mapping: Mapping[Element, Element], source: Poset, target: Poset) -> bool:
    return find_monotonicity_violation(mapping, source, target) is None


def monotone_assignments(
    source_leq: np.ndarray, target_leq: np.ndarray, budget: int
) -> Iterator[Tuple[int, ...]]:
    """
    Enumerate order-preserving index assignments between two (pre)orders.

    Works on closed relation matrices so preorders and posets share it.
    Sources are assigned along increasing down-set size, which is a linear
    extension of any preorder. Output order is deterministic.

    Raises:
        BudgetExceededError: When more than ``budget`` partial assignments are tried
    """
    n = source_leq.shape[0]
    m = target_leq.shape[0]
    order = sorted(range(n), key=lambda i: (int(source_leq[:, i].sum()), i))
    assignment: List[int] = [-1] * n
    visited = 0

    def place(pos: int) -> Iterator[Tuple[int, ...]]:
        nonlocal visited
        if pos == n:
            yield tuple(assignment)
            return
        i = order[pos]
        for value in range(m):
            visited += 1
            if visited > budget:
                raise BudgetExceededError(
                    f"monotone map enumeration exceeded budget of {budget} assignments"
                )
            consistent = True
            for j in order[:pos]:
                if source_leq[j, i] and not target_leq[assignment[j], value]:
                    consistent = False
                    break
                if source_leq[i, j] and not target_leq[value, assignment[j]]:
                    consistent = False
                    break
            if consistent:
                assignment[i] = value
                yield from place(pos + 1)
        assignment[i] = -1

    if n == 0:
        yield ()
        return
    yield from place(0)


def monotone_maps(
    source: Poset, target: Poset, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> Iterator[ElementMap]:
    """
    Enumerate all monotone maps source -> target, complete and duplicate-free.

    Args:
        source: Domain poset
        target: Codomain poset
        budget: Maximum number of partial assignments explored

    Yields:
        Element maps as dicts

    Raises:
        BudgetExceededError: When the search exceeds the budget
    """
    for values in monotone_assignments(source.leq_matrix, target.leq_matrix, budget):
        yield {e: target.elements[v] for e, v in zip(source.elements, values)}


def to_dot(poset: Poset, name: str = "poset") -> str:
    """Graphviz rendering of the Hasse diagram (edges point upward)."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for element in poset.elements:
        label = format_id(element).replace('"', '\\"')
        lines.append(f'  "{label}";')
    for a, b in poset.covers:
        lines.append(f'  "{format_id(a)}" -> "{format_id(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


class PosetDiagram:
    """
    A functor from a finite poset (the base) to finite posets.

    Transitions are given on base covers and derived for every other
    comparable pair by composition; every alternative composition path and
    every explicitly supplied non-cover transition is cross-checked.

    Attributes:
        base: Indexing poset
        fibers: Base element -> fiber poset
    """

    def __init__(
        self,
        base: Poset,
        fibers: Mapping[Element, Poset],
        transitions: Mapping[Tuple[Element, Element], Mapping[Element, Element]],
    ):
        self.base = base
        missing = [p for p in base.elements if p not in fibers]
        if missing:
            raise InputError(
                f"no fiber for base elements {[format_id(p) for p in missing]}", "fibers"
            )
        self.fibers: Dict[Element, Poset] = {p: fibers[p] for p in base.elements}

        supplied: Dict[Tuple[Element, Element], ElementMap] = {}
        for (p, q), mapping in transitions.items():
            if not base.lt(p, q):
                raise InputError(
                    f"transition ({format_id(p)}, {format_id(q)}) "
                    "is not over a strict comparability",
                    "transitions",
                )
            mapping = dict(mapping)
            violation = find_monotonicity_violation(mapping, self.fibers[p], self.fibers[q])
            if violation is not None:
                a, b = violation
                raise InputError(
                    f"transition ({format_id(p)}, {format_id(q)}) is not monotone: "
                    f"{format_id(a)} <= {format_id(b)} but images are incomparable",
                    "transitions",
                )
            supplied[(p, q)] = mapping

        for p, q in base.covers:
            if (p, q) not in supplied:
                raise InputError(
                    f"missing transition for base cover ({format_id(p)}, {format_id(q)})",
                    "transitions",
                )

        self._transitions = self._derive(supplied)
        logger.debug(
            f"diagram over {len(base)} base elements: {len(self._transitions)} transitions"
        )

    def _derive(
        self, supplied: Dict[Tuple[Element, Element], ElementMap]
    ) -> Dict[Tuple[Element, Element], ElementMap]:
        base = self.base
        derived: Dict[Tuple[Element, Element], ElementMap] = {}

        def get(p: Element, q: Element) -> ElementMap:
            if p == q:
                return {x: x for x in self.fibers[p].elements}
            return derived[(p, q)]

        # Tops first, so T(q, r) exists for every q above p.
        graph = base.cover_graph()
        for p in reversed(list(nx.topological_sort(graph))):
            upper = base.upper_covers(p)
            for r in base.up(p, strict=True):
                result: Optional[ElementMap] = None
                via: Optional[Element] = None
                for q in upper:
                    if not base.leq(q, r):
                        continue
                    first, second = supplied[(p, q)], get(q, r)
                    composite = {x: second[first[x]] for x in self.fibers[p].elements}
                    if result is None:
                        result, via = composite, q
                    elif composite != result:
                        raise FunctorialityError(
                            "transitions do not compose: chains "
                            f"{format_id(p)} <= {format_id(via)} <= {format_id(r)} and "
                            f"{format_id(p)} <= {format_id(q)} <= {format_id(r)} disagree",
                            _chain_verdict([p, via, r], [p, q, r]),
                        )
                assert result is not None
                if (p, r) in supplied and supplied[(p, r)] != result:
                    raise FunctorialityError(
                        f"supplied transition ({format_id(p)}, {format_id(r)}) differs from the "
                        f"composite through {format_id(via)}",
                        _chain_verdict([p, r], [p, via, r]),
                    )
                derived[(p, r)] = result
        return derived

    def transition(self, p: Element, q: Element) -> ElementMap:
        """Transition map fiber(p) -> fiber(q) for p <= q."""
        if p == q:
            self.base.index(p)
            return {x: x for x in self.fibers[p].elements}
        try:
            return self._transitions[(p, q)]
        except KeyError:
            raise InputError(f"{format_id(p)} is not below {format_id(q)} in the base")


def _chain_verdict(first: List[Element], second: List[Element]):
    from .recognition import Verdict

    return Verdict.refuted(
        {
            "reason": "functoriality",
            "chains": [[format_id(e) for e in first], [format_id(e) for e in second]],
        }
    )


def grothendieck_total(diagram: PosetDiagram) -> Poset:
    """
    Total poset of a diagram: pairs (p, x) with x in fiber(p), where
    (p, x) <= (q, y) iff p <= q and transition(p, q)(x) <= y.

    Elements are ordered by (base index, fiber index). The order is generated
    by fiber covers plus one edge (p, x) -> (q, T(x)) per base cover p < q.
    """
    base = diagram.base
    elements: List[Element] = []
    relations: List[Tuple[Element, Element]] = []
    for p in base.elements:
        fiber = diagram.fibers[p]
        elements.extend((p, x) for x in fiber.elements)
        relations.extend(((p, a), (p, b)) for a, b in fiber.covers)
    for p, q in base.covers:
        step = diagram.transition(p, q)
        relations.extend(((p, x), (q, step[x])) for x in diagram.fibers[p].elements)

    total = Poset(elements, relations)
    logger.info(f"Grothendieck total: {len(total)} elements over a {len(base)}-element base")
    return total
