"""
Finite Alexandroff spaces as preorders.

Convention: x <= y iff x lies in the minimal open neighbourhood o(y) of y, so
o(y) is the principal lower set of y and the closed neighbourhood c(y) is its
principal upper set. Relations are kept as closed boolean matrices.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from .config import DEFAULT_ENUMERATION_BUDGET
from .errors import BudgetExceededError, InputError, RefutedError
from .poset import Poset, format_id, monotone_assignments
from .recognition import Verdict

logger = logging.getLogger(__name__)

Point = Hashable
PointSet = FrozenSet[Point]


class Preorder:
    """
    Reflexive, transitive relation on a finite point set.

    Attributes:
        points: Points in construction order
        leq_matrix: Closed relation; leq_matrix[i, j] iff point i <= point j
    """

    def __init__(self, points: Iterable[Point], leq: Iterable[Tuple[Point, Point]] = ()):
        points = tuple(points)
        index: Dict[Point, int] = {}
        for i, p in enumerate(points):
            if p in index:
                raise InputError(f"duplicate point {format_id(p)!r}", f"points[{i}]")
            index[p] = i
        matrix = np.eye(len(points), dtype=bool)
        for k, (x, y) in enumerate(leq):
            if x not in index or y not in index:
                raise InputError(
                    f"unknown point in pair {[format_id(x), format_id(y)]}", f"leq[{k}]"
                )
            matrix[index[x], index[y]] = True
        self._setup(points, index, _close(matrix))

    def _setup(
        self, points: Tuple[Point, ...], index: Dict[Point, int], matrix: np.ndarray
    ) -> None:
        matrix.setflags(write=False)
        self.points = points
        self._index = index
        self.leq_matrix = matrix

    @classmethod
    def from_matrix(cls, points: Sequence[Point], matrix: np.ndarray) -> "Preorder":
        """Build from a relation matrix; reflexive-transitive closure is taken."""
        points = tuple(points)
        preorder = cls.__new__(cls)
        index = {p: i for i, p in enumerate(points)}
        preorder._setup(points, index, _close(np.array(matrix, dtype=bool)))
        return preorder

    @classmethod
    def discrete(cls, points: Iterable[Point]) -> "Preorder":
        return cls(points)

    @classmethod
    def trivial(cls, points: Iterable[Point]) -> "Preorder":
        points = tuple(points)
        return cls.from_matrix(points, np.ones((len(points), len(points)), dtype=bool))

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"Preorder({len(self)} points, {len(self.pairs())} strict pairs)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Preorder):
            return NotImplemented
        if set(self.points) != set(other.points):
            return False
        perm = [other._index[p] for p in self.points]
        return bool(np.array_equal(self.leq_matrix, other.leq_matrix[np.ix_(perm, perm)]))

    def __hash__(self) -> int:
        return hash(frozenset(self.points))

    def index(self, point: Point) -> int:
        try:
            return self._index[point]
        except (KeyError, TypeError):
            raise InputError(f"unknown point {format_id(point)!r}")

    def leq(self, x: Point, y: Point) -> bool:
        return bool(self.leq_matrix[self.index(x), self.index(y)])

    def pairs(self) -> List[Tuple[Point, Point]]:
        """All pairs x <= y with x != y, in point order."""
        rows, cols = np.nonzero(self.leq_matrix)
        return [
            (self.points[i], self.points[j]) for i, j in zip(rows.tolist(), cols.tolist()) if i != j
        ]

    def open_neighborhood(self, y: Point) -> PointSet:
        """o(y) = {x : x <= y}."""
        column = self.leq_matrix[:, self.index(y)]
        return frozenset(p for i, p in enumerate(self.points) if column[i])

    def closed_neighborhood(self, y: Point) -> PointSet:
        """c(y) = {x : y <= x}."""
        row = self.leq_matrix[self.index(y)]
        return frozenset(p for i, p in enumerate(self.points) if row[i])

    def is_t0(self) -> bool:
        return not (self.leq_matrix & self.leq_matrix.T & ~np.eye(len(self), dtype=bool)).any()

    def to_poset(self) -> Poset:
        """The same relation as a Poset (requires antisymmetry)."""
        if not self.is_t0():
            raise InputError("preorder is not antisymmetric; use kolmogorov_quotient")
        return Poset.from_matrix(self.points, self.leq_matrix)

    def same_points(self, other: "Preorder") -> List[int]:
        """Index permutation aligning other's points with ours."""
        if set(self.points) != set(other.points):
            raise InputError("preorders live on different point sets")
        return [other._index[p] for p in self.points]


def _close(matrix: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure (Warshall)."""
    closed = matrix | np.eye(matrix.shape[0], dtype=bool)
    for k in range(closed.shape[0]):
        closed |= np.outer(closed[:, k], closed[k, :])
    return closed


@dataclass(frozen=True)
class SetCover:
    """
    A finite family of subsets covering a ground set.

    Attributes:
        ground: The ground set, in order
        members: Subsets, deduplicated, in first-occurrence order
    """

    ground: Tuple[Point, ...]
    members: Tuple[PointSet, ...]

    def __init__(self, ground: Iterable[Point], members: Iterable[Iterable[Point]]):
        ground = tuple(ground)
        ground_set = set(ground)
        unique: List[PointSet] = []
        for k, member in enumerate(members):
            member = frozenset(member)
            if not member <= ground_set:
                raise InputError(
                    f"member has points outside the ground set: "
                    f"{sorted(format_id(p) for p in member - ground_set)}",
                    f"members[{k}]",
                )
            if member not in unique:
                unique.append(member)
        covered = frozenset().union(*unique) if unique else frozenset()
        if covered != ground_set:
            raise InputError(
                f"members do not cover {sorted(format_id(p) for p in ground_set - covered)}",
                "members",
            )
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "members", tuple(unique))

    def sorted_member(self, member: PointSet) -> List[Point]:
        """Members listed in ground order."""
        return [p for p in self.ground if p in member]


def minimal_base(preorder: Preorder) -> SetCover:
    """The principal lower sets o(y), deduplicated."""
    return SetCover(preorder.points, [preorder.open_neighborhood(y) for y in preorder.points])


def topology_from_cover(cover: SetCover) -> Preorder:
    """
    Weakest topology in which every member is open: o(y) is the
    intersection of all members containing y.
    """
    points = cover.ground
    matrix = np.zeros((len(points), len(points)), dtype=bool)
    for j, y in enumerate(points):
        around = [m for m in cover.members if y in m]
        neighborhood = frozenset.intersection(*around)
        for i, x in enumerate(points):
            matrix[i, j] = x in neighborhood
    return Preorder.from_matrix(points, matrix)


def check_minimal_base(cover: SetCover) -> Tuple[Verdict, Optional[Preorder]]:
    """
    Decide whether a cover is the minimal base of an Alexandroff topology.

    Accepts iff every pairwise intersection of members is a union of members
    (the empty union allowed) and no member is a union of other members.

    Returns:
        (verdict, induced preorder on acceptance or None)
    """
    members = cover.members
    for first, second in itertools.combinations(members, 2):
        meet = first & second
        inside = [m for m in members if m <= meet]
        union = frozenset().union(*inside) if inside else frozenset()
        if union != meet:
            return (
                Verdict.refuted(
                    {
                        "condition": "intersection",
                        "members": [cover.sorted_member(first), cover.sorted_member(second)],
                        "intersection": cover.sorted_member(meet),
                    }
                ),
                None,
            )
    for member in members:
        parts = [m for m in members if m < member]
        union = frozenset().union(*parts) if parts else frozenset()
        if union == member:
            return (
                Verdict.refuted(
                    {
                        "condition": "irredundant",
                        "member": cover.sorted_member(member),
                        "parts": [cover.sorted_member(m) for m in parts],
                    }
                ),
                None,
            )
    preorder = topology_from_cover(cover)
    return Verdict.verified({"members": len(members)}), preorder


def dual(preorder: Preorder) -> Preorder:
    return Preorder.from_matrix(preorder.points, preorder.leq_matrix.T)


@dataclass(frozen=True)
class SigmaPartition:
    """
    Mutual-comparability classes s(y) = o(y) ∩ c(y) and the map
    ns: o(y) -> s(y) on distinct minimal-base members.
    """

    classes: Tuple[PointSet, ...]
    ns: Dict[PointSet, PointSet] = field(default_factory=dict)


def sigma_classes(preorder: Preorder) -> SigmaPartition:
    classes: List[PointSet] = []
    ns: Dict[PointSet, PointSet] = {}
    for y in preorder.points:
        cls = preorder.open_neighborhood(y) & preorder.closed_neighborhood(y)
        if cls not in classes:
            classes.append(cls)
        ns[preorder.open_neighborhood(y)] = cls
    return SigmaPartition(tuple(classes), ns)


def kolmogorov_quotient(preorder: Preorder) -> Poset:
    """Poset of sigma classes; each class is named by the tuple of its points."""
    partition = sigma_classes(preorder)
    names = [tuple(p for p in preorder.points if p in cls) for cls in partition.classes]
    reps = [preorder.index(name[0]) for name in names]
    return Poset.from_matrix(names, preorder.leq_matrix[np.ix_(reps, reps)])


def is_weaker(weaker: Preorder, stronger: Preorder) -> bool:
    """
    True iff the first topology is weaker than the second: every o_T(y)
    contains o_R(y), i.e. the identity (Y, R) -> (Y, T) is continuous.

    Raises:
        InputError: If the point sets differ
    """
    perm = weaker.same_points(stronger)
    aligned = stronger.leq_matrix[np.ix_(perm, perm)]
    return bool((~aligned | weaker.leq_matrix).all())


def weakening_le(first: Preorder, second: Preorder) -> bool:
    """R ⊴ T iff the identity (Y, R) -> (Y, T) is continuous."""
    return is_weaker(second, first)


@dataclass(frozen=True)
class JoinResult:
    """
    The join R ∨ T and its pairing table.

    Attributes:
        preorder: o(y) = o_R(y) ∩ o_T(y)
        pairs: (U, W, U ∩ W) for every U in base(R), W in base(T) whose
            sigma classes meet
    """

    preorder: Preorder
    pairs: Tuple[Tuple[PointSet, PointSet, PointSet], ...]

    def is_bijection(self) -> bool:
        """The pairs map one-to-one onto the minimal base of the join."""
        images = [v for _, _, v in self.pairs]
        base = set(minimal_base(self.preorder).members)
        return len(images) == len(set(images)) and set(images) == base


def join(first: Preorder, second: Preorder) -> JoinResult:
    """Least common strengthening: the intersection of the two relations."""
    perm = first.same_points(second)
    matrix = first.leq_matrix & second.leq_matrix[np.ix_(perm, perm)]
    result = Preorder.from_matrix(first.points, matrix)

    ns_first = sigma_classes(first).ns
    ns_second = sigma_classes(second).ns
    pairs = [
        (u, w, u & w)
        for u in minimal_base(first).members
        for w in minimal_base(second).members
        if ns_first[u] & ns_second[w]
    ]
    return JoinResult(result, tuple(pairs))


@dataclass(frozen=True)
class MonotoneMap:
    """
    An order-preserving map between preorders.

    Raises:
        InputError: If the map is not total, leaves the target, or is not monotone
    """

    source: Preorder
    target: Preorder
    mapping: Dict[Point, Point]

    def __post_init__(self) -> None:
        missing = [p for p in self.source.points if p not in self.mapping]
        if missing:
            raise InputError(f"map is not total, missing {[format_id(p) for p in missing]}", "map")
        image = np.array(
            [self.target.index(self.mapping[p]) for p in self.source.points], dtype=np.int64
        )
        bad = self.source.leq_matrix & ~self.target.leq_matrix[np.ix_(image, image)]
        if bad.any():
            i, j = (int(k) for k in np.argwhere(bad)[0])
            raise InputError(
                f"map is not monotone: {format_id(self.source.points[i])} <= "
                f"{format_id(self.source.points[j])} but the images are not comparable",
                "map",
            )

    def __call__(self, point: Point) -> Point:
        return self.mapping[point]

    def opposite(self) -> "MonotoneMap":
        return MonotoneMap(dual(self.source), dual(self.target), self.mapping)


@dataclass(frozen=True)
class Cylinder:
    """
    Directed mapping cylinder of phi: A -> B on the carrier A ⊔ B.

    Points are (a, 0) for a in A and (b, 1) for b in B.

    Attributes:
        preorder: The cylinder preorder
        phi: The map it was built from
        direction: "up" (i0 >= i1 ∘ phi) or "down" (i0 <= i1 ∘ phi)
    """

    preorder: Preorder
    phi: MonotoneMap
    direction: str

    def i0(self, a: Point) -> Tuple[Point, int]:
        return (a, 0)

    def i1(self, b: Point) -> Tuple[Point, int]:
        return (b, 1)


def _cylinder_matrix(phi: MonotoneMap) -> Tuple[List[Tuple[Point, int]], np.ndarray]:
    a_points, b_points = phi.source.points, phi.target.points
    n, m = len(a_points), len(b_points)
    matrix = np.zeros((n + m, n + m), dtype=bool)
    matrix[:n, :n] = phi.source.leq_matrix
    matrix[n:, n:] = phi.target.leq_matrix
    for i, x in enumerate(a_points):
        fx = phi.target.index(phi.mapping[x])
        for j in range(m):
            # (y, 1) <= (x, 0) iff y <= phi(x)
            matrix[n + j, i] = phi.target.leq_matrix[j, fx]
    points = [(a, 0) for a in a_points] + [(b, 1) for b in b_points]
    return points, matrix


def cyl_up(phi: MonotoneMap) -> Cylinder:
    """Cylinder with (x, 0) >= (y, 1) iff phi(x) >= y; within-part orders inherited."""
    points, matrix = _cylinder_matrix(phi)
    return Cylinder(Preorder.from_matrix(points, matrix), phi, "up")


def cyl_down(phi: MonotoneMap) -> Cylinder:
    """Dual cylinder: dual(cyl_up(phi^op)), so (x, 0) <= (y, 1) iff phi(x) <= y."""
    up = cyl_up(phi.opposite())
    return Cylinder(dual(up.preorder), phi, "down")


def mediating_map(
    cylinder: Cylinder,
    alpha: Mapping[Point, Point],
    beta: Mapping[Point, Point],
    target: Preorder,
) -> Dict[Tuple[Point, int], Point]:
    """
    The map out of a cylinder restricting to alpha on i0 and beta on i1.

    Raises:
        InputError: If (alpha, beta) violates the cylinder inequality
        RefutedError: If the assembled map is not monotone
    """
    phi = cylinder.phi
    for x in phi.source.points:
        lower, upper = beta[phi.mapping[x]], alpha[x]
        if cylinder.direction == "down":
            lower, upper = upper, lower
        if not target.leq(lower, upper):
            raise InputError(
                f"pair violates the cylinder inequality at {format_id(x)}", "alpha"
            )
    mapping: Dict[Tuple[Point, int], Point] = {(a, 0): alpha[a] for a in phi.source.points}
    mapping.update({(b, 1): beta[b] for b in phi.target.points})
    try:
        MonotoneMap(cylinder.preorder, target, mapping)
    except InputError as e:
        raise RefutedError(
            f"mediating map is not monotone: {e}", Verdict.refuted({"reason": str(e)})
        )
    return mapping


def monotone_maps_between(
    source: Preorder, target: Preorder, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> Iterator[Dict[Point, Point]]:
    """All monotone maps between preorders, in a deterministic order."""
    for values in monotone_assignments(source.leq_matrix, target.leq_matrix, budget):
        yield {p: target.points[v] for p, v in zip(source.points, values)}


def density_witness(preorder: Preorder) -> Optional[Tuple[PointSet, PointSet]]:
    """A pair of base members whose nonempty intersection is not a member, or None."""
    members = minimal_base(preorder).members
    present = set(members)
    for first, second in itertools.combinations(members, 2):
        meet = first & second
        if meet and meet not in present:
            return first, second
    return None


def is_dense(preorder: Preorder) -> bool:
    """True iff the minimal base is closed under pairwise intersection (empty allowed)."""
    return density_witness(preorder) is None


def inscribe(inner: Preorder, outer: Preorder) -> Dict[PointSet, PointSet]:
    """
    Map each base member U of the inner topology to the intersection of all
    outer base members containing it.

    Raises:
        InputError: If the outer topology is not dense or some inner member
            lies in no outer member
    """
    witness = density_witness(outer)
    if witness is not None:
        first, second = witness
        raise InputError(
            f"outer topology is not dense: {sorted(map(format_id, first))} ∩ "
            f"{sorted(map(format_id, second))} is not a base member",
            "outer",
        )
    outer_members = minimal_base(outer).members
    result: Dict[PointSet, PointSet] = {}
    for member in minimal_base(inner).members:
        containing = [w for w in outer_members if member <= w]
        if not containing:
            raise InputError(
                f"base member {sorted(map(format_id, member))} "
                "is not inscribed in any outer member",
                "inner",
            )
        result[member] = frozenset.intersection(*containing)
    return result


def d_topology(ground: Iterable[Point], subset: Iterable[Point]) -> Preorder:
    """Topology with minimal base {A} ∪ {{s} : s not in A}."""
    ground = tuple(ground)
    subset = frozenset(subset)
    outside = subset - set(ground)
    if outside:
        raise InputError(
            f"subset is not contained in the ground set: {sorted(map(format_id, outside))}",
            "subset",
        )
    members: List[Iterable[Point]] = [subset] if subset else []
    members.extend([s] for s in ground if s not in subset)
    return topology_from_cover(SetCover(ground, members))


def all_preorders(
    points: Sequence[Point], budget: int = DEFAULT_ENUMERATION_BUDGET
) -> Iterator[Preorder]:
    """
    Every preorder on the given labelled points, each exactly once.

    Points are added one at a time; a new point chooses a lower-closed set of
    old points below it and an upper-closed set above it, with everything
    below it <= everything above it.

    Raises:
        BudgetExceededError: When more than ``budget`` partial relations are built
    """
    points = tuple(points)
    built = 0

    def extend(k: int, matrix: np.ndarray) -> Iterator[np.ndarray]:
        nonlocal built
        if k == len(points):
            yield matrix
            return
        old = range(k)
        subsets = [frozenset(s) for r in range(k + 1) for s in itertools.combinations(old, r)]
        lower = [s for s in subsets if all(i in s for j in s for i in old if matrix[i, j])]
        upper = [s for s in subsets if all(i in s for j in s for i in old if matrix[j, i])]
        for down in lower:
            for up in upper:
                if not all(matrix[d, u] for d in down for u in up):
                    continue
                built += 1
                if built > budget:
                    raise BudgetExceededError(
                        f"preorder enumeration exceeded budget of {budget} relations"
                    )
                grown = np.zeros((k + 1, k + 1), dtype=bool)
                grown[:k, :k] = matrix
                grown[k, k] = True
                for d in down:
                    grown[d, k] = True
                for u in up:
                    grown[k, u] = True
                yield from extend(k + 1, grown)

    for matrix in extend(0, np.zeros((0, 0), dtype=bool)):
        yield Preorder.from_matrix(points, matrix)
