"""
Abstract ball complexes.

A finite poset is an abstract ball complex when the order complex of every
strict lower ideal p_< is a PL sphere of dimension rank(p) - 1. Validation
runs one sphere check per element and keeps the per-element verdicts as the
certificate. Unknown verdicts are stored as they are, never upgraded.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple

from .config import DEFAULT_FLIP_BUDGET
from .errors import DimensionError, InputError, RefutedError, UnprovenError
from .poset import Element, Poset, format_id
from .recognition import Status, Verdict, is_ball, is_sphere
from .simplicial import SimplicialComplex

if TYPE_CHECKING:
    from .assembly import Assembly

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BallComplex:
    """
    A poset certified as an abstract ball complex.

    Attributes:
        poset: The underlying graded poset
        certificate: Element -> sphere verdict for its strict lower ideal
        marked: Optional marked top-dimensional element
    """

    poset: Poset
    certificate: Dict[Element, Verdict] = field(default_factory=dict)
    marked: Optional[Element] = None

    @property
    def dim(self) -> int:
        return self.poset.height

    @property
    def ranks(self) -> Dict[Element, int]:
        return self.poset.ranks

    @property
    def elements(self) -> Tuple[Element, ...]:
        return self.poset.elements

    def __len__(self) -> int:
        return len(self.poset)

    def __repr__(self) -> str:
        mark = f", marked={format_id(self.marked)}" if self.marked is not None else ""
        return f"BallComplex(dim={self.dim}, f={self.f_vector()}{mark})"

    def rank(self, element: Element) -> int:
        return self.poset.rank(element)

    def f_vector(self) -> Tuple[int, ...]:
        """Number of cells of each rank."""
        counts = [0] * (self.dim + 1)
        for r in self.ranks.values():
            counts[r] += 1
        return tuple(counts)

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(
            self.certificate.values(),
            witness={"elements": len(self), "dimension": self.dim},
        )

    def with_mark(self, element: Element) -> "BallComplex":
        """Copy with a marked top-dimensional cell."""
        if self.rank(element) != self.dim:
            raise InputError(
                f"marked element {format_id(element)!r} has rank {self.rank(element)}, "
                f"expected {self.dim}",
                "marked",
            )
        return BallComplex(self.poset, self.certificate, element)

    def restrict(self, subset: Iterable[Element]) -> "BallComplex":
        """
        Sub-ball-complex on a lower-closed subset.

        Strict ideals of a lower-closed subset are those of the ambient
        complex, so the per-element certificates carry over.
        """
        sub = self.poset.induced(subset)
        for x in sub.elements:
            for y in self.poset.down(x):
                if y not in sub:
                    raise InputError(
                        f"subset is not lower-closed: {format_id(y)} < {format_id(x)}"
                    )
        return BallComplex(sub, {x: self.certificate[x] for x in sub.elements})

    def order_complex(self) -> SimplicialComplex:
        return self.poset.order_complex()


def _ideal_verdict(poset: Poset, element: Element, rank: int, budget: int) -> Verdict:
    ideal = poset.lower_ideal(element, strict=True)
    try:
        return is_sphere(ideal.order_complex(), rank - 1, budget=budget)
    except DimensionError as e:
        return Verdict.refuted({"reason": str(e)})


def validate(
    poset: Poset,
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
    marked: Optional[Element] = None,
) -> BallComplex:
    """
    Certify a poset as an abstract ball complex.

    Args:
        poset: Candidate poset
        strict: Raise UnprovenError on any Unknown element verdict
        budget: Flip budget per sphere check
        threads: Worker threads for the per-element checks
        marked: Optional element to mark (must have top rank)

    Returns:
        BallComplex with one verdict per element

    Raises:
        RefutedError: If the poset is not graded or some strict ideal is not a sphere
        UnprovenError: If strict and some element verdict is Unknown
    """
    ranks = poset.ranks
    for a, b in poset.covers:
        if ranks[b] != ranks[a] + 1:
            raise RefutedError(
                f"poset is not graded: cover {format_id(a)} < {format_id(b)} jumps "
                f"from rank {ranks[a]} to {ranks[b]}",
                Verdict.refuted(
                    {"reason": "not graded", "cover": [format_id(a), format_id(b)]}
                ),
            )

    def check(element: Element) -> Verdict:
        return _ideal_verdict(poset, element, ranks[element], budget)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            verdicts = list(pool.map(check, poset.elements))
    else:
        verdicts = [check(p) for p in poset.elements]

    certificate: Dict[Element, Verdict] = {}
    for element, verdict in zip(poset.elements, verdicts):
        if verdict.status is Status.REFUTED:
            ideal = poset.down(element, strict=True)
            logger.debug(f"element {format_id(element)}: strict ideal is not a sphere")
            raise RefutedError(
                f"strict ideal of {format_id(element)} is not a "
                f"{ranks[element] - 1}-sphere",
                Verdict.refuted(
                    {
                        "element": format_id(element),
                        "rank": ranks[element],
                        "ideal": [format_id(x) for x in ideal],
                        "sphere": verdict.witness,
                    },
                    budget_used=verdict.budget_used,
                ),
            )
        if verdict.status is Status.UNKNOWN and strict:
            raise UnprovenError(
                f"sphere check for the ideal of {format_id(element)} is undecided",
                verdict,
            )
        certificate[element] = verdict

    complex_ = BallComplex(poset, certificate)
    if marked is not None:
        complex_ = complex_.with_mark(marked)
    logger.debug(f"validated {complex_!r}")
    return complex_


def from_simplicial(
    complex_: SimplicialComplex, budget: int = DEFAULT_FLIP_BUDGET, threads: int = 1
) -> BallComplex:
    """The face poset of a simplicial complex as a ball complex."""
    return validate(complex_.face_poset(), budget=budget, threads=threads)


def _fresh_name(poset: Poset, name: Optional[Element]) -> Element:
    if name is not None:
        if name in poset:
            raise InputError(f"new element id {format_id(name)!r} is already in use", "name")
        return name
    counter = 0
    while f"b{counter}" in poset:
        counter += 1
    return f"b{counter}"


def computed_boundary(poset: Poset, ball: Sequence[Element]) -> List[Element]:
    """
    Boundary cells of a lower-closed ball: the codimension-one cells lying in
    exactly one top cell, together with everything below them.
    """
    ranks = poset.ranks
    members = set(ball)
    d = max((ranks[x] for x in members), default=-1)
    tops = [x for x in members if ranks[x] == d]
    outer = [
        x
        for x in members
        if ranks[x] == d - 1 and sum(1 for t in tops if poset.lt(x, t)) == 1
    ]
    closure = {y for x in outer for y in poset.down(x)}
    return [x for x in poset.elements if x in closure]


def assemble_ball(
    complex_: BallComplex,
    ball: Iterable[Element],
    boundary: Iterable[Element],
    name: Optional[Element] = None,
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
) -> Tuple[BallComplex, "Assembly"]:
    """
    Collapse an embedded ball to a single cell.

    The interior cells (ball minus boundary) are removed and one new cell of
    the ball's dimension is added on top of the boundary. Cells that were
    above an interior cell end up above the new cell.

    Args:
        complex_: Ambient ball complex L
        ball: Lower-closed set of cells forming a d-ball
        boundary: The boundary cells of the ball, cross-checked
        name: Id of the new cell (default: first unused "b<n>")

    Returns:
        (L/B, the assembly L -> L/B)

    Raises:
        InputError: If the ball is not lower-closed or the boundary does not match
        RefutedError: If the cells do not form a ball
    """
    from .assembly import verify_assembly

    poset = complex_.poset
    ball_set = set(ball)
    for x in ball_set:
        poset.index(x)
    ball_list = [x for x in poset.elements if x in ball_set]
    if not ball_list:
        raise InputError("ball is empty", "ball")
    for x in ball_list:
        for y in poset.down(x):
            if y not in ball_set:
                raise InputError(
                    f"ball is not lower-closed: {format_id(y)} < {format_id(x)}", "ball"
                )

    ranks = poset.ranks
    d = max(ranks[x] for x in ball_list)
    try:
        ball_verdict = is_ball(poset.induced(ball_list).order_complex(), d, budget=budget)
    except DimensionError as e:
        ball_verdict = Verdict.refuted({"reason": str(e)})
    ball_verdict.require(strict, what=f"{d}-ball check of the assembled cells")

    expected = computed_boundary(poset, ball_list)
    supplied = set(boundary)
    if supplied != set(expected):
        raise InputError(
            f"boundary does not match the computed boundary "
            f"{[format_id(x) for x in expected]}",
            "boundary",
        )

    interior = [x for x in ball_list if x not in supplied]
    interior_set = set(interior)
    new = _fresh_name(poset, name)

    elements: List[Element] = []
    for x in poset.elements:
        if x == interior[0]:
            elements.append(new)
        if x not in interior_set:
            elements.append(x)

    relations = [(a, b) for a, b in poset.covers if a not in interior_set and b not in interior_set]
    boundary_poset = poset.induced(expected)
    relations.extend((m, new) for m in boundary_poset.maximal_elements())
    for y in poset.elements:
        if y in ball_set:
            continue
        if any(poset.lt(x, y) for x in interior):
            relations.append((new, y))

    quotient = validate(Poset(elements, relations), strict=strict, budget=budget, threads=threads)
    mapping = {x: (new if x in interior_set else x) for x in poset.elements}
    assembly = verify_assembly(
        mapping, complex_, quotient, strict=strict, budget=budget, threads=threads
    )
    logger.info(
        f"assembled a {d}-ball of {len(ball_list)} cells into {format_id(new)}: "
        f"{len(poset)} -> {len(quotient)} cells"
    )
    return quotient, assembly


def assemble_balls(
    complex_: BallComplex,
    balls: Sequence[Tuple[Iterable[Element], Iterable[Element]]],
    names: Optional[Sequence[Element]] = None,
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
) -> Tuple[BallComplex, "Assembly"]:
    """
    Collapse several balls with disjoint interiors, one after another.

    Each later ball is given in terms of cells of the original complex that
    are still present. Returns the final quotient and the composite assembly.
    """
    from .assembly import compose, identity

    current = complex_
    total = identity(complex_, budget=budget)
    for i, (ball, boundary) in enumerate(balls):
        name = names[i] if names is not None else None
        current, step = assemble_ball(
            current, ball, boundary, name=name, strict=strict, budget=budget, threads=threads
        )
        total = compose(step, total, strict=strict, budget=budget, threads=threads)
    return current, total
