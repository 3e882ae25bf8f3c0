"""
Abstract assemblies between ball complexes.

A monotone, surjective map f: S -> T is an assembly when, for every target
cell b of rank k, the preimage of the principal ideal b_<= is a ball complex
whose order complex is a k-ball. Certificates are always recomputed: a
composite is re-verified from scratch, never derived from its factors.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping

from .ballcomplex import BallComplex
from .config import DEFAULT_FLIP_BUDGET
from .errors import ConsistencyAlarm, DimensionError, InputError, RefutedError, UnprovenError
from .poset import Element, find_monotonicity_violation, format_id
from .recognition import Status, Verdict, is_ball

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Assembly:
    """
    A verified assembly morphism.

    Attributes:
        source: Finer ball complex
        target: Coarser ball complex
        mapping: Source cell -> target cell
        certificate: Target cell -> ball verdict for its preimage
    """

    source: BallComplex
    target: BallComplex
    mapping: Dict[Element, Element]
    certificate: Dict[Element, Verdict] = field(default_factory=dict)

    def __call__(self, element: Element) -> Element:
        return self.mapping[element]

    def __repr__(self) -> str:
        return f"Assembly({len(self.source)} cells -> {len(self.target)} cells)"

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(
            self.certificate.values(), witness={"targets": len(self.certificate)}
        )

    def preimage(self, element: Element) -> List[Element]:
        """Source cells mapped into the principal ideal of a target cell, in source order."""
        target = self.target.poset
        return [x for x in self.source.elements if target.leq(self.mapping[x], element)]

    def compose_map(self, first: "Assembly") -> Dict[Element, Element]:
        """Raw composite map self ∘ first, without verification."""
        return {x: self.mapping[y] for x, y in first.mapping.items()}


def _preimage_verdict(
    source: BallComplex,
    target: BallComplex,
    mapping: Mapping[Element, Element],
    element: Element,
    budget: int,
) -> Verdict:
    k = target.rank(element)
    cells = [x for x in source.elements if target.poset.leq(mapping[x], element)]
    witness = {"element": format_id(element), "rank": k, "preimage": [format_id(x) for x in cells]}

    piece = source.restrict(cells)
    if piece.verdict.status is Status.REFUTED:
        return Verdict.refuted({**witness, "reason": "preimage is not a ball complex"})
    if piece.dim != k:
        return Verdict.refuted(
            {**witness, "reason": "preimage has the wrong dimension", "found": piece.dim}
        )
    try:
        ball = is_ball(piece.order_complex(), k, budget=budget)
    except DimensionError as e:
        return Verdict.refuted({**witness, "reason": str(e)})
    if ball.status is Status.VERIFIED:
        return Verdict.combine([piece.verdict, ball], witness={**witness, "ball": ball.witness})
    detail = {**witness, "reason": "preimage is not a ball", "ball": ball.witness}
    return Verdict(ball.status, detail, ball.budget_used)


def verify_assembly(
    mapping: Mapping[Element, Element],
    source: BallComplex,
    target: BallComplex,
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
) -> Assembly:
    """
    Check the assembly condition for a cell map.

    Args:
        mapping: Total map from source cells to target cells
        source: Finer ball complex
        target: Coarser ball complex
        strict: Raise UnprovenError on an Unknown preimage verdict
        budget: Flip budget per ball check
        threads: Worker threads for the per-target checks

    Returns:
        Assembly carrying one verdict per target cell

    Raises:
        InputError: If the map is not total or leaves the target
        RefutedError: Non-monotone, non-surjective, or some preimage is not a ball
        UnprovenError: If strict and some preimage verdict is Unknown
    """
    mapping = dict(mapping)
    extra = [x for x in mapping if x not in source.poset]
    if extra:
        raise InputError(
            f"map has keys outside the source: {[format_id(x) for x in extra[:5]]}", "map"
        )
    violation = find_monotonicity_violation(mapping, source.poset, target.poset)
    if violation is not None:
        a, b = violation
        raise RefutedError(
            f"map is not monotone: {format_id(a)} <= {format_id(b)} but "
            f"{format_id(mapping[a])} is not below {format_id(mapping[b])}",
            Verdict.refuted({"reason": "not monotone", "pair": [format_id(a), format_id(b)]}),
        )

    image = set(mapping.values())
    missed = [b for b in target.elements if b not in image]
    if missed:
        raise RefutedError(
            f"map is not surjective: {format_id(missed[0])} has no preimage",
            Verdict.refuted({"reason": "not surjective", "element": format_id(missed[0])}),
        )

    def check(element: Element) -> Verdict:
        return _preimage_verdict(source, target, mapping, element, budget)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            verdicts = list(pool.map(check, target.elements))
    else:
        verdicts = [check(b) for b in target.elements]

    certificate: Dict[Element, Verdict] = {}
    for element, verdict in zip(target.elements, verdicts):
        if verdict.status is Status.REFUTED:
            raise RefutedError(
                f"preimage of the ideal of {format_id(element)} is not a "
                f"{target.rank(element)}-ball",
                verdict,
            )
        if verdict.status is Status.UNKNOWN and strict:
            raise UnprovenError(
                f"ball check for the preimage of {format_id(element)} is undecided", verdict
            )
        certificate[element] = verdict

    logger.debug(f"verified assembly {len(source)} -> {len(target)} cells")
    return Assembly(source, target, mapping, certificate)


def identity(complex_: BallComplex, budget: int = DEFAULT_FLIP_BUDGET) -> Assembly:
    return verify_assembly({x: x for x in complex_.elements}, complex_, complex_, budget=budget)


def compose(
    second: Assembly,
    first: Assembly,
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
) -> Assembly:
    """
    Composite second ∘ first, re-verified.

    Raises:
        InputError: If first.target and second.source differ
        ConsistencyAlarm: If the composite of two assemblies fails verification
    """
    if first.target.poset != second.source.poset:
        raise InputError(
            "cannot compose: target of the first assembly is not the source of the second"
        )
    mapping = second.compose_map(first)
    try:
        return verify_assembly(
            mapping, first.source, second.target, strict=strict, budget=budget, threads=threads
        )
    except RefutedError as e:
        logger.error(f"composite of verified assemblies failed verification: {e}")
        raise ConsistencyAlarm(f"composite assembly failed verification: {e}", e.verdict)


def verify_marked(assembly: Assembly) -> bool:
    """True iff the assembly sends the marked source cell to the marked target cell."""
    source, target = assembly.source, assembly.target
    if source.marked is None or target.marked is None:
        missing = "source" if source.marked is None else "target"
        raise InputError(f"the {missing} complex has no marked cell", "marked")
    return assembly.mapping[source.marked] == target.marked


def is_assembly(
    mapping: Mapping[Element, Element],
    source: BallComplex,
    target: BallComplex,
    budget: int = DEFAULT_FLIP_BUDGET,
) -> Verdict:
    """Verdict form of verify_assembly (never raises on refutation)."""
    try:
        return verify_assembly(mapping, source, target, budget=budget).verdict
    except RefutedError as e:
        return e.verdict if e.verdict is not None else Verdict.refuted({"reason": str(e)})
