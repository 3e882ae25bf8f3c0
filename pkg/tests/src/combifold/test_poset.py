"""
Unit tests for finite posets, monotone maps and poset diagrams.
"""

import pytest

from builders import broken_poset, edge_poset, path_poset, square_poset, torus7
from combifold.errors import BudgetExceededError, FunctorialityError, InputError
from combifold.poset import (
    Poset,
    PosetDiagram,
    format_id,
    grothendieck_total,
    is_monotone,
    monotone_maps,
    order_complex,
    to_dot,
)
from combifold.simplicial import simplex_boundary


class TestPosetConstruction:
    """Closure, covers and validation of the generating relation."""

    def test_transitive_closure(self):
        """Relations are closed transitively and covers are the reduction."""
        poset = Poset(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])

        assert poset.leq("a", "c")
        assert not poset.leq("c", "a")
        assert poset.covers == (("a", "b"), ("b", "c"))

    def test_duplicate_element_rejected(self):
        """Duplicate ids are input errors with the offending position."""
        with pytest.raises(InputError) as info:
            Poset(["a", "a"])
        assert info.value.field == "elements[1]"

    def test_unknown_element_rejected(self):
        """Covers may only mention declared elements."""
        with pytest.raises(InputError, match="unknown element id"):
            Poset(["a"], [("a", "b")])

    def test_cycle_rejected(self):
        """A directed cycle is not a partial order."""
        with pytest.raises(InputError, match="cycle"):
            Poset(["a", "b"], [("a", "b"), ("b", "a")])

    def test_equality_ignores_generating_relation(self):
        """Posets compare by elements and order, not by how they were given."""
        first = Poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
        second = Poset(["a", "b", "c"], [("a", "c"), ("a", "b"), ("b", "c")])

        assert first == second
        assert hash(first) == hash(second)


class TestRanks:
    """Ranks, heights and extremal elements."""

    def test_square_ranks(self):
        square = square_poset()

        assert square.rank("v0") == 0
        assert square.rank("e12") == 1
        assert square.rank("F") == 2
        assert square.height == 2
        assert square.maximal_elements() == ["F"]
        assert len(square.minimal_elements()) == 4

    def test_empty_poset_height(self):
        """The empty poset has height -1."""
        assert Poset([]).height == -1

    def test_lower_ideal(self):
        """Strict lower ideal of the square's 2-cell is its boundary circle."""
        ideal = square_poset().lower_ideal("F", strict=True)

        assert len(ideal) == 8
        assert "F" not in ideal

    def test_opposite_swaps_order(self):
        poset = edge_poset().opposite()

        assert poset.leq("e", "a")
        assert poset.maximal_elements() == ["a", "b"]

    def test_isomorphism(self):
        """Relabelled copies are isomorphic, different shapes are not."""
        path = path_poset(2)
        renamed = path.relabel({e: f"x{e}" for e in path.elements})

        assert path.is_isomorphic(renamed)
        assert not path.is_isomorphic(path_poset(3))


class TestOrderComplex:
    """Order complexes of finite posets."""

    def test_face_poset_of_circle(self):
        """The order complex of a face poset is the barycentric subdivision."""
        complex_ = order_complex(simplex_boundary(2).face_poset())

        assert complex_.f_vector() == (6, 6)
        assert complex_.labels is not None
        assert complex_.labels[0] == (0,)

    def test_empty_poset(self):
        """The empty poset gives {∅}, the (-1)-sphere."""
        complex_ = Poset([]).order_complex()

        assert complex_.facets == ((),)
        assert complex_.dimension == -1

    def test_local_order_follows_chains(self):
        complex_ = edge_poset().order_complex()

        assert complex_.ordered([2, 0]) == (0, 2)


class TestMonotoneMaps:
    """Monotonicity checks and enumeration."""

    def test_is_monotone(self):
        source, target = path_poset(1), edge_poset()

        assert is_monotone({"v0": "a", "v1": "b", "e1": "e"}, source, target)
        assert not is_monotone({"v0": "e", "v1": "b", "e1": "a"}, source, target)

    def test_partial_map_rejected(self):
        with pytest.raises(InputError, match="not total"):
            is_monotone({"v0": "a"}, path_poset(1), edge_poset())

    def test_enumeration_is_complete(self):
        """Maps from a 2-chain to a 2-chain are the 3 monotone pairs."""
        chain = Poset([0, 1], [(0, 1)])
        maps = list(monotone_maps(chain, chain))

        assert len(maps) == 3
        assert {(m[0], m[1]) for m in maps} == {(0, 0), (0, 1), (1, 1)}

    def test_enumeration_budget(self):
        """Enumeration stops with an error once the budget is spent."""
        antichain = Poset(range(6))
        with pytest.raises(BudgetExceededError):
            list(monotone_maps(antichain, antichain, budget=10))


class TestDiagrams:
    """Poset diagrams and their Grothendieck total posets."""

    def _chain_diagram(self, second_step):
        base = Poset(["p", "q", "r"], [("p", "q"), ("q", "r")])
        point = Poset(["x"])
        two = Poset(["y0", "y1"], [("y0", "y1")])
        return PosetDiagram(
            base,
            {"p": point, "q": two, "r": two},
            {("p", "q"): {"x": "y0"}, ("q", "r"): second_step},
        )

    def test_derived_transition(self):
        """Non-cover transitions are composites along covers."""
        diagram = self._chain_diagram({"y0": "y1", "y1": "y1"})

        assert diagram.transition("p", "r") == {"x": "y1"}

    def test_missing_cover_transition(self):
        base = Poset(["p", "q"], [("p", "q")])
        with pytest.raises(InputError, match="missing transition"):
            PosetDiagram(base, {"p": Poset(["x"]), "q": Poset(["y"])}, {})

    def test_inconsistent_supplied_transition(self):
        """A supplied non-cover transition must agree with the composite."""
        base = Poset(["p", "q", "r"], [("p", "q"), ("q", "r")])
        point = Poset(["x"])
        two = Poset(["y0", "y1"], [("y0", "y1")])
        with pytest.raises(FunctorialityError) as info:
            PosetDiagram(
                base,
                {"p": point, "q": two, "r": two},
                {
                    ("p", "q"): {"x": "y0"},
                    ("q", "r"): {"y0": "y0", "y1": "y1"},
                    ("p", "r"): {"x": "y1"},
                },
            )
        assert info.value.witness["reason"] == "functoriality"

    def test_noncommuting_square(self):
        """Two cover paths that disagree raise with a chain witness."""
        base = Poset(["p", "q1", "q2", "r"], [("p", "q1"), ("p", "q2"), ("q1", "r"), ("q2", "r")])
        point = Poset(["x"])
        two = Poset(["y0", "y1"], [("y0", "y1")])
        with pytest.raises(FunctorialityError) as info:
            PosetDiagram(
                base,
                {"p": point, "q1": point, "q2": point, "r": two},
                {
                    ("p", "q1"): {"x": "x"},
                    ("p", "q2"): {"x": "x"},
                    ("q1", "r"): {"x": "y0"},
                    ("q2", "r"): {"x": "y1"},
                },
            )
        assert len(info.value.witness["chains"]) == 2

    def test_grothendieck_total(self):
        """Total poset: pairs ordered by base then transported fiber order."""
        diagram = self._chain_diagram({"y0": "y0", "y1": "y1"})
        total = grothendieck_total(diagram)

        assert len(total) == 5
        assert total.elements[0] == ("p", "x")
        assert total.leq(("p", "x"), ("r", "y0"))
        assert total.leq(("p", "x"), ("r", "y1"))
        assert not total.leq(("q", "y1"), ("r", "y0"))


class TestFormatting:
    def test_format_id(self):
        assert format_id(("p", (0, 1))) == "(p|(0|1))"
        assert format_id(3) == "3"

    def test_dot_export(self):
        dot = to_dot(edge_poset())

        assert dot.startswith("digraph poset {")
        assert '"a" -> "e";' in dot


POSETS = {
    "edge": edge_poset(),
    "path3": path_poset(3),
    "square": square_poset(),
    "broken": broken_poset(),
    "tetra_boundary": simplex_boundary(3).face_poset(),
    "torus": torus7().face_poset(),
}


@pytest.mark.parametrize("poset", POSETS.values(), ids=POSETS.keys())
class TestOrderInvariants:
    """Properties every poset satisfies, checked on each shared poset."""

    def test_opposite_is_an_involution(self, poset):
        assert poset.opposite().opposite() == poset

    def test_rank_is_monotone(self, poset):
        for a in poset.elements:
            for b in poset.up(a, strict=True):
                assert poset.rank(a) < poset.rank(b)

    def test_order_complex_of_lower_ideal(self, poset):
        """Chains of p_≤ are exactly the chains of P lying below p."""
        whole = poset.order_complex()
        for p in poset.elements:
            ideal = poset.lower_ideal(p).order_complex()
            expected = {
                frozenset(whole.labels[v] for v in face)
                for face in whole.all_faces()
                if all(poset.leq(whole.labels[v], p) for v in face)
            }

            assert {frozenset(ideal.labels[v] for v in face) for face in ideal.all_faces()} == (
                expected
            )

    def test_total_of_constant_point_diagram_is_the_base(self, poset):
        point = Poset(["*"])
        diagram = PosetDiagram(
            poset,
            {p: point for p in poset.elements},
            {(a, b): {"*": "*"} for a, b in poset.covers},
        )
        total = grothendieck_total(diagram)

        assert total == poset.relabel({p: (p, "*") for p in poset.elements})
        assert total.is_isomorphic(poset)
