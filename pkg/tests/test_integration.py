"""
End-to-end checks of combifold against independent oracles.

Suites:
1. Ball-complex validation of standard complexes
2. Assembly condition versus a brute-force preimage checker
3. Composites of verified assemblies re-verify
4. Gauss functor objects, morphisms and functoriality
5. Tangent total spaces of ∂Δ² and ∂Δ³
6. Prismatic decompositions and their cell counts
7. Alexandroff calculus: bases, joins and cylinders
8. Sphere recognition with replayable certificates
9. Coloring validation and tamper detection
"""

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import (
    broken_poset,
    edge_poset,
    interior_vertices,
    merge_at,
    path_poset,
    square_poset,
    theta,
)
from combifold import io
from combifold.alexandroff import (
    MonotoneMap,
    Preorder,
    all_preorders,
    check_minimal_base,
    cyl_down,
    cyl_up,
    is_weaker,
    join,
    mediating_map,
    minimal_base,
    monotone_maps_between,
)
from combifold.assembly import compose, identity, verify_assembly, verify_marked
from combifold.ballcomplex import assemble_ball, from_simplicial, validate
from combifold.bundles import (
    MARK,
    Coloring,
    GaussFunctor,
    chain_from_steps,
    gauss_coloring,
    prism_complex,
    validate_coloring,
)
from combifold.errors import RefutedError
from combifold.poset import is_monotone, monotone_maps
from combifold.recognition import (
    Status,
    homology,
    is_ball,
    is_sphere,
    is_sphere_homology,
    replay,
)
from combifold.simplicial import simplex_boundary


# ----------------------------------------------------------------------
# 1. Ball-complex validation
# ----------------------------------------------------------------------


class TestBallComplexValidation:
    @pytest.mark.parametrize("d,size", [(1, 6), (2, 14), (3, 30)])
    def test_simplex_boundaries(self, d, size):
        complex_ = from_simplicial(simplex_boundary(d + 1))

        assert len(complex_) == size
        assert complex_.verdict.status is Status.VERIFIED

    def test_square_and_path(self):
        assert validate(square_poset()).verdict.ok
        assert validate(path_poset(4)).verdict.ok

    def test_broken_cell_has_witness(self):
        with pytest.raises(RefutedError) as info:
            validate(broken_poset())
        assert info.value.witness["element"] == "F"


# ----------------------------------------------------------------------
# 2. Assembly condition versus brute force
# ----------------------------------------------------------------------


def _preimage_is_ball(source, target, mapping, element) -> bool:
    """Independent check that a preimage is a 0-ball or a 1-ball."""
    cells = [x for x in source.elements if target.leq(mapping[x], element)]
    vertices = [x for x in cells if source.rank(x) == 0]
    edges = [x for x in cells if source.rank(x) == 1]
    if target.rank(element) == 0:
        return len(cells) == 1 and len(vertices) == 1
    if not edges:
        return False
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    for edge in edges:
        graph.add_edge(*source.lower_covers(edge))
    degrees = [n for _, n in graph.degree()]
    tree = nx.is_connected(graph) and graph.number_of_edges() == len(vertices) - 1
    return tree and max(degrees) <= 2


def _brute_force_assembly(source, target, mapping) -> bool:
    if set(mapping.values()) != set(target.elements):
        return False
    return all(_preimage_is_ball(source, target, mapping, b) for b in target.elements)


class TestAssemblyOracle:
    def test_accept_sets_agree(self):
        """Every monotone map path(2) -> edge is judged the same way by both checkers."""
        source_poset, target_poset = path_poset(2), edge_poset()
        source, target = validate(source_poset), validate(target_poset)

        accepted, expected = set(), set()
        for mapping in monotone_maps(source_poset, target_poset):
            key = tuple(sorted(mapping.items()))
            if _brute_force_assembly(source_poset, target_poset, mapping):
                expected.add(key)
            try:
                verify_assembly(mapping, source, target)
            except RefutedError:
                continue
            accepted.add(key)

        assert expected
        assert accepted == expected


# ----------------------------------------------------------------------
# 3. Composition closure
# ----------------------------------------------------------------------


class TestCompositionClosure:
    def test_successive_merges(self):
        """All 20 ordered pairs of merges on a six-edge path compose."""
        complex_ = validate(path_poset(6))
        pairs = 0
        for u, w in itertools.permutations(interior_vertices(complex_.poset), 2):
            middle, first = assemble_ball(complex_, *merge_at(complex_.poset, u))
            _, second = assemble_ball(middle, *merge_at(middle.poset, w))
            composite = compose(second, first)

            assert composite.verdict.ok
            assert composite.mapping == second.compose_map(first)
            pairs += 1
        assert pairs == 20

    def test_gauss_flags_of_tetra_boundary(self):
        """24 full flags v < e < t of ∂Δ³ give composable Gauss morphisms."""
        gauss = GaussFunctor(simplex_boundary(3))
        flags = 0
        for triangle in itertools.combinations(range(4), 3):
            for edge in itertools.combinations(triangle, 2):
                for vertex in edge:
                    first = gauss.morphism([vertex], edge)
                    second = gauss.morphism(edge, triangle)
                    composite = compose(second, first)

                    assert composite.verdict.ok
                    assert composite.mapping == gauss.morphism_map([vertex], triangle)
                    flags += 1
        assert flags == 24

    def test_gauss_flags_of_circle(self):
        gauss = GaussFunctor(simplex_boundary(2))
        for edge in itertools.combinations(range(3), 2):
            for vertex in edge:
                morphism = gauss.morphism([vertex], edge)
                composite = compose(identity(morphism.target), morphism)

                assert composite.verdict.ok


# ----------------------------------------------------------------------
# 4. Gauss functor
# ----------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
class TestGaussFunctor:
    def test_objects_are_marked_spheres(self, n):
        manifold = simplex_boundary(n)
        gauss = GaussFunctor(manifold)
        for face in manifold.all_faces():
            obj = gauss.object(face)

            assert obj.verdict.ok
            assert obj.marked == MARK
            assert obj.poset.maximal_elements().count(MARK) == 1
            assert is_sphere(obj.order_complex(), manifold.dimension).ok

    def test_morphisms_preserve_the_mark(self, n):
        manifold = simplex_boundary(n)
        gauss = GaussFunctor(manifold)
        base = manifold.face_poset()
        for smaller, larger in base.covers:
            morphism = gauss.morphism(smaller, larger)

            assert morphism.verdict.ok
            assert verify_marked(morphism)

    def test_diagram_is_functorial(self, n):
        """Building the diagram derives and cross-checks every transition."""
        diagram = GaussFunctor(simplex_boundary(n)).diagram()

        assert len(diagram.base) == 2 ** (n + 1) - 2


# ----------------------------------------------------------------------
# 5. Tangent total spaces
# ----------------------------------------------------------------------


class TestTangentTotal:
    def test_circle_gives_a_torus(self):
        total = GaussFunctor(simplex_boundary(2)).total()
        complex_ = total.complex

        assert complex_.euler_characteristic() == 0
        assert complex_.is_closed_pseudomanifold()
        assert [str(g) for g in homology(complex_)] == ["Z", "Z^2", "Z"]
        assert complex_.is_combinatorial_manifold(2).status is Status.VERIFIED

    def test_two_sphere(self):
        total = GaussFunctor(simplex_boundary(3)).total()

        assert len(total.poset) == 160
        assert total.complex.dimension == 4
        assert total.complex.is_closed_pseudomanifold()
        assert total.complex.euler_characteristic() == 4


# ----------------------------------------------------------------------
# 6. Prismatic decomposition
# ----------------------------------------------------------------------


class TestPrism:
    def test_collapse_chain(self, fixtures_dir):
        chain = io.prism_chain_from_json(io.load_json(fixtures_dir / "prism_chain.json"))
        prism = prism_complex(chain)

        assert len(prism.complex) == 11
        assert prism.complex.f_vector() == (5, 5, 1)
        assert is_ball(prism.complex.order_complex(), 2).ok
        assert is_monotone(prism.projection, prism.complex.poset, prism.base)

    @settings(max_examples=10, deadline=None)
    @given(
        st.integers(min_value=2, max_value=4),
        st.lists(st.integers(0, 10), min_size=1, max_size=2),
    )
    def test_cell_count(self, edges, choices):
        """|T(Q)| is the sum over subsets k of |Q_max(k)|, i.e. sum_j 2^j |Q_j|."""
        current = validate(path_poset(edges))
        steps = []
        for choice in choices:
            candidates = interior_vertices(current.poset)
            if not candidates:
                break
            vertex = candidates[choice % len(candidates)]
            current, step = assemble_ball(current, *merge_at(current.poset, vertex))
            steps.append(step)

        chain = chain_from_steps(steps)
        prism = prism_complex(chain)

        expected = sum(2**j * len(q) for j, q in enumerate(chain.complexes))
        assert len(prism.complex) == expected
        assert prism.complex.verdict.ok


# ----------------------------------------------------------------------
# 7. Alexandroff calculus
# ----------------------------------------------------------------------


@st.composite
def preorders(draw, max_points=8):
    n = draw(st.integers(min_value=1, max_value=max_points))
    pairs = draw(
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n)
    )
    return Preorder(range(n), pairs)


def _relation(preorder):
    return {(x, y) for x in preorder.points for y in preorder.points if preorder.leq(x, y)}


def _cylinder_admissible(cylinder, phi, alpha, beta, target) -> bool:
    for x in phi.source.points:
        lower, upper = beta[phi(x)], alpha[x]
        if cylinder.direction == "down":
            lower, upper = upper, lower
        if not target.leq(lower, upper):
            return False
    return True


def _restrict(mapping, source, middle):
    alpha = tuple((a, mapping[(a, 0)]) for a in source.points)
    beta = tuple((b, mapping[(b, 1)]) for b in middle.points)
    return alpha, beta


class TestAlexandroff:
    def test_minimal_base_round_trip_exhaustive(self):
        """All labelled preorders on up to five points."""
        for n in range(1, 6):
            for preorder in all_preorders(range(n)):
                verdict, induced = check_minimal_base(minimal_base(preorder))

                assert verdict.ok and induced == preorder

    @settings(max_examples=200, deadline=None)
    @given(preorders())
    def test_minimal_base_round_trip_random(self, preorder):
        verdict, induced = check_minimal_base(minimal_base(preorder))

        assert verdict.ok
        assert induced == preorder

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_join_is_least_upper_bound(self, data):
        """Stronger than both inputs and weaker than any common strengthening."""
        first = data.draw(preorders())
        n = len(first)
        pairs = data.draw(
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n)
        )
        second = Preorder(range(n), pairs)
        result = join(first, second)

        assert is_weaker(first, result.preorder) and is_weaker(second, result.preorder)
        assert result.is_bijection()
        assert join(second, first).preorder == result.preorder
        assert join(first, result.preorder).preorder == result.preorder
        shared = sorted(_relation(first) & _relation(second))
        common = Preorder(range(n), data.draw(st.lists(st.sampled_from(shared), max_size=2 * n)))
        assert is_weaker(first, common) and is_weaker(second, common)
        assert is_weaker(result.preorder, common)

    @pytest.mark.parametrize("build", [cyl_up, cyl_down])
    def test_cylinder_universality(self, build):
        """Maps out of a cylinder restrict bijectively onto admissible pairs."""
        source = Preorder(["a0", "a1"], [("a0", "a1")])
        targets = [p for n in range(1, 4) for p in all_preorders(range(n))]
        for middle in all_preorders(["b0", "b1"]):
            for phi_map in monotone_maps_between(source, middle):
                phi = MonotoneMap(source, middle, phi_map)
                cylinder = build(phi)
                for target in targets:
                    admissible = set()
                    for alpha in monotone_maps_between(source, target):
                        for beta in monotone_maps_between(middle, target):
                            if _cylinder_admissible(cylinder, phi, alpha, beta, target):
                                mapping = mediating_map(cylinder, alpha, beta, target)
                                admissible.add(_restrict(mapping, source, middle))

                    restricted = {
                        _restrict(mapping, source, middle)
                        for mapping in monotone_maps_between(cylinder.preorder, target)
                    }

                    assert restricted == admissible


# ----------------------------------------------------------------------
# 8. Sphere recognition
# ----------------------------------------------------------------------


class TestRecognition:
    @pytest.mark.parametrize("d", [0, 1, 2, 3])
    def test_sphere_homology(self, d):
        assert is_sphere_homology(homology(simplex_boundary(d + 1)), d)

    def test_subdivided_three_sphere_reduces_to_simplex_boundary(self):
        subdivided = simplex_boundary(4).barycentric_subdivision()
        verdict = is_sphere(subdivided, 3, budget=10_000)

        assert verdict.status is Status.VERIFIED
        final = replay(subdivided, verdict.witness["moves"])
        assert final.f_vector() == (5, 10, 10, 5)
        assert len(final.vertices) == 5
        assert verdict.budget_used <= 10_000

    def test_theta_is_refuted(self):
        assert is_sphere(theta(), 1).status is Status.REFUTED


# ----------------------------------------------------------------------
# 9. Coloring validation
# ----------------------------------------------------------------------


class TestColoring:
    def test_gauss_coloring_of_tetra_boundary(self):
        assert validate_coloring(gauss_coloring(simplex_boundary(3))).ok

    def test_single_edge_tamper(self):
        """
        Replacing one edge label by a different verified assembly, here the
        original followed by the symmetry 2 <-> 3 of G([0, 1]), is caught on a
        triangle through that edge.
        """
        coloring = gauss_coloring(simplex_boundary(3))
        labels = coloring.base.labels
        u = next(v for v, face in labels.items() if face == (0,))
        v = next(w for w, face in labels.items() if face == (0, 1))
        original = coloring.edge_label[(u, v)]
        swap = {2: 3, 3: 2}

        def symmetry(cell):
            return cell if cell == MARK else tuple(sorted(swap.get(x, x) for x in cell))

        tampered = verify_assembly(
            {x: symmetry(y) for x, y in original.mapping.items()},
            original.source,
            original.target,
        )
        assert tampered.verdict.status is Status.VERIFIED
        assert verify_marked(tampered)
        assert tampered.mapping != original.mapping

        edges = {**coloring.edge_label, (u, v): tampered}
        verdict = validate_coloring(Coloring(coloring.base, coloring.vertex_label, edges))

        assert verdict.status is Status.REFUTED
        assert verdict.witness["reason"] == "triangle does not commute"
        assert len(verdict.witness["simplex"]) == 3
        assert {u, v} <= set(verdict.witness["simplex"])
