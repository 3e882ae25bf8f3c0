"""
Unit tests for the JSON codec.
"""

import json

import pytest

from builders import square_poset
from combifold import io
from combifold.alexandroff import Preorder, SetCover
from combifold.errors import InputError, RefutedError
from combifold.poset import Poset
from combifold.recognition import HomologyGroup
from combifold.simplicial import SimplicialComplex, simplex_boundary


class TestFiles:
    """Reading documents and hashing inputs."""

    def test_load_fixture(self, fixtures_dir):
        document = io.load_json(fixtures_dir / "tetra_boundary.json")

        assert io.complex_from_json(document) == simplex_boundary(3)

    def test_malformed_json_reports_position(self, fixtures_dir):
        path = fixtures_dir / "malformed.json"
        with pytest.raises(InputError) as info:
            io.load_json(path)

        location = info.value.field
        assert location.startswith(f"{path}:")
        line, column = location.rsplit(":", 2)[1:]
        assert int(line) >= 1 and int(column) >= 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError, match="cannot read input"):
            io.load_json(tmp_path / "absent.json")

    def test_document_digest_ignores_key_order(self):
        assert io.document_digest({"a": 1, "b": [2]}) == io.document_digest({"b": [2], "a": 1})

    def test_file_digest(self, write_json):
        path = write_json("x.json", {"facets": [[0]]})

        assert len(io.file_digest(path)) == 64

    def test_dumps_is_sorted(self):
        text = io.dumps({"b": 1, "a": 2})

        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")


class TestIds:
    def test_lists_become_tuples(self):
        assert io.decode_id([0, [1, "x"]], "id") == (0, (1, "x"))

    @pytest.mark.parametrize("value", [True, 1.5, None, {"a": 1}])
    def test_bad_ids(self, value):
        with pytest.raises(InputError, match="strings or integers"):
            io.decode_id(value, "elements[0]")

    def test_encode(self):
        assert io.encode_id(3) == 3
        assert io.encode_id((0, 1)) == "(0|1)"
        assert io.encode_id("v") == "v"


class TestPosets:
    """Posets, maps and diagrams."""

    def test_round_trip(self):
        poset = square_poset()

        assert io.poset_from_json(io.poset_to_json(poset)) == poset

    def test_missing_elements(self):
        with pytest.raises(InputError) as info:
            io.poset_from_json({"covers": []})
        assert "missing field 'elements'" in str(info.value)

    def test_wrong_type_names_field(self):
        with pytest.raises(InputError) as info:
            io.poset_from_json({"elements": "abc"}, "source")
        assert info.value.field == "source.elements"

    def test_bad_pair(self):
        with pytest.raises(InputError) as info:
            io.poset_from_json({"elements": ["a"], "covers": [["a"]]})
        assert info.value.field == "covers[0]"

    def test_map_mapped_twice(self):
        with pytest.raises(InputError, match="mapped twice"):
            io.map_from_json([["a", "x"], ["a", "y"]])

    def test_diagram(self, fixtures_dir):
        diagram = io.diagram_from_json(io.load_json(fixtures_dir / "diagram.json"))

        assert diagram.transition("p", "q") == {"x": "y0"}
        assert len(diagram.fibers["q"]) == 2


class TestComplexes:
    def test_local_order_round_trip(self):
        complex_ = SimplicialComplex([[0, 1, 2]], local_order=[(2, 0), (0, 1)])
        document = io.complex_to_json(complex_)

        assert document["local_order"] == [[2, 0], [0, 1]]
        assert io.complex_from_json(document).ordered([0, 1, 2]) == (2, 0, 1)

    @pytest.mark.parametrize("pair", [["a", 1], [0.9, 1], [False, 1]])
    def test_local_order_ids_are_type_checked(self, pair):
        document = {"facets": [[0, 1], [1, 2], [0, 2]], "local_order": [[1, 2], pair]}
        with pytest.raises(InputError, match="must be integers") as info:
            io.complex_from_json(document)
        assert info.value.field == "local_order[1]"

    def test_local_order_unknown_vertex(self):
        document = {"facets": [[0, 1]], "local_order": [[0, 5]]}
        with pytest.raises(InputError, match="not in the complex"):
            io.complex_from_json(document)

    def test_facets_must_be_lists(self):
        with pytest.raises(InputError) as info:
            io.complex_from_json({"facets": [[0, 1], 2]})
        assert info.value.field == "facets[1]"

    def test_labels_are_encoded(self):
        document = io.complex_to_json(simplex_boundary(2).barycentric_subdivision())

        assert document["labels"]["0"] == "(0)"

    def test_summary(self):
        assert io.complex_summary(simplex_boundary(3)) == {
            "dimension": 2,
            "f_vector": [4, 6, 4],
            "euler_characteristic": 2,
        }

    def test_homology(self):
        (group,) = io.homology_to_json([HomologyGroup(1, 2, (3,))])

        assert group["group"] == "Z^2 + Z/3"


class TestBallComplexes:
    """Ball complexes, assemblies and chains."""

    def test_marked_square(self, fixtures_dir):
        complex_ = io.ball_complex_from_json(io.load_json(fixtures_dir / "square.json"))

        assert complex_.marked == "F"
        assert io.ball_complex_to_json(complex_)["f_vector"] == [4, 4, 1]

    def test_unknown_mark(self):
        with pytest.raises(InputError, match="unknown element id"):
            io.ball_complex_from_json({"elements": ["a"], "marked": "z"})

    def test_assembly(self, fixtures_dir):
        assembly = io.assembly_from_json(io.load_json(fixtures_dir / "collapse.json"))

        assert assembly.verdict.ok
        assert io.assembly_to_json(assembly)["map"][0] == ["v0", "a"]

    def test_bad_map_refuted(self, fixtures_dir):
        with pytest.raises(RefutedError) as info:
            io.assembly_from_json(io.load_json(fixtures_dir / "bad_map.json"))
        assert info.value.witness["element"] == "a"

    def test_prism_chain(self, fixtures_dir):
        chain = io.prism_chain_from_json(io.load_json(fixtures_dir / "prism_chain.json"))

        assert chain.length == 1
        assert chain.verdict.ok

    def test_prism_chain_map_count(self):
        document = {"complexes": [{"elements": ["a"]}, {"elements": ["b"]}], "maps": []}
        with pytest.raises(InputError, match="expected 1 maps"):
            io.prism_chain_from_json(document)

    def test_coloring_round_trip(self):
        point = {"elements": ["p"]}
        document = {
            "base": {"facets": [[0, 1]], "local_order": [[0, 1]]},
            "vertex_labels": [{"vertex": 0, "complex": point}, {"vertex": 1, "complex": point}],
            "edge_labels": [{"edge": [0, 1], "map": [["p", "p"]]}],
        }
        coloring = io.coloring_from_json(document)

        edge_labels = io.coloring_to_json(coloring)["edge_labels"]

        assert edge_labels == [{"edge": [0, 1], "map": [["p", "p"]]}]

    def test_coloring_edge_needs_labels(self):
        document = {
            "base": {"facets": [[0, 1]], "local_order": [[0, 1]]},
            "vertex_labels": [],
            "edge_labels": [{"edge": [0, 1], "map": []}],
        }
        with pytest.raises(InputError, match="unlabeled endpoint"):
            io.coloring_from_json(document)

    def test_boolean_vertex_rejected(self):
        """JSON true is not vertex 1."""
        point = {"elements": ["p"]}
        document = {
            "base": {"facets": [[0, 1]], "local_order": [[0, 1]]},
            "vertex_labels": [{"vertex": True, "complex": point}],
            "edge_labels": [],
        }
        with pytest.raises(InputError, match="expected int") as info:
            io.coloring_from_json(document)
        assert info.value.field == "vertex_labels[0].vertex"

    def test_boolean_edge_endpoint_rejected(self):
        point = {"elements": ["p"]}
        document = {
            "base": {"facets": [[0, 1]], "local_order": [[0, 1]]},
            "vertex_labels": [{"vertex": 0, "complex": point}, {"vertex": 1, "complex": point}],
            "edge_labels": [{"edge": [False, True], "map": [["p", "p"]]}],
        }
        with pytest.raises(InputError) as info:
            io.coloring_from_json(document)
        assert info.value.field == "edge_labels[0].edge"


class TestAlexandroff:
    def test_preorder(self, fixtures_dir):
        preorder = io.preorder_from_json(io.load_json(fixtures_dir / "chain_preorder.json"))

        assert preorder.leq("x", "z")
        assert io.preorder_from_json(io.preorder_to_json(preorder)) == preorder

    def test_cover(self):
        cover = SetCover(["x", "y", "z"], [["y", "x"], ["z"]])
        document = io.cover_to_json(cover)

        assert document["members"] == [["x", "y"], ["z"]]
        assert io.cover_from_json(document) == cover

    def test_cover_members_must_be_lists(self):
        with pytest.raises(InputError) as info:
            io.cover_from_json({"ground": ["x"], "members": ["x"]})
        assert info.value.field == "members[0]"

    def test_monotone_map(self):
        chain = {"points": ["x", "y"], "leq": [["x", "y"]]}
        phi = io.monotone_map_from_json(
            {"source": chain, "target": chain, "map": [["x", "x"], ["y", "y"]]}
        )

        assert phi("y") == "y"
        assert phi.source == Preorder(["x", "y"], [("x", "y")])

    def test_d_topology_args(self):
        assert io.d_topology_args({"ground": [1, 2], "subset": [1]}) == ([1, 2], [1])

    def test_json_output_is_serialisable(self):
        preorder = Preorder([(0, 1), "y"], [((0, 1), "y")])

        assert json.loads(json.dumps(io.preorder_to_json(preorder)))["points"] == ["(0|1)", "y"]


def test_poset_ids_may_be_integers():
    poset = io.poset_from_json({"elements": [0, 1], "covers": [[0, 1]]})

    assert poset == Poset([0, 1], [(0, 1)])
