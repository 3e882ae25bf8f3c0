"""
JSON codec for every combifold value.

Element ids in input documents are strings or integers; JSON lists are read
as tuples so faces can be written as vertex lists. On output, tuple ids
(faces, Grothendieck pairs, prism cells) are printed as "(a|b|...)".
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Tuple, Union

from .alexandroff import MonotoneMap, Preorder, SetCover
from .assembly import Assembly, verify_assembly
from .ballcomplex import BallComplex, validate
from .bundles import Coloring, PrismChain
from .config import DEFAULT_FLIP_BUDGET
from .errors import InputError
from .poset import Element, Poset, PosetDiagram, format_id
from .recognition import HomologyGroup, Verdict
from .simplicial import SimplicialComplex

logger = logging.getLogger(__name__)

JSON = Dict[str, Any]


# ----------------------------------------------------------------------
# Files and digests
# ----------------------------------------------------------------------


def load_json(path: Union[str, Path]) -> Any:
    """
    Read a JSON document.

    Raises:
        InputError: If the file is missing or does not parse; the field is
            "path:line:column" for syntax errors
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read input: {e.strerror}", str(path))
    return parse_json(text, str(path))


def parse_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(e.msg, f"{source}:{e.lineno}:{e.colno}")


def file_digest(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def document_digest(document: Any) -> str:
    """Digest of a document in canonical form (sorted keys, no whitespace)."""
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def dumps(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ----------------------------------------------------------------------
# Ids and small helpers
# ----------------------------------------------------------------------


def decode_id(value: Any, field: str) -> Element:
    if isinstance(value, bool):
        raise InputError(f"element ids must be strings or integers, got {value!r}", field)
    if isinstance(value, (str, int)):
        return value
    if isinstance(value, list):
        return tuple(decode_id(v, f"{field}[{i}]") for i, v in enumerate(value))
    raise InputError(f"element ids must be strings or integers, got {value!r}", field)


def encode_id(element: Element) -> Union[str, int]:
    if isinstance(element, int) and not isinstance(element, bool):
        return element
    return format_id(element)


def _require(document: Any, key: str, kind: Union[type, Tuple[type, ...]], field: str = "") -> Any:
    if not isinstance(document, dict):
        raise InputError("expected a JSON object", field or None)
    if key not in document:
        raise InputError(f"missing field {key!r}", field or None)
    value = document[key]
    names = kind if isinstance(kind, tuple) else (kind,)
    if not isinstance(value, kind) or (isinstance(value, bool) and bool not in names):
        expected = " or ".join(k.__name__ for k in names)
        raise InputError(f"expected {expected}", f"{field}.{key}" if field else key)
    return value


def _pairs(raw: Any, field: str) -> List[Tuple[Element, Element]]:
    if not isinstance(raw, list):
        raise InputError("expected a list of pairs", field)
    pairs = []
    for i, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError("expected a pair [a, b]", f"{field}[{i}]")
        pairs.append(
            (decode_id(pair[0], f"{field}[{i}][0]"), decode_id(pair[1], f"{field}[{i}][1]"))
        )
    return pairs


def _prefixed(field: str, key: str) -> str:
    return f"{field}.{key}" if field else key


# ----------------------------------------------------------------------
# Posets and diagrams
# ----------------------------------------------------------------------


def poset_from_json(document: Any, field: str = "") -> Poset:
    raw = _require(document, "elements", list, field)
    elements = [decode_id(e, f"{_prefixed(field, 'elements')}[{i}]") for i, e in enumerate(raw)]
    covers = _pairs(document.get("covers", []), _prefixed(field, "covers"))
    return Poset(elements, covers)


def poset_to_json(poset: Poset) -> JSON:
    return {
        "elements": [encode_id(e) for e in poset.elements],
        "covers": [[encode_id(a), encode_id(b)] for a, b in poset.covers],
    }


def map_from_json(raw: Any, field: str = "map") -> Dict[Element, Element]:
    mapping: Dict[Element, Element] = {}
    for i, (a, b) in enumerate(_pairs(raw, field)):
        if a in mapping:
            raise InputError(f"element {format_id(a)!r} is mapped twice", f"{field}[{i}]")
        mapping[a] = b
    return mapping


def map_to_json(mapping: Mapping[Element, Element]) -> List[List[Any]]:
    return [[encode_id(a), encode_id(b)] for a, b in mapping.items()]


def diagram_from_json(document: Any) -> PosetDiagram:
    """
    {"base": poset, "fibers": [{"element": p, "poset": poset}...],
     "transitions": [{"from": p, "to": q, "map": [[x, y]...]}...]}
    """
    base = poset_from_json(_require(document, "base", dict), "base")
    fibers: Dict[Element, Poset] = {}
    for i, entry in enumerate(_require(document, "fibers", list)):
        field = f"fibers[{i}]"
        element = decode_id(_require(entry, "element", (str, int, list), field), f"{field}.element")
        fibers[element] = poset_from_json(_require(entry, "poset", dict, field), f"{field}.poset")
    transitions: Dict[Tuple[Element, Element], Dict[Element, Element]] = {}
    for i, entry in enumerate(document.get("transitions", [])):
        field = f"transitions[{i}]"
        p = decode_id(_require(entry, "from", (str, int, list), field), f"{field}.from")
        q = decode_id(_require(entry, "to", (str, int, list), field), f"{field}.to")
        transitions[(p, q)] = map_from_json(_require(entry, "map", list, field), f"{field}.map")
    return PosetDiagram(base, fibers, transitions)


# ----------------------------------------------------------------------
# Simplicial complexes and verdicts
# ----------------------------------------------------------------------


def complex_from_json(document: Any, field: str = "") -> SimplicialComplex:
    raw = _require(document, "facets", list, field)
    for i, facet in enumerate(raw):
        if not isinstance(facet, list):
            raise InputError("expected a list of vertex ids", f"{_prefixed(field, 'facets')}[{i}]")
    order = document.get("local_order")
    pairs = None
    if order is not None:
        pairs = []
        for i, pair in enumerate(order):
            location = f"{_prefixed(field, 'local_order')}[{i}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise InputError("expected a pair [u, v]", location)
            for x in pair:
                if isinstance(x, bool) or not isinstance(x, int):
                    raise InputError(f"vertex ids must be integers, got {x!r}", location)
            pairs.append((pair[0], pair[1]))
    return SimplicialComplex(raw, local_order=pairs)


def complex_to_json(complex_: SimplicialComplex) -> JSON:
    document: JSON = {"facets": [list(f) for f in complex_.facets]}
    if complex_.local_order is not None:
        document["local_order"] = [list(p) for p in complex_.local_order]
    if complex_.labels is not None:
        document["labels"] = {str(v): encode_id(label) for v, label in complex_.labels.items()}
    return document


def complex_summary(complex_: SimplicialComplex) -> JSON:
    return {
        "dimension": complex_.dimension,
        "f_vector": list(complex_.f_vector()),
        "euler_characteristic": complex_.euler_characteristic(),
    }


def homology_to_json(groups: Iterable[HomologyGroup]) -> List[JSON]:
    return [{**g.to_dict(), "group": str(g)} for g in groups]


def certificate_to_json(certificate: Mapping[Element, Verdict]) -> JSON:
    return {format_id(e): v.to_dict() for e, v in certificate.items()}


# ----------------------------------------------------------------------
# Ball complexes and assemblies
# ----------------------------------------------------------------------


def ball_complex_from_json(
    document: Any,
    field: str = "",
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
) -> BallComplex:
    poset = poset_from_json(document, field)
    marked = document.get("marked")
    if marked is not None:
        marked = decode_id(marked, _prefixed(field, "marked"))
        poset.index(marked)
    return validate(poset, strict=strict, budget=budget, threads=threads, marked=marked)


def ball_complex_to_json(complex_: BallComplex) -> JSON:
    document = poset_to_json(complex_.poset)
    document["dim"] = complex_.dim
    document["f_vector"] = list(complex_.f_vector())
    if complex_.marked is not None:
        document["marked"] = encode_id(complex_.marked)
    return document


def assembly_to_json(assembly: Assembly) -> JSON:
    return {
        "source": ball_complex_to_json(assembly.source),
        "target": ball_complex_to_json(assembly.target),
        "map": map_to_json(assembly.mapping),
    }


def assembly_from_json(
    document: Any,
    strict: bool = False,
    budget: int = DEFAULT_FLIP_BUDGET,
    threads: int = 1,
) -> Assembly:
    """{"source": complex, "target": complex, "map": [[x, y]...]}, verified."""
    source, target = (
        ball_complex_from_json(_require(document, role, dict), role, budget=budget, threads=threads)
        for role in ("source", "target")
    )
    mapping = map_from_json(_require(document, "map", list))
    return verify_assembly(mapping, source, target, strict=strict, budget=budget, threads=threads)


def prism_chain_from_json(
    document: Any, budget: int = DEFAULT_FLIP_BUDGET, threads: int = 1
) -> PrismChain:
    """{"complexes": [complex...], "maps": [[[x, y]...]...]}, one map per step."""
    raw = _require(document, "complexes", list)
    complexes = [
        ball_complex_from_json(c, f"complexes[{i}]", budget=budget, threads=threads)
        for i, c in enumerate(raw)
    ]
    maps = document.get("maps", [])
    if len(maps) != len(complexes) - 1:
        raise InputError(f"expected {len(complexes) - 1} maps, got {len(maps)}", "maps")
    steps = [
        verify_assembly(
            map_from_json(m, f"maps[{i}]"), complexes[i], complexes[i + 1], budget=budget
        )
        for i, m in enumerate(maps)
    ]
    return PrismChain(tuple(complexes), tuple(steps))


def coloring_from_json(document: Any, budget: int = DEFAULT_FLIP_BUDGET) -> Coloring:
    """
    {"base": complex with local_order,
     "vertex_labels": [{"vertex": v, "complex": complex}...],
     "edge_labels": [{"edge": [u, v], "map": [[x, y]...]}...]}
    """
    base = complex_from_json(_require(document, "base", dict), "base")
    labels: Dict[int, BallComplex] = {}
    for i, entry in enumerate(_require(document, "vertex_labels", list)):
        field = f"vertex_labels[{i}]"
        vertex = _require(entry, "vertex", int, field)
        labels[vertex] = ball_complex_from_json(
            _require(entry, "complex", dict, field), f"{field}.complex", budget=budget
        )
    edges: Dict[Tuple[int, int], Assembly] = {}
    for i, entry in enumerate(_require(document, "edge_labels", list)):
        field = f"edge_labels[{i}]"
        edge = _require(entry, "edge", list, field)
        if len(edge) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in edge):
            raise InputError("expected [u, v]", f"{field}.edge")
        u, v = edge
        if u not in labels or v not in labels:
            raise InputError(f"edge {edge} has an unlabeled endpoint", f"{field}.edge")
        mapping = map_from_json(_require(entry, "map", list, field), f"{field}.map")
        edges[(u, v)] = verify_assembly(mapping, labels[u], labels[v], budget=budget)
    return Coloring(base, labels, edges)


def coloring_to_json(coloring: Coloring) -> JSON:
    return {
        "base": complex_to_json(coloring.base),
        "vertex_labels": [
            {"vertex": v, "complex": ball_complex_to_json(label)}
            for v, label in sorted(coloring.vertex_label.items())
        ],
        "edge_labels": [
            {"edge": [u, v], "map": map_to_json(a.mapping)}
            for (u, v), a in sorted(coloring.edge_label.items())
        ],
    }


# ----------------------------------------------------------------------
# Alexandroff spaces
# ----------------------------------------------------------------------


def preorder_from_json(document: Any, field: str = "") -> Preorder:
    raw = _require(document, "points", list, field)
    points = [decode_id(p, f"{_prefixed(field, 'points')}[{i}]") for i, p in enumerate(raw)]
    return Preorder(points, _pairs(document.get("leq", []), _prefixed(field, "leq")))


def preorder_to_json(preorder: Preorder) -> JSON:
    return {
        "points": [encode_id(p) for p in preorder.points],
        "leq": [[encode_id(x), encode_id(y)] for x, y in preorder.pairs()],
    }


def cover_from_json(document: Any, field: str = "") -> SetCover:
    raw = _require(document, "ground", list, field)
    ground = [decode_id(p, f"{_prefixed(field, 'ground')}[{i}]") for i, p in enumerate(raw)]
    members = []
    for i, member in enumerate(_require(document, "members", list, field)):
        if not isinstance(member, list):
            raise InputError("expected a list of points", f"{_prefixed(field, 'members')}[{i}]")
        members.append([decode_id(p, f"{_prefixed(field, 'members')}[{i}]") for p in member])
    return SetCover(ground, members)


def point_set_to_json(points: Iterable[Element], order: Iterable[Element]) -> List[Any]:
    chosen = set(points)
    return [encode_id(p) for p in order if p in chosen]


def cover_to_json(cover: SetCover) -> JSON:
    return {
        "ground": [encode_id(p) for p in cover.ground],
        "members": [point_set_to_json(m, cover.ground) for m in cover.members],
    }


def monotone_map_from_json(document: Any) -> MonotoneMap:
    """{"source": preorder, "target": preorder, "map": [[x, y]...]}"""
    source = preorder_from_json(_require(document, "source", dict), "source")
    target = preorder_from_json(_require(document, "target", dict), "target")
    return MonotoneMap(source, target, map_from_json(_require(document, "map", list)))


def d_topology_args(document: Any) -> Tuple[List[Element], List[Element]]:
    """{"ground": [...], "subset": [...]}"""
    ground, subset = (
        [decode_id(p, f"{key}[{i}]") for i, p in enumerate(_require(document, key, list))]
        for key in ("ground", "subset")
    )
    return ground, subset

