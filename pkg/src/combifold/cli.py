"""
Command-line front end.

Every command reads JSON documents, runs one library operation and writes a
single result envelope:

    {"schema": "combifold/1", "command": ..., "status": ..., "certificate": ...,
     "result": ..., "inputs": {path: sha256}}

Exit codes: 0 Verified, 1 Refuted, 2 Unknown, 3 usage or input error.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

from . import io
from .alexandroff import (
    check_minimal_base,
    cyl_down,
    cyl_up,
    d_topology,
    inscribe,
    join,
    minimal_base,
    topology_from_cover,
)
from .assembly import compose
from .bundles import GaussFunctor, prism_complex, validate_coloring
from .config import SCHEMA, RunConfig
from .errors import BudgetExceededError, InputError, RefutedError, UnprovenError
from .poset import Poset, grothendieck_total, monotone_maps, to_dot
from .recognition import Status, Verdict, homology, is_ball, is_sphere

logger = logging.getLogger(__name__)

EXIT_ERROR = 3

ALEXANDROFF_OPERATIONS = (
    "base",
    "check-base",
    "join",
    "cyl-up",
    "cyl-down",
    "inscribe",
    "from-cover",
    "d-top",
)


@dataclass
class Result:
    """
    Outcome of one command.

    Attributes:
        command: Command name (alexandroff operations as "alexandroff <op>")
        status: Verified, Refuted, Unknown or Error
        certificate: Verdict document, or error details
        result: Command-specific payload
        exit_code: Process exit code
        inputs: Input name -> sha256 digest
        poset: Poset to export with --dot, if the command produced one
    """

    command: str
    status: str
    certificate: Dict[str, Any]
    result: Any = None
    exit_code: int = 0
    inputs: Dict[str, str] = field(default_factory=dict)
    poset: Optional[Poset] = None

    def envelope(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status,
            "certificate": self.certificate,
            "result": self.result,
            "inputs": self.inputs,
        }


def error_result(command: str, error: Exception, inputs: Optional[Dict[str, str]] = None) -> Result:
    """Map an exception to its result envelope and exit code."""
    inputs = inputs or {}
    if isinstance(error, RefutedError):
        verdict = error.verdict if error.verdict is not None else Verdict.refuted()
        certificate = {**verdict.to_dict(), "message": str(error)}
        return Result(command, Status.REFUTED.value, certificate, None, 1, inputs)
    if isinstance(error, UnprovenError):
        verdict = error.verdict if error.verdict is not None else Verdict.unknown()
        certificate = {**verdict.to_dict(), "message": str(error)}
        return Result(command, Status.UNKNOWN.value, certificate, None, 2, inputs)
    certificate = {
        "error": type(error).__name__,
        "message": str(error),
        "field": getattr(error, "field", None),
    }
    return Result(command, "Error", certificate, None, EXIT_ERROR, inputs)


Handler = Callable[[Dict[str, Any], Dict[str, Any]], Tuple[Verdict, Any, Optional[Poset]]]


class CommandRunner:
    """
    Runs commands on already-parsed JSON documents.

    Shared by the CLI and the MCP server. Documents are keyed by role
    ("input", "source", "target", "map", "first", "second", "inner", "outer").
    """

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or RunConfig()
        self._handlers: Dict[str, Handler] = {
            "validate-ball-complex": self._validate_ball_complex,
            "check-assembly": self._check_assembly,
            "compose": self._compose,
            "gauss": self._gauss,
            "tangent-total": self._tangent_total,
            "prism": self._prism,
            "is-sphere": self._is_sphere,
            "is-ball": self._is_ball,
            "homology": self._homology,
            "alexandroff": self._alexandroff,
            "validate-coloring": self._validate_coloring,
            "is-manifold": self._is_manifold,
            "subdivide": self._subdivide,
            "grothendieck": self._grothendieck,
            "maps": self._maps,
        }

    @property
    def commands(self) -> List[str]:
        return list(self._handlers)

    def run(
        self,
        command: str,
        documents: Dict[str, Any],
        options: Optional[Dict[str, Any]] = None,
        inputs: Optional[Dict[str, str]] = None,
    ) -> Result:
        """
        Run one command.

        Args:
            command: Command name, e.g. "is-sphere"
            documents: Role -> parsed JSON document
            options: Command options (dim, simplex, operation, ...)
            inputs: Name -> digest to echo; defaults to document digests

        Returns:
            Result; library exceptions are turned into Refuted, Unknown or
            Error results, never raised
        """
        options = options or {}
        if inputs is None:
            inputs = {role: io.document_digest(doc) for role, doc in sorted(documents.items())}
        name = command
        if command == "alexandroff" and options.get("operation"):
            name = f"alexandroff {options['operation']}"

        handler = self._handlers.get(command)
        if handler is None:
            return error_result(name, InputError(f"unknown command {command!r}", "command"), inputs)

        logger.debug(f"running {name} with {self.config}")
        try:
            verdict, payload, poset = handler(documents, options)
        except (InputError, BudgetExceededError, RefutedError, UnprovenError) as e:
            logger.info(f"{name}: {type(e).__name__}: {e}")
            return error_result(name, e, inputs)

        if self.config.strict and verdict.status is Status.UNKNOWN:
            try:
                verdict.require(strict=True, what=name)
            except UnprovenError as e:
                logger.info(f"{name}: {e}")
                return error_result(name, e, inputs)
        return Result(
            name, verdict.status.value, verdict.to_dict(), payload, verdict.exit_code, inputs, poset
        )

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _document(documents: Dict[str, Any], role: str = "input") -> Any:
        if role not in documents:
            raise InputError(f"missing input document {role!r}", role)
        return documents[role]

    def _ball_complex(self, document: Any, field_name: str = ""):
        cfg = self.config
        return io.ball_complex_from_json(
            document, field_name, strict=cfg.strict, budget=cfg.budget, threads=cfg.threads
        )

    def _assembly(self, document: Any):
        cfg = self.config
        return io.assembly_from_json(
            document, strict=cfg.strict, budget=cfg.budget, threads=cfg.threads
        )

    def _dimension(self, options: Dict[str, Any], default: int) -> int:
        dim = options.get("dim")
        if dim is None:
            return default
        if isinstance(dim, bool) or not isinstance(dim, int):
            raise InputError(f"expected an integer dimension, got {dim!r}", "dim")
        return dim

    @staticmethod
    def _face(options: Dict[str, Any], key: str) -> Optional[List[int]]:
        value = options.get(key)
        if value is None:
            return None
        if isinstance(value, str):
            try:
                return [int(v) for v in value.split(",") if v.strip()]
            except ValueError:
                raise InputError(f"expected comma-separated vertex ids, got {value!r}", key)
        if not isinstance(value, list) or not all(isinstance(v, int) for v in value):
            raise InputError(f"expected a list of vertex ids, got {value!r}", key)
        return value

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def _validate_ball_complex(self, documents, options):
        complex_ = self._ball_complex(self._document(documents))
        verdict = complex_.verdict
        payload = io.ball_complex_to_json(complex_)
        payload["elements_certificate"] = io.certificate_to_json(complex_.certificate)
        return verdict, payload, complex_.poset

    def _check_assembly(self, documents, options):
        if "input" in documents:
            document = documents["input"]
        else:
            raw_map = self._document(documents, "map")
            if isinstance(raw_map, dict):
                raw_map = raw_map.get("map")
            document = {
                "source": self._document(documents, "source"),
                "target": self._document(documents, "target"),
                "map": raw_map,
            }
        assembly = self._assembly(document)
        payload = io.assembly_to_json(assembly)
        payload["targets_certificate"] = io.certificate_to_json(assembly.certificate)
        return assembly.verdict, payload, assembly.target.poset

    def _compose(self, documents, options):
        first = self._assembly(self._document(documents, "first"))
        second = self._assembly(self._document(documents, "second"))
        cfg = self.config
        composite = compose(
            second, first, strict=cfg.strict, budget=cfg.budget, threads=cfg.threads
        )
        payload = io.assembly_to_json(composite)
        payload["targets_certificate"] = io.certificate_to_json(composite.certificate)
        return composite.verdict, payload, None

    def _functor(self, documents) -> GaussFunctor:
        manifold = io.complex_from_json(self._document(documents))
        return GaussFunctor(manifold, budget=self.config.budget, threads=self.config.threads)

    def _gauss(self, documents, options):
        functor = self._functor(documents)
        face = self._face(options, "simplex")
        if face is None:
            raise InputError("gauss needs a simplex", "simplex")
        larger = self._face(options, "to")
        if larger is None:
            obj = functor.object(face)
            verdict = Verdict.combine([functor.verdict, obj.verdict])
            return verdict, io.ball_complex_to_json(obj), obj.poset
        morphism = functor.morphism(face, larger)
        verdict = Verdict.combine([functor.verdict, morphism.verdict])
        payload = io.assembly_to_json(morphism)
        mark = morphism.source.marked
        payload["preserves_mark"] = morphism.mapping[mark] == morphism.target.marked
        return verdict, payload, None

    def _tangent_total(self, documents, options):
        functor = self._functor(documents)
        total = functor.total()
        verdicts = [functor.verdict]
        payload: Dict[str, Any] = {
            "poset": io.poset_to_json(total.poset),
            "complex": io.complex_summary(total.complex),
            "homology": io.homology_to_json(homology(total.complex)),
            "closed_pseudomanifold": total.complex.is_closed_pseudomanifold(),
        }
        if options.get("check_manifold"):
            manifold = total.complex.is_combinatorial_manifold(
                total.complex.dimension, budget=self.config.budget
            )
            payload["manifold"] = manifold.to_dict()
            verdicts.append(manifold)
        return Verdict.combine(verdicts), payload, total.poset

    def _prism(self, documents, options):
        cfg = self.config
        chain = io.prism_chain_from_json(
            self._document(documents), budget=cfg.budget, threads=cfg.threads
        )
        prism = prism_complex(chain, strict=cfg.strict, budget=cfg.budget, threads=cfg.threads)
        payload = io.ball_complex_to_json(prism.complex)
        payload["projection"] = [
            [io.encode_id(cell), list(face)] for cell, face in prism.projection.items()
        ]
        return prism.complex.verdict, payload, prism.complex.poset

    def _is_sphere(self, documents, options):
        complex_ = io.complex_from_json(self._document(documents))
        dimension = self._dimension(options, complex_.dimension)
        verdict = is_sphere(complex_, dimension, budget=self.config.budget)
        return verdict, io.complex_summary(complex_), None

    def _is_ball(self, documents, options):
        complex_ = io.complex_from_json(self._document(documents))
        dimension = self._dimension(options, complex_.dimension)
        verdict = is_ball(complex_, dimension, budget=self.config.budget)
        return verdict, io.complex_summary(complex_), None

    def _homology(self, documents, options):
        complex_ = io.complex_from_json(self._document(documents))
        groups = homology(complex_)
        payload = {**io.complex_summary(complex_), "homology": io.homology_to_json(groups)}
        return Verdict.verified({"method": "smith-normal-form"}), payload, None

    def _is_manifold(self, documents, options):
        complex_ = io.complex_from_json(self._document(documents))
        verdict = complex_.is_combinatorial_manifold(
            self._dimension(options, complex_.dimension),
            allow_boundary=bool(options.get("allow_boundary")),
            budget=self.config.budget,
        )
        return verdict, io.complex_summary(complex_), None

    def _subdivide(self, documents, options):
        complex_ = io.complex_from_json(self._document(documents))
        stellar = self._face(options, "stellar")
        if stellar is not None:
            result = complex_.stellar_subdivide(stellar)
            method = "stellar"
        else:
            iterations = options.get("iterations", 1)
            if isinstance(iterations, bool) or not isinstance(iterations, int) or iterations < 0:
                raise InputError(
                    f"expected a non-negative integer, got {iterations!r}", "iterations"
                )
            result = complex_.barycentric_subdivision(iterations)
            method = "barycentric"
        payload = {**io.complex_to_json(result), "summary": io.complex_summary(result)}
        return Verdict.verified({"method": method}), payload, None

    def _grothendieck(self, documents, options):
        diagram = io.diagram_from_json(self._document(documents))
        total = grothendieck_total(diagram)
        payload = {**io.poset_to_json(total), "height": total.height}
        return Verdict.verified({"elements": len(total)}), payload, total

    def _maps(self, documents, options):
        source = io.poset_from_json(self._document(documents, "source"), "source")
        target = io.poset_from_json(self._document(documents, "target"), "target")
        maps = list(monotone_maps(source, target, budget=self.config.enumeration_budget))
        payload = {"count": len(maps), "maps": [io.map_to_json(m) for m in maps]}
        return Verdict.verified({"maps": len(maps)}), payload, None

    def _validate_coloring(self, documents, options):
        coloring = io.coloring_from_json(self._document(documents), budget=self.config.budget)
        verdict = validate_coloring(coloring)
        payload = {
            "vertices": len(coloring.vertex_label),
            "edges": len(coloring.edge_label),
            "coloring": io.coloring_to_json(coloring),
        }
        return verdict, payload, None

    def _alexandroff(self, documents, options):
        operation = options.get("operation")
        if operation not in ALEXANDROFF_OPERATIONS:
            raise InputError(f"unknown alexandroff operation {operation!r}", "operation")

        if operation == "base":
            preorder = io.preorder_from_json(self._document(documents))
            return Verdict.verified(), io.cover_to_json(minimal_base(preorder)), None

        if operation == "check-base":
            verdict, preorder = check_minimal_base(io.cover_from_json(self._document(documents)))
            payload = None if preorder is None else io.preorder_to_json(preorder)
            return verdict, payload, None

        if operation == "from-cover":
            preorder = topology_from_cover(io.cover_from_json(self._document(documents)))
            return Verdict.verified(), io.preorder_to_json(preorder), None

        if operation == "d-top":
            ground, subset = io.d_topology_args(self._document(documents))
            return Verdict.verified(), io.preorder_to_json(d_topology(ground, subset)), None

        if operation in ("cyl-up", "cyl-down"):
            phi = io.monotone_map_from_json(self._document(documents))
            cylinder = cyl_up(phi) if operation == "cyl-up" else cyl_down(phi)
            verdict = Verdict.verified({"direction": cylinder.direction})
            return verdict, io.preorder_to_json(cylinder.preorder), None

        if operation == "join":
            first = io.preorder_from_json(self._document(documents, "first"), "first")
            second = io.preorder_from_json(self._document(documents, "second"), "second")
            result = join(first, second)
            points = result.preorder.points
            payload = {
                "preorder": io.preorder_to_json(result.preorder),
                "pairs": [
                    [io.point_set_to_json(s, points) for s in triple] for triple in result.pairs
                ],
            }
            if not result.is_bijection():
                reason = "pairing is not a bijection onto the join base"
                return Verdict.refuted({"reason": reason}), payload, None
            return Verdict.verified({"pairs": len(result.pairs)}), payload, None

        inner = io.preorder_from_json(self._document(documents, "inner"), "inner")
        outer = io.preorder_from_json(self._document(documents, "outer"), "outer")
        table = inscribe(inner, outer)
        payload = [
            {
                "member": io.point_set_to_json(member, inner.points),
                "image": io.point_set_to_json(image, outer.points),
            }
            for member, image in table.items()
        ]
        return Verdict.verified({"members": len(table)}), payload, None


# ----------------------------------------------------------------------
# argparse front end
# ----------------------------------------------------------------------


class ArgumentParser(argparse.ArgumentParser):
    """Parser that reports usage errors with exit code 3 and an envelope."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        envelope = error_result(self.prog, InputError(message, "argv")).envelope()
        sys.stdout.write(io.dumps(envelope))
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--strict", action="store_true", help="treat Unknown verdicts as failures")
    common.add_argument("--budget", type=int, default=None, help="bistellar flip budget per search")
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: $COMBIFOLD_THREADS or 1)",
    )
    common.add_argument(
        "--enumeration-budget",
        type=int,
        default=None,
        help="partial assignments allowed when enumerating maps",
    )
    common.add_argument("--output", type=Path, default=None, help="write the result envelope here")
    common.add_argument("--format", choices=["json"], default="json")
    common.add_argument(
        "--dot", type=Path, default=None, help="write the Hasse diagram of the result"
    )
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    return common


def build_parser() -> ArgumentParser:
    """Build the combifold argument parser."""
    common = _common_flags()
    parser = ArgumentParser(
        prog="combifold",
        description="Abstract ball complexes, assemblies and combinatorial tangent bundles.",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return commands.add_parser(name, help=help_text, parents=[common])

    add("validate-ball-complex", "certify a poset as an abstract ball complex").add_argument(
        "input", type=Path
    )

    p = add("check-assembly", "verify an assembly map between ball complexes")
    p.add_argument("input", type=Path, nargs="?", help="document with source, target and map")
    p.add_argument("--source", type=Path)
    p.add_argument("--target", type=Path)
    p.add_argument("--map", type=Path)

    p = add("compose", "compose two assemblies and re-verify the composite")
    p.add_argument("first", type=Path)
    p.add_argument("second", type=Path)

    p = add("gauss", "Gauss functor object G(s) or morphism G(s <= t)")
    p.add_argument("input", type=Path)
    p.add_argument("--simplex", required=True, help="comma-separated vertices of s")
    p.add_argument("--to", default=None, help="comma-separated vertices of t")

    p = add("tangent-total", "total space of the Gauss diagram")
    p.add_argument("input", type=Path)
    p.add_argument("--check-manifold", action="store_true")

    add("prism", "prismatic decomposition of an assembly chain").add_argument("input", type=Path)

    for name, text in (("is-sphere", "PL sphere recognition"), ("is-ball", "PL ball recognition")):
        p = add(name, text)
        p.add_argument("input", type=Path)
        p.add_argument("--dim", type=int, default=None)

    add("homology", "integral simplicial homology").add_argument("input", type=Path)

    p = add("is-manifold", "combinatorial manifold recognition")
    p.add_argument("input", type=Path)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--allow-boundary", action="store_true")

    p = add("subdivide", "barycentric or stellar subdivision")
    p.add_argument("input", type=Path)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--iterations", type=int, default=1)
    group.add_argument("--stellar", default=None, help="comma-separated vertices of the face")

    add("grothendieck", "total poset of a poset diagram").add_argument("input", type=Path)
    p = add("maps", "enumerate all monotone maps between two posets")
    p.add_argument("source", type=Path)
    p.add_argument("target", type=Path)
    add("validate-coloring", "check a coloring of a locally ordered triangulation").add_argument(
        "input", type=Path
    )

    alexandroff = commands.add_parser("alexandroff", help="finite Alexandroff space operations")
    operations = alexandroff.add_subparsers(
        dest="operation", required=True, parser_class=ArgumentParser
    )
    for name in ("base", "check-base", "cyl-up", "cyl-down", "from-cover", "d-top"):
        operations.add_parser(name, parents=[common]).add_argument("input", type=Path)
    p = operations.add_parser("join", parents=[common])
    p.add_argument("first", type=Path)
    p.add_argument("second", type=Path)
    p = operations.add_parser("inscribe", parents=[common])
    p.add_argument("inner", type=Path)
    p.add_argument("outer", type=Path)

    add("serve", "run the MCP tool server on stdio")
    return parser


_DOCUMENT_ROLES = ("input", "source", "target", "map", "first", "second", "inner", "outer")
_OPTION_NAMES = (
    "dim",
    "simplex",
    "to",
    "check_manifold",
    "allow_boundary",
    "iterations",
    "stellar",
    "operation",
)


def _load_documents(args: argparse.Namespace) -> Tuple[Dict[str, Any], Dict[str, str]]:
    documents: Dict[str, Any] = {}
    inputs: Dict[str, str] = {}
    for role in _DOCUMENT_ROLES:
        path = getattr(args, role, None)
        if path is None:
            continue
        documents[role] = io.load_json(path)
        inputs[str(path)] = io.file_digest(path)
    return documents, inputs


def _write(args: argparse.Namespace, result: Result) -> None:
    text = io.dumps(result.envelope())
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
        logger.info(f"wrote result to {args.output}")
    else:
        sys.stdout.write(text)
    if args.dot is not None:
        if result.poset is None:
            logger.warning(f"{result.command} produced no poset; --dot ignored")
        else:
            args.dot.write_text(to_dot(result.poset), encoding="utf-8")


def execute(args: argparse.Namespace) -> int:
    """
    Run a parsed (non-serve) command and write its envelope.

    Returns:
        Process exit code
    """
    command = args.command
    name = f"alexandroff {args.operation}" if command == "alexandroff" else command
    inputs: Dict[str, str] = {}
    try:
        config = RunConfig.from_env(
            strict=args.strict,
            budget=args.budget,
            threads=args.threads,
            enumeration_budget=args.enumeration_budget,
        )
        documents, inputs = _load_documents(args)
        if command == "check-assembly" and "input" not in documents:
            missing = [r for r in ("source", "target", "map") if r not in documents]
            if missing:
                raise InputError(
                    f"check-assembly needs a document or --{' --'.join(missing)}", "argv"
                )
        options = {k: getattr(args, k) for k in _OPTION_NAMES if getattr(args, k, None) is not None}
    except (InputError, OSError) as e:
        result = error_result(name, e if isinstance(e, InputError) else InputError(str(e)), inputs)
    else:
        result = CommandRunner(config).run(command, documents, options, inputs)

    logger.info(format_status(result))
    _write(args, result)
    return result.exit_code


def format_status(result: Result) -> str:
    """One-line summary for logs."""
    element = result.certificate.get("witness", {}).get("element") if result.certificate else None
    suffix = f" at {element}" if element else ""
    return f"{result.command}: {result.status}{suffix}"


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


__all__ = [
    "ArgumentParser",
    "CommandRunner",
    "EXIT_ERROR",
    "Result",
    "build_parser",
    "error_result",
    "execute",
    "format_status",
    "parse_args",
]
