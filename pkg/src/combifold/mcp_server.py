"""
MCP Server: combifold checks as tools for AI agents.

Every tool takes inline JSON documents, runs the same CommandRunner as the
command line and returns the result envelope as JSON text.
"""

import json
import logging
from typing import Any, Dict, List, Optional, Tuple

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from .cli import ALEXANDROFF_OPERATIONS, CommandRunner, Result, error_result
from .config import RunConfig
from .errors import InputError

logger = logging.getLogger(__name__)

_COMPLEX = {
    "type": "object",
    "description": 'Simplicial complex: {"facets": [[0, 1, 2], ...], "local_order": [[u, v], ...]}',
}
_POSET = {
    "type": "object",
    "description": (
        'Poset: {"elements": [...], "covers": [[a, b], ...], "marked": optional element}'
    ),
}
_DIM = {"type": "integer", "description": "Expected dimension (defaults to the complex dimension)"}

# tool name -> (command, description, document properties, option properties, required)
_TOOLS: Dict[str, Tuple[str, str, Dict[str, Any], Dict[str, Any], List[str]]] = {
    "is_sphere": (
        "is-sphere",
        "Decide whether a pure simplicial complex is a PL sphere. "
        "Verified results in dimension >= 3 carry a replayable bistellar move list.",
        {"complex": _COMPLEX},
        {"dim": _DIM},
        ["complex"],
    ),
    "is_ball": (
        "is-ball",
        "Decide whether a pure simplicial complex is a PL ball "
        "(boundary sphere plus cone closure).",
        {"complex": _COMPLEX},
        {"dim": _DIM},
        ["complex"],
    ),
    "homology": (
        "homology",
        "Integral simplicial homology of a complex (Smith normal form).",
        {"complex": _COMPLEX},
        {},
        ["complex"],
    ),
    "validate_ball_complex": (
        "validate-ball-complex",
        "Certify a poset as an abstract ball complex: every strict lower ideal "
        "must be a sphere of dimension rank - 1.",
        {"poset": _POSET},
        {},
        ["poset"],
    ),
    "check_assembly": (
        "check-assembly",
        "Verify that a cell map between ball complexes is an assembly "
        "(monotone, surjective, every principal-ideal preimage a ball).",
        {
            "source": _POSET,
            "target": _POSET,
            "map": {"type": "array", "description": "[[source cell, target cell], ...]"},
        },
        {},
        ["source", "target", "map"],
    ),
    "gauss_object": (
        "gauss",
        "Gauss functor object G(s) of a closed combinatorial manifold, or the "
        "morphism G(s <= t) when 'to' is given.",
        {"complex": _COMPLEX},
        {
            "simplex": {"type": "array", "items": {"type": "integer"}},
            "to": {"type": "array", "items": {"type": "integer"}},
        },
        ["complex", "simplex"],
    ),
    "tangent_total": (
        "tangent-total",
        "Total space of the Gauss diagram of a closed combinatorial manifold.",
        {"complex": _COMPLEX},
        {"check_manifold": {"type": "boolean", "default": False}},
        ["complex"],
    ),
    "prism_complex": (
        "prism",
        "Prismatic decomposition of a chain of assemblies.",
        {
            "chain": {
                "type": "object",
                "description": 'Chain: {"complexes": [poset, ...], "maps": [[[x, y], ...], ...]}',
            }
        },
        {},
        ["chain"],
    ),
    "alexandroff": (
        "alexandroff",
        "Finite Alexandroff space operations: " + ", ".join(ALEXANDROFF_OPERATIONS) + ".",
        {
            "input": {"type": "object", "description": "Preorder, cover or map document"},
            "first": {"type": "object"},
            "second": {"type": "object"},
            "inner": {"type": "object"},
            "outer": {"type": "object"},
        },
        {"operation": {"type": "string", "enum": list(ALEXANDROFF_OPERATIONS)}},
        ["operation"],
    ),
    "monotone_maps": (
        "maps",
        "Enumerate every monotone map between two finite posets, "
        "within the configured enumeration budget.",
        {"source": _POSET, "target": _POSET},
        {},
        ["source", "target"],
    ),
    "validate_coloring": (
        "validate-coloring",
        "Check a coloring of a locally ordered triangulation by ball complexes "
        "and assemblies (endpoints and commuting triangles).",
        {"coloring": {"type": "object"}},
        {},
        ["coloring"],
    ),
}

# MCP argument name -> CommandRunner document role
_ROLES = {"complex": "input", "poset": "input", "chain": "input", "coloring": "input"}


class CombifoldMCPServer:
    """
    MCP front end for combifold.

    Architecture:
    - Exposes one MCP tool per check
    - Translates tool arguments into CommandRunner documents and options
    - Returns the same result envelope as the command line
    """

    def __init__(self, config: Optional[RunConfig] = None):
        """
        Initialize MCP server.

        Args:
            config: Run configuration applied to every tool call
        """
        self.runner = CommandRunner(config)
        self.mcp_server = Server("combifold")

        # Register MCP tools
        self._register_tools()

    @staticmethod
    def tools() -> List[Tool]:
        """All tools with their input schemas."""
        tools = []
        for name, (_, description, documents, options, required) in _TOOLS.items():
            tools.append(
                Tool(
                    name=name,
                    description=description,
                    inputSchema={
                        "type": "object",
                        "properties": {**documents, **options},
                        "required": required,
                    },
                )
            )
        return tools

    def _register_tools(self) -> None:
        """Register all MCP tools with their handlers."""

        @self.mcp_server.list_tools()
        async def list_tools() -> List[Tool]:
            """List all available tools."""
            return self.tools()

        @self.mcp_server.call_tool()
        async def call_tool(name: str, arguments: Dict[str, Any]) -> List[TextContent]:
            """Route tool calls to the command runner."""
            return [TextContent(type="text", text=self.handle(name, arguments))]

    def dispatch(self, name: str, arguments: Dict[str, Any]) -> Result:
        """
        Run one tool call.

        Raises:
            InputError: If the tool is unknown
        """
        if name not in _TOOLS:
            raise InputError(f"Unknown tool: {name}", "name")
        command, _, document_keys, option_keys, _ = _TOOLS[name]
        documents = {
            _ROLES.get(key, key): arguments[key] for key in document_keys if key in arguments
        }
        options = {key: arguments[key] for key in option_keys if key in arguments}
        return self.runner.run(command, documents, options)

    def handle(self, name: str, arguments: Dict[str, Any]) -> str:
        """Tool call to JSON text; errors become Error envelopes."""
        try:
            result = self.dispatch(name, arguments or {})
        except Exception as e:
            logger.error(f"Error executing tool {name}: {e}", exc_info=True)
            result = error_result(name, e)
        return self._format_result(result)

    def _format_result(self, result: Result) -> str:
        """Format a result envelope as JSON text."""
        return json.dumps(result.envelope(), indent=2, sort_keys=True)

    async def run(self) -> None:
        """Run the MCP server with stdio transport."""
        async with stdio_server() as (read_stream, write_stream):
            await self.mcp_server.run(
                read_stream,
                write_stream,
                self.mcp_server.create_initialization_options(),
            )
