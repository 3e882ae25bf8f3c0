"""
Entry point for the combifold command line.

Usage:
    combifold <command> [flags] <input.json> ...
    combifold serve                      # MCP tool server on stdio

    or with uv:
    uv run combifold is-sphere sphere.json --budget 1000
"""

import asyncio
import logging
import sys
from typing import Any, Optional, Sequence

from .cli import execute, parse_args


def setup_logging(verbose: bool = False) -> None:
    """Configure logging for the command line and the server."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            # stdout carries the result envelope (or the MCP stdio transport)
            logging.StreamHandler(sys.stderr)
        ],
    )


async def serve(threads: Optional[int] = None, **overrides: Any) -> None:
    """Run the MCP server until stdin closes; overrides are RunConfig fields."""
    from .config import RunConfig
    from .mcp_server import CombifoldMCPServer

    logger = logging.getLogger(__name__)
    server = CombifoldMCPServer(RunConfig.from_env(threads=threads, **overrides))
    logger.info("Starting combifold MCP server")
    try:
        await server.run()
    except KeyboardInterrupt:
        logger.info("Received interrupt signal")
    finally:
        logger.info("combifold MCP server stopped")


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point: parse arguments, run one command, exit with its code."""
    args = parse_args(argv)
    setup_logging(args.verbose)
    logger = logging.getLogger(__name__)

    if args.command == "serve":
        try:
            asyncio.run(
                serve(
                    args.threads,
                    strict=args.strict,
                    budget=args.budget,
                    enumeration_budget=args.enumeration_budget,
                )
            )
        except Exception as e:
            logger.error(f"Server error: {e}", exc_info=True)
            sys.exit(1)
        return

    sys.exit(execute(args))


if __name__ == "__main__":
    main()
