"""
Run configuration shared by the CLI and the MCP server.
"""

import logging
import os
from dataclasses import dataclass, replace
from typing import Any, Mapping, Optional

from .errors import InputError

logger = logging.getLogger(__name__)

DEFAULT_FLIP_BUDGET = 10_000
DEFAULT_ENUMERATION_BUDGET = 1_000_000
THREADS_ENV_VAR = "COMBIFOLD_THREADS"
SCHEMA = "combifold/1"


@dataclass(frozen=True)
class RunConfig:
    """
    Knobs that change how certificates are produced.

    Attributes:
        strict: Treat Unknown verdicts as failures
        budget: Maximum number of bistellar moves per sphere search
        threads: Worker threads for per-element checks (1 = sequential)
        enumeration_budget: Node budget for brute-force map enumeration
    """

    strict: bool = False
    budget: int = DEFAULT_FLIP_BUDGET
    threads: int = 1
    enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise InputError(f"budget must be non-negative, got {self.budget}", "--budget")
        if self.threads < 1:
            raise InputError(f"threads must be at least 1, got {self.threads}", "--threads")
        if self.enumeration_budget < 0:
            raise InputError(
                f"enumeration budget must be non-negative, got {self.enumeration_budget}",
                "--enumeration-budget",
            )

    @classmethod
    def from_env(
        cls, environ: Optional[Mapping[str, str]] = None, **overrides: Any
    ) -> "RunConfig":
        """
        Build a configuration, falling back to COMBIFOLD_THREADS for threads.

        Args:
            environ: Environment mapping (defaults to os.environ)
            **overrides: Explicit values; None entries are ignored

        Returns:
            RunConfig
        """
        env = os.environ if environ is None else environ
        values = {k: v for k, v in overrides.items() if v is not None}

        if "threads" not in values and env.get(THREADS_ENV_VAR):
            raw = env[THREADS_ENV_VAR]
            try:
                values["threads"] = int(raw)
            except ValueError:
                raise InputError(f"expected an integer, got {raw!r}", THREADS_ENV_VAR)
            logger.debug(f"threads={values['threads']} taken from {THREADS_ENV_VAR}")

        return cls(**values)

    def with_(self, **changes: Any) -> "RunConfig":
        return replace(self, **changes)
