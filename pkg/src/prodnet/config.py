"""
Runtime settings for prodnet.

Values come from the process environment (optionally populated from a ``.env``
file by python-dotenv). Library functions take explicit keyword arguments and
fall back to these settings when an argument is omitted.
"""

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class Settings(BaseModel):
    """Process-wide defaults, overridable per call and per CLI flag."""

    threads: int = Field(0, ge=0, description="Worker cap; 0 means one per CPU")
    log_level: str = Field("WARNING", description="Root log level used by the CLI")
    tolerance: float = Field(1e-9, gt=0, description="Absolute residual tolerance")
    max_sweeps: int = Field(10_000, ge=1, description="Propagation sweep cap")
    lp_variable_limit: int = Field(200_000, ge=1, description="Medium-run LP size guard")
    oracle_max_techs: int = Field(20, ge=1, description="Minimum-disruption oracle size guard")
    routing_budget: int = Field(1_000_000, ge=1, description="Pure-routing enumeration guard")
    frontier_budget: int = Field(200_000, ge=1, description="Frontier sequence-search guard")

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "Settings":
        load_dotenv(dotenv_path)
        env = {
            "threads": os.getenv("PRODNET_THREADS"),
            "log_level": os.getenv("PRODNET_LOG_LEVEL"),
            "tolerance": os.getenv("PRODNET_TOLERANCE"),
            "max_sweeps": os.getenv("PRODNET_MAX_SWEEPS"),
            "lp_variable_limit": os.getenv("PRODNET_LP_VARIABLE_LIMIT"),
            "oracle_max_techs": os.getenv("PRODNET_ORACLE_MAX_TECHS"),
            "routing_budget": os.getenv("PRODNET_ROUTING_BUDGET"),
            "frontier_budget": os.getenv("PRODNET_FRONTIER_BUDGET"),
        }
        return cls(**{key: value for key, value in env.items() if value not in (None, "")})

    def worker_count(self) -> int:
        """Resolve ``threads`` to a concrete number of workers."""
        if self.threads == 0:
            return os.cpu_count() or 1
        return self.threads


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()
