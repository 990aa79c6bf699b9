"""Server configuration: budgets, sabotage delay, thresholds, auth."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from ..mutation import DEFAULT_OPERATORS
from ..runtime import Budget
from ..smells import SmellThresholds


@dataclass(frozen=True)
class ServerConfig:
    port: int = 8000
    data_dir: str = "./data"
    pack: Optional[str] = None  # None = the shipped default pack
    budget: Budget = field(default_factory=Budget)
    # sabotage fires a uniform random delay in [min, max] ms after activation;
    # (0, 0) triggers on the next request (headless/simulation behaviour)
    sabotage_delay_ms: tuple[int, int] = (60_000, 180_000)
    coverage_threshold: Optional[Fraction] = None  # overrides the pack when set
    smell_thresholds: SmellThresholds = field(default_factory=SmellThresholds)
    mutation_operators: tuple[str, ...] = DEFAULT_OPERATORS
    admin_token: str = ""
    session_ttl_s: int = 24 * 3600

    @staticmethod
    def load(path: str | Path | None = None, **overrides) -> "ServerConfig":
        data: dict = {}
        if path is not None:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        data.update({k: v for k, v in overrides.items() if v is not None})
        budget = data.get("budget", {})
        delay = data.get("sabotage_delay_ms", (60_000, 180_000))
        if isinstance(delay, (int, float)):
            delay = (int(delay), int(delay))
        else:
            delay = (int(delay[0]), int(delay[1]))
        smells = data.get("smell_thresholds", {})
        threshold = data.get("coverage_threshold")
        return ServerConfig(
            port=int(data.get("port", 8000)),
            data_dir=str(data.get("data_dir", "./data")),
            pack=data.get("pack"),
            budget=Budget(
                max_steps=int(budget.get("max_steps", 100_000)),
                max_wall_ms=int(budget.get("max_wall_ms", 2_000)),
            ),
            sabotage_delay_ms=delay,
            coverage_threshold=Fraction(str(threshold)) if threshold is not None else None,
            smell_thresholds=SmellThresholds(
                lazy_min_tests=int(smells.get("lazy_min_tests", 2)),
                eager_min_methods=int(smells.get("eager_min_methods", 3)),
            ),
            mutation_operators=tuple(data.get("mutation_operators", DEFAULT_OPERATORS)),
            admin_token=str(data.get("admin_token", "")),
            session_ttl_s=int(data.get("session_ttl_s", 24 * 3600)),
        )
