"""Search budgets and determinism knobs.

Everything randomized in the package draws from a seeded generator; the
default seed is fixed so runs are reproducible, and all budget fields
can be overridden through the NCINV_BUDGET environment variable
("key=value" pairs joined by commas).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

DEFAULT_SEED = 1729


@dataclass(frozen=True)
class Budget:
    witness_size: int = 3  # max matrix size tried in witness search
    witness_attempts: int = 20  # random tuples per size
    scalar_attempts: int = 40  # random scalar tuples for centers
    random_points: int = 8  # agreement samples for the probable verdict
    seed: int = DEFAULT_SEED


DEFAULT_BUDGET = Budget()

_FIELD_NAMES = {f.name for f in fields(Budget)}


def parse_budget(text: str, base: Budget = DEFAULT_BUDGET) -> Budget:
    """Parse "key=value,key=value" over the Budget fields."""
    out = base
    text = text.strip()
    if not text:
        return out
    for chunk in text.split(","):
        if "=" not in chunk:
            raise ValueError(f"bad budget entry {chunk!r} (expected key=value)")
        key, _, value = chunk.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ValueError(f"unknown budget field {key!r}")
        out = replace(out, **{key: int(value.strip())})
    return out


def budget_from_env(env=None) -> Budget:
    env = os.environ if env is None else env
    raw = env.get("NCINV_BUDGET", "")
    return parse_budget(raw) if raw else DEFAULT_BUDGET
