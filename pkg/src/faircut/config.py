"""Tunable constants and seeded randomness."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

TRACE = 5
logging.addLevelName(TRACE, "TRACE")


@dataclass(frozen=True)
class Constants:
    c_T: float = 8.0  # MWU rounds: ceil(c_T ln n / a^2)
    c_beta: float = 64.0  # driver step: beta = alpha / (c_beta ln n)
    c_iter: float = 80.0  # driver iteration budget factor
    c_k: float = 1.0  # bound on the counter k
    c_depth: float = 4.0  # laminar family membership depth factor
    c_gamma: float = 1.0  # assumed family quality factor on large graphs
    quality_limit: int = 18  # largest vertex count for exact quality measurement
    mwu_max_rounds: int = 20000  # above this the exact pruning engine is used
    gh_iter_factor: float = 4.0  # GH step iterations: factor * ceil(log2 n)^3
    gh_depth_factor: float = 64.0  # GH depth guard: factor / eps * ceil(log2 n)^6
    gh_gamma_floor: float = 1e-6
    c_rounds: float = 2.0  # cut-matching rounds factor
    c_0: float = 1.0
    c_cross: float = 1.0
    trim_alpha: float = 0.1
    certify_limit: int = 14

    def with_overrides(self, overrides):
        known = {f.name: f.type for f in fields(self)}
        clean = {}
        for key, value in overrides.items():
            if key not in known:
                raise ValueError(f"unknown constant {key!r}")
            clean[key] = int(value) if known[key] == "int" else float(value)
        return replace(self, **clean)

    def as_dict(self):
        return asdict(self)


DEFAULT = Constants()


def clog2(x):
    """ceil(log2 x), with ceil(log2 1) = 0 and a floor of 0."""
    return max(0, math.ceil(math.log2(x))) if x > 1 else 0


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(None if seed is None else int(seed) & ((1 << 64) - 1))


def child_rng(rng):
    """Deterministic child generator, split off in call order."""
    return np.random.default_rng(int(make_rng(rng).integers(0, 2**63 - 1)))


def get_logger(name):
    log = logging.getLogger(name)
    level = os.environ.get("CUT_LOG", "").lower()
    if level and not logging.getLogger("faircut").handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(name)s %(levelname)s %(message)s"))
        root = logging.getLogger("faircut")
        root.addHandler(handler)
        root.setLevel({"error": logging.ERROR, "info": logging.INFO, "trace": TRACE}.get(level, logging.WARNING))
    return log
