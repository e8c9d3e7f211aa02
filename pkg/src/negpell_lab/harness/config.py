"""Experiment configuration and soft thresholds."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

EXPERIMENTS = (
    "density_scan",
    "rank_distribution",
    "markov_check",
    "oracle_crosscheck",
    "redei_fuzz",
    "combi_suite",
    "equidist",
    "model",
)

# What --limit means per experiment, and its default.
LIMIT_MEANING = {
    "density_scan": ("d < limit", 10**6),
    "rank_distribution": ("d < limit", 10**6),
    "markov_check": ("discriminant <= limit", 4 * 10**5),
    "oracle_crosscheck": ("discriminant <= limit", 4 * 10**5),
    "redei_fuzz": ("number of random triples", 500),
    "combi_suite": ("number of random additive systems", 10**4),
    "equidist": ("random targets per scan", 100),
    "model": ("largest m for exact identities", 20),
}

DEFAULT_THRESHOLDS: dict[str, float] = {
    # density of D^- inside D, checked at X = density_at when the scan reaches it
    "density_at": 10**7,
    "density_lo": 0.50,
    "density_hi": 0.70,
    # total variation of the 4-rank histogram against the limit law
    "rk4_at": 10**6,
    "rk4_tv": 0.05,
    # Markov transitions: largest |empirical - model| over rows with enough data
    "markov_min_rows": 200,
    "markov_abs": 0.10,
    # prebox scans: relative deviation of |X(a)| from |X| / 2^k
    "prebox_pair_dev": 0.10,
    "prebox_scan_dev": 0.05,
    "prebox_aux_dev": 0.50,
    # Art_2 consistency sweep bound (discriminant)
    "art2_delta": 10**5,
}

CACHE_ENV = "NEGPELL_LAB_CACHE"


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    limit: int
    seed: int = 0
    thresholds: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    out: Path | None = None
    cache: Path | None = None
    threads: int = 1
    ordering: str = "radicand"

    def __post_init__(self) -> None:
        if self.name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.limit < 2:
            raise ValueError("limit must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.ordering not in ("radicand", "discriminant"):
            raise ValueError("ordering is 'radicand' or 'discriminant'")
        for k, v in self.thresholds.items():
            if not v > 0:
                raise ValueError(f"threshold {k} must be positive")

    @classmethod
    def make(cls, name: str, limit: int | None = None, **kw) -> "ExperimentConfig":
        if name not in LIMIT_MEANING:
            raise ValueError(f"unknown experiment {name!r}")
        lim = LIMIT_MEANING[name][1] if limit is None else int(limit)
        th = dict(DEFAULT_THRESHOLDS)
        th.update(kw.pop("thresholds", None) or {})
        return cls(name, lim, thresholds=th, **kw)

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def manifest_view(self) -> dict:
        """Fields that determine the results (threads and paths excluded)."""
        return {
            "experiment": self.name,
            "limit": self.limit,
            "limit_meaning": LIMIT_MEANING[self.name][0],
            "seed": self.seed,
            "ordering": self.ordering,
            "thresholds": dict(sorted(self.thresholds.items())),
        }


def load_thresholds(path: str | os.PathLike | None) -> dict[str, float]:
    th = dict(DEFAULT_THRESHOLDS)
    if path is None:
        return th
    with open(path, encoding="utf-8") as fh:
        user = json.load(fh)
    unknown = set(user) - set(th)
    if unknown:
        raise ValueError(f"unknown thresholds: {sorted(unknown)}")
    th.update({k: float(v) for k, v in user.items()})
    return th


def resolve_cache(flag: str | os.PathLike | None) -> Path | None:
    """--cache wins; otherwise the environment variable; otherwise no cache."""
    if flag:
        return Path(flag)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None
