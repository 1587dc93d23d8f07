"""Weights of pieces of data.

A piece's weight stands in for the probability that its values are clean.
Only the ordering of weights and their products matter downstream, so a
deterministic count-driven scheme replaces iterative MLN weight learning:
priors are tuple-count shares within a block, and the optional refinement
pushes weight from minority pieces toward the majority piece of each group.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

from blockclean.mln_index import Block


class WeightMode(str, enum.Enum):
    PRIOR_ONLY = "prior"
    REFINED = "refined"


@dataclass(frozen=True)
class WeightConfig:
    mode: WeightMode = WeightMode.PRIOR_ONLY
    epsilon: float = 1e-6
    refine_iters: int = 5

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")


def assign_prior_weights(block: Block) -> None:
    """Set each piece's weight to its share of the block's tuples."""
    total = block.tuple_count()
    if total == 0:
        return
    for g in block.gammas():
        g.weight = g.count / total


def refine_weights(block: Block, cfg: WeightConfig) -> None:
    if cfg.mode is WeightMode.PRIOR_ONLY or cfg.refine_iters == 0:
        return
    gammas = list(block.gammas())
    if not gammas:
        return
    # signed dominance of each piece over its group-mates, by tuple count
    delta = {}
    for group in block.groups.values():
        members = list(group.gammas.values())
        for g in members:
            smaller = sum(1 for o in members if o.count < g.count)
            larger = sum(1 for o in members if o.count > g.count)
            delta[id(g)] = (smaller - larger) / len(members)
    for _ in range(cfg.refine_iters):
        raw = [g.weight * (1.0 + delta[id(g)]) + cfg.epsilon for g in gammas]
        norm = math.fsum(raw)
        for g, w in zip(gammas, raw):
            g.weight = w / norm


def assign_weights(block: Block, cfg: WeightConfig) -> None:
    assign_prior_weights(block)
    refine_weights(block, cfg)


def aggregate_weights(per_part: Iterable[tuple[int, float]]) -> float:
    """Tuple-count weighted mean of part-local weights of one piece of data."""
    parts = sorted(per_part)
    total = sum(n for n, _ in parts)
    if total <= 0:
        raise ValueError("cannot aggregate weights: no part holds any tuple of this piece")
    return math.fsum(n * w for n, w in parts) / total
