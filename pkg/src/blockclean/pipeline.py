"""End-to-end cleaning: index, first stage, fusion and dedupe."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from blockclean.cleaner import AgpConfig, stage_one
from blockclean.distance import MetricKind
from blockclean.fusion import stage_two
from blockclean.mln_index import build_index
from blockclean.partition import run_partitioned
from blockclean.relation import Relation
from blockclean.report import RepairReport
from blockclean.rules import Rule
from blockclean.weights import WeightConfig, assign_prior_weights


@dataclass(frozen=True)
class CleanConfig:
    agp: AgpConfig = field(default_factory=AgpConfig)
    weights: WeightConfig = field(default_factory=WeightConfig)
    metric: MetricKind = MetricKind.LEVENSHTEIN
    parts: int = 1
    seed: int = 0


@dataclass
class CleanResult:
    relation: Relation
    report: RepairReport
    timings: list[dict] = field(default_factory=list)


def clean(rel: Relation, rules: Sequence[Rule], cfg: CleanConfig = CleanConfig()) -> CleanResult:
    if cfg.parts > 1:
        cleaned, report, timings = run_partitioned(
            rel, rules, cfg.parts, cfg.seed, cfg.agp, cfg.weights, cfg.metric
        )
        return CleanResult(cleaned, report, timings)
    index = build_index(rel, rules)
    for block in index.blocks:
        assign_prior_weights(block)
    report = stage_one(index, cfg.agp, cfg.weights, cfg.metric)
    cleaned, final = stage_two(rel, index)
    report.extend(final)
    return CleanResult(cleaned, report)
