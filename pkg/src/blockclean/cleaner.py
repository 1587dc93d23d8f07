"""First cleaning stage, run independently on every block.

Abnormal group processing merges tiny groups (likely produced by errors in
the reason values) into their nearest normal group. Reliability-score
cleaning then keeps one piece of data per group and rewrites the others.
"""

from __future__ import annotations

from dataclasses import dataclass

from blockclean.distance import MetricKind, gamma_distance
from blockclean.mln_index import Block, Gamma, Key, MlnIndex
from blockclean.report import GammaRepair, MergeEvent, RepairEntry, RepairReport, Stage
from blockclean.weights import WeightConfig, assign_weights


@dataclass(frozen=True)
class AgpConfig:
    tau: int = 1

    def __post_init__(self) -> None:
        if self.tau < 0:
            raise ValueError("tau must be >= 0")


def detect_abnormal(block: Block, cfg: AgpConfig) -> list[Key]:
    """Flag groups backed by at most ``tau`` tuples; returns their keys in block order."""
    abnormal = []
    for key, group in block.groups.items():
        group.is_abnormal = group.tuple_count <= cfg.tau
        if group.is_abnormal:
            abnormal.append(key)
    return abnormal


def _nearest(star: Gamma, candidates: list[tuple[Key, Gamma]], metric: MetricKind) -> Key:
    return min(candidates, key=lambda kv: (gamma_distance(star, kv[1], metric), kv[0]))[0]


def merge_abnormal(block: Block, metric: MetricKind = MetricKind.LEVENSHTEIN) -> RepairReport:
    """Re-key every abnormal group into its nearest normal group.

    Group distance is the distance between the groups' most-supported pieces.
    If every group is abnormal, the best-supported one is kept as the target.
    """
    report = RepairReport()
    abnormal = [k for k, g in block.groups.items() if g.is_abnormal]
    if not abnormal:
        return report
    normal = [k for k, g in block.groups.items() if not g.is_abnormal]
    if not normal:
        promoted = min(abnormal, key=lambda k: (-block.groups[k].tuple_count, k))
        block.groups[promoted].is_abnormal = False
        abnormal.remove(promoted)
        normal = [promoted]

    targets = [(k, block.groups[k].star()) for k in normal]
    plan = [(k, _nearest(block.groups[k].star(), targets, metric)) for k in abnormal]

    names = block.rule.reason_attributes
    for src_key, dst_key in plan:
        group = block.groups.pop(src_key)
        tids = []
        for gamma in group.gammas.values():
            block.add(dst_key, gamma.result_values, gamma.tids, gamma.weight)
            tids.extend(gamma.tids)
            for tid in gamma.tids:
                for name, old, new in zip(names, src_key, dst_key):
                    if old != new:
                        report.entries.append(RepairEntry(tid, name, old, new, Stage.AGP, block.rule_id))
        report.merges.append(MergeEvent(block.rule_id, src_key, dst_key, tuple(sorted(tids))))
    for group in block.groups.values():
        for gamma in group.gammas.values():
            gamma.tids.sort()
    return report


def reliability_scores(gammas: list[Gamma], metric: MetricKind = MetricKind.LEVENSHTEIN) -> list[float]:
    """r-score of each piece: min over group-mates of normalized distance times weight.

    The distance to a mate is scaled by the piece's tuple count and divided by
    (largest count in the group) x (largest pairwise distance), so it lies in
    [0, 1].
    """
    n = len(gammas)
    if n < 2:
        return [0.0] * n
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = gamma_distance(gammas[i], gammas[j], metric)
    max_d = max(max(row) for row in d)
    max_n = max(g.count for g in gammas)
    z = max_n * max_d if max_d > 0 else 1.0
    scores = []
    for i, g in enumerate(gammas):
        nearest = min(g.count / z * d[i][j] for j in range(n) if j != i)
        scores.append(nearest * g.weight)
    return scores


def rsc_clean(block: Block, metric: MetricKind = MetricKind.LEVENSHTEIN) -> RepairReport:
    report = RepairReport()
    names = block.attributes
    for group in block.groups.values():
        if len(group.gammas) < 2:
            continue
        gammas = list(group.gammas.values())
        scores = reliability_scores(gammas, metric)
        best = min(range(len(gammas)), key=lambda i: (-scores[i], gammas[i].values))
        survivor = gammas[best]
        for i, loser in enumerate(gammas):
            if i == best:
                continue
            for tid in loser.tids:
                for name, old, new in zip(names, loser.values, survivor.values):
                    if old != new:
                        report.entries.append(RepairEntry(tid, name, old, new, Stage.RSC, block.rule_id))
            report.gamma_repairs.append(
                GammaRepair(block.rule_id, tuple(loser.tids), loser.values, survivor.values)
            )
            survivor.tids.extend(loser.tids)
        survivor.tids.sort()
        group.gammas = {survivor.result_values: survivor}
    return report


def clean_block(block: Block, cfg: AgpConfig, wcfg: WeightConfig, metric: MetricKind) -> RepairReport:
    report = RepairReport()
    detect_abnormal(block, cfg)
    report.extend(merge_abnormal(block, metric))
    assign_weights(block, wcfg)
    report.extend(rsc_clean(block, metric))
    return report


def stage_one(
    index: MlnIndex,
    cfg: AgpConfig = AgpConfig(),
    wcfg: WeightConfig = WeightConfig(),
    metric: MetricKind = MetricKind.LEVENSHTEIN,
) -> RepairReport:
    """Clean every block of ``index`` in place, leaving one rule-local version per tuple."""
    report = RepairReport()
    for block in index.blocks:
        report.extend(clean_block(block, cfg, wcfg, metric))
    return report
