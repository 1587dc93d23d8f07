"""Balanced k-way partitioning and simulated partitioned execution.

Parts are capacity-bounded max-heaps keyed by distance to a random centroid
tuple. A tuple goes to its nearest centroid's part; when that part is full,
whichever of the newcomer and the part's farthest member is farther is sent
to the nearest part that still has room.
"""

from __future__ import annotations

import heapq
import math
import random
import time
from dataclasses import dataclass, field
from typing import Sequence

from blockclean.cleaner import AgpConfig, stage_one
from blockclean.distance import MetricKind, values_distance
from blockclean.fusion import stage_two
from blockclean.mln_index import MlnIndex, build_index, empty_block
from blockclean.relation import Relation
from blockclean.report import RepairReport
from blockclean.rules import Rule
from blockclean.weights import WeightConfig, aggregate_weights, assign_prior_weights


@dataclass
class Part:
    part_id: int
    centroid_tid: int
    capacity: int
    # max-heap of (-distance, -tid)
    heap: list[tuple[float, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.heap)

    @property
    def full(self) -> bool:
        return len(self.heap) >= self.capacity

    def push(self, tid: int, dist: float) -> None:
        heapq.heappush(self.heap, (-dist, -tid))

    def top(self) -> tuple[int, float]:
        d, t = self.heap[0]
        return -t, -d

    def replace_top(self, tid: int, dist: float) -> tuple[int, float]:
        d, t = heapq.heapreplace(self.heap, (-dist, -tid))
        return -t, -d

    @property
    def tids(self) -> list[int]:
        return sorted(-t for _, t in self.heap)


def partition(
    rel: Relation, k: int, seed: int = 0, metric: MetricKind = MetricKind.LEVENSHTEIN
) -> list[Part]:
    n = len(rel)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"cannot split {n} tuples into {k} parts")
    capacity = math.ceil(n / k)
    rows = rel.by_tid()
    rng = random.Random(seed)
    centroids = rng.sample(rel.tids(), k)
    parts = [Part(i, tid, capacity) for i, tid in enumerate(centroids)]
    for p in parts:
        p.push(p.centroid_tid, 0.0)
    cvals = [rows[c].values for c in centroids]

    def dists(tid: int) -> list[float]:
        return [values_distance(rows[tid].values, cv, metric) for cv in cvals]

    taken = set(centroids)
    for row in rel.rows:
        if row.tid in taken:
            continue
        d = dists(row.tid)
        j = min(range(k), key=lambda i: (d[i], i))
        part = parts[j]
        if not part.full:
            part.push(row.tid, d[j])
            continue
        evicted, evicted_d = row.tid, d
        top_tid, top_dist = part.top()
        if d[j] < top_dist:
            part.replace_top(row.tid, d[j])
            evicted, evicted_d = top_tid, dists(top_tid)
        open_parts = [i for i in range(k) if not parts[i].full]
        t = min(open_parts, key=lambda i: (evicted_d[i], i))
        parts[t].push(evicted, evicted_d[t])
    return parts


def _gamma_key(rule_id: int, reason, result) -> tuple:
    return (rule_id, reason, result)


def gather(rel: Relation, rules: Sequence[Rule], indexes: Sequence[MlnIndex]) -> MlnIndex:
    """Union the cleaned part indexes into one, giving every piece one global weight.

    A piece of data found in several parts gets the tuple-count weighted mean
    of its part-local weights; a piece found in one part keeps its weight.
    """
    per_piece: dict[tuple, list[tuple[int, float]]] = {}
    for index in indexes:
        for block in index.blocks:
            for g in block.gammas():
                per_piece.setdefault(_gamma_key(block.rule_id, g.reason_values, g.result_values), []).append(
                    (g.count, g.weight)
                )

    blocks = []
    for rule in rules:
        merged = empty_block(rel, rule)
        for index in indexes:
            for g in index.block(rule.rule_id).gammas():
                merged.add(g.reason_values, g.result_values, g.tids)
        for g in merged.gammas():
            g.tids.sort()
            parts = per_piece[_gamma_key(rule.rule_id, g.reason_values, g.result_values)]
            g.weight = parts[0][1] if len(parts) == 1 else aggregate_weights(parts)
        blocks.append(merged)
    return MlnIndex(blocks)


def run_partitioned(
    rel: Relation,
    rules: Sequence[Rule],
    k: int,
    seed: int = 0,
    cfg: AgpConfig = AgpConfig(),
    wcfg: WeightConfig = WeightConfig(),
    metric: MetricKind = MetricKind.LEVENSHTEIN,
) -> tuple[Relation, RepairReport, list[dict]]:
    """Clean each part on its own, then fuse and dedupe over the gathered parts.

    Returns the clean relation, the repair report, and per-part timings
    (kept out of the report so that reports stay reproducible).
    """
    parts = partition(rel, k, seed, metric)
    report = RepairReport()
    indexes = []
    timings = []
    for part in parts:
        start = time.perf_counter()
        sub = rel.subset(part.tids)
        index = build_index(sub, rules)
        for block in index.blocks:
            assign_prior_weights(block)
        report.extend(stage_one(index, cfg, wcfg, metric))
        indexes.append(index)
        timings.append({"part_id": part.part_id, "seconds": time.perf_counter() - start})
        report.parts.append({"part_id": part.part_id, "centroid_tid": part.centroid_tid, "size": len(part)})
    global_index = gather(rel, rules, indexes)
    cleaned, final = stage_two(rel, global_index)
    report.extend(final)
    return cleaned, report, timings
