"""Second cleaning stage: fuse each tuple's rule-local versions, then drop duplicates.

Every tuple has at most one version per block. Versions are merged one after
another; when the next version disagrees with what has been merged so far on
a shared attribute, the highest-weight piece of that block that agrees is
used instead, or the merge order is abandoned. The fusion with the largest
product of weights (the fusion score) wins over all merge orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from blockclean.mln_index import Block, Gamma, MlnIndex
from blockclean.relation import Relation, Row
from blockclean.report import RepairEntry, RepairReport, Stage


@dataclass(frozen=True)
class Version:
    block: Block
    gamma: Gamma

    @property
    def rule_id(self) -> int:
        return self.block.rule_id

    def mapping(self) -> dict[str, str]:
        return dict(zip(self.block.attributes, self.gamma.values))


@dataclass
class VersionSet:
    tid: int
    versions: list[Version] = field(default_factory=list)


@dataclass
class FusionResult:
    tid: int
    fused_values: dict[str, str]
    f_score: float
    explored: int = 0


def f_score(weights: Sequence[float]) -> float:
    if not weights:
        raise ValueError("fusion score of an empty version list is undefined")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    return math.prod(weights)


def conflicts(fused: dict[str, str], block: Block, gamma: Gamma) -> bool:
    for name, value in zip(block.attributes, gamma.values):
        current = fused.get(name)
        if current is not None and current != value:
            return True
    return False


class _Candidates:
    """Per-block pieces ordered by descending weight, then smallest values."""

    def __init__(self) -> None:
        self._cache: dict[int, list[Gamma]] = {}

    def __call__(self, block: Block) -> list[Gamma]:
        ranked = self._cache.get(id(block))
        if ranked is None:
            ranked = sorted(block.gammas(), key=lambda g: (-g.weight, g.values))
            self._cache[id(block)] = ranked
        return ranked


def substitute(fused: dict[str, str], version: Version, ranked: list[Gamma]) -> Gamma | None:
    for cand in ranked:
        if cand is version.gamma:
            continue
        if not conflicts(fused, version.block, cand):
            return cand
    return None


def merge_step(
    fused: dict[str, str], version: Version, ranked: list[Gamma]
) -> tuple[dict[str, str], float] | None:
    """Merge one version into a partial fusion; None when no agreeing piece exists."""
    gamma = version.gamma
    if conflicts(fused, version.block, gamma):
        gamma = substitute(fused, version, ranked)
        if gamma is None:
            return None
    merged = dict(fused)
    merged.update(zip(version.block.attributes, gamma.values))
    return merged, gamma.weight


def fuse_tuple(row: Row, vs: VersionSet, index: MlnIndex | None = None, _ranked: _Candidates | None = None) -> FusionResult:
    """Best fusion of a tuple's versions over all merge orders.

    Orders are explored depth-first with versions in ascending rule id; the
    first fusion reaching the maximum score wins ties. Since every weight is
    at most 1, a partial fusion can never beat the incumbent once its score
    is not above it, and such branches are skipped.
    """
    ranked = _ranked or _Candidates()
    versions = sorted(vs.versions, key=lambda v: v.rule_id)
    if not versions:
        return FusionResult(row.tid, {}, 0.0)

    prunable = all(g.weight <= 1.0 for v in versions for g in ranked(v.block))
    best: list = [0.0, None]
    explored = 0

    def search(fused: dict[str, str], score: float, remaining: tuple[int, ...]) -> None:
        nonlocal explored
        if not remaining:
            if score > best[0]:
                best[0], best[1] = score, fused
            return
        if score == 0.0 or (prunable and best[1] is not None and score <= best[0]):
            return
        for pos, idx in enumerate(remaining):
            explored += 1
            step = merge_step(fused, versions[idx], ranked(versions[idx].block))
            if step is None:
                continue
            merged, weight = step
            search(merged, score * weight, remaining[:pos] + remaining[pos + 1 :])

    search({}, 1.0, tuple(range(len(versions))))
    if best[1] is None:
        return FusionResult(row.tid, {}, 0.0, explored)
    return FusionResult(row.tid, best[1], best[0], explored)


def version_sets(index: MlnIndex, tids: Sequence[int]) -> dict[int, VersionSet]:
    out = {tid: VersionSet(tid) for tid in tids}
    for block in sorted(index.blocks, key=lambda b: b.rule_id):
        for tid, gamma in block.gamma_of().items():
            if tid in out:
                out[tid].versions.append(Version(block, gamma))
    return out


def _has_conflict(vs: VersionSet) -> bool:
    seen: dict[str, str] = {}
    for v in vs.versions:
        for name, value in v.mapping().items():
            if seen.setdefault(name, value) != value:
                return True
    return False


def dedupe(rel: Relation) -> tuple[Relation, RepairReport]:
    """Drop tuples identical to an earlier one, keeping the smallest tid."""
    report = RepairReport()
    first: dict[tuple[str, ...], int] = {}
    kept = []
    for row in rel.rows:
        owner = first.setdefault(row.values, row.tid)
        if owner == row.tid:
            kept.append(row)
        else:
            report.entries.append(RepairEntry(row.tid, "", "", "", Stage.DEDUPE, duplicate_of=owner))
    return Relation(rel.schema, tuple(kept)), report


def stage_two(rel: Relation, index: MlnIndex) -> tuple[Relation, RepairReport]:
    """Rewrite every tuple to its best fusion, then remove exact duplicates."""
    report = RepairReport()
    sets = version_sets(index, rel.tids())
    ranked = _Candidates()
    names = rel.names
    new_values: dict[int, tuple[str, ...]] = {}
    for row in rel.rows:
        vs = sets[row.tid]
        if _has_conflict(vs):
            report.conflict_tids.append(row.tid)
        result = fuse_tuple(row, vs, index, ranked)
        values = tuple(result.fused_values.get(n, v) for n, v in zip(names, row.values))
        for name, old, new in zip(names, row.values, values):
            if old != new:
                report.entries.append(RepairEntry(row.tid, name, old, new, Stage.FSCR))
        new_values[row.tid] = values
    fused = rel.with_values(new_values)
    cleaned, dup_report = dedupe(fused)
    report.extend(dup_report)
    return cleaned, report
