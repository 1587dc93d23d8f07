"""Error injection, synthetic benchmark data, and repair-quality metrics."""

from __future__ import annotations

import enum
import json
import math
import random
import string
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from blockclean.mln_index import build_index
from blockclean.relation import Relation
from blockclean.report import RepairReport, Stage
from blockclean.rules import Rule, parse_rule_lines


class ErrorKind(str, enum.Enum):
    TYPO = "TYPO"
    REPLACEMENT = "REPLACEMENT"


@dataclass(frozen=True)
class ErrorSpec:
    rate: float = 0.05
    replacement_ratio: float = 0.5
    seed: int = 0
    # None means every attribute
    target_attributes: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("error rate must be in [0, 1]")
        if not 0.0 <= self.replacement_ratio <= 1.0:
            raise ValueError("replacement ratio must be in [0, 1]")


@dataclass(frozen=True)
class InjectedError:
    tid: int
    attribute: str
    clean_value: str
    dirty_value: str
    kind: ErrorKind


@dataclass
class GroundTruth:
    clean: Relation
    errors: list[InjectedError] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"errors": [{**asdict(e), "kind": e.kind.value} for e in self.errors]}

    @classmethod
    def from_json(cls, clean: Relation, data: dict) -> GroundTruth:
        errs = [
            InjectedError(e["tid"], e["attribute"], e["clean_value"], e["dirty_value"], ErrorKind(e["kind"]))
            for e in data.get("errors", [])
        ]
        return cls(clean, errs)


def rule_attributes(rules: Iterable[Rule]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for r in rules:
        for a in r.attributes:
            seen.setdefault(a)
    return tuple(seen)


def error_counts(n_rows: int, n_targets: int, spec: ErrorSpec) -> tuple[int, int]:
    """(replacements, typos) to inject for a table of the given size."""
    total = math.floor(spec.rate * n_rows * n_targets + 1e-9)
    replacements = math.floor(spec.replacement_ratio * total + 1e-9)
    return replacements, total - replacements


def inject_errors(rel: Relation, spec: ErrorSpec) -> tuple[Relation, GroundTruth]:
    """Corrupt distinct cells with typos (one deleted character) and replacements.

    A replacement swaps a value for a different value of the same attribute's
    domain as observed in ``rel``. Cells that cannot take the error kind still
    owed (single-character values for typos, single-valued domains for
    replacements) are passed over in favour of the next drawn cell.
    """
    targets = spec.target_attributes if spec.target_attributes is not None else tuple(rel.names)
    positions = [rel.position(a) for a in targets]
    n_rep, n_typo = error_counts(len(rel), len(targets), spec)
    if n_rep + n_typo == 0:
        return rel, GroundTruth(rel)

    rng = random.Random(spec.seed)
    domains = {p: sorted({row.values[p] for row in rel.rows}) for p in positions}
    cells = [(row.tid, p) for row in rel.rows for p in positions]
    rng.shuffle(cells)

    by_tid = rel.by_tid()
    dirty = {row.tid: list(row.values) for row in rel.rows}
    errors = []
    for tid, p in cells:
        if n_rep == 0 and n_typo == 0:
            break
        value = by_tid[tid].values[p]
        if n_rep and len(domains[p]) >= 2:
            choices = [v for v in domains[p] if v != value]
            new, kind = rng.choice(choices), ErrorKind.REPLACEMENT
            n_rep -= 1
        elif n_typo and len(value) >= 2:
            cut = rng.randrange(len(value))
            new, kind = value[:cut] + value[cut + 1 :], ErrorKind.TYPO
            n_typo -= 1
        else:
            continue
        dirty[tid][p] = new
        errors.append(InjectedError(tid, rel.names[p], value, new, kind))
    if n_rep or n_typo:
        raise ValueError(f"not enough eligible cells: {n_rep} replacements and {n_typo} typos left over")
    errors.sort(key=lambda e: (e.tid, rel.position(e.attribute)))
    return rel.with_values(dirty), GroundTruth(rel, errors)


# ---------------------------------------------------------------------------
# synthetic data


_SYLLABLES = (
    "SPRING", "FIELD", "WOOD", "LAKE", "HILL", "PORT", "VILLE", "TON", "BURG", "DALE",
    "MONT", "FORD", "BROOK", "GLEN", "HAVEN", "RIDGE", "WATER", "STONE", "ASH", "OAK",
)


def _distinct(rng: random.Random, n: int, make) -> list[str]:
    out: dict[str, None] = {}
    while len(out) < n:
        out.setdefault(make(rng))
    return list(out)


def _zip_code(rng: random.Random) -> str:
    return f"{rng.randrange(10000, 100000)}"


def _city(rng: random.Random) -> str:
    return "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(2, 3)))


def _state(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_uppercase) for _ in range(2))


def _name(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_uppercase) for _ in range(8))


def _zipf_choices(rng: random.Random, items: Sequence[str], k: int, s: float) -> list[str]:
    weights = [1.0 / (rank**s) for rank in range(1, len(items) + 1)]
    return rng.choices(items, weights=weights, k=k)


SYNTH_RULES = ("FD: ZIP -> CITY", "FD: CITY -> STATE")


def make_zipf_dataset(
    n_rows: int = 2000,
    n_zips: int = 40,
    n_cities: int = 40,
    n_states: int = 8,
    zipf_s: float = 1.0,
    seed: int = 0,
) -> tuple[Relation, list[Rule]]:
    """Clean address-like table satisfying ZIP -> CITY and CITY -> STATE.

    ZIPs are 5-digit codes drawn from a Zipf law, city names are built from a
    small syllable pool (so distinct cities can look alike), and states are
    2-letter codes. ZIP i maps to city ``i % n_cities`` and city j to state
    ``j % n_states``. A free NAME column keeps tuples distinct.
    """
    rng = random.Random(seed)
    zips = _distinct(rng, n_zips, _zip_code)
    cities = _distinct(rng, n_cities, _city)
    states = _distinct(rng, n_states, _state)
    city_of = {z: cities[i % n_cities] for i, z in enumerate(zips)}
    state_of = {c: states[i % n_states] for i, c in enumerate(cities)}
    names = _distinct(rng, n_rows, _name)
    records = []
    for name, z in zip(names, _zipf_choices(rng, zips, n_rows, zipf_s)):
        c = city_of[z]
        records.append((name, z, c, state_of[c]))
    rel = Relation.from_records(("NAME", "ZIP", "CITY", "STATE"), records)
    return rel, parse_rule_lines(SYNTH_RULES, rel.names)


# ---------------------------------------------------------------------------
# scoring


@dataclass
class MetricsBundle:
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    precision_a: float = 0.0
    recall_a: float = 0.0
    precision_r: float = 0.0
    recall_r: float = 0.0
    precision_f: float = 0.0
    recall_f: float = 0.0
    counts: dict[str, int] = field(default_factory=dict)
    # names of metrics whose denominator was zero (reported as 0)
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def harmonic_mean(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _ratio(num: int, den: int, name: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def final_values(repaired: Relation, report: RepairReport) -> dict[int, tuple[str, ...]]:
    """Repaired values per original tid; removed duplicates take their kept tuple's values."""
    values = {row.tid: row.values for row in repaired.rows}
    for removed, kept in report.duplicates().items():
        if kept in values:
            values[removed] = values[kept]
    return values


def score(
    clean: Relation,
    dirty: Relation,
    repaired: Relation,
    truth: GroundTruth | None = None,
    report: RepairReport | None = None,
    rules: Sequence[Rule] | None = None,
) -> MetricsBundle:
    """Cell-level precision/recall/F1 plus per-component metrics.

    Erroneous cells are those where ``dirty`` differs from ``clean``; updated
    cells are those where the repaired value differs from ``dirty``. Group and
    piece-of-data metrics need ``rules`` (to rebuild the dirty index) and the
    repair ``report``.
    """
    report = report or RepairReport()
    flags: list[str] = []
    clean_rows = clean.by_tid()
    dirty_rows = dirty.by_tid()
    fixed = final_values(repaired, report)
    names = clean.names

    erroneous: set[tuple[int, int]] = set()
    updated = correct = 0
    correct_cells: set[tuple[int, int]] = set()
    for tid, drow in dirty_rows.items():
        crow = clean_rows[tid]
        frow = fixed.get(tid, drow.values)
        for p in range(len(names)):
            is_err = drow.values[p] != crow.values[p]
            if is_err:
                erroneous.add((tid, p))
            if frow[p] != drow.values[p]:
                updated += 1
                if is_err and frow[p] == crow.values[p]:
                    correct += 1
                    correct_cells.add((tid, p))
    if truth is not None:
        injected = {(e.tid, clean.position(e.attribute)) for e in truth.errors}
        if injected != erroneous:
            flags.append("truth_mismatch")

    m = MetricsBundle(flags=flags)
    m.precision = _ratio(correct, updated, "precision", flags)
    m.recall = _ratio(correct, len(erroneous), "recall", flags)
    m.f1 = harmonic_mean(m.precision, m.recall)
    m.counts = {"erroneous": len(erroneous), "updated": updated, "correct": correct}

    # fusion stage: cells in tuples whose versions conflicted
    conflict = set(report.conflict_tids)
    err_in_conflict = sum(1 for tid, _ in erroneous if tid in conflict)
    fixed_in_conflict = sum(1 for tid, _ in correct_cells if tid in conflict)
    m.precision_f = _ratio(fixed_in_conflict, err_in_conflict, "precision_f", flags)
    m.recall_f = _ratio(fixed_in_conflict, len(erroneous), "recall_f", flags)
    m.counts.update(conflict_erroneous=err_in_conflict, conflict_correct=fixed_in_conflict)

    if rules is None:
        flags.extend(["precision_a", "recall_a", "precision_r", "recall_r"])
        return m
    _component_metrics(m, clean, dirty, report, rules, flags)
    return m


def _component_metrics(
    m: MetricsBundle,
    clean: Relation,
    dirty: Relation,
    report: RepairReport,
    rules: Sequence[Rule],
    flags: list[str],
) -> None:
    clean_rows = clean.by_tid()
    rule_by_id = {r.rule_id: r for r in rules}

    def clean_vals(tid: int, attrs: Sequence[str]) -> tuple[str, ...]:
        return tuple(clean_rows[tid].values[clean.position(a)] for a in attrs)

    # abnormal groups: real ones have a key no member's clean reason values match
    index = build_index(dirty, rules)
    real_abnormal = 0
    erroneous_gammas = 0
    for block in index.blocks:
        reason = block.rule.reason_attributes
        attrs = block.rule.attributes
        for key, group in block.groups.items():
            members = [t for g in group.gammas.values() for t in g.tids]
            if all(clean_vals(t, reason) != key for t in members):
                real_abnormal += 1
            for g in group.gammas.values():
                if any(clean_vals(t, attrs) != g.values for t in g.tids):
                    erroneous_gammas += 1

    good_merges = sum(
        1
        for ev in report.merges
        if all(clean_vals(t, rule_by_id[ev.rule_id].reason_attributes) == ev.to_key for t in ev.tids)
    )
    m.precision_a = _ratio(good_merges, len(report.merges), "precision_a", flags)
    m.recall_a = _ratio(good_merges, real_abnormal, "recall_a", flags)

    good_repairs = sum(
        1
        for ev in report.gamma_repairs
        if all(clean_vals(t, rule_by_id[ev.rule_id].attributes) == ev.new_values for t in ev.tids)
    )
    m.precision_r = _ratio(good_repairs, len(report.gamma_repairs), "precision_r", flags)
    m.recall_r = _ratio(good_repairs, erroneous_gammas, "recall_r", flags)
    m.counts.update(
        merges=len(report.merges),
        correct_merges=good_merges,
        real_abnormal_groups=real_abnormal,
        gamma_repairs=len(report.gamma_repairs),
        correct_gamma_repairs=good_repairs,
        erroneous_gammas=erroneous_gammas,
    )


def write_truth(truth: GroundTruth, path: str | Path) -> None:
    Path(path).write_text(json.dumps(truth.to_json(), indent=2) + "\n", encoding="utf-8")


def read_truth(clean: Relation, path: str | Path) -> GroundTruth:
    return GroundTruth.from_json(clean, json.loads(Path(path).read_text(encoding="utf-8")))
