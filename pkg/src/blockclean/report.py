"""Repair log shared by the cleaning stages and the scorer."""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any


class Stage(str, enum.Enum):
    AGP = "AGP"
    RSC = "RSC"
    FSCR = "FSCR"
    DEDUPE = "DEDUPE"


@dataclass(frozen=True)
class RepairEntry:
    tid: int
    attribute: str
    old_value: str
    new_value: str
    stage: Stage
    # block the change was made in; None for stage-two entries
    rule_id: int | None = None
    # DEDUPE only: the tid of the kept identical tuple
    duplicate_of: int | None = None

    def __post_init__(self) -> None:
        if self.stage is not Stage.DEDUPE and self.old_value == self.new_value:
            raise ValueError(f"no-op repair entry for tuple {self.tid}.{self.attribute}")

    def to_json(self) -> dict[str, Any]:
        d = asdict(self)
        d["stage"] = self.stage.value
        return d


@dataclass(frozen=True)
class MergeEvent:
    """An abnormal group re-keyed into a normal group."""

    rule_id: int
    from_key: tuple[str, ...]
    to_key: tuple[str, ...]
    tids: tuple[int, ...]


@dataclass(frozen=True)
class GammaRepair:
    """A losing piece of data rewritten to its group's survivor."""

    rule_id: int
    tids: tuple[int, ...]
    old_values: tuple[str, ...]
    new_values: tuple[str, ...]


@dataclass
class RepairReport:
    entries: list[RepairEntry] = field(default_factory=list)
    merges: list[MergeEvent] = field(default_factory=list)
    gamma_repairs: list[GammaRepair] = field(default_factory=list)
    # tuples whose versions disagreed on some attribute during fusion
    conflict_tids: list[int] = field(default_factory=list)
    parts: list[dict[str, Any]] = field(default_factory=list)

    def extend(self, other: RepairReport) -> None:
        self.entries.extend(other.entries)
        self.merges.extend(other.merges)
        self.gamma_repairs.extend(other.gamma_repairs)
        self.conflict_tids.extend(other.conflict_tids)
        self.parts.extend(other.parts)

    def by_stage(self, stage: Stage) -> list[RepairEntry]:
        return [e for e in self.entries if e.stage is stage]

    def duplicates(self) -> dict[int, int]:
        """Removed tid -> kept tid."""
        return {e.tid: e.duplicate_of for e in self.entries if e.stage is Stage.DEDUPE and e.duplicate_of is not None}

    def to_json(self) -> dict[str, Any]:
        return {
            "entries": [e.to_json() for e in self.entries],
            "merges": [
                {"rule_id": m.rule_id, "from": list(m.from_key), "to": list(m.to_key), "tids": list(m.tids)}
                for m in self.merges
            ],
            "gamma_repairs": [
                {"rule_id": r.rule_id, "tids": list(r.tids), "old": list(r.old_values), "new": list(r.new_values)}
                for r in self.gamma_repairs
            ],
            "conflict_tids": list(self.conflict_tids),
            "parts": list(self.parts),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> RepairReport:
        return cls(
            entries=[
                RepairEntry(
                    e["tid"],
                    e["attribute"],
                    e["old_value"],
                    e["new_value"],
                    Stage(e["stage"]),
                    e.get("rule_id"),
                    e.get("duplicate_of"),
                )
                for e in data.get("entries", [])
            ],
            merges=[
                MergeEvent(m["rule_id"], tuple(m["from"]), tuple(m["to"]), tuple(m["tids"]))
                for m in data.get("merges", [])
            ],
            gamma_repairs=[
                GammaRepair(r["rule_id"], tuple(r["tids"]), tuple(r["old"]), tuple(r["new"]))
                for r in data.get("gamma_repairs", [])
            ],
            conflict_tids=list(data.get("conflict_tids", [])),
            parts=list(data.get("parts", [])),
        )

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> RepairReport:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
