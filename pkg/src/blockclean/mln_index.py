"""Two-layer block/group index over the ground instances of every rule.

Each rule owns one :class:`Block`. Every tuple the rule applies to yields one
piece of data (a :class:`Gamma`: its reason and result values). Pieces with the
same reason values share a :class:`Group`; identical pieces are stored once and
remember all the tuple ids behind them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from blockclean.relation import Relation
from blockclean.rules import Rule, ground_clause

Key = tuple[str, ...]


@dataclass
class Gamma:
    reason_values: Key
    result_values: Key
    tids: list[int] = field(default_factory=list)
    weight: float = 0.0

    @property
    def values(self) -> Key:
        return self.reason_values + self.result_values

    @property
    def count(self) -> int:
        return len(self.tids)

    def render(self) -> str:
        return "\x1f".join(self.values)

    def copy(self) -> Gamma:
        return Gamma(self.reason_values, self.result_values, list(self.tids), self.weight)


@dataclass
class Group:
    key: Key
    gammas: dict[Key, Gamma] = field(default_factory=dict)
    is_abnormal: bool = False

    @property
    def tuple_count(self) -> int:
        return sum(g.count for g in self.gammas.values())

    def add(self, result_values: Key, tids: Sequence[int], weight: float = 0.0) -> Gamma:
        gamma = self.gammas.get(result_values)
        if gamma is None:
            gamma = self.gammas[result_values] = Gamma(self.key, result_values, [], weight)
        gamma.tids.extend(tids)
        return gamma

    def star(self) -> Gamma:
        """The piece backed by the most tuples; ties go to the smallest rendering."""
        return min(self.gammas.values(), key=lambda g: (-g.count, g.values))


@dataclass
class Block:
    rule: Rule
    # positions of the rule's attributes in the relation schema
    reason_positions: tuple[int, ...]
    result_positions: tuple[int, ...]
    groups: dict[Key, Group] = field(default_factory=dict)

    @property
    def rule_id(self) -> int:
        return self.rule.rule_id

    @property
    def attributes(self) -> tuple[str, ...]:
        return self.rule.attributes

    @property
    def positions(self) -> tuple[int, ...]:
        return self.reason_positions + self.result_positions

    def gammas(self) -> Iterator[Gamma]:
        for group in self.groups.values():
            yield from group.gammas.values()

    def tuple_count(self) -> int:
        return sum(g.count for g in self.gammas())

    def add(self, reason_values: Key, result_values: Key, tids: Sequence[int], weight: float = 0.0) -> Gamma:
        group = self.groups.get(reason_values)
        if group is None:
            group = self.groups[reason_values] = Group(reason_values)
        return group.add(result_values, tids, weight)

    def gamma_of(self) -> dict[int, Gamma]:
        """Map each tuple id to the piece of data it currently belongs to."""
        return {tid: g for g in self.gammas() for tid in g.tids}

    def applies_to(self, values: Sequence[str]) -> bool:
        """Whether a tuple takes part in this block.

        Rules without reason constants apply everywhere. With constants, one
        matching constant suffices, so a tuple whose other constant-bearing
        cell is dirty still lands in the block where it can be repaired.
        """
        constants = self.rule.reason_constants
        if not constants:
            return True
        return any(values[self.reason_positions[i]] == c for i, c in constants)


@dataclass
class MlnIndex:
    blocks: list[Block]

    def block(self, rule_id: int) -> Block:
        for b in self.blocks:
            if b.rule_id == rule_id:
                return b
        raise KeyError(f"no block for rule {rule_id}")

    def to_json(self) -> dict:
        out = []
        for b in self.blocks:
            groups = []
            for g in b.groups.values():
                groups.append(
                    {
                        "key": list(g.key),
                        "abnormal": g.is_abnormal,
                        "gammas": [
                            {
                                "reason": list(x.reason_values),
                                "result": list(x.result_values),
                                "tids": sorted(x.tids),
                                "weight": x.weight,
                            }
                            for x in g.gammas.values()
                        ],
                    }
                )
            out.append(
                {
                    "rule_id": b.rule_id,
                    "rule": b.rule.raw_text,
                    "reason_attributes": list(b.rule.reason_attributes),
                    "result_attributes": list(b.rule.result_attributes),
                    "groups": groups,
                }
            )
        return {"blocks": out}


def empty_block(rel: Relation, rule: Rule) -> Block:
    return Block(
        rule,
        tuple(rel.position(a) for a in rule.reason_attributes),
        tuple(rel.position(a) for a in rule.result_attributes),
    )


def build_index(rel: Relation, rules: Sequence[Rule]) -> MlnIndex:
    blocks = []
    for rule in rules:
        block = empty_block(rel, rule)
        for row in rel.rows:
            if not block.applies_to(row.values):
                continue
            reason = tuple(row.values[p] for p in block.reason_positions)
            result = tuple(row.values[p] for p in block.result_positions)
            block.add(reason, result, [row.tid])
        blocks.append(block)
    return MlnIndex(blocks)


def ground_rule_strings(index: MlnIndex, rule: Rule) -> list[str]:
    block = index.block(rule.rule_id)
    gammas = sorted(block.gammas(), key=lambda g: (g.reason_values, g.result_values))
    return [ground_clause(rule, g.reason_values, g.result_values) for g in gammas]
