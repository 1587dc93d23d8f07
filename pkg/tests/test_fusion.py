import math
import random

import pytest

from blockclean.cleaner import AgpConfig, stage_one
from blockclean.fusion import (
    FusionResult,
    Version,
    VersionSet,
    dedupe,
    f_score,
    fuse_tuple,
    merge_step,
    stage_two,
    version_sets,
)
from blockclean.mln_index import build_index
from blockclean.relation import Relation
from blockclean.report import Stage
from blockclean.rules import parse_rule_lines
from blockclean.weights import assign_prior_weights
from oracles import best_fusion_all_orders


@pytest.fixture
def cleaned_index(hospital, hospital_rules):
    index = build_index(hospital, hospital_rules)
    for b in index.blocks:
        assign_prior_weights(b)
    stage_one(index, AgpConfig(1))
    return index


def test_f_score():
    assert f_score([0.5, 0.4]) == pytest.approx(0.2)
    assert f_score([0.3]) == 0.3
    assert f_score([0.9, 0.0, 0.7]) == 0.0
    with pytest.raises(ValueError):
        f_score([])
    with pytest.raises(ValueError):
        f_score([0.5, -0.1])


def test_t3_fusion(hospital, cleaned_index):
    row = hospital.by_tid()[3]
    vs = version_sets(cleaned_index, [3])[3]
    result = fuse_tuple(row, vs, cleaned_index)
    assert result.fused_values == {"HN": "ELIZA", "CT": "BOAZ", "ST": "AL", "PN": "2567688400"}
    assert result.f_score > 0


def test_t3_order_one_two_three_dead_ends(cleaned_index):
    vs = version_sets(cleaned_index, [3])[3]
    v1, v2, v3 = vs.versions
    ranked = lambda v: sorted(v.block.gammas(), key=lambda g: (-g.weight, g.values))  # noqa: E731
    fused, _ = merge_step({}, v1, ranked(v1))
    fused, _ = merge_step(fused, v2, ranked(v2))
    assert fused["CT"] == "DOTHAN"
    assert merge_step(fused, v3, ranked(v3)) is None


def test_no_conflict_path(hospital, cleaned_index):
    vs = version_sets(cleaned_index, [1])[1]
    result = fuse_tuple(hospital.by_tid()[1], vs, cleaned_index)
    union = {}
    for v in vs.versions:
        union.update(v.mapping())
    assert result.fused_values == union
    assert result.f_score == pytest.approx(math.prod(v.gamma.weight for v in vs.versions))


def test_empty_version_set(hospital):
    assert fuse_tuple(hospital.by_tid()[1], VersionSet(1)) == FusionResult(1, {}, 0.0)


def _random_fusion_case(rng):
    names = ["A", "B", "C", "D", "E"]
    records = [tuple(rng.choice("abc") for _ in names) for _ in range(rng.randint(2, 12))]
    rel = Relation.from_records(names, records)
    lines = []
    for _ in range(rng.randint(1, 4)):
        picked = rng.sample(names, rng.randint(2, 3))
        lines.append(f"FD: {', '.join(picked[:-1])} -> {picked[-1]}")
    index = build_index(rel, parse_rule_lines(lines, names))
    for b in index.blocks:
        for g in b.gammas():
            g.weight = rng.choice([rng.random(), 0.5, 1.0])
    return rel, index


@pytest.mark.parametrize("seed", range(40))
def test_matches_exhaustive_orders(seed):
    rng = random.Random(seed)
    rel, index = _random_fusion_case(rng)
    sets = version_sets(index, rel.tids())
    for row in rel.rows:
        vs = sets[row.tid]
        result = fuse_tuple(row, vs, index)
        versions = [(v.block.attributes, v.gamma.values, v.gamma.weight, v.rule_id) for v in vs.versions]
        cands = {b.rule_id: [(g.values, g.weight) for g in b.gammas()] for b in index.blocks}
        best, fused = best_fusion_all_orders(versions, cands)
        assert result.f_score == best
        if best > 0:
            assert result.fused_values == fused
        m = len(vs.versions)
        assert result.explored <= math.factorial(m) * m


def test_stage_two_on_sample(hospital, cleaned_index):
    cleaned, report = stage_two(hospital, cleaned_index)
    assert cleaned.values_matrix() == [
        ("ALABAMA", "DOTHAN", "AL", "3347938701"),
        ("ELIZA", "BOAZ", "AL", "2567688400"),
    ]
    assert cleaned.tids() == [1, 3]
    assert report.duplicates() == {2: 1, 4: 3, 5: 3, 6: 3}


def test_identity_when_nothing_to_fix():
    rel = Relation.from_records(["A", "B"], [("a", "x"), ("b", "y")])
    index = build_index(rel, parse_rule_lines(["FD: A -> B"], rel.names))
    for b in index.blocks:
        assign_prior_weights(b)
    cleaned, report = stage_two(rel, index)
    assert cleaned == rel
    assert report.entries == []


@pytest.mark.parametrize("seed", range(10))
def test_dedupe_count_invariant(seed):
    rng = random.Random(seed)
    rel = Relation.from_records(["A", "B"], [(rng.choice("ab"), rng.choice("xy")) for _ in range(30)])
    out, report = dedupe(rel)
    assert len(out) + len(report.by_stage(Stage.DEDUPE)) == len(rel)
    assert len(set(out.values_matrix())) == len(out)
    for removed, kept in report.duplicates().items():
        assert kept < removed


def test_version_is_per_block(cleaned_index):
    for vs in version_sets(cleaned_index, [1, 2, 3, 4, 5, 6]).values():
        ids = [v.rule_id for v in vs.versions]
        assert ids == sorted(set(ids))
        assert all(isinstance(v, Version) for v in vs.versions)
