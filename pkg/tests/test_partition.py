import math
import random

import pytest

from blockclean.cleaner import AgpConfig
from blockclean.distance import values_distance
from blockclean.mln_index import build_index
from blockclean.partition import gather, partition, run_partitioned
from blockclean.pipeline import CleanConfig, clean
from blockclean.relation import Relation
from blockclean.rules import parse_rule_lines
from oracles import partition_trace


def _random_relation(rng, n):
    names = ["A", "B", "C"]
    return Relation.from_records(names, [tuple(rng.choice(["a", "ab", "abc", "x", "xy"]) for _ in names) for _ in range(n)])


def test_single_part_holds_everything(hospital):
    [part] = partition(hospital, 1)
    assert part.tids == hospital.tids()


@pytest.mark.parametrize("k", [0, 7])
def test_bad_k(hospital, k):
    with pytest.raises(ValueError):
        partition(hospital, k)


@pytest.mark.parametrize("seed", range(12))
def test_disjoint_cover_and_capacity(seed):
    rng = random.Random(seed)
    rel = _random_relation(rng, rng.randint(8, 300))
    k = rng.choice([2, 4, 8])
    parts = partition(rel, k, seed)
    tids = [t for p in parts for t in p.tids]
    assert sorted(tids) == rel.tids()
    assert max(len(p) for p in parts) <= math.ceil(len(rel) / k)


def test_eviction_trace_seed_zero(hospital):
    # t5 arrives at part 1 when it is full, evicts t3, which moves to part 0
    rows = {r.tid: r.values for r in hospital.rows}
    expected_parts, events = partition_trace(rows, 3, 0, values_distance)
    assert expected_parts == [[3, 4], [5, 6], [1, 2]]
    assert events == [(5, 3, 1, 0)]
    assert [p.tids for p in partition(hospital, 3, 0)] == expected_parts


@pytest.mark.parametrize("seed", range(30))
def test_matches_trace_oracle(hospital, seed):
    rows = {r.tid: r.values for r in hospital.rows}
    expected, _ = partition_trace(rows, 3, seed, values_distance)
    assert [p.tids for p in partition(hospital, 3, seed)] == expected


def test_k_one_equals_stand_alone(hospital, hospital_rules):
    alone = clean(hospital, hospital_rules, CleanConfig())
    single, report, _ = run_partitioned(hospital, hospital_rules, 1)
    assert single == alone.relation
    assert report.entries == alone.report.entries


def test_gather_uses_count_weighted_mean():
    rel = Relation.from_records(["A", "B"], [("k", "v"), ("k", "v"), ("k", "v"), ("q", "z")])
    rules = parse_rule_lines(["FD: A -> B"], rel.names)
    first = build_index(rel.subset([1, 2]), rules)
    second = build_index(rel.subset([3, 4]), rules)
    first.blocks[0].groups[("k",)].gammas[("v",)].weight = 0.5
    second.blocks[0].groups[("k",)].gammas[("v",)].weight = 0.2
    second.blocks[0].groups[("q",)].gammas[("z",)].weight = 0.8
    merged = gather(rel, rules, [first, second]).blocks[0]
    kv = merged.groups[("k",)].gammas[("v",)]
    assert kv.tids == [1, 2, 3]
    assert kv.weight == pytest.approx(0.4)
    assert merged.groups[("q",)].gammas[("z",)].weight == 0.8


def test_straddling_duplicates_removed_globally():
    rel = Relation.from_records(["A", "B"], [("ab", "x"), ("ab", "x"), ("ab", "x"), ("cd", "y")])
    rules = parse_rule_lines(["FD: A -> B"], rel.names)
    # seed 0 puts t1,t2 in one part and t3,t4 in the other
    assert sorted(p.tids for p in partition(rel, 2, 0)) == [[1, 2], [3, 4]]
    cfg = CleanConfig(agp=AgpConfig(0), parts=2, seed=0)
    split = clean(rel, rules, cfg)
    alone = clean(rel, rules, CleanConfig(agp=AgpConfig(0)))
    assert split.relation == alone.relation
    assert split.relation.values_matrix() == [("ab", "x"), ("cd", "y")]
    assert split.report.duplicates() == {2: 1, 3: 1}


def test_partitioned_report_records_parts(hospital, hospital_rules):
    _, report, timings = run_partitioned(hospital, hospital_rules, 3, 0)
    assert report.parts == [
        {"part_id": 0, "centroid_tid": 4, "size": 2},
        {"part_id": 1, "centroid_tid": 6, "size": 2},
        {"part_id": 2, "centroid_tid": 1, "size": 2},
    ]
    assert [t["part_id"] for t in timings] == [0, 1, 2]
