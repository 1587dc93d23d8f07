"""Rule-based hybrid cleaning of tabular data over a block/group index."""

from blockclean.relation import Attribute, Relation, RelationError, Row, load_relation, write_relation
from blockclean.rules import Predicate, Rule, RuleError, RuleKind, parse_rules, parse_rule_line, rule_to_text, to_mln_clause
from blockclean.mln_index import Block, Gamma, Group, MlnIndex, build_index, ground_rule_strings
from blockclean.distance import MetricKind, gamma_distance, string_distance
from blockclean.weights import WeightConfig, WeightMode, aggregate_weights, assign_prior_weights, refine_weights
from blockclean.report import RepairEntry, RepairReport, Stage
from blockclean.cleaner import AgpConfig, detect_abnormal, merge_abnormal, rsc_clean, stage_one
from blockclean.fusion import FusionResult, f_score, fuse_tuple, stage_two
from blockclean.partition import Part, partition, run_partitioned
from blockclean.pipeline import CleanConfig, clean

__all__ = [
    "AgpConfig",
    "Attribute",
    "Block",
    "CleanConfig",
    "FusionResult",
    "Gamma",
    "Group",
    "MetricKind",
    "MlnIndex",
    "Part",
    "Predicate",
    "Relation",
    "RelationError",
    "RepairEntry",
    "RepairReport",
    "Row",
    "Rule",
    "RuleError",
    "RuleKind",
    "Stage",
    "WeightConfig",
    "WeightMode",
    "aggregate_weights",
    "assign_prior_weights",
    "build_index",
    "clean",
    "detect_abnormal",
    "f_score",
    "fuse_tuple",
    "gamma_distance",
    "ground_rule_strings",
    "load_relation",
    "merge_abnormal",
    "parse_rule_line",
    "parse_rules",
    "partition",
    "refine_weights",
    "rsc_clean",
    "rule_to_text",
    "run_partitioned",
    "stage_one",
    "stage_two",
    "string_distance",
    "to_mln_clause",
    "write_relation",
]
