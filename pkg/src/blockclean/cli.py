"""Command-line entry point: ``blockclean clean|inject|score|index-dump``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import tomli

from blockclean.cleaner import AgpConfig
from blockclean.distance import MetricKind
from blockclean.evaluation import ErrorSpec, inject_errors, read_truth, rule_attributes, score, write_truth
from blockclean.mln_index import build_index
from blockclean.pipeline import CleanConfig, clean
from blockclean.relation import Relation, RelationError, Row, load_relation, write_relation
from blockclean.report import RepairReport, Stage
from blockclean.rules import RuleError, parse_rules
from blockclean.weights import WeightConfig, WeightMode, assign_weights

DEFAULTS: dict[str, Any] = {
    "delimiter": ",",
    "no_header": False,
    "tau": 1,
    "metric": "levenshtein",
    "weights": "prior",
    "refine_iters": 5,
    "parts": 1,
    "seed": 0,
    "error_rate": 0.05,
    "replacement_ratio": 0.5,
}


class UsageError(Exception):
    pass


def _settings(args: argparse.Namespace) -> dict[str, Any]:
    """Flags override the config file, which overrides built-in defaults."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            with path.open("rb") as fh:
                data = tomli.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
        except tomli.TOMLDecodeError as exc:
            raise UsageError(f"invalid config {path}: {exc}") from None
        merged.update({k.replace("-", "_"): v for k, v in data.items()})
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "func", "config"):
            merged[key] = value
    return merged


def _require(cfg: dict[str, Any], *keys: str) -> None:
    missing = [k for k in keys if not cfg.get(k)]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _load(cfg: dict[str, Any], key: str = "input"):
    return load_relation(cfg[key], cfg["delimiter"], not cfg["no_header"])


def _clean_config(cfg: dict[str, Any]) -> CleanConfig:
    try:
        metric = MetricKind(cfg["metric"])
        mode = WeightMode(cfg["weights"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return CleanConfig(
        agp=AgpConfig(int(cfg["tau"])),
        weights=WeightConfig(mode=mode, refine_iters=int(cfg["refine_iters"])),
        metric=metric,
        parts=int(cfg["parts"]),
        seed=int(cfg["seed"]),
    )


def cmd_clean(cfg: dict[str, Any]) -> int:
    _require(cfg, "input", "rules", "output")
    rel = _load(cfg)
    rules = parse_rules(cfg["rules"], rel.names)
    ccfg = _clean_config(cfg)
    start = time.perf_counter()
    result = clean(rel, rules, ccfg)
    elapsed = time.perf_counter() - start
    write_relation(result.relation, cfg["output"], cfg["delimiter"])
    if cfg.get("report"):
        result.report.write(cfg["report"])

    counts = {s.value: len(result.report.by_stage(s)) for s in Stage}
    print(f"cleaned {len(rel)} tuples with {len(rules)} rules in {elapsed:.3f}s -> {len(result.relation)} tuples")
    print("repairs: " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    for t in result.timings:
        print(f"part {t['part_id']}: {t['seconds']:.3f}s")
    return 0


def cmd_inject(cfg: dict[str, Any]) -> int:
    _require(cfg, "input", "output", "truth")
    rel = _load(cfg)
    targets = None
    if cfg.get("rules"):
        targets = rule_attributes(parse_rules(cfg["rules"], rel.names))
    if cfg.get("attributes"):
        targets = tuple(a.strip() for a in cfg["attributes"].split(",") if a.strip())
    spec = ErrorSpec(float(cfg["error_rate"]), float(cfg["replacement_ratio"]), int(cfg["seed"]), targets)
    dirty, truth = inject_errors(rel, spec)
    write_relation(dirty, cfg["output"], cfg["delimiter"])
    write_truth(truth, cfg["truth"])
    print(f"injected {len(truth.errors)} errors into {len(rel)} tuples")
    return 0


def cmd_score(cfg: dict[str, Any]) -> int:
    _require(cfg, "clean", "dirty", "repaired")
    clean_rel = _load(cfg, "clean")
    dirty = _load(cfg, "dirty")
    repaired = _load(cfg, "repaired")
    truth = read_truth(clean_rel, cfg["truth"]) if cfg.get("truth") else None
    report = RepairReport.read(cfg["report"]) if cfg.get("report") else None
    rules = parse_rules(cfg["rules"], clean_rel.names) if cfg.get("rules") else None
    if report is None and len(repaired) != len(dirty):
        raise UsageError("repaired relation has dropped tuples; pass --report so duplicates can be resolved")
    metrics = score(clean_rel, dirty, _renumber(repaired, report, dirty), truth, report, rules)
    text = metrics.dumps()
    if cfg.get("output"):
        Path(cfg["output"]).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _renumber(repaired: Relation, report: RepairReport | None, dirty: Relation) -> Relation:
    """Map the rows of a re-loaded repaired file back to the tids they kept."""
    removed = set(report.duplicates()) if report else set()
    kept = [t for t in dirty.tids() if t not in removed]
    if len(kept) != len(repaired):
        raise UsageError(f"repaired relation has {len(repaired)} tuples, report implies {len(kept)}")
    return Relation(repaired.schema, tuple(Row(t, r.values) for t, r in zip(kept, repaired.rows)))


def cmd_index_dump(cfg: dict[str, Any]) -> int:
    _require(cfg, "input", "rules", "dump_index")
    rel = _load(cfg)
    rules = parse_rules(cfg["rules"], rel.names)
    index = build_index(rel, rules)
    ccfg = _clean_config(cfg)
    for block in index.blocks:
        assign_weights(block, ccfg.weights)
    text = json.dumps(index.to_json(), indent=2, ensure_ascii=False)
    Path(cfg["dump_index"]).write_text(text + "\n", encoding="utf-8")
    print(f"wrote {len(index.blocks)} blocks to {cfg['dump_index']}")
    return 0


def _io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file with default option values")
    p.add_argument("--delimiter", help="field delimiter (default ',')")
    p.add_argument("--no-header", action="store_const", const=True, help="input has no header line")


def _clean_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=int, help="abnormal group threshold in tuples (default 1)")
    p.add_argument("--metric", choices=[m.value for m in MetricKind])
    p.add_argument("--weights", choices=[m.value for m in WeightMode])
    p.add_argument("--refine-iters", type=int)
    p.add_argument("--parts", type=int, help="number of data parts; >1 runs the partitioned mode")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockclean", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="clean a dataset against a rule file")
    _io_flags(p)
    _clean_flags(p)
    p.add_argument("--input")
    p.add_argument("--rules")
    p.add_argument("--output")
    p.add_argument("--report", help="write the JSON repair log here")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("inject", help="inject typos and replacement errors into a clean dataset")
    _io_flags(p)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--truth", help="where to write the injected-error list (JSON)")
    p.add_argument("--rules", help="restrict errors to attributes used by these rules")
    p.add_argument("--attributes", help="comma-separated attributes to corrupt")
    p.add_argument("--error-rate", type=float)
    p.add_argument("--replacement-ratio", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("score", help="score a repair against the clean data")
    _io_flags(p)
    p.add_argument("--clean")
    p.add_argument("--dirty")
    p.add_argument("--repaired")
    p.add_argument("--truth")
    p.add_argument("--report")
    p.add_argument("--rules", help="enables the per-component metrics")
    p.add_argument("--output", help="also write the metrics JSON here")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("index-dump", help="write the block/group index as JSON")
    _io_flags(p)
    p.add_argument("--input")
    p.add_argument("--rules")
    p.add_argument("--weights", choices=[m.value for m in WeightMode])
    p.add_argument("--refine-iters", type=int)
    p.add_argument("--dump-index", help="output JSON path")
    p.set_defaults(func=cmd_index_dump)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _settings(args)
        return args.func(cfg)
    except (UsageError, RelationError, RuleError, ValueError) as exc:
        print(f"blockclean {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
