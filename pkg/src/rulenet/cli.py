"""Batch pipeline: generate -> encode -> train -> prune -> extract -> evaluate.

Every stage persists its artifacts under the output directory and records
their content hashes, so stages can be rerun individually and a config file
fully determines every output byte.  Exit codes: 0 success, 1 invalid
configuration, 2 stage failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .datagen import (
    CLASSES,
    GeneratorConfig,
    generate_tuples,
    load_tuples,
    save_tuples,
)
from .encoder import (
    default_scheme,
    encode_dataset,
    load_encoded,
    save_encoded,
    scheme_from_json,
    scheme_to_json,
)
from .errors import ConfigError
from .extractor import ExtractConfig, extract_rules, extraction_report
from .network import (
    ObjectiveParams,
    accuracy,
    init_random,
    load_network,
    save_network,
)
from .pruner import PruneConfig, prune
from .ruleset import evaluate, format_rules, from_extraction, parse_rules, \
    simplify, stats_csv
from .trainer import TrainConfig, train

STAGES = ("generate", "encode", "train", "prune", "extract", "evaluate")


@dataclass(frozen=True)
class PipelineConfig:
    function: str = "F2"
    count: int = 1000
    seed: int = 42
    perturbation: float = 0.05
    test_count: int = 1000
    test_seed: int | None = None  # default: seed + 100003
    hidden: int = 4
    train_restarts: int = 5
    objective: ObjectiveParams = field(default_factory=ObjectiveParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    prune: PruneConfig = field(default_factory=PruneConfig)
    extract: ExtractConfig = field(default_factory=ExtractConfig)

    def __post_init__(self):
        if self.hidden < 1:
            raise ConfigError("hidden count must be >= 1")

    @property
    def effective_test_seed(self) -> int:
        return self.seed + 100003 if self.test_seed is None else self.test_seed

    @staticmethod
    def from_dict(raw: dict) -> "PipelineConfig":
        known = {"function", "count", "seed", "perturbation", "test_count",
                 "test_seed", "hidden", "train_restarts", "objective",
                 "train", "prune", "extract"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {k: raw[k] for k in raw if k not in
                  ("objective", "train", "prune", "extract")}
        try:
            kwargs["objective"] = ObjectiveParams(**raw.get("objective", {}))
            kwargs["train"] = TrainConfig(**raw.get("train", {}))
            kwargs["prune"] = PruneConfig(**raw.get("prune", {}))
            kwargs["extract"] = ExtractConfig(**raw.get("extract", {}))
        except TypeError as e:
            raise ConfigError(f"bad config section: {e}") from None
        cfg = PipelineConfig(**kwargs)
        # Surface invalid combinations before any stage runs.
        GeneratorConfig(count=cfg.count, seed=cfg.seed,
                        perturbation=cfg.perturbation, function_id=cfg.function)
        return cfg

    @staticmethod
    def from_file(path: str | Path) -> "PipelineConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from None
        return PipelineConfig.from_dict(raw)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _record(out: Path, names: list[str]) -> None:
    prov_path = out / "provenance.json"
    prov = {}
    if prov_path.exists():
        prov = json.loads(prov_path.read_text())
    for name in names:
        prov[name] = _sha256(out / name)
    prov_path.write_text(json.dumps(prov, indent=2, sort_keys=True) + "\n")


def _require(out: Path, names: list[str], stage: str) -> None:
    missing = [n for n in names if not (out / n).exists()]
    if missing:
        raise ConfigError(
            f"stage {stage!r} needs earlier artifacts: missing {missing}"
        )


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def stage_generate(cfg: PipelineConfig, out: Path) -> None:
    gen = GeneratorConfig(count=cfg.count, seed=cfg.seed,
                          perturbation=cfg.perturbation,
                          function_id=cfg.function)
    save_tuples(generate_tuples(gen), out / "dataset.csv", gen)
    test = GeneratorConfig(count=cfg.test_count, seed=cfg.effective_test_seed,
                           perturbation=0.0, function_id=cfg.function)
    save_tuples(generate_tuples(test), out / "test_dataset.csv", test)
    _record(out, ["dataset.csv", "dataset.csv.meta.json",
                  "test_dataset.csv", "test_dataset.csv.meta.json"])


def stage_encode(cfg: PipelineConfig, out: Path) -> None:
    _require(out, ["dataset.csv", "test_dataset.csv"], "encode")
    scheme = default_scheme()
    (out / "scheme.json").write_text(scheme_to_json(scheme))
    save_encoded(encode_dataset(load_tuples(out / "dataset.csv"), scheme),
                 out / "encoded.csv")
    save_encoded(encode_dataset(load_tuples(out / "test_dataset.csv"), scheme),
                 out / "encoded_test.csv")
    _record(out, ["scheme.json", "encoded.csv", "encoded_test.csv"])


def train_best(data, hidden: int, objective: ObjectiveParams,
               train_cfg: TrainConfig, restarts: int, outputs: int = 2):
    """Train from fresh seeded initializations until the required accuracy
    is reached, keeping the best attempt.  Returns (net, report, attempt)."""
    best = None
    for attempt in range(max(1, restarts)):
        net = init_random(data.X.shape[1], hidden, outputs,
                          seed=train_cfg.seed + 1000 * attempt)
        trained, report = train(net, data, objective, train_cfg)
        if best is None or report.train_accuracy > best[1].train_accuracy:
            best = (trained, report, attempt)
        if report.train_accuracy >= train_cfg.required_accuracy:
            break
    return best


def stage_train(cfg: PipelineConfig, out: Path) -> None:
    _require(out, ["encoded.csv"], "train")
    data = load_encoded(out / "encoded.csv")
    trained, report, attempt = train_best(data, cfg.hidden, cfg.objective,
                                          cfg.train, cfg.train_restarts,
                                          outputs=len(CLASSES))
    save_network(trained, out / "model_trained.json", cfg.objective,
                 provenance={"encoded.csv": _sha256(out / "encoded.csv"),
                             "init_seed": cfg.train.seed + 1000 * attempt,
                             "attempts": attempt + 1})
    (out / "train_report.txt").write_text(report.to_text())
    _record(out, ["model_trained.json", "train_report.txt"])


def stage_prune(cfg: PipelineConfig, out: Path) -> None:
    _require(out, ["model_trained.json", "encoded.csv"], "prune")
    data = load_encoded(out / "encoded.csv")
    net, params, _ = load_network(out / "model_trained.json")
    pruned, report = prune(net, data, params or cfg.objective, cfg.prune,
                           cfg.train)
    save_network(pruned, out / "model_pruned.json", cfg.objective,
                 provenance={
                     "model_trained.json": _sha256(out / "model_trained.json"),
                     "encoded.csv": _sha256(out / "encoded.csv"),
                 })
    (out / "prune_report.txt").write_text(report.to_text())
    _record(out, ["model_pruned.json", "prune_report.txt"])


def stage_extract(cfg: PipelineConfig, out: Path) -> None:
    _require(out, ["model_pruned.json", "encoded.csv", "scheme.json"],
             "extract")
    data = load_encoded(out / "encoded.csv")
    scheme = scheme_from_json((out / "scheme.json").read_text())
    net, params, _ = load_network(out / "model_pruned.json")
    result = extract_rules(net, data, scheme, cfg.extract,
                           params or cfg.objective, cfg.train, cfg.prune)
    rs = from_extraction(result.bit_rules, result.default_class, scheme,
                         CLASSES)
    tuples = load_tuples(out / "dataset.csv")
    rs = simplify(rs, tuples)
    (out / "rules.txt").write_text(format_rules(rs))
    (out / "extraction_report.txt").write_text(
        extraction_report(result, net, CLASSES))
    (out / "extract_meta.json").write_text(json.dumps({
        "epsilon": result.eps,
        "discretized_accuracy": result.discretized_accuracy,
        "disagreements": result.disagreements,
        "bit_rules": len(result.bit_rules),
        "rules": len(rs.rules),
        "warnings": result.warnings,
        "inputs": {
            "model_pruned.json": _sha256(out / "model_pruned.json"),
            "encoded.csv": _sha256(out / "encoded.csv"),
        },
    }, indent=2, sort_keys=True) + "\n")
    _record(out, ["rules.txt", "extraction_report.txt", "extract_meta.json"])


def stage_evaluate(cfg: PipelineConfig, out: Path) -> None:
    _require(out, ["rules.txt", "dataset.csv", "test_dataset.csv",
                   "model_trained.json", "model_pruned.json",
                   "encoded.csv", "encoded_test.csv"], "evaluate")
    rs = parse_rules((out / "rules.txt").read_text())
    train_tuples = load_tuples(out / "dataset.csv")
    test_tuples = load_tuples(out / "test_dataset.csv")
    train_eval = evaluate(rs, train_tuples)
    test_eval = evaluate(rs, test_tuples)
    (out / "evaluation_train.csv").write_text(stats_csv(train_eval))
    (out / "evaluation_test.csv").write_text(stats_csv(test_eval))
    (out / "summary.txt").write_text(report(cfg, out, rs, train_eval, test_eval))
    _record(out, ["evaluation_train.csv", "evaluation_test.csv", "summary.txt"])


def report(cfg: PipelineConfig, out: Path, rs, train_eval, test_eval) -> str:
    """Human-readable run summary from the persisted artifacts."""
    trained, _, _ = load_network(out / "model_trained.json")
    pruned, _, _ = load_network(out / "model_pruned.json")
    data = load_encoded(out / "encoded.csv")
    test_data = load_encoded(out / "encoded_test.csv")
    meta = json.loads((out / "extract_meta.json").read_text())
    lines = [
        f"function: {cfg.function}",
        f"training records: {len(data)} (perturbation {cfg.perturbation!r})",
        f"test records: {len(test_data)} (unperturbed)",
        f"links: {trained.link_count()} -> {pruned.link_count()}"
        f" (hidden {trained.h} -> {pruned.h})",
        f"network accuracy, training set: trained "
        f"{accuracy(trained, data)!r}, pruned {accuracy(pruned, data)!r}",
        f"network accuracy, test set: trained "
        f"{accuracy(trained, test_data)!r}, pruned {accuracy(pruned, test_data)!r}",
        f"extraction epsilon: {meta['epsilon']!r}",
        f"rule/discretized disagreements on training set: "
        f"{meta['disagreements']}",
        f"rules: {len(rs.rules)} plus default {rs.default_class}",
        f"rule accuracy: training {train_eval.accuracy!r}, "
        f"test {test_eval.accuracy!r}",
        "",
        "per-rule coverage on the test set (first match):",
    ]
    for st in test_eval.per_rule + [test_eval.default_stats]:
        name = f"R{st.index}" if st.index else "DEFAULT"
        pct = "n/a" if st.correct_pct is None else f"{st.correct_pct:.1f}%"
        lines.append(f"  {name}: total={st.total} correct={pct}  {st.text}")
    return "\n".join(lines) + "\n"


def run_pipeline(cfg: PipelineConfig, out: Path, stage_from: str = "generate",
                 stage_to: str = "evaluate") -> None:
    if stage_from not in STAGES or stage_to not in STAGES:
        raise ConfigError(f"stages must be one of {STAGES}")
    i, j = STAGES.index(stage_from), STAGES.index(stage_to)
    if i > j:
        raise ConfigError(f"stage order: {stage_from} comes after {stage_to}")
    out.mkdir(parents=True, exist_ok=True)
    runners = {
        "generate": stage_generate,
        "encode": stage_encode,
        "train": stage_train,
        "prune": stage_prune,
        "extract": stage_extract,
        "evaluate": stage_evaluate,
    }
    for stage in STAGES[i:j + 1]:
        runners[stage](cfg, out)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rulenet",
        description="Train, prune and convert a small classifier network "
                    "into if-then rules on the synthetic benchmark.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES + ("pipeline",):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="pipeline config JSON; defaults apply if omitted")
        p.add_argument("--out", type=Path, required=True,
                       help="artifact directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the generator seed")
        p.add_argument("--function", default=None,
                       help="override the label function (F1..F7, F9)")
        if name == "pipeline":
            p.add_argument("--stage-from", default="generate", choices=STAGES)
            p.add_argument("--stage-to", default="evaluate", choices=STAGES)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        raw = {}
        if args.config is not None:
            raw = json.loads(Path(args.config).read_text())
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.function is not None:
            raw["function"] = args.function
        cfg = PipelineConfig.from_dict(raw)
    except (ConfigError, OSError, json.JSONDecodeError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1

    if args.command == "pipeline":
        span = (args.stage_from, args.stage_to)
    else:
        span = (args.command, args.command)
    try:
        run_pipeline(cfg, args.out, *span)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # stage failure; partial outputs are kept
        print(f"stage failure ({type(e).__name__}): {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
