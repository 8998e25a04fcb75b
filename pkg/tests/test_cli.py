import json
from pathlib import Path

import pytest

from rulenet import cli
from rulenet.cli import PipelineConfig, run_pipeline
from rulenet.errors import ConfigError
from rulenet.ruleset import parse_rules

# A configuration small enough to train in seconds: the age-only function
# with light noise and a narrow network.
FAST = {
    "function": "F1",
    "count": 400,
    "seed": 5,
    "perturbation": 0.02,
    "test_count": 400,
    "hidden": 3,
    "train": {"max_iterations": 1500},
    "prune": {"max_rounds": 120},
}


@pytest.fixture(scope="module")
def fast_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fast_run")
    cfg = PipelineConfig.from_dict(dict(FAST))
    run_pipeline(cfg, out)
    return cfg, out


class TestConfig:
    def test_defaults(self):
        cfg = PipelineConfig.from_dict({})
        assert cfg.function == "F2"
        assert cfg.hidden == 4
        assert cfg.prune.accuracy_floor == 0.90

    def test_eta_sum_rejected_before_stages(self, tmp_path):
        raw = {"objective": {"eta1": 0.4, "eta2": 0.1}}
        with pytest.raises(ConfigError):
            PipelineConfig.from_dict(raw)
        cfg_file = tmp_path / "bad.json"
        cfg_file.write_text(json.dumps(raw))
        rc = cli.main(["pipeline", "--config", str(cfg_file),
                       "--out", str(tmp_path / "out")])
        assert rc == 1
        assert not (tmp_path / "out" / "dataset.csv").exists()

    def test_unknown_function_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig.from_dict({"function": "F8"})

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig.from_dict({"functoin": "F2"})

    def test_stage_order_validated(self, tmp_path):
        cfg = PipelineConfig.from_dict(dict(FAST))
        with pytest.raises(ConfigError):
            run_pipeline(cfg, tmp_path, "train", "generate")


class TestPipeline:
    def test_all_artifacts_present(self, fast_run):
        _, out = fast_run
        expected = [
            "dataset.csv", "dataset.csv.meta.json", "test_dataset.csv",
            "scheme.json", "encoded.csv", "encoded_test.csv",
            "model_trained.json", "train_report.txt", "model_pruned.json",
            "prune_report.txt", "rules.txt", "extraction_report.txt",
            "extract_meta.json", "evaluation_train.csv",
            "evaluation_test.csv", "summary.txt", "provenance.json",
        ]
        for name in expected:
            assert (out / name).exists(), name

    def test_rules_parse_and_fidelity_is_exact(self, fast_run):
        _, out = fast_run
        rs = parse_rules((out / "rules.txt").read_text())
        assert rs.default_class == "B"
        meta = json.loads((out / "extract_meta.json").read_text())
        assert meta["disagreements"] == 0

    def test_provenance_covers_artifacts(self, fast_run):
        _, out = fast_run
        prov = json.loads((out / "provenance.json").read_text())
        assert "rules.txt" in prov and "dataset.csv" in prov
        assert all(len(v) == 64 for v in prov.values())

    def test_summary_mentions_function_and_rules(self, fast_run):
        _, out = fast_run
        text = (out / "summary.txt").read_text()
        assert "function: F1" in text
        assert "per-rule coverage" in text

    def test_summary_totals_match_evaluation_csv(self, fast_run):
        _, out = fast_run
        text = (out / "summary.txt").read_text()
        csv_lines = (out / "evaluation_test.csv").read_text().strip()
        for line in csv_lines.splitlines()[1:]:
            name = line.split(",")[0]
            total = line.rsplit(",", 2)[1]
            assert f"{name}: total={total} " in text

    def test_extract_stage_rerun_is_bit_identical(self, fast_run):
        cfg, out = fast_run
        before = (out / "rules.txt").read_bytes()
        report_before = (out / "extraction_report.txt").read_bytes()
        run_pipeline(cfg, out, "extract", "extract")
        assert (out / "rules.txt").read_bytes() == before
        assert (out / "extraction_report.txt").read_bytes() == report_before

    def test_two_runs_byte_identical(self, fast_run, tmp_path):
        cfg, out = fast_run
        other = tmp_path / "second"
        run_pipeline(cfg, other)
        for name in ("rules.txt", "summary.txt", "evaluation_test.csv",
                     "provenance.json"):
            assert (other / name).read_bytes() == (out / name).read_bytes()

    def test_resume_requires_upstream(self, tmp_path):
        cfg = PipelineConfig.from_dict(dict(FAST))
        with pytest.raises(ConfigError):
            run_pipeline(cfg, tmp_path / "empty", "train", "train")


class TestMain:
    def test_generate_subcommand(self, tmp_path):
        rc = cli.main(["generate", "--out", str(tmp_path),
                       "--seed", "9", "--function", "F3"])
        assert rc == 0
        assert (tmp_path / "dataset.csv").exists()
        meta = json.loads((tmp_path / "dataset.csv.meta.json").read_text())
        assert meta["seed"] == 9
        assert meta["function_id"] == "F3"

    def test_encode_subcommand_after_generate(self, tmp_path):
        assert cli.main(["generate", "--out", str(tmp_path)]) == 0
        assert cli.main(["encode", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "encoded.csv").exists()

    def test_missing_upstream_is_validation_error(self, tmp_path):
        rc = cli.main(["train", "--out", str(tmp_path)])
        assert rc == 1

    def test_bad_config_file(self, tmp_path):
        bad = tmp_path / "cfg.json"
        bad.write_text("{nope")
        rc = cli.main(["pipeline", "--config", str(bad),
                       "--out", str(tmp_path / "o")])
        assert rc == 1

    def test_stage_failure_exits_2_and_keeps_partial_outputs(self, tmp_path):
        assert cli.main(["generate", "--out", str(tmp_path)]) == 0
        assert cli.main(["encode", "--out", str(tmp_path)]) == 0
        (tmp_path / "model_trained.json").write_text("{corrupt")
        rc = cli.main(["prune", "--out", str(tmp_path)])
        assert rc == 2
        assert (tmp_path / "encoded.csv").exists()
