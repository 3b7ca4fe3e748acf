import json
import subprocess
import sys

import pytest

from sliptrack.cli import main
from sliptrack.metrics import METRIC_NAMES

FAST_SAC = """
[sac]
hidden = [8, 8]
batch_size = 8
warmup_steps = 8
replay_capacity = 512
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One happy-path run of every subcommand, shared by the checks below."""
    root = tmp_path_factory.mktemp("cli")
    out = root / "runs"
    cfg = root / "fast.toml"
    cfg.write_text(FAST_SAC)
    base = ["--config", str(cfg), "--out-dir", str(out), "--seed", "0"]

    assert main(base + ["gen", "--count", "2"]) == 0
    assert main(base + ["sweep", "--count", "2"]) == 0
    assert main(base + ["train", "--steps", "30", "--eval-every", "20",
                        "--count", "2"]) == 0
    ckpt = out / "checkpoint_best.npz"
    assert main(base + ["eval", "--checkpoint", str(ckpt), "--count", "2"]) == 0
    assert main(base + ["compare", "--checkpoint", str(ckpt),
                        "--count", "2"]) == 0
    assert main(base + ["trace", "--fixture", "1", "--k-stanley", "2.5",
                        "--k-speed", "2.5", "--count", "2"]) == 0
    assert main(base + ["trace", "--fixture", "0", "--checkpoint", str(ckpt),
                        "--out", str(out / "policy_trace.jsonl"),
                        "--count", "2"]) == 0
    return out, cfg


def test_gen_writes_fixture_files(workspace):
    out, _ = workspace
    fx = out / "fixtures"
    assert (fx / "manifest.json").exists()
    assert (fx / "traj_000.csv").exists()
    assert (fx / "world_001.csv").exists()
    manifest = json.loads((fx / "manifest.json").read_text())
    assert manifest["count"] == 2
    assert manifest["master_seed"] == 0


def test_sweep_writes_heatmaps_and_manifest(workspace):
    out, _ = workspace
    for name in METRIC_NAMES:
        path = out / f"heatmap_{name}.csv"
        assert path.exists()
        lines = path.read_text().splitlines()
        assert lines[0] == "k_stanley,k_speed,value"
        assert len(lines) == 1 + 100  # full 10x10 grid
    assert (out / "sweep_goal_rate.csv").exists()
    manifest = json.loads((out / "sweep_manifest.json").read_text())
    assert len(manifest["fixtures_fingerprint"]) == 64


def test_train_writes_checkpoints_and_curve(workspace):
    out, _ = workspace
    assert (out / "checkpoint_best.npz").exists()
    assert (out / "checkpoint_final.npz").exists()
    curve = (out / "training_curve.csv").read_text().splitlines()
    assert curve[0].startswith("env_steps,avg_reward,")
    assert curve[0].endswith(",goal_rate,alpha")
    assert len(curve) >= 2
    assert curve[1].split(",")[0] == "30"


def test_eval_writes_metrics_and_summary(workspace):
    out, _ = workspace
    metrics = (out / "eval_metrics.csv").read_text().splitlines()
    assert metrics[0] == (
        "fixture," + ",".join(METRIC_NAMES) + ",slip_step_count,reached_goal"
    )
    assert len(metrics) == 3  # header + 2 fixtures
    summary = (out / "eval_summary.csv").read_text().splitlines()
    assert summary[0] == ",".join(METRIC_NAMES) + ",goal_rate"
    assert len(summary) == 2


def test_compare_writes_comparison_and_probe(workspace):
    out, _ = workspace
    lines = (out / "comparison.csv").read_text().splitlines()
    assert lines[0] == (
        "metric,baseline_k_stanley,baseline_k_speed,baseline,adaptive,"
        "improvement_pct"
    )
    names = [line.split(",")[0] for line in lines[1:]]
    assert names == list(METRIC_NAMES) + ["goal_rate"]
    probe = (out / "probe.csv").read_text().splitlines()
    assert probe[0] == (
        "fixture,steps_on_patch,k_stanley_on_patch,k_stanley_off_patch"
    )


def test_trace_writes_jsonl(workspace):
    out, _ = workspace
    lines = (out / "trace_001.jsonl").read_text().splitlines()
    meta = json.loads(lines[0])["meta"]
    assert meta["reached_goal"] in (True, False)
    first = json.loads(lines[1])
    assert first["t"] == 1
    assert first["k_stanley"] == 2.5
    assert (out / "policy_trace.jsonl").exists()


def test_trace_rejects_conflicting_sources(workspace, capsys):
    out, cfg = workspace
    ckpt = out / "checkpoint_best.npz"
    base = ["--config", str(cfg), "--out-dir", str(out), "--seed", "0"]
    code = main(base + ["trace", "--checkpoint", str(ckpt), "--k-stanley",
                        "1.0", "--k-speed", "1.0", "--count", "2"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_trace_requires_some_source(workspace, capsys):
    out, cfg = workspace
    base = ["--config", str(cfg), "--out-dir", str(out), "--seed", "0"]
    assert main(base + ["trace", "--count", "2"]) == 1
    err = capsys.readouterr().err
    assert "provide --checkpoint or both" in err


def test_trace_fixture_out_of_range(workspace, capsys):
    out, cfg = workspace
    base = ["--config", str(cfg), "--out-dir", str(out), "--seed", "0"]
    assert main(base + ["trace", "--fixture", "99", "--k-stanley", "1.0",
                        "--k-speed", "1.0", "--count", "2"]) == 1
    assert "out of range" in capsys.readouterr().err


def test_seed_mismatch_is_refused(workspace, capsys):
    out, cfg = workspace
    base = ["--config", str(cfg), "--out-dir", str(out), "--seed", "7"]
    assert main(base + ["gen", "--count", "2"]) == 1
    assert "requested 7/2" in capsys.readouterr().err


def test_missing_checkpoint_is_an_error(workspace, capsys):
    out, cfg = workspace
    base = ["--config", str(cfg), "--out-dir", str(out), "--seed", "0"]
    assert main(base + ["eval", "--checkpoint", str(out / "nope.npz"),
                        "--count", "2"]) == 1
    assert "error:" in capsys.readouterr().err


def test_compare_refuses_foreign_fixtures(workspace, tmp_path, capsys):
    out, cfg = workspace
    ckpt = out / "checkpoint_best.npz"
    other = tmp_path / "other"
    assert main(["--config", str(cfg), "--out-dir", str(other), "--seed", "1",
                 "gen", "--count", "2"]) == 0
    code = main(["--config", str(cfg), "--out-dir", str(other), "--seed", "1",
                 "compare", "--checkpoint", str(ckpt), "--sweep-dir", str(out),
                 "--count", "2"])
    assert code == 1
    assert "different fixtures" in capsys.readouterr().err


def test_bad_config_path(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "none.toml"), "--out-dir",
                 str(tmp_path), "gen", "--count", "1"]) == 1
    assert "error:" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sliptrack.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "Trajectory tracking workbench" in proc.stdout
    for cmd in ("gen", "sweep", "train", "eval", "compare", "trace"):
        assert cmd in proc.stdout
