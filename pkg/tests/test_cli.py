"""Tests for the command-line interface and the chat session."""

import io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from dqfdialog import __version__
from dqfdialog.cli import EXIT_RUNTIME, EXIT_USAGE, chat_session, cli, main
from dqfdialog.dialog import StateFeaturizer, TemplateKind, enumerate_actions
from dqfdialog.network import QNetParams, save_checkpoint
from dqfdialog.policy import GreedyQPolicy

TINY_TRAIN = [
    "--set", "agent.train_every=25",
    "--set", "agent.batches_per_round=2",
    "--set", "agent.batch_size=8",
    "--set", "agent.checkpoint_every=25",
    "--set", "agent.epsilon_decay_frames=50",
    "--set", "network.hidden_size=8",
    "--set", "run.eval_episodes=3",
]


def reqmore_params(ontology) -> QNetParams:
    """Weights whose greedy action is always ReqMore."""
    actions = enumerate_actions(ontology)
    params = QNetParams.init(StateFeaturizer(ontology).length, len(actions), 8, np.random.default_rng(0))
    params.w_v[:] = 0.0
    params.W_a[:] = 0.0
    params.b_a[:] = 0.0
    params.b_a[actions.find(TemplateKind.REQ_MORE)] = 1.0
    return params


@pytest.fixture
def checkpoint_file(ontology, tmp_path):
    return save_checkpoint(tmp_path / "reqmore.ckpt", reqmore_params(ontology))


def test_help_and_version():
    """Test the group help and version flags."""
    runner = CliRunner()
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for command in ("demo-collect", "train", "eval", "chat", "trends", "calibrate", "compare"):
        assert command in result.output

    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_demo_collect(tmp_path):
    """Test demonstrations are written once and never overwritten."""
    out = tmp_path / "rule.demos"
    runner = CliRunner()
    result = runner.invoke(cli, ["demo-collect", "-o", str(out), "--episodes", "2", "--seed", "0"])

    assert result.exit_code == 0, result.output
    assert "from 2 episodes" in result.output
    assert "success rate: 100.00%" in result.output
    assert out.exists()
    meta = json.loads((tmp_path / "rule.demos.meta.json").read_text())
    assert meta["expert_spec"] == "rule"
    assert meta["episodes"] == 2

    again = runner.invoke(cli, ["demo-collect", "-o", str(out), "--episodes", "2"])
    assert again.exit_code == EXIT_RUNTIME
    assert "Refusing to overwrite" in again.output


def test_demo_collect_without_episodes_fails(tmp_path):
    """Test an empty demonstration set is a runtime failure."""
    assert main(["demo-collect", "-o", str(tmp_path / "empty.demos"), "--episodes", "0"]) == EXIT_RUNTIME
    assert not (tmp_path / "empty.demos").exists()


def test_train_requires_demos(tmp_path):
    """Test demo-using modes refuse to start without demonstrations."""
    code = main(["train", "--mode", "dqfd", "--seed", "1", "-o", str(tmp_path / "run")])
    assert code == EXIT_USAGE
    assert not (tmp_path / "run").exists()


def test_usage_errors(tmp_path, checkpoint_file):
    """Test missing or conflicting arguments exit with the usage code."""
    assert main(["eval", "--checkpoint", str(checkpoint_file)]) == EXIT_USAGE
    assert main(["eval"]) == EXIT_USAGE
    assert main(["demo-collect", "-o", str(tmp_path / "x.demos"), "--set", "agent.colour=red"]) == EXIT_USAGE
    config = tmp_path / "config.cfg"
    config.write_text("[agent]\ngamma = 0.9\n")
    args = ["eval", "--checkpoint", str(checkpoint_file), "--seed", "1", "--config", str(config), "--preset", "desk"]
    assert main(args) == EXIT_USAGE


def test_eval_checkpoint(checkpoint_file, tmp_path):
    """Test a bare checkpoint evaluation and its report files."""
    runner = CliRunner()
    out = tmp_path / "report"
    result = runner.invoke(cli, [
        "eval", "--checkpoint", str(checkpoint_file), "--seed", "3", "-n", "4", "-o", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert "reqmore.ckpt" in result.output

    report = json.loads((out / "report.json").read_text())
    assert report["episodes"] == 4
    assert report["eval_seed"] == 3
    assert report["metrics"]["success_rate"] == 0.0
    assert len((out / "report.csv").read_text().splitlines()) == 5


def test_chat_session(ontology, db):
    """Test acts, state, Q-values, unknown input and the closing bye."""
    policy = GreedyQPolicy(reqmore_params(ontology), StateFeaturizer(ontology))
    lines = "\n".join([
        "inform hotel area=north",
        "inform hotel colour=red",
        "hello there",
        "state",
        "q",
        "bye",
    ]) + "\n"
    state = chat_session(policy, ontology, db, io.StringIO(lines))

    assert state.terminated
    assert state["hotel"].constraints == {"area": "north"}
    assert state.turn == 1
    assert state.ignored_acts == 0


def test_chat_command(checkpoint_file):
    """Test the chat command reads acts from standard input."""
    runner = CliRunner()
    result = runner.invoke(
        cli, ["chat", "--checkpoint", str(checkpoint_file)],
        input="inform hotel area=north\ninform hotel colour=red\nbye\n",
    )
    assert result.exit_code == 0, result.output
    assert "system: reqmore" in result.output
    assert "Unknown domain, slot or value" in result.output
    assert "Goodbye. Final state:" in result.output
    assert "hotel: area=north" in result.output


def test_chat_quit_and_end_of_input(ontology, db):
    """Test quit and end of input both end the session."""
    policy = GreedyQPolicy(reqmore_params(ontology), StateFeaturizer(ontology))
    assert not chat_session(policy, ontology, db, io.StringIO("quit\ninform hotel area=north\n")).domains["hotel"].active
    assert chat_session(policy, ontology, db, io.StringIO("")).turn == 0


@pytest.mark.integration
def test_train_eval_trends(tmp_path):
    """Test a tiny DQN run end to end: train, re-evaluate and plot."""
    runner = CliRunner()
    out = tmp_path / "runs" / "dqn"
    result = runner.invoke(cli, [
        "train", "--mode", "dqn", "--seed", "1", "--total-frames", "50", "-o", str(out), *TINY_TRAIN,
    ])
    assert result.exit_code == 0, result.output

    seed_dir = out / "seed-1"
    for name in ("config.cfg", "metrics.csv", "report.json", "report.csv", "trends.csv", "trends.svg"):
        assert (seed_dir / name).exists(), name
    assert (out / "config.cfg").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert list(summary["seeds"]) == ["1"]
    report = json.loads((seed_dir / "report.json").read_text())
    assert report["checkpoint"].startswith("checkpoints/")
    assert (seed_dir / report["checkpoint"]).exists()

    result = runner.invoke(cli, ["eval", "--run-dir", str(seed_dir), "-n", "3"])
    assert result.exit_code == 0, result.output

    result = runner.invoke(cli, ["trends", str(seed_dir), "--window", "5", "-o", str(tmp_path / "plots")])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "plots" / "trends.svg").exists()

    again = runner.invoke(cli, ["train", "--mode", "dqn", "--seed", "1", "--total-frames", "50", "-o", str(out)])
    assert again.exit_code == EXIT_RUNTIME
