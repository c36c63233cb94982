"""High-level API: collect demonstrations, train, evaluate and compare policies."""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .agent.trainer import DQfDAgent, RunArtifacts
from .dialog.actions import ActionSpace, enumerate_actions
from .dialog.database import EntityDatabase
from .dialog.featurizer import StateFeaturizer
from .dialog.models import Ontology
from .errors import MissingDemos, RunDirectoryExists
from .evaluation.checkpoints import select_best_checkpoint
from .evaluation.metrics import EpisodeResult, MetricsReport, run_episodes
from .evaluation.trends import emit_trends
from .network.checkpoint import Checkpoint, load_checkpoint
from .network.dueling import QNetParams
from .policy.base import Policy
from .policy.experts import ExpertSpec, RulePolicy, WeakExpertPolicy, make_expert
from .policy.greedy import GreedyQPolicy, RandomPolicy
from .replay.buffer import Transition
from .replay.demo_file import DemoSet, read_demo_file, write_demo_file
from .runconfig import CONFIG_FILE, RunConfig, save_run_config
from .simulator.environment import DialogEnvironment, EnvConfig
from .simulator.episode import EpisodeLog
from .simulator.evaluator import evaluate_goal

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_CSV = "report.csv"
SUMMARY_JSON = "summary.json"


@dataclass
class DemoCollection:
    """Demonstrations gathered from an expert and how well the expert did."""
    demos: DemoSet
    report: MetricsReport
    logs: List[EpisodeLog] = field(default_factory=list, repr=False)


@dataclass
class TrainOutcome:
    """One finished training session and its best-checkpoint evaluation."""
    seed: int
    artifacts: RunArtifacts
    best_checkpoint: int
    report: MetricsReport
    run_dir: Optional[Path] = None


def collect_demonstrations(
    ontology: Ontology,
    db: EntityDatabase,
    spec: ExpertSpec,
    episodes: int,
    seed: int,
    env_config: Optional[EnvConfig] = None,
) -> DemoCollection:
    """
    Run an expert for ``episodes`` episodes and record every transition.

    Args:
        ontology: Ontology of the dialog world
        db: Entity database
        spec: Which expert to run
        episodes: Number of episodes
        seed: Root seed for goals and the expert's randomness
        env_config: Simulator settings

    Returns:
        DemoCollection with the transitions and the expert's metrics

    Raises:
        EmptyDemoSet: If no episodes are requested (raised on write)
    """
    env_seq, expert_seq = np.random.SeedSequence(seed).spawn(2)
    actions = enumerate_actions(ontology)
    featurizer = StateFeaturizer(ontology)
    env = DialogEnvironment(ontology, db, env_config, seed=env_seq, actions=actions)
    expert = make_expert(spec, ontology, db, np.random.default_rng(expert_seq), actions)

    transitions: List[Transition] = []
    results = []
    logs = []
    for episode in range(episodes):
        expert.init_session()
        _, state = env.reset()
        x = featurizer.featurize(state)
        total, turns = 0.0, 0
        while True:
            action = expert.act(state)
            result = env.step(action)
            state = env.state
            x_next = featurizer.featurize(state)
            transitions.append(Transition(x, action, result.reward, x_next, result.done, True))
            total += result.reward
            turns += 1
            x = x_next
            if result.done:
                break
        results.append(EpisodeResult(episode, turns, total, evaluate_goal(env.log.goal, env.log)))
        logs.append(env.log)

    report = MetricsReport.from_results(results)
    if episodes:
        logger.info(f"Expert {spec}: {len(transitions)} transitions, success={report.success_rate:.1f}%")
    return DemoCollection(DemoSet(transitions, featurizer.length, len(actions)), report, logs)


def save_demonstrations(collection: DemoCollection, path: Union[str, Path], meta: Optional[Dict[str, Any]] = None) -> Path:
    """
    Write the demo file plus a ``.meta.json`` sidecar with the expert's metrics.

    Raises:
        EmptyDemoSet: If the collection holds no transitions
    """
    path = Path(path)
    demos = collection.demos
    write_demo_file(path, demos.transitions, demos.vector_length, demos.action_count)
    sidecar = path.with_name(path.name + ".meta.json")
    sidecar.write_text(json.dumps({"records": len(demos), **(meta or {}), "expert": collection.report.summary()},
                                  indent=2), encoding="utf-8")
    return path


def load_demonstrations(path: Union[str, Path], ontology: Ontology) -> DemoSet:
    """
    Read a demo file and check it fits ``ontology``.

    Raises:
        FormatError: If the file is malformed or sized for another ontology
    """
    return read_demo_file(path, StateFeaturizer(ontology).length, len(enumerate_actions(ontology)))


def load_policy(path: Union[str, Path], ontology: Ontology) -> Tuple[GreedyQPolicy, Checkpoint]:
    """
    Greedy policy from a checkpoint file.

    Raises:
        FormatError: If the checkpoint does not fit the ontology's state or action space
    """
    featurizer = StateFeaturizer(ontology)
    checkpoint = load_checkpoint(path, featurizer.length, len(enumerate_actions(ontology)))
    return GreedyQPolicy(checkpoint.params, featurizer), checkpoint


def _env_factory(ontology: Ontology, db: EntityDatabase, env_config: Optional[EnvConfig], actions: ActionSpace):
    def make() -> DialogEnvironment:
        return DialogEnvironment(ontology, db, env_config, actions=actions)
    return make


def evaluate_params(
    params: QNetParams,
    ontology: Ontology,
    db: EntityDatabase,
    env_config: Optional[EnvConfig],
    episodes: int,
    seed: int,
    workers: int = 1,
) -> MetricsReport:
    """Greedy evaluation of network weights over seeded episodes."""
    policy = GreedyQPolicy(params, StateFeaturizer(ontology))
    return run_episodes(policy, _env_factory(ontology, db, env_config, enumerate_actions(ontology)), episodes, seed, workers)


def evaluate_checkpoint(
    path: Union[str, Path],
    ontology: Ontology,
    db: EntityDatabase,
    env_config: Optional[EnvConfig],
    episodes: int,
    seed: int,
    workers: int = 1,
) -> MetricsReport:
    """
    Load a checkpoint and evaluate it greedily.

    Raises:
        FormatError: On a malformed or mismatched checkpoint
        ValueError: If episodes < 1
    """
    policy, _ = load_policy(path, ontology)
    return evaluate_params(policy.params, ontology, db, env_config, episodes, seed, workers)


def baseline_policies(
    ontology: Ontology,
    db: EntityDatabase,
    error_rate: float,
) -> Dict[str, Any]:
    """Rule, weak and random baselines as policies or per-episode factories."""
    actions = enumerate_actions(ontology)

    def weak(episode_seed: int) -> Policy:
        return WeakExpertPolicy(ontology, db, error_rate, episode_seed, actions)

    def random(episode_seed: int) -> Policy:
        return RandomPolicy(len(actions), episode_seed)

    return {"rule": RulePolicy(ontology, db, actions), "weak": weak, "random": random}


def compare_policies(
    ontology: Ontology,
    db: EntityDatabase,
    env_config: Optional[EnvConfig],
    checkpoints: Sequence[Union[str, Path]],
    episodes: int,
    seed: int,
    error_rate: float = 0.3,
    workers: int = 1,
) -> List[Tuple[str, MetricsReport]]:
    """
    Evaluate baselines and checkpoints on the same seeded episodes.

    Returns:
        (name, report) pairs: rule, weak, random, then one per checkpoint
    """
    actions = enumerate_actions(ontology)
    make_env = _env_factory(ontology, db, env_config, actions)
    rows = []
    for name, policy in baseline_policies(ontology, db, error_rate).items():
        rows.append((name, run_episodes(policy, make_env, episodes, seed, workers)))
    for path in checkpoints:
        policy, _ = load_policy(path, ontology)
        rows.append((Path(path).name, run_episodes(policy, make_env, episodes, seed, workers)))
    return rows


def write_report(report: MetricsReport, out_dir: Union[str, Path], extra: Optional[Dict[str, Any]] = None) -> Tuple[Path, Path]:
    """
    Persist a report as ``report.json`` (summary) and ``report.csv`` (per episode).

    Raises:
        RunDirectoryExists: If a report is already present in ``out_dir``
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / REPORT_JSON
    csv_path = out_dir / REPORT_CSV
    for path in (json_path, csv_path):
        if path.exists():
            raise RunDirectoryExists(f"Refusing to overwrite {path}")

    json_path.write_text(json.dumps({**(extra or {}), "metrics": report.summary()}, indent=2), encoding="utf-8")
    with open(csv_path, "w", newline="", encoding="utf-8") as stream:
        writer = None
        for result in report.rows:
            row = result.row()
            if writer is None:
                writer = csv.DictWriter(stream, fieldnames=list(row))
                writer.writeheader()
            writer.writerow(row)
    return json_path, csv_path


def prepare_run_dir(path: Union[str, Path]) -> Path:
    """
    Create a fresh run directory.

    Raises:
        RunDirectoryExists: If the directory exists and is not empty
    """
    path = Path(path)
    if path.exists() and any(path.iterdir()):
        raise RunDirectoryExists(f"Run directory {path} already exists; choose a new output path")
    path.mkdir(parents=True, exist_ok=True)
    return path


def train_seed(
    config: RunConfig,
    seed: int,
    run_dir: Union[str, Path, None] = None,
    demos: Optional[DemoSet] = None,
    live_expert: bool = False,
    episode_log: Union[str, Path, None] = None,
) -> TrainOutcome:
    """
    Train one session, pick its best checkpoint and evaluate it.

    With a run directory, the directory receives ``config.cfg``,
    ``metrics.csv``, ``checkpoints/``, ``report.json``, ``report.csv`` and
    the trend files.

    Args:
        config: Run configuration
        seed: Root seed of this session
        run_dir: Fresh output directory, or None to stay in memory
        demos: Demonstrations for the demo-using modes
        live_expert: Let the configured expert act during pre-training instead of a demo file
        episode_log: JSON-lines file receiving every episode

    Raises:
        MissingDemos: If the mode needs demonstrations and none are provided
        RunDirectoryExists: If ``run_dir`` is not fresh
    """
    mode = config.agent.mode
    if mode.uses_demos and demos is None and not live_expert:
        raise MissingDemos(f"Mode '{mode.value}' needs demonstrations: pass a demo file or use the live expert")

    ontology, db = config.load_world()
    if run_dir is not None:
        run_dir = prepare_run_dir(run_dir)
        save_run_config(config.with_overrides([f"run.seeds={seed}"]), run_dir / CONFIG_FILE)

    agent = DQfDAgent(
        ontology, db, config.agent, config.network, config.buffer, config.env,
        seed=seed, run_dir=run_dir, episode_log=episode_log,
    )
    expert = agent.make_expert(config.expert_spec) if live_expert and demos is None else None
    artifacts = agent.run(expert, demos if mode.uses_demos else None)

    window = config.agent.moving_average_window
    best = select_best_checkpoint(artifacts.metrics, artifacts.checkpoints, window)
    record = artifacts.checkpoints[best]
    report = evaluate_params(
        record.params, ontology, db, config.env, config.run.eval_episodes, config.run.eval_seed, config.run.workers,
    )
    logger.info(f"Seed {seed}: best checkpoint at frame {record.frame}, success={report.success_rate:.1f}%")

    if run_dir is not None:
        write_report(report, run_dir, {
            "seed": seed,
            "checkpoint": str(record.path.relative_to(run_dir)) if record.path else None,
            "checkpoint_frame": record.frame,
            "eval_seed": config.run.eval_seed,
            "episodes": config.run.eval_episodes,
        })
        emit_trends(artifacts.metrics, run_dir, window, config.env.max_turns)
    return TrainOutcome(seed=seed, artifacts=artifacts, best_checkpoint=best, report=report, run_dir=run_dir)


def summarize_seeds(outcomes: Sequence[TrainOutcome]) -> Dict[str, Any]:
    """Per-seed metrics and their mean; book rate averages over seeds that report one."""
    per_seed = {str(o.seed): o.report.summary() for o in outcomes}
    mean: Dict[str, Optional[float]] = {}
    for key in ("avg_turns", "avg_return", "precision", "recall", "f1", "success_rate", "book_rate"):
        values = [s[key] for s in per_seed.values() if s[key] is not None]
        mean[key] = float(np.mean(values)) if values else None
    return {"seeds": per_seed, "mean": mean}


def write_summary(outcomes: Sequence[TrainOutcome], out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir) / SUMMARY_JSON
    path.write_text(json.dumps(summarize_seeds(outcomes), indent=2), encoding="utf-8")
    return path
