"""Pre-training on demonstrations and the interleaved act/train loop."""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np

from ..dialog.actions import enumerate_actions
from ..dialog.database import EntityDatabase
from ..dialog.featurizer import StateFeaturizer
from ..dialog.models import DialogState, Ontology
from ..errors import NonFiniteError
from ..network.checkpoint import save_checkpoint
from ..network.dueling import QNetParams, forward, sync_target
from ..network.radam import RAdam
from ..policy.base import Policy
from ..policy.experts import ExpertSpec, make_expert
from ..replay.buffer import BufferConfig, SumTreeBuffer, Transition
from ..replay.demo_file import DemoSet
from ..simulator.environment import DialogEnvironment, EnvConfig
from ..simulator.episode import write_episode_logs
from .config import AgentConfig, NetworkConfig
from .exploration import epsilon_at, select_action
from .losses import total_loss
from .metrics_log import PRETRAIN, TRAIN, EpisodeStats, MetricsLog

logger = logging.getLogger(__name__)

ActionChooser = Callable[[DialogState, np.ndarray], int]


@dataclass
class CheckpointRecord:
    """A saved snapshot of the online network."""
    frame: int  # on the metrics-log frame axis
    agent_frame: int  # epsilon-greedy frames at save time
    params: QNetParams
    path: Optional[Path] = None


@dataclass
class RunArtifacts:
    """Everything a training run produces."""
    metrics: List[EpisodeStats]
    checkpoints: List[CheckpointRecord]
    params: QNetParams
    metadata: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    pretrain_frames: int = 0
    run_dir: Optional[Path] = None


def _plain(config) -> Dict[str, Any]:
    return {k: (v.value if isinstance(v, Enum) else v) for k, v in asdict(config).items()}


class DQfDAgent:
    """
    Owns the networks, optimizer, replay buffer and environment of one run.

    Every random stream is spawned from one root seed: goals, exploration,
    minibatch sampling, weight init and the expert each get their own, so two
    runs with the same seed and config produce identical logs.

    Args:
        ontology: Ontology of the dialog world
        db: Entity database
        config: Learning-loop hyperparameters
        network: Network and optimizer settings
        buffer: Replay settings
        env_config: Simulator settings
        seed: Root seed
        run_dir: Directory for metrics.csv and checkpoints; in-memory only when None
        episode_log: JSON-lines file receiving every episode, if given
    """

    def __init__(
        self,
        ontology: Ontology,
        db: EntityDatabase,
        config: Optional[AgentConfig] = None,
        network: Optional[NetworkConfig] = None,
        buffer: Optional[BufferConfig] = None,
        env_config: Optional[EnvConfig] = None,
        seed: int = 0,
        run_dir: Union[str, Path, None] = None,
        episode_log: Union[str, Path, None] = None,
    ):
        self.ontology = ontology
        self.db = db
        self.config = config or AgentConfig()
        self.network_config = network or NetworkConfig()
        self.buffer_config = buffer or BufferConfig()
        self.env_config = env_config or EnvConfig()
        self.seed = seed
        self.run_dir = Path(run_dir) if run_dir is not None else None
        self.episode_log = Path(episode_log) if episode_log is not None else None

        env_seq, explore_seq, sample_seq, init_seq, expert_seq = np.random.SeedSequence(seed).spawn(5)
        self.explore_rng = np.random.default_rng(explore_seq)
        self.sample_rng = np.random.default_rng(sample_seq)
        self.expert_rng = np.random.default_rng(expert_seq)

        self.featurizer = StateFeaturizer(ontology)
        self.actions = enumerate_actions(ontology)
        self.env = DialogEnvironment(ontology, db, self.env_config, seed=env_seq, actions=self.actions)

        net = self.network_config
        self.params = QNetParams.init(
            self.featurizer.length, len(self.actions), net.hidden_size,
            np.random.default_rng(init_seq), np.dtype(net.dtype),
        )
        self.target = sync_target(self.params)
        self.optimizer = RAdam(net.lr, net.betas, net.eps, net.lr_step_frames)
        self.buffer = SumTreeBuffer(self.featurizer.length, self.buffer_config, len(self.actions))

        if self.run_dir is not None:
            self.run_dir.mkdir(parents=True, exist_ok=True)
        self.metrics = MetricsLog(self.run_dir / "metrics.csv" if self.run_dir else None)
        self.checkpoints: List[CheckpointRecord] = []

        self.frame = 0
        self.agent_frame = 0
        self.episode = 0
        self.pretrain_frames = 0
        self.gradient_steps = 0
        self.last_loss: Optional[float] = None

    @property
    def metadata(self) -> Dict[str, Dict[str, Any]]:
        return {
            "run": {"seed": self.seed},
            "agent": _plain(self.config),
            "network": _plain(self.network_config),
            "buffer": _plain(self.buffer_config),
            "env": _plain(self.env_config),
        }

    def make_expert(self, spec: ExpertSpec) -> Policy:
        """Expert policy drawing from this run's expert random stream."""
        return make_expert(spec, self.ontology, self.db, self.expert_rng, self.actions)

    def greedy_action(self, state: DialogState) -> int:
        return int(np.argmax(forward(self.params, self.featurizer.featurize(state))))

    def _play_episode(self, choose: ActionChooser, phase: str, is_demo: bool, on_frame: Callable[[], None]):
        _, state = self.env.reset()
        x = self.featurizer.featurize(state)
        total, turns, success = 0.0, 0, False
        while True:
            action = choose(state, x)
            result = self.env.step(action)
            state = self.env.state
            x_next = self.featurizer.featurize(state)
            self.buffer.push(Transition(x, action, result.reward, x_next, result.done, is_demo))
            total += result.reward
            turns += 1
            self.frame += 1
            x = x_next
            on_frame()
            if result.done:
                success = bool(result.success)
                break
            if phase == TRAIN and self.agent_frame >= self.config.total_frames:
                return None

        self.episode += 1
        if self.episode_log is not None:
            write_episode_logs([self.env.log], self.episode_log)
        stats = EpisodeStats(
            frame=self.frame,
            episode=self.episode,
            phase=phase,
            return_=total,
            turns=turns,
            success=success,
            epsilon=0.0 if phase == PRETRAIN else epsilon_at(self.agent_frame, self.config),
            loss=self.last_loss,
        )
        self.metrics.append(stats)
        logger.debug(
            f"Episode {self.episode} ({phase}): return={total:.1f} turns={turns} success={success}"
        )
        return stats

    def train_round(self, batches: int) -> Optional[float]:
        """
        Sync the target network, then run ``batches`` prioritized updates.

        Returns:
            Mean loss over the round, or None if the buffer is empty

        Raises:
            NonFiniteError: If a loss, target or gradient is not finite
        """
        if len(self.buffer) == 0 or batches == 0:
            return None
        self.target = sync_target(self.params)
        losses = []
        for _ in range(batches):
            batch = self.buffer.sample(self.config.batch_size, self.sample_rng)
            try:
                result = total_loss(batch, self.params, self.target, self.config, self.network_config.l2_weight)
                self.optimizer.step(self.params, result.grads, self.agent_frame)
            except NonFiniteError as exc:
                logger.warning(
                    f"Aborting at frame {self.frame}, gradient step {self.gradient_steps}: {exc}; "
                    f"max |param| = {max(float(np.nanmax(np.abs(v))) for _, v in self.params.items()):.3g}"
                )
                raise
            self.buffer.update_priorities(batch.indices, result.delta)
            self.gradient_steps += 1
            losses.append(result.loss)
        self.buffer.verify()
        if not self.params.all_finite():
            raise NonFiniteError(f"Network weights became non-finite at frame {self.frame}")
        self.last_loss = float(np.mean(losses))
        return self.last_loss

    def load_demos(self, demos: DemoSet) -> int:
        """
        Push file demonstrations into the protected partition.

        Episode boundaries are recovered from terminal flags and logged on the
        frame axis with phase ``pretrain``.
        """
        total, turns = 0.0, 0
        for t in demos.transitions:
            self.buffer.push(t)
            self.frame += 1
            total += t.r
            turns += 1
            if t.terminal:
                self.episode += 1
                self.metrics.append(EpisodeStats(
                    frame=self.frame, episode=self.episode, phase=PRETRAIN, return_=total,
                    turns=turns, success=t.r > 0, epsilon=0.0, loss=None,
                ))
                total, turns = 0.0, 0
        self.pretrain_frames = self.frame
        logger.info(f"Loaded {len(demos)} demonstration transitions")
        return len(demos)

    def collect_demos(self, expert: Policy, episodes: int) -> int:
        """
        Let the expert act for ``episodes`` episodes, storing demo transitions.

        Returns:
            Number of transitions stored
        """
        def choose(state, x):
            return expert.act(state)

        def on_frame():
            if self.config.pretrain_interleaved and self.frame % self.config.train_every == 0:
                self.train_round(self.config.batches_per_round)

        before = self.buffer.demo_count
        for _ in range(episodes):
            expert.init_session()
            self._play_episode(choose, PRETRAIN, True, on_frame)
        self.pretrain_frames = self.frame
        stored = self.buffer.demo_count - before
        logger.info(f"Collected {stored} demonstration transitions over {episodes} episodes")
        return stored

    def pretrain(self, expert: Optional[Policy] = None, demos: Optional[DemoSet] = None) -> None:
        """
        Fill the demo partition, then run ``pretrain_gradient_steps`` updates on it.

        Demonstrations come from ``demos`` when given, otherwise from running
        ``expert``. Skipped entirely in DQN mode.
        """
        if not self.config.mode.uses_demos:
            logger.info("DQN mode: skipping pre-training")
            return
        if demos is not None:
            self.load_demos(demos)
        elif expert is not None:
            self.collect_demos(expert, self.config.pretrain_demo_episodes)

        steps = self.config.pretrain_gradient_steps
        per_round = self.config.batches_per_round or steps
        done = 0
        while done < steps:
            batches = min(per_round, steps - done)
            if self.train_round(batches) is None:
                break
            done += batches
        logger.info(f"Pre-training finished: {self.buffer.demo_count} demos, {done} gradient steps")

    def checkpoint(self) -> CheckpointRecord:
        path = None
        if self.run_dir is not None:
            directory = self.run_dir / "checkpoints"
            directory.mkdir(exist_ok=True)
            path = save_checkpoint(
                directory / f"frame-{self.frame:09d}.ckpt",
                self.params,
                self.frame,
                {"agent": self.metadata["agent"], "run": {"seed": self.seed, "agent_frame": self.agent_frame}},
            )
        record = CheckpointRecord(frame=self.frame, agent_frame=self.agent_frame, params=self.params.copy(), path=path)
        self.checkpoints.append(record)
        logger.info(f"Checkpoint at frame {self.frame}")
        return record

    def train(self) -> None:
        """Act epsilon-greedily for ``total_frames`` frames, training every ``train_every``."""
        config = self.config

        def choose(state, x):
            q = forward(self.params, x)
            return select_action(q, epsilon_at(self.agent_frame, config), self.explore_rng)

        def on_frame():
            self.agent_frame += 1
            if self.agent_frame % config.train_every == 0:
                loss = self.train_round(config.batches_per_round)
                recent = self.metrics.phase(TRAIN)[-config.moving_average_window:]
                rate = 100.0 * sum(e.success for e in recent) / len(recent) if recent else 0.0
                logger.info(
                    f"Frame {self.frame}: eps={epsilon_at(self.agent_frame, config):.3f} "
                    f"loss={loss if loss is not None else float('nan'):.4f} success={rate:.1f}%"
                )
            if self.agent_frame % config.checkpoint_every == 0:
                self.checkpoint()

        while self.agent_frame < config.total_frames:
            self._play_episode(choose, TRAIN, False, on_frame)
        if not self.checkpoints or self.checkpoints[-1].frame != self.frame:
            self.checkpoint()

    def run(self, expert: Optional[Policy] = None, demos: Optional[DemoSet] = None) -> RunArtifacts:
        """Pre-train (unless DQN), train, and collect the artifacts."""
        logger.info(f"Run start: mode={self.config.mode.value} seed={self.seed}")
        self.pretrain(expert, demos)
        self.train()
        logger.info(f"Run end: {self.frame} frames, {self.episode} episodes, {self.gradient_steps} gradient steps")
        return RunArtifacts(
            metrics=list(self.metrics.episodes),
            checkpoints=list(self.checkpoints),
            params=self.params,
            metadata=self.metadata,
            pretrain_frames=self.pretrain_frames,
            run_dir=self.run_dir,
        )


def pretrain(agent: DQfDAgent, expert: Optional[Policy] = None, demos: Optional[DemoSet] = None) -> None:
    """Functional form of ``DQfDAgent.pretrain``."""
    agent.pretrain(expert, demos)


def train(
    ontology: Ontology,
    db: EntityDatabase,
    config: AgentConfig,
    seed: int,
    expert: Optional[Policy] = None,
    demos: Optional[DemoSet] = None,
    **kwargs,
) -> RunArtifacts:
    """
    Build an agent and run it end to end.

    Args:
        ontology: Ontology of the dialog world
        db: Entity database
        config: Learning-loop hyperparameters
        seed: Root seed
        expert: Demonstrator to run during pre-training
        demos: Pre-collected demonstrations, used instead of ``expert``
        **kwargs: Forwarded to DQfDAgent (network, buffer, env_config, run_dir, episode_log)

    Returns:
        RunArtifacts of the finished run
    """
    agent = DQfDAgent(ontology, db, config, seed=seed, **kwargs)
    return agent.run(expert, demos)
