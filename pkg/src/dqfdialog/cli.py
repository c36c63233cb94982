"""Command-line interface for dqfdialog."""

import click
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

from . import __version__
from .agent.config import PRESETS
from .agent.metrics_log import read_metrics_log
from .api import (
    REPORT_JSON,
    collect_demonstrations,
    compare_policies,
    evaluate_checkpoint,
    load_demonstrations,
    load_policy,
    prepare_run_dir,
    save_demonstrations,
    train_seed,
    write_report,
    write_summary,
)
from .dialog.actions import enumerate_actions
from .dialog.database import EntityDatabase
from .dialog.models import DialogState, Intent, Ontology
from .dialog.tracker import apply_system_acts, initial_state, mark_booked, track_state
from .errors import ActSyntaxError, ConfigError, DQfDError, MissingDemos, RunDirectoryExists
from .evaluation.calibration import TARGET_SUCCESS_RATE, calibrate_error_rate
from .evaluation.checkpoints import MOVING_AVERAGE_WINDOW
from .evaluation.metrics import MetricsReport
from .evaluation.trends import emit_trends
from .parser.act_parser import ActParser, ChatCommand, format_act
from .policy.greedy import GreedyQPolicy
from .runconfig import CONFIG_FILE, RunConfig, load_run_config, save_run_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

CHAT_HELP = """Type dialog acts, one turn per line, several acts separated by ';':
  inform hotel area=north
  request hotel phone
  inform restaurant food=italian; request restaurant address
  bye
Commands: state (tracked state), q (top-5 Q-values), quit"""


class UsageFailure(click.UsageError):
    """Invalid configuration or arguments (exit code 1)."""
    exit_code = EXIT_USAGE


class RuntimeFailure(click.ClickException):
    """A command failed while running (exit code 2)."""
    exit_code = EXIT_RUNTIME


def handle_errors(command):
    """Translate package errors into click exceptions with our exit codes."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (ConfigError, MissingDemos) as exc:
            raise UsageFailure(str(exc)) from exc
        except (DQfDError, OSError) as exc:
            raise RuntimeFailure(str(exc)) from exc
    return wrapper


def config_options(command):
    """Options shared by every command that builds a RunConfig."""
    command = click.option(
        '--set', 'assignments',
        multiple=True,
        metavar='SECTION.KEY=VALUE',
        help='Override any config field, e.g. --set agent.gamma=0.95 (repeatable)'
    )(command)
    command = click.option(
        '--ontology',
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help='Ontology file (default: packaged desk ontology)'
    )(command)
    command = click.option(
        '--preset',
        type=click.Choice(sorted(PRESETS), case_sensitive=False),
        default=None,
        help='Scale preset (default: desk)'
    )(command)
    command = click.option(
        '--config', 'config_path',
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help='Run config file in key-value text'
    )(command)
    return command


def build_config(
    config_path: Optional[Path],
    preset: Optional[str],
    ontology: Optional[Path],
    assignments: Sequence[str],
    flags: Iterable[Tuple[str, object]] = (),
    check_paths: bool = False,
) -> RunConfig:
    """
    Assemble a RunConfig: config file or preset, then dedicated flags, then --set.

    Raises:
        UsageFailure: If both a config file and a preset are given
        ConfigError: On invalid values, or missing input files when ``check_paths``
    """
    if config_path is not None and preset is not None:
        raise UsageFailure('--config and --preset are mutually exclusive')
    if config_path is not None:
        config = load_run_config(config_path, check_paths=False)
    else:
        config = RunConfig.from_preset((preset or 'desk').lower())

    overrides: List[str] = []
    if ontology is not None:
        overrides.append(f'run.ontology={ontology}')
    for target, value in flags:
        if value is None or value == ():
            continue
        if isinstance(value, (list, tuple)):
            value = ','.join(str(v) for v in value)
        overrides.append(f'{target}={value}')
    config = config.with_overrides(overrides + list(assignments))
    if check_paths:
        config.check_paths()
    return config


def configure_logging(log_level: Optional[str], verbose: bool, debug: bool) -> None:
    if debug:
        log_level = 'DEBUG'
    elif verbose:
        log_level = 'INFO'

    if log_level:
        level = getattr(logging, log_level.upper())
        logging.basicConfig(
            level=level,
            format='%(levelname)s: %(message)s'
        )
        logging.getLogger('dqfdialog').setLevel(level)
    else:
        logging.getLogger('dqfdialog').setLevel(logging.WARNING)


def format_reports(rows: Sequence[Tuple[str, MetricsReport]]) -> str:
    """Comparison table with one row per policy."""
    width = max([len('policy')] + [len(name) for name, _ in rows])
    header = f"{'policy':<{width}}  {'turns':>6} {'return':>8} {'P':>6} {'R':>6} {'F1':>6} {'SR%':>7} {'BR%':>7}"
    lines = [header, '-' * len(header)]
    for name, report in rows:
        book = '-' if report.book_rate is None else f'{report.book_rate:.2f}'
        lines.append(
            f'{name:<{width}}  {report.avg_turns:>6.2f} {report.avg_return:>8.2f} '
            f'{report.precision:>6.3f} {report.recall:>6.3f} {report.f1:>6.3f} '
            f'{report.success_rate:>7.2f} {book:>7}'
        )
    return '\n'.join(lines)


@click.group()
@click.option(
    '--log-level',
    type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
    default=None,
    help='Enable logging at specified level'
)
@click.option(
    '--verbose',
    '-v',
    is_flag=True,
    default=False,
    help='Enable INFO level logging (shortcut for --log-level INFO)'
)
@click.option(
    '--debug',
    is_flag=True,
    default=False,
    help='Enable DEBUG level logging (shortcut for --log-level DEBUG)'
)
@click.version_option(version=__version__)
def cli(log_level: Optional[str], verbose: bool, debug: bool):
    """
    Train and inspect dialog policies with deep Q-learning from demonstrations.

    Examples:

        # Collect rule-expert demonstrations
        dqfdialog demo-collect -o rule.demos --episodes 500

        # Train DQfD on them over three seeds
        dqfdialog train --demos rule.demos --seed 1 --seed 2 --seed 3 -o runs/dqfd-rule

        # Train the DQN baseline
        dqfdialog train --mode dqn --seed 1 -o runs/dqn

        # Re-evaluate a run's best checkpoint
        dqfdialog eval --run-dir runs/dqfd-rule/seed-1

        # Talk to a trained policy in dialog acts
        dqfdialog chat --checkpoint runs/dqfd-rule/seed-1/checkpoints/frame-000260000.ckpt
    """
    configure_logging(log_level, verbose, debug)


@cli.command('demo-collect')
@config_options
@click.option('-o', '--out', type=click.Path(dir_okay=False, path_type=Path), required=True,
              help='Demonstration file to write')
@click.option('--episodes', type=click.IntRange(min=0), default=None,
              help='Expert episodes (default: run.demo_episodes)')
@click.option('--expert', type=click.Choice(['rule', 'weak'], case_sensitive=False), default=None,
              help='Expert kind (default: run.expert)')
@click.option('--error-rate', type=click.FloatRange(0.0, 1.0), default=None,
              help='Weak expert action error rate')
@click.option('--seed', type=int, default=None, help='Root seed (default: first of run.seeds)')
@handle_errors
def demo_collect(config_path, preset, ontology, assignments, out, episodes, expert, error_rate, seed):
    """Run an expert and write its transitions as a demonstration file."""
    config = build_config(config_path, preset, ontology, assignments, [
        ('run.demo_episodes', episodes),
        ('run.expert', expert.lower() if expert else None),
        ('run.error_rate', error_rate),
    ], check_paths=True)
    if out.exists():
        raise RunDirectoryExists(f'Refusing to overwrite {out}')
    seed = config.run.seeds[0] if seed is None else seed
    world, db = config.load_world()

    collection = collect_demonstrations(world, db, config.expert_spec, config.run.demo_episodes, seed, config.env)
    save_demonstrations(collection, out, {
        'expert_spec': str(config.expert_spec),
        'episodes': config.run.demo_episodes,
        'seed': seed,
    })
    rate = collection.report.success_rate
    click.echo(f'Wrote {len(collection.demos)} transitions from {config.run.demo_episodes} episodes to {out}')
    click.echo(f'Expert {config.expert_spec} success rate: {rate:.2f}%')
    if rate < config.run.expert_floor:
        logger.warning(f'Expert success rate {rate:.2f}% is below the floor of {config.run.expert_floor:g}%')


@cli.command()
@config_options
@click.option('-o', '--out', type=click.Path(file_okay=False, path_type=Path), required=True,
              help='Run directory to create (must not exist or be empty)')
@click.option('--seed', 'seeds', type=int, multiple=True, required=True,
              help='Root seed; repeat for one training session per seed')
@click.option('--mode', type=click.Choice(['dqn', 'dqfd', 'prefill'], case_sensitive=False), default=None,
              help='Learning mode (default: agent.mode)')
@click.option('--demos', type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help='Demonstration file for dqfd/prefill')
@click.option('--live-expert', is_flag=True, default=False,
              help='Let the configured expert act during pre-training instead of reading a demo file')
@click.option('--total-frames', type=click.IntRange(min=0), default=None,
              help='Epsilon-greedy frames (default: preset)')
@click.option('--episode-log', type=click.Path(dir_okay=False, path_type=Path), default=None,
              help='Append every episode as JSON lines to this file')
@handle_errors
def train(config_path, preset, ontology, assignments, out, seeds, mode, demos, live_expert, total_frames, episode_log):
    """Train one session per seed; each gets its own seed-<n> directory."""
    config = build_config(config_path, preset, ontology, assignments, [
        ('run.seeds', seeds),
        ('agent.mode', mode.lower() if mode else None),
        ('run.demos', demos),
        ('agent.total_frames', total_frames),
    ], check_paths=True)
    agent_mode = config.agent.mode
    if agent_mode.uses_demos and config.run.demos is None and not live_expert:
        raise MissingDemos(f"Mode '{agent_mode.value}' needs --demos (or --live-expert)")

    out_dir = prepare_run_dir(out)
    save_run_config(config, out_dir / CONFIG_FILE)
    demo_set = None
    if agent_mode.uses_demos and config.run.demos is not None:
        world, _ = config.load_world()
        demo_set = load_demonstrations(config.run.demos, world)

    outcomes = []
    for seed in config.run.seeds:
        click.echo(f'Training seed {seed} ({agent_mode.value}, {config.agent.total_frames} frames)...')
        outcome = train_seed(config, seed, out_dir / f'seed-{seed}', demo_set, live_expert, episode_log)
        outcomes.append(outcome)
        click.echo(f'  best checkpoint frame {outcome.artifacts.checkpoints[outcome.best_checkpoint].frame}, '
                   f'success {outcome.report.success_rate:.2f}%')

    summary = write_summary(outcomes, out_dir)
    click.echo(format_reports([(f'seed-{o.seed}', o.report) for o in outcomes]))
    click.echo(f'✓ Saved run to {out_dir} (summary: {summary.name})')


@cli.command('eval')
@config_options
@click.option('--checkpoint', type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help='Checkpoint file to evaluate')
@click.option('--run-dir', type=click.Path(exists=True, file_okay=False, path_type=Path), default=None,
              help="Seed run directory; evaluates its best checkpoint with its own config")
@click.option('-n', '--episodes', type=click.IntRange(min=1), default=None,
              help='Evaluation episodes (default: run.eval_episodes)')
@click.option('--seed', type=int, default=None, help='Root seed (required without --run-dir)')
@click.option('--workers', type=click.IntRange(min=1), default=None, help='Evaluation threads')
@click.option('-o', '--out', type=click.Path(file_okay=False, path_type=Path), default=None,
              help='Directory for report.json and report.csv')
@handle_errors
def evaluate(config_path, preset, ontology, assignments, checkpoint, run_dir, episodes, seed, workers, out):
    """Evaluate a checkpoint greedily against the simulated user."""
    if run_dir is not None:
        if config_path is not None or preset is not None:
            raise UsageFailure('--run-dir brings its own config; drop --config/--preset')
        config_path = run_dir / CONFIG_FILE
        if checkpoint is None:
            persisted = json.loads((run_dir / REPORT_JSON).read_text(encoding='utf-8'))
            if not persisted.get('checkpoint'):
                raise UsageFailure(f'{run_dir / REPORT_JSON} names no checkpoint')
            checkpoint = run_dir / persisted['checkpoint']
    elif checkpoint is None:
        raise UsageFailure('Give --checkpoint or --run-dir')
    elif seed is None:
        raise UsageFailure('--seed is required when evaluating a bare checkpoint')

    config = build_config(config_path, preset, ontology, assignments, [
        ('run.eval_episodes', episodes),
        ('run.eval_seed', seed),
        ('run.workers', workers),
    ])
    world, db = config.load_world()
    report = evaluate_checkpoint(
        checkpoint, world, db, config.env, config.run.eval_episodes, config.run.eval_seed, config.run.workers,
    )
    click.echo(format_reports([(checkpoint.name, report)]))
    if out is not None:
        json_path, _ = write_report(report, out, {
            'checkpoint': str(checkpoint),
            'eval_seed': config.run.eval_seed,
            'episodes': config.run.eval_episodes,
        })
        click.echo(f'✓ Saved report to {json_path}')


def describe_state(state: DialogState) -> str:
    """Readable summary of the tracked state, one line per active domain."""
    lines = [f'turn {state.turn}']
    for name, tracked in state.domains.items():
        if not (tracked.active or tracked.booked):
            continue
        constraints = ', '.join(f'{slot}={value}' for slot, value in tracked.constraints.items()) or '-'
        parts = [f'{name}: {constraints}']
        if tracked.requested:
            parts.append(f"requested {', '.join(tracked.requested)}")
        parts.append(f'matches {tracked.db_count}')
        if tracked.offered_entity:
            parts.append(f'offered {tracked.offered_entity}')
        if tracked.booked:
            parts.append('booked')
        lines.append('  ' + '; '.join(parts))
    return '\n'.join(lines)


def chat_session(
    policy: GreedyQPolicy,
    ontology: Ontology,
    db: EntityDatabase,
    stream: TextIO,
) -> DialogState:
    """
    Read act lines from ``stream`` and answer with the policy's acts until
    the user says bye, types quit, or input ends.

    Returns:
        The final tracked state
    """
    parser = ActParser()
    actions = enumerate_actions(ontology)
    state = initial_state(ontology, db)
    click.echo(CHAT_HELP)

    while True:
        click.echo('> ', nl=False)
        raw = stream.readline()
        if not raw:
            click.echo()
            break
        line = raw.strip()
        if not line:
            continue
        try:
            parsed = parser.parse(line)
        except ActSyntaxError as exc:
            click.echo(f'{exc}\nTry e.g. "inform hotel area=north" or "request hotel phone".')
            continue

        if parsed.command == ChatCommand.QUIT:
            break
        if parsed.command == ChatCommand.STATE:
            click.echo(describe_state(state))
            continue
        if parsed.command == ChatCommand.QVALUES:
            for index, q in policy.top_actions(state, 5):
                click.echo(f'  {q:>9.3f}  {actions[index]}')
            continue

        tracked = track_state(state, parsed.acts, db)
        if tracked.ignored_acts > state.ignored_acts:
            click.echo(f'Unknown domain, slot or value in "{line}"; nothing changed. Type "state" to see the state.')
            continue
        state = tracked
        if state.terminated:
            click.echo('Goodbye. Final state:')
            click.echo(describe_state(state))
            break

        system_acts = actions.realize(policy.act(state), state, db)
        state = apply_system_acts(state, system_acts)
        for act in system_acts:
            if act.intent == Intent.BOOK:
                try:
                    mark_booked(state, ontology, act.domain)
                except DQfDError as exc:
                    logger.debug(f'Booking not possible: {exc}')
        click.echo('system: ' + '; '.join(format_act(act) for act in system_acts))
        if any(act.intent == Intent.BYE for act in system_acts):
            state.terminated = True
            click.echo('The system ended the dialog. Final state:')
            click.echo(describe_state(state))
            break
    return state


@cli.command()
@config_options
@click.option('--checkpoint', type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True,
              help='Checkpoint to talk to')
@handle_errors
def chat(config_path, preset, ontology, assignments, checkpoint):
    """Interactive dialog-act session with a trained policy."""
    config = build_config(config_path, preset, ontology, assignments)
    world, db = config.load_world()
    policy, _ = load_policy(checkpoint, world)
    chat_session(policy, world, db, click.get_text_stream('stdin'))


@cli.command()
@click.argument('run_dir', type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option('--window', type=click.IntRange(min=1), default=MOVING_AVERAGE_WINDOW,
              help=f'Moving-average window in episodes (default: {MOVING_AVERAGE_WINDOW})')
@click.option('-o', '--out', type=click.Path(file_okay=False, path_type=Path), default=None,
              help='Output directory (default: RUN_DIR)')
@handle_errors
def trends(run_dir, window, out):
    """Write trends.csv and trends.svg from a run's metrics.csv."""
    episodes = read_metrics_log(run_dir / 'metrics.csv')
    csv_path, svg_path = emit_trends(episodes, out or run_dir, window)
    click.echo(f'✓ Saved {csv_path} and {svg_path}')


@cli.command()
@config_options
@click.option('-n', '--episodes', type=click.IntRange(min=1), default=None,
              help='Episodes per error rate (default: run.eval_episodes)')
@click.option('--seed', type=int, default=0, help='Root seed shared by every grid point')
@click.option('--target', type=click.FloatRange(0.0, 100.0), default=TARGET_SUCCESS_RATE,
              help=f'Target success rate in percent (default: {TARGET_SUCCESS_RATE:g})')
@handle_errors
def calibrate(config_path, preset, ontology, assignments, episodes, seed, target):
    """Pick the weak expert's error rate whose success rate is nearest the target."""
    config = build_config(config_path, preset, ontology, assignments, [('run.eval_episodes', episodes)])
    world, db = config.load_world()
    result = calibrate_error_rate(
        world, db, config.env, config.run.eval_episodes, seed, target=target, workers=config.run.workers,
    )
    for rate, success in result.sweep:
        marker = '*' if rate == result.error_rate else ' '
        click.echo(f'{marker} error_rate={rate:<5g} success={success:6.2f}%')
    click.echo(f'Use --set run.error_rate={result.error_rate:g}')


@cli.command()
@config_options
@click.option('--checkpoint', 'checkpoints', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              multiple=True, help='Checkpoint to include (repeatable)')
@click.option('-n', '--episodes', type=click.IntRange(min=1), default=None,
              help='Episodes per policy (default: run.eval_episodes)')
@click.option('--seed', type=int, required=True, help='Root seed shared by every policy')
@click.option('--error-rate', type=click.FloatRange(0.0, 1.0), default=None,
              help='Weak baseline error rate (default: run.error_rate)')
@handle_errors
def compare(config_path, preset, ontology, assignments, checkpoints, episodes, seed, error_rate):
    """Evaluate rule, weak and random baselines and any checkpoints on the same episodes."""
    config = build_config(config_path, preset, ontology, assignments, [
        ('run.eval_episodes', episodes),
        ('run.error_rate', error_rate),
    ])
    world, db = config.load_world()
    rows = compare_policies(
        world, db, config.env, checkpoints, config.run.eval_episodes, seed, config.run.error_rate, config.run.workers,
    )
    click.echo(format_reports(rows))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Console entry point.

    Returns:
        0 on success, 1 on usage errors, 2 on runtime failures
    """
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name='dqfdialog', standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo('Aborted!', err=True)
        return EXIT_USAGE
    except (DQfDError, OSError) as exc:
        click.echo(f'Error: {exc}', err=True)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
