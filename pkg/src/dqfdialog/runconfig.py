"""Run configuration: every knob of a run in one round-trippable text file."""

import logging
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union, get_args, get_origin, get_type_hints

from .agent.config import PRESETS, AgentConfig, NetworkConfig, preset, with_overrides
from .dialog.database import ENTITIES_PER_DOMAIN, EntityDatabase
from .dialog.models import Ontology
from .errors import ConfigError, OntologyError
from .parser.kvtext import KeyValueParser, as_list, parse_bool, serialize
from .parser.ontology_parser import load_ontology_file
from .policy.experts import ExpertKind, ExpertSpec
from .replay.buffer import BufferConfig
from .simulator.environment import EnvConfig

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.cfg"
SECTIONS = ("run", "agent", "env", "buffer", "network")


@dataclass
class RunSettings:
    """The ``[run]`` section: paths, seeds and the expert."""
    seeds: List[int] = field(default_factory=lambda: [0])
    preset: str = "desk"
    ontology: Optional[str] = None  # packaged default when unset
    db_seed: int = 0
    entities_per_domain: int = ENTITIES_PER_DOMAIN
    output_dir: Optional[str] = None
    expert: str = "rule"
    error_rate: float = 0.3  # calibrated weak-expert rate for the desk ontology
    demos: Optional[str] = None
    demo_episodes: int = 500
    expert_floor: float = 90.0  # percent; demo-collect warns below this
    eval_episodes: int = 100
    eval_seed: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        """Validate configuration values."""
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        if self.preset not in PRESETS:
            raise ValueError(f"Invalid preset: {self.preset}. Must be one of {', '.join(sorted(PRESETS))}")
        try:
            ExpertKind(self.expert)
        except ValueError:
            raise ValueError(f"Invalid expert: {self.expert}. Must be 'rule' or 'weak'") from None
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError(f"error_rate must be between 0.0 and 1.0, got {self.error_rate}")
        if self.entities_per_domain < 1:
            raise ValueError(f"entities_per_domain must be at least 1, got {self.entities_per_domain}")
        if self.demo_episodes < 0:
            raise ValueError(f"demo_episodes must be non-negative, got {self.demo_episodes}")
        if self.eval_episodes < 1:
            raise ValueError(f"eval_episodes must be at least 1, got {self.eval_episodes}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")


@dataclass
class RunConfig:
    """
    Complete configuration of a run.

    Serializes to sectioned key-value text and parses back to an equal
    object. Sections are ``[run]``, ``[agent]``, ``[env]``, ``[buffer]`` and
    ``[network]``.

    Example:
        >>> config = RunConfig.from_preset("desk")
        >>> RunConfig.parse(config.serialize()) == config
        True
    """
    run: RunSettings = field(default_factory=RunSettings)
    agent: AgentConfig = field(default_factory=AgentConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    buffer: BufferConfig = field(default_factory=BufferConfig)
    network: NetworkConfig = field(default_factory=NetworkConfig)

    @classmethod
    def from_preset(cls, name: str) -> "RunConfig":
        """
        Raises:
            ConfigError: If the preset is unknown
        """
        agent, network = preset(name)
        return cls(run=RunSettings(preset=name), agent=agent, network=network)

    @property
    def expert_spec(self) -> ExpertSpec:
        kind = ExpertKind(self.run.expert)
        return ExpertSpec(kind, self.run.error_rate if kind == ExpertKind.WEAK else 0.0)

    def section(self, name: str):
        if name not in SECTIONS:
            raise ConfigError(f"Unknown config section '{name}'. Choose from {', '.join(SECTIONS)}")
        return getattr(self, name)

    def to_sections(self) -> Dict[str, Dict[str, Any]]:
        return {name: _plain(self.section(name)) for name in SECTIONS}

    def serialize(self) -> str:
        return serialize(self.to_sections(), header="dqfdialog run configuration")

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        """
        Parse configuration text. Missing sections and keys keep the defaults
        of the preset named in ``[run]``, desk when none is named.

        Raises:
            ConfigError: On unknown sections or keys, or invalid values
            OntologyError: On syntax errors
        """
        values: Dict[str, Dict[str, Any]] = {}
        for section in KeyValueParser().parse(text):
            if section.name not in SECTIONS:
                raise ConfigError(f"Line {section.line}: unknown section '[{section.name}]'")
            values.setdefault(section.name, {}).update(section.as_dict())
        preset_name = values.get("run", {}).get("preset", "desk")
        known = isinstance(preset_name, str) and preset_name in PRESETS
        config = cls.from_preset(preset_name) if known else cls()
        for name, raw in values.items():
            config = config.with_section(name, raw)
        return config

    def with_section(self, name: str, raw: Dict[str, Any]) -> "RunConfig":
        """Copy with fields of one section replaced from text values."""
        current = self.section(name)
        hints = get_type_hints(type(current))
        converted = {}
        for key, value in raw.items():
            if key not in hints:
                raise ConfigError(f"Unknown {name} key '{key}'")
            converted[key] = _coerce(f"{name}.{key}", hints[key], value)
        try:
            return replace(self, **{name: with_overrides(current, converted)})
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"[{name}] {exc}") from None

    def with_overrides(self, assignments: Iterable[str]) -> "RunConfig":
        """
        Apply ``section.key=value`` assignments, in order.

        Raises:
            ConfigError: On malformed assignments, unknown keys or bad values
        """
        config = self
        for assignment in assignments:
            section, key, value = parse_assignment(assignment)
            config = config.with_section(section, {key: value})
        return config

    def check_paths(self) -> None:
        """
        Raises:
            ConfigError: If a referenced input file does not exist
        """
        for name in ("ontology", "demos"):
            value = getattr(self.run, name)
            if value is not None and not Path(value).is_file():
                raise ConfigError(f"run.{name} file not found: {value}")

    def load_world(self) -> Tuple[Ontology, EntityDatabase]:
        """
        Load the ontology and generate the entity database.

        Raises:
            ConfigError: If the ontology file is missing or invalid
        """
        try:
            ontology = load_ontology_file(self.run.ontology)
        except FileNotFoundError:
            raise ConfigError(f"Ontology file not found: {self.run.ontology}") from None
        except OntologyError as exc:
            raise ConfigError(f"Invalid ontology {self.run.ontology or '(default)'}: {exc}") from None
        db = EntityDatabase.generate(ontology, self.run.db_seed, self.run.entities_per_domain)
        return ontology, db


def _plain(config) -> Dict[str, Any]:
    values = {}
    for f in fields(config):
        value = getattr(config, f.name)
        if isinstance(value, Enum):
            value = value.value
        elif value is None:
            value = []
        values[f.name] = value
    return values


def _coerce(name: str, hint: Any, value: Union[str, List[str]]) -> Any:
    """Convert a text value to the declared field type."""
    origin = get_origin(hint)
    try:
        if origin is Union:
            inner = [arg for arg in get_args(hint) if arg is not type(None)][0]
            if value == [] or value == "":
                return None
            return _coerce(name, inner, value)
        if origin in (list, List):
            (item,) = get_args(hint)
            return [_coerce(name, item, v) for v in as_list(value)]
        if isinstance(value, list):
            raise ValueError("expected a single value")
        if hint is bool:
            return parse_bool(value)
        if isinstance(hint, type) and issubclass(hint, Enum):
            return hint(value.lower())
        if hint in (int, float, str):
            return hint(value)
    except ValueError as exc:
        raise ConfigError(f"Invalid value for {name}: {value!r} ({exc})") from None
    raise ConfigError(f"Unsupported type for {name}: {hint}")


def parse_assignment(assignment: str) -> Tuple[str, str, Union[str, List[str]]]:
    """
    Split ``section.key=value``.

    Raises:
        ConfigError: If the assignment is malformed
    """
    target, sep, value = assignment.partition("=")
    section, dot, key = target.strip().partition(".")
    if not sep or not dot or not key:
        raise ConfigError(f"Expected section.key=value, got '{assignment}'")
    value = value.strip()
    parsed: Union[str, List[str]] = [v.strip() for v in value.split(",")] if "," in value else value
    return section, key.strip(), parsed


def load_run_config(path: Union[str, Path], check_paths: bool = True) -> RunConfig:
    """
    Read a run configuration file.

    Raises:
        ConfigError: On invalid content or missing referenced files
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        config = RunConfig.parse(text)
    except OntologyError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if check_paths:
        config.check_paths()
    logger.debug(f"Loaded run config from {path}")
    return config


def save_run_config(config: RunConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(config.serialize(), encoding="utf-8")
    return path
