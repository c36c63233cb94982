"""Structured key-value text shared by ontology, run config and checkpoint files.

Grammar::

    # comment
    [section]
    key = value
    key.sub = first, second, third

Values are kept as strings (a single token) or lists of strings (zero or
two-plus comma-separated tokens). Callers convert types.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Union

import pyparsing as pp
from pyparsing import Group, Literal, Optional, Regex, Suppress, Word, alphanums, alphas

from ..errors import OntologyError

Value = Union[str, List[str]]
Scalar = Union[str, int, float, bool]


@dataclass
class Entry:
    """One ``key = value`` line with its source location."""
    key: str
    value: Value
    line: int


@dataclass
class Section:
    """A ``[name]`` block of entries."""
    name: str
    line: int
    entries: List[Entry] = field(default_factory=list)

    def as_dict(self) -> Dict[str, Value]:
        return {entry.key: entry.value for entry in self.entries}


class KeyValueParser:
    """
    Line-oriented parser for sectioned key-value text using pyparsing.

    Example:
        >>> sections = KeyValueParser().parse("[run]\\nseed = 1\\n")
        >>> sections[0].as_dict()
        {'seed': '1'}
    """

    def __init__(self):
        """Initialize the parser with grammar rules."""
        self._setup_grammar()

    def _setup_grammar(self):
        """Set up the pyparsing grammar for a single line."""
        self.identifier = Word(alphas + "_", alphanums + "_-")
        key = Regex(r"[A-Za-z_][\w\-]*(\.[\w\-]+)*")
        token = Regex(r"[^,#\s][^,#]*")
        token.set_parse_action(lambda t: t[0].strip())
        values = Group(Optional(token + pp.ZeroOrMore(Suppress(",") + token)))

        self.header = Suppress(Literal("[")) + self.identifier("name") + Suppress(Literal("]"))
        self.entry = key("key") + Suppress(Literal("=")) + values("value")
        self.line = (self.header | self.entry | pp.Empty()) + pp.StringEnd()
        self.line.ignore(Regex(r"#.*"))

    def parse(self, text: str) -> List[Section]:
        """
        Parse key-value text into sections.

        Entries before the first header land in a section named ``""``.

        Args:
            text: Source text

        Returns:
            Sections in source order

        Raises:
            OntologyError: On syntax errors, with line and column
        """
        sections: List[Section] = []
        current = None

        for lineno, raw in enumerate(text.splitlines(), start=1):
            try:
                tokens = self.line.parse_string(raw, parse_all=True)
            except pp.ParseBaseException as exc:
                raise OntologyError(f"Syntax error: {exc.msg}", line=lineno, column=exc.col) from None

            if "name" in tokens:
                current = Section(name=tokens["name"], line=lineno)
                sections.append(current)
            elif "key" in tokens:
                if current is None:
                    current = Section(name="", line=lineno)
                    sections.append(current)
                items = list(tokens["value"])
                value: Value = items[0] if len(items) == 1 else items
                current.entries.append(Entry(key=tokens["key"], value=value, line=lineno))

        return sections


def as_list(value: Value) -> List[str]:
    """Normalize a parsed value to a list of strings."""
    if isinstance(value, list):
        return value
    return [value]


def format_value(value: Union[Scalar, List, tuple]) -> str:
    """Serialize a Python value to its key-value text form."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(format_value(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_bool(value: Value) -> bool:
    """Interpret ``true``/``false``/``yes``/``no``/``1``/``0``."""
    text = str(value).strip().lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"Expected a boolean, got '{value}'")


def serialize(sections: Dict[str, Dict[str, Union[Scalar, List]]], header: str = "") -> str:
    """
    Render sections back to key-value text.

    Args:
        sections: Mapping of section name to its entries
        header: Optional comment placed at the top

    Returns:
        Text that parses back to the same keys and values
    """
    lines: List[str] = []
    if header:
        lines.extend(f"# {line}" for line in header.splitlines())
    for name, entries in sections.items():
        if lines:
            lines.append("")
        lines.append(f"[{name}]")
        for key, value in entries.items():
            lines.append(f"{key} = {format_value(value)}".rstrip())
    return "\n".join(lines) + "\n"
