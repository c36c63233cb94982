"""One-line dialog-act syntax for the chat REPL.

Grammar::

    line    := command | act (";" act)*
    command := "quit" | "exit" | "state" | "q"
    act     := intent [domain [slot ["=" value]]]

Examples: ``inform hotel area=north``, ``request hotel phone``,
``book hotel``, ``bye``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import pyparsing as pp
from pyparsing import CaselessKeyword, Group, MatchFirst, Regex, Suppress

from ..dialog.models import GENERAL, DialogAct, Intent
from ..errors import ActSyntaxError


class ChatCommand(Enum):
    """REPL control commands."""
    QUIT = "quit"
    STATE = "state"
    QVALUES = "q"


@dataclass
class ParsedLine:
    """Result of parsing one REPL line: either acts or a command."""
    acts: List[DialogAct] = field(default_factory=list)
    command: Optional[ChatCommand] = None


class ActParser:
    """
    Parser for dialog-act lines using pyparsing.

    Example:
        >>> ActParser().parse("inform hotel area=north").acts
        [DialogAct(intent=<Intent.INFORM: 'inform'>, domain='hotel', slot='area', value='north')]
    """

    def __init__(self):
        """Initialize the parser with grammar rules."""
        self._setup_grammar()

    def _setup_grammar(self):
        """Set up pyparsing grammar for act lines."""
        name = Regex(r"[A-Za-z0-9_\-]+")
        value = Regex(r"[^;\s]+")
        # Longest keywords first so "reqmore" is not shadowed by "request".
        intents = sorted((intent.value for intent in Intent), key=len, reverse=True)
        self.intent = MatchFirst([CaselessKeyword(v) for v in intents])

        self.act = Group(
            self.intent("intent")
            + pp.Optional(name("domain") + pp.Optional(name("slot") + pp.Optional(Suppress("=") + value("value"))))
        )
        self.command = (
            CaselessKeyword("quit") | CaselessKeyword("exit") | CaselessKeyword("state") | CaselessKeyword("q")
        )("command")
        self.acts = pp.delimited_list(self.act, delim=";")("acts")
        self.line = (self.command | self.acts) + pp.StringEnd()

    def parse(self, text: str) -> ParsedLine:
        """
        Parse a single REPL line.

        Args:
            text: The typed line

        Returns:
            ParsedLine with acts or a command

        Raises:
            ActSyntaxError: If the line is not valid act syntax
        """
        try:
            tokens = self.line.parse_string(text.strip(), parse_all=True)
        except pp.ParseBaseException as exc:
            raise ActSyntaxError(f"Cannot parse '{text.strip()}': {exc.msg}", column=exc.col) from None

        if "command" in tokens:
            word = tokens["command"].lower()
            return ParsedLine(command=ChatCommand.QUIT if word == "exit" else ChatCommand(word))

        acts = []
        for group in tokens["acts"]:
            intent = Intent(group["intent"].lower())
            try:
                acts.append(DialogAct(
                    intent,
                    group.get("domain", GENERAL),
                    group.get("slot"),
                    group.get("value"),
                ))
            except ValueError as exc:
                raise ActSyntaxError(str(exc)) from None
        return ParsedLine(acts=acts)


def format_act(act: DialogAct) -> str:
    """Render an act back to its one-line syntax."""
    parts = [act.intent.value]
    if act.domain != GENERAL or act.slot is not None:
        parts.append(act.domain)
    if act.slot is not None:
        parts.append(act.slot if act.value is None else f"{act.slot}={act.value}")
    return " ".join(parts)


def parse_acts(text: str) -> List[DialogAct]:
    """Parse a line that must contain acts, not a command."""
    parsed = ActParser().parse(text)
    if parsed.command is not None:
        raise ActSyntaxError(f"Expected dialog acts, got command '{parsed.command.value}'")
    return parsed.acts
