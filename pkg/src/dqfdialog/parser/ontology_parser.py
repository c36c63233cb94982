"""Ontology loader for the structured key-value ontology format."""

import logging
from pathlib import Path
from typing import Dict, List, Union

from ..dialog.models import DomainSpec, Ontology
from ..errors import DuplicateDomain, DuplicateSlot, EmptyValueList, OntologyError
from .kvtext import KeyValueParser, Section, as_list, parse_bool

logger = logging.getLogger(__name__)

DEFAULT_ONTOLOGY = Path(__file__).resolve().parent.parent / "data" / "ontology.default"


class OntologyParser:
    """
    Parser for ontology files.

    Each ``[domain]`` section accepts::

        database = true|false
        bookable = true|false
        informable.<slot> = value, value, ...
        requestable = slot, slot, ...
        booking.<slot> = value, value, ...

    Example:
        >>> ontology = OntologyParser().parse(\"\"\"
        ... [hotel]
        ... informable.area = north, south
        ... requestable = phone
        ... \"\"\")
        >>> ontology.domain_names
        ['hotel']
    """

    def __init__(self):
        self.kv = KeyValueParser()

    def parse(self, text: str) -> Ontology:
        """
        Parse and validate ontology text.

        Args:
            text: Ontology source

        Returns:
            Validated Ontology

        Raises:
            OntologyError: Syntax errors, duplicate names, empty value lists,
                each carrying the offending line
        """
        sections = self.kv.parse(text)
        domains: List[DomainSpec] = []
        seen: Dict[str, int] = {}

        for section in sections:
            if not section.name:
                raise OntologyError("Entry outside of a [domain] section", line=section.line)
            if section.name in seen:
                raise DuplicateDomain(
                    f"Duplicate domain '{section.name}' (first declared on line {seen[section.name]})",
                    line=section.line,
                )
            seen[section.name] = section.line
            domains.append(self._parse_domain(section))

        if not domains:
            raise OntologyError("Ontology declares no domains")

        ontology = Ontology(domains=domains)
        logger.debug(f"Loaded ontology with domains {ontology.domain_names}")
        return ontology

    def _parse_domain(self, section: Section) -> DomainSpec:
        """Build one DomainSpec from its section, checking slots line by line."""
        informable: Dict[str, List[str]] = {}
        booking: Dict[str, List[str]] = {}
        requestable: List[str] = []
        flags = {"database": None, "bookable": None}
        slot_lines: Dict[str, int] = {}

        def claim(slot: str, line: int):
            if slot in slot_lines:
                raise DuplicateSlot(
                    f"Slot '{slot}' declared twice in domain '{section.name}'", line=line
                )
            slot_lines[slot] = line

        for entry in section.entries:
            kind, _, slot = entry.key.partition(".")
            if kind in flags and not slot:
                try:
                    flags[kind] = parse_bool(entry.value)
                except ValueError as exc:
                    raise OntologyError(str(exc), line=entry.line) from None
            elif kind in ("informable", "booking") and slot:
                values = as_list(entry.value)
                if not values:
                    raise EmptyValueList(f"Slot '{section.name}.{slot}' has an empty value list", line=entry.line)
                claim(slot, entry.line)
                (informable if kind == "informable" else booking)[slot] = values
            elif kind == "requestable" and not slot:
                for name in as_list(entry.value):
                    claim(name, entry.line)
                    requestable.append(name)
            else:
                raise OntologyError(f"Unknown ontology key '{entry.key}'", line=entry.line)

        database = flags["database"] if flags["database"] is not None else bool(requestable)
        bookable = flags["bookable"] if flags["bookable"] is not None else bool(booking)
        try:
            return DomainSpec(
                name=section.name,
                informable=informable,
                requestable=requestable,
                bookable=bookable,
                booking=booking,
                database=database,
            )
        except OntologyError as exc:
            raise type(exc)(str(exc), line=section.line) from None


def load_ontology(config_text: str) -> Ontology:
    """Parse ontology text (see OntologyParser)."""
    return OntologyParser().parse(config_text)


def load_ontology_file(path: Union[str, Path, None] = None) -> Ontology:
    """
    Load an ontology file, defaulting to the shipped desk ontology.

    Args:
        path: Ontology file path, or None for ``ontology.default``
    """
    path = Path(path) if path is not None else DEFAULT_ONTOLOGY
    return load_ontology(path.read_text(encoding="utf-8"))
