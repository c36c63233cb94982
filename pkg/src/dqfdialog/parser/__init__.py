"""Parsers for structured key-value text, ontologies and dialog-act lines."""

from .act_parser import ActParser, ChatCommand, ParsedLine, format_act, parse_acts
from .kvtext import KeyValueParser, Section, serialize
from .ontology_parser import DEFAULT_ONTOLOGY, OntologyParser, load_ontology, load_ontology_file

__all__ = [
    "ActParser",
    "ChatCommand",
    "ParsedLine",
    "format_act",
    "parse_acts",
    "KeyValueParser",
    "Section",
    "serialize",
    "DEFAULT_ONTOLOGY",
    "OntologyParser",
    "load_ontology",
    "load_ontology_file",
]
