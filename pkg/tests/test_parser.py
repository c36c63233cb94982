"""Tests for the key-value, ontology and dialog-act parsers."""

import pytest

from dqfdialog.dialog import DialogAct, Intent
from dqfdialog.errors import ActSyntaxError, DuplicateDomain, DuplicateSlot, EmptyValueList, OntologyError
from dqfdialog.parser import (
    ActParser,
    ChatCommand,
    KeyValueParser,
    OntologyParser,
    format_act,
    load_ontology,
    load_ontology_file,
    parse_acts,
    serialize,
)


def test_parser_initialization():
    """Test parsers can be initialized."""
    assert KeyValueParser() is not None
    assert OntologyParser() is not None
    assert ActParser() is not None


def test_parse_key_value_text():
    """Test sections, scalars, lists, empty lists and comments."""
    text = """
    # leading comment
    [hotel]
    informable.area = north, south   # trailing comment
    requestable = phone
    booking.day =

    [taxi]
    database = false
    """
    sections = KeyValueParser().parse(text)

    assert [s.name for s in sections] == ["hotel", "taxi"]
    hotel = sections[0].as_dict()
    assert hotel["informable.area"] == ["north", "south"]
    assert hotel["requestable"] == "phone"
    assert hotel["booking.day"] == []
    assert sections[1].as_dict() == {"database": "false"}
    assert sections[1].line == 8


def test_key_value_values_with_spaces():
    """Test tokens keep inner spaces."""
    sections = KeyValueParser().parse("[hotel]\nname = north star, kings hotel\n")
    assert sections[0].as_dict()["name"] == ["north star", "kings hotel"]


def test_key_value_syntax_error_has_line():
    """Test syntax errors report their line."""
    with pytest.raises(OntologyError) as info:
        KeyValueParser().parse("[hotel]\ninformable.area north\n")
    assert info.value.line == 2
    assert "line 2" in str(info.value)


def test_serialize_parses_back():
    """Test serialized sections parse to the same values."""
    text = serialize({"run": {"seeds": [1, 2], "preset": "desk", "ontology": [], "flag": True}}, header="test")
    assert text.startswith("# test\n")
    values = KeyValueParser().parse(text)[0].as_dict()
    assert values == {"seeds": ["1", "2"], "preset": "desk", "ontology": [], "flag": "true"}


def test_load_default_ontology():
    """Test the shipped desk ontology."""
    ontology = load_ontology_file()

    assert ontology.domain_names == ["hotel", "restaurant", "taxi"]
    hotel = ontology.domain("hotel")
    assert {slot: len(values) for slot, values in hotel.informable.items()} == {"area": 3, "price": 3, "stars": 3}
    restaurant = ontology.domain("restaurant")
    assert len(restaurant.informable["food"]) == 4
    assert ontology.database_domains == ["hotel", "restaurant"]
    assert ontology.domain("taxi").bookable
    assert not ontology.domain("taxi").database


def test_ontology_flag_defaults():
    """Test database and bookable default from the declared slots."""
    ontology = load_ontology("""
[hotel]
informable.area = north
requestable = phone
booking.people = 1, 2

[taxi]
informable.destination = station
""")
    assert ontology.domain("hotel").database
    assert ontology.domain("hotel").bookable
    assert not ontology.domain("taxi").database
    assert not ontology.domain("taxi").bookable


def test_duplicate_domain():
    """Test a repeated domain raises with the second declaration's line."""
    text = "[hotel]\ninformable.area = north, south\n\n[hotel]\nrequestable = phone\n"
    with pytest.raises(DuplicateDomain) as info:
        load_ontology(text)
    assert info.value.line == 4


def test_duplicate_slot():
    """Test a slot declared twice in one domain raises with its line."""
    text = "[hotel]\ninformable.area = north, south\nrequestable = phone, area\n"
    with pytest.raises(DuplicateSlot) as info:
        load_ontology(text)
    assert info.value.line == 3


def test_empty_value_list():
    """Test an informable slot without values raises."""
    with pytest.raises(EmptyValueList) as info:
        load_ontology("[hotel]\nrequestable = phone\ninformable.area =\n")
    assert info.value.line == 3


def test_ontology_validation_errors():
    """Test unknown keys, stray entries and reserved names."""
    with pytest.raises(OntologyError, match="Unknown ontology key"):
        load_ontology("[hotel]\ncolour = red\n")
    with pytest.raises(OntologyError, match="outside of a"):
        load_ontology("informable.area = north\n")
    with pytest.raises(OntologyError, match="reserved"):
        load_ontology("[hotel]\ninformable.area = north, dontcare\n")
    with pytest.raises(OntologyError, match="reserved"):
        load_ontology("[general]\ninformable.area = north\n")
    with pytest.raises(OntologyError, match="no domains"):
        load_ontology("# nothing here\n")


def test_parse_single_acts():
    """Test the act forms of the chat syntax."""
    parser = ActParser()

    assert parser.parse("inform hotel area=north").acts == [DialogAct(Intent.INFORM, "hotel", "area", "north")]
    assert parser.parse("request hotel phone").acts == [DialogAct(Intent.REQUEST, "hotel", "phone")]
    assert parser.parse("book hotel").acts == [DialogAct(Intent.BOOK, "hotel")]
    assert parser.parse("bye").acts == [DialogAct(Intent.BYE)]
    assert parser.parse("REQMORE").acts == [DialogAct(Intent.REQ_MORE)]


def test_parse_multiple_acts():
    """Test acts separated by semicolons form one turn."""
    acts = parse_acts("inform restaurant food=italian; request restaurant address")
    assert acts == [
        DialogAct(Intent.INFORM, "restaurant", "food", "italian"),
        DialogAct(Intent.REQUEST, "restaurant", "address"),
    ]


def test_parse_commands():
    """Test REPL commands."""
    parser = ActParser()
    assert parser.parse("quit").command == ChatCommand.QUIT
    assert parser.parse("exit").command == ChatCommand.QUIT
    assert parser.parse("state").command == ChatCommand.STATE
    assert parser.parse("q").command == ChatCommand.QVALUES
    with pytest.raises(ActSyntaxError, match="Expected dialog acts"):
        parse_acts("quit")


def test_parse_errors():
    """Test malformed lines raise ActSyntaxError."""
    parser = ActParser()
    with pytest.raises(ActSyntaxError):
        parser.parse("hello world")
    with pytest.raises(ActSyntaxError, match="needs slot and value"):
        parser.parse("inform hotel area")
    with pytest.raises(ActSyntaxError):
        parser.parse("inform hotel area=north;")


def test_format_act_round_trip():
    """Test formatted acts parse back to themselves."""
    acts = [
        DialogAct(Intent.INFORM, "hotel", "area", "north"),
        DialogAct(Intent.REQUEST, "taxi", "leave"),
        DialogAct(Intent.OFFER_BOOKING, "restaurant"),
        DialogAct(Intent.GREET),
    ]
    for act in acts:
        assert parse_acts(format_act(act)) == [act]
