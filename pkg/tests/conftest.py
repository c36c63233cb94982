"""Shared fixtures: the shipped desk ontology and a tiny hand-checkable world."""

import numpy as np
import pytest

from dqfdialog.dialog import EntityDatabase, StateFeaturizer, enumerate_actions
from dqfdialog.parser import load_ontology, load_ontology_file

TINY_ONTOLOGY = """
# two domains small enough to count by hand
[hotel]
database = true
bookable = true
informable.area = north, south
informable.price = cheap, expensive
requestable = phone, name
booking.people = 1, 2

[taxi]
database = false
bookable = true
informable.destination = hotel, station
booking.leave = morning, evening
"""

TINY_HOTELS = [
    {"name": "alpha", "area": "north", "price": "cheap", "phone": "111"},
    {"name": "bravo", "area": "north", "price": "expensive", "phone": "222"},
    {"name": "charlie", "area": "south", "price": "cheap", "phone": "333"},
]


@pytest.fixture(scope="session")
def ontology():
    """The packaged desk ontology."""
    return load_ontology_file()


@pytest.fixture(scope="session")
def db(ontology):
    """Synthetic desk database from seed 0."""
    return EntityDatabase.generate(ontology, 0)


@pytest.fixture(scope="session")
def actions(ontology):
    return enumerate_actions(ontology)


@pytest.fixture(scope="session")
def featurizer(ontology):
    return StateFeaturizer(ontology)


@pytest.fixture(scope="session")
def tiny_ontology():
    return load_ontology(TINY_ONTOLOGY)


@pytest.fixture(scope="session")
def tiny_db(tiny_ontology):
    """Three hotels; south+expensive has no match."""
    return EntityDatabase(tiny_ontology, {"hotel": TINY_HOTELS})


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
