"""Synthetic entity database for the database-backed domains."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import numpy as np

from ..errors import FormatError, UnknownDomain, UnknownSlot, UnknownValue
from .models import DONTCARE, Ontology

logger = logging.getLogger(__name__)

Entity = Dict[str, str]

ENTITIES_PER_DOMAIN = 12

_NAME_WORDS = ["alpha", "bridge", "cedar", "dome", "elm", "fern", "grove", "harbour",
               "ivy", "juniper", "kings", "lotus", "maple", "north star", "oak", "park"]
_STREETS = ["mill road", "regent street", "hills road", "trumpington street",
            "chesterton road", "station road", "newmarket road", "castle street"]


def _requestable_value(domain: str, slot: str, index: int, rng: np.random.Generator) -> str:
    """Generate a plausible value for a requestable slot of entity ``index``."""
    if slot == "phone":
        return f"01223 {index:02d}{int(rng.integers(1000, 10000))}"
    if slot == "address":
        return f"{int(rng.integers(1, 200))} {_STREETS[int(rng.integers(len(_STREETS)))]}"
    if slot == "postcode":
        return f"cb{int(rng.integers(1, 10))} {index:02d}{'abcdefghjk'[int(rng.integers(10))]}"
    return f"{slot}-{domain}-{index:02d}"


class EntityDatabase:
    """
    In-memory entity store keyed by domain.

    Every entity carries a unique ``name`` plus one value for each informable
    and requestable slot of its domain.
    """

    def __init__(self, ontology: Ontology, entities: Optional[Mapping[str, List[Entity]]] = None):
        """
        Initialize the database.

        Args:
            ontology: Ontology the entities follow
            entities: Entities per database-backed domain (validated)

        Raises:
            UnknownDomain, UnknownSlot, UnknownValue: On invalid entities
        """
        self.ontology = ontology
        self.entities: Dict[str, List[Entity]] = {name: [] for name in ontology.database_domains}
        for domain, items in (entities or {}).items():
            if domain not in self.entities:
                raise UnknownDomain(f"Domain '{domain}' is not database-backed")
            for entity in items:
                self._validate(domain, entity)
            names = [entity["name"] for entity in items]
            if len(set(names)) != len(names):
                raise ValueError(f"Entity names in domain '{domain}' are not unique")
            self.entities[domain] = sorted((dict(entity) for entity in items), key=lambda e: e["name"])

    def _validate(self, domain: str, entity: Entity) -> None:
        spec = self.ontology.domain(domain)
        if "name" not in entity:
            raise UnknownSlot(f"Entity in '{domain}' has no name")
        for slot, values in spec.informable.items():
            if entity.get(slot) not in values:
                raise UnknownValue(f"Entity '{entity['name']}' has invalid {domain}.{slot}={entity.get(slot)}")

    @classmethod
    def generate(
        cls,
        ontology: Ontology,
        rng: Union[np.random.Generator, int],
        entities_per_domain: int = ENTITIES_PER_DOMAIN,
    ) -> "EntityDatabase":
        """
        Generate a synthetic database with uniformly sampled informable values.

        Args:
            ontology: Ontology to populate
            rng: Generator or integer seed
            entities_per_domain: Entities created in each database-backed domain

        Returns:
            A new EntityDatabase, deterministic given the seed
        """
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        entities: Dict[str, List[Entity]] = {}
        for domain in ontology.database_domains:
            spec = ontology.domain(domain)
            words = rng.permutation(len(_NAME_WORDS))
            items = []
            for index in range(entities_per_domain):
                word = _NAME_WORDS[int(words[index % len(_NAME_WORDS)])]
                entity: Entity = {"name": f"{word} {domain} {index + 1}"}
                for slot, values in spec.informable.items():
                    entity[slot] = values[int(rng.integers(len(values)))]
                for slot in spec.requestable:
                    if slot != "name":
                        entity[slot] = _requestable_value(domain, slot, index, rng)
                items.append(entity)
            entities[domain] = items
        logger.debug(f"Generated database: {', '.join(f'{d}={len(e)}' for d, e in entities.items())}")
        return cls(ontology, entities)

    def query(self, domain: str, constraints: Mapping[str, str]) -> List[Entity]:
        """
        Return all entities matching every constraint slot=value pair.

        ``dontcare`` matches everything; empty constraints return all entities.

        Raises:
            UnknownDomain: Domain unknown or not database-backed
            UnknownSlot: Constraint slot is not informable in the domain
            UnknownValue: Constraint value not declared for the slot
        """
        if domain not in self.entities:
            raise UnknownDomain(f"Domain '{domain}' is not database-backed")
        spec = self.ontology.domain(domain)
        active = {}
        for slot, value in constraints.items():
            if slot not in spec.informable:
                raise UnknownSlot(f"'{slot}' is not an informable slot of '{domain}'")
            if value == DONTCARE:
                continue
            if value not in spec.informable[slot]:
                raise UnknownValue(f"'{value}' is not a value of {domain}.{slot}")
            active[slot] = value
        return [dict(e) for e in self.entities[domain] if all(e[s] == v for s, v in active.items())]

    def count(self, domain: str, constraints: Mapping[str, str]) -> int:
        return len(self.query(domain, constraints))

    def entity(self, domain: str, name: str) -> Optional[Entity]:
        """Look up an entity by name."""
        for entity in self.entities.get(domain, []):
            if entity["name"] == name:
                return dict(entity)
        return None

    def dump(self, path: Union[str, Path]) -> None:
        """Write the database as JSON lines, one entity per line."""
        with open(path, "w", encoding="utf-8") as handle:
            for domain, items in self.entities.items():
                for entity in items:
                    handle.write(json.dumps({"domain": domain, **entity}, sort_keys=True) + "\n")

    @classmethod
    def load(cls, ontology: Ontology, path: Union[str, Path]) -> "EntityDatabase":
        """
        Load a database written by ``dump``.

        Raises:
            FormatError: If a line is not a JSON object with a domain
        """
        entities: Dict[str, List[Entity]] = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    domain = record.pop("domain")
                except (ValueError, KeyError, AttributeError):
                    raise FormatError(f"{path}:{lineno}: not a database record") from None
                entities.setdefault(domain, []).append({k: str(v) for k, v in record.items()})
        return cls(ontology, entities)


def query_database(db: EntityDatabase, domain: str, constraints: Mapping[str, str]) -> List[Entity]:
    """Functional form of ``EntityDatabase.query``."""
    return db.query(domain, constraints)
