"""Seeded synthetic diaries for tests, demos and stress runs.

generate_synthetic_diary is a pure function of (seed, profile): the same pair
always yields the same diary, byte for byte once serialized. Counts are drawn
from small distribution specs; attribute values from per-attribute marginals
keyed "entity.name".
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from datetime import date as Date, timedelta

from .diary import (
    AttributeSchema,
    Contact,
    Diary,
    DiaryError,
    Ego,
    Ordinal,
    Tie,
    canonical_schema,
)


class InvalidProfile(DiaryError):
    """Profile parameters cannot produce a valid diary."""


@dataclass(frozen=True)
class Dist:
    """Count distribution: fixed(value) | uniform(lo, hi) | poisson(mean)."""

    kind: str
    a: float = 0.0
    b: float = 0.0

    def validate(self, what: str):
        if self.kind not in ("fixed", "uniform", "poisson"):
            raise InvalidProfile(f"{what}: unknown distribution {self.kind!r}")
        if self.kind == "fixed" and (self.a < 0 or self.a != int(self.a)):
            raise InvalidProfile(f"{what}: fixed value must be a whole number >= 0")
        if self.kind == "uniform" and not (0 <= self.a <= self.b):
            raise InvalidProfile(f"{what}: uniform needs 0 <= lo <= hi")
        if self.kind == "poisson" and self.a < 0:
            raise InvalidProfile(f"{what}: poisson mean must be >= 0")

    def sample(self, rng: random.Random) -> int:
        if self.kind == "fixed":
            return int(self.a)
        if self.kind == "uniform":
            return rng.randint(int(self.a), int(self.b))
        # poisson, Knuth's method; means here are small
        limit = math.exp(-self.a)
        k, p = 0, 1.0
        while True:
            p *= rng.random()
            if p <= limit:
                return k
            k += 1

    @staticmethod
    def from_json(raw, what: str) -> "Dist":
        if not isinstance(raw, dict) or "kind" not in raw:
            raise InvalidProfile(f"{what}: expected an object with a 'kind'")
        kind = raw["kind"]
        if kind == "fixed":
            return Dist("fixed", float(raw.get("value", 0)))
        if kind == "uniform":
            return Dist("uniform", float(raw.get("lo", 0)), float(raw.get("hi", 0)))
        if kind == "poisson":
            return Dist("poisson", float(raw.get("mean", 0)))
        raise InvalidProfile(f"{what}: unknown distribution {kind!r}")


@dataclass(frozen=True)
class Marginal:
    """How one attribute is drawn. Kinds: choice, uniform_int, uniform_real,
    date_range, constant."""

    kind: str
    options: tuple = ()
    lo: float = 0.0
    hi: float = 0.0
    ndigits: int = 1
    start: Date = Date(2004, 1, 1)
    days: int = 90
    value: object = None

    def validate(self, what: str):
        if self.kind == "choice" and not self.options:
            raise InvalidProfile(f"{what}: choice needs non-empty options")
        if self.kind in ("uniform_int", "uniform_real") and self.lo > self.hi:
            raise InvalidProfile(f"{what}: lo > hi")
        if self.kind == "date_range" and self.days <= 0:
            raise InvalidProfile(f"{what}: days must be positive")

    def sample(self, rng: random.Random):
        if self.kind == "choice":
            return self.options[rng.randrange(len(self.options))]
        if self.kind == "uniform_int":
            return rng.randint(int(self.lo), int(self.hi))
        if self.kind == "uniform_real":
            return round(rng.uniform(self.lo, self.hi), self.ndigits)
        if self.kind == "date_range":
            return self.start + timedelta(days=rng.randrange(self.days))
        return self.value

    @staticmethod
    def from_json(raw, what: str) -> "Marginal":
        if not isinstance(raw, dict) or "kind" not in raw:
            raise InvalidProfile(f"{what}: expected an object with a 'kind'")
        kind = raw["kind"]
        if kind == "choice":
            return Marginal("choice", options=tuple(raw.get("options", ())))
        if kind == "uniform_int":
            return Marginal("uniform_int", lo=float(raw["lo"]), hi=float(raw["hi"]))
        if kind == "uniform_real":
            return Marginal("uniform_real", lo=float(raw["lo"]), hi=float(raw["hi"]),
                            ndigits=int(raw.get("ndigits", 1)))
        if kind == "date_range":
            return Marginal("date_range", start=Date.fromisoformat(raw["start"]),
                            days=int(raw.get("days", 90)))
        if kind == "constant":
            return Marginal("constant", value=raw.get("value"))
        raise InvalidProfile(f"{what}: unknown marginal {kind!r}")


def default_marginals() -> dict:
    from .diary import FEELING_SCALE, GENDER_SCALE, LIKING_SCALE, MARITAL_SCALE

    return {
        "ego.gender": Marginal("choice", options=GENDER_SCALE),
        "ego.age": Marginal("uniform_int", lo=20, hi=79),
        "ego.marital_status": Marginal("choice", options=MARITAL_SCALE),
        "tie.gender": Marginal("choice", options=GENDER_SCALE),
        "tie.age": Marginal("uniform_int", lo=0, hi=89),
        "tie.years_known": Marginal("uniform_real", lo=0.0, hi=40.0),
        "tie.liking": Marginal("choice", options=LIKING_SCALE),
        "contact.date": Marginal("date_range", start=Date(2004, 1, 1), days=90),
        "contact.duration": Marginal("uniform_real", lo=5.0, hi=240.0, ndigits=0),
        "contact.feeling": Marginal("choice", options=FEELING_SCALE),
    }


@dataclass(frozen=True)
class SynthProfile:
    egos: int = 1
    ties_per_ego: Dist = Dist("uniform", 3, 12)
    contacts_per_tie: Dist = Dist("poisson", 4)
    contacts_total: int | None = None
    missing_rate: float = 0.0
    attributes: dict = field(default_factory=default_marginals)
    schema: AttributeSchema = field(default_factory=canonical_schema)

    def validate(self):
        if self.egos <= 0:
            raise InvalidProfile("egos must be positive")
        self.ties_per_ego.validate("ties_per_ego")
        self.contacts_per_tie.validate("contacts_per_tie")
        if self.contacts_total is not None and self.contacts_total < 0:
            raise InvalidProfile("contacts_total must be >= 0")
        if not 0.0 <= self.missing_rate < 1.0:
            raise InvalidProfile("missing_rate must be in [0, 1)")
        for key, marginal in self.attributes.items():
            marginal.validate(key)
        for entry in self.schema.entries:
            if entry.required and f"{entry.entity}.{entry.name}" not in self.attributes:
                raise InvalidProfile(f"required attribute {entry.entity}.{entry.name} has no marginal")

    @staticmethod
    def from_json(data: bytes | str | dict) -> "SynthProfile":
        if isinstance(data, (bytes, str)):
            try:
                raw = json.loads(data)
            except json.JSONDecodeError as exc:
                raise InvalidProfile(f"profile is not valid JSON: {exc.msg}") from None
        else:
            raw = data
        if not isinstance(raw, dict):
            raise InvalidProfile("profile must be a JSON object")
        attributes = default_marginals()
        for key, item in raw.get("attributes", {}).items():
            attributes[key] = Marginal.from_json(item, f"attributes.{key}")
        profile = SynthProfile(
            egos=int(raw.get("egos", 1)),
            ties_per_ego=Dist.from_json(raw["ties_per_ego"], "ties_per_ego") if "ties_per_ego" in raw else Dist("uniform", 3, 12),
            contacts_per_tie=Dist.from_json(raw["contacts_per_tie"], "contacts_per_tie") if "contacts_per_tie" in raw else Dist("poisson", 4),
            contacts_total=int(raw["contacts_total"]) if raw.get("contacts_total") is not None else None,
            missing_rate=float(raw.get("missing_rate", 0.0)),
            attributes=attributes,
        )
        profile.validate()
        return profile


def stress_profile() -> SynthProfile:
    """One ego with 819 ties and exactly 4091 contacts in total."""
    return SynthProfile(egos=1, ties_per_ego=Dist("fixed", 819), contacts_total=4091)


def _draw_attributes(entity: str, rng: random.Random, profile: SynthProfile) -> dict:
    out = {}
    for entry in profile.schema.for_entity(entity):
        marginal = profile.attributes.get(f"{entity}.{entry.name}")
        if marginal is None:
            continue
        value = marginal.sample(rng)
        # optional attributes may be dropped to exercise exclusion handling
        if not entry.required and profile.missing_rate > 0 and rng.random() < profile.missing_rate:
            continue
        if entry.kind == "ordinal" and isinstance(value, str):
            value = Ordinal(entry.scale.index(value), entry.scale)
        if entry.kind == "real" and isinstance(value, int):
            value = float(value)
        out[entry.name] = value
    return out


def generate_synthetic_diary(seed: int, profile: SynthProfile) -> Diary:
    profile.validate()
    rng = random.Random(seed)

    egos = []
    ties = []
    tie_counter = 0
    for i in range(profile.egos):
        ego_id = f"E{i + 1}"
        egos.append(Ego(ego_id, _draw_attributes("ego", rng, profile)))
        for _ in range(profile.ties_per_ego.sample(rng)):
            tie_counter += 1
            ties.append(Tie(f"T{tie_counter}", ego_id, _draw_attributes("tie", rng, profile)))

    per_tie_counts = [0] * len(ties)
    if profile.contacts_total is not None:
        if profile.contacts_total > 0 and not ties:
            raise InvalidProfile("contacts_total > 0 but no ties were generated")
        for _ in range(profile.contacts_total):
            per_tie_counts[rng.randrange(len(ties))] += 1
    else:
        per_tie_counts = [profile.contacts_per_tie.sample(rng) for _ in ties]

    contacts = []
    contact_counter = 0
    for tie, count in zip(ties, per_tie_counts):
        for _ in range(count):
            contact_counter += 1
            contacts.append(Contact(f"C{contact_counter}", tie.id, _draw_attributes("contact", rng, profile)))

    return Diary(profile.schema, tuple(egos), tuple(ties), tuple(contacts))
