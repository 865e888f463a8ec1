"""Contact-diary data model: attribute schema, records, ingestion, validation.

A diary holds three kinds of records: egos (the diary keepers), ties (persons
an ego is connected to) and contacts (single one-on-one interactions between
an ego and one of its ties). Every record carries a string id plus a bag of
typed attributes described by an AttributeSchema.

Two interchange formats are supported:

* JSON: one document with "schema", "egos", "ties" and "contacts" arrays.
* CSV:  two flat tables (ties.csv, contacts.csv) validated against an
        externally supplied schema; egos are implied by the ego_id column.

All types are plain frozen dataclasses and are treated as immutable after
construction; attribute dicts are never mutated once a record exists.
"""

from __future__ import annotations

import csv
import io
import json
import re
import statistics
from dataclasses import dataclass, field
from datetime import date as Date

ENTITIES = ("ego", "tie", "contact")
KINDS = ("boolean", "integer", "real", "text", "date", "ordinal")

_ENTITY_ORDER = {"ego": 0, "tie": 1, "contact": 2, "mapping": 3, "profile": 4}
_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}")

GENDER_SCALE = ("male", "female")
MARITAL_SCALE = ("single", "married")
LIKING_SCALE = ("not at all", "not much", "somewhat", "very much")
FEELING_SCALE = ("much worse", "worse", "neutral", "better", "much better")


class DiaryError(Exception):
    """Base class for ingestion and validation failures."""


class MalformedInput(DiaryError):
    """Input bytes are not the documented format (position in message)."""


class SchemaViolation(DiaryError):
    """A value does not match the declared attribute kind."""


class DanglingReference(DiaryError):
    """A record references an ego or tie that does not exist."""


class DuplicateId(DiaryError):
    """Two records of the same entity share an id."""


@dataclass(frozen=True)
class Ordinal:
    """A level on an ordered categorical scale (0 = lowest)."""

    level: int
    scale: tuple[str, ...]

    def __post_init__(self):
        if not self.scale:
            raise ValueError("ordinal scale must be non-empty")
        if not 0 <= self.level < len(self.scale):
            raise ValueError(f"ordinal level {self.level} outside scale of {len(self.scale)}")

    @property
    def label(self) -> str:
        return self.scale[self.level]


# An attribute value is one of: bool, int, float, str, datetime.date, Ordinal.
Value = object


@dataclass(frozen=True)
class SchemaEntry:
    name: str
    kind: str
    entity: str
    scale: tuple[str, ...] = ()
    required: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.entity not in ENTITIES:
            raise ValueError(f"unknown entity {self.entity!r}")
        if self.kind == "ordinal" and not self.scale:
            raise ValueError(f"ordinal attribute {self.name!r} needs a scale")


@dataclass(frozen=True)
class AttributeSchema:
    """Declares the attributes each entity may carry.

    Names are unique per entity (the same name may appear for different
    entities, e.g. both egos and ties have a gender).
    """

    entries: tuple[SchemaEntry, ...]
    _index: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        index = {}
        for e in self.entries:
            key = (e.entity, e.name)
            if key in index:
                raise ValueError(f"duplicate schema entry {e.entity}.{e.name}")
            index[key] = e
        object.__setattr__(self, "_index", index)

    def get(self, entity: str, name: str) -> SchemaEntry | None:
        return self._index.get((entity, name))

    def for_entity(self, entity: str) -> tuple[SchemaEntry, ...]:
        return tuple(e for e in self.entries if e.entity == entity)


def canonical_schema() -> AttributeSchema:
    """The stock schema the presets and the synthetic generator rely on."""
    return AttributeSchema((
        SchemaEntry("gender", "ordinal", "ego", GENDER_SCALE),
        SchemaEntry("age", "integer", "ego"),
        SchemaEntry("marital_status", "ordinal", "ego", MARITAL_SCALE),
        SchemaEntry("gender", "ordinal", "tie", GENDER_SCALE, required=True),
        SchemaEntry("age", "integer", "tie", required=True),
        SchemaEntry("years_known", "real", "tie"),
        SchemaEntry("liking", "ordinal", "tie", LIKING_SCALE),
        SchemaEntry("is_stranger", "boolean", "tie"),
        SchemaEntry("date", "date", "contact", required=True),
        SchemaEntry("duration", "real", "contact"),
        SchemaEntry("feeling", "ordinal", "contact", FEELING_SCALE),
    ))


@dataclass(frozen=True)
class Ego:
    id: str
    attributes: dict


@dataclass(frozen=True)
class Tie:
    id: str
    ego: str
    attributes: dict


@dataclass(frozen=True)
class Contact:
    id: str
    tie: str
    attributes: dict


@dataclass(frozen=True)
class Diary:
    schema: AttributeSchema
    egos: tuple[Ego, ...]
    ties: tuple[Tie, ...]
    contacts: tuple[Contact, ...]
    _egos_by_id: dict = field(init=False, repr=False, compare=False, default=None)
    _ties_by_id: dict = field(init=False, repr=False, compare=False, default=None)
    _ties_by_ego: dict = field(init=False, repr=False, compare=False, default=None)
    _contacts_by_tie: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        egos = {e.id: e for e in self.egos}
        ties = {t.id: t for t in self.ties}
        by_ego: dict[str, list] = {}
        for t in self.ties:
            by_ego.setdefault(t.ego, []).append(t)
        by_tie: dict[str, list] = {}
        for c in self.contacts:
            by_tie.setdefault(c.tie, []).append(c)
        object.__setattr__(self, "_egos_by_id", egos)
        object.__setattr__(self, "_ties_by_id", ties)
        object.__setattr__(self, "_ties_by_ego", {k: tuple(v) for k, v in by_ego.items()})
        object.__setattr__(self, "_contacts_by_tie", {k: tuple(v) for k, v in by_tie.items()})

    def ego(self, ego_id: str) -> Ego | None:
        return self._egos_by_id.get(ego_id)

    def tie(self, tie_id: str) -> Tie | None:
        return self._ties_by_id.get(tie_id)

    def ties_of(self, ego_id: str) -> tuple[Tie, ...]:
        return self._ties_by_ego.get(ego_id, ())

    def contacts_of(self, tie_id: str) -> tuple[Contact, ...]:
        return self._contacts_by_tie.get(tie_id, ())


@dataclass(frozen=True)
class Finding:
    entity: tuple[str, str]
    rule: str
    message: str

    def to_json(self) -> dict:
        return {"entity": list(self.entity), "rule": self.rule, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Finding, ...]
    warnings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> dict:
        return {
            "errors": [f.to_json() for f in self.errors],
            "warnings": [f.to_json() for f in self.warnings],
        }


def _sort_findings(findings: list[Finding]) -> tuple[Finding, ...]:
    return tuple(sorted(findings, key=lambda f: (_ENTITY_ORDER.get(f.entity[0], 9), f.entity[1], f.rule, f.message)))


def _kind_of_value(value) -> str | None:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "real"
    if isinstance(value, str):
        return "text"
    if isinstance(value, Date):
        return "date"
    if isinstance(value, Ordinal):
        return "ordinal"
    return None


def _check_attributes(entity: str, rec_id: str, attributes: dict, schema: AttributeSchema, out: list):
    for entry in schema.for_entity(entity):
        if entry.required and entry.name not in attributes:
            out.append(Finding((entity, rec_id), "missing-required",
                               f"required attribute {entry.name!r} is absent"))
    for name, value in attributes.items():
        entry = schema.get(entity, name)
        if entry is None:
            continue  # undeclared extras pass through untouched
        got = _kind_of_value(value)
        if got != entry.kind and not (entry.kind == "real" and got == "integer"):
            out.append(Finding((entity, rec_id), "kind-mismatch",
                               f"attribute {name!r} should be {entry.kind}, got {got or type(value).__name__}"))
        elif entry.kind == "ordinal" and isinstance(value, Ordinal) and value.scale != entry.scale:
            out.append(Finding((entity, rec_id), "ordinal-out-of-scale",
                               f"attribute {name!r} uses a scale of {len(value.scale)}, schema declares {len(entry.scale)}"))


def validate_diary(diary: Diary) -> ValidationReport:
    """Check every diary invariant; problems become report entries.

    The report is deterministic: findings are ordered by entity kind
    (ego, tie, contact), then id, then rule.
    """
    errors: list[Finding] = []

    for entity, records in (("ego", diary.egos), ("tie", diary.ties), ("contact", diary.contacts)):
        seen: dict[str, int] = {}
        for pos, rec in enumerate(records):
            if rec.id in seen:
                errors.append(Finding((entity, rec.id), "duplicate-id",
                                      f"id appears at positions {seen[rec.id]} and {pos}"))
            else:
                seen[rec.id] = pos

    ego_ids = {e.id for e in diary.egos}
    tie_ids = {t.id for t in diary.ties}
    for t in diary.ties:
        if t.ego not in ego_ids:
            errors.append(Finding(("tie", t.id), "dangling-reference",
                                  f"tie references unknown ego {t.ego!r}"))
    for c in diary.contacts:
        if c.tie not in tie_ids:
            errors.append(Finding(("contact", c.id), "dangling-reference",
                                  f"contact references unknown tie {c.tie!r}"))

    for e in diary.egos:
        _check_attributes("ego", e.id, e.attributes, diary.schema, errors)
    for t in diary.ties:
        _check_attributes("tie", t.id, t.attributes, diary.schema, errors)
    for c in diary.contacts:
        _check_attributes("contact", c.id, c.attributes, diary.schema, errors)

    return ValidationReport(errors=_sort_findings(errors))


# --- JSON format ------------------------------------------------------------

def _reject_constant(name):
    raise MalformedInput(f"non-finite number {name!r} is not allowed")


def schema_from_json(raw, where="schema") -> AttributeSchema:
    if not isinstance(raw, list):
        raise MalformedInput(f"{where}: expected an array of entries")
    entries = []
    for i, item in enumerate(raw):
        here = f"{where}[{i}]"
        if not isinstance(item, dict):
            raise MalformedInput(f"{here}: expected an object")
        try:
            name = item["name"]
            kind = item["kind"]
            entity = item["entity"]
        except KeyError as exc:
            raise MalformedInput(f"{here}: missing key {exc.args[0]!r}") from None
        scale = tuple(item.get("scale", ()))
        required = bool(item.get("required", False))
        try:
            entries.append(SchemaEntry(name, kind, entity, scale, required))
        except ValueError as exc:
            raise MalformedInput(f"{here}: {exc}") from None
    try:
        return AttributeSchema(tuple(entries))
    except ValueError as exc:
        raise MalformedInput(f"{where}: {exc}") from None


def schema_to_json(schema: AttributeSchema) -> list:
    out = []
    for e in schema.entries:
        item = {"name": e.name, "entity": e.entity, "kind": e.kind}
        if e.scale:
            item["scale"] = list(e.scale)
        if e.required:
            item["required"] = True
        out.append(item)
    return out


def decode_value(raw, entry: SchemaEntry, where: str):
    kind = entry.kind
    if kind == "boolean":
        if isinstance(raw, bool):
            return raw
    elif kind == "integer":
        if isinstance(raw, int) and not isinstance(raw, bool):
            return raw
    elif kind == "real":
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return float(raw)
    elif kind == "text":
        if isinstance(raw, str):
            return raw
    elif kind == "date":
        if isinstance(raw, str) and _DATE_RE.fullmatch(raw):
            try:
                return Date.fromisoformat(raw)
            except ValueError:
                pass
        raise SchemaViolation(f"{where}: {raw!r} is not a YYYY-MM-DD date")
    elif kind == "ordinal":
        if isinstance(raw, str):
            if raw not in entry.scale:
                raise SchemaViolation(f"{where}: {raw!r} is not on the scale {list(entry.scale)}")
            return Ordinal(entry.scale.index(raw), entry.scale)
    raise SchemaViolation(f"{where}: expected {kind}, got {json.dumps(raw) if raw is not None else 'null'}")


def _infer_value(raw, where: str):
    if isinstance(raw, (bool, int, str)):
        return raw
    if isinstance(raw, float):
        return raw
    raise SchemaViolation(f"{where}: unsupported value {json.dumps(raw)}")


def decode_attributes(raw, entity: str, schema: AttributeSchema, where: str) -> dict:
    if not isinstance(raw, dict):
        raise MalformedInput(f"{where}: attributes must be an object")
    out = {}
    for name, rv in raw.items():
        entry = schema.get(entity, name)
        here = f"{where}.{name}"
        out[name] = decode_value(rv, entry, here) if entry else _infer_value(rv, here)
    return out


def _record_fields(item, keys: tuple[str, ...], where: str) -> list:
    if not isinstance(item, dict):
        raise MalformedInput(f"{where}: expected an object")
    values = []
    for k in keys:
        v = item.get(k)
        if not isinstance(v, str) or not v:
            raise MalformedInput(f"{where}: missing or non-string {k!r}")
        values.append(v)
    return values


def _raise_report(report: ValidationReport):
    first = report.errors[0]
    msg = f"{first.entity[0]} {first.entity[1]!r}: {first.message}"
    if first.rule == "dangling-reference":
        raise DanglingReference(msg)
    if first.rule == "duplicate-id":
        raise DuplicateId(msg)
    raise SchemaViolation(msg)


def parse_diary_json(data: bytes) -> Diary:
    """Parse and fully validate one diary JSON document."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedInput(f"not valid UTF-8 at byte {exc.start}") from None
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise MalformedInput("top level: expected an object")

    schema = schema_from_json(doc.get("schema", []))

    egos = []
    for i, item in enumerate(doc.get("egos", [])):
        where = f"egos[{i}]"
        (rec_id,) = _record_fields(item, ("id",), where)
        egos.append(Ego(rec_id, decode_attributes(item.get("attributes", {}), "ego", schema, where)))
    ties = []
    for i, item in enumerate(doc.get("ties", [])):
        where = f"ties[{i}]"
        rec_id, ego_id = _record_fields(item, ("id", "ego"), where)
        ties.append(Tie(rec_id, ego_id, decode_attributes(item.get("attributes", {}), "tie", schema, where)))
    contacts = []
    for i, item in enumerate(doc.get("contacts", [])):
        where = f"contacts[{i}]"
        rec_id, tie_id = _record_fields(item, ("id", "tie"), where)
        contacts.append(Contact(rec_id, tie_id, decode_attributes(item.get("attributes", {}), "contact", schema, where)))

    diary = Diary(schema, tuple(egos), tuple(ties), tuple(contacts))
    report = validate_diary(diary)
    if not report.ok:
        _raise_report(report)
    return diary


def encode_value(value):
    if isinstance(value, Ordinal):
        return value.label
    if isinstance(value, Date):
        return value.isoformat()
    return value


def encode_attributes(attributes: dict) -> dict:
    return {k: encode_value(attributes[k]) for k in sorted(attributes)}


def diary_to_json(diary: Diary) -> bytes:
    """Serialize to the canonical JSON form: sorted keys, 2-space indent, LF."""
    doc = {
        "schema": schema_to_json(diary.schema),
        "egos": [{"id": e.id, "attributes": encode_attributes(e.attributes)} for e in diary.egos],
        "ties": [{"id": t.id, "ego": t.ego, "attributes": encode_attributes(t.attributes)} for t in diary.ties],
        "contacts": [{"id": c.id, "tie": c.tie, "attributes": encode_attributes(c.attributes)} for c in diary.contacts],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- CSV format -------------------------------------------------------------

def _decode_cell(cell: str, entry: SchemaEntry, where: str):
    kind = entry.kind
    if kind == "boolean":
        if cell in ("true", "false"):
            return cell == "true"
        raise SchemaViolation(f"{where}: expected true/false, got {cell!r}")
    if kind == "integer":
        try:
            return int(cell)
        except ValueError:
            raise SchemaViolation(f"{where}: expected an integer, got {cell!r}") from None
    if kind == "real":
        try:
            return float(cell)
        except ValueError:
            raise SchemaViolation(f"{where}: expected a number, got {cell!r}") from None
    if kind == "date":
        return decode_value(cell, entry, where)
    if kind == "ordinal":
        return decode_value(cell, entry, where)
    return cell  # text


def _parse_csv_table(data: bytes, entity: str, ref_column: str | None, schema: AttributeSchema, label: str):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedInput(f"{label}: not valid UTF-8 at byte {exc.start}") from None
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        raise MalformedInput(f"{label}: missing header row")
    header = rows[0]
    expected_lead = ["id"] + ([ref_column] if ref_column else [])
    if header[: len(expected_lead)] != expected_lead:
        raise MalformedInput(f"{label}: header must start with {','.join(expected_lead)}")
    attr_columns = header[len(expected_lead):]
    for col in attr_columns:
        if schema.get(entity, col) is None:
            raise SchemaViolation(f"{label}: column {col!r} is not a declared {entity} attribute")

    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedInput(f"{label} row {lineno}: expected {len(header)} cells, got {len(row)}")
        rec_id = row[0]
        if not rec_id:
            raise MalformedInput(f"{label} row {lineno}: empty id")
        ref = row[1] if ref_column else None
        if ref_column and not ref:
            raise MalformedInput(f"{label} row {lineno}: empty {ref_column}")
        attributes = {}
        for col, cell in zip(attr_columns, row[len(expected_lead):]):
            if cell == "":
                continue
            entry = schema.get(entity, col)
            attributes[col] = _decode_cell(cell, entry, f"{label} row {lineno} column {col!r}")
        records.append((rec_id, ref, attributes))
    return records


def parse_diary_csv(tie_bytes: bytes, contact_bytes: bytes, schema: AttributeSchema) -> Diary:
    """Parse the two-table CSV form. Egos are implied by ego_id, in order of
    first appearance, and carry no attributes of their own."""
    tie_rows = _parse_csv_table(tie_bytes, "tie", "ego_id", schema, "ties.csv")
    contact_rows = _parse_csv_table(contact_bytes, "contact", "tie_id", schema, "contacts.csv")

    ego_ids: list[str] = []
    for _, ego_id, _ in tie_rows:
        if ego_id not in ego_ids:
            ego_ids.append(ego_id)

    diary = Diary(
        schema,
        tuple(Ego(e, {}) for e in ego_ids),
        tuple(Tie(rec_id, ego_id, attrs) for rec_id, ego_id, attrs in tie_rows),
        tuple(Contact(rec_id, tie_id, attrs) for rec_id, tie_id, attrs in contact_rows),
    )
    report = validate_diary(diary)
    if not report.ok:
        _raise_report(report)
    return diary


def load_diary(spec: str, schema: AttributeSchema | None = None) -> Diary:
    """Load from a path spec: either one .json path or 'ties.csv,contacts.csv'."""
    if "," in spec:
        tie_path, contact_path = (p.strip() for p in spec.split(",", 1))
        with open(tie_path, "rb") as fh:
            tie_bytes = fh.read()
        with open(contact_path, "rb") as fh:
            contact_bytes = fh.read()
        return parse_diary_csv(tie_bytes, contact_bytes, schema or canonical_schema())
    with open(spec, "rb") as fh:
        return parse_diary_json(fh.read())


# --- periods and stats ------------------------------------------------------

@dataclass(frozen=True)
class Period:
    """Inclusive date range used to window contacts."""

    start: Date
    end: Date

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"period start {self.start} after end {self.end}")

    def contains(self, d: Date) -> bool:
        return self.start <= d <= self.end

    def label(self) -> str:
        return f"{self.start.isoformat()}..{self.end.isoformat()}"

    @staticmethod
    def parse(text: str) -> "Period":
        text = text.strip()
        if re.fullmatch(r"\d{4}", text):
            year = int(text)
            return Period(Date(year, 1, 1), Date(year, 12, 31))
        m = re.fullmatch(r"(\d{4}-\d{2}-\d{2})\.\.(\d{4}-\d{2}-\d{2})", text)
        if not m:
            raise ValueError(f"period must be YYYY or YYYY-MM-DD..YYYY-MM-DD, got {text!r}")
        return Period(Date.fromisoformat(m.group(1)), Date.fromisoformat(m.group(2)))


@dataclass(frozen=True)
class EgoStats:
    ego: str
    ties: int
    contacts: int
    contacts_per_tie_min: int
    contacts_per_tie_median: float
    contacts_per_tie_max: int


@dataclass(frozen=True)
class StatsSummary:
    per_ego: tuple[EgoStats, ...]
    total_egos: int
    total_ties: int
    total_contacts: int

    def to_json(self) -> dict:
        return {
            "per_ego": [
                {
                    "ego": s.ego,
                    "ties": s.ties,
                    "contacts": s.contacts,
                    "contacts_per_tie": {
                        "min": s.contacts_per_tie_min,
                        "median": s.contacts_per_tie_median,
                        "max": s.contacts_per_tie_max,
                    },
                }
                for s in self.per_ego
            ],
            "totals": {"egos": self.total_egos, "ties": self.total_ties, "contacts": self.total_contacts},
        }


def diary_stats(diary: Diary) -> StatsSummary:
    per_ego = []
    for ego in diary.egos:
        ties = diary.ties_of(ego.id)
        counts = [len(diary.contacts_of(t.id)) for t in ties]
        per_ego.append(EgoStats(
            ego=ego.id,
            ties=len(ties),
            contacts=sum(counts),
            contacts_per_tie_min=min(counts) if counts else 0,
            contacts_per_tie_median=float(statistics.median(counts)) if counts else 0.0,
            contacts_per_tie_max=max(counts) if counts else 0,
        ))
    return StatsSummary(
        per_ego=tuple(per_ego),
        total_egos=len(diary.egos),
        total_ties=len(diary.ties),
        total_contacts=len(diary.contacts),
    )
