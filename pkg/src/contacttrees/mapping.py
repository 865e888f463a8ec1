"""Binding of diary attributes to tree channels.

A MappingSpec says which tie attribute decides the trunk side, which one is
binned into the trunk bands, which decides the branch side (above/below),
how fruits are counted, and how contact attributes drive leaf order, size
and darkness. Two presets ship with the package:

* diary-default: side by gender (male left), bands by age decade, branch
  side by years known (5 or more above), fruits by liking (0/0/1/2), leaves
  ordered by date, sized by duration, darkened by feeling.
* liking-tenure: side by liking (very much right), bands by tenure
  (strangers, <1y, 1-4y, 5-19y, 20y+), branch side by age (over 40 above),
  fruits by gender (male 1, female 2), leaves as above.

Resolution turns a Tie into TieChannelValues and a Contact into
LeafChannelValues; both are pure functions of their inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date as Date

from .diary import (
    AttributeSchema,
    Contact,
    Finding,
    Ordinal,
    Tie,
    ValidationReport,
    _sort_findings,
)

PRESET_NAMES = ("diary-default", "liking-tenure")

DECADE_LABELS = tuple(f"{d * 10}-{d * 10 + 9}" for d in range(10))
TENURE_LABELS = ("strangers", "<1y", "1-4y", "5-19y", "20y+")
TENURE_EDGES = (0.0, 1.0, 5.0, 20.0)


class MappingError(Exception):
    """Base class for mapping failures."""


class UnknownPreset(MappingError):
    pass


class MissingAttribute(MappingError):
    def __init__(self, entity_id: str, attribute: str):
        super().__init__(f"{entity_id} has no attribute {attribute!r}")
        self.entity_id = entity_id
        self.attribute = attribute


class IncompatibleKind(MappingError):
    pass


def _label_of(value) -> str:
    if isinstance(value, Ordinal):
        return value.label
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Date):
        return value.isoformat()
    return value if isinstance(value, str) else str(value)


def _numeric_of(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise IncompatibleKind(f"{what}: expected a number, got {type(value).__name__}")
    return float(value)


@dataclass(frozen=True)
class BinningSpec:
    """Maps an attribute value to a band index, bottom (0) to top.

    kinds: "decade" (floor(value / 10), clamped), "threshold" (count of
    edges <= value) and "ordinal" (the level index).
    """

    source: str
    kind: str
    band_labels: tuple[str, ...]
    edges: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("decade", "threshold", "ordinal"):
            raise ValueError(f"unknown binning kind {self.kind!r}")
        if not self.band_labels:
            raise ValueError("binning needs at least one band label")
        if self.kind == "threshold":
            if any(a >= b for a, b in zip(self.edges, self.edges[1:])):
                raise ValueError("threshold edges must be strictly ascending")
            if len(self.band_labels) != len(self.edges) + 1:
                raise ValueError("threshold binning needs one more label than edges")

    @property
    def band_count(self) -> int:
        return len(self.band_labels)


def bin_value(spec: BinningSpec, value) -> int:
    """Band index for one attribute value."""
    if spec.kind == "ordinal":
        if not isinstance(value, Ordinal):
            raise IncompatibleKind(f"binning {spec.source!r}: expected an ordinal value")
        return min(value.level, spec.band_count - 1)
    v = _numeric_of(value, f"binning {spec.source!r}")
    if spec.kind == "decade":
        return max(0, min(int(v // 10), spec.band_count - 1))
    return sum(1 for e in spec.edges if e <= v)


@dataclass(frozen=True)
class SidePredicate:
    """Equality test deciding left vs right."""

    source: str
    value: str
    left_when_match: bool = True

    def left_for(self, value) -> bool:
        return (_label_of(value) == self.value) == self.left_when_match


@dataclass(frozen=True)
class ThresholdPredicate:
    """Numeric test deciding above vs below a branch."""

    source: str
    threshold: float
    inclusive: bool = True  # above when value >= threshold (else strictly >)

    def above_for(self, value) -> bool:
        v = _numeric_of(value, f"branch side {self.source!r}")
        return v >= self.threshold if self.inclusive else v > self.threshold


@dataclass(frozen=True)
class StrangerRule:
    """Forces trunk band 0 for ties the ego does not really know yet."""

    flag_source: str | None = "is_stranger"
    when_value_missing: bool = True
    when_value_zero: bool = True


@dataclass(frozen=True)
class LeafSideSpec:
    mode: str = "alternate"  # "alternate" | "predicate"
    source: str | None = None
    value: str | None = None

    def __post_init__(self):
        if self.mode not in ("alternate", "predicate"):
            raise ValueError(f"unknown leaf side mode {self.mode!r}")
        if self.mode == "predicate" and not self.source:
            raise ValueError("predicate leaf side needs a source attribute")


@dataclass(frozen=True)
class EgoGlyphSpec:
    """How the diary keeper's own marker is derived."""

    side_source: str = "gender"
    side_value: str = "male"
    left_when_match: bool = True
    band_source: str = "age"
    count_source: str = "marital_status"
    count_two_value: str = "married"


@dataclass(frozen=True)
class MappingSpec:
    name: str
    trunk_side: SidePredicate
    trunk_position: BinningSpec
    branch_side: ThresholdPredicate
    fruit_source: str
    fruit_table: dict
    leaf_order: str
    leaf_size_source: str
    leaf_darkness_source: str
    leaf_darker_at_high: bool = True
    leaf_side: LeafSideSpec = field(default_factory=LeafSideSpec)
    stranger_rule: StrangerRule | None = None
    ego_glyph: EgoGlyphSpec | None = None

    def __post_init__(self):
        for count in self.fruit_table.values():
            if count not in (0, 1, 2):
                raise ValueError("fruit counts must be 0, 1 or 2")


@dataclass(frozen=True)
class TieChannelValues:
    tie: str
    side: str  # "left" | "right"
    band: int
    branch_side: str  # "above" | "below"
    fruit_count: int


@dataclass(frozen=True)
class LeafChannelValues:
    contact: str
    order_key: object
    size: float
    darkness: float
    side: str  # "above" | "below" | "alternate"


@dataclass(frozen=True)
class Norms:
    """Per-tree normalization window for the leaf size source (and, when the
    darkness source is numeric rather than ordinal, for darkness too)."""

    size_min: float = 0.0
    size_max: float = 0.0
    dark_min: float | None = None
    dark_max: float | None = None

    def __post_init__(self):
        if self.size_min > self.size_max:
            raise ValueError("size_min must be <= size_max")


def preset_mapping(name: str) -> MappingSpec:
    if name == "diary-default":
        from .diary import LIKING_SCALE

        return MappingSpec(
            name=name,
            trunk_side=SidePredicate("gender", "male", left_when_match=True),
            trunk_position=BinningSpec("age", "decade", DECADE_LABELS),
            branch_side=ThresholdPredicate("years_known", 5.0, inclusive=True),
            fruit_source="liking",
            fruit_table={LIKING_SCALE[0]: 0, LIKING_SCALE[1]: 0, LIKING_SCALE[2]: 1, LIKING_SCALE[3]: 2},
            leaf_order="date",
            leaf_size_source="duration",
            leaf_darkness_source="feeling",
            leaf_darker_at_high=True,
            leaf_side=LeafSideSpec("alternate"),
            ego_glyph=EgoGlyphSpec(),
        )
    if name == "liking-tenure":
        return MappingSpec(
            name=name,
            trunk_side=SidePredicate("liking", "very much", left_when_match=False),
            trunk_position=BinningSpec("years_known", "threshold", TENURE_LABELS, TENURE_EDGES),
            branch_side=ThresholdPredicate("age", 40.0, inclusive=False),
            fruit_source="gender",
            fruit_table={"male": 1, "female": 2},
            leaf_order="date",
            leaf_size_source="duration",
            leaf_darkness_source="feeling",
            leaf_darker_at_high=True,
            leaf_side=LeafSideSpec("alternate"),
            stranger_rule=StrangerRule(),
            ego_glyph=None,
        )
    raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


# --- resolution ---------------------------------------------------------------

def _require(attributes: dict, entity_id: str, name: str):
    if name not in attributes:
        raise MissingAttribute(entity_id, name)
    return attributes[name]


def resolve_tie_channels(spec: MappingSpec, tie: Tie) -> TieChannelValues:
    side_value = _require(tie.attributes, tie.id, spec.trunk_side.source)
    side = "left" if spec.trunk_side.left_for(side_value) else "right"

    band = None
    rule = spec.stranger_rule
    if rule is not None:
        if rule.flag_source and tie.attributes.get(rule.flag_source) is True:
            band = 0
        elif rule.when_value_missing and spec.trunk_position.source not in tie.attributes:
            band = 0
    if band is None:
        position_value = _require(tie.attributes, tie.id, spec.trunk_position.source)
        if rule is not None and rule.when_value_zero and isinstance(position_value, (int, float)) \
                and not isinstance(position_value, bool) and position_value == 0:
            band = 0
        else:
            band = bin_value(spec.trunk_position, position_value)

    branch_value = _require(tie.attributes, tie.id, spec.branch_side.source)
    branch_side = "above" if spec.branch_side.above_for(branch_value) else "below"

    fruit_value = _require(tie.attributes, tie.id, spec.fruit_source)
    label = _label_of(fruit_value)
    if label not in spec.fruit_table:
        raise MappingError(f"{tie.id}: fruit table has no entry for {label!r}")
    return TieChannelValues(tie.id, side, band, branch_side, spec.fruit_table[label])


def _unit_clamp(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def resolve_contact_channels(spec: MappingSpec, contact: Contact, norms: Norms) -> LeafChannelValues:
    order_value = _require(contact.attributes, contact.id, spec.leaf_order)
    if isinstance(order_value, Ordinal):
        order_key = order_value.level
    elif isinstance(order_value, (Date, int, float, str)):
        order_key = order_value
    else:
        raise IncompatibleKind(f"{contact.id}: {spec.leaf_order!r} is not orderable")

    size_value = _numeric_of(_require(contact.attributes, contact.id, spec.leaf_size_source),
                             f"{contact.id}.{spec.leaf_size_source}")
    span = norms.size_max - norms.size_min
    size = 0.5 if span <= 0 else _unit_clamp((size_value - norms.size_min) / span)

    dark_value = _require(contact.attributes, contact.id, spec.leaf_darkness_source)
    if isinstance(dark_value, Ordinal):
        top = len(dark_value.scale) - 1
        darkness = 0.5 if top == 0 else dark_value.level / top
    else:
        v = _numeric_of(dark_value, f"{contact.id}.{spec.leaf_darkness_source}")
        if norms.dark_min is not None and norms.dark_max is not None and norms.dark_max > norms.dark_min:
            darkness = _unit_clamp((v - norms.dark_min) / (norms.dark_max - norms.dark_min))
        else:
            darkness = _unit_clamp(v)
    if not spec.leaf_darker_at_high:
        darkness = 1.0 - darkness

    if spec.leaf_side.mode == "alternate":
        side = "alternate"
    else:
        value = _require(contact.attributes, contact.id, spec.leaf_side.source)
        side = "above" if _label_of(value) == spec.leaf_side.value else "below"

    return LeafChannelValues(contact.id, order_key, size, darkness, side)


@dataclass(frozen=True)
class EgoChannelValues:
    side: str
    band: int
    count: int
    band_count: int


def resolve_ego_channels(spec: MappingSpec, ego_id: str, attributes: dict) -> EgoChannelValues:
    glyph = spec.ego_glyph
    if glyph is None:
        raise MappingError(f"mapping {spec.name!r} defines no ego glyph")
    side_value = _require(attributes, ego_id, glyph.side_source)
    matches = _label_of(side_value) == glyph.side_value
    side = "left" if matches == glyph.left_when_match else "right"
    band_value = _require(attributes, ego_id, glyph.band_source)
    band = bin_value(spec.trunk_position, band_value)
    count_value = _require(attributes, ego_id, glyph.count_source)
    count = 2 if _label_of(count_value) == glyph.count_two_value else 1
    return EgoChannelValues(side, band, count, spec.trunk_position.band_count)


# --- validation ---------------------------------------------------------------

_NUMERIC = ("integer", "real")
_CATEGORICAL = ("ordinal", "text", "boolean")


def _check_source(schema: AttributeSchema, entity: str, name: str, kinds: tuple[str, ...],
                  channel: str, out: list) -> "SchemaEntry | None":
    entry = schema.get(entity, name)
    if entry is None:
        out.append(Finding(("mapping", channel), "missing-source",
                           f"{entity} attribute {name!r} is not in the schema"))
        return None
    if entry.kind not in kinds:
        out.append(Finding(("mapping", channel), "kind-incompatible",
                           f"{entity} attribute {name!r} is {entry.kind}, needs one of {'/'.join(kinds)}"))
        return None
    return entry


def validate_mapping(spec: MappingSpec, schema: AttributeSchema) -> ValidationReport:
    errors: list[Finding] = []

    _check_source(schema, "tie", spec.trunk_side.source, _CATEGORICAL, "trunk_side", errors)

    position_kinds = ("ordinal",) if spec.trunk_position.kind == "ordinal" else _NUMERIC
    _check_source(schema, "tie", spec.trunk_position.source, position_kinds, "trunk_position", errors)

    _check_source(schema, "tie", spec.branch_side.source, _NUMERIC, "branch_side", errors)

    fruit_entry = _check_source(schema, "tie", spec.fruit_source, ("ordinal",), "fruit_count", errors)
    if fruit_entry is not None:
        missing = [label for label in fruit_entry.scale if label not in spec.fruit_table]
        if missing:
            errors.append(Finding(("mapping", "fruit_count"), "partial-fruit-table",
                                  f"no fruit count for scale levels: {', '.join(missing)}"))

    _check_source(schema, "contact", spec.leaf_order, ("date", "integer", "real", "ordinal"), "leaf_order", errors)
    _check_source(schema, "contact", spec.leaf_size_source, _NUMERIC, "leaf_size", errors)
    _check_source(schema, "contact", spec.leaf_darkness_source, ("ordinal", "real", "integer"), "leaf_darkness", errors)

    if spec.leaf_side.mode == "predicate":
        _check_source(schema, "contact", spec.leaf_side.source, _CATEGORICAL, "leaf_side", errors)
    if spec.stranger_rule is not None and spec.stranger_rule.flag_source:
        _check_source(schema, "tie", spec.stranger_rule.flag_source, ("boolean",), "stranger_rule", errors)
    if spec.ego_glyph is not None:
        glyph = spec.ego_glyph
        _check_source(schema, "ego", glyph.side_source, _CATEGORICAL, "ego_glyph.side", errors)
        _check_source(schema, "ego", glyph.band_source, position_kinds, "ego_glyph.band", errors)
        _check_source(schema, "ego", glyph.count_source, _CATEGORICAL, "ego_glyph.count", errors)

    return ValidationReport(errors=_sort_findings(errors))


# --- JSON form ------------------------------------------------------------------

def mapping_spec_to_json(spec: MappingSpec) -> dict:
    doc = {
        "name": spec.name,
        "trunk_side": {
            "source": spec.trunk_side.source,
            "value": spec.trunk_side.value,
            "left_when_match": spec.trunk_side.left_when_match,
        },
        "trunk_position": {
            "source": spec.trunk_position.source,
            "kind": spec.trunk_position.kind,
            "band_labels": list(spec.trunk_position.band_labels),
            "edges": list(spec.trunk_position.edges),
        },
        "branch_side": {
            "source": spec.branch_side.source,
            "threshold": spec.branch_side.threshold,
            "inclusive": spec.branch_side.inclusive,
        },
        "fruits": {"source": spec.fruit_source, "table": dict(spec.fruit_table)},
        "leaf_order": spec.leaf_order,
        "leaf_size": {"source": spec.leaf_size_source},
        "leaf_darkness": {"source": spec.leaf_darkness_source, "darker_at_high": spec.leaf_darker_at_high},
        "leaf_side": {"mode": spec.leaf_side.mode},
        "stranger_rule": None,
        "ego_glyph": None,
    }
    if spec.leaf_side.mode == "predicate":
        doc["leaf_side"].update({"source": spec.leaf_side.source, "value": spec.leaf_side.value})
    if spec.stranger_rule is not None:
        rule = spec.stranger_rule
        doc["stranger_rule"] = {
            "flag_source": rule.flag_source,
            "when_value_missing": rule.when_value_missing,
            "when_value_zero": rule.when_value_zero,
        }
    if spec.ego_glyph is not None:
        glyph = spec.ego_glyph
        doc["ego_glyph"] = {
            "side_source": glyph.side_source,
            "side_value": glyph.side_value,
            "left_when_match": glyph.left_when_match,
            "band_source": glyph.band_source,
            "count_source": glyph.count_source,
            "count_two_value": glyph.count_two_value,
        }
    return doc


def mapping_spec_from_json(data: bytes | str | dict) -> MappingSpec:
    if isinstance(data, (bytes, str)):
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MappingError(f"mapping spec is not valid JSON: {exc.msg}") from None
    else:
        raw = data
    if not isinstance(raw, dict):
        raise MappingError("mapping spec must be a JSON object")
    try:
        trunk_side = SidePredicate(
            raw["trunk_side"]["source"],
            raw["trunk_side"]["value"],
            bool(raw["trunk_side"].get("left_when_match", True)),
        )
        pos = raw["trunk_position"]
        trunk_position = BinningSpec(pos["source"], pos["kind"], tuple(pos["band_labels"]),
                                     tuple(float(e) for e in pos.get("edges", ())))
        branch = raw["branch_side"]
        branch_side = ThresholdPredicate(branch["source"], float(branch["threshold"]),
                                         bool(branch.get("inclusive", True)))
        fruits = raw["fruits"]
        leaf_side_raw = raw.get("leaf_side", {"mode": "alternate"})
        leaf_side = LeafSideSpec(leaf_side_raw.get("mode", "alternate"),
                                 leaf_side_raw.get("source"), leaf_side_raw.get("value"))
        stranger_raw = raw.get("stranger_rule")
        stranger = None if stranger_raw is None else StrangerRule(
            stranger_raw.get("flag_source"),
            bool(stranger_raw.get("when_value_missing", True)),
            bool(stranger_raw.get("when_value_zero", True)),
        )
        glyph_raw = raw.get("ego_glyph")
        glyph = None if glyph_raw is None else EgoGlyphSpec(
            glyph_raw.get("side_source", "gender"),
            glyph_raw.get("side_value", "male"),
            bool(glyph_raw.get("left_when_match", True)),
            glyph_raw.get("band_source", "age"),
            glyph_raw.get("count_source", "marital_status"),
            glyph_raw.get("count_two_value", "married"),
        )
        return MappingSpec(
            name=str(raw.get("name", "custom")),
            trunk_side=trunk_side,
            trunk_position=trunk_position,
            branch_side=branch_side,
            fruit_source=fruits["source"],
            fruit_table={str(k): int(v) for k, v in fruits["table"].items()},
            leaf_order=raw["leaf_order"],
            leaf_size_source=raw["leaf_size"]["source"],
            leaf_darkness_source=raw["leaf_darkness"]["source"],
            leaf_darker_at_high=bool(raw.get("leaf_darkness", {}).get("darker_at_high", True)),
            leaf_side=leaf_side,
            stranger_rule=stranger,
            ego_glyph=glyph,
        )
    except KeyError as exc:
        raise MappingError(f"mapping spec is missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise MappingError(f"mapping spec is malformed: {exc}") from None
