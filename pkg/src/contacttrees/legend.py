"""Legend model derived from a mapping: one entry per active channel."""

from __future__ import annotations

from dataclasses import dataclass

from .mapping import MappingSpec

ROW_HEIGHT = 18.0
BLOCK_PAD = 8.0
CHAR_WIDTH = 6.2  # rough text advance at the legend font size


@dataclass(frozen=True)
class LegendEntry:
    channel: str
    description: str
    swatch: str


@dataclass(frozen=True)
class LegendModel:
    entries: tuple[LegendEntry, ...]

    @property
    def block_width(self) -> float:
        longest = max((len(e.channel) + len(e.description) + 2 for e in self.entries), default=20)
        return BLOCK_PAD * 2 + 26.0 + longest * CHAR_WIDTH

    @property
    def block_height(self) -> float:
        return BLOCK_PAD * 2 + ROW_HEIGHT * max(1, len(self.entries))


def _side_texts(source: str, value: str, left_when_match: bool, scale: tuple[str, ...] | None):
    if scale and len(scale) == 2 and value in scale:
        other = scale[0] if scale[1] == value else scale[1]
    else:
        other = f"not {value}"
    return (value, other) if left_when_match else (other, value)


def legend_for(spec: MappingSpec, scales: dict | None = None) -> LegendModel:
    """Build the legend; `scales` may map attribute names to their ordinal
    scales so binary sides can name both labels."""
    scales = scales or {}
    entries = []

    left, right = _side_texts(spec.trunk_side.source, spec.trunk_side.value,
                              spec.trunk_side.left_when_match, scales.get(spec.trunk_side.source))
    entries.append(LegendEntry("trunk side", f"left = {left}, right = {right}", "sides"))

    labels = ", ".join(spec.trunk_position.band_labels)
    entries.append(LegendEntry("trunk bands",
                               f"{spec.trunk_position.source} bottom to top: {labels}", "bands"))

    op = ">=" if spec.branch_side.inclusive else ">"
    threshold = spec.branch_side.threshold
    threshold_text = str(int(threshold)) if threshold == int(threshold) else str(threshold)
    entries.append(LegendEntry("branch side",
                               f"above = {spec.branch_side.source} {op} {threshold_text}", "branch-side"))

    by_count: dict[int, list[str]] = {}
    for label, count in spec.fruit_table.items():
        by_count.setdefault(count, []).append(label)
    parts = [f"{count} = {'/'.join(labels)}" for count, labels in sorted(by_count.items())]
    entries.append(LegendEntry("fruits", f"{spec.fruit_source}: {', '.join(parts)}", "fruits"))

    entries.append(LegendEntry("leaf order", f"leaves follow {spec.leaf_order} along the branch", "leaf-order"))
    entries.append(LegendEntry("leaf size", f"scales with {spec.leaf_size_source}", "leaf-size"))
    ramp = "darker = higher" if spec.leaf_darker_at_high else "darker = lower"
    entries.append(LegendEntry("leaf darkness", f"{ramp} {spec.leaf_darkness_source}", "leaf-darkness"))

    if spec.leaf_side.mode == "predicate":
        entries.append(LegendEntry("leaf side",
                                   f"above = {spec.leaf_side.source} is {spec.leaf_side.value}", "leaf-side"))

    if spec.ego_glyph is not None:
        glyph = spec.ego_glyph
        entries.append(LegendEntry(
            "bird",
            f"diary keeper: side by {glyph.side_source}, height by {glyph.band_source}; "
            f"two birds when {glyph.count_source} = {glyph.count_two_value}",
            "bird",
        ))

    return LegendModel(tuple(entries))
