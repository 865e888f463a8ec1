"""Color palette and style settings shared by layout and rendering."""

from __future__ import annotations

from dataclasses import dataclass

TRUNK_DARK = "#4a3728"
TRUNK_LIGHT = "#8a6a44"
LEAF_LIGHT = "#b5cc8e"
LEAF_DARK = "#2d5016"
FRUIT_COLOR = "#c9542c"
BIRD_COLOR = "#3a3a3a"
BACKGROUND = "#ffffff"


@dataclass(frozen=True)
class StyleSheet:
    trunk_dark: str = TRUNK_DARK
    trunk_light: str = TRUNK_LIGHT
    leaf_light: str = LEAF_LIGHT
    leaf_dark: str = LEAF_DARK
    fruit_color: str = FRUIT_COLOR
    bird_color: str = BIRD_COLOR
    background: str = BACKGROUND
    font_family: str = "sans-serif"
    precision: int = 3

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if self.leaf_light == self.leaf_dark or self.trunk_dark == self.trunk_light:
            raise ValueError("ramp endpoints must be distinct")


def _hex_to_rgb(color: str) -> tuple[int, int, int]:
    color = color.lstrip("#")
    return int(color[0:2], 16), int(color[2:4], 16), int(color[4:6], 16)


def lerp_hex(color_a: str, color_b: str, t: float) -> str:
    """Linear blend between two #rrggbb colors, t clamped to [0, 1]."""
    t = 0.0 if t < 0.0 else 1.0 if t > 1.0 else t
    ra, ga, ba = _hex_to_rgb(color_a)
    rb, gb, bb = _hex_to_rgb(color_b)
    return "#{:02x}{:02x}{:02x}".format(
        round(ra + (rb - ra) * t), round(ga + (gb - ga) * t), round(ba + (bb - ba) * t)
    )


def trunk_color(band: int, band_count: int) -> str:
    """Stroke color for a tie in the given band; darker toward the base."""
    t = 0.0 if band_count <= 1 else band / (band_count - 1)
    return lerp_hex(TRUNK_DARK, TRUNK_LIGHT, t)


def leaf_color(style: StyleSheet, darkness: float) -> str:
    return lerp_hex(style.leaf_light, style.leaf_dark, darkness)
