"""Deterministic serialization of scenes: standalone SVG and canonical JSON.

Output is byte-identical for equal inputs: floats are written with a fixed
number of decimals (never scientific notation), element order is pinned
(background, curves by base order, leaves by contact id, fruits, birds,
legend), and JSON keys are sorted.
"""

from __future__ import annotations

import json

from .layout import (
    BIRD_HALF,
    BirdGlyph,
    Curve,
    FruitGlyph,
    LeafGlyph,
    Rect,
    SceneGraph,
    SceneMeta,
)
from .legend import BLOCK_PAD, ROW_HEIGHT, LegendEntry, LegendModel
from .style import StyleSheet, leaf_color

MARGIN = 10.0

# Perched songbird silhouette, 12 points in a 10x10 box (y up), facing +x.
BIRD_POINTS = (
    (0.0, 2.2), (1.8, 3.2), (3.6, 2.4), (5.8, 2.6), (7.6, 3.4), (8.4, 4.6),
    (9.8, 5.2), (8.6, 5.8), (7.8, 6.8), (6.2, 6.4), (3.8, 5.6), (1.2, 4.0),
)


def _fmt_factory(precision: int):
    pattern = f"{{:.{precision}f}}"
    zero = pattern.format(0.0)
    neg_zero = "-" + zero

    def fmt(x: float) -> str:
        s = pattern.format(x)
        return zero if s == neg_zero else s

    return fmt


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


class _SceneWriter:
    """Emits one scene's elements into a y-flipped pixel frame."""

    def __init__(self, scene: SceneGraph, style: StyleSheet, ox: float, oy: float):
        self.scene = scene
        self.style = style
        self.fmt = _fmt_factory(style.precision)
        x0, y0, x1, y1 = scene.bounds
        self.tx = lambda x: x - x0 + ox
        self.ty = lambda y: y1 - y + oy
        self.width = x1 - x0
        self.height = y1 - y0

    def curve_elements(self) -> list[str]:
        fmt = self.fmt
        out = []
        for c in self.scene.curves:
            parts = [f"M {fmt(self.tx(c.chain[0][0][0]))} {fmt(self.ty(c.chain[0][0][1]))}"]
            for piece in c.chain:
                coords = " ".join(f"{fmt(self.tx(p[0]))} {fmt(self.ty(p[1]))}" for p in piece[1:])
                parts.append(f"C {coords}")
            out.append(
                f'<path data-tie="{_escape(c.tie)}" d="{" ".join(parts)}" fill="none" '
                f'stroke="{c.color}" stroke-width="{fmt(c.stroke_width)}" stroke-linecap="round"/>'
            )
        return out

    def leaf_elements(self) -> list[str]:
        fmt = self.fmt
        out = []
        for g in self.scene.leaves:
            r = g.radius
            w = r * 0.55
            d = (f"M {fmt(-r)} 0 Q 0 {fmt(w)} {fmt(r)} 0 Q 0 {fmt(-w)} {fmt(-r)} 0 Z")
            transform = (f"translate({fmt(self.tx(g.center[0]))} {fmt(self.ty(g.center[1]))}) "
                         f"rotate({fmt(-g.angle)})")
            out.append(
                f'<path data-contact="{_escape(g.contact)}" data-tie="{_escape(g.tie)}" '
                f'transform="{transform}" d="{d}" fill="{leaf_color(self.style, g.darkness)}"/>'
            )
        return out

    def fruit_elements(self) -> list[str]:
        fmt = self.fmt
        return [
            f'<circle data-tie="{_escape(g.tie)}" cx="{fmt(self.tx(g.center[0]))}" '
            f'cy="{fmt(self.ty(g.center[1]))}" r="{fmt(g.radius)}" fill="{self.style.fruit_color}"/>'
            for g in self.scene.fruits
        ]

    def bird_elements(self) -> list[str]:
        fmt = self.fmt
        out = []
        for g in self.scene.glyphs:
            # face the trunk: flip the silhouette when sitting on the right
            flip = -1.0 if g.side == "right" else 1.0
            cx, cy = self.tx(g.position[0]), self.ty(g.position[1])
            pts = []
            for bx, by in BIRD_POINTS:
                lx = (bx - 5.0) * flip * (BIRD_HALF / 5.0)
                ly = (by - 5.0) * (BIRD_HALF / 5.0)
                pts.append(f"{fmt(cx + lx)},{fmt(cy - ly)}")
            out.append(f'<polygon data-glyph="bird-{g.slot}" points="{" ".join(pts)}" '
                       f'fill="{self.style.bird_color}"/>')
        return out

    def legend_elements(self) -> list[str]:
        fmt = self.fmt
        legend = self.scene.legend
        x0, y0, x1, y1 = _legend_rect_of(self.scene)
        left, top = self.tx(x0), self.ty(y1)
        out = [
            f'<g font-family="{_escape(self.style.font_family)}" font-size="11" fill="#333333">',
            f'<rect x="{fmt(left)}" y="{fmt(top)}" width="{fmt(x1 - x0)}" height="{fmt(y1 - y0)}" '
            f'fill="none" stroke="#cccccc" stroke-width="1.000"/>',
        ]
        for i, entry in enumerate(legend.entries):
            row_y = top + BLOCK_PAD + (i + 0.7) * ROW_HEIGHT
            sx = left + BLOCK_PAD
            out.append(self._swatch(entry, sx, row_y - 4.0))
            out.append(
                f'<text x="{fmt(sx + 26.0)}" y="{fmt(row_y)}">'
                f"{_escape(entry.channel)}: {_escape(entry.description)}</text>"
            )
        out.append("</g>")
        return out

    def _swatch(self, entry: LegendEntry, x: float, y: float) -> str:
        fmt = self.fmt
        kind = entry.swatch
        if kind == "fruits":
            return (f'<g><circle cx="{fmt(x + 5)}" cy="{fmt(y)}" r="3.000" fill="{self.style.fruit_color}"/>'
                    f'<circle cx="{fmt(x + 13)}" cy="{fmt(y)}" r="3.000" fill="{self.style.fruit_color}"/></g>')
        if kind in ("leaf-size", "leaf-darkness", "leaf-order", "leaf-side"):
            return (f'<path transform="translate({fmt(x + 9)} {fmt(y)})" '
                    f'd="M -6.000 0 Q 0 3.300 6.000 0 Q 0 -3.300 -6.000 0 Z" '
                    f'fill="{leaf_color(self.style, 0.75)}"/>')
        if kind == "bird":
            pts = " ".join(f"{fmt(x + bx * 1.4)},{fmt(y + 5 - by * 1.0)}" for bx, by in BIRD_POINTS)
            return f'<polygon points="{pts}" fill="{self.style.bird_color}"/>'
        return (f'<rect x="{fmt(x + 2)}" y="{fmt(y - 5)}" width="14.000" height="10.000" '
                f'fill="none" stroke="{self.style.trunk_dark}" stroke-width="1.500"/>')


def _legend_rect_of(scene: SceneGraph) -> Rect:
    # the legend block is the bottom strip of the scene bounds
    w, h = scene.legend.block_width, scene.legend.block_height
    x0, y0, x1, y1 = scene.bounds
    cx = (x0 + x1) / 2.0
    return (cx - w / 2.0, y0, cx + w / 2.0, y0 + h)


def scene_to_svg(scene: SceneGraph, style: StyleSheet | None = None) -> bytes:
    """Standalone SVG 1.1 document for one scene."""
    style = style or StyleSheet()
    writer = _SceneWriter(scene, style, MARGIN, MARGIN)
    fmt = writer.fmt
    width = writer.width + 2 * MARGIN
    height = writer.height + 2 * MARGIN
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{fmt(width)}" height="{fmt(height)}" '
        f'viewBox="0 0 {fmt(width)} {fmt(height)}">',
        f'<rect x="0" y="0" width="{fmt(width)}" height="{fmt(height)}" fill="{style.background}"/>',
    ]
    lines.extend(writer.curve_elements())
    lines.extend(writer.leaf_elements())
    lines.extend(writer.fruit_elements())
    lines.extend(writer.bird_elements())
    lines.extend(writer.legend_elements())
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def compose_panels(panels: list[tuple[SceneGraph, str]], style: StyleSheet | None = None) -> bytes:
    """One SVG with 2..3 captioned scenes side by side (shared pixel scale)."""
    style = style or StyleSheet()
    gap = 24.0
    caption_strip = 22.0
    writers = []
    x_cursor = MARGIN
    for scene, _caption in panels:
        writer = _SceneWriter(scene, style, x_cursor, MARGIN + caption_strip)
        writers.append((writer, x_cursor))
        x_cursor += writer.width + gap
    total_width = x_cursor - gap + MARGIN
    total_height = max(w.height for w, _ in writers) + 2 * MARGIN + caption_strip
    fmt = writers[0][0].fmt
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{fmt(total_width)}" height="{fmt(total_height)}" '
        f'viewBox="0 0 {fmt(total_width)} {fmt(total_height)}">',
        f'<rect x="0" y="0" width="{fmt(total_width)}" height="{fmt(total_height)}" fill="{style.background}"/>',
    ]
    for i, ((writer, x_left), (scene, caption)) in enumerate(zip(writers, panels)):
        lines.append(f'<g data-panel="{i}">')
        lines.append(
            f'<text x="{fmt(x_left + writer.width / 2.0)}" y="{fmt(MARGIN + 12.0)}" '
            f'font-family="{_escape(style.font_family)}" font-size="13" text-anchor="middle" '
            f'fill="#222222">{_escape(caption)}</text>'
        )
        lines.extend(writer.curve_elements())
        lines.extend(writer.leaf_elements())
        lines.extend(writer.fruit_elements())
        lines.extend(writer.bird_elements())
        lines.extend(writer.legend_elements())
        lines.append("</g>")
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


# --- scene JSON ---------------------------------------------------------------

def _round_floats(value, precision: int):
    if isinstance(value, float):
        return round(value, precision) + 0.0
    if isinstance(value, (list, tuple)):
        return [_round_floats(v, precision) for v in value]
    if isinstance(value, dict):
        return {k: _round_floats(v, precision) for k, v in value.items()}
    return value


def scene_to_dict(scene: SceneGraph) -> dict:
    return {
        "meta": {
            "ego": scene.meta.ego,
            "period": scene.meta.period,
            "mapping": scene.meta.mapping_name,
            "excluded_ties": [list(item) for item in scene.meta.excluded_ties],
            "excluded_contacts": [list(item) for item in scene.meta.excluded_contacts],
            "ego_glyph_note": scene.meta.ego_glyph_note,
        },
        "bounds": list(scene.bounds),
        "curves": [
            {
                "tie": c.tie,
                "chain": [[list(p) for p in piece] for piece in c.chain],
                "stroke_width": c.stroke_width,
                "color": c.color,
                "side": c.side,
                "band": c.band,
                "branch_side": c.branch_side,
                "fruits": c.fruit_count,
                "attributes": c.attributes,
            }
            for c in scene.curves
        ],
        "leaves": [
            {
                "contact": g.contact,
                "tie": g.tie,
                "center": list(g.center),
                "angle": g.angle,
                "radius": g.radius,
                "darkness": g.darkness,
            }
            for g in scene.leaves
        ],
        "fruits": [
            {"tie": g.tie, "center": list(g.center), "radius": g.radius} for g in scene.fruits
        ],
        "glyphs": [
            {"kind": g.kind, "position": list(g.position), "slot": g.slot, "side": g.side}
            for g in scene.glyphs
        ],
        "legend": [
            {"channel": e.channel, "description": e.description, "swatch": e.swatch}
            for e in scene.legend.entries
        ],
    }


def scene_to_json(scene: SceneGraph, precision: int = 3) -> bytes:
    doc = _round_floats(scene_to_dict(scene), precision)
    return (json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n").encode("utf-8")


def scene_from_json(data: bytes | str) -> SceneGraph:
    raw = json.loads(data)
    meta = SceneMeta(
        ego=raw["meta"]["ego"],
        period=raw["meta"]["period"],
        mapping_name=raw["meta"]["mapping"],
        excluded_ties=tuple(tuple(item) for item in raw["meta"]["excluded_ties"]),
        excluded_contacts=tuple(tuple(item) for item in raw["meta"]["excluded_contacts"]),
        ego_glyph_note=raw["meta"]["ego_glyph_note"],
    )
    curves = tuple(
        Curve(
            tie=c["tie"],
            chain=tuple(tuple(tuple(p) for p in piece) for piece in c["chain"]),
            stroke_width=c["stroke_width"],
            color=c["color"],
            side=c["side"],
            band=c["band"],
            branch_side=c["branch_side"],
            fruit_count=c["fruits"],
            attributes=c["attributes"],
        )
        for c in raw["curves"]
    )
    leaves = tuple(
        LeafGlyph(g["contact"], g["tie"], tuple(g["center"]), g["angle"], g["radius"], g["darkness"])
        for g in raw["leaves"]
    )
    fruits = tuple(FruitGlyph(g["tie"], tuple(g["center"]), g["radius"]) for g in raw["fruits"])
    glyphs = tuple(BirdGlyph(g["kind"], tuple(g["position"]), g["slot"], g["side"]) for g in raw["glyphs"])
    legend = LegendModel(tuple(LegendEntry(e["channel"], e["description"], e["swatch"]) for e in raw["legend"]))
    return SceneGraph(meta, curves, leaves, fruits, glyphs, legend, tuple(raw["bounds"]))
