"""Tree construction: ordering, skeleton geometry, adornments, smoothing.

A tree is built in four steps:

1. order_ties lines the resolved ties up along the trunk base: left side by
   ascending band (below-branch ties first inside a band), then right side
   by descending band (above-branch ties first), ties broken by id.
2. build_skeleton turns each tie into a five-segment polyline: a vertical
   trunk rise, a diagonal start of the main branch (shorter and steeper for
   higher bands), a run along the shared branch axis whose length grows with
   the tie's rank, then a constant-angle twig whose last segment grows with
   the number of leaves it has to carry.
3. place_adornments puts leaf glyphs along the twig (ordered, sized and
   darkened per the mapping) and up to two fruit glyphs on its lower side;
   place_ego_glyph adds one or two bird markers level with the ego's band.
4. smooth_lines replaces every polyline with a cubic chain through points
   sampled uniformly along it.

Everything here is a pure function of its inputs; laying out the same diary
twice yields structurally identical scenes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .diary import Diary, Period, ValidationReport, encode_attributes
from .legend import LegendModel, legend_for
from .mapping import (
    LeafChannelValues,
    MappingError,
    MappingSpec,
    MissingAttribute,
    Norms,
    TieChannelValues,
    resolve_contact_channels,
    resolve_ego_channels,
    resolve_tie_channels,
    validate_mapping,
)
from .spline import CubicPiece, Pt, smooth_polyline
from .style import trunk_color

BIRD_HALF = 6.0
LEAF_TILT_DEG = 40.0
LEGEND_GAP = 16.0


class LayoutError(Exception):
    pass


class UnknownEgo(LayoutError):
    pass


class UnknownTie(LayoutError):
    pass


class BandOutOfRange(LayoutError):
    pass


class InvalidMapping(LayoutError):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(f.message for f in report.errors))
        self.report = report


@dataclass(frozen=True)
class LayoutParams:
    """Geometry knobs. The defaults draw a triangular, tree-like silhouette;
    every value can be overridden from a JSON file."""

    line_spacing: float = 2.0
    stroke_width: float = 2.4
    base_rise: float = 36.0
    band_height: float = 36.0
    main_branch_gap: float = 10.0
    branch_base_angle: float = 60.0  # degrees from vertical, band 0
    angle_sharpen: float = 8.0       # degrees subtracted per band
    min_branch_angle: float = 15.0   # floor for the above
    seg2_base_length: float = 60.0
    seg2_shrink: float = 0.85        # per-band length factor
    seg3_step: float = 10.0          # axis run per in-branch rank
    seg4_length: float = 8.0
    seg4_angle: float = 35.0         # twig peel-off, degrees
    seg5_per_leaf: float = 6.0
    seg5_min: float = 10.0
    leaf_radius_range: tuple[float, float] = (2.0, 6.0)
    leaf_spacing: float = 6.0
    fruit_radius: float = 3.5
    spline_samples: int = 64
    bird_margin: float = 14.0
    bird_spacing: float = 14.0

    def __post_init__(self):
        positive = (
            "line_spacing", "stroke_width", "base_rise", "band_height",
            "seg2_base_length", "seg3_step", "seg4_length", "seg5_per_leaf",
            "seg5_min", "leaf_spacing", "fruit_radius", "bird_margin", "bird_spacing",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.main_branch_gap < 0:
            raise ValueError("main_branch_gap must be >= 0")
        if not 0 < self.seg2_shrink <= 1:
            raise ValueError("seg2_shrink must be in (0, 1]")
        if self.spline_samples < 4:
            raise ValueError("spline_samples must be >= 4")
        lo, hi = self.leaf_radius_range
        if not 0 < lo < hi:
            raise ValueError("leaf_radius_range must be 0 < min < max")
        if self.min_branch_angle <= 0 or self.branch_base_angle < self.min_branch_angle:
            raise ValueError("angles must satisfy 0 < min_branch_angle <= branch_base_angle")

    @staticmethod
    def from_json(raw: dict) -> "LayoutParams":
        defaults = LayoutParams()
        unknown = set(raw) - {f for f in defaults.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown layout parameter(s): {', '.join(sorted(unknown))}")
        if "leaf_radius_range" in raw:
            raw = dict(raw, leaf_radius_range=tuple(raw["leaf_radius_range"]))
        if "spline_samples" in raw:
            raw = dict(raw, spline_samples=int(raw["spline_samples"]))
        return replace(defaults, **raw)


def branch_angle(params: LayoutParams, band: int) -> float:
    """Degrees from vertical of the band's main branch."""
    return max(params.min_branch_angle, params.branch_base_angle - band * params.angle_sharpen)


def seg2_length(params: LayoutParams, band: int) -> float:
    return params.seg2_base_length * params.seg2_shrink ** band


def anchor_y(params: LayoutParams, band: int) -> float:
    return params.base_rise + band * (params.band_height + params.main_branch_gap)


@dataclass(frozen=True)
class OrderedTies:
    sequence: tuple[TieChannelValues, ...]

    def base_index(self, tie_id: str) -> int:
        for i, t in enumerate(self.sequence):
            if t.tie == tie_id:
                return i
        raise UnknownTie(tie_id)


_BRANCH_BELOW_FIRST = {"below": 0, "above": 1}
_BRANCH_ABOVE_FIRST = {"above": 0, "below": 1}


def order_ties(resolved) -> OrderedTies:
    lefts = sorted(
        (t for t in resolved if t.side == "left"),
        key=lambda t: (t.band, _BRANCH_BELOW_FIRST[t.branch_side], t.tie),
    )
    rights = sorted(
        (t for t in resolved if t.side == "right"),
        key=lambda t: (-t.band, _BRANCH_ABOVE_FIRST[t.branch_side], t.tie),
    )
    return OrderedTies(tuple(lefts) + tuple(rights))


@dataclass(frozen=True)
class TieSkeleton:
    tie: str
    side: str
    band: int
    branch_side: str
    base_index: int
    rank: int
    points: tuple[Pt, ...]  # 6 points, 5 segments


@dataclass(frozen=True)
class BranchAxis:
    side: str
    band: int
    anchor: Pt
    direction: Pt  # unit vector


@dataclass(frozen=True)
class Skeleton:
    ties: tuple[TieSkeleton, ...]
    axes: tuple[BranchAxis, ...]

    def axis(self, side: str, band: int) -> BranchAxis:
        for a in self.axes:
            if a.side == side and a.band == band:
                return a
        raise KeyError((side, band))

    def tie(self, tie_id: str) -> TieSkeleton:
        for t in self.ties:
            if t.tie == tie_id:
                return t
        raise UnknownTie(tie_id)


def _up_perp(d: Pt) -> Pt:
    """The unit perpendicular of d whose y component points up."""
    a = (d[1], -d[0])
    return a if a[1] > 0 or (a[1] == 0 and a[0] > 0) else (-d[1], d[0])


def _rotate_toward(d: Pt, perp: Pt, degrees: float) -> Pt:
    rad = math.radians(degrees)
    c, s = math.cos(rad), math.sin(rad)
    return (c * d[0] + s * perp[0], c * d[1] + s * perp[1])


def build_skeleton(ordered: OrderedTies, leaf_counts, params: LayoutParams) -> Skeleton:
    """Five-segment polylines plus one shared axis per (side, band)."""
    seq = ordered.sequence
    n_left = sum(1 for t in seq if t.side == "left")
    center_offset = (n_left - 0.5) * params.line_spacing

    groups: dict[tuple[str, int], list[int]] = {}
    for i, t in enumerate(seq):
        groups.setdefault((t.side, t.band), []).append(i)

    axes = []
    for (side, band), members in sorted(groups.items()):
        theta = math.radians(branch_angle(params, band))
        sign = -1.0 if side == "left" else 1.0
        direction = (sign * math.sin(theta), math.cos(theta))
        mean_x = sum(i * params.line_spacing - center_offset for i in members) / len(members)
        axes.append(BranchAxis(side, band, (mean_x, anchor_y(params, band)), direction))
    axis_by_key = {(a.side, a.band): a for a in axes}

    ties = []
    for (side, band), members in sorted(groups.items()):
        axis = axis_by_key[(side, band)]
        direction = axis.direction
        up = _up_perp(direction)
        length2 = seg2_length(params, band)
        top = anchor_y(params, band)
        for rank, i in enumerate(members):
            t = seq[i]
            x = i * params.line_spacing - center_offset
            p0 = (x, 0.0)
            p1 = (x, top)
            p2 = (p1[0] + length2 * direction[0], p1[1] + length2 * direction[1])
            branch_sign = 1.0 if t.branch_side == "above" else -1.0
            run = rank * params.seg3_step
            p3 = (p2[0] + run * direction[0] + branch_sign * params.stroke_width * up[0],
                  p2[1] + run * direction[1] + branch_sign * params.stroke_width * up[1])
            twig_dir = _rotate_toward(direction, (branch_sign * up[0], branch_sign * up[1]), params.seg4_angle)
            p4 = (p3[0] + params.seg4_length * twig_dir[0], p3[1] + params.seg4_length * twig_dir[1])
            leaf_count = leaf_counts.get(t.tie, 0)
            length5 = max(params.seg5_min, leaf_count * params.seg5_per_leaf)
            p5 = (p4[0] + length5 * twig_dir[0], p4[1] + length5 * twig_dir[1])
            ties.append(TieSkeleton(t.tie, side, band, t.branch_side, i, rank,
                                    (p0, p1, p2, p3, p4, p5)))

    ties.sort(key=lambda s: s.base_index)
    return Skeleton(tuple(ties), tuple(axes))


@dataclass(frozen=True)
class LeafGlyph:
    contact: str
    tie: str
    center: Pt
    angle: float  # degrees, counter-clockwise from +x, y-up frame
    radius: float
    darkness: float


@dataclass(frozen=True)
class FruitGlyph:
    tie: str
    center: Pt
    radius: float


@dataclass(frozen=True)
class BirdGlyph:
    kind: str
    position: Pt
    slot: int
    side: str


def _twig_frame(sk: TieSkeleton):
    p4, p5 = sk.points[4], sk.points[5]
    dx, dy = p5[0] - p4[0], p5[1] - p4[1]
    length = math.hypot(dx, dy)
    d = (dx / length, dy / length)
    return p4, d, length


def place_adornments(skeleton: Skeleton, leaves_by_tie, fruit_counts, params: LayoutParams):
    """Leaf and fruit glyphs for every tie in the skeleton.

    Leaves are sorted by their order key (ties broken by contact id) and laid
    along the last segment; when they would overrun it the spacing is
    compressed so every contact stays visible. Fruits always hang under the
    twig near its start.
    """
    known = {t.tie for t in skeleton.ties}
    for tie_id in leaves_by_tie:
        if tie_id not in known:
            raise UnknownTie(tie_id)
    for tie_id in fruit_counts:
        if tie_id not in known:
            raise UnknownTie(tie_id)

    rad_lo, rad_hi = params.leaf_radius_range
    leaf_glyphs = []
    fruit_glyphs = []
    for sk in skeleton.ties:
        start, d, length5 = _twig_frame(sk)
        up = _up_perp(d)
        down = (-up[0], -up[1])
        # +1 when `up` is the counter-clockwise perpendicular of d
        ccw_up = 1.0 if (d[0] * up[1] - d[1] * up[0]) > 0 else -1.0
        twig_angle = math.degrees(math.atan2(d[1], d[0]))

        leaves = sorted(leaves_by_tie.get(sk.tie, ()), key=lambda lv: (lv.order_key, lv.contact))
        if leaves:
            spacing = params.leaf_spacing
            if len(leaves) > 1 and (len(leaves) - 1) * spacing > length5:
                spacing = length5 / (len(leaves) - 1)
            for i, leaf in enumerate(leaves):
                if leaf.side == "above":
                    above = True
                elif leaf.side == "below":
                    above = False
                else:
                    above = i % 2 == 0
                attach = (start[0] + i * spacing * d[0], start[1] + i * spacing * d[1])
                angle = twig_angle + (LEAF_TILT_DEG if above else -LEAF_TILT_DEG) * ccw_up
                radius = rad_lo + leaf.size * (rad_hi - rad_lo)
                out = math.radians(angle)
                center = (attach[0] + radius * math.cos(out), attach[1] + radius * math.sin(out))
                leaf_glyphs.append(LeafGlyph(leaf.contact, sk.tie, center, angle, radius, leaf.darkness))

        count = fruit_counts.get(sk.tie, 0)
        for j in range(count):
            along = params.fruit_radius * (1.0 + 2.5 * j)
            attach = (start[0] + along * d[0], start[1] + along * d[1])
            hang = params.fruit_radius * 1.2
            center = (attach[0] + hang * down[0], attach[1] + hang * down[1])
            fruit_glyphs.append(FruitGlyph(sk.tie, center, params.fruit_radius))

    return tuple(leaf_glyphs), tuple(fruit_glyphs)


def place_ego_glyph(ego_channels, skeleton: Skeleton, params: LayoutParams) -> tuple[BirdGlyph, ...]:
    """Bird marker(s) level with the ego's band, clear of that band's geometry."""
    band = ego_channels.band
    if not 0 <= band < ego_channels.band_count:
        raise BandOutOfRange(f"band {band} outside 0..{ego_channels.band_count - 1}")
    y = anchor_y(params, band)
    sign = -1.0 if ego_channels.side == "left" else 1.0
    half_slab = (params.band_height + params.main_branch_gap) / 2.0
    widest = 0.0
    for sk in skeleton.ties:
        for px, py in sk.points:
            if px * sign >= 0 and abs(py - y) <= half_slab:
                widest = max(widest, abs(px))
    birds = []
    for slot in range(ego_channels.count):
        x = sign * (widest + params.bird_margin + slot * params.bird_spacing)
        birds.append(BirdGlyph("bird", (x, y), slot, ego_channels.side))
    return tuple(birds)


def smooth_lines(skeleton: Skeleton, params: LayoutParams) -> tuple[tuple[CubicPiece, ...], ...]:
    return tuple(smooth_polyline(sk.points, params.spline_samples) for sk in skeleton.ties)


@dataclass(frozen=True)
class Curve:
    tie: str
    chain: tuple[CubicPiece, ...]
    stroke_width: float
    color: str
    side: str
    band: int
    branch_side: str
    fruit_count: int
    attributes: dict


@dataclass(frozen=True)
class SceneMeta:
    ego: str
    period: str | None
    mapping_name: str
    excluded_ties: tuple[tuple[str, str], ...] = ()
    excluded_contacts: tuple[tuple[str, str], ...] = ()
    ego_glyph_note: str | None = None


Rect = tuple[float, float, float, float]


@dataclass(frozen=True)
class SceneGraph:
    meta: SceneMeta
    curves: tuple[Curve, ...]
    leaves: tuple[LeafGlyph, ...]
    fruits: tuple[FruitGlyph, ...]
    glyphs: tuple[BirdGlyph, ...]
    legend: LegendModel
    bounds: Rect


def _legend_rect(legend: LegendModel, geo: Rect | None) -> Rect:
    w, h = legend.block_width, legend.block_height
    if geo is None:
        cx, y_top = 0.0, 0.0
    else:
        cx, y_top = (geo[0] + geo[2]) / 2.0, geo[1] - LEGEND_GAP
    return (cx - w / 2.0, y_top - h, cx + w / 2.0, y_top)


def _merge(geo: Rect | None, xs, ys) -> Rect | None:
    xs, ys = list(xs), list(ys)
    if not xs:
        return geo
    r = (min(xs), min(ys), max(xs), max(ys))
    if geo is None:
        return r
    return (min(geo[0], r[0]), min(geo[1], r[1]), max(geo[2], r[2]), max(geo[3], r[3]))


def scene_bounds(curves, leaves, fruits, glyphs, legend: LegendModel) -> Rect:
    geo: Rect | None = None
    for c in curves:
        pts = [p for piece in c.chain for p in piece]
        geo = _merge(geo, (p[0] for p in pts), (p[1] for p in pts))
    for g in leaves:
        geo = _merge(geo, (g.center[0] - g.radius, g.center[0] + g.radius),
                     (g.center[1] - g.radius, g.center[1] + g.radius))
    for g in fruits:
        geo = _merge(geo, (g.center[0] - g.radius, g.center[0] + g.radius),
                     (g.center[1] - g.radius, g.center[1] + g.radius))
    for g in glyphs:
        geo = _merge(geo, (g.position[0] - BIRD_HALF, g.position[0] + BIRD_HALF),
                     (g.position[1] - BIRD_HALF, g.position[1] + BIRD_HALF))
    lrect = _legend_rect(legend, geo)
    return _merge(geo, (lrect[0], lrect[2]), (lrect[1], lrect[3]))


def layout_tree(diary: Diary, ego_id: str, period: Period | None, spec: MappingSpec,
                params: LayoutParams | None = None, norms_override: Norms | None = None) -> SceneGraph:
    """Full pipeline for one ego: filter, resolve, order, draw, smooth."""
    params = params or LayoutParams()
    ego = diary.ego(ego_id)
    if ego is None:
        raise UnknownEgo(f"unknown ego {ego_id!r}")
    report = validate_mapping(spec, diary.schema)
    if not report.ok:
        raise InvalidMapping(report)

    resolved = []
    tie_records = {}
    excluded_ties = []
    for tie in diary.ties_of(ego_id):
        try:
            channels = resolve_tie_channels(spec, tie)
        except MappingError as exc:
            excluded_ties.append((tie.id, str(exc)))
            continue
        resolved.append(channels)
        tie_records[tie.id] = tie

    contact_sources = [spec.leaf_order, spec.leaf_size_source, spec.leaf_darkness_source]
    if spec.leaf_side.mode == "predicate":
        contact_sources.append(spec.leaf_side.source)

    candidates = []
    excluded_contacts = []
    for channels in resolved:
        for contact in diary.contacts_of(channels.tie):
            if period is not None:
                when = contact.attributes.get("date")
                if when is None:
                    excluded_contacts.append((contact.id, "no date to match the period"))
                    continue
                if not period.contains(when):
                    continue
            missing = [s for s in contact_sources if s not in contact.attributes]
            if missing:
                excluded_contacts.append((contact.id, f"missing attribute(s): {', '.join(missing)}"))
                continue
            candidates.append(contact)

    if norms_override is not None:
        norms = norms_override
    else:
        sizes = [float(c.attributes[spec.leaf_size_source]) for c in candidates]
        norms = Norms(min(sizes), max(sizes)) if sizes else Norms()

    leaves_by_tie: dict[str, list[LeafChannelValues]] = {}
    for contact in candidates:
        try:
            leaf = resolve_contact_channels(spec, contact, norms)
        except MappingError as exc:
            excluded_contacts.append((contact.id, str(exc)))
            continue
        leaves_by_tie.setdefault(contact.tie, []).append(leaf)

    ordered = order_ties(resolved)
    leaf_counts = {tie_id: len(items) for tie_id, items in leaves_by_tie.items()}
    skeleton = build_skeleton(ordered, leaf_counts, params)
    fruit_counts = {t.tie: t.fruit_count for t in resolved}
    leaf_glyphs, fruit_glyphs = place_adornments(skeleton, leaves_by_tie, fruit_counts, params)

    glyph_note = None
    birds: tuple[BirdGlyph, ...] = ()
    if spec.ego_glyph is not None:
        try:
            ego_channels = resolve_ego_channels(spec, ego.id, ego.attributes)
            birds = place_ego_glyph(ego_channels, skeleton, params)
        except MappingError as exc:
            glyph_note = f"ego glyph omitted: {exc}"

    chains = smooth_lines(skeleton, params)
    band_count = spec.trunk_position.band_count
    by_tie = {t.tie: t for t in resolved}
    curves = tuple(
        Curve(
            tie=sk.tie,
            chain=chain,
            stroke_width=params.stroke_width,
            color=trunk_color(sk.band, band_count),
            side=sk.side,
            band=sk.band,
            branch_side=sk.branch_side,
            fruit_count=by_tie[sk.tie].fruit_count,
            attributes=encode_attributes(tie_records[sk.tie].attributes),
        )
        for sk, chain in zip(skeleton.ties, chains)
    )

    scales = {e.name: e.scale for e in diary.schema.for_entity("tie") if e.kind == "ordinal"}
    legend = legend_for(spec, scales)
    leaves = tuple(sorted(leaf_glyphs, key=lambda g: g.contact))
    bounds = scene_bounds(curves, leaves, fruit_glyphs, birds, legend)

    meta = SceneMeta(
        ego=ego_id,
        period=period.label() if period is not None else None,
        mapping_name=spec.name,
        excluded_ties=tuple(sorted(excluded_ties)),
        excluded_contacts=tuple(sorted(excluded_contacts)),
        ego_glyph_note=glyph_note,
    )
    return SceneGraph(meta, curves, leaves, fruit_glyphs, birds, legend, bounds)
