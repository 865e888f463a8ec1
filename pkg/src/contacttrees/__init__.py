"""contacttrees: draw egocentric contact diaries as botanical trees."""

from .diary import (
    AttributeSchema,
    Contact,
    DanglingReference,
    Diary,
    DiaryError,
    DuplicateId,
    Ego,
    MalformedInput,
    Ordinal,
    Period,
    SchemaEntry,
    SchemaViolation,
    Tie,
    ValidationReport,
    canonical_schema,
    diary_stats,
    diary_to_json,
    load_diary,
    parse_diary_csv,
    parse_diary_json,
    validate_diary,
)
from .layout import (
    BandOutOfRange,
    InvalidMapping,
    LayoutParams,
    SceneGraph,
    Skeleton,
    UnknownEgo,
    UnknownTie,
    build_skeleton,
    layout_tree,
    order_ties,
    place_adornments,
    place_ego_glyph,
    smooth_lines,
)
from .mapping import (
    BinningSpec,
    LeafChannelValues,
    MappingSpec,
    MissingAttribute,
    Norms,
    TieChannelValues,
    UnknownPreset,
    bin_value,
    mapping_spec_from_json,
    mapping_spec_to_json,
    preset_mapping,
    resolve_contact_channels,
    resolve_tie_channels,
    validate_mapping,
)
from .render import compose_panels, scene_from_json, scene_to_json, scene_to_svg
from .legend import LegendModel, legend_for
from .style import StyleSheet
from .synth import InvalidProfile, SynthProfile, generate_synthetic_diary, stress_profile

__version__ = "0.1.0"
