"""Security dependency analysis over enterprise crypto inventories.

Ingest CSV inventories and an algorithm registry, compile them into a typed
dependency graph, and search it for chains where data classified at one
security level ends up relying on cryptography rated strictly lower.
"""

__version__ = "0.1.0"

from .analysis import (
    Finding,
    HorizonConfig,
    Overlay,
    OverlayError,
    ScoreBreakdown,
    ScoringPolicy,
    apply_overlay,
    check_longevity,
    find_violations,
    parse_overlay,
)
from .ingest import (
    Diagnostic,
    IngestError,
    MappingProfile,
    Severity,
    assemble_bundle,
    builtin_profiles,
    load_bundle,
    load_default_registry,
    parse_profiles,
    parse_registry,
    parse_tabular,
    validate_bundle,
)
from .model import (
    AccessRef,
    AssetKind,
    AssetRecord,
    ClassificationBinding,
    Comparison,
    Configuration,
    CryptoObjectRecord,
    CryptoObjectType,
    CryptoRegistry,
    DataRecord,
    Direction,
    InventoryBundle,
    RatingDimension,
    SecurityRating,
    Source,
    VulnerabilityClass,
    compare_ratings,
)
from .report import GraphStats, ScanReport, render_dot, render_json, render_text
from .rules import (
    DependencyGraph,
    Edge,
    RULES,
    UnknownVertexError,
    Vertex,
    VertexKind,
    build_graph,
    explain_edge,
)

__all__ = [
    "__version__",
    "AccessRef",
    "AssetKind",
    "AssetRecord",
    "ClassificationBinding",
    "Comparison",
    "Configuration",
    "CryptoObjectRecord",
    "CryptoObjectType",
    "CryptoRegistry",
    "DataRecord",
    "DependencyGraph",
    "Diagnostic",
    "Direction",
    "Edge",
    "Finding",
    "GraphStats",
    "HorizonConfig",
    "IngestError",
    "InventoryBundle",
    "MappingProfile",
    "Overlay",
    "OverlayError",
    "RatingDimension",
    "RULES",
    "ScanReport",
    "ScoreBreakdown",
    "ScoringPolicy",
    "SecurityRating",
    "Severity",
    "Source",
    "UnknownVertexError",
    "Vertex",
    "VertexKind",
    "VulnerabilityClass",
    "apply_overlay",
    "assemble_bundle",
    "build_graph",
    "builtin_profiles",
    "check_longevity",
    "compare_ratings",
    "explain_edge",
    "find_violations",
    "load_bundle",
    "load_default_registry",
    "parse_overlay",
    "parse_profiles",
    "parse_registry",
    "parse_tabular",
    "render_dot",
    "render_json",
    "render_text",
    "validate_bundle",
]
