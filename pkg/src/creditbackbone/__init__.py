"""Statistically validated backbones of bank-firm credit networks."""

__version__ = "0.1.0"

from .analytics import (  # noqa: E402
    BackboneSummary,
    CreditAccounting,
    DegreeSeries,
    bidirectional_pairs,
    credit_ratio,
    degree_series,
    largest_connected_component,
    summarize,
)
from .disparity import (  # noqa: E402
    Correction,
    CorrectionPolicy,
    DirectedTest,
    K1Policy,
    NtAccounting,
    ValidatedArc,
    apply_correction,
    disparity_pvalue,
    enumerate_tests,
    validated_network,
)
from .errors import ConfigError, DomainError, IngestError, NodeNotFound  # noqa: E402
from .ingest import MergerEvent, Panel, continuity_chain, load_panel, write_panel  # noqa: E402
from .model import AttributeClass, AttributeTable, Edge, EntityId, Side, Snapshot, density, node_strength  # noqa: E402
from .overexpression import AttributeReport, EnrichmentTest, hypergeometric_tail, overexpression_report  # noqa: E402
from .synthgen import GeneratorConfig, generate_panel, write_synthetic  # noqa: E402
from .temporal import JaccardMatrix, LinkLifetime, jaccard_matrix, link_lifetimes, weighted_jaccard  # noqa: E402

__all__ = [
    "#",
    "#",
    "AttributeClass",
    "AttributeReport",
    "AttributeTable",
    "BackboneSummary",
    "ConfigError",
    "Correction",
    "CorrectionPolicy",
    "CreditAccounting",
    "DegreeSeries",
    "DirectedTest",
    "DomainError",
    "E402",
    "E402",
    "Edge",
    "EnrichmentTest",
    "EntityId",
    "GeneratorConfig",
    "IngestError",
    "JaccardMatrix",
    "K1Policy",
    "LinkLifetime",
    "MergerEvent",
    "NodeNotFound",
    "NtAccounting",
    "Panel",
    "Side",
    "Snapshot",
    "ValidatedArc",
    "apply_correction",
    "bidirectional_pairs",
    "continuity_chain",
    "credit_ratio",
    "degree_series",
    "density",
    "disparity_pvalue",
    "enumerate_tests",
    "generate_panel",
    "hypergeometric_tail",
    "jaccard_matrix",
    "largest_connected_component",
    "link_lifetimes",
    "load_panel",
    "node_strength",
    "noqa:",
    "noqa:",
    "overexpression_report",
    "summarize",
    "validated_network",
    "weighted_jaccard",
    "write_panel",
    "write_synthetic",
]
