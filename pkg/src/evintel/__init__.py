"""Evidential intelligence analysis: conflict-based clustering of uncertain
reports, graded membership, posteriors over the number of events, track-graph
analysis, and rho-interval decision support."""

from .cluster import (
    DomainPrior,
    EvidenceCorpus,
    MetaConflictReport,
    Partition,
    Report,
    SearchConfig,
    cluster_conflict,
    domain_conflict,
    exhaustive_search,
    make_partition,
    metaconflict,
    partition_search,
)
from .decide import (
    DecisionMaker,
    RhoSegmentation,
    UtilityBpa,
    UtilityIntervalChoice,
    expected_interval,
    game_preferences,
    rho_segmentation,
    sequential_play,
)
from .ds import (
    FocalSet,
    Frame,
    MassFunction,
    TotalConflictError,
    ValidationError,
    combine_all,
    combine_dempster,
    discount,
    make_mass,
    query_bel_pls,
    vacuous,
)
from .pipeline import (
    PipelineConfig,
    PipelineResult,
    StageError,
    ingest_corpus,
    run_pipeline,
)
from .posterior import (
    CountingBpa,
    PosteriorDistribution,
    counting_bpa,
    posterior_distribution,
    subset_support,
)
from .scenario import ScenarioConfig, generate_scenario
from .specify import (
    NEW_BLOCK,
    MembershipEvidence,
    MembershipSpecification,
    discounted_view,
    membership_evidence,
    specify_corpus,
)
from .tracks import (
    TrackAnalysis,
    TrackGraph,
    TrackVertex,
    best_path_dp,
    combine_oracle,
    dot_export,
    kinematic_edge_mass,
    kinematic_graph,
    path_plausibility,
)

__all__ = [name for name in dir() if not name.startswith("_")]
