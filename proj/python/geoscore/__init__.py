"""Simplex scoring of ordinal assessment outcomes and Monte-Carlo geometric scores."""

from ._geoscore import (  # noqa: F401
    AggregateProfile,
    AreaPopulation,
    ContractViolation,
    EnumerationCapExceeded,
    GeoscoreError,
    IntegrityError,
    ParseError,
    ValidationError,
    competition_ranks,
    cumulative_map,
    delta,
    delta_path_oracle,
    delta_unit,
    draw_ideal,
    draw_stratum,
    exact_geometric_score,
    frequencies,
    geometric_score,
    hoeffding_bound,
    hoeffding_half_width,
    hoeffding_replicates,
    minkowski_identity_check,
    pseudo_distance,
    r_score,
    same_score_class,
    weights_preset,
)

__version__ = "0.1.0"
