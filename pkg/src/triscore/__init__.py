"""Ternary probabilistic forecasts: projection, scoring geometry,
verification, colour mapping, the Gaussian special case, quadratic
recalibration and SVG rendering."""

from .colors import (
    ColorHSV,
    ColorRGB,
    LegacyRegion,
    PaletteParams,
    assign_color,
    dominant_category,
    hsv_to_rgb,
    information_gain,
    legacy_region,
)
from .datasets import (
    Dataset,
    ForecastRecord,
    pairs_from_dataset,
    parse_csv,
    parse_json,
    resolve_observation,
    resolve_ternary,
    write_json,
)
from .gaussian import (
    GaussianScaled,
    gaussian_to_ternary,
    scale_params,
    std_normal_cdf,
    std_normal_quantile,
    ternary_to_gaussian,
)
from .recalibration import (
    CalibrationReport,
    QuadraticMap,
    apply_map,
    fit_map,
    mean_score_of_map,
    recalibration_report,
)
from .scoring import (
    AffineTernary,
    BaryPoint,
    ScoringRule,
    brier_rule,
    custom_rule,
    from_bary,
    rps_rule,
    score,
    to_bary,
    uncertainty,
)
from .simplex import (
    UNIFORM,
    CategoryThresholds,
    ObsCategory,
    TernaryProb,
    empirical_quantiles,
    ensemble_to_ternary,
    make_ternary,
    ternary_from_cdf,
)
from .svg import (
    RenderConfig,
    render_forecast_map,
    render_palette_legend,
    render_reliability_diagram,
)
from .verification import (
    Bin,
    BinnedStats,
    Decomposition,
    DiagramGeometry,
    ForecastObsPair,
    bin_forecasts,
    decompose,
    decomposition_diagram_geometry,
    skill_radius,
    snap_to_lattice,
)

__version__ = "0.1.0"

__all__ = [
    "AffineTernary", "BaryPoint", "Bin", "BinnedStats", "CalibrationReport",
    "CategoryThresholds", "ColorHSV", "ColorRGB", "Dataset", "Decomposition",
    "DiagramGeometry", "ForecastObsPair", "ForecastRecord", "GaussianScaled",
    "LegacyRegion", "ObsCategory", "PaletteParams", "QuadraticMap",
    "RenderConfig", "ScoringRule", "TernaryProb", "UNIFORM",
    "apply_map", "assign_color", "bin_forecasts", "brier_rule", "custom_rule",
    "decompose", "decomposition_diagram_geometry", "dominant_category",
    "empirical_quantiles", "ensemble_to_ternary", "fit_map", "from_bary",
    "gaussian_to_ternary", "hsv_to_rgb", "information_gain", "legacy_region",
    "make_ternary", "mean_score_of_map", "pairs_from_dataset", "parse_csv",
    "parse_json", "recalibration_report", "render_forecast_map",
    "render_palette_legend", "render_reliability_diagram",
    "resolve_observation", "resolve_ternary", "rps_rule", "scale_params",
    "score", "skill_radius", "snap_to_lattice", "std_normal_cdf",
    "std_normal_quantile", "ternary_from_cdf", "ternary_to_gaussian",
    "to_bary", "uncertainty", "write_json",
]
