"""Multi-currency preference dynamics on bilateral trade networks."""

from .backends import compiled_available, get_kernels
from .centrality import GoogleMatrix, RankVector, cheirank, google_matrix, pagerank, power_iteration
from .config import CurrencyConfig, config_from_mapping, load_config
from .countries import COUNTRY_NAMES, KNOWN_CODES, CountryIndex, check_code
from .dynamics import (
    ScoreVector,
    SteadyResult,
    TcpState,
    TradeCoupling,
    WeightVectors,
    currency_scores,
    draw_initial_prefs,
    init_state,
    is_fixed_point,
    run_to_steady,
    seed_assignment,
    sweep,
    update_country,
    weight_vectors,
)
from .ensemble import (
    EnsembleResult,
    EnsembleSpec,
    GroupReport,
    ScoreHistogram,
    ScoreTable,
    SensitivityReport,
    group_membership,
    group_report,
    initial_condition_sensitivity,
    run_ensemble,
    score_histogram,
    seed_volume_fractions,
    ternary_coordinates,
    volume_fractions,
)
from .errors import FrozenCountryError, ParameterError, PowerIterationError, TradeDataError
from .flows import (
    FlowRecord,
    FlowStatistics,
    TradeMatrix,
    flow_statistics,
    load_trade_flows,
    load_trade_flows_csv,
    read_flow_csv,
    total_exports,
    total_imports,
    years_in_csv,
)
from .synthetic import synthetic_wtn
from .ternary import render_ternary, ternary_point

__version__ = "0.1.0"

__all__ = [
    "COUNTRY_NAMES",
    "CountryIndex",
    "CurrencyConfig",
    "EnsembleResult",
    "EnsembleSpec",
    "FlowRecord",
    "FlowStatistics",
    "FrozenCountryError",
    "GoogleMatrix",
    "GroupReport",
    "KNOWN_CODES",
    "ParameterError",
    "PowerIterationError",
    "RankVector",
    "ScoreHistogram",
    "ScoreTable",
    "ScoreVector",
    "SensitivityReport",
    "SteadyResult",
    "TcpState",
    "TradeCoupling",
    "TradeDataError",
    "TradeMatrix",
    "WeightVectors",
    "check_code",
    "cheirank",
    "compiled_available",
    "config_from_mapping",
    "currency_scores",
    "draw_initial_prefs",
    "flow_statistics",
    "get_kernels",
    "google_matrix",
    "group_membership",
    "group_report",
    "init_state",
    "initial_condition_sensitivity",
    "is_fixed_point",
    "load_config",
    "load_trade_flows",
    "load_trade_flows_csv",
    "pagerank",
    "power_iteration",
    "read_flow_csv",
    "render_ternary",
    "run_ensemble",
    "run_to_steady",
    "score_histogram",
    "seed_assignment",
    "seed_volume_fractions",
    "sweep",
    "synthetic_wtn",
    "ternary_coordinates",
    "ternary_point",
    "total_exports",
    "total_imports",
    "update_country",
    "volume_fractions",
    "weight_vectors",
    "years_in_csv",
    "__version__",
]
