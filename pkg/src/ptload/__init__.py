"""Portfolio-theory power loading across OFDM sub-bands under stochastic interference."""

__version__ = "0.1.0"

from .frontier import (  # noqa: E402
    FrontierResult,
    efficient_frontier,
    improvement_ratio,
    refine_max_mean,
    select_max_mean,
    select_min_variance,
    water_filling,
)
from .interference import (  # noqa: E402
    InterferenceMarginal,
    InterferenceModel,
    SampleMatrix,
    interference_moments,
    load_empirical,
    sample_interference,
)
from .numerology import Numerology, SubbandGeometry, carrier_bandwidth, partition_subbands, subcarrier_spacing  # noqa: E402
from .portfolio import (  # noqa: E402
    EvaluatedPortfolio,
    Portfolio,
    ThroughputStats,
    combine_variance,
    evaluate_portfolio,
    sample_portfolios,
    single_band_portfolio,
)
from .radio import LinkScenario, SubbandSpec, sinr, subband_capacity, total_throughput  # noqa: E402
from .report import RunReport, export_cloud, run_frontier, write_report  # noqa: E402
from .scenario import ScenarioFile, load_scenario, write_scenario  # noqa: E402
