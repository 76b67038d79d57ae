"""Rate-splitting cell-free massive MIMO downlink simulator with channel aging."""

from .scenario import (  # noqa: F401
    Layout,
    LinkStatistics,
    PathLossParams,
    ScenarioConfig,
    VelocityProfile,
    build_correlation,
    drop_layout,
    link_statistics,
    path_loss,
)
from .channel import (  # noqa: F401
    AgingCoefficients,
    ChannelState,
    NetworkCsi,
    aging_coefficients,
    bessel_j0,
    draw_initial,
    network_csi,
    realize_channels,
    temporal_correlation,
)
from .se import closed_form_sum_se, se_samples, sum_se_monte_carlo  # noqa: F401
from .maxmin import BisectionResult, bisection_common  # noqa: F401
from .harness import (  # noqa: F401
    SweepSpec,
    build_scenario,
    run_sweep,
    validate_closed_form,
    write_csv,
    write_timing,
)

__version__ = "0.1.0"
