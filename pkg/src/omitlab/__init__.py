"""Loss-induced transparency in a two-resonator optomechanical system.

Steady state, purely optical and OMIT transmission, exceptional and
turning points, group delay, second-order sidebands, and a time-domain
oracle that checks the perturbative results.
"""

__version__ = "0.1.0"

from .params import ProbeSetting, SystemConfig, drive_amplitudes, dump_config, load_config  # noqa: E402
from .steady import SteadyState, solve_steady_state, steady_state_cubic  # noqa: E402
from .optics import (  # noqa: E402
    ModeSpectrum,
    exceptional_point,
    numeric_tp_scan,
    optical_transmission,
    supermode_frequencies,
    turning_point,
)
from .omit import (  # noqa: E402
    FirstOrderCoeffs,
    LinearResponse,
    first_order_coeffs,
    group_delay,
    linear_response,
    probe_transmission,
)
from .sideband import SecondOrderResponse, second_order_amplitude, sideband_efficiency, sideband_spectrum  # noqa: E402
from .effective import effective_linear, effective_second, lit_shift_report  # noqa: E402

__all__ = [
    "SystemConfig",
    "ProbeSetting",
    "drive_amplitudes",
    "load_config",
    "dump_config",
    "SteadyState",
    "solve_steady_state",
    "steady_state_cubic",
    "ModeSpectrum",
    "optical_transmission",
    "turning_point",
    "supermode_frequencies",
    "exceptional_point",
    "numeric_tp_scan",
    "FirstOrderCoeffs",
    "LinearResponse",
    "first_order_coeffs",
    "linear_response",
    "probe_transmission",
    "group_delay",
    "SecondOrderResponse",
    "second_order_amplitude",
    "sideband_efficiency",
    "sideband_spectrum",
    "effective_linear",
    "effective_second",
    "lit_shift_report",
]
