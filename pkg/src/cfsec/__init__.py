"""Weak-secrecy rates for the multi-way untrusted relay channel with compute-and-forward."""

__version__ = "0.1.0"

from .errors import CFSecError, InvalidArgumentError, SearchError, UnrecoverableError
from .channel import (ChannelMatrix, MisoUserChannels, PowerAllocation, PowerBudget,
                      effective_channel, miso_collapse)
from .cf_rate import (computation_rate, computation_rate_with_b, siso_closed_form_rate,
                      optimal_preprocessing)
from .coeff_search import (SearchResult, best_coefficient_matrix, brute_force_best,
                           enumerate_candidates)
from .capacity import downlink_multicast_rate, mac_region_2user, mac_sum_capacity
from .secrecy import (RateReport, TwoWayBaselines, baseline_rates, secrecy_rate,
                      twoway_jammer_rate)
from .power_alloc import GridSpec, optimize_power

__all__ = [
    "CFSecError", "InvalidArgumentError", "SearchError", "UnrecoverableError",
    "ChannelMatrix", "MisoUserChannels", "PowerAllocation", "PowerBudget",
    "effective_channel", "miso_collapse",
    "computation_rate", "computation_rate_with_b", "siso_closed_form_rate", "optimal_preprocessing",
    "SearchResult", "best_coefficient_matrix", "brute_force_best", "enumerate_candidates",
    "downlink_multicast_rate", "mac_region_2user", "mac_sum_capacity",
    "RateReport", "TwoWayBaselines", "baseline_rates", "secrecy_rate", "twoway_jammer_rate",
    "GridSpec", "optimize_power",
]
