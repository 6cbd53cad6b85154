"""Qubit teleportation over pure and X-state channels, with unambiguous
state extraction (USE) and Haar-averaged fidelities."""

from .channels import (
    PureChannel,
    XState,
    general_concurrence,
    make_pure_channel,
    make_x_state,
    pure_concurrence,
    x_concurrence,
)
from .fidelity import (
    CLASSICAL_BOUND,
    FidelityEstimate,
    HaarSampler,
    average_fidelity,
    closed_f_p,
    closed_f_p_use,
    closed_f_x,
    closed_f_x_use,
    closed_f_x_use_failure,
    closed_f_x_use_success,
    fidelity_qubit,
    sample_haar,
)
from .qmath import PureState2
from .teleport import teleport_bruteforce, teleport_pure_closed, teleport_x_closed
from .thresholds import compute_thresholds, threshold_inversion_region
from .use_extract import build_use_unitaries, use_bruteforce, use_pure, use_x_closed

__version__ = "0.1.0"
