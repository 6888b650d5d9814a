"""Ground-state physics of the non-Hermitian XY chain in a complex transverse field."""

from .contractions import Backend, ContractionTable, Convention, contraction_g, contraction_table
from .correlation import correlator_curve, correlator_x, log_fit, scaling_fit
from .entanglement import build_gamma, entanglement_entropy, entropy, entropy_curve
from .errors import NhxyError
from .model import ModelParams, PhaseLabel, classify_phase, ground_energy, solve_mode, solve_modes
from .spectrum import band_extrema, critical_mode, full_bands, u1_symmetry_deviation
from .topology import ep_reference, winding_number

__all__ = [
    "Backend", "ContractionTable", "Convention", "contraction_g", "contraction_table",
    "correlator_curve", "correlator_x", "log_fit", "scaling_fit",
    "build_gamma", "entanglement_entropy", "entropy", "entropy_curve",
    "NhxyError",
    "ModelParams", "PhaseLabel", "classify_phase", "ground_energy", "solve_mode", "solve_modes",
    "band_extrema", "critical_mode", "full_bands", "u1_symmetry_deviation",
    "ep_reference", "winding_number",
]
