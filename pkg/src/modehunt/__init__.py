"""Mode counting for noisy signals via Kolmogorov and persistence signatures."""

from .kolmsig import Classification, IntervalNode, MergeCandidate, classify, kolmogorov_signatures, merge_value
from .persistence1d import PersistencePair, persistence_pairs, persistence_signatures, sup_mode_estimate
from .signal import (Antiderivative, SignatureSequence, StepSignal, antiderivative, kolmogorov_distance,
                     mode_count, signature_at, sup_distance)
from .stats import (GaussianModel, ModeCI, MomentModel, confidence_band, detection_bound, deviation_bound,
                    gevl_constants, holder_bound, mode_ci, mode_estimate, monotone_sup_fit, tau, tau_gauss)
from .tautstring import TautString, Tube, min_modes_in_ball, signature_oracle, taut_derivative, taut_string

__all__ = [
    "Antiderivative", "Classification", "GaussianModel", "IntervalNode", "MergeCandidate", "ModeCI",
    "MomentModel", "PersistencePair", "SignatureSequence", "StepSignal", "TautString", "Tube",
    "antiderivative", "classify", "confidence_band", "detection_bound", "deviation_bound",
    "gevl_constants", "holder_bound", "kolmogorov_distance", "kolmogorov_signatures", "merge_value",
    "min_modes_in_ball", "mode_ci", "mode_count", "mode_estimate", "monotone_sup_fit",
    "persistence_pairs", "persistence_signatures", "signature_at", "signature_oracle",
    "sup_distance", "sup_mode_estimate", "taut_derivative", "taut_string", "tau", "tau_gauss",
]
