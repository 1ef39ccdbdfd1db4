"""Phase reconstruction for Gaussian filter banks.

Analysis coefficients of audio-like signals with respect to scale-adapted
Gaussian filter banks carry a tight link between the phase gradient and the
log-magnitude. This package builds such banks, reconstructs phase from
magnitudes alone by heap-ordered gradient integration, inverts the analysis
by conjugate gradients on the frame operator, and ships a fast Griffin-Lim
baseline plus an evaluation harness.
"""

from .baseline import FglaTrace, fgla, project_consistent, replace_magnitude
from .core import RealSignal, gaussian_spectrum, principal_angle, unitary_dft
from .errors import (ConfigurationError, DegenerateInputError,
                     FrameConditioningError, ParameterError)
from .experiment import BANK_PRESETS, EvalReport, bank_spec_from_preset, run_experiment
from .filterbank import (FilterBank, FrameBounds, analyze, build_filterbank,
                         estimate_frame_bounds, frame_operator_apply,
                         redundancy, synthesize)
from .gradient import (GradientField, diff_freq, diff_time,
                       estimate_phase_gradients, gamma_derivative,
                       log_magnitude, oracle_phase_gradients)
from .heapint import (SignificanceMask, fbpghi, integrate_freq_step,
                      integrate_time_step, reconstruct, significant_set)
from .metrics import phase_difference_map, spectral_difference
from .scales import FilterBankSpec, FrequencyScale, bandwidths, center_frequencies
from .signals import SignalKind, exp_chirp, gen_signal
from .wavio import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "BANK_PRESETS", "ConfigurationError", "DegenerateInputError", "EvalReport",
    "FglaTrace", "FilterBank", "FilterBankSpec", "FrameBounds",
    "FrameConditioningError", "FrequencyScale", "GradientField",
    "ParameterError", "RealSignal", "SignalKind", "SignificanceMask",
    "analyze", "bandwidths", "bank_spec_from_preset", "build_filterbank",
    "center_frequencies", "diff_freq", "diff_time", "estimate_frame_bounds",
    "estimate_phase_gradients", "exp_chirp", "fbpghi", "fgla",
    "frame_operator_apply", "gamma_derivative", "gaussian_spectrum",
    "gen_signal", "integrate_freq_step", "integrate_time_step",
    "log_magnitude", "oracle_phase_gradients", "phase_difference_map",
    "principal_angle", "project_consistent", "read_wav", "reconstruct",
    "redundancy", "replace_magnitude", "run_experiment", "significant_set",
    "spectral_difference", "synthesize", "unitary_dft", "write_wav",
]
