"""Reconstruction quality metrics."""

from __future__ import annotations

import numpy as np

from .core import check_grid, principal_angle
from .errors import DegenerateInputError, ParameterError

SPECTRAL_FLOOR_DB = -300.0


def spectral_difference(c_ref, c_est) -> float:
    """Relative L2 magnitude mismatch in dB: 20 log10(|| |c_ref| - |c_est| || / ||c_ref||).

    Accepts complex or magnitude grids. A zero numerator is clamped at
    -300 dB; a zero reference is rejected.
    """
    m_ref = np.abs(np.asarray(c_ref))
    m_est = np.abs(np.asarray(c_est))
    if m_ref.shape != m_est.shape:
        raise ParameterError("grids must have equal shapes")
    den = float(np.linalg.norm(m_ref))
    if den == 0:
        raise DegenerateInputError("zero reference grid")
    num = float(np.linalg.norm(m_ref - m_est))
    if num == 0:
        return SPECTRAL_FLOOR_DB
    return max(SPECTRAL_FLOOR_DB, 20.0 * np.log10(num / den))


def phase_difference_map(p_ref, p_est) -> np.ndarray:
    """Per-cell wrapped phase difference divided by pi, in (-1, 1]."""
    p_ref = check_grid(p_ref, "phase")
    p_est = check_grid(p_est, "phase")
    if p_ref.shape != p_est.shape:
        raise ParameterError("phase grids must have equal shapes")
    return principal_angle(p_ref - p_est) / np.pi
