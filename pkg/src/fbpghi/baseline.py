"""Fast Griffin-Lim baseline.

Alternating projections between the set of coefficient grids with the
prescribed magnitudes and the set of grids consistent with some time-domain
signal, with momentum acceleration. Each iteration costs one synthesis and
one analysis; the synthesis CG is warm-started from the previous signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import RealSignal, check_grid
from .errors import ParameterError
from .filterbank import FilterBank, analyze, synthesize
from .heapint import random_phase_fill
from .metrics import spectral_difference


@dataclass(frozen=True)
class FglaTrace:
    """Per-iteration spectral difference against the target magnitudes, in dB."""

    e_spec_db: list[float]
    iterations: int
    alpha: float

    def __post_init__(self):
        if len(self.e_spec_db) != self.iterations:
            raise ParameterError("trace length must equal the iteration count")


def project_consistent(fb: FilterBank, grid, x0=None):
    """Project onto the consistent set: analyze(synthesize(grid)).

    Returns (projected grid, synthesized signal). The signal is returned so
    iterative callers can reuse it (warm starts, final output).
    """
    grid = check_grid(grid, "complex")
    signal = synthesize(fb, grid, x0=x0)
    return analyze(fb, signal), signal


def replace_magnitude(grid, m):
    """Impose magnitudes m on the grid, keeping phases (phase 0 where c = 0)."""
    grid = check_grid(grid, "complex")
    m = check_grid(m, "magnitude")
    if grid.shape != m.shape:
        raise ParameterError("grid and magnitude shapes differ")
    mag = np.abs(grid)
    unit = np.where(mag > 0, grid / np.where(mag > 0, mag, 1.0), 1.0)
    return m * unit


def fgla(m, fb: FilterBank, iterations, alpha=0.99, init=None, seed=0):
    """Fast Griffin-Lim: reconstruct a signal from magnitudes only.

    ``init`` is an initial phase grid; by default phases are drawn uniformly
    from (-pi, pi] with the given seed. The accelerated update is

        t_i = replace_magnitude(project_consistent(c_i))
        c_{i+1} = t_i + alpha * (t_i - t_{i-1})

    Returns the signal synthesized from the final magnitude-corrected grid
    and the per-iteration trace of spectral difference against m.
    """
    m = check_grid(m, "magnitude")
    if m.shape != (fb.N, fb.K):
        raise ParameterError(f"magnitude shape {m.shape} does not match ({fb.N}, {fb.K})")
    if not 0 <= alpha < 1:
        raise ParameterError("alpha must be in [0, 1)")
    if iterations < 1:
        raise ParameterError("need at least one iteration")
    if init is None:
        phase = random_phase_fill(m.shape, seed)
    else:
        phase = check_grid(init, "phase")
        if phase.shape != m.shape:
            raise ParameterError("init phase shape does not match the magnitudes")
    c = m * np.exp(1j * phase)
    t_prev = None
    signal = None
    trace = []
    for _ in range(iterations):
        projected, signal = project_consistent(fb, c, x0=None if signal is None else signal.samples)
        trace.append(spectral_difference(m, projected))
        t = replace_magnitude(projected, m)
        c = t if t_prev is None else t + alpha * (t - t_prev)
        t_prev = t
    out = synthesize(fb, t_prev, x0=signal.samples)
    return out, FglaTrace(e_spec_db=trace, iterations=iterations, alpha=alpha)
