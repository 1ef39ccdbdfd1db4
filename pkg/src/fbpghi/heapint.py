"""Magnitude-ordered heap integration of phase gradients.

The integration walks the coefficient grid from loud cells to quiet ones:
cells above a relative magnitude tolerance form the significant set, a max
heap keyed by magnitude picks the next cell, and each unvisited significant
neighbor receives its phase by a trapezoidal step of the corresponding
gradient component (time steps of a/sample_rate seconds, frequency steps of
the actual channel spacing). Disconnected significant regions are anchored
independently at phase 0; insignificant cells get reproducible random
phases.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass

import numpy as np

from .core import RealSignal, check_grid
from .errors import ParameterError
from .filterbank import FilterBank, synthesize
from .gradient import GradientField, estimate_phase_gradients


@dataclass(frozen=True)
class SignificanceMask:
    """Cells loud enough to integrate; abstol = tol * max(magnitude)."""

    mask: np.ndarray
    abstol: float


def significant_set(m, tol) -> SignificanceMask:
    """Cells with magnitude strictly above tol * max(m)."""
    m = check_grid(m, "magnitude")
    if not 0 < tol < 1:
        raise ParameterError("tol must be in (0, 1)")
    abstol = tol * float(m.max())
    mask = m > abstol
    if not mask.any():
        warnings.warn("no significant cells; the phase estimate will be fully random")
    return SignificanceMask(mask=mask, abstol=abstol)


def integrate_time_step(phase, d_here, d_there, a, sample_rate, direction=1):
    """Trapezoidal phase step to the time neighbor n + direction."""
    return phase + direction * (a / sample_rate) * 0.5 * (d_here + d_there)


def integrate_freq_step(phase, d_here, d_there, xi_here, xi_there):
    """Trapezoidal phase step to an adjacent channel, honoring its spacing."""
    return phase + (xi_there - xi_here) * 0.5 * (d_here + d_there)


def random_phase_fill(shape, seed):
    """Uniform phases in (-pi, pi] from a counter-based generator.

    Values depend only on (seed, cell index), not on any iteration order.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    return np.pi - 2.0 * np.pi * rng.random(shape)


def fbpghi(m, grads: GradientField, centers, a, sample_rate, tol=1e-7, seed=0,
           instrument=None):
    """Phase estimate from magnitudes and a gradient field, shape (N, K).

    Implements heap integration: while unprocessed significant cells remain,
    anchor the loudest one at phase 0, then repeatedly pop the loudest
    heaped cell and integrate into its significant neighbors. ``instrument``
    (a list, if given) collects ("seed"|"pop"|"push", n, k, magnitude)
    events for inspection.
    """
    m = check_grid(m, "magnitude")
    if grads.d_time.shape != m.shape:
        raise ParameterError("gradient field does not match the magnitude grid")
    centers = np.asarray(centers, dtype=np.float64)
    if centers.shape[0] != m.shape[1]:
        raise ParameterError("centers do not match the grid width")
    n_frames, n_channels = m.shape
    sig = significant_set(m, tol)

    phase = random_phase_fill(m.shape, seed)
    todo = sig.mask.copy()
    remaining = int(todo.sum())
    d_time = grads.d_time
    d_freq = grads.d_freq
    dt = a / sample_rate
    heap = []

    def push(n, k):
        heapq.heappush(heap, (-m[n, k], n, k))
        if instrument is not None:
            instrument.append(("push", n, k, m[n, k]))

    while remaining > 0:
        if not heap:
            flat = int(np.argmax(np.where(todo, m, -1.0)))
            n0, k0 = divmod(flat, n_channels)
            phase[n0, k0] = 0.0
            todo[n0, k0] = False
            remaining -= 1
            push(n0, k0)
            if instrument is not None:
                instrument.append(("seed", n0, k0, m[n0, k0]))
        while heap:
            neg_mag, n, k = heapq.heappop(heap)
            if instrument is not None:
                instrument.append(("pop", n, k, -neg_mag))
            if n + 1 < n_frames and todo[n + 1, k]:
                phase[n + 1, k] = phase[n, k] + dt * 0.5 * (d_time[n + 1, k] + d_time[n, k])
                todo[n + 1, k] = False
                remaining -= 1
                push(n + 1, k)
            if n > 0 and todo[n - 1, k]:
                phase[n - 1, k] = phase[n, k] - dt * 0.5 * (d_time[n - 1, k] + d_time[n, k])
                todo[n - 1, k] = False
                remaining -= 1
                push(n - 1, k)
            if k + 1 < n_channels and todo[n, k + 1]:
                phase[n, k + 1] = phase[n, k] + (centers[k + 1] - centers[k]) * 0.5 * (
                    d_freq[n, k + 1] + d_freq[n, k])
                todo[n, k + 1] = False
                remaining -= 1
                push(n, k + 1)
            if k > 0 and todo[n, k - 1]:
                phase[n, k - 1] = phase[n, k] - (centers[k] - centers[k - 1]) * 0.5 * (
                    d_freq[n, k - 1] + d_freq[n, k])
                todo[n, k - 1] = False
                remaining -= 1
                push(n, k - 1)
    return phase


def reconstruct(m, fb: FilterBank, tol=1e-7, seed=0) -> RealSignal:
    """Magnitude-only reconstruction: estimate gradients, integrate, synthesize."""
    m = check_grid(m, "magnitude")
    if m.shape != (fb.N, fb.K):
        raise ParameterError(f"magnitude shape {m.shape} does not match ({fb.N}, {fb.K})")
    if m.max() == 0:
        return RealSignal(np.zeros(fb.L), fb.sample_rate)
    grads = estimate_phase_gradients(m, fb.centers, fb.gammas, fb.a, fb.sample_rate)
    phase = fbpghi(m, grads, fb.centers, fb.a, fb.sample_rate, tol=tol, seed=seed)
    return synthesize(fb, m * np.exp(1j * phase))
