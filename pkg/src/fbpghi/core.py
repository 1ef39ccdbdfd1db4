"""Core numeric primitives: signals, coefficient grids, the Gaussian prototype.

Conventions used throughout the package:

* time is measured in seconds, frequency in Hz, phase in radians,
* coefficient grids are N x K arrays with time frames along axis 0 and
  frequency channels along axis 1,
* a complex coefficient is ``c = magnitude * exp(1j * phase)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RealSignal:
    """A finite real-valued signal together with its sample rate in Hz."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        if samples.ndim != 1 or samples.size < 1:
            raise ParameterError("signal must be a nonempty 1-d array")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("signal contains non-finite samples")
        if not self.sample_rate > 0:
            raise ParameterError("sample_rate must be positive")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self):
        """Length in seconds."""
        return self.samples.size / self.sample_rate

    def padded_to_multiple(self, block: int) -> "RealSignal":
        """Zero-pad so the length is divisible by ``block``."""
        if block < 1:
            raise ParameterError("block must be >= 1")
        rem = self.samples.size % block
        if rem == 0:
            return self
        pad = block - rem
        return RealSignal(np.concatenate([self.samples, np.zeros(pad)]), self.sample_rate)


def check_grid(values, kind="complex"):
    """Validate an N x K coefficient grid and return it as an ndarray.

    ``kind`` selects the extra constraint: "complex" (finite), "magnitude"
    (finite and nonnegative) or "phase" (finite real).
    """
    values = np.asarray(values)
    if values.ndim != 2 or values.size == 0:
        raise ParameterError("grid must be a nonempty 2-d array")
    if not np.all(np.isfinite(values)):
        raise ParameterError("grid contains non-finite entries")
    if kind == "magnitude":
        if np.iscomplexobj(values) or np.any(values < 0):
            raise ParameterError("magnitude grid must be real and nonnegative")
        values = values.astype(np.float64, copy=False)
    elif kind == "phase":
        if np.iscomplexobj(values):
            raise ParameterError("phase grid must be real")
        values = values.astype(np.float64, copy=False)
    else:
        values = values.astype(np.complex128, copy=False)
    return values


def unitary_dft(x, direction="forward"):
    """Length-preserving DFT with 1/sqrt(L) normalization both ways."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size < 1:
        raise ParameterError("input must be a nonempty 1-d array")
    if direction == "forward":
        return np.fft.fft(x, norm="ortho")
    if direction == "inverse":
        return np.fft.ifft(x, norm="ortho")
    raise ParameterError(f"unknown direction {direction!r}")


def gaussian_spectrum(freqs, center, gamma, period=None):
    """Frequency response of a Gaussian filter centered at ``center``.

    The response is ``exp(-pi * gamma**2 * (f - center)**2)``, peak-normalized
    to 1 at the center. ``gamma`` is the time dilation in seconds, so the
    half-width at relative height ``exp(-pi)`` is ``1/gamma`` Hz. With
    ``period`` set, the response is periodized; images whose contribution
    stays below double precision are skipped.
    """
    if not gamma > 0:
        raise ParameterError("gamma must be positive")
    freqs = np.asarray(freqs, dtype=np.float64)
    if period is None:
        return np.exp(-np.pi * (gamma * (freqs - center)) ** 2)
    period = float(period)
    if not period > 0:
        raise ParameterError("period must be positive")
    # wrap every grid point to its nearest image, then add farther images
    # until they no longer matter
    d = (freqs - center + 0.5 * period) % period - 0.5 * period
    out = np.exp(-np.pi * (gamma * d) ** 2)
    m = 1
    while np.exp(-np.pi * (gamma * (m - 0.5) * period) ** 2) > 1e-18:
        out += np.exp(-np.pi * (gamma * (d - m * period)) ** 2)
        out += np.exp(-np.pi * (gamma * (d + m * period)) ** 2)
        m += 1
    return out


def principal_angle(x):
    """Wrap an angle (or array of angles) into (-pi, pi]."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ParameterError("angle must be finite")
    wrapped = np.pi - np.mod(np.pi - x, TWO_PI)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped
