"""Frequency scales and filter bank geometry.

A scale maps frequency in Hz to scale units. Filters sit at uniform steps of
``1/bins`` on the scale, and each filter's bandwidth in Hz is ``bw`` scale
units converted back through the derivative of the scale map. The supported
kinds:

* ``erb``     -- ERB number, ``21.4 * log10(1 + 0.00437 f)``
* ``log10q``  -- ``10 * ln(f)``, yielding constant-Q banks
* ``sqrt4``   -- ``(1 + f/4)**(1/2) - 1``
* ``quart``   -- ``8 * ((1 + f)**(1/4) - 1)``
* ``linear``  -- identity, yielding constant-bandwidth (STFT-like) banks
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ParameterError

_ERB_A = 21.4
_ERB_B = 0.00437
_LN10 = float(np.log(10.0))

SCALE_KINDS = ("erb", "log10q", "sqrt4", "quart", "linear")


@dataclass(frozen=True)
class FrequencyScale:
    kind: str

    def __post_init__(self):
        if self.kind not in SCALE_KINDS:
            raise ParameterError(f"unknown scale kind {self.kind!r}")

    def _check_freq(self, f):
        f = np.asarray(f, dtype=np.float64)
        if np.any(f < 0):
            raise ParameterError("frequency must be nonnegative")
        return f

    def value(self, f):
        """Map frequency in Hz to scale units."""
        f = self._check_freq(f)
        if self.kind == "erb":
            out = _ERB_A * np.log10(1.0 + _ERB_B * f)
        elif self.kind == "log10q":
            with np.errstate(divide="ignore"):
                out = 10.0 * np.log(f)
        elif self.kind == "sqrt4":
            out = np.sqrt(1.0 + f / 4.0) - 1.0
        elif self.kind == "quart":
            out = 8.0 * ((1.0 + f) ** 0.25 - 1.0)
        else:
            out = f
        return float(out) if out.ndim == 0 else out

    def inverse(self, u):
        """Map scale units back to frequency in Hz."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind != "log10q" and np.any(u < 0):
            raise ParameterError("scale position must be nonnegative")
        if self.kind == "erb":
            out = (10.0 ** (u / _ERB_A) - 1.0) / _ERB_B
        elif self.kind == "log10q":
            out = np.exp(u / 10.0)
        elif self.kind == "sqrt4":
            out = 4.0 * ((u + 1.0) ** 2 - 1.0)
        elif self.kind == "quart":
            out = (u / 8.0 + 1.0) ** 4 - 1.0
        else:
            out = u
        return float(out) if out.ndim == 0 else out

    def derivative(self, f):
        """d(scale)/df in scale units per Hz."""
        f = self._check_freq(f)
        if self.kind == "erb":
            out = _ERB_A * _ERB_B / (_LN10 * (1.0 + _ERB_B * f))
        elif self.kind == "log10q":
            out = 10.0 / f
        elif self.kind == "sqrt4":
            out = 0.125 / np.sqrt(1.0 + f / 4.0)
        elif self.kind == "quart":
            out = 2.0 * (1.0 + f) ** -0.75
        else:
            out = np.ones_like(f)
        return float(out) if out.ndim == 0 else out

    def curvature(self, f):
        """d^2(scale)/df^2, used by the exact gradient computation."""
        f = self._check_freq(f)
        if self.kind == "erb":
            out = -_ERB_A * _ERB_B**2 / (_LN10 * (1.0 + _ERB_B * f) ** 2)
        elif self.kind == "log10q":
            out = -10.0 / f**2
        elif self.kind == "sqrt4":
            out = -(1.0 / 64.0) * (1.0 + f / 4.0) ** -1.5
        elif self.kind == "quart":
            out = -1.5 * (1.0 + f) ** -1.75
        else:
            out = np.zeros_like(f)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FilterBankSpec:
    """Scale-parameterized filter bank configuration.

    ``bins`` is the number of filters per scale unit, ``bw`` the filter
    bandwidth in scale units, ``decimation`` the uniform time subsampling
    stride in samples.
    """

    scale: FrequencyScale
    bins: float
    bw: float
    fmin: float
    fmax: float
    decimation: int
    sample_rate: float

    def __post_init__(self):
        if not (self.bins > 0 and self.bw > 0):
            raise ConfigurationError("bins and bw must be positive")
        if not (0 <= self.fmin < self.fmax <= self.sample_rate / 2):
            raise ConfigurationError(
                "need 0 <= fmin < fmax <= sample_rate/2, got "
                f"fmin={self.fmin}, fmax={self.fmax}, rate={self.sample_rate}"
            )
        if self.scale.kind == "log10q" and self.fmin <= 0:
            raise ConfigurationError("log10q scale requires fmin > 0")
        if int(self.decimation) != self.decimation or self.decimation < 1:
            raise ConfigurationError("decimation must be a positive integer")


def center_frequencies(spec: FilterBankSpec) -> np.ndarray:
    """Channel center frequencies xi(k) in Hz, k = 0..K-1.

    Channels are placed at uniform scale steps of 1/bins starting at fmin;
    K = floor(bins * (scale(fmax) - scale(fmin))) + 1.
    """
    u0 = spec.scale.value(spec.fmin)
    u1 = spec.scale.value(spec.fmax)
    count = int(np.floor(spec.bins * (u1 - u0))) + 1
    if count < 3:
        raise ConfigurationError(
            f"configuration yields only {count} channels; need at least 3"
        )
    centers = spec.scale.inverse(u0 + np.arange(count) / spec.bins)
    centers[0] = spec.fmin
    if np.any(np.diff(centers) <= 0):
        raise ConfigurationError("center frequencies are not strictly increasing")
    return centers


def bandwidths(spec: FilterBankSpec, centers: np.ndarray) -> np.ndarray:
    """Per-channel Gaussian dilation gamma_k in seconds.

    gamma_k = scale'(xi(k)) / bw, i.e. the filter's nominal bandwidth in Hz
    is bw / scale'(xi(k)) and gamma is its reciprocal.
    """
    deriv = np.asarray(spec.scale.derivative(centers), dtype=np.float64)
    if np.any(deriv <= 0) or not np.all(np.isfinite(deriv)):
        raise ConfigurationError("scale derivative must be positive and finite")
    return deriv / spec.bw


def gamma_slopes(spec: FilterBankSpec, centers: np.ndarray) -> np.ndarray:
    """Analytic d(gamma)/d(xi) in seconds per Hz for each channel."""
    return np.asarray(spec.scale.curvature(centers), dtype=np.float64) / spec.bw
