"""Synthetic test signals and WAV-backed signal loading."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RealSignal
from .errors import ParameterError
from .wavio import read_wav

SIGNAL_KINDS = ("s1", "s2", "s3", "wav")


@dataclass(frozen=True)
class SignalKind:
    """Description of a test signal.

    ``s1`` is a stack of eight octave-spaced sines starting at 110 Hz,
    ``s2`` adds unit impulses every 5000 samples and two exponential chirps
    (500 Hz up to 15 kHz, 18 kHz down to 3 kHz) to four double-octave sines,
    ``s3`` is seeded white noise, ``wav`` loads a mono file from ``path``.
    """

    kind: str
    duration: float = 1.0
    sample_rate: float = 44100.0
    seed: int = 0
    path: str | None = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ParameterError(f"unknown signal kind {self.kind!r}")
        if not self.duration > 0:
            raise ParameterError("duration must be positive")
        if not self.sample_rate > 0:
            raise ParameterError("sample_rate must be positive")
        if self.kind == "wav" and not self.path:
            raise ParameterError("wav signals need a path")


def exp_chirp(f_start, f_end, duration, sample_rate) -> RealSignal:
    """Constant-amplitude sine with exponentially swept instantaneous frequency.

    f(t) = f_start * (f_end/f_start)**(t/duration); the phase integral is in
    closed form, so the sweep is exact.
    """
    nyquist = sample_rate / 2
    if not (0 < f_start < nyquist and 0 < f_end < nyquist):
        raise ParameterError("chirp endpoints must lie in (0, sample_rate/2)")
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    if f_start == f_end:
        phase = 2.0 * np.pi * f_start * t
    else:
        rate = np.log(f_end / f_start) / duration
        phase = 2.0 * np.pi * f_start * (np.exp(rate * t) - 1.0) / rate
    return RealSignal(np.sin(phase), sample_rate)


def gen_signal(kind: SignalKind) -> RealSignal:
    """Realize a SignalKind as samples."""
    rate = kind.sample_rate
    n = int(round(kind.duration * rate))
    l = np.arange(n)
    if kind.kind == "s1":
        x = np.zeros(n)
        for k in range(8):
            x += np.sin(220.0 * np.pi * (2.0**k) * l / rate)
        return RealSignal(x, rate)
    if kind.kind == "s2":
        x = np.zeros(n)
        for k in range(4):
            x += np.sin(220.0 * np.pi * (4.0**k) * l / rate)
        for k in range(1, 9):
            pos = 5000 * k
            if pos < n:
                x[pos] += 1.0
        x += exp_chirp(500.0, 15000.0, kind.duration, rate).samples
        x += exp_chirp(18000.0, 3000.0, kind.duration, rate).samples
        return RealSignal(x, rate)
    if kind.kind == "s3":
        rng = np.random.Generator(np.random.Philox(key=kind.seed))
        return RealSignal(rng.standard_normal(n), rate)
    return read_wav(kind.path)
