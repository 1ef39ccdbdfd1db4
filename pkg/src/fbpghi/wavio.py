"""WAV file reading and writing.

Reading accepts PCM16, PCM24/32 and float32/float64 mono or stereo files;
stereo is averaged to mono with a warning. Writing emits float32. Samples
outside [-1, 1] on write are reported, not clipped (float WAV represents
them exactly).
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.io import wavfile

from .core import RealSignal
from .errors import ParameterError

_INT_SCALES = {
    np.dtype(np.int16): 2.0**15,
    np.dtype(np.int32): 2.0**31,
    np.dtype(np.uint8): None,  # rejected below
}


def read_wav(path) -> RealSignal:
    """Load a WAV file as a mono float signal in [-1, 1] (for PCM input)."""
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ParameterError(f"cannot read WAV file {path}: {exc}") from exc
    if data.ndim == 2:
        warnings.warn(f"{path}: averaging {data.shape[1]} channels to mono")
        data = data.mean(axis=1)
    elif data.ndim != 1:
        raise ParameterError(f"{path}: unsupported channel layout {data.shape}")
    if data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    elif data.dtype in (np.int16, np.int32):
        samples = data.astype(np.float64) / _INT_SCALES[data.dtype]
    else:
        raise ParameterError(f"{path}: unsupported sample format {data.dtype}")
    return RealSignal(samples, float(rate))


def write_wav(path, signal: RealSignal):
    """Write a signal as a float32 WAV file."""
    peak = float(np.max(np.abs(signal.samples))) if len(signal) else 0.0
    if peak > 1.0:
        warnings.warn(f"{path}: peak amplitude {peak:.3f} exceeds 1.0 (written unclipped)")
    wavfile.write(path, int(round(signal.sample_rate)), signal.samples.astype(np.float32))
