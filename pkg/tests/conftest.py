import numpy as np
import pytest

from fbpghi.core import RealSignal
from fbpghi.scales import FilterBankSpec, FrequencyScale


def make_rng(seed=0):
    return np.random.Generator(np.random.Philox(key=seed))


def small_linear_spec(sr=8000.0, spacing_hz=62.5, bw_hz=250.0, a=64):
    """Constant-bandwidth bank whose channel spacing lands on DFT bins for L=4096."""
    return FilterBankSpec(FrequencyScale("linear"), bins=1.0 / spacing_hz, bw=bw_hz,
                          fmin=0.0, fmax=sr / 2, decimation=a, sample_rate=sr)


def small_erb_spec(sr=8000.0, a=16):
    return FilterBankSpec(FrequencyScale("erb"), bins=2.0, bw=1.0,
                          fmin=0.0, fmax=sr / 2, decimation=a, sample_rate=sr)


def faded(x, sample_rate, fade=0.05):
    """Raised-cosine fade-in/out to suppress onset transients."""
    x = x.copy()
    n = int(fade * sample_rate)
    w = 0.5 * (1.0 - np.cos(np.pi * np.arange(n) / n))
    x[:n] *= w
    x[-n:] *= w[::-1]
    return x


@pytest.fixture
def rng():
    return make_rng(1234)
