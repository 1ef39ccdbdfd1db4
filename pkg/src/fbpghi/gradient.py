"""Phase gradients of filter bank coefficients.

Two routes are provided:

* ``estimate_phase_gradients`` computes the truncated estimates that use
  only the coefficient magnitudes and the bank geometry. For a Gaussian
  prototype the phase partials are tied to log-magnitude partials; with
  time x in seconds, frequency xi in Hz and phase psi in radians,

      d psi / d x   = 2 pi xi(k) + gamma'_k / gamma_k^3
                      + D_k(log m) / gamma_k^2
      d psi / d xi  = - gamma_k^2 * D_n(log m)

  where D_n and D_k are the discrete difference schemes below and gamma'
  is itself approximated by a weighted difference of the gamma sequence.
  The gamma' coefficient combines the intrinsic warping correction
  (gamma'/(2 gamma^3)) with an equal term compensating the per-channel
  peak normalization of the filters, which scales magnitudes by
  sqrt(gamma_k) relative to the L2-normalized prototype. Correction terms
  that would require a twice-time-weighted auxiliary transform are
  omitted; they are small whenever gamma varies slowly.

* ``oracle_phase_gradients`` computes the exact partials from the full
  complex coefficients via auxiliary filters (derivative and time-weighted
  Gaussians realized in the DFT domain), including the correction terms.
  It serves as the reference in tests and error analyses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RealSignal, TWO_PI, check_grid
from .errors import DegenerateInputError, ParameterError
from .filterbank import FilterBank, FilterSlice, _check_signal, analyze_spectrum


@dataclass(frozen=True)
class GradientField:
    """Per-cell phase gradient estimates.

    ``d_time`` is d(phase)/dt in radians/second, ``d_freq`` is
    d(phase)/df in radians/Hz, both N x K. ``reliable`` (optional) masks
    cells where the values are trustworthy; the exact computation zeroes
    cells whose coefficient magnitude is too small to divide by.
    """

    d_time: np.ndarray
    d_freq: np.ndarray
    reliable: np.ndarray | None = None

    def __post_init__(self):
        if self.d_time.shape != self.d_freq.shape:
            raise ParameterError("gradient components must have equal shapes")
        if not (np.all(np.isfinite(self.d_time)) and np.all(np.isfinite(self.d_freq))):
            raise ParameterError("gradient field contains non-finite entries")


def log_magnitude(m, rel_floor=1e-10):
    """Elementwise log of a magnitude grid, floored at rel_floor * max(m)."""
    m = check_grid(m, "magnitude")
    if not 0 < rel_floor < 1:
        raise ParameterError("rel_floor must be in (0, 1)")
    peak = m.max()
    if peak == 0:
        raise DegenerateInputError("all-zero magnitude grid")
    return np.log(np.maximum(m, rel_floor * peak))


def diff_time(v, a, sample_rate):
    """Centered differences along the frame axis with step a/sample_rate seconds.

    Endpoints use one-sided differences so the full grid stays defined.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] < 3:
        raise ParameterError("need at least 3 time frames")
    dt = a / sample_rate
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * dt)
    out[0] = (v[1] - v[0]) / dt
    out[-1] = (v[-1] - v[-2]) / dt
    return out


def diff_freq(v, centers):
    """Weighted centered differences along the channel axis.

    Interior cells average the forward and backward difference quotients,
    which honors nonuniform channel spacing and is exact on linear inputs;
    endpoints use the one-sided quotient. Accepts 1-d or 2-d input with
    channels along the last axis.
    """
    v = np.asarray(v, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    if v.shape[-1] != centers.shape[0] or centers.shape[0] < 3:
        raise ParameterError("need at least 3 channels matching the centers array")
    spacing = np.diff(centers)
    if np.any(spacing <= 0):
        raise ParameterError("centers must be strictly increasing")
    quot = np.diff(v, axis=-1) / spacing
    out = np.empty_like(v)
    out[..., 1:-1] = 0.5 * (quot[..., 1:] + quot[..., :-1])
    out[..., 0] = quot[..., 0]
    out[..., -1] = quot[..., -1]
    return out


def gamma_derivative(gammas, centers):
    """Approximate d(gamma)/d(xi) from the sampled gamma sequence alone."""
    gammas = np.asarray(gammas, dtype=np.float64)
    if gammas.ndim != 1:
        raise ParameterError("gammas must be 1-d")
    return diff_freq(gammas, centers)


def estimate_phase_gradients(m, centers, gammas, a, sample_rate, rel_floor=1e-10) -> GradientField:
    """Gradient estimates from magnitudes and bank geometry alone."""
    m = check_grid(m, "magnitude")
    centers = np.asarray(centers, dtype=np.float64)
    gammas = np.asarray(gammas, dtype=np.float64)
    if m.shape[1] != centers.shape[0] or m.shape[1] != gammas.shape[0]:
        raise ParameterError("grid width does not match centers/gammas")
    logm = log_magnitude(m, rel_floor)
    dk = diff_freq(logm, centers)
    dn = diff_time(logm, a, sample_rate)
    gprime = gamma_derivative(gammas, centers)
    # gamma'/(2 gamma^3) intrinsic term plus gamma'/(2 gamma^3) compensating
    # the sqrt(gamma) channel scale of peak-normalized filters
    d_time = TWO_PI * centers + gprime / gammas**3 + dk / gammas**2
    d_freq = -(gammas**2) * dn
    return GradientField(d_time=d_time, d_freq=d_freq)


def _aux_slices(fb: FilterBank, kind: str) -> list[FilterSlice]:
    """Auxiliary filter spectra on the same supports as the bank's channels.

    With nu = gamma * (f - center) per periodized image, the responses are

        "deriv"       2 pi i nu * G(nu)          (derivative prototype)
        "time"        -i nu * G(nu)              (time-weighted)
        "time_deriv"  -(1 - 2 pi nu^2) * G(nu)   (time-weighted derivative)
        "time2"       (1 - 2 pi nu^2)/(2 pi) * G(nu)

    where G(nu) = exp(-pi nu^2) matches the analysis filter's per-channel
    normalization, so ratios of coefficients are normalization-free.
    """
    rate = fb.sample_rate
    df = rate / fb.L
    out = []
    for k, sl in enumerate(fb.slices):
        center = fb.centers[k]
        gamma = fb.gammas[k]
        width = sl.values.shape[0]
        freqs = (sl.start + np.arange(width)) * df
        d = (freqs - center + 0.5 * rate) % rate - 0.5 * rate
        values = np.zeros(width, dtype=np.complex128)
        m = 0
        while True:
            tail = np.exp(-np.pi * (gamma * max(0.0, (m - 0.5)) * rate) ** 2)
            if m > 0 and tail <= 1e-18:
                break
            shifts = (0,) if m == 0 else (-m * rate, m * rate)
            for shift in shifts:
                nu = gamma * (d - shift)
                base = np.exp(-np.pi * nu**2)
                if kind == "deriv":
                    values += TWO_PI * 1j * nu * base
                elif kind == "time":
                    values += -1j * nu * base
                elif kind == "time_deriv":
                    values += -(1.0 - TWO_PI * nu**2) * base
                elif kind == "time2":
                    values += (1.0 - TWO_PI * nu**2) / TWO_PI * base
                else:
                    raise ParameterError(f"unknown auxiliary kind {kind!r}")
            m += 1
        out.append(FilterSlice(sl.start, values))
    return out


def oracle_phase_gradients(s: RealSignal, fb: FilterBank, rel_floor=1e-7) -> GradientField:
    """Exact phase partials of the analysis coefficients, in radians.

    Computes the auxiliary transforms, divides by the base coefficients and
    assembles the closed-form identities including the correction terms the
    magnitude-only estimator omits. Cells with |c| below rel_floor * max are
    zeroed and flagged unreliable, as are plateau plug channels (which do
    not follow the Gaussian model).
    """
    _check_signal(fb, s)
    if not 0 < rel_floor < 1:
        raise ParameterError("rel_floor must be in (0, 1)")
    spectrum = np.fft.fft(s.samples)
    base = analyze_spectrum(fb, spectrum)
    v_d = analyze_spectrum(fb, spectrum, _aux_slices(fb, "deriv"))
    v_t = analyze_spectrum(fb, spectrum, _aux_slices(fb, "time"))
    v_td = analyze_spectrum(fb, spectrum, _aux_slices(fb, "time_deriv"))
    v_tt = analyze_spectrum(fb, spectrum, _aux_slices(fb, "time2"))

    mag = np.abs(base)
    reliable = mag >= rel_floor * mag.max()
    reliable &= ~fb.plug_mask[None, :]
    safe = np.where(reliable, base, 1.0)
    r_d = v_d / safe
    r_t = v_t / safe
    r_td = v_td / safe
    r_tt = v_tt / safe

    gamma = fb.gammas
    gprime = fb.gamma_slopes
    xi = fb.centers

    dx_logm = -np.real(r_d) / gamma
    dxi_logm = -gprime / (2.0 * gamma) - (gprime / gamma) * np.real(r_td) \
        + TWO_PI * gamma * np.imag(r_t)
    d_time = TWO_PI * xi + dxi_logm / gamma**2 + gprime / (2.0 * gamma**3) \
        - (TWO_PI * gprime / gamma**3) * np.real(r_tt)
    d_freq = -(gamma**2) * dx_logm + (TWO_PI * gprime / gamma) * np.imag(r_tt)

    d_time = np.where(reliable, d_time, 0.0)
    d_freq = np.where(reliable, d_freq, 0.0)
    return GradientField(d_time=d_time, d_freq=d_freq, reliable=reliable)
