"""Uniformly decimated Gaussian filter banks.

Filters are built directly in the DFT domain as sampled, periodized
Gaussians, peak-normalized to 1. Each channel keeps only the contiguous
(wrapped) range of bins where its response exceeds double precision noise,
which keeps analysis and the frame operator cheap even for wide banks.

Analysis of a real signal s produces the N x K complex grid

    c[n, k] = (IDFT_L(fft(s) * conj(g_k)))[n * a],

computed per channel at the decimated length N = L/a by folding the product
spectrum. Synthesis applies the inverse frame operator (preconditioned
conjugate gradients) to the adjoint of analysis, which reconstructs exactly
for any frame configuration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import RealSignal, check_grid, gaussian_spectrum
from .errors import ConfigurationError, FrameConditioningError, ParameterError
from .scales import FilterBankSpec, bandwidths, center_frequencies, gamma_slopes

# Gaussians are carried out to exp(-16*pi) ~ 5e-22 of the peak.
_SUPPORT_HALFWIDTH = 4.0
_EDGE_PLUG_THRESHOLD = 1e-4


@dataclass(frozen=True)
class FilterSlice:
    """One channel's frequency response on a contiguous (wrapped) bin range."""

    start: int
    values: np.ndarray


@dataclass
class FilterBank:
    """Realized filter bank: K frequency-domain filters at decimation a."""

    spec: FilterBankSpec
    L: int
    a: int
    N: int
    centers: np.ndarray          # Hz, strictly increasing
    gammas: np.ndarray           # seconds
    gamma_slopes: np.ndarray     # seconds per Hz (analytic)
    slices: list[FilterSlice]
    plug_mask: np.ndarray        # True for lowpass/highpass plug channels

    @property
    def K(self):
        return len(self.slices)

    @property
    def sample_rate(self):
        return self.spec.sample_rate

    def filter_spectrum(self, k) -> np.ndarray:
        """Materialize channel k's response on the full L-point DFT grid."""
        out = np.zeros(self.L)
        sl = self.slices[k]
        _wrap_add(out, sl.start, sl.values)
        return out

    def response_sum(self) -> np.ndarray:
        """Sum over channels of the squared responses, length L."""
        out = np.zeros(self.L)
        for sl in self.slices:
            _wrap_add(out, sl.start, sl.values**2)
        return out


def _wrap_read(x, start, width):
    """Read ``width`` entries of ``x`` starting at ``start``, wrapping."""
    L = x.shape[0]
    start %= L
    end = start + width
    if end <= L:
        return x[start:end]
    return np.concatenate([x[start:], x[: end - L]])


def _wrap_add(x, start, values):
    """Add ``values`` into ``x`` starting at ``start``, wrapping."""
    L = x.shape[0]
    start %= L
    end = start + values.shape[0]
    if end <= L:
        x[start:end] += values
    else:
        x[start:] += values[: L - start]
        x[: end - L] += values[L - start:]


def _fold(seg, start, N):
    """Fold a wrapped segment into N bins: out[r] = sum of seg at bins = r mod N."""
    w = seg.shape[0]
    offset = start % N
    rows = (offset + w + N - 1) // N
    buf = np.zeros((rows, N), dtype=seg.dtype)
    buf.reshape(-1)[offset : offset + w] = seg
    return buf.sum(axis=0)


def _tile_read(v, start, width):
    """Values of the N-periodic extension of ``v`` at bins start..start+width-1."""
    N = v.shape[0]
    offset = start % N
    reps = (offset + width + N - 1) // N
    return np.tile(v, reps)[offset : offset + width]


def _plateau_values(freqs_abs_wrapped, edge, gamma):
    """Response that is 1 up to ``edge`` Hz and rolls off like a Gaussian."""
    d = np.maximum(freqs_abs_wrapped - edge, 0.0)
    return np.exp(-np.pi * (gamma * d) ** 2)


def build_filterbank(spec: FilterBankSpec, L: int) -> FilterBank:
    """Sample the filter bank defined by ``spec`` on an L-point DFT grid.

    L must be divisible by the decimation factor. When fmin > 0 the band
    below the first channel would be unrecoverable, so a plateau lowpass
    channel (response 1 on [0, fmin], Gaussian rolloff beyond) is inserted
    at index 0; a mirrored highpass is appended if the last channel leaves
    the Nyquist region uncovered.
    """
    L = int(L)
    a = int(spec.decimation)
    if L < 1:
        raise ConfigurationError("L must be positive")
    if L % a != 0:
        raise ConfigurationError(f"decimation {a} does not divide signal length {L}")
    centers = center_frequencies(spec)
    gammas = bandwidths(spec, centers)
    slopes = gamma_slopes(spec, centers)
    rate = spec.sample_rate
    df = rate / L

    def channel_slice(center, gamma):
        half_bins = int(np.ceil(_SUPPORT_HALFWIDTH / (gamma * df)))
        width = min(L, 2 * half_bins + 1)
        start = int(np.round(center / df)) - (width - 1) // 2
        freqs = (start + np.arange(width)) * df
        return FilterSlice(start % L, gaussian_spectrum(freqs, center, gamma, period=rate))

    slices = [channel_slice(c, g) for c, g in zip(centers, gammas)]
    plug = [False] * len(slices)

    if spec.fmin > 0:
        gamma_edge = gammas[0]
        half_bins = int(np.ceil((spec.fmin + _SUPPORT_HALFWIDTH / gamma_edge) / df))
        width = min(L, 2 * half_bins + 1)
        start = -(width - 1) // 2
        freqs = (start + np.arange(width)) * df
        wrapped = np.abs((freqs + rate / 2) % rate - rate / 2)
        values = _plateau_values(wrapped, spec.fmin, gamma_edge)
        slices.insert(0, FilterSlice(start % L, values))
        plug.insert(0, True)
        centers = np.concatenate([[0.0], centers])
        gammas = np.concatenate([[gamma_edge], gammas])
        slopes = np.concatenate([[slopes[0]], slopes])

    nyquist = rate / 2
    top_response = float(np.exp(-np.pi * (gammas[-1] * (nyquist - centers[-1])) ** 2))
    if centers[-1] < nyquist and top_response < _EDGE_PLUG_THRESHOLD:
        gamma_edge = gammas[-1]
        f_edge = spec.fmax
        half_bins = int(np.ceil((nyquist - f_edge + _SUPPORT_HALFWIDTH / gamma_edge) / df))
        width = min(L, 2 * half_bins + 1)
        start = int(np.round(nyquist / df)) - (width - 1) // 2
        freqs = (start + np.arange(width)) * df
        wrapped = np.abs((freqs + rate / 2) % rate - rate / 2)
        # response 1 on [f_edge, nyquist], Gaussian rolloff below f_edge
        d = np.maximum(f_edge - wrapped, 0.0)
        values = np.exp(-np.pi * (gamma_edge * d) ** 2)
        slices.append(FilterSlice(start % L, values))
        plug.append(True)
        centers = np.concatenate([centers, [nyquist]])
        gammas = np.concatenate([gammas, [gamma_edge]])
        slopes = np.concatenate([slopes, [slopes[-1]]])

    return FilterBank(
        spec=spec,
        L=L,
        a=a,
        N=L // a,
        centers=centers,
        gammas=gammas,
        gamma_slopes=slopes,
        slices=slices,
        plug_mask=np.asarray(plug, dtype=bool),
    )


def _check_signal(fb: FilterBank, s: RealSignal):
    if len(s) != fb.L:
        raise ParameterError(f"signal length {len(s)} does not match bank length {fb.L}")


def analyze_spectrum(fb: FilterBank, spectrum: np.ndarray, slices=None) -> np.ndarray:
    """Decimated analysis given the full DFT of the signal.

    Returns the N x K complex grid. ``slices`` may override the bank's
    filters (used for auxiliary filters in the gradient computation).
    """
    if slices is None:
        slices = fb.slices
    folded = np.empty((len(slices), fb.N), dtype=np.complex128)
    for k, sl in enumerate(slices):
        seg = _wrap_read(spectrum, sl.start, sl.values.shape[0]) * np.conj(sl.values)
        folded[k] = _fold(seg, sl.start, fb.N)
    coeffs = np.fft.ifft(folded, axis=1) / fb.a
    return coeffs.T.copy()


def analyze(fb: FilterBank, s: RealSignal) -> np.ndarray:
    """Analysis coefficients c[n, k] of a real signal, shape (N, K)."""
    _check_signal(fb, s)
    return analyze_spectrum(fb, np.fft.fft(s.samples))


def adjoint(fb: FilterBank, grid: np.ndarray) -> np.ndarray:
    """Real-signal adjoint of ``analyze``: sum of modulated dual atoms.

    Satisfies <analyze(x), grid> = <x, adjoint(grid)> with the real inner
    product on signals.
    """
    grid = check_grid(grid, "complex")
    if grid.shape != (fb.N, fb.K):
        raise ParameterError(f"grid shape {grid.shape} does not match ({fb.N}, {fb.K})")
    spectra = np.fft.fft(grid.T, axis=1)
    acc = np.zeros(fb.L, dtype=np.complex128)
    for k, sl in enumerate(fb.slices):
        tiled = _tile_read(spectra[k], sl.start, sl.values.shape[0])
        _wrap_add(acc, sl.start, sl.values * tiled)
    return np.real(np.fft.ifft(acc))


def _frame_apply(fb: FilterBank, x: np.ndarray) -> np.ndarray:
    """Frame operator S = adjoint o analyze on a real vector, without FFT round trips."""
    X = np.fft.fft(x)
    acc = np.zeros(fb.L, dtype=np.complex128)
    inv_a = 1.0 / fb.a
    for sl in fb.slices:
        seg = _wrap_read(X, sl.start, sl.values.shape[0]) * sl.values
        folded = _fold(seg, sl.start, fb.N)
        tiled = _tile_read(folded, sl.start, sl.values.shape[0])
        _wrap_add(acc, sl.start, sl.values * tiled * inv_a)
    return np.real(np.fft.ifft(acc))


def frame_operator_apply(fb: FilterBank, s: RealSignal) -> RealSignal:
    """Apply the frame operator; linear, self-adjoint, positive semidefinite."""
    _check_signal(fb, s)
    return RealSignal(_frame_apply(fb, s.samples), s.sample_rate)


def _precond_symbol(fb: FilterBank) -> np.ndarray:
    """Diagonal (painless) approximation of the frame operator in frequency."""
    sigma = fb.response_sum()
    sym = 0.5 * (sigma + np.roll(sigma[::-1], 1)) / fb.a
    floor = sym.max() * 1e-10
    return np.maximum(sym, floor)


def _pcg(apply_op, b, precond, x0=None, tol=1e-10, max_iter=200):
    """Preconditioned conjugate gradients for S x = b, S symmetric PSD.

    Converges when the relative residual ||b - Sx|| / ||b|| drops below
    ``tol``; raises FrameConditioningError otherwise.
    """
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros_like(b)
    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = x0.astype(np.float64, copy=True)
        r = b - apply_op(x)
    z = precond(r)
    p = z.copy()
    rz = float(r @ z)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol * bnorm:
            return x
        q = apply_op(p)
        pq = float(p @ q)
        if pq <= 0:
            break
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        z = precond(r)
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next
    residual = np.linalg.norm(b - apply_op(x)) / bnorm
    if residual <= tol:
        return x
    raise FrameConditioningError(residual, max_iter)


def synthesize(fb: FilterBank, grid: np.ndarray, x0=None, tol=1e-10, max_iter=200) -> RealSignal:
    """Dual-frame synthesis: the real signal s with analyze(s) closest to ``grid``.

    Solves S s = adjoint(grid) by preconditioned conjugate gradients, so
    synthesize(analyze(s)) == s up to the CG tolerance. ``x0`` warm-starts
    the solver (useful in iterative schemes with slowly changing grids).
    """
    b = adjoint(fb, grid)
    symbol = _precond_symbol(fb)

    def precond(r):
        return np.real(np.fft.ifft(np.fft.fft(r) / symbol))

    x = _pcg(lambda v: _frame_apply(fb, v), b, precond, x0=x0, tol=tol, max_iter=max_iter)
    return RealSignal(x, fb.sample_rate)


@dataclass(frozen=True)
class FrameBounds:
    """Estimated frame bounds; A_est == 0 flags a non-frame configuration."""

    A_est: float
    B_est: float

    def __post_init__(self):
        if not (0 <= self.A_est <= self.B_est):
            raise ParameterError("need 0 <= A_est <= B_est")


def estimate_frame_bounds(fb: FilterBank, power_iters=50, inverse_iters=20, seed=0) -> FrameBounds:
    """Extremal Rayleigh quotients of the frame operator.

    B by power iteration, A by inverse power iteration with CG solves. If the
    inverse iteration's CG fails to converge the configuration is reported as
    a non-frame (A_est = 0).
    """
    rng = np.random.Generator(np.random.Philox(seed))
    v = rng.standard_normal(fb.L)
    v /= np.linalg.norm(v)
    for _ in range(power_iters):
        w = _frame_apply(fb, v)
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        v = w / norm
    b_est = float(v @ _frame_apply(fb, v))

    symbol = _precond_symbol(fb)

    def precond(r):
        return np.real(np.fft.ifft(np.fft.fft(r) / symbol))

    u = rng.standard_normal(fb.L)
    u /= np.linalg.norm(u)
    try:
        for _ in range(inverse_iters):
            w = _pcg(lambda x: _frame_apply(fb, x), u, precond, tol=1e-9, max_iter=400)
            norm = np.linalg.norm(w)
            if norm == 0:
                break
            u = w / norm
        a_est = float(u @ _frame_apply(fb, u))
    except FrameConditioningError:
        warnings.warn("inverse iteration did not converge; reporting A_est = 0")
        return FrameBounds(0.0, b_est)
    return FrameBounds(min(a_est, b_est), b_est)


def redundancy(fb: FilterBank) -> float:
    """Coefficient data volume per signal sample: 2K/a for real input."""
    return 2.0 * fb.K / fb.a
