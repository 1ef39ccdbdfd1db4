import numpy as np
import pytest

from fbpghi.core import RealSignal, TWO_PI
from fbpghi.errors import DegenerateInputError, ParameterError
from fbpghi.filterbank import analyze, build_filterbank
from fbpghi.gradient import (GradientField, diff_freq, diff_time,
                             estimate_phase_gradients, gamma_derivative,
                             log_magnitude, oracle_phase_gradients)
from fbpghi.scales import FilterBankSpec, FrequencyScale

from conftest import faded, make_rng, small_linear_spec

SR = 8000.0
L = 4096


@pytest.fixture(scope="module")
def stft_fb():
    return build_filterbank(small_linear_spec(a=32), L)


class TestLogMagnitude:
    def test_ones_give_zero(self):
        assert np.all(log_magnitude(np.ones((4, 5))) == 0)

    def test_floor_active_on_zeros(self):
        m = np.ones((3, 3))
        m[1, 1] = 0.0
        out = log_magnitude(m, rel_floor=1e-10)
        assert out[1, 1] == pytest.approx(np.log(1e-10))

    def test_global_scaling_shifts_uniformly(self, rng):
        m = rng.random((6, 7)) + 0.1
        shift = log_magnitude(3.0 * m) - log_magnitude(m)
        np.testing.assert_allclose(shift, np.log(3.0), rtol=1e-12)

    def test_all_zero_rejected(self):
        with pytest.raises(DegenerateInputError):
            log_magnitude(np.zeros((3, 3)))


class TestDiffTime:
    def test_linear_ramp(self):
        a, sr = 16, 8000.0
        n = np.arange(10)[:, None] * (a / sr)
        v = np.tile(n, (1, 4))
        out = diff_time(v, a, sr)
        np.testing.assert_allclose(out, 1.0, atol=1e-12)

    def test_constant(self):
        out = diff_time(np.full((8, 3), 2.5), 16, 8000.0)
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_quadratic_exact_interior(self):
        a, sr = 8, 8000.0
        t = np.arange(12)[:, None] * (a / sr)
        out = diff_time(t**2, a, sr)
        np.testing.assert_allclose(out[1:-1], 2.0 * t[1:-1], rtol=1e-10)

    def test_too_few_frames(self):
        with pytest.raises(ParameterError):
            diff_time(np.zeros((2, 3)), 8, 8000.0)


class TestDiffFreq:
    def test_linear_exact_any_spacing(self, rng):
        centers = np.cumsum(rng.random(9) + 0.5) * 100.0
        v = np.tile(3.0 * centers, (5, 1))
        out = diff_freq(v, centers)
        np.testing.assert_allclose(out, 3.0, rtol=1e-12)

    def test_constant(self):
        centers = np.array([1.0, 2.0, 4.0, 8.0])
        out = diff_freq(np.ones((3, 4)), centers)
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_uniform_spacing_reduces_to_centered(self, rng):
        centers = np.arange(6.0) * 10.0
        v = rng.random((4, 6))
        out = diff_freq(v, centers)
        expected = (v[:, 2:] - v[:, :-2]) / 20.0
        np.testing.assert_allclose(out[:, 1:-1], expected, rtol=1e-12)

    def test_nonmonotone_rejected(self):
        with pytest.raises(ParameterError):
            diff_freq(np.zeros((2, 3)), np.array([1.0, 3.0, 2.0]))


class TestGammaDerivative:
    def test_constant_gamma(self):
        centers = np.linspace(100, 1000, 12)
        out = gamma_derivative(np.full(12, 0.01), centers)
        np.testing.assert_allclose(out, 0.0, atol=1e-15)

    def test_linear_gamma_exact(self):
        centers = np.logspace(2, 3, 10)
        gammas = 1e-5 * centers + 3e-3
        out = gamma_derivative(gammas, centers)
        np.testing.assert_allclose(out, 1e-5, rtol=1e-10)

    def test_constant_q_taylor_bound(self):
        # gamma = c / xi on a slowly growing grid: the averaged quotient
        # approaches -c/xi^2 with second-order error in the spacing
        centers = 100.0 * 1.02 ** np.arange(40)
        c = 5.0
        out = gamma_derivative(c / centers, centers)
        truth = -c / centers**2
        rel = np.abs(out - truth) / np.abs(truth)
        dxr = np.diff(centers) / centers[:-1]
        assert np.all(rel[1:-1] < 2.0 * dxr.max() ** 2 + 1e-4)


class TestEstimator:
    def test_constant_magnitude_time_gradient(self):
        spec = small_linear_spec()
        fb = build_filterbank(spec, L)
        m = np.ones((fb.N, fb.K))
        g = estimate_phase_gradients(m, fb.centers, fb.gammas, fb.a, SR)
        gp = gamma_derivative(fb.gammas, fb.centers)
        expected = TWO_PI * fb.centers + gp / fb.gammas**3
        np.testing.assert_allclose(g.d_time, np.broadcast_to(expected, g.d_time.shape),
                                   rtol=1e-10, atol=1e-8)
        np.testing.assert_allclose(g.d_freq, 0.0, atol=1e-12)
        assert np.ptp(g.d_time, axis=0).max() < 1e-8  # independent of n

    def test_scale_invariance(self, stft_fb, rng):
        # log differences cancel a global factor; only float rounding of the
        # individual logs survives
        m = np.abs(analyze(stft_fb, RealSignal(rng.standard_normal(L), SR)))
        g1 = estimate_phase_gradients(m, stft_fb.centers, stft_fb.gammas, stft_fb.a, SR)
        g2 = estimate_phase_gradients(7.25 * m, stft_fb.centers, stft_fb.gammas, stft_fb.a, SR)
        scale_t = np.abs(g1.d_time).max()
        scale_f = np.abs(g1.d_freq).max()
        assert np.max(np.abs(g1.d_time - g2.d_time)) < 1e-9 * scale_t
        assert np.max(np.abs(g1.d_freq - g2.d_freq)) < 1e-9 * scale_f

    def test_tone_recovers_instantaneous_frequency(self, stft_fb):
        k0 = 20
        f0 = stft_fb.centers[k0]
        tone = RealSignal(faded(np.sin(TWO_PI * f0 * np.arange(L) / SR), SR), SR)
        m = np.abs(analyze(stft_fb, tone))
        g = estimate_phase_gradients(m, stft_fb.centers, stft_fb.gammas, stft_fb.a, SR)
        mid = stft_fb.N // 2
        assert g.d_time[mid, k0] == pytest.approx(TWO_PI * f0, rel=1e-2)
        # independent check: dense finite differences of the true phase
        c_dense = analyze(build_filterbank(small_linear_spec(a=1), L), tone)
        ph = np.unwrap(np.angle(c_dense[:, k0]))
        fd = (ph[2:] - ph[:-2]) / (2.0 / SR)
        assert g.d_time[mid, k0] == pytest.approx(fd[mid * stft_fb.a], rel=1e-2)

    def test_gaussian_pulse_ridge_has_flat_freq_gradient(self, stft_fb):
        # signal built from a filter's own time atom: at the temporal ridge
        # the log-magnitude is flat in time, so d_freq vanishes there
        k0 = 18
        t = (np.arange(L) - L / 2) / SR
        gamma = stft_fb.gammas[k0]
        envelope = np.exp(-np.pi * (t / gamma) ** 2)
        x = envelope * np.cos(TWO_PI * stft_fb.centers[k0] * np.arange(L) / SR)
        m = np.abs(analyze(stft_fb, RealSignal(x, SR)))
        g = estimate_phase_gradients(m, stft_fb.centers, stft_fb.gammas, stft_fb.a, SR)
        n_ridge = int(np.round(L / 2 / stft_fb.a))
        scale = np.abs(g.d_freq[m > 1e-3 * m.max()]).max()
        assert abs(g.d_freq[n_ridge, k0]) < 0.05 * scale

    def test_dimension_mismatch(self, stft_fb):
        with pytest.raises(ParameterError):
            estimate_phase_gradients(np.ones((4, 3)), stft_fb.centers,
                                     stft_fb.gammas, stft_fb.a, SR)


class TestOracle:
    def test_stft_case_reduces_to_classic_relationship(self, stft_fb):
        # constant gamma kills every gamma' term; on a smooth sweep the
        # magnitude-only estimator reproduces the exact gradients. The sweep
        # stays several bandwidths away from DC and Nyquist so the real
        # signal's mirror image does not interfere with the ridge model.
        t = np.arange(L) / SR
        rate = np.log(3200.0 / 800.0)
        x = faded(np.sin(TWO_PI * 800.0 * (np.exp(rate * t) - 1.0) / rate), SR)
        s = RealSignal(x, SR)
        g = oracle_phase_gradients(s, stft_fb, rel_floor=1e-2)
        m = np.abs(analyze(stft_fb, s))
        est = estimate_phase_gradients(m, stft_fb.centers, stft_fb.gammas, stft_fb.a, SR)
        sel = (m > 1e-2 * m.max()) & g.reliable
        dev_t = np.abs(est.d_time - g.d_time)[sel] / np.abs(g.d_time[sel])
        assert dev_t.max() < 5e-2
        # one-sided time differences at the first/last frames see the fade
        # edge; judge d_freq on interior frames
        inner = sel.copy()
        inner[:2, :] = inner[-2:, :] = False
        scale = np.abs(g.d_freq[sel]).max()
        dev_f = np.abs(est.d_freq - g.d_freq)[inner] / scale
        assert dev_f.max() < 5e-2

    def test_chirp_matches_dense_finite_differences(self):
        # ERB bank, warped gamma: the exact computation must track dense
        # finite differences of the unwrapped coefficient phase
        spec = FilterBankSpec(FrequencyScale("erb"), 4, 0.5, 0.0, SR / 2, 16, SR)
        fb = build_filterbank(spec, L)
        t = np.arange(L) / SR
        rate = np.log(3000.0 / 300.0)
        x = faded(np.sin(TWO_PI * 300.0 * (np.exp(rate * t) - 1.0) / rate, dtype=np.float64), SR)
        s = RealSignal(x, SR)
        g = oracle_phase_gradients(s, fb, rel_floor=1e-2)
        m = np.abs(analyze(fb, s))

        dense_fb = build_filterbank(FilterBankSpec(
            FrequencyScale("erb"), 4, 0.5, 0.0, SR / 2, 1, SR), L)
        c_dense = analyze(dense_fb, s)
        na = np.arange(fb.N) * fb.a
        fwd = np.angle(c_dense[(na + 1) % L] * np.conj(c_dense[na]))
        bwd = np.angle(c_dense[na] * np.conj(c_dense[(na - 1) % L]))
        fd = 0.5 * (fwd + bwd) * SR

        sel = (m > 1e-2 * m.max()) & g.reliable
        rel = np.abs(g.d_time - fd)[sel] / np.abs(fd[sel])
        assert rel.max() < 1e-2

    def test_impulse_group_delay(self):
        # a unit impulse at t0 has phase -2*pi*xi*(t0 - x): d_freq is exact
        spec = small_linear_spec(a=32)
        fb = build_filterbank(spec, L)
        l0 = 2048
        x = np.zeros(L)
        x[l0] = 1.0
        s = RealSignal(x, SR)
        g = oracle_phase_gradients(s, fb, rel_floor=1e-3)
        m = np.abs(analyze(fb, s))
        sel = (m > 1e-2 * m.max()) & g.reliable
        n_idx, k_idx = np.nonzero(sel)
        expected = -TWO_PI * (l0 / SR - n_idx * fb.a / SR)
        scale = np.abs(expected).max()
        assert np.max(np.abs(g.d_freq[sel] - expected)) / scale < 1e-2

    def test_even_signal_dc_channel_phase_constant(self):
        # circularly even real input: the DC-centered channel's coefficients
        # are real, so the oracle time gradient is ~ 2*pi*xi(0) = 0
        spec = small_linear_spec(a=32)
        fb = build_filterbank(spec, L)
        l = np.arange(L)
        wrap = np.minimum(l, L - l) / SR
        x = np.exp(-np.pi * (wrap / 0.01) ** 2)
        s = RealSignal(x, SR)
        c = analyze(fb, s)
        phases = np.angle(c[:, 0])
        mask = np.abs(c[:, 0]) > 1e-3 * np.abs(c[:, 0]).max()
        assert np.max(np.abs(np.sin(phases[mask]))) < 1e-6  # phase 0 mod pi
        g = oracle_phase_gradients(s, fb, rel_floor=1e-3)
        sel = mask & g.reliable[:, 0]
        assert np.max(np.abs(g.d_time[sel, 0])) < 0.05 * TWO_PI * fb.centers[1]

    def test_log_magnitude_consistency(self):
        # real part of the derivative-filter ratio reproduces the time slope
        # of log magnitude measured by dense finite differences
        t = np.arange(L) / SR
        rate = np.log(3000.0 / 300.0)
        x = faded(np.sin(TWO_PI * 300.0 * (np.exp(rate * t) - 1.0) / rate), SR)
        s = RealSignal(x, SR)
        dense_fb = build_filterbank(small_linear_spec(a=1), L)
        c_dense = analyze(dense_fb, s)
        logm = np.log(np.maximum(np.abs(c_dense), 1e-300))
        fd = (logm[2:] - logm[:-2]) / (2.0 / SR)

        from fbpghi.filterbank import analyze_spectrum
        from fbpghi.gradient import _aux_slices
        spectrum = np.fft.fft(s.samples)
        base = analyze_spectrum(dense_fb, spectrum)
        v_d = analyze_spectrum(dense_fb, spectrum, _aux_slices(dense_fb, "deriv"))
        m = np.abs(base)
        sel = m[1:-1] > 2e-2 * m.max()
        gammas = np.broadcast_to(dense_fb.gammas, m[1:-1].shape)
        ratio = -np.real(v_d[1:-1][sel] / base[1:-1][sel]) / gammas[sel]
        measured = fd[sel]
        scale = np.abs(measured).max()
        assert np.max(np.abs(ratio - measured)) / scale < 1e-2

    def test_plug_channels_flagged_unreliable(self):
        spec = FilterBankSpec(FrequencyScale("log10q"), 4, 0.5, 50.0, SR / 2, 16, SR)
        fb = build_filterbank(spec, L)
        assert fb.plug_mask[0]
        s = RealSignal(make_rng(3).standard_normal(L), SR)
        g = oracle_phase_gradients(s, fb)
        assert not g.reliable[:, 0].any()


class TestGradientField:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(ParameterError):
            GradientField(np.zeros((3, 4)), np.zeros((4, 3)))

    def test_nonfinite_rejected(self):
        with pytest.raises(ParameterError):
            GradientField(np.full((2, 3), np.nan), np.zeros((2, 3)))
