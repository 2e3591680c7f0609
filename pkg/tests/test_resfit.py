import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpwloss import resfit
from cpwloss.errors import FitError
from conftest import default_grid


def draw_params(rng) -> resfit.NotchParams:
    """One random physical parameter set (log-uniform Q factors)."""
    while True:
        ql = 10 ** rng.uniform(3, 6)
        qc = 10 ** rng.uniform(3, 6)
        phi = rng.uniform(-1.0, 1.0)
        if 1.0 / ql - math.cos(phi) / qc <= 0:
            continue
        return resfit.NotchParams(
            fr_hz=rng.uniform(4e9, 8e9),
            ql=ql,
            qc_mag=qc,
            phi_rad=phi,
            amp=10 ** rng.uniform(-1, 1),
            phase0_rad=rng.uniform(-math.pi, math.pi),
            tau_s=rng.uniform(0.0, 100e-9),
        )


def assert_recovered(p: resfit.NotchParams, r: resfit.NotchFitResult, rel=1e-3):
    q = r.params
    assert q.fr_hz == pytest.approx(p.fr_hz, rel=rel)
    assert q.ql == pytest.approx(p.ql, rel=rel)
    assert q.qc_mag == pytest.approx(p.qc_mag, rel=rel)
    assert q.amp == pytest.approx(p.amp, rel=rel)
    assert q.phi_rad == pytest.approx(p.phi_rad, rel=rel, abs=rel)
    assert q.phase0_rad == pytest.approx(p.phase0_rad, rel=rel, abs=rel)
    assert q.tau_s == pytest.approx(p.tau_s, rel=rel, abs=1e-12)
    assert r.qi == pytest.approx(p.qi, rel=rel)


class TestModel:
    def test_on_resonance_closed_form(self):
        p = resfit.NotchParams(fr_hz=5e9, ql=5e4, qc_mag=1e5, phi_rad=0.3)
        val = resfit.model_s21(p, 5e9)
        expect = 1.0 - (p.ql / p.qc_mag) * np.exp(1j * p.phi_rad)
        assert val == pytest.approx(expect, rel=1e-15)

    def test_off_resonance_baseline(self):
        p = resfit.NotchParams(
            fr_hz=5e9, ql=5e4, qc_mag=1e5, phi_rad=0.3,
            amp=0.7, phase0_rad=0.4, tau_s=10e-9,
        )
        f = 5e9 * (1 + 1000.0 / p.ql)  # 1000 linewidths out
        val = resfit.model_s21(p, f)
        baseline = p.amp * np.exp(1j * (p.phase0_rad - 2 * np.pi * f * p.tau_s))
        assert abs(val - baseline) < 1e-3 * abs(baseline)

    def test_circle_diameter_in_calibrated_plane(self):
        p = resfit.NotchParams(fr_hz=5e9, ql=5e4, qc_mag=1.5e5, phi_rad=0.2,
                               amp=0.9, phase0_rad=0.3, tau_s=5e-9)
        f = default_grid(p)
        z = resfit.model_s21(p, f)
        calibrated = z / (p.amp * np.exp(1j * (p.phase0_rad - 2 * np.pi * f * p.tau_s)))
        fit = resfit.circle_fit(calibrated)
        assert 2 * fit.radius == pytest.approx(p.ql / p.qc_mag, rel=1e-6)

    def test_qi_physicality(self):
        good = resfit.NotchParams(fr_hz=5e9, ql=5e4, qc_mag=1e5, phi_rad=0.0)
        assert good.is_physical and good.qi > good.ql
        bad = resfit.NotchParams(fr_hz=5e9, ql=2e5, qc_mag=1e5, phi_rad=0.0)
        assert not bad.is_physical

    def test_param_validation(self):
        with pytest.raises(ValueError):
            resfit.NotchParams(fr_hz=-1, ql=1e4, qc_mag=1e5, phi_rad=0.0)
        with pytest.raises(ValueError):
            resfit.NotchParams(fr_hz=5e9, ql=1e4, qc_mag=1e5, phi_rad=2.0)


class TestSynth:
    def test_noiseless_equals_model(self):
        p = resfit.NotchParams(fr_hz=5e9, ql=5e4, qc_mag=1e5, phi_rad=0.1)
        f = default_grid(p, n=101)
        tr = resfit.synth_trace(p, f, 0.0, seed=7)
        assert np.array_equal(tr.s21, resfit.model_s21(p, f))

    def test_seed_determinism(self):
        p = resfit.NotchParams(fr_hz=5e9, ql=5e4, qc_mag=1e5, phi_rad=0.1)
        f = default_grid(p, n=101)
        a = resfit.synth_trace(p, f, 1e-3, seed=42)
        b = resfit.synth_trace(p, f, 1e-3, seed=42)
        assert np.array_equal(a.s21, b.s21)
        c = resfit.synth_trace(p, f, 1e-3, seed=43)
        assert not np.array_equal(a.s21, c.s21)

    def test_noise_statistics(self):
        p = resfit.NotchParams(fr_hz=5e9, ql=5e4, qc_mag=1e5, phi_rad=0.0)
        f = np.linspace(4.9e9, 5.1e9, 10_000)
        sigma = 2e-3
        tr = resfit.synth_trace(p, f, sigma, seed=3)
        resid = tr.s21 - resfit.model_s21(p, f)
        assert np.std(resid.real) == pytest.approx(sigma, rel=0.05)
        assert np.std(resid.imag) == pytest.approx(sigma, rel=0.05)


class TestDelay:
    def wide_trace(self, tau_s, noise=0.0, seed=0):
        p = resfit.NotchParams(
            fr_hz=5.95e9, ql=7e4, qc_mag=1e5, phi_rad=0.3, tau_s=tau_s
        )
        f = default_grid(p, span_linewidths=100.0, n=4001)
        return resfit.synth_trace(p, f, noise, seed=seed)

    def test_round_trip_40ns(self):
        d = resfit.estimate_delay(self.wide_trace(40e-9))
        assert d.tau_s == pytest.approx(40e-9, abs=0.5e-9)

    def test_zero_delay(self):
        d = resfit.estimate_delay(self.wide_trace(0.0))
        assert d.tau_s == pytest.approx(0.0, abs=0.5e-9)

    def test_pure_noise_flagged_by_stderr(self):
        rng = np.random.default_rng(5)
        f = np.linspace(5.9e9, 6.0e9, 512)
        z = rng.standard_normal(512) + 1j * rng.standard_normal(512)
        d = resfit.estimate_delay(resfit.S21Trace(f, z))
        assert d.stderr_s > abs(d.tau_s) * 0.1  # estimate not trustworthy

    def test_too_short_rejected(self):
        f = np.linspace(5.9e9, 6.0e9, 8)
        with pytest.raises(FitError):
            resfit.estimate_delay(resfit.S21Trace(f, np.ones(8, complex)))


class TestCircleFit:
    def test_three_exact_points(self):
        pts = np.exp(2j * np.pi * np.array([0.0, 1 / 3, 2 / 3]))
        fit = resfit.circle_fit(pts)
        assert abs(fit.center) < 1e-12
        assert fit.radius == pytest.approx(1.0, abs=1e-12)

    def test_noisy_circle_radius(self):
        rng = np.random.default_rng(11)
        th = np.linspace(0, 2 * np.pi, 360, endpoint=False)
        pts = (2.0 + 1j) + 0.5 * np.exp(1j * th)
        pts = pts + 1e-3 * (rng.standard_normal(360) + 1j * rng.standard_normal(360))
        fit = resfit.circle_fit(pts)
        assert fit.radius == pytest.approx(0.5, abs=1e-3)
        assert fit.center == pytest.approx(2.0 + 1j, abs=1e-3)

    def test_identical_points_rejected(self):
        with pytest.raises(FitError):
            resfit.circle_fit(np.full(10, 1.0 + 1.0j))

    def test_collinear_rejected(self):
        with pytest.raises(FitError):
            resfit.circle_fit(np.linspace(0, 1, 20) + 0.5j)


class TestPhaseFit:
    def test_noiseless_exact(self):
        p = resfit.NotchParams(fr_hz=5.95e9, ql=8e4, qc_mag=1.2e5, phi_rad=0.0)
        f = default_grid(p)
        z = resfit.model_s21(p, f)
        circ = resfit.circle_fit(z)
        fit = resfit.phase_fit(resfit.S21Trace(f, z), circ.center)
        assert fit.fr_hz == pytest.approx(p.fr_hz, rel=1e-9)
        assert fit.ql == pytest.approx(p.ql, rel=1e-9)

    def test_off_grid_resonance(self):
        p = resfit.NotchParams(fr_hz=5.95e9 + 13.7, ql=8e4, qc_mag=1.2e5, phi_rad=0.0)
        half = 5 * 5.95e9 / p.ql
        f = np.linspace(5.95e9 - half, 5.95e9 + half, 801)  # fr between grid points
        z = resfit.model_s21(p, f)
        circ = resfit.circle_fit(z)
        fit = resfit.phase_fit(resfit.S21Trace(f, z), circ.center)
        assert abs(fit.fr_hz - p.fr_hz) < (f[1] - f[0])

    def test_monotonic_phase_rejected(self):
        f = np.linspace(5.9e9, 6.0e9, 256)
        z = np.exp(1j * np.linspace(0.0, 2.0, 256)) + 2.0
        with pytest.raises(FitError):
            resfit.phase_fit(resfit.S21Trace(f, z), 0.0 + 0.0j)


class TestFitNotch:
    def test_reference_operating_point_noiseless(self, operating_point):
        f = default_grid(operating_point)
        tr = resfit.synth_trace(operating_point, f, 0.0, seed=0)
        res = resfit.fit_notch(tr)
        assert_recovered(operating_point, res)
        assert res.qi == pytest.approx(2.571e5, rel=1e-3)

    def test_round_trip_random_draws(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            p = draw_params(rng)
            tr = resfit.synth_trace(p, default_grid(p), 0.0, seed=1)
            assert_recovered(p, resfit.fit_notch(tr))

    def test_noisy_qi_tolerance(self, operating_point):
        f = default_grid(operating_point)
        errs = []
        for seed in range(25):
            tr = resfit.synth_trace(operating_point, f, 1e-3, seed=seed)
            res = resfit.fit_notch(tr)
            errs.append(abs(res.qi / operating_point.qi - 1.0))
        assert np.percentile(errs, 95) < 0.05

    def test_qi_never_below_ql(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            p = draw_params(rng)
            tr = resfit.synth_trace(p, default_grid(p), 0.0, seed=2)
            res = resfit.fit_notch(tr)
            assert res.qi >= res.params.ql * (1 - 1e-9)

    @given(scale=st.floats(min_value=0.05, max_value=20.0))
    @settings(max_examples=10, deadline=None)
    def test_amplitude_scale_invariance(self, operating_point, scale):
        f = default_grid(operating_point, n=801)
        tr = resfit.synth_trace(operating_point, f, 0.0, seed=0)
        base = resfit.fit_notch(tr)
        scaled = resfit.fit_notch(resfit.S21Trace(f, tr.s21 * scale))
        assert scaled.params.fr_hz == pytest.approx(base.params.fr_hz, rel=1e-9)
        assert scaled.params.ql == pytest.approx(base.params.ql, rel=1e-9)
        assert scaled.params.qc_mag == pytest.approx(base.params.qc_mag, rel=1e-9)
        assert scaled.params.phi_rad == pytest.approx(base.params.phi_rad, abs=1e-9)
        assert scaled.qi == pytest.approx(base.qi, rel=1e-9)
        assert scaled.params.amp == pytest.approx(base.params.amp * scale, rel=1e-9)

    def test_frequency_shift_invariance(self, operating_point):
        from dataclasses import replace

        f = default_grid(operating_point, n=801)
        tr = resfit.synth_trace(operating_point, f, 0.0, seed=0)
        base = resfit.fit_notch(tr)
        df = 2.5e8
        shifted_p = replace(operating_point, fr_hz=operating_point.fr_hz + df, tau_s=0.0)
        p0 = replace(operating_point, tau_s=0.0)
        tr0 = resfit.synth_trace(p0, f, 0.0, seed=0)
        tr_shift = resfit.synth_trace(shifted_p, f + df, 0.0, seed=0)
        r0 = resfit.fit_notch(tr0)
        r1 = resfit.fit_notch(tr_shift)
        assert r1.params.fr_hz - r0.params.fr_hz == pytest.approx(df, rel=1e-9)
        assert r1.params.ql == pytest.approx(r0.params.ql, rel=1e-6)
        assert r1.qi == pytest.approx(r0.qi, rel=1e-6)

    def test_no_dip_raises(self):
        f = np.linspace(5.9e9, 6.0e9, 512)
        flat = 0.8 * np.exp(1j * (0.3 - 2 * np.pi * f * 20e-9))
        with pytest.raises(FitError, match="no resonance"):
            resfit.fit_notch(resfit.S21Trace(f, flat))
        rng = np.random.default_rng(1)
        noisy = flat + 1e-3 * (rng.standard_normal(512) + 1j * rng.standard_normal(512))
        with pytest.raises(FitError, match="no resonance"):
            resfit.fit_notch(resfit.S21Trace(f, noisy))

    def test_two_dips_fits_the_deeper(self):
        deep = resfit.NotchParams(fr_hz=5.95e9, ql=6e4, qc_mag=1e5, phi_rad=0.0)
        shallow = resfit.NotchParams(fr_hz=5.9525e9, ql=6e4, qc_mag=4e5, phi_rad=0.0)
        f = np.linspace(5.949e9, 5.954e9, 4001)
        z = resfit.model_s21(deep, f) * resfit.model_s21(shallow, f)
        res = resfit.fit_notch(resfit.S21Trace(f, z))
        assert abs(res.params.fr_hz - deep.fr_hz) < abs(res.params.fr_hz - shallow.fr_hz)
        assert res.params.fr_hz == pytest.approx(deep.fr_hz, rel=1e-5)

    def test_stderr_tracks_noise(self, operating_point):
        f = default_grid(operating_point)
        quiet = resfit.fit_notch(resfit.synth_trace(operating_point, f, 1e-4, seed=0))
        loud = resfit.fit_notch(resfit.synth_trace(operating_point, f, 1e-2, seed=0))
        assert loud.stderr["qi"] > 10 * quiet.stderr["qi"]
        assert quiet.rms_residual == pytest.approx(1e-4, rel=0.1)


class TestResonanceShift:
    def test_reference_is_zero(self):
        series = [(0.1, 5.95e9), (0.5, 5.9499e9), (1.0, 5.9497e9)]
        out = resfit.resonance_shift(series, 0.1)
        assert out[0] == (0.1, 0.0)
        assert out[1][1] == pytest.approx(-1e5, rel=1e-9)

    def test_nearest_reference(self):
        series = [(0.1, 5.95e9), (0.5, 5.9499e9)]
        out = resfit.resonance_shift(series, 0.11)
        assert out[0][1] == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            resfit.resonance_shift([], 0.1)
