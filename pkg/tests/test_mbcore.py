import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpwloss import mbcore
from cpwloss.constants import KB_EV
from cpwloss.errors import ApproximationWarning
from conftest import OMEGA0

from oracles import bessel_k0_i0_reference

DELTA0 = 1.623e-3  # eV, reference-film gap (Tc = 10.7 K) used throughout


class TestGap:
    def test_gap_at_zero_tc_10p7(self):
        assert mbcore.gap_at_zero(10.7) == pytest.approx(1.623e-3, abs=1e-6)

    def test_gap_at_zero_zero(self):
        assert mbcore.gap_at_zero(0.0) == 0.0

    def test_gap_at_zero_1k(self):
        # direct arithmetic 1.76 * kB * 1 K
        assert mbcore.gap_at_zero(1.0) == pytest.approx(1.76 * KB_EV, rel=1e-12)
        assert mbcore.gap_at_zero(1.0) == pytest.approx(1.5165e-4, abs=2e-8)

    def test_gap_at_zero_negative_raises(self):
        with pytest.raises(ValueError):
            mbcore.gap_at_zero(-1.0)

    def test_gap_at_temperature_zero_t(self):
        assert mbcore.gap_at_temperature(DELTA0, 0.0, 10.7) == DELTA0

    def test_gap_at_temperature_tc_over_3(self):
        # tanh(1.74*sqrt(2)) = tanh(2.4607) = 0.98554: the gap is still
        # within 1.5% of delta0 at Tc/3
        val = mbcore.gap_at_temperature(DELTA0, 10.7 / 3.0, 10.7)
        assert val == pytest.approx(DELTA0 * math.tanh(1.74 * math.sqrt(2.0)), rel=1e-12)
        assert val >= 0.985 * DELTA0

    def test_gap_near_tc_collapses(self):
        assert mbcore.gap_at_temperature(DELTA0, 0.999 * 10.7, 10.7) < 0.1 * DELTA0

    def test_gap_closed_raises(self):
        with pytest.raises(ValueError):
            mbcore.gap_at_temperature(DELTA0, 10.7, 10.7)

    def test_gap_constant_model(self):
        assert mbcore.gap_at_temperature(DELTA0, 3.0, 10.7, model="constant") == DELTA0

    @given(st.floats(min_value=0.01, max_value=0.98))
    def test_gap_monotone_nonincreasing(self, frac):
        tc = 10.7
        lo = mbcore.gap_at_temperature(DELTA0, frac * tc, tc)
        hi = mbcore.gap_at_temperature(DELTA0, 0.5 * frac * tc, tc)
        assert lo <= hi <= DELTA0


class TestBessel:
    def test_reference_point_x1(self):
        k0, i0 = mbcore.modified_bessel(1.0)
        assert k0 == pytest.approx(0.42102443824070834, rel=1e-12)
        assert i0 == pytest.approx(1.2660658777520084, rel=1e-12)

    def test_i0_at_zero(self):
        assert mbcore.bessel_i0(0.0) == 1.0

    def test_k0_small_x_log_asymptote(self):
        # K0(x) -> -ln(x/2) - gamma as x -> 0+
        gamma = 0.5772156649015329
        for x in (1e-4, 1e-6):
            expect = -math.log(x / 2.0) - gamma
            assert mbcore.bessel_k0(x) == pytest.approx(expect, rel=1e-7)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            mbcore.bessel_k0(0.0)
        with pytest.raises(ValueError):
            mbcore.bessel_k0(-1.0)
        with pytest.raises(ValueError):
            mbcore.bessel_i0(-1.0)
        with pytest.raises(OverflowError):
            mbcore.bessel_i0(701.0)

    def test_against_series_reference_50_points(self):
        for x in np.logspace(-6, np.log10(50.0), 50):
            k0_ref, i0_ref = bessel_k0_i0_reference(float(x))
            k0, i0 = mbcore.modified_bessel(float(x))
            assert abs(k0 / float(k0_ref) - 1.0) <= 1e-10
            assert abs(i0 / float(i0_ref) - 1.0) <= 1e-10


class TestSigmaNorm:
    def test_sigma1_vanishes_at_low_t(self):
        s1, _ = mbcore.mb_sigma_norm(0.05, OMEGA0, DELTA0)
        assert s1 < 1e-100

    def test_sigma2_zero_t_limits_both_prefactors(self):
        hw = mbcore.HBAR_EVS * OMEGA0
        _, s2_four = mbcore.mb_sigma_norm(0.05, OMEGA0, DELTA0, "four")
        _, s2_pi = mbcore.mb_sigma_norm(0.05, OMEGA0, DELTA0, "pi")
        assert s2_four == pytest.approx(4.0 * DELTA0 / hw, rel=1e-12)
        assert s2_pi == pytest.approx(math.pi * DELTA0 / hw, rel=1e-12)

    def test_sigma1_value_at_1k(self):
        # direct closed-form evaluation, cross-checked against the full oracle
        s1, _ = mbcore.mb_sigma_norm(1.0, OMEGA0, DELTA0)
        assert s1 == pytest.approx(5.1e-7, rel=0.05)
        s1_full, _ = mbcore.mb_full_oracle(1.0, OMEGA0, DELTA0)
        assert s1 == pytest.approx(s1_full, rel=0.05)

    def test_nonpositive_temperature_raises(self):
        with pytest.raises(ValueError):
            mbcore.mb_sigma_norm(0.0, OMEGA0, DELTA0)
        with pytest.raises(ValueError):
            mbcore.mb_sigma_norm(-1.0, OMEGA0, DELTA0)

    def test_pair_breaking_raises(self):
        omega_big = 2.1 * DELTA0 / mbcore.HBAR_EVS
        with pytest.raises(ValueError):
            mbcore.mb_sigma_norm(1.0, omega_big, DELTA0)

    def test_strained_regime_warns(self):
        with pytest.warns(ApproximationWarning):
            mbcore.mb_sigma_norm(7.0, OMEGA0, DELTA0)  # kB*T > delta0/3
        omega_mid = 0.2 * DELTA0 / mbcore.HBAR_EVS
        with pytest.warns(ApproximationWarning):
            mbcore.mb_sigma_norm(1.0, omega_mid, DELTA0)  # hw > delta0/10

    def test_unknown_prefactor_rejected(self):
        with pytest.raises(ValueError):
            mbcore.mb_sigma_norm(1.0, OMEGA0, DELTA0, "bogus")

    def test_monotone_300_point_grid(self):
        temps = np.linspace(0.1, 3.0, 300)
        s1, s2 = mbcore.mb_sigma_norm(temps, OMEGA0, DELTA0)
        assert np.all(s1 >= 0) and np.all(s2 >= 0)
        assert np.all(np.diff(s1) > 0)
        # sigma2 decreases; in float64 the change underflows below ~0.5 K,
        # so strictness is checked on the pair-breaking deficit instead
        assert np.all(np.diff(s2) <= 0)
        deficit = mbcore.mb_sigma2_deficit(temps, OMEGA0, DELTA0)
        assert np.all(np.diff(deficit) > 0)

    def test_activation_dominance(self):
        # sigma1 / exp(-delta0/kBT) spans less than a decade over [0.5, 3] K
        temps = np.linspace(0.5, 3.0, 40)
        s1, _ = mbcore.mb_sigma_norm(temps, OMEGA0, DELTA0)
        boltz = np.exp(-DELTA0 / (KB_EV * temps))
        ratio = s1 / boltz
        assert ratio.max() / ratio.min() < 10.0
        assert boltz.max() / boltz.min() > 1e10


class TestComplexConductivity:
    def test_sigma_n_value(self, nbn_film):
        assert nbn_film.sigma_n == pytest.approx(6.27e4, rel=1e-3)
        assert nbn_film.sigma_n == pytest.approx(1.0 / (159.5 * 1e-7), rel=1e-12)

    def test_monotone_between_two_temps(self, nbn_film):
        lo = mbcore.complex_conductivity(nbn_film, 0.5, OMEGA0)
        hi = mbcore.complex_conductivity(nbn_film, 3.0, OMEGA0)
        assert lo.sigma1_norm < hi.sigma1_norm
        assert lo.sigma2_norm > hi.sigma2_norm

    def test_record_carries_conditions(self, nbn_film):
        rec = mbcore.complex_conductivity(nbn_film, 1.2, OMEGA0)
        assert rec.temperature_k == 1.2
        assert rec.omega_rad == OMEGA0
        assert rec.sigma == pytest.approx(
            complex(rec.sigma1, -rec.sigma2), rel=1e-15
        )

    def test_linear_in_inverse_sheet_resistance(self, nbn_film):
        from dataclasses import replace

        doubled = replace(nbn_film, sheet_resistance_ohm=2 * 159.5)
        a = mbcore.complex_conductivity(nbn_film, 1.5, OMEGA0)
        b = mbcore.complex_conductivity(doubled, 1.5, OMEGA0)
        assert b.sigma1_norm == a.sigma1_norm
        assert b.sigma2_norm == a.sigma2_norm
        assert b.sigma1 == pytest.approx(a.sigma1 / 2.0, rel=1e-12)

    def test_full_sweep_shape(self, nbn_film):
        temps = np.linspace(0.1, 3.0, 50)
        s1 = np.array(
            [mbcore.complex_conductivity(nbn_film, t, OMEGA0).sigma1 for t in temps]
        )
        s2 = np.array(
            [mbcore.complex_conductivity(nbn_film, t, OMEGA0).sigma2 for t in temps]
        )
        assert np.all(np.diff(s1) > 0)
        assert np.all(np.diff(s2) <= 0)


class TestMaterialParams:
    def test_default_gap(self, nbn_film):
        assert nbn_film.delta0_ev == pytest.approx(mbcore.gap_at_zero(10.7), rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            mbcore.MaterialParams(
                tc_kelvin=-1, sheet_resistance_ohm=1, thickness_m=1e-7,
                n0_states=1e28, alpha=0.5,
            )
        with pytest.raises(ValueError):
            mbcore.MaterialParams(
                tc_kelvin=10, sheet_resistance_ohm=1, thickness_m=1e-7,
                n0_states=1e28, alpha=1.5,
            )
        with pytest.raises(ValueError):
            mbcore.MaterialParams(
                tc_kelvin=10, sheet_resistance_ohm=1, thickness_m=1e-7,
                n0_states=1e28, alpha=0.5, delta0_ev=-1e-3,
            )

    def test_dirty_limit_flag(self):
        kwargs = dict(
            tc_kelvin=10.7, sheet_resistance_ohm=159.5, thickness_m=1e-7,
            n0_states=1.86e28, alpha=0.5,
        )
        assert mbcore.MaterialParams(**kwargs).dirty_limit is None
        dirty = mbcore.MaterialParams(
            **kwargs, mean_free_path_m=1e-9, coherence_length_m=5e-9,
            penetration_depth_m=400e-9,
        )
        assert dirty.dirty_limit is True
        clean = mbcore.MaterialParams(
            **kwargs, mean_free_path_m=4e-9, coherence_length_m=5e-9,
            penetration_depth_m=400e-9,
        )
        assert clean.dirty_limit is False


class TestFullOracle:
    def test_agreement_with_closed_form(self):
        for t in np.linspace(1.0, 3.0, 5):
            s1_full, _ = mbcore.mb_full_oracle(float(t), OMEGA0, DELTA0)
            s1, _ = mbcore.mb_sigma_norm(float(t), OMEGA0, DELTA0)
            assert s1 == pytest.approx(s1_full, rel=0.05)

    def test_zero_t_sigma2_limit(self):
        hw = mbcore.HBAR_EVS * OMEGA0
        _, s2_full = mbcore.mb_full_oracle(0.05, OMEGA0, DELTA0)
        assert s2_full == pytest.approx(math.pi * DELTA0 / hw, rel=1e-3)

    def test_four_mode_prefactor_ratio(self):
        _, s2_full = mbcore.mb_full_oracle(0.05, OMEGA0, DELTA0)
        _, s2_four = mbcore.mb_sigma_norm(0.05, OMEGA0, DELTA0, "four")
        ratio = s2_four / s2_full
        assert ratio == pytest.approx(4.0 / math.pi, rel=1e-3)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            mbcore.mb_full_oracle(0.0, OMEGA0, DELTA0)
        with pytest.raises(ValueError):
            mbcore.mb_full_oracle(1.0, 2.5 * DELTA0 / mbcore.HBAR_EVS, DELTA0)
