import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqad.device import DeviceParams, bose_einstein
from cqad.errors import PopulationConvergenceError
from cqad.secular import (
    SecularState,
    secular_linewidths,
    secular_populations,
    secular_rates,
    secular_spectrum,
    secular_state,
    secular_transmission,
)
from cqad.steady_state import find_peaks

P = DeviceParams(gamma_q=7.9)


def product_populations(params, qubit_freq, levels):
    """Populations from the closed-form product, normalized by brute-force summation."""
    n_th = bose_einstein(params.omega_r, params.temperature)
    n_q = bose_einstein(qubit_freq, params.temperature)
    g, k = params.gamma_q, params.kappa
    rel = [1.0]
    for m in range(1, levels + 1):
        rel.append(rel[-1] * (g * n_q + k * n_th * (2 * m - 1)) / (g * (n_q + 1) + k * (n_th + 1) * (2 * m - 1)))
    total = rel[0] + 2 * sum(rel[1:])
    return rel[0] / total, np.array(rel[1:]) / total


class TestRates:
    def test_zero_temperature(self):
        r = secular_rates(P.replace(temperature=0.0), 3162.0, 8)
        assert r.gamma_g1 == 0.0
        assert r.gamma_1g == pytest.approx((7.9 + 1.56) / 2)

    def test_formulae(self):
        p = P.replace(temperature=98.5)
        r = secular_rates(p, 3162.0, 10)
        n = bose_einstein(3162.0, 98.5)
        assert r.gamma_up[3] == pytest.approx(7.9 / 4 * n + 1.56 / 4 * n * 7)
        assert r.gamma_down[3] == pytest.approx(7.9 / 4 * (n + 1) + 1.56 / 4 * (n + 1) * 5)
        assert np.isnan(r.gamma_up[0]) and np.isnan(r.gamma_down[1])
        finite = np.concatenate([r.gamma_up[1:], r.gamma_down[2:]])
        assert np.all(np.isfinite(finite)) and np.all(finite > 0)

    def test_no_qubit_decay_ratio(self):
        p = P.replace(gamma_q=0.0, temperature=200.0)
        r = secular_rates(p, 3162.0, 12)
        n = bose_einstein(3162.0, 200.0)
        ratios = r.up(np.arange(1, 12)) / r.down(np.arange(2, 13))
        np.testing.assert_allclose(ratios, n / (n + 1), rtol=1e-13)

    @settings(max_examples=40)
    @given(st.floats(0.0, 20.0), st.floats(0.01, 5.0), st.floats(1.0, 500.0), st.integers(1, 30))
    def test_upward_slower_than_downward(self, gamma, kappa, temp, n):
        p = DeviceParams(gamma_q=gamma, kappa=kappa, temperature=temp)
        r = secular_rates(p, 3162.0, n + 2)
        # every product factor of the population ladder is below one
        assert r.up(n) < r.down(n + 1)
        assert r.gamma_g1 < r.gamma_1g

    def test_n_max_validation(self):
        with pytest.raises(ValueError):
            secular_rates(P, 3162.0, 1)


class TestPopulations:
    def test_zero_temperature(self):
        s = secular_state(P.replace(temperature=0.0), 3162.0)
        assert s.rho_g == 1.0
        assert np.all(s.rho_n == 0)

    @pytest.mark.parametrize("temp", [16.5, 98.5, 254.0, 349.0])
    def test_against_product_formula(self, temp):
        p = P.replace(temperature=temp)
        s = secular_state(p, 3162.0)
        rho_g, rho_n = product_populations(p, 3162.0, len(s.rho_n))
        assert s.rho_g == pytest.approx(rho_g, rel=1e-12)
        np.testing.assert_allclose(s.rho_n, rho_n, rtol=1e-10, atol=1e-300)
        assert s.total == pytest.approx(1.0, abs=1e-10)
        assert np.all(np.diff(s.rho_n) < 0) or np.all(s.rho_n[-1] == 0)

    @pytest.mark.parametrize("temp", [50.5, 349.0])
    def test_geometric_without_qubit_decay(self, temp):
        p = P.replace(gamma_q=0.0, temperature=temp)
        s = secular_state(p, 3162.0)
        x = bose_einstein(3162.0, temp) / (bose_einstein(3162.0, temp) + 1)
        expected = s.rho_g * x ** np.arange(1, len(s.rho_n) + 1)
        np.testing.assert_allclose(s.rho_n, expected, rtol=1e-12, atol=1e-300)
        assert s.rho_g == pytest.approx(1.0 / (1.0 + 2.0 * x / (1.0 - x)), rel=1e-12)

    def test_auto_extends(self):
        p = P.replace(temperature=349.0)
        rates = secular_rates(p, 3162.0, 4)
        rho_g, rho_n = secular_populations(rates, 4)
        assert len(rho_n) > 4
        assert rho_n[-1] < 1e-12

    def test_cap(self):
        p = DeviceParams(gamma_q=0.0, temperature=1e7)
        with pytest.raises(PopulationConvergenceError):
            secular_state(p, 3162.0)


class TestLinewidths:
    def test_zero_temperature_beta(self):
        s = secular_state(P.replace(temperature=0.0), 3162.0)
        assert s.beta == pytest.approx((7.9 + 1.56) / 4)

    def test_alpha_formula(self):
        p = P.replace(temperature=98.5)
        r = secular_rates(p, 3162.0, 12)
        beta, alpha = secular_linewidths(r, 6)
        assert beta == pytest.approx(r.gamma_1g / 2 + r.gamma_up[1] + r.gamma_g1)
        assert alpha[0] == pytest.approx(r.gamma_down[2] + r.gamma_up[2] + r.gamma_up[1] + r.gamma_1g / 2)
        assert alpha[3] == pytest.approx(r.gamma_down[5] + r.gamma_up[5] + r.gamma_up[4] + r.gamma_down[4])

    def test_beta_monotone_in_temperature(self):
        betas = [secular_state(P.replace(temperature=t), 3162.0).beta for t in (0.0, 16.5, 98.5, 200.0, 349.0)]
        assert np.all(np.diff(betas) > 0)

    def test_alpha_linear_in_n(self):
        s = secular_state(P.replace(temperature=98.5), 3162.0)
        second = np.diff(s.alpha[1:20], 2)
        np.testing.assert_allclose(second, 0.0, atol=1e-12)
        assert np.all(np.diff(s.alpha[1:]) > 0)


class TestTransmission:
    def test_zero_temperature_two_lorentzians(self):
        p = P.replace(temperature=0.0)
        grid = np.linspace(3100.0, 3224.0, 125)
        t = secular_spectrum(p, 3162.0, grid).t_values
        beta = (7.9 + 1.56) / 4
        expected = sum(0.25 * 1.56 / (1j * (3162.0 + s * 18.5 - grid) + beta) for s in (1, -1))
        np.testing.assert_allclose(t, expected, atol=1e-14)

    def test_far_detuned(self):
        assert abs(secular_transmission(P, 3162.0, 3162.0 + 5000.0)) < 1e-3

    @pytest.mark.parametrize("temp", [16.5, 98.5, 349.0])
    def test_mirror_symmetry(self, temp):
        p = P.replace(temperature=temp)
        d = np.array([0.3, 7.6, 18.5, 30.0, 45.0])
        up = np.abs(secular_spectrum(p, 3162.0, 3162.0 + d).t_values)
        down = np.abs(secular_spectrum(p, 3162.0, 3162.0 - d[::-1]).t_values)[::-1]
        np.testing.assert_allclose(up, down, atol=1e-12)

    def test_inner_peaks_small_dissipation(self):
        p = DeviceParams(transmon_levels=2, kappa=0.4, gamma_q=6.0, temperature=98.5)
        res = secular_spectrum(p, 3162.0, np.linspace(3102.0, 3222.0, 1201))
        offsets = sorted(f - 3162.0 for f, _ in find_peaks(res))
        assert len(offsets) == 4
        inner = 18.5 * (math.sqrt(2) - 1)
        assert offsets[1] == pytest.approx(-inner, abs=0.5)
        assert offsets[2] == pytest.approx(inner, abs=0.5)

    def test_result_metadata(self):
        res = secular_spectrum(P, 3162.0, [3150.0, 3160.0])
        assert res.truncation_certified
        assert res.diagnostics["population_sum"] == pytest.approx(1.0)

    def test_off_resonance_warns(self):
        with pytest.warns(UserWarning):
            secular_transmission(P, 3300.0, 3162.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            secular_transmission(P, 3162.0, 3162.0)

    def test_state_total(self):
        s = SecularState(0.5, np.array([0.2, 0.05]), 1.0, np.array([1.0, 2.0]))
        assert s.total == pytest.approx(1.0)
