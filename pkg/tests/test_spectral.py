import math

import numpy as np
import pytest

from zenoband import (
    DetectorBand,
    EdgeProximity,
    HorizonExceeded,
    ModelParams,
    UnderResolvedOscillation,
    form_factor_grid,
    perturbative_decay,
    renormalized_form_factor,
    self_energy,
    spectral_function,
    stage_rates,
    survival_amplitude_spectral,
    validate_params,
)

GAMMA = 1.0
FIG_DELTA = 100.0 / (2 * math.pi)


@pytest.fixture(scope="module")
def free_grid():
    band = DetectorBand(eta=0.0, delta=1.0, n=6, center=0.0)
    return form_factor_grid(band, GAMMA, n_points=400, tol=1e-9)


@pytest.fixture(scope="module")
def solid_grid():
    # fig 3 solid curve: 2piDelta/gamma = 100, eta/gamma = 100
    band = DetectorBand(eta=100.0, delta=FIG_DELTA, n=6, center=0.0)
    return form_factor_grid(band, GAMMA, tol=1e-9)


class TestSelfEnergy:
    def test_free_case_is_wigner_weisskopf(self, free_grid):
        for E in (0.0, 0.3, -2.0, 40.0):
            sig = self_energy(free_grid, E)
            assert sig.real == pytest.approx(0.0, abs=1e-9)
            assert sig.imag == pytest.approx(-GAMMA / 2, rel=1e-9)

    def test_imaginary_part_is_sokhotski_plemelj(self, solid_grid):
        spline = solid_grid.interpolator()
        for E in (0.0, 5.0, -12.0):
            sig = self_energy(solid_grid, E)
            assert sig.imag == pytest.approx(-math.pi * float(spline(E)), rel=1e-14)

    def test_edge_proximity_raises(self, free_grid):
        with pytest.raises(EdgeProximity):
            self_energy(free_grid, free_grid.window[1] - 1e-9)

    def test_suppressed_line_width_pinned_by_form_factor(self, solid_grid):
        g2_line = renormalized_form_factor(solid_grid.band, GAMMA, 0.0, 1e-10)
        sig = self_energy(solid_grid, 0.0)
        assert sig.imag == pytest.approx(-math.pi * g2_line, rel=1e-5)

    def test_line_width_matches_regression_constant(self, solid_grid):
        # eta/2piDelta = 1 at band center: g2(omega) depends only on gamma
        # and the ratios, so the pinned n=6 constant applies here too
        from test_formfactor import G2_REGRESSION_N6_RATIO1

        sig = self_energy(solid_grid, 0.0)
        assert sig.imag == pytest.approx(-math.pi * G2_REGRESSION_N6_RATIO1, rel=1e-4)


class TestSpectralFunction:
    def test_free_case_is_unit_lorentzian(self, free_grid):
        sf = spectral_function(free_grid, 0.0)
        assert sf.normalization_defect < 1e-4
        assert np.all(sf.A >= 0.0)
        half = sf.A.max() / 2
        above = sf.E[sf.A >= half]
        assert above.max() - above.min() == pytest.approx(GAMMA, rel=0.02)

    def test_monitored_line_is_narrowed(self, solid_grid):
        sf = spectral_function(solid_grid, 0.0)
        assert sf.normalization_defect < 1e-4
        half = sf.A.max() / 2
        above = sf.E[sf.A >= half]
        width = above.max() - above.min()
        _, supp = stage_rates(validate_params(ModelParams(
            gamma=GAMMA, band=DetectorBand(eta=100.0, delta=FIG_DELTA, n=6))))
        assert width == pytest.approx(supp, rel=0.05)
        assert width < GAMMA


class TestSurvivalAmplitude:
    def test_normalization_at_t_zero(self, free_grid):
        sf = spectral_function(free_grid, 0.0)
        f0 = survival_amplitude_spectral(sf, 0.0)
        assert abs(f0) == pytest.approx(1.0, abs=2e-4)

    def test_free_survival_is_exponential(self, free_grid):
        sf = spectral_function(free_grid, 0.0)
        t = np.linspace(0.0, 5.0, 101)
        s = np.abs(survival_amplitude_spectral(sf, t)) ** 2
        assert np.abs(s - np.exp(-GAMMA * t)).max() < 1e-4

    def test_horizon_guard(self, free_grid):
        sf = spectral_function(free_grid, 0.0)
        with pytest.raises(HorizonExceeded):
            survival_amplitude_spectral(sf, 1e6)


class TestPerturbativeDecay:
    def test_free_case_is_exactly_linear(self, free_grid):
        t = np.array([0.0, 0.2, 1.0, 4.0])
        got = perturbative_decay(free_grid, 0.0, t)
        np.testing.assert_allclose(got, GAMMA * t, rtol=1e-9, atol=1e-12)

    def test_two_stage_slopes(self, solid_grid):
        delta = FIG_DELTA
        early = perturbative_decay(solid_grid, 0.0, 0.02 / delta)
        assert early == pytest.approx(GAMMA * 0.02 / delta, rel=0.02)
        _, supp = stage_rates(validate_params(ModelParams(
            gamma=GAMMA, band=DetectorBand(eta=100.0, delta=FIG_DELTA, n=6))))
        t_late = 40.0 / delta
        late = perturbative_decay(solid_grid, 0.0, t_late)
        assert late == pytest.approx(supp * t_late, rel=0.05)

    def test_oscillation_cap(self, solid_grid):
        with pytest.raises(UnderResolvedOscillation):
            perturbative_decay(solid_grid, 0.0, 5.0, max_points=100)


class TestStageRates:
    def test_no_detector_rates_equal(self):
        m = validate_params(ModelParams(gamma=2.0, band=DetectorBand(eta=0.0, delta=1.0, n=6)))
        free, supp = stage_rates(m)
        assert free == supp == 2.0

    def test_flat_band_half_rate(self):
        m = validate_params(ModelParams(
            gamma=1.0, band=DetectorBand(eta=2.0, delta=1.0, n=None)))
        free, supp = stage_rates(m)
        assert supp / free == pytest.approx(0.5, abs=1e-6)

    def test_flat_band_strong_monitoring_closed_form(self):
        # {2piDelta/gamma, eta/gamma} = {1000, 1000}: 2Delta/eta = 1/pi
        delta = 1000.0 / (2 * math.pi)
        m = validate_params(ModelParams(
            gamma=1.0, band=DetectorBand(eta=1000.0, delta=delta, n=None)))
        free, supp = stage_rates(m)
        want = (2.0 / math.pi) * math.atan(1.0 / math.pi)
        assert supp / free == pytest.approx(want, rel=1e-6)

    @pytest.mark.parametrize("eta,delta,n", [
        (1.0, 1.0, 6), (10.0, 1.0, 6), (3.0, 0.5, 2), (5.0, 2.0, 12),
        (2.0, 1.0, None), (50.0, 10.0, None),
    ])
    def test_centered_monitoring_never_enhances(self, eta, delta, n):
        m = validate_params(ModelParams(
            gamma=1.0, band=DetectorBand(eta=eta, delta=delta, n=n)))
        free, supp = stage_rates(m)
        assert supp <= free + 1e-12


class TestCrossMethod:
    def test_solid_set_routes_agree(self, solid_grid):
        from zenoband import discretize_continuum, propagate

        m = validate_params(ModelParams(
            gamma=GAMMA, band=DetectorBand(eta=100.0, delta=FIG_DELTA, n=6)))
        ts = np.linspace(0.0, 5.0, 101)
        s_dyn = propagate(discretize_continuum(m), ts).s
        sf = spectral_function(solid_grid, 0.0)
        s_spec = np.abs(survival_amplitude_spectral(sf, ts)) ** 2
        assert np.abs(s_dyn - s_spec).max() < 1e-3
