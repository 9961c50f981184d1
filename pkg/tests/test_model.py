import math

import numpy as np
import pytest
from scipy.integrate import quad

from anssns.covariate import CoordinateX
from anssns.errors import ConfigurationError
from anssns.geometry import Window
from anssns.model import (
    AnisotropyField,
    LogNormalMeanVar,
    LogUniform,
    ModelSpec,
    OmegaParams,
    Uniform,
)
from helpers import constant_field, unit_spec


class TestSigmaLinks:
    def test_intercept_only_at_origin(self):
        f = AnisotropyField(
            OmegaParams((math.log(0.01), 1.0), (math.log(0.01),), (0.0,)),
            cov_x=(CoordinateX(),),
        )
        assert f.sigma_x_at(0.0, 0.7) == pytest.approx(0.01)

    def test_exponential_link_with_covariate(self):
        f = AnisotropyField(
            OmegaParams((math.log(0.01), 1.5), (math.log(0.01),), (0.0,)),
            cov_x=(CoordinateX(),),
        )
        assert f.sigma_x_at(1.0, 0.2) == pytest.approx(0.01 * math.exp(1.5))

    def test_constant_field_value(self):
        f = constant_field(0.02 / 0.7, 0.7 * 0.02, 0.0)
        assert f.sigma_x_at(0.4, 0.9) == pytest.approx(0.0285714285714)
        assert f.sigma_y_at(0.4, 0.9) == pytest.approx(0.014)

    def test_strictly_positive_for_wild_coefficients(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            coefs = tuple(rng.normal(0, 5, 2))
            f = AnisotropyField(
                OmegaParams(coefs, (0.0,), (0.0,)), cov_x=(CoordinateX(),)
            )
            x, y = rng.uniform(-2, 2, 2)
            assert f.sigma_x_at(x, y) > 0

    def test_coefficient_count_mismatch(self):
        with pytest.raises(ConfigurationError):
            AnisotropyField(OmegaParams((0.0, 1.0), (0.0,), (0.0,)))


class TestThetaLink:
    def test_intercept_only(self):
        f = constant_field(0.04, 0.01, math.pi / 4)
        assert f.theta_at(0.3, 0.8) == pytest.approx(math.pi / 4)

    def test_tanh_covariate(self):
        f = AnisotropyField(
            OmegaParams((0.0,), (0.0,), (math.pi / 4, 0.5)),
            cov_theta=(CoordinateX(),),
        )
        expected = (math.pi / 4 + math.pi * math.tanh(0.5)) % math.pi
        assert f.theta_at(1.0, 0.5) == pytest.approx(expected)
        assert f.theta_at(1.0, 0.5) == pytest.approx(2.2371820297, abs=1e-9)

    def test_mod_pi_periodicity(self):
        f = AnisotropyField(
            OmegaParams((0.0,), (0.0,), (math.pi / 4, 1.0)),
            cov_theta=(CoordinateX(),),
        )
        # with tanh saturated the angle comes back around to the intercept
        assert f.theta_at(50.0, 0.0) == pytest.approx(math.pi / 4, abs=1e-8)

    def test_range_is_half_circle(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            f = AnisotropyField(
                OmegaParams((0.0,), (0.0,), tuple(rng.normal(0, 4, 2))),
                cov_theta=(CoordinateX(),),
            )
            th = f.theta_at(rng.uniform(-3, 3), 0.0)
            assert 0.0 <= th < math.pi

    def test_intercept_shift_by_pi_changes_nothing(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            sx, sy = rng.uniform(0.01, 0.1, 2)
            t0 = rng.uniform(0, math.pi)
            a = constant_field(sx, sy, t0).sigma_at(0.5, 0.5)
            b = constant_field(sx, sy, t0 + math.pi).sigma_at(0.5, 0.5)
            assert abs(a.a11 - b.a11) < 1e-12
            assert abs(a.a12 - b.a12) < 1e-12
            assert abs(a.a22 - b.a22) < 1e-12

    def test_role_swap_identity(self):
        # swapping sigma coefficient vectors and turning by pi/2 is invisible
        rng = np.random.default_rng(4)
        for _ in range(20):
            sx, sy = rng.uniform(0.01, 0.1, 2)
            t0 = rng.uniform(0, math.pi)
            u = rng.uniform(0, 1, 2)
            a = constant_field(sx, sy, t0).sigma_at(*u)
            b = constant_field(sy, sx, t0 + math.pi / 2).sigma_at(*u)
            assert abs(a.a11 - b.a11) < 1e-12
            assert abs(a.a12 - b.a12) < 1e-12
            assert abs(a.a22 - b.a22) < 1e-12


class TestSigmaAt:
    def test_constant_field_everywhere(self):
        f = constant_field(0.04, 0.01, 0.0)
        for u in [(0.1, 0.1), (0.9, 0.4)]:
            s = f.sigma_at(*u)
            assert s.a11 == pytest.approx(0.0016)
            assert s.a22 == pytest.approx(0.0001)

    def test_composition_with_theta_covariate(self):
        f = AnisotropyField(
            OmegaParams((math.log(0.04),), (math.log(0.01),), (math.pi / 4, 0.5)),
            cov_theta=(CoordinateX(),),
        )
        assert f.theta_at(0.0, 0.3) == pytest.approx(math.pi / 4)
        s = f.sigma_at(1.0, 0.3)
        from anssns.geometry import make_sigma

        expected = make_sigma(0.04, 0.01, (math.pi / 4 + math.pi * math.tanh(0.5)) % math.pi)
        assert s.a11 == pytest.approx(expected.a11)
        assert s.a12 == pytest.approx(expected.a12)
        assert s.a22 == pytest.approx(expected.a22)

    def test_batched_entries_match_scalar(self):
        f = AnisotropyField(
            OmegaParams((math.log(0.04), 0.5), (math.log(0.01),), (0.3, 0.7)),
            cov_x=(CoordinateX(),), cov_theta=(CoordinateX(),),
        )
        xs = np.array([0.0, 0.3, 0.9])
        ys = np.array([0.5, 0.5, 0.5])
        a11, a12, a22 = f.sigma_entries_at(xs, ys)
        for i in range(3):
            s = f.sigma_at(xs[i], ys[i])
            assert a11[i] == pytest.approx(s.a11)
            assert a12[i] == pytest.approx(s.a12)
            assert a22[i] == pytest.approx(s.a22)


class TestModelSpec:
    def test_kappa_from_alpha(self):
        assert unit_spec(n_observed=200).kappa_from_alpha(10.0) == pytest.approx(20.0)
        assert unit_spec(n_observed=200).kappa_from_alpha(5.0) == pytest.approx(40.0)
        big = ModelSpec(
            window=Window(0, 2, 0, 2), window_ext=Window(-0.2, 2.2, -0.2, 2.2),
            alpha=5.0, field=constant_field(0.02, 0.02, 0.0), n_observed=100,
        )
        assert big.kappa_from_alpha(5.0) == pytest.approx(5.0)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            unit_spec(n_observed=100).kappa_from_alpha(0.0)
        with pytest.raises(ConfigurationError):
            unit_spec(alpha=-1.0)

    def test_window_must_be_inside_ext(self):
        with pytest.raises(ConfigurationError):
            ModelSpec(
                window=Window(0, 1, 0, 1), window_ext=Window(0.1, 1.2, -0.2, 1.2),
                alpha=1.0, field=constant_field(0.02, 0.02, 0.0),
            )

    def test_covariate_must_cover_ext(self):
        from anssns.covariate import Raster

        small = Raster(x0=0, y0=0, dx=1, dy=1, grid=np.ones((1, 1)), name="tiny")
        field = AnisotropyField(
            OmegaParams((0.0, 1.0), (0.0,), (0.0,)), cov_x=(small,)
        )
        with pytest.raises(ConfigurationError, match="tiny"):
            ModelSpec(
                window=Window(0, 1, 0, 1), window_ext=Window(-0.2, 1.2, -0.2, 1.2),
                alpha=1.0, field=field,
            )


class TestPriors:
    def test_uniform_log_density(self):
        p = Uniform(1, 30)
        assert p.log_pdf(7.0) == pytest.approx(math.log(1 / 29))
        assert p.log_pdf(0.5) == -math.inf
        assert p.log_pdf(30.0001) == -math.inf

    def test_lognormal_moment_matching(self):
        p = LogNormalMeanVar(0.03, 4e-5)
        assert p.mu == pytest.approx(-3.5283, abs=1e-4)
        assert p.s2 == pytest.approx(0.043485, abs=1e-6)
        # numeric integration oracle for the mean of the matched density
        mean, _ = quad(lambda x: x * math.exp(p.log_pdf(x)), 0, 1.0)
        assert mean == pytest.approx(0.03, abs=1e-6)
        total, _ = quad(lambda x: math.exp(p.log_pdf(x)), 0, 1.0)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_lognormal_sample_mean(self):
        p = LogNormalMeanVar(0.03, 4e-5)
        rng = np.random.default_rng(8)
        draws = p.sample(rng, 10**6)
        se = math.sqrt(4e-5 / 10**6)
        assert abs(draws.mean() - 0.03) < 3 * se

    def test_loguniform(self):
        p = LogUniform(0.002, 0.2)
        total, _ = quad(lambda x: math.exp(p.log_pdf(x)), 0.002, 0.2)
        assert total == pytest.approx(1.0, abs=1e-9)
        assert p.log_pdf(0.001) == -math.inf

    def test_invalid_parameters(self):
        with pytest.raises(ConfigurationError):
            Uniform(3, 3)
        with pytest.raises(ConfigurationError):
            LogNormalMeanVar(0.0, 1.0)
        with pytest.raises(ConfigurationError):
            LogUniform(0.0, 1.0)
