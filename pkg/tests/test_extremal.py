import json

import numpy as np
import pytest
from hypothesis import given, settings

from bevdep.extremal import (AngularCoefficients, InvalidCoefficientsError, PickandsCoefficients,
                             angular_cdf, angular_density, bernstein_basis, beta_to_eta, chi,
                             elevate_angular, elevate_pickands, eta_to_beta, exceedance_prob,
                             pickands, pickands_d1, pickands_d2, stable_tail_L, tail_dep_R,
                             validate_angular, validate_pickands)
from bevdep.numerics import DomainError, quadrature

from conftest import angular_coefficients, pickands_coefficients, random_eta

INDEP_ETA = AngularCoefficients([0.5, 0.5, 0.5])
UNIFORM_ETA = AngularCoefficients([0.0, 0.5, 1.0])
ETA4 = AngularCoefficients([0.1, 0.4, 0.6, 0.9])
INDEP_BETA = PickandsCoefficients([1, 1, 1, 1])
UNIFORM_BETA = PickandsCoefficients([1, 2 / 3, 2 / 3, 1])
BETA4 = PickandsCoefficients([1, 0.8, 0.75, 0.8, 1])


def quad_exceedance(c, y1, y2, n=20001):
    """``2 * integral of min(w/y1, (1-w)/y2) h(w)``, split at the kink."""
    kink = y1 / (y1 + y2)
    f = lambda w: np.minimum(w / y1, (1 - w) / y2) * np.asarray(angular_density(c, w, endpoints=True))
    return 2 * (quadrature(f, 0.0, kink, n) + quadrature(f, kink, 1.0, n))


class TestBasis:
    def test_partition_of_unity(self):
        x = np.linspace(0, 1, 37)
        for k in (1, 3, 10, 60):
            np.testing.assert_allclose(bernstein_basis(x, k).sum(axis=-1), 1.0, atol=1e-13)

    def test_endpoints(self):
        b = bernstein_basis(np.array([0.0, 1.0]), 4)
        np.testing.assert_array_equal(b[0], [1, 0, 0, 0, 0])
        np.testing.assert_array_equal(b[1], [0, 0, 0, 0, 1])


class TestValidation:
    @pytest.mark.parametrize("eta", [[0.5, 0.5, 0.5], [0, 0.5, 1]])
    def test_valid_angular(self, eta):
        assert validate_angular(AngularCoefficients(eta)).valid

    def test_decreasing(self):
        report = validate_angular(AngularCoefficients([0.6, 0.5, 0.4]))
        assert not report
        assert "R1" in report.restrictions()

    def test_bad_sum(self):
        assert validate_angular(AngularCoefficients([0.4, 0.5, 0.55])).restrictions() == ["R2"]

    @pytest.mark.parametrize("beta", [[1, 1, 1, 1], [1, 2 / 3, 2 / 3, 1]])
    def test_valid_pickands(self, beta):
        assert validate_pickands(PickandsCoefficients(beta)).valid

    def test_invalid_pickands(self):
        report = validate_pickands(PickandsCoefficients([1, 0.5, 0.9, 1]))
        assert {"R4", "R5"} <= set(report.restrictions())

    def test_too_short(self):
        assert not validate_angular(AngularCoefficients([0.5, 0.5]))


class TestConversion:
    @pytest.mark.parametrize("beta,eta", [
        ([1, 2 / 3, 2 / 3, 1], [0, 0.5, 1]),
        ([1, 0.8, 0.75, 0.8, 1], [0.1, 0.4, 0.6, 0.9]),
        ([1, 1, 1, 1], [0.5, 0.5, 0.5]),
    ])
    def test_examples(self, beta, eta):
        np.testing.assert_allclose(beta_to_eta(PickandsCoefficients(beta)).eta, eta, atol=1e-15)
        np.testing.assert_allclose(eta_to_beta(AngularCoefficients(eta)).beta, beta, atol=1e-15)

    def test_invalid_raises(self):
        with pytest.raises(InvalidCoefficientsError):
            eta_to_beta(AngularCoefficients([0.6, 0.5, 0.4]))
        with pytest.raises(InvalidCoefficientsError):
            beta_to_eta(PickandsCoefficients([1, 0.5, 0.9, 1]))

    @given(angular_coefficients(k_max=30))
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, c):
        b = eta_to_beta(c)
        assert validate_pickands(b, slack=1e-10)
        np.testing.assert_allclose(beta_to_eta(b).eta, c.eta, atol=1e-12)
        assert b.p0 == pytest.approx(c.p0, abs=1e-12)
        assert b.p1 == pytest.approx(c.p1, abs=1e-12)

    @given(angular_coefficients())
    @settings(max_examples=50, deadline=None)
    def test_elevation_preserves_functions(self, c):
        t = np.linspace(0, 1, 41)
        e = elevate_angular(c)
        assert validate_angular(e, slack=1e-10)
        np.testing.assert_allclose(angular_cdf(e, t), angular_cdf(c, t), atol=1e-12)
        b = eta_to_beta(c)
        np.testing.assert_allclose(pickands(elevate_pickands(b), t), pickands(b, t), atol=1e-12)

    def test_json(self):
        c = AngularCoefficients.from_json(ETA4.to_json())
        np.testing.assert_array_equal(c.eta, ETA4.eta)
        assert json.loads(BETA4.to_json()) == {"k": 4, "beta": [1.0, 0.8, 0.75, 0.8, 1.0]}
        with pytest.raises(ValueError):
            AngularCoefficients.from_dict({"k": 5, "eta": [0, 0.5, 1]})

    def test_immutable(self):
        with pytest.raises(ValueError):
            ETA4.eta[0] = 0.3


class TestAngular:
    def test_cdf_examples(self):
        assert angular_cdf(INDEP_ETA, 0.3) == pytest.approx(0.5)
        assert angular_cdf(UNIFORM_ETA, 0.0) == 0.0
        assert angular_cdf(UNIFORM_ETA, 0.5) == pytest.approx(0.5)
        assert angular_cdf(ETA4, 1.0) == 1.0

    def test_density_examples(self):
        w = np.linspace(0.05, 0.95, 19)
        np.testing.assert_allclose(angular_density(UNIFORM_ETA, w), 1.0, atol=1e-14)
        np.testing.assert_allclose(angular_density(INDEP_ETA, w), 0.0, atol=1e-14)
        # 3 * (0.3 * 0.25 + 0.2 * 0.5 + 0.3 * 0.25); the written description lists 0.85
        assert angular_density(ETA4, 0.5) == pytest.approx(0.75, abs=1e-14)

    def test_density_open_interval(self):
        with pytest.raises(DomainError):
            angular_density(ETA4, 0.0)
        assert angular_density(ETA4, 0.0, endpoints=True) == pytest.approx(0.9)

    @given(angular_coefficients())
    @settings(max_examples=50, deadline=None)
    def test_total_mass_and_mean(self, c):
        dens = quadrature(lambda w: angular_density(c, w, endpoints=True), 0, 1, 2001)
        assert c.p0 + dens + c.p1 == pytest.approx(1.0, abs=1e-9)
        mean = quadrature(lambda w: w * np.asarray(angular_density(c, w, endpoints=True)), 0, 1, 2001)
        assert mean + c.p1 == pytest.approx(0.5, abs=1e-9)


class TestPickands:
    def test_examples(self):
        assert pickands(INDEP_BETA, 0.37) == pytest.approx(1.0)
        assert pickands(UNIFORM_BETA, 0.5) == pytest.approx(0.75)
        assert pickands(BETA4, 0.5) == pytest.approx(0.80625)

    def test_derivative_examples(self):
        assert pickands_d1(UNIFORM_BETA, 0.5) == pytest.approx(0.0, abs=1e-15)
        assert pickands_d2(UNIFORM_BETA, 0.5) == pytest.approx(2.0)
        t = np.linspace(0.01, 0.99, 11)
        np.testing.assert_allclose(pickands_d1(INDEP_BETA, t), 0.0, atol=1e-14)
        np.testing.assert_allclose(pickands_d2(INDEP_BETA, t), 0.0, atol=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            pickands(BETA4, 1.2)
        with pytest.raises(DomainError):
            pickands_d2(BETA4, 1.0)

    @given(pickands_coefficients())
    @settings(max_examples=100, deadline=None)
    def test_bounds_and_slopes(self, b):
        t = np.linspace(0, 1, 201)
        A = pickands(b, t)
        assert np.all(A <= 1 + 1e-12)
        assert np.all(A >= np.maximum(t, 1 - t) - 1e-12)
        assert pickands_d1(b, 0.0) == pytest.approx(2 * b.p0 - 1, abs=1e-10)
        assert pickands_d1(b, 1.0) == pytest.approx(1 - 2 * b.p1, abs=1e-10)
        assert np.all(pickands_d2(b, t[1:-1]) >= -1e-10)

    @given(angular_coefficients())
    @settings(max_examples=100, deadline=None)
    def test_derivatives_match_angular(self, c):
        b = eta_to_beta(c)
        t = np.linspace(0.005, 0.995, 101)
        np.testing.assert_allclose(pickands_d1(b, t), 2 * angular_cdf(c, t) - 1, atol=1e-10)
        np.testing.assert_allclose(pickands_d2(b, t), 2 * angular_density(c, t), atol=1e-10)

    def test_finite_difference(self, rng):
        b = eta_to_beta(random_eta(7, rng))
        t = np.linspace(0.05, 0.95, 19)
        h = 1e-6
        fd = (pickands(b, t + h) - pickands(b, t - h)) / (2 * h)
        np.testing.assert_allclose(pickands_d1(b, t), fd, atol=1e-8)


class TestTailFunctions:
    def test_independence(self):
        assert stable_tail_L(INDEP_BETA, 0.3, 1.7) == pytest.approx(2.0)
        assert tail_dep_R(INDEP_BETA, 0.3, 1.7) == pytest.approx(0.0, abs=1e-15)

    def test_R_uniform(self):
        assert tail_dep_R(UNIFORM_BETA, 1, 1) == pytest.approx(0.5)

    def test_boundary(self):
        assert stable_tail_L(BETA4, 2.5, 0.0) == pytest.approx(2.5)
        assert stable_tail_L(BETA4, 0.0, 0.0) == 0.0

    def test_negative(self):
        with pytest.raises(DomainError):
            stable_tail_L(BETA4, -1.0, 1.0)

    def test_chi(self):
        assert chi(INDEP_BETA) == pytest.approx(0.0, abs=1e-15)
        assert chi(UNIFORM_BETA) == pytest.approx(0.5)
        assert chi(BETA4) == pytest.approx(0.3875)

    @given(pickands_coefficients())
    @settings(max_examples=50, deadline=None)
    def test_homogeneity_and_bounds(self, b):
        x1, x2 = 0.7, 2.3
        L = stable_tail_L(b, x1, x2)
        assert max(x1, x2) - 1e-12 <= L <= x1 + x2 + 1e-12
        assert stable_tail_L(b, 3 * x1, 3 * x2) == pytest.approx(3 * L, rel=1e-12)


class TestExceedance:
    def test_examples(self):
        assert exceedance_prob(INDEP_ETA, 3.0, 17.0) == pytest.approx(0.0, abs=1e-15)
        assert exceedance_prob(UNIFORM_ETA, 10, 10) == pytest.approx(0.05, abs=1e-14)
        assert exceedance_prob(ETA4, 10, 10) == pytest.approx(0.03875, abs=1e-14)

    def test_equals_R(self, rng):
        for k in (3, 5, 12):
            c = random_eta(k, rng)
            y1, y2 = 4.0, 11.0
            assert exceedance_prob(c, y1, y2) == pytest.approx(
                tail_dep_R(eta_to_beta(c), 1 / y1, 1 / y2), abs=1e-12)

    def test_quadrature_oracle(self, rng):
        for _ in range(20):
            c = random_eta(int(rng.integers(3, 15)), rng)
            y1, y2 = np.exp(rng.uniform(0, 5, size=2))
            assert abs(exceedance_prob(c, y1, y2) - quad_exceedance(c, y1, y2)) < 1e-8

    def test_vectorised(self):
        y = np.array([1.0, 10.0, 100.0])
        np.testing.assert_allclose(exceedance_prob(UNIFORM_ETA, y, y), 0.5 / y, rtol=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            exceedance_prob(ETA4, 0.0, 1.0)
