import math

import numpy as np
import pytest

from klentropy.estimator import kl_estimate
from klentropy.inference import ConfidenceInterval, confidence_interval, variance_estimate


class TestVarianceEstimate:
    def test_constant_xi(self):
        c = 2.5
        log_xi = np.full((50, 1), math.log(c))
        v = variance_estimate(log_xi, [1.0], math.log(c))
        assert v.value == 0.0 and abs(v.raw) < 1e-15

    def test_clamp(self):
        # sum w log^2 xi / n = 0.9, h_hat^2 = 1 -> raw = -0.1
        log_xi = np.array([[0.0, math.sqrt(0.9 / 2)]] * 4)
        v = variance_estimate(log_xi, [-1.0, 2.0], 1.0)
        assert v.raw == pytest.approx(-0.1, abs=1e-14)
        assert v.value == 0.0 and v.clamped

    def test_matches_direct(self, rng):
        log_xi = rng.normal(size=(30, 3))
        w = np.array([0.5, 0.0, 0.5])
        h = float(np.mean(log_xi @ w))
        ref = float(np.mean((log_xi**2) @ w)) - h * h
        v = variance_estimate(log_xi, w, h)
        assert v.value == pytest.approx(ref, rel=1e-13) and not v.clamped

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            variance_estimate(np.ones((5, 2)), [1.0], 0.0)

    @pytest.mark.slow
    def test_gaussian_variance_band(self):
        inside = 0
        reps = 200
        for r in range(reps):
            x = np.random.default_rng([7, r]).standard_normal((5000, 1))
            v = kl_estimate(x, 30, variance=True).variance_hat
            inside += 0.35 <= v <= 0.65
        assert inside >= 0.95 * reps


class TestConfidenceInterval:
    def test_degenerate(self):
        ci = confidence_interval(1.3, 0.0, 50)
        assert ci.lower == ci.upper == 1.3

    def test_example(self, derived):
        ci = confidence_interval(0.0, 1.0, 100, 0.95)
        z = derived["normal_quantile_0.025"]
        assert ci.upper == pytest.approx(z / 10, rel=1e-14)
        assert ci.lower == -ci.upper

    def test_monotone_in_level(self):
        widths = [confidence_interval(0.0, 2.0, 40, lv).width for lv in (0.5, 0.8, 0.9, 0.95, 0.99)]
        assert all(a < b for a, b in zip(widths, widths[1:]))

    def test_symmetry_and_scaling(self):
        a = confidence_interval(3.0, 0.7, 100, 0.9)
        b = confidence_interval(3.0, 0.7, 400, 0.9)
        assert a.upper - 3.0 == pytest.approx(3.0 - a.lower, abs=1e-15)
        assert a.width == pytest.approx(2 * b.width, rel=1e-14)

    @pytest.mark.parametrize("level", [0.0, 1.0, -0.1, 1.5])
    def test_bad_level(self, level):
        with pytest.raises(ValueError):
            confidence_interval(0.0, 1.0, 10, level)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            confidence_interval(0.0, -1.0, 10)
        with pytest.raises(ValueError):
            confidence_interval(0.0, 1.0, 1)

    def test_containment(self):
        ci = ConfidenceInterval(-1.0, 1.0, 0.9)
        assert 0.0 in ci and 1.0 in ci and 1.01 not in ci
        assert ci.as_dict() == {"lower": -1.0, "upper": 1.0, "level": 0.9}
