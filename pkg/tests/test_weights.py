import math

import numpy as np
import pytest

from klentropy.weights import (
    WeightError,
    WeightVector,
    canonical_weights,
    n_constraints,
    support_lattice,
    unit_weights,
    validate_weights,
    weight_system,
)


class TestCanonicalWeights:
    def test_d1_unit_mass_at_k(self):
        w = canonical_weights(10, 1)
        assert w.support == [10] and w[10] == 1.0 and w.k == 10

    def test_d2_unit_mass_at_half(self):
        w = canonical_weights(8, 2)
        assert w.support == [4] and w[4] == 1.0

    def test_k8_d4(self, derived):
        w = canonical_weights(8, 4)
        assert w.support == [2, 4]
        # Independent closed form of the 2x2 solve: w2 r2 + w4 r4 = 0, w2 + w4 = 1.
        r2 = math.gamma(2.5) / math.gamma(2)
        r4 = math.gamma(4.5) / math.gamma(4)
        w2 = r4 / (r4 - r2)
        assert w[2] == pytest.approx(w2, rel=1e-13)
        assert w[2] == pytest.approx(derived["weights_k8_d4"]["w2"], rel=1e-13)
        assert w[4] == pytest.approx(derived["weights_k8_d4"]["w4"], rel=1e-13)
        rep = validate_weights(w, 8, 4)
        assert rep.in_class
        assert rep.sum_residual < 1e-10 and max(rep.moment_residuals) < 1e-10

    @pytest.mark.parametrize("d", range(1, 11))
    def test_support_on_lattice(self, d):
        k = max(d, 8) * 3
        w = canonical_weights(k, d)
        assert w.support == [(t * k) // d for t in range(1, n_constraints(d) + 2)]
        assert set(w.support) <= set(support_lattice(k, d))

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("k", [3, 7, 20, 64])
    def test_degenerate_small_d(self, d, k):
        w = canonical_weights(k, d)
        assert w.support == [k // d] and w[k // d] == 1.0

    def test_k_too_small(self):
        with pytest.raises(WeightError, match="k too small"):
            canonical_weights(3, 4)

    def test_condition_limit_is_respected(self):
        with pytest.raises(WeightError, match="ill-conditioned"):
            canonical_weights(16, 8, cond_limit=1.0)

    @pytest.mark.parametrize("bad", [0, -1, 2.5])
    def test_bad_k(self, bad):
        with pytest.raises(ValueError):
            canonical_weights(bad, 4)

    def test_vandermonde_limit(self):
        k, d = 10**4, 8
        js, A = weight_system(k, d)
        t = np.arange(1, len(js) + 1)
        limit = np.array([(t / d) ** (2.0 * l / d) for l in range(len(js))])
        assert np.max(np.abs(A - limit)) < 0.01

    @pytest.mark.parametrize("d", range(4, 11))
    def test_bounded_norms(self, d):
        ref = np.linalg.norm(canonical_weights(100, d).w)
        ks = np.unique(np.geomspace(max(d, 8) * 2, 10**4, 25).astype(int))
        ks = [k for k in ks if k >= 100]
        norms = [np.linalg.norm(canonical_weights(int(k), d).w) for k in ks]
        assert max(norms) <= 2 * ref


class TestValidateWeights:
    def test_uniform_not_in_class(self):
        rep = validate_weights(np.full(8, 1 / 8), 8, 4)
        assert rep.sum_residual < 1e-15
        assert rep.moment_residuals[0] > 0.1
        assert not rep.in_class

    def test_zero_vector(self):
        rep = validate_weights(np.zeros(8), 8, 4)
        assert rep.sum_residual == 1.0 and not rep.in_class

    def test_off_lattice(self):
        rep = validate_weights(unit_weights(8, 2, j=3))
        assert rep.off_lattice == [3] and not rep.in_class

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            validate_weights(np.ones(3), 4, 1)

    def test_raw_array_needs_d(self):
        with pytest.raises(ValueError):
            validate_weights(np.ones(3))

    def test_report_dict(self):
        d = validate_weights(canonical_weights(40, 5)).as_dict()
        assert set(d) == {"sum_residual", "moment_residuals", "off_lattice", "in_class"}
        assert d["in_class"] is True


class TestWeightVector:
    def test_immutable(self):
        w = unit_weights(4, 1)
        with pytest.raises(ValueError):
            w.w[0] = 1.0

    @pytest.mark.parametrize("bad", [[], [np.nan], [[1.0]]])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            WeightVector(bad, 1)

    def test_unit_weights_range(self):
        with pytest.raises(ValueError):
            unit_weights(4, 1, j=5)
