import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from pkexplain.errors import InputError
from pkexplain.esp import (
    EspTable,
    ShapleyWeights,
    esp_newton,
    esp_stable,
    shapley_weights,
    weighted_esp_sum,
    weighted_loo_esp_sums,
)


def esp_enum(arrays, q):
    """Direct subset-enumeration oracle for e_q, elementwise."""
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    if q == 0:
        return np.ones_like(arrays[0])
    tot = np.zeros_like(arrays[0])
    for c in combinations(range(len(arrays)), q):
        tot += np.prod([arrays[i] for i in c], axis=0)
    return tot


class TestShapleyWeights:
    def test_single_player(self):
        w = shapley_weights(1)
        np.testing.assert_array_equal(w.mu, [1.0])

    def test_d3(self):
        w = shapley_weights(3)
        np.testing.assert_allclose(w.mu, [1 / 3, 1 / 6, 1 / 3], rtol=1e-15)

    def test_matches_factorial_formula(self):
        for d in (2, 4, 7, 11):
            w = shapley_weights(d)
            expect = [
                math.factorial(q) * math.factorial(d - q - 1) / math.factorial(d)
                for q in range(d)
            ]
            np.testing.assert_allclose(w.mu, expect, rtol=1e-13)

    @pytest.mark.parametrize("d", [1, 2, 3, 10, 50, 200])
    def test_normalization_identity(self, d):
        w = shapley_weights(d)
        total = sum(math.comb(d - 1, q) * w.mu[q] for q in range(d))
        assert total == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 5, 50])
    def test_symmetry(self, d):
        w = shapley_weights(d)
        np.testing.assert_allclose(w.mu, w.mu[::-1], rtol=1e-12)

    def test_invalid_d(self):
        with pytest.raises(InputError):
            shapley_weights(0)
        with pytest.raises(InputError):
            shapley_weights(-3)
        with pytest.raises(InputError):
            shapley_weights(10001)

    def test_large_d_finite_and_fast(self):
        w = shapley_weights(10000)
        assert np.all(np.isfinite(w.mu))
        assert w.mu[0] == 1.0 / 10000


class TestEspNewton:
    def test_scalar_123(self):
        t = esp_newton([np.array(v) for v in (1.0, 2.0, 3.0)], 3)
        np.testing.assert_allclose([t.orders[q] for q in range(4)], [1, 6, 11, 6])

    def test_zeros(self):
        t = esp_newton([np.zeros(4)] * 3, 3)
        np.testing.assert_array_equal(t.orders[0], np.ones(4))
        for q in (1, 2, 3):
            np.testing.assert_array_equal(t.orders[q], np.zeros(4))

    def test_all_ones_binomial(self):
        t = esp_newton([np.ones((2, 2))] * 4, 4)
        np.testing.assert_allclose(t.orders[2], np.full((2, 2), 6.0), rtol=1e-12)

    def test_matches_enumeration(self):
        rng = np.random.default_rng(0)
        for p in range(1, 13):
            arrays = [rng.uniform(0.0, 1.0, size=(2, 3)) for _ in range(p)]
            t = esp_newton(arrays, p)
            for q in range(p + 1):
                np.testing.assert_allclose(
                    t.orders[q], esp_enum(arrays, q), rtol=1e-9, atol=1e-12
                )

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            esp_newton([np.ones(3), np.ones(4)], 1)

    def test_order_beyond_collection(self):
        with pytest.raises(InputError):
            esp_newton([np.ones(3)], 2)


class TestEspStable:
    def test_agrees_on_123(self):
        t = esp_stable([np.array(v) for v in (1.0, 2.0, 3.0)], 3)
        np.testing.assert_allclose(t.orders[2], 11.0, rtol=1e-14)

    def test_all_zero_scaling_branch(self):
        t = esp_stable([np.zeros(2)] * 3, 3)
        np.testing.assert_array_equal(t.orders[1], np.zeros(2))
        np.testing.assert_array_equal(t.orders[0], np.ones(2))

    def test_matches_enumeration(self):
        rng = np.random.default_rng(1)
        for p in (1, 2, 5, 9, 12):
            arrays = [rng.uniform(0.0, 1.0, size=5) for _ in range(p)]
            t = esp_stable(arrays, p)
            for q in range(p + 1):
                np.testing.assert_allclose(
                    t.orders[q], esp_enum(arrays, q), rtol=1e-9, atol=1e-12
                )

    @pytest.mark.parametrize("p", [5, 20, 40])
    def test_binomial_identity(self, p):
        t = esp_stable([np.ones(3)] * p, p)
        for q in range(p + 1):
            np.testing.assert_allclose(
                t.orders[q], math.comb(p, q), rtol=1e-9
            )

    def test_nonnegative_and_finite_p60(self):
        rng = np.random.default_rng(2)
        arrays = [rng.uniform(1e-6, 1.0, size=4) for _ in range(60)]
        t = esp_stable(arrays, 60)
        for q in range(61):
            assert np.all(np.isfinite(t.orders[q]))
            assert np.all(t.orders[q] >= 0.0)

    def test_finite_at_p200(self):
        rng = np.random.default_rng(3)
        arrays = [rng.uniform(0.0, 1.0, size=2) for _ in range(200)]
        t = esp_stable(arrays, 200)
        for q in range(201):
            assert np.all(np.isfinite(t.orders[q]))

    def test_cross_agreement_with_newton(self):
        # Newton's alternating recursion loses the tiny tail orders at
        # large p, so discrepancy is normalized by the table scale; at
        # small p the per-order enumeration tests pin both backends.
        rng = np.random.default_rng(4)
        for p in (3, 10, 25, 40, 60):
            arrays = [rng.uniform(1e-3, 1.0, size=6) for _ in range(p)]
            a = esp_newton(arrays, p)
            b = esp_stable(arrays, p)
            scale = max(float(np.max(np.abs(o))) for o in b.orders)
            worst = max(
                float(np.max(np.abs(a.orders[q] - b.orders[q]))) / scale
                for q in range(p + 1)
            )
            assert worst <= 1e-6

    def test_truncated_order(self):
        rng = np.random.default_rng(5)
        arrays = [rng.uniform(0, 1, size=3) for _ in range(8)]
        t = esp_stable(arrays, 3)
        assert t.max_order == 3
        assert len(t.orders) == 4
        full = esp_stable(arrays, 8)
        for q in range(4):
            np.testing.assert_allclose(t.orders[q], full.orders[q], rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    data=hnp.arrays(
        np.float64,
        st.tuples(st.integers(2, 7), st.integers(1, 5)),
        elements=st.floats(0.0, 1.0),
    ),
    z=hnp.arrays(np.float64, st.integers(1, 5), elements=st.floats(0.0, 1.0)),
)
def test_shift_structure(data, z):
    # Appending one array z updates e_q -> e_q + z * e_{q-1}.
    if data.shape[1] != z.shape[0]:
        z = np.resize(z, data.shape[1])
    arrays = list(data)
    p = len(arrays)
    base = esp_stable(arrays, p)
    grown = esp_stable(arrays + [z], p + 1)
    for q in range(1, p + 1):
        np.testing.assert_allclose(
            grown.orders[q],
            base.orders[q] + z * base.orders[q - 1],
            rtol=1e-9,
            atol=1e-12,
        )


class TestWeightedEspSum:
    def test_single_feature(self):
        t = esp_stable([np.ones(3) * 0.5], 0)
        psi = weighted_esp_sum(t, shapley_weights(1))
        np.testing.assert_array_equal(psi, np.ones(3))

    def test_all_ones_normalization(self):
        for d in (2, 5, 30):
            t = esp_stable([np.ones(4)] * (d - 1), d - 1)
            psi = weighted_esp_sum(t, shapley_weights(d))
            np.testing.assert_allclose(psi, np.ones(4), rtol=1e-10)

    def test_hand_case_d3(self):
        t = esp_stable([np.array(1.0), np.array(2.0)], 2)
        psi = weighted_esp_sum(t, shapley_weights(3))
        assert psi == pytest.approx(1 / 3 + 3 / 6 + 2 / 3, rel=1e-14)

    def test_length_mismatch(self):
        t = esp_stable([np.ones(2)] * 3, 3)
        with pytest.raises(InputError):
            weighted_esp_sum(t, shapley_weights(3))


class TestWeightedLooSums:
    def test_matches_per_feature_recomputation(self):
        rng = np.random.default_rng(6)
        for d in (1, 2, 3, 8, 25, 60):
            Z = rng.uniform(0.0, 1.0, size=(d, 7))
            mu = shapley_weights(d)
            psi = weighted_loo_esp_sums(Z, mu)
            assert psi.shape == (d, 7)
            for j in range(d):
                rest = [Z[i] for i in range(d) if i != j]
                if rest:
                    table = esp_stable(rest, d - 1)
                else:
                    table = EspTable([np.ones(7)])
                expect = weighted_esp_sum(table, mu)
                np.testing.assert_allclose(psi[j], expect, rtol=1e-10, atol=1e-13)

    def test_single_row_gives_ones(self):
        psi = weighted_loo_esp_sums(np.array([[0.3, 0.9]]), shapley_weights(1))
        np.testing.assert_array_equal(psi, np.ones((1, 2)))

    def test_all_ones_rows_give_ones(self):
        # mu-weighted ESP sums of all-ones collections hit the
        # normalization identity scaled by C(d-1, q).
        for d in (2, 10, 100):
            Z = np.ones((d, 3))
            psi = weighted_loo_esp_sums(Z, shapley_weights(d))
            np.testing.assert_allclose(psi, np.ones((d, 3)), rtol=1e-9)

    def test_weight_length_mismatch(self):
        with pytest.raises(InputError):
            weighted_loo_esp_sums(np.ones((3, 2)), shapley_weights(4))
