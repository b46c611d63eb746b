"""Unit tests for polynomial-matrix intensity filters."""

import numpy as np
import pytest

from src.dbp.mimo import (
    compose_factors,
    factor_shape,
    mimo_capacity,
    mimo_intensity_filter,
    mimo_real_multiplications,
    nonlinear_phase_rotate,
    poly_matrix_apply,
)
from src.utils.errors import EngineError


class TestPolyMatrix:
    """Test single polynomial-matrix filtering."""

    def test_matches_explicit_sum(self, rng):
        g = rng.standard_normal((3, 3, 4))
        a = rng.standard_normal((3, 30))
        expected = np.zeros((3, 30))
        for n in range(30):
            for k in range(4):
                if n - k >= 0:
                    expected[:, n] += g[:, :, k] @ a[:, n - k]
        np.testing.assert_allclose(poly_matrix_apply(g, a), expected, atol=1e-12)

    def test_mask_skips_coefficients(self, rng):
        g = rng.standard_normal((2, 2, 3))
        a = rng.standard_normal((2, 20))
        mask = np.zeros(g.shape, dtype=bool)
        mask[0, 1, 2] = True
        expected = np.zeros_like(a)
        expected[0, 2:] = g[0, 1, 2] * a[1, :-2]
        np.testing.assert_allclose(poly_matrix_apply(g, a, mask), expected)

    def test_shape_mismatch(self, rng):
        with pytest.raises(EngineError):
            poly_matrix_apply(np.zeros((3, 3, 2)), np.zeros((2, 10)))


class TestCascade:
    """Test factor cascades."""

    def test_cascade_equals_composed_product(self, rng):
        factors = [rng.standard_normal((3, 3, 3)) for _ in range(3)]
        a = rng.standard_normal((3, 64))
        composed = compose_factors(factors)
        assert composed.shape == (3, 3, 7)
        np.testing.assert_allclose(
            mimo_intensity_filter(factors, a), poly_matrix_apply(composed, a), atol=1e-10
        )

    def test_masked_cascade(self, rng):
        factors = [rng.standard_normal((2, 2, 2)) for _ in range(2)]
        masks = [rng.random((2, 2, 2)) > 0.5 for _ in range(2)]
        a = rng.standard_normal((2, 32))
        np.testing.assert_allclose(
            mimo_intensity_filter(factors, a, masks),
            poly_matrix_apply(compose_factors(factors, masks), a),
            atol=1e-10,
        )

    def test_empty_cascade(self):
        with pytest.raises(EngineError):
            compose_factors([])


class TestCounting:
    """Test coefficient and multiplication counts."""

    def test_long_haul_capacity(self):
        assert mimo_capacity(7, [12] * 66, 3) == 48510

    def test_factor_shape(self):
        assert factor_shape(7, 12, 3) == (7, 7, 5)
        with pytest.raises(EngineError):
            factor_shape(7, 10, 3)

    def test_real_multiplications(self):
        masks = [np.ones((2, 2, 3), dtype=bool), np.zeros((2, 2, 3), dtype=bool)]
        masks[1][0, 0, 0] = True
        assert mimo_real_multiplications(masks) == 13

    def test_phase_rotation_keeps_magnitude(self, rng):
        u = rng.standard_normal((2, 10)) + 1j * rng.standard_normal((2, 10))
        out = nonlinear_phase_rotate(u, rng.standard_normal((2, 10)))
        np.testing.assert_allclose(np.abs(out), np.abs(u))
