"""
Tests for Dependence Statistics

HSIC against a brute-force expanded trace, its symmetry, scale and permutation
laws; MMD² closed forms and the unequal-size flag.
"""

import math

import numpy as np
import pytest

from src.errors import OrderMismatch, ShapeMismatch, TooFewSamples
from src.kernels.dependence import (
    MMDResult,
    PairedKernels,
    hsic,
    hsic_from_samples,
    mmd2,
    mmd2_from_samples,
)
from src.kernels.gram_ops import centering_matrix
from src.kernels.kernel_core import gram, gram_between
from src.state import DataMatrix, GramMatrix, KernelSpec


# Test fixtures
RBF = KernelSpec(family="rbf", gamma=0.5)


def rbf_gram(rng, d, n):
    return gram(RBF, DataMatrix(rng.standard_normal((d, n))))


def hsic_index_sum(Kx, Ky):
    """tr(Kx H Ky H)/(n-1)² expanded into an explicit four-index sum."""
    n = Kx.shape[0]
    H = centering_matrix(n)
    total = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for m in range(n):
                    total += Kx[i, j] * H[j, k] * Ky[k, m] * H[m, i]
    return total / (n - 1) ** 2


class TestHsic:
    """Tests for the HSIC statistic."""

    def test_constant_y_gives_zero(self):
        """Test that a constant Y kernel gives HSIC 0."""
        Kx = rbf_gram(np.random.default_rng(110), 2, 6)
        Ky = GramMatrix(np.ones((6, 6)))
        assert abs(hsic(PairedKernels(Kx, Ky))) <= 1e-12

    def test_identity_pair_of_two(self):
        """Test Kx = Ky = I with n = 2 gives tr(H) = 1."""
        I = GramMatrix(np.eye(2))
        assert hsic(PairedKernels(I, I)) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 5, 6])
    def test_matches_index_sum(self, n):
        """Test against the O(n⁴) oracle."""
        rng = np.random.default_rng(111 + n)
        Kx, Ky = rbf_gram(rng, 2, n), rbf_gram(rng, 3, n)
        assert hsic(PairedKernels(Kx, Ky)) == pytest.approx(hsic_index_sum(Kx.values, Ky.values), abs=1e-10)

    def test_identical_samples_positive(self):
        """Test HSIC of a sample with itself is positive and matches the oracle."""
        K = rbf_gram(np.random.default_rng(120), 2, 5)
        value = hsic(PairedKernels(K, K))
        assert value > 0
        assert value == pytest.approx(hsic_index_sum(K.values, K.values), abs=1e-10)

    def test_symmetric_in_arguments(self):
        """Test hsic(Kx, Ky) = hsic(Ky, Kx) exactly."""
        rng = np.random.default_rng(121)
        Kx, Ky = rbf_gram(rng, 2, 9), rbf_gram(rng, 2, 9)
        assert hsic(PairedKernels(Kx, Ky)) == hsic(PairedKernels(Ky, Kx))

    def test_scale_law(self):
        """Test hsic(c·Kx, Ky) = c·hsic(Kx, Ky)."""
        rng = np.random.default_rng(122)
        Kx, Ky = rbf_gram(rng, 2, 8), rbf_gram(rng, 2, 8)
        base = hsic(PairedKernels(Kx, Ky))
        assert hsic(PairedKernels(GramMatrix(2.0 * Kx.values), Ky)) == 2.0 * base
        assert hsic(PairedKernels(GramMatrix(3.0 * Kx.values), Ky)) == pytest.approx(3.0 * base, rel=1e-12)

    def test_permutation_invariance(self):
        """Test that jointly permuting paired samples leaves HSIC unchanged."""
        rng = np.random.default_rng(123)
        X, Y = DataMatrix(rng.standard_normal((2, 10))), DataMatrix(rng.standard_normal((1, 10)))
        order = rng.permutation(10)
        base = hsic_from_samples(RBF, X, Y)
        permuted = hsic_from_samples(RBF, DataMatrix(X.values[:, order]), DataMatrix(Y.values[:, order]))
        assert permuted == pytest.approx(base, rel=1e-12, abs=1e-12)

    def test_nonnegative_for_psd_pairs(self):
        """Test HSIC >= 0 up to rounding for PSD kernels."""
        rng = np.random.default_rng(124)
        for _ in range(20):
            Kx, Ky = rbf_gram(rng, 2, 7), rbf_gram(rng, 2, 7)
            assert hsic(PairedKernels(Kx, Ky)) >= -1e-10

    def test_dependent_exceeds_independent(self):
        """Test Y = X scores higher than an independent Y."""
        rng = np.random.default_rng(125)
        X = DataMatrix(rng.standard_normal((1, 40)))
        independent = DataMatrix(rng.standard_normal((1, 40)))
        assert hsic_from_samples(RBF, X, X) > hsic_from_samples(RBF, X, independent)

    def test_order_mismatch(self):
        """Test paired kernels must have equal order."""
        with pytest.raises(OrderMismatch):
            PairedKernels(GramMatrix(np.eye(3)), GramMatrix(np.eye(4)))

    def test_too_few_samples(self):
        """Test n = 1 raises TooFewSamples."""
        with pytest.raises(TooFewSamples):
            hsic(PairedKernels(GramMatrix(np.eye(1)), GramMatrix(np.eye(1))))

    def test_separate_kernel_for_y(self):
        """Test hsic_from_samples with a second kernel spec."""
        rng = np.random.default_rng(126)
        X, Y = DataMatrix(rng.standard_normal((2, 6))), DataMatrix(rng.standard_normal((2, 6)))
        linear = KernelSpec(family="linear")
        expected = hsic(PairedKernels(gram(RBF, X), gram(linear, Y)))
        assert hsic_from_samples(RBF, X, Y, spec_y=linear) == expected


class TestMmd:
    """Tests for the biased MMD² statistic."""

    def test_identical_samples_give_zero(self):
        """Test Kxx = Kyy = Kxy gives 0."""
        K = rbf_gram(np.random.default_rng(130), 2, 6).values
        assert abs(mmd2(K, K, K)) <= 1e-12

    def test_two_point_masses(self):
        """Test n = m = 1 gives 2 - 2·exp(-γr²)."""
        r = 1.7
        X, Y = DataMatrix([[0.0]]), DataMatrix([[r]])
        result = mmd2_from_samples(RBF, X, Y)
        assert result.value == pytest.approx(2.0 - 2.0 * math.exp(-0.5 * r * r), abs=1e-12)
        assert result.unequal_sizes is False

    def test_far_apart_clusters(self):
        """Test that cross terms vanish at large separation."""
        rng = np.random.default_rng(131)
        X = DataMatrix(rng.standard_normal((2, 5)) * 0.1)
        Y = DataMatrix(rng.standard_normal((2, 5)) * 0.1 + 100.0)
        Kxx, Kyy = gram(RBF, X).values, gram(RBF, Y).values
        value = mmd2(Kxx, Kyy, gram_between(RBF, X, Y))
        assert value == pytest.approx(Kxx.mean() + Kyy.mean(), abs=1e-6)

    def test_nonnegative_on_pooled_kernel(self):
        """Test MMD² >= 0 for a common PSD kernel."""
        rng = np.random.default_rng(132)
        for _ in range(20):
            X = DataMatrix(rng.standard_normal((3, 6)))
            Y = DataMatrix(rng.standard_normal((3, 6)) + 0.5)
            assert mmd2_from_samples(RBF, X, Y).value >= -1e-10

    def test_unequal_sizes_flagged(self):
        """Test that n != m is supported and flagged."""
        rng = np.random.default_rng(133)
        result = mmd2_from_samples(RBF, DataMatrix(rng.standard_normal((2, 4))), DataMatrix(rng.standard_normal((2, 7))))
        assert isinstance(result, MMDResult)
        assert result.unequal_sizes
        assert result.to_dict()["estimator"] == "biased"
        assert (result.n, result.m) == (4, 7)

    def test_shape_mismatch(self):
        """Test inconsistent blocks raise ShapeMismatch."""
        with pytest.raises(ShapeMismatch):
            mmd2(np.eye(2), np.eye(3), np.ones((3, 2)))
