"""Tests for metrics.frechet."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import save_embeddings_raw
from metrics.frechet import (
    EmbeddingSet,
    GaussianStats,
    fit_gaussian,
    frechet_distance,
    load_embeddings,
)


def newton_schulz_sqrt(a: np.ndarray, iterations: int = 100) -> np.ndarray:
    """Coupled Newton–Schulz iteration for the square root of an SPD matrix."""
    norm = np.linalg.norm(a)
    y = a / norm
    z = np.eye(a.shape[0])
    for _ in range(iterations):
        t = 0.5 * (3.0 * np.eye(a.shape[0]) - z @ y)
        y, z = y @ t, t @ z
    return y * np.sqrt(norm)


def oracle_distance(a: GaussianStats, b: GaussianStats) -> float:
    sqrt_a = newton_schulz_sqrt(a.covariance)
    middle = sqrt_a @ b.covariance @ sqrt_a
    cross = np.trace(newton_schulz_sqrt(0.5 * (middle + middle.T)))
    diff = a.mean - b.mean
    return float(diff @ diff + np.trace(a.covariance) + np.trace(b.covariance) - 2.0 * cross)


def random_spd(rng, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d))
    return g @ g.T / d + 0.1 * np.eye(d)


class TestAnalytic:
    def test_unit_shift_1d(self) -> None:
        a = GaussianStats(np.array([0.0]), np.array([[1.0]]))
        b = GaussianStats(np.array([1.0]), np.array([[1.0]]))
        assert frechet_distance(a, b) == pytest.approx(1.0, abs=1e-9)

    def test_diagonal_2d(self) -> None:
        a = GaussianStats(np.array([0.0, 0.0]), np.diag([1.0, 4.0]))
        b = GaussianStats(np.array([1.0, 1.0]), np.diag([4.0, 1.0]))
        assert frechet_distance(a, b) == pytest.approx(4.0, abs=1e-9)

    def test_identical_is_zero(self, rng) -> None:
        cov = random_spd(rng, 16)
        stats = GaussianStats(rng.standard_normal(16), cov)
        assert frechet_distance(stats, stats) == pytest.approx(0.0, abs=1e-8)

    def test_symmetric(self, rng) -> None:
        a = GaussianStats(rng.standard_normal(8), random_spd(rng, 8))
        b = GaussianStats(rng.standard_normal(8), random_spd(rng, 8))
        assert frechet_distance(a, b) == pytest.approx(frechet_distance(b, a), rel=1e-9)

    def test_singular_covariance(self) -> None:
        a = GaussianStats(np.zeros(3), np.diag([1.0, 0.0, 0.0]))
        b = GaussianStats(np.zeros(3), np.diag([1.0, 0.0, 0.0]))
        assert frechet_distance(a, b) == pytest.approx(0.0, abs=1e-8)

    @pytest.mark.parametrize("d", [2, 8, 32, 64])
    def test_matches_newton_schulz(self, rng, d) -> None:
        a = GaussianStats(rng.standard_normal(d), random_spd(rng, d))
        b = GaussianStats(rng.standard_normal(d), random_spd(rng, d))
        expected = oracle_distance(a, b)
        assert frechet_distance(a, b) == pytest.approx(expected, rel=1e-6)

    def test_dimension_mismatch(self) -> None:
        a = GaussianStats(np.zeros(2), np.eye(2))
        b = GaussianStats(np.zeros(3), np.eye(3))
        with pytest.raises(ValueError):
            frechet_distance(a, b)


class TestFitGaussian:
    def test_sampled_unit_shift(self, rng) -> None:
        a = fit_gaussian(EmbeddingSet(rng.standard_normal((20000, 1))))
        b = fit_gaussian(EmbeddingSet(rng.standard_normal((20000, 1)) + 1.0))
        assert frechet_distance(a, b) == pytest.approx(1.0, abs=0.05)

    def test_unbiased_covariance(self) -> None:
        stats = fit_gaussian(EmbeddingSet(np.array([[0.0], [2.0]])))
        assert stats.covariance.shape == (1, 1)
        assert stats.covariance[0, 0] == pytest.approx(2.0)
        assert stats.mean[0] == pytest.approx(1.0)

    def test_needs_two_samples(self) -> None:
        with pytest.raises(ValueError):
            fit_gaussian(EmbeddingSet(np.zeros((1, 4))))

    def test_non_finite_rejected(self) -> None:
        with pytest.raises(ValueError):
            EmbeddingSet(np.array([[0.0, np.nan]]))


class TestLoadEmbeddings:
    def test_csv(self, tmp_path) -> None:
        path = tmp_path / "emb.csv"
        path.write_text("1,2,3\n4,5,6\n")
        emb = load_embeddings(path)
        assert (emb.n, emb.d) == (2, 3)
        np.testing.assert_array_equal(emb.matrix, [[1, 2, 3], [4, 5, 6]])

    def test_raw_float32(self, tmp_path, rng) -> None:
        matrix = rng.standard_normal((5, 7)).astype(np.float32)
        path = save_embeddings_raw(tmp_path / "emb.f32", matrix)
        emb = load_embeddings(path, "candidate")
        assert emb.source == "candidate"
        np.testing.assert_array_equal(emb.matrix, matrix.astype(np.float64))

    def test_raw_size_mismatch(self, tmp_path) -> None:
        path = save_embeddings_raw(tmp_path / "emb.f32", np.zeros((2, 3)))
        path.with_name(path.name + ".json").write_text('{"n": 3, "d": 3}')
        with pytest.raises(ValueError):
            load_embeddings(path)

    def test_raw_without_header(self, tmp_path) -> None:
        path = tmp_path / "emb.f32"
        np.zeros(4, dtype="<f4").tofile(path)
        with pytest.raises(FileNotFoundError):
            load_embeddings(path)
