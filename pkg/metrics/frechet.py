"""
metrics/frechet.py
==================
Fréchet distance between Gaussian fits of two embedding sets. This is the
statistic behind FVD (video embeddings) and FAD (audio embeddings).

    d² = ‖μa − μb‖² + Tr(Σa + Σb − 2 (Σa^½ Σb Σa^½)^½)

Both square roots come from symmetric eigendecompositions, so the result
stays real even for near-singular covariances.

Embeddings are produced by external extractors and ingested as either
  - CSV, one sample per row, no header, or
  - raw little-endian float32 (.f32 / .bin) with a JSON sidecar
    "<file>.json" holding {"n": N, "d": D}.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy import linalg

from config.settings import FRECHET

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingSet:
    matrix: NDArray[np.float64]     # (N, D)
    source: str = "reference"       # reference | candidate

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise ValueError(f"embeddings must be (N, D), got shape {self.matrix.shape}")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError(f"{self.source} embeddings contain non-finite values")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class GaussianStats:
    mean: NDArray[np.float64]         # (D,)
    covariance: NDArray[np.float64]   # (D, D), symmetric

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def fit_gaussian(embeddings: EmbeddingSet) -> GaussianStats:
    """Column mean and unbiased (N − 1) covariance, symmetrized."""
    if embeddings.n < 2:
        raise ValueError(f"need at least 2 {embeddings.source} samples, got {embeddings.n}")
    x = embeddings.matrix.astype(np.float64)
    mean = x.mean(axis=0)
    cov = np.atleast_2d(np.cov(x, rowvar=False, ddof=1))
    return GaussianStats(mean=mean, covariance=0.5 * (cov + cov.T))


def _psd_sqrt(matrix: NDArray, clamp: float) -> NDArray:
    sym = 0.5 * (matrix + matrix.T)
    eigvals, eigvecs = linalg.eigh(sym)
    eigvals = np.where(eigvals < clamp, 0.0, eigvals)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")

    clamp = FRECHET["eigen_clamp"]
    diff = a.mean - b.mean
    sqrt_a = _psd_sqrt(a.covariance, clamp)
    middle = sqrt_a @ b.covariance @ sqrt_a
    eigvals = linalg.eigvalsh(0.5 * (middle + middle.T))
    eigvals = np.where(eigvals < clamp, 0.0, eigvals)

    value = (
        float(diff @ diff)
        + float(np.trace(a.covariance) + np.trace(b.covariance))
        - 2.0 * float(np.sum(np.sqrt(eigvals)))
    )
    return max(value, 0.0)


# ── Ingestion ─────────────────────────────────────────────────────────────────

def load_embeddings(path, source: str = "reference") -> EmbeddingSet:
    """Load an embedding file (CSV or raw float32 + JSON header)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"embedding file not found: {path}")

    if path.suffix.lower() == ".csv":
        matrix = pd.read_csv(path, header=None).to_numpy(dtype=np.float64)
    else:
        header_path = path.with_name(path.name + ".json")
        if not header_path.exists():
            raise FileNotFoundError(f"missing header {header_path} for raw embeddings")
        header = json.loads(header_path.read_text())
        n, d = int(header["n"]), int(header["d"])
        raw = np.fromfile(path, dtype="<f4")
        if raw.size != n * d:
            raise ValueError(f"{path}: header says {n}x{d} but file holds {raw.size} floats")
        matrix = raw.reshape(n, d).astype(np.float64)

    log.info(f"Loaded {source} embeddings {matrix.shape[0]}x{matrix.shape[1]} from {path}")
    return EmbeddingSet(matrix=matrix, source=source)
