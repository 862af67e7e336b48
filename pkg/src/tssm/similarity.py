"""Row similarity: Euclidean distance, normalization, and the TSSM score.

Two rows with coverage features of length n are at most sqrt(n) apart,
attained by the all-zeros and all-ones extremes. The similarity score is
one minus the distance normalized by that maximum, so it lives in [0, 1]
with 1 for identical rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError
from .rows import FeatureVector

FeatureLike = Union[FeatureVector, Sequence[float], np.ndarray]


def _as_array(f: FeatureLike) -> np.ndarray:
    if isinstance(f, FeatureVector):
        return f.as_array()
    arr = np.asarray(f, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d feature vector, got shape {arr.shape}")
    return arr


def euclidean_distance(fu: FeatureLike, fv: FeatureLike) -> float:
    """Root of the summed squared component differences."""
    u = _as_array(fu)
    v = _as_array(fv)
    if u.size != v.size:
        raise DimensionError(f"feature lengths differ: {u.size} vs {v.size}")
    return float(np.sqrt(np.sum((u - v) ** 2)))


def normalized_distance(fu: FeatureLike, fv: FeatureLike) -> float:
    """Euclidean distance scaled by the maximum sqrt(n); lies in [0, 1]."""
    u = _as_array(fu)
    if u.size == 0:
        raise DimensionError("empty feature vectors have no distance")
    return euclidean_distance(fu, fv) / math.sqrt(u.size)


def tssm(fu: FeatureLike, fv: FeatureLike) -> float:
    """Structural similarity of two rows: 1 - normalized distance.

    Clamped to [0, 1]: overlapping content regions can push coverage
    entries above 1 and the raw score below 0, and the clamp keeps the
    score a valid similarity in that case.
    """
    score = 1.0 - normalized_distance(fu, fv)
    return min(1.0, max(0.0, score))


def is_similar(score: float, threshold: float) -> bool:
    """Similarity predicate: pure function of the score and threshold."""
    return score >= threshold


@dataclass(eq=False)
class SimilarityMatrix:
    """Pairwise similarity scores of a row set: symmetric, unit diagonal."""

    size: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.size, self.size):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match size {self.size}"
            )

    def __getitem__(self, idx: tuple[int, int]) -> float:
        return float(self.values[idx])

    def adjacent_scores(self) -> np.ndarray:
        """Scores of the size - 1 consecutive row pairs."""
        return self.values.diagonal(1)


def pairwise_tssm(features: Sequence[FeatureLike]) -> SimilarityMatrix:
    """Similarity matrix over a row set; empty input gives a 0x0 matrix."""
    vecs = [_as_array(f) for f in features]
    if not vecs:
        return SimilarityMatrix(0, np.zeros((0, 0), dtype=np.float64))
    sizes = {v.size for v in vecs}
    if len(sizes) != 1:
        raise DimensionError(f"mixed feature lengths: {sorted(sizes)}")
    n = sizes.pop()
    if n == 0:
        raise DimensionError("empty feature vectors have no distance")
    stacked = np.stack(vecs)
    diffs = stacked[:, None, :] - stacked[None, :, :]
    dist = np.sqrt(np.sum(diffs * diffs, axis=-1))
    scores = np.clip(1.0 - dist / math.sqrt(n), 0.0, 1.0)
    np.fill_diagonal(scores, 1.0)
    return SimilarityMatrix(len(vecs), scores)
