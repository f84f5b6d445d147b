"""Row filtering, masked statistics, mean imputation and standard scaling.

Training fits per-feature mean and population std over valid entries only
(invalid entries are masked out, not zeroed). At transform time invalid
entries are imputed with the training mean first and every entry is then
z-scored, so imputed entries land exactly on 0, the least-informative
point. These fitted intermediaries ride along inside the model file and
are reapplied verbatim at inference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .encoder import ENCODING_SIZE, PoseEncoding

#: Rows with at least this many invalid entries (more than half of 15) are dropped.
MAX_INVALID = 8

LABELS = (1, 2, 3, 4)


class EmptyDataset(ValueError):
    """No rows left to fit or evaluate on."""


@dataclass(frozen=True)
class LabeledDataset:
    """Encoded rows with 4-class activeness labels.

    ``features`` is (n, 15) with NaN marking invalid entries; ``labels``
    is (n,) over {1, 2, 3, 4} (Level 1 = most lethargic).
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.features.ndim != 2 or self.features.shape[1] != ENCODING_SIZE:
            raise ValueError(f"features must be (n, {ENCODING_SIZE})")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels must align with feature rows")

    def __len__(self) -> int:
        return self.features.shape[0]

    @staticmethod
    def from_rows(rows: list[tuple[PoseEncoding, int]]) -> "LabeledDataset":
        features = np.array([enc.angles for enc, _ in rows]).reshape(len(rows), ENCODING_SIZE)
        labels = np.array([label for _, label in rows], dtype=int)
        return LabeledDataset(features, labels)


@dataclass(frozen=True)
class PreprocessStats:
    """Fitted per-feature mean/std plus row accounting.

    ``degenerate`` flags features whose std was replaced by 1.0 (constant
    column) or whose mean defaulted to 0 (no valid entries at all).
    """

    mean: np.ndarray
    std: np.ndarray
    rows_used: int
    rows_dropped: int = 0
    degenerate: np.ndarray = field(
        default_factory=lambda: np.zeros(ENCODING_SIZE, dtype=bool)
    )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def to_dict(self) -> dict:
        return {
            "mean": [float(m) for m in self.mean],
            "std": [float(s) for s in self.std],
            "rows_used": self.rows_used,
            "rows_dropped": self.rows_dropped,
        }

    @staticmethod
    def from_dict(obj: dict) -> "PreprocessStats":
        mean = np.asarray(obj["mean"], dtype=float)
        std = np.asarray(obj["std"], dtype=float)
        if mean.shape != (ENCODING_SIZE,) or std.shape != (ENCODING_SIZE,):
            raise ValueError("stats vectors must have 15 entries")
        return PreprocessStats(mean, std, int(obj["rows_used"]), int(obj["rows_dropped"]))


def filter_rows(ds: LabeledDataset) -> LabeledDataset:
    """Drop every row with more than half its entries invalid (>= 8 of 15)."""
    keep = np.isnan(ds.features).sum(axis=1) < MAX_INVALID
    return LabeledDataset(ds.features[keep], ds.labels[keep])


def fit(ds: LabeledDataset, rows_dropped: int = 0) -> PreprocessStats:
    """Masked fit: per-feature mean and population std over valid entries.

    A feature with no valid entries gets mean 0 / std 1; a constant
    feature keeps its mean but has std replaced by 1.0. Both are flagged
    degenerate.
    """
    if len(ds) == 0:
        raise EmptyDataset("cannot fit preprocessing on an empty dataset")
    valid = ~np.isnan(ds.features)
    counts = valid.sum(axis=0)
    filled = np.where(valid, ds.features, 0.0)
    safe_counts = np.maximum(counts, 1)
    mean = filled.sum(axis=0) / safe_counts
    var = (np.where(valid, ds.features - mean, 0.0) ** 2).sum(axis=0) / safe_counts
    std = np.sqrt(var)

    no_data = counts == 0
    zero_var = (~no_data) & (std == 0.0)
    mean = np.where(no_data, 0.0, mean)
    std = np.where(no_data | zero_var, 1.0, std)
    return PreprocessStats(mean, std, len(ds), rows_dropped, no_data | zero_var)


def transform(enc: PoseEncoding | np.ndarray, stats: PreprocessStats) -> np.ndarray:
    """Impute invalid entries with the feature mean, then z-score everything.

    Always returns 15 finite reals; imputed entries become exactly 0.
    """
    angles = enc.angles if isinstance(enc, PoseEncoding) else np.asarray(enc, dtype=float)
    return transform_matrix(angles.reshape(1, ENCODING_SIZE), stats)[0]


def transform_matrix(X: np.ndarray, stats: PreprocessStats) -> np.ndarray:
    """Vectorized :func:`transform` over an (n, 15) matrix."""
    imputed = np.where(np.isnan(X), stats.mean, X)
    return (imputed - stats.mean) / stats.std
