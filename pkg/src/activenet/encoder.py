"""Angular pose encoding: 15 inter-joint angles, positionally invariant.

Each pose becomes a fixed-order vector of 15 angles in degrees, one per
joint triple, with the middle joint of each triple as the hinge. Angles
depend only on the pose's shape, never on where it sits in the image, so
translation, rotation and uniform scaling of the keypoints leave the
encoding unchanged.

An entry is invalid (NaN) when any of its three joints is absent, or when
any two of them sit on exactly the same 2D coordinates; in both cases the
angle is undefined and the invalidity is a value, never a fault.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .skeleton import (
    KEYPOINT_NAMES,
    L_HIP,
    L_SHOULDER,
    NECK,
    R_HIP,
    R_SHOULDER,
    Keypoint,
    KeypointFrame,
    derive_core,
    derive_neck,
)

ENCODING_SIZE = 15

#: Name of the virtual joint at the mean of the two hips.
CORE = "core"


@dataclass(frozen=True)
class AngleTriple:
    """Three pairwise-distinct joint names; ``b`` is the hinge."""

    a: str
    b: str
    c: str

    def __post_init__(self) -> None:
        if len({self.a, self.b, self.c}) != 3:
            raise ValueError(f"triple joints must be pairwise distinct: {self}")

    @property
    def name(self) -> str:
        return f"{self.a}-{self.b}-{self.c}"


_CANONICAL = (
    AngleTriple("nose", "r_eye", "r_ear"),
    AngleTriple("nose", "l_eye", "l_ear"),
    AngleTriple("neck", "nose", "r_ear"),
    AngleTriple("neck", "nose", "l_ear"),
    AngleTriple("r_shoulder", "neck", "nose"),
    AngleTriple("l_shoulder", "neck", "nose"),
    AngleTriple("neck", "r_shoulder", "r_elbow"),
    AngleTriple("neck", "l_shoulder", "l_elbow"),
    AngleTriple("r_shoulder", "r_elbow", "r_wrist"),
    AngleTriple("l_shoulder", "l_elbow", "l_wrist"),
    AngleTriple("nose", "neck", CORE),
    AngleTriple("neck", CORE, "r_hip"),
    AngleTriple("neck", CORE, "l_hip"),
    AngleTriple("r_hip", "r_knee", "r_ankle"),
    AngleTriple("l_hip", "l_knee", "l_ankle"),
)

#: 0-based index pairs that swap when a pose is mirrored with left/right
#: relabelling; entry 10 (nose-neck-core) maps to itself.
MIRROR_PAIRS = ((0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (11, 12), (13, 14))


def canonical_spec() -> tuple[AngleTriple, ...]:
    """The fixed 15-triple table defining feature identity.

    The order is load-bearing: trained models and exported files
    address features by position in this table.
    """
    return _CANONICAL


def spec_feature_names() -> list[str]:
    return [t.name for t in _CANONICAL]


def angle_at(a: Keypoint, b: Keypoint, c: Keypoint) -> float:
    """Angle in degrees at hinge ``b`` between rays b->a and b->c.

    Returns NaN when any point is absent or any two points coincide
    exactly. The cosine is clamped to [-1, 1] before arccos, so collinear
    configurations under floating-point round-off never raise.
    """
    if not (a.present and b.present and c.present):
        return math.nan
    if a.xy == b.xy or b.xy == c.xy or a.xy == c.xy:
        return math.nan
    ux, uy = a.x - b.x, a.y - b.y
    vx, vy = c.x - b.x, c.y - b.y
    cos = (ux * vx + uy * vy) / (math.hypot(ux, uy) * math.hypot(vx, vy))
    cos = max(-1.0, min(1.0, cos))
    return math.degrees(math.acos(cos))


# Triple names resolved to indices into the 19-point layout used below:
# the 18 frame keypoints (neck replaced by its derived value) plus core.
_CORE_INDEX = len(KEYPOINT_NAMES)
_NAME_TO_INDEX = {name: i for i, name in enumerate(KEYPOINT_NAMES)}
_NAME_TO_INDEX[CORE] = _CORE_INDEX
_TRIPLE_INDICES = np.array(
    [[_NAME_TO_INDEX[t.a], _NAME_TO_INDEX[t.b], _NAME_TO_INDEX[t.c]] for t in _CANONICAL]
)


@dataclass(frozen=True)
class PoseEncoding:
    """15 angles in degrees; invalid entries are NaN."""

    angles: np.ndarray

    def __post_init__(self) -> None:
        if self.angles.shape != (ENCODING_SIZE,):
            raise ValueError(f"encoding must have {ENCODING_SIZE} entries")

    @property
    def valid(self) -> np.ndarray:
        """Boolean validity mask; False exactly where the angle is NaN."""
        return ~np.isnan(self.angles)


def _resolve_points(frame: KeypointFrame) -> list[Keypoint]:
    points = list(frame.points)
    points[NECK] = derive_neck(frame)
    points.append(derive_core(frame))
    return points


def encode(frame: KeypointFrame) -> PoseEncoding:
    """Encode one frame: derive neck and core, then apply every triple in order."""
    points = _resolve_points(frame)
    angles = np.array(
        [angle_at(points[ia], points[ib], points[ic]) for ia, ib, ic in _TRIPLE_INDICES]
    )
    return PoseEncoding(angles)


def encode_batch(frames: Sequence[KeypointFrame]) -> np.ndarray:
    """Encode many frames at once; returns an (n, 15) array with NaN invalids.

    Vectorized equivalent of :func:`encode`. Row i equals
    ``encode(frames[i]).angles`` up to floating-point rounding of the
    vectorized arccos.
    """
    n = len(frames)
    if n == 0:
        return np.empty((0, ENCODING_SIZE))
    coords = np.array([[p.xy for p in f.points] for f in frames])
    present = np.array([[p.present for p in f.points] for f in frames])
    return encode_point_arrays(coords, present)


def encode_point_arrays(coords: np.ndarray, present: np.ndarray) -> np.ndarray:
    """Encode raw keypoint arrays: (n, 18, 2) coordinates + (n, 18) presence.

    This is the streaming hot path; :func:`encode_batch` is a thin
    wrapper that unpacks frame objects into these arrays. Neck and core
    derivation matches the scalar helpers bit for bit.
    """
    n = coords.shape[0]
    if n == 0:
        return np.empty((0, ENCODING_SIZE))
    coords = np.concatenate([coords, np.empty((n, 1, 2))], axis=1)
    present = np.concatenate([present, np.zeros((n, 1), dtype=bool)], axis=1)
    fill = ~present[:, NECK] & present[:, R_SHOULDER] & present[:, L_SHOULDER]
    if fill.any():
        coords[fill, NECK] = (coords[fill, R_SHOULDER] + coords[fill, L_SHOULDER]) / 2.0
        present[fill, NECK] = True
    coords[:, _CORE_INDEX] = (coords[:, R_HIP] + coords[:, L_HIP]) / 2.0
    present[:, _CORE_INDEX] = present[:, R_HIP] & present[:, L_HIP]

    pa = coords[:, _TRIPLE_INDICES[:, 0]]
    pb = coords[:, _TRIPLE_INDICES[:, 1]]
    pc = coords[:, _TRIPLE_INDICES[:, 2]]
    ok = (
        present[:, _TRIPLE_INDICES[:, 0]]
        & present[:, _TRIPLE_INDICES[:, 1]]
        & present[:, _TRIPLE_INDICES[:, 2]]
    )
    ok &= np.any(pa != pb, axis=2) & np.any(pb != pc, axis=2) & np.any(pa != pc, axis=2)

    u = pa - pb
    v = pc - pb
    nu = np.linalg.norm(u, axis=2)
    nv = np.linalg.norm(v, axis=2)
    denom = np.where(ok, nu * nv, 1.0)
    cos = np.clip(np.sum(u * v, axis=2) / denom, -1.0, 1.0)
    angles = np.degrees(np.arccos(cos))
    return np.where(ok, angles, np.nan)


def csv_header(with_label: bool = False) -> str:
    cols = [f"f{i:02d}" for i in range(1, ENCODING_SIZE + 1)]
    if with_label:
        cols.append("label")
    return ",".join(cols)


def csv_row(angles: np.ndarray, label: int | None = None) -> str:
    """One export row; invalid entries serialize as the literal ``NaN``."""
    cells = ["NaN" if math.isnan(a) else repr(float(a)) for a in angles]
    if label is not None:
        cells.append(str(label))
    return ",".join(cells)


def ndjson_record(frame_id: int, person_id: int, angles: np.ndarray) -> dict:
    """NDJSON export form; invalid entries serialize as null."""
    return {
        "frame_id": frame_id,
        "person_id": person_id,
        "angles": [None if math.isnan(a) else float(a) for a in angles],
    }


def parse_csv_rows(lines: Iterable[str]) -> tuple[np.ndarray, np.ndarray | None]:
    """Read exported CSV lines (header included) back into arrays.

    Returns ``(features, labels)``; labels is None when the header has no
    label column. The literal ``NaN`` maps back to an invalid entry.
    """
    it = iter(lines)
    try:
        header = next(it).strip()
    except StopIteration:
        raise ValueError("empty CSV: missing header") from None
    with_label = header == csv_header(with_label=True)
    if not with_label and header != csv_header():
        raise ValueError(f"unrecognized CSV header: {header!r}")
    feats: list[list[float]] = []
    labels: list[int] = []
    for lineno, line in enumerate(it, start=2):
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        expected = ENCODING_SIZE + (1 if with_label else 0)
        if len(cells) != expected:
            raise ValueError(f"line {lineno}: expected {expected} cells, got {len(cells)}")
        feats.append([float(c) for c in cells[:ENCODING_SIZE]])
        if with_label:
            labels.append(int(cells[-1]))
    features = np.array(feats).reshape(len(feats), ENCODING_SIZE)
    return features, (np.array(labels, dtype=int) if with_label else None)
