"""Keypoint data model and NDJSON wire-format ingestion.

A frame is one person's 18 named 2D keypoints at a timestamp. Missing
keypoints travel on the wire as the exact sentinel pair ``[-1, -1]`` and
are represented in memory as ``present=False``; their coordinates never
enter any computation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

KEYPOINT_NAMES = (
    "nose",
    "neck",
    "r_shoulder",
    "r_elbow",
    "r_wrist",
    "l_shoulder",
    "l_elbow",
    "l_wrist",
    "r_hip",
    "r_knee",
    "r_ankle",
    "l_hip",
    "l_knee",
    "l_ankle",
    "r_eye",
    "l_eye",
    "r_ear",
    "l_ear",
)

NUM_KEYPOINTS = len(KEYPOINT_NAMES)  # 18

NOSE = 0
NECK = 1
R_SHOULDER = 2
R_ELBOW = 3
R_WRIST = 4
L_SHOULDER = 5
L_ELBOW = 6
L_WRIST = 7
R_HIP = 8
R_KNEE = 9
R_ANKLE = 10
L_HIP = 11
L_KNEE = 12
L_ANKLE = 13
R_EYE = 14
L_EYE = 15
R_EAR = 16
L_EAR = 17

#: Index pairs (right, left) of bilateral keypoints, used when mirroring.
BILATERAL_PAIRS = (
    (R_SHOULDER, L_SHOULDER),
    (R_ELBOW, L_ELBOW),
    (R_WRIST, L_WRIST),
    (R_HIP, L_HIP),
    (R_KNEE, L_KNEE),
    (R_ANKLE, L_ANKLE),
    (R_EYE, L_EYE),
    (R_EAR, L_EAR),
)


class WireFormatError(ValueError):
    """Base class for frame-ingestion failures."""


class MalformedRecord(WireFormatError):
    """The line is not a syntactically valid wire record."""


class WrongArity(WireFormatError):
    """The record does not carry exactly 18 keypoints."""


class NonFiniteCoordinate(WireFormatError):
    """A coordinate is NaN or infinite."""


@dataclass(frozen=True)
class Keypoint:
    """One 2D keypoint in pixel coordinates; ``present=False`` means undetected."""

    x: float
    y: float
    present: bool = True

    @staticmethod
    def absent() -> "Keypoint":
        return _ABSENT

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


_ABSENT = Keypoint(-1.0, -1.0, present=False)


@dataclass(frozen=True)
class KeypointFrame:
    """A single person's pose at one instant.

    ``points`` always has length 18, ordered per :data:`KEYPOINT_NAMES`.
    """

    frame_id: int
    ts_ms: int
    person_id: int
    points: tuple[Keypoint, ...]

    def __post_init__(self) -> None:
        if len(self.points) != NUM_KEYPOINTS:
            raise WrongArity(f"expected {NUM_KEYPOINTS} keypoints, got {len(self.points)}")

    def point(self, name: str) -> Keypoint:
        return self.points[KEYPOINT_NAMES.index(name)]


def _as_index(value: object, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedRecord(f"{field} must be an integer, got {value!r}")
    if value < 0:
        raise MalformedRecord(f"{field} must be non-negative, got {value}")
    return value


def parse_frame(line: str) -> KeypointFrame:
    """Parse one NDJSON wire record into a validated :class:`KeypointFrame`.

    The exact pair ``[-1, -1]`` becomes an absent keypoint. Unknown keys
    (e.g. a training ``label``) are ignored.

    Raises:
        MalformedRecord: bad JSON or missing/ill-typed fields.
        WrongArity: ``points`` does not have exactly 18 entries.
        NonFiniteCoordinate: a coordinate is NaN or infinite.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord("record must be a JSON object")
    try:
        raw_points = obj["points"]
        frame_id = _as_index(obj["frame_id"], "frame_id")
        ts_ms = _as_index(obj["ts_ms"], "ts_ms")
        person_id = _as_index(obj["person_id"], "person_id")
    except KeyError as exc:
        raise MalformedRecord(f"missing field {exc.args[0]!r}") from exc
    if not isinstance(raw_points, list):
        raise MalformedRecord("points must be an array")
    if len(raw_points) != NUM_KEYPOINTS:
        raise WrongArity(f"expected {NUM_KEYPOINTS} points, got {len(raw_points)}")

    points = []
    for i, pair in enumerate(raw_points):
        if not isinstance(pair, list) or len(pair) != 2:
            raise MalformedRecord(f"point {i} must be an [x, y] pair")
        x, y = pair
        if isinstance(x, bool) or isinstance(y, bool) \
                or not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            raise MalformedRecord(f"point {i} coordinates must be numbers")
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NonFiniteCoordinate(f"point {i} has non-finite coordinates")
        if x == -1.0 and y == -1.0:
            points.append(Keypoint.absent())
        else:
            points.append(Keypoint(x, y))
    return KeypointFrame(frame_id, ts_ms, person_id, tuple(points))


@dataclass(frozen=True)
class ParsedBatch:
    """Array form of many parsed wire records, for the streaming hot path.

    ``ids[i]`` is ``(frame_id, ts_ms, person_id)``; row i of ``coords`` /
    ``present`` holds the 18 keypoints. Absence is already resolved: a
    sentinel pair shows up as ``present=False`` (its coordinates stay
    ``(-1, -1)`` and are never read).
    """

    ids: list[tuple[int, int, int]]
    coords: np.ndarray  # (m, 18, 2) float64
    present: np.ndarray  # (m, 18) bool
    malformed: int


def _frame_rows(frame: KeypointFrame) -> tuple[tuple[int, int, int], list[list[float]]]:
    return (
        (frame.frame_id, frame.ts_ms, frame.person_id),
        [[p.x, p.y] for p in frame.points],
    )


def _parse_lines_strict(lines: Iterable[str]) -> ParsedBatch:
    ids, pts = [], []
    malformed = 0
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            frame = parse_frame(line)
        except WireFormatError:
            malformed += 1
            continue
        meta, rows = _frame_rows(frame)
        ids.append(meta)
        pts.append(rows)
    coords = np.asarray(pts, dtype=np.float64).reshape(len(ids), NUM_KEYPOINTS, 2)
    present = ~np.all(coords == -1.0, axis=2)
    return ParsedBatch(ids, coords, present, malformed)


def parse_lines(lines: Iterable[str]) -> ParsedBatch:
    """Parse a batch of wire lines with the same accept/reject rules as
    :func:`parse_frame`, an order of magnitude faster.

    Structural checks stay per line; numeric checks (finiteness, the
    absent sentinel) are vectorized over the whole batch. Lines carrying
    JSON bool literals take the scalar path, because a bool coordinate
    must be rejected but would coerce silently under array conversion.
    Blank lines are skipped without counting as malformed.
    """
    lines = list(lines)  # the fallback path below re-reads from the top
    ids: list[tuple[int, int, int]] = []
    pts: list[list] = []
    malformed = 0
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if "true" in line or "false" in line:
            try:
                meta, rows = _frame_rows(parse_frame(line))
            except WireFormatError:
                malformed += 1
            else:
                ids.append(meta)
                pts.append(rows)
            continue
        try:
            obj = json.loads(line)
            raw = obj["points"]
            frame_id, ts_ms, person_id = obj["frame_id"], obj["ts_ms"], obj["person_id"]
        except (json.JSONDecodeError, KeyError, TypeError):
            malformed += 1
            continue
        if (
            type(frame_id) is not int or frame_id < 0
            or type(ts_ms) is not int or ts_ms < 0
            or type(person_id) is not int or person_id < 0
            or type(raw) is not list or len(raw) != NUM_KEYPOINTS
        ):
            malformed += 1
            continue
        ids.append((frame_id, ts_ms, person_id))
        pts.append(raw)

    if not ids:
        return ParsedBatch([], np.empty((0, NUM_KEYPOINTS, 2)),
                           np.empty((0, NUM_KEYPOINTS), dtype=bool), malformed)
    try:
        coords = np.asarray(pts)
        if coords.shape != (len(ids), NUM_KEYPOINTS, 2) or coords.dtype.kind not in "if":
            raise ValueError("points are not uniformly numeric [x, y] pairs")
    except (ValueError, TypeError):
        # some record has ragged or non-numeric points; redo one by one
        return _parse_lines_strict(lines)
    coords = coords.astype(np.float64, copy=False)

    finite = np.isfinite(coords).all(axis=(1, 2))
    if not finite.all():
        malformed += int(np.count_nonzero(~finite))
        coords = coords[finite]
        ids = [meta for meta, keep in zip(ids, finite) if keep]
    present = ~np.all(coords == -1.0, axis=2)
    return ParsedBatch(ids, coords, present, malformed)


def serialize_frame(frame: KeypointFrame, extra: dict | None = None) -> str:
    """Serialize a frame back to its one-line wire form.

    Coordinates use Python's shortest round-tripping float repr, so
    ``parse_frame(serialize_frame(f)) == f`` bit-exactly.
    """
    obj = {
        "frame_id": frame.frame_id,
        "ts_ms": frame.ts_ms,
        "person_id": frame.person_id,
        "points": [[p.x, p.y] if p.present else [-1, -1] for p in frame.points],
    }
    if extra:
        obj.update(extra)
    return json.dumps(obj, separators=(",", ":"))


def derive_neck(frame: KeypointFrame) -> Keypoint:
    """The neck keypoint: upstream value when present, else the shoulder mean.

    The upstream estimator already extrapolates the neck as the mean of the
    two shoulders; we only re-derive it when it is missing and both
    shoulders were detected.
    """
    neck = frame.points[NECK]
    if neck.present:
        return neck
    return _midpoint(frame.points[R_SHOULDER], frame.points[L_SHOULDER])


def derive_core(frame: KeypointFrame) -> Keypoint:
    """The core joint: coordinate-wise mean of the two hips, absent otherwise."""
    return _midpoint(frame.points[R_HIP], frame.points[L_HIP])


def _midpoint(a: Keypoint, b: Keypoint) -> Keypoint:
    if not (a.present and b.present):
        return Keypoint.absent()
    return Keypoint((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)


def transform_frame(
    frame: KeypointFrame, fn: Callable[[float, float], tuple[float, float]]
) -> KeypointFrame:
    """Apply a point map to every present keypoint; absent ones stay absent."""
    points = tuple(
        Keypoint(*fn(p.x, p.y)) if p.present else p for p in frame.points
    )
    return replace(frame, points=points)


def mirror_frame(frame: KeypointFrame, axis_x: float = 0.0) -> KeypointFrame:
    """Reflect x-coordinates about ``axis_x`` and swap every left/right label."""
    reflected = list(
        Keypoint(2.0 * axis_x - p.x, p.y) if p.present else p for p in frame.points
    )
    for r, l in BILATERAL_PAIRS:
        reflected[r], reflected[l] = reflected[l], reflected[r]
    return replace(frame, points=tuple(reflected))
