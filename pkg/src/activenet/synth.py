"""Synthetic labeled stick-figure poses for training and benchmarks.

Generates anatomically plausible 18-keypoint figures whose head/torso
slump angle drives the activeness class: an upright figure (slump 0) is
Level 4, a deeply slumped one Level 1. Arm droop, knee bend and torso
tilt co-vary with the slump so several encoding entries carry signal.
Gaussian pixel noise and random keypoint occlusion make the rows
imperfect in the same ways real estimator output is.

Class bands (slump angle in degrees):
  Level 4: [0, 10)   Level 3: [10, 25)   Level 2: [25, 45)   Level 1: [45, 80)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .skeleton import NUM_KEYPOINTS, Keypoint, KeypointFrame

CLASS_BANDS = {4: (0.0, 10.0), 3: (10.0, 25.0), 2: (25.0, 45.0), 1: (45.0, 80.0)}

#: Arm-droop sampling bands per class; deliberately non-monotone across
#: classes (a deeply slumped figure lets the arms hang nearly straight),
#: so droop separates classes without being a second ordered copy of the
#: slump angle.
DROOP_BANDS = {4: (0.0, 12.0), 3: (18.0, 40.0), 2: (45.0, 70.0), 1: (8.0, 30.0)}

DEFAULT_NOISE_SIGMA = 1.5
DEFAULT_OCCLUSION_PROB = 0.03

# figure proportions in pixels
_CORE = (320.0, 400.0)
_TORSO = 120.0
_HEAD = 40.0
_EYE_UP, _EYE_OUT = 44.0, 9.0
_EAR_UP, _EAR_OUT = 42.0, 17.0
_SHOULDER_HALF = 35.0
_HIP_HALF = 25.0
_UPPER_ARM, _FOREARM = 55.0, 45.0
_THIGH, _SHIN = 85.0, 80.0
_ARM_SWING = 8.0       # outward swing of the upper arm, degrees
_LEG_STANCE = 5.0      # outward stance of each leg, degrees
_TORSO_COUPLING = 0.5  # torso tilt per degree of slump
_KNEE_COUPLING = 0.35  # knee bend per degree of slump


@dataclass(frozen=True)
class SyntheticPoseParams:
    """One figure draw: pose angles plus corruption settings."""

    slump_deg: float = 0.0
    droop_deg: float = 0.0
    noise_sigma: float = 0.0
    occlusion_prob: float = 0.0
    seed: int = 0


def label_for_slump(slump_deg: float) -> int:
    for label, (lo, hi) in CLASS_BANDS.items():
        if lo <= slump_deg < hi:
            return label
    raise ValueError(f"slump angle {slump_deg} outside all class bands")


def _up(angle_deg: float) -> tuple[float, float]:
    # unit vector pointing up (y decreasing), tipped toward +x by angle
    a = math.radians(angle_deg)
    return (math.sin(a), -math.cos(a))


def _side(angle_deg: float) -> tuple[float, float]:
    # unit vector 90 degrees from _up, toward the figure's left (+x upright)
    a = math.radians(angle_deg)
    return (math.cos(a), math.sin(a))


def _down_out(angle_deg: float, out_sign: float) -> tuple[float, float]:
    # unit vector pointing down, swung outward by angle (out_sign: -1 right, +1 left)
    a = math.radians(angle_deg)
    return (out_sign * math.sin(a), math.cos(a))


def ideal_points(slump_deg: float, droop_deg: float) -> np.ndarray:
    """Noise-free keypoint coordinates, shape (18, 2), in keypoint order.

    At slump 0 the nose, neck and core sit on one exact vertical line.
    """
    tilt = _TORSO_COUPLING * slump_deg
    head = tilt + slump_deg
    bend = _KNEE_COUPLING * slump_deg

    cx, cy = _CORE
    ut = _up(tilt)
    uh = _up(head)
    sh = _side(head)
    st = _side(tilt)

    neck = (cx + _TORSO * ut[0], cy + _TORSO * ut[1])

    def off(base, ux, d, sx=None, s=0.0):
        return (base[0] + d * ux[0] + s * (sx[0] if sx else 0.0),
                base[1] + d * ux[1] + s * (sx[1] if sx else 0.0))

    nose = off(neck, uh, _HEAD)
    r_eye = off(neck, uh, _EYE_UP, sh, -_EYE_OUT)
    l_eye = off(neck, uh, _EYE_UP, sh, +_EYE_OUT)
    r_ear = off(neck, uh, _EAR_UP, sh, -_EAR_OUT)
    l_ear = off(neck, uh, _EAR_UP, sh, +_EAR_OUT)

    r_shoulder = (neck[0] - _SHOULDER_HALF * st[0], neck[1] - _SHOULDER_HALF * st[1])
    l_shoulder = (neck[0] + _SHOULDER_HALF * st[0], neck[1] + _SHOULDER_HALF * st[1])

    swing = _ARM_SWING + 0.25 * droop_deg
    arms = {}
    for sign, shoulder, side in ((-1.0, r_shoulder, "r"), (+1.0, l_shoulder, "l")):
        du = _down_out(swing, sign)
        elbow = (shoulder[0] + _UPPER_ARM * du[0], shoulder[1] + _UPPER_ARM * du[1])
        df = _down_out(swing + droop_deg, sign)
        wrist = (elbow[0] + _FOREARM * df[0], elbow[1] + _FOREARM * df[1])
        arms[side] = (elbow, wrist)

    r_hip = (cx - _HIP_HALF, cy)
    l_hip = (cx + _HIP_HALF, cy)
    legs = {}
    for sign, hip, side in ((-1.0, r_hip, "r"), (+1.0, l_hip, "l")):
        dt = _down_out(_LEG_STANCE, sign)
        knee = (hip[0] + _THIGH * dt[0], hip[1] + _THIGH * dt[1])
        ds = _down_out(_LEG_STANCE - bend, sign)
        ankle = (knee[0] + _SHIN * ds[0], knee[1] + _SHIN * ds[1])
        legs[side] = (knee, ankle)

    return np.array([
        nose,
        neck,
        r_shoulder, arms["r"][0], arms["r"][1],
        l_shoulder, arms["l"][0], arms["l"][1],
        r_hip, legs["r"][0], legs["r"][1],
        l_hip, legs["l"][0], legs["l"][1],
        r_eye, l_eye,
        r_ear, l_ear,
    ])


def make_frame(params: SyntheticPoseParams, frame_id: int = 0, ts_ms: int = 0,
               person_id: int = 0, rng: np.random.Generator | None = None) -> KeypointFrame:
    """Materialize one frame, applying noise then occlusion."""
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(params.seed))
    coords = ideal_points(params.slump_deg, params.droop_deg)
    coords = coords + params.noise_sigma * rng.standard_normal(coords.shape)
    visible = rng.random(NUM_KEYPOINTS) >= params.occlusion_prob
    points = tuple(
        Keypoint(float(x), float(y)) if keep else Keypoint.absent()
        for (x, y), keep in zip(coords, visible)
    )
    return KeypointFrame(frame_id, ts_ms, person_id, points)


def generate_dataset(n_per_class: int, noise_sigma: float = DEFAULT_NOISE_SIGMA,
                     occlusion_prob: float = DEFAULT_OCCLUSION_PROB,
                     seed: int = 0) -> list[tuple[KeypointFrame, int]]:
    """4n labeled frames, classes grouped 1..4, deterministic per seed."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    rows = []
    frame_id = 0
    for label in (1, 2, 3, 4):
        lo, hi = CLASS_BANDS[label]
        dlo, dhi = DROOP_BANDS[label]
        for _ in range(n_per_class):
            params = SyntheticPoseParams(
                slump_deg=rng.uniform(lo, hi),
                droop_deg=rng.uniform(dlo, dhi),
                noise_sigma=noise_sigma,
                occlusion_prob=occlusion_prob,
            )
            rows.append((make_frame(params, frame_id, ts_ms=100 * frame_id, rng=rng), label))
            frame_id += 1
    return rows


def generate_stream(labels: list[int], noise_sigma: float = DEFAULT_NOISE_SIGMA,
                    occlusion_prob: float = 0.0, seed: int = 0,
                    person_id: int = 0, frame_interval_ms: int = 100) -> list[KeypointFrame]:
    """A frame sequence whose i-th pose sits mid-band for ``labels[i]``.

    Useful for streaming fixtures: band centers keep the poses far from
    class boundaries so the classifier's output tracks the request.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    frames = []
    for i, label in enumerate(labels):
        lo, hi = CLASS_BANDS[label]
        dlo, dhi = DROOP_BANDS[label]
        params = SyntheticPoseParams(
            slump_deg=(lo + hi) / 2.0,
            droop_deg=(dlo + dhi) / 2.0,
            noise_sigma=noise_sigma,
            occlusion_prob=occlusion_prob,
        )
        frames.append(make_frame(params, frame_id=i, ts_ms=i * frame_interval_ms,
                                 person_id=person_id, rng=rng))
    return frames
