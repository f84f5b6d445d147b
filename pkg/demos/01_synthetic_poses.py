"""
Generating labeled stick-figure poses
=====================================

Every other demo needs labeled data, so this one starts at the source: a
parametric stick figure whose head/torso slump angle decides how "active"
the pose looks. Slump 0 is bolt upright (Level 4); past 45 degrees the
figure is deeply slumped (Level 1).
"""

import numpy as np

from activenet import (
    CLASS_BANDS,
    SyntheticPoseParams,
    generate_dataset,
    ideal_points,
    label_for_slump,
    make_frame,
    serialize_frame,
)

# ---------------------------------------------------------------------------
# One noise-free figure per class, as raw keypoint coordinates
# ---------------------------------------------------------------------------
# ideal_points returns the 18 keypoints in wire order; y grows downward
# (image convention), so an upright neck sits *above* the hips at smaller y.

for label in (4, 3, 2, 1):
    lo, hi = CLASS_BANDS[label]
    slump = (lo + hi) / 2.0
    pts = ideal_points(slump_deg=slump, droop_deg=10.0)
    nose, neck = pts[0], pts[1]
    hips = (pts[8] + pts[11]) / 2.0
    print(f"Level {label}: slump {slump:5.1f} deg  "
          f"nose=({nose[0]:6.1f},{nose[1]:6.1f})  "
          f"neck-above-hips={hips[1] - neck[1]:6.1f}px")

# the class is just a band lookup on the slump angle
assert label_for_slump(5.0) == 4 and label_for_slump(60.0) == 1

# ---------------------------------------------------------------------------
# Noise and occlusion make the figures look like real estimator output
# ---------------------------------------------------------------------------
params = SyntheticPoseParams(slump_deg=30.0, droop_deg=50.0,
                             noise_sigma=2.0, occlusion_prob=0.15, seed=6)
frame = make_frame(params, frame_id=1, ts_ms=33, person_id=0)
missing = [i for i, p in enumerate(frame.points) if not p.present]
print(f"\nnoisy frame: {18 - len(missing)}/18 keypoints detected, "
      f"occluded indices {missing}")

# on the wire a frame is one NDJSON line; absent keypoints are (-1,-1)
print(serialize_frame(frame)[:100] + " ...")

# ---------------------------------------------------------------------------
# A balanced labeled dataset, deterministic per seed
# ---------------------------------------------------------------------------
rows = generate_dataset(n_per_class=50, seed=0)
labels = np.array([label for _, label in rows])
print(f"\ndataset: {len(rows)} frames, "
      f"class counts {np.bincount(labels)[1:].tolist()}")
again = generate_dataset(n_per_class=50, seed=0)
print("same seed, same frames:",
      all(a == b for (a, _), (b, _) in zip(rows, again)))
