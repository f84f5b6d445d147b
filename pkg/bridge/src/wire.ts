/** Keypoint remapping and NDJSON serialization for skeleton frames. */

/** A 2D point; null marks a keypoint the estimator did not detect. */
export type MaybePoint = [number, number] | null;

/** Downstream wire value for an absent keypoint. */
export const ABSENT: readonly [number, number] = [-1, -1];

/** 17-keypoint order produced by COCO-trained estimators (MoveNet, PoseNet, ...). */
export const COCO_KEYPOINTS = [
  "nose",
  "left_eye",
  "right_eye",
  "left_ear",
  "right_ear",
  "left_shoulder",
  "right_shoulder",
  "left_elbow",
  "right_elbow",
  "left_wrist",
  "right_wrist",
  "left_hip",
  "right_hip",
  "left_knee",
  "right_knee",
  "left_ankle",
  "right_ankle",
] as const;

/** 18-keypoint order expected on the wire by the activity engine. */
export const ENGINE_KEYPOINTS = [
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
] as const;

/**
 * engine slot -> COCO index.  Slot 1 (neck) has no COCO counterpart and is
 * derived in remapPose; it is marked here with -1.
 */
export const ENGINE_TO_COCO: readonly number[] = [
  0, // nose
  -1, // neck (derived)
  6, // r_shoulder
  8, // r_elbow
  10, // r_wrist
  5, // l_shoulder
  7, // l_elbow
  9, // l_wrist
  12, // r_hip
  14, // r_knee
  16, // r_ankle
  11, // l_hip
  13, // l_knee
  15, // l_ankle
  2, // r_eye
  1, // l_eye
  4, // r_ear
  3, // l_ear
];

export interface WireFrame {
  frame_id: number;
  ts_ms: number;
  person_id: number;
  points: [number, number][];
}

/**
 * Reorder a 17-point COCO pose into the engine's 18-slot layout.
 *
 * The neck slot is filled with the shoulder midpoint when both shoulders are
 * present, otherwise it is absent.  Undetected keypoints map to the exact
 * (-1, -1) sentinel.
 */
export function remapPose(coco: readonly MaybePoint[]): [number, number][] {
  if (coco.length !== COCO_KEYPOINTS.length) {
    throw new Error(`expected ${COCO_KEYPOINTS.length} keypoints, got ${coco.length}`);
  }
  const out: [number, number][] = [];
  for (const src of ENGINE_TO_COCO) {
    if (src < 0) {
      out.push(neckPoint(coco));
    } else {
      const p = coco[src];
      out.push(p ? [p[0], p[1]] : [ABSENT[0], ABSENT[1]]);
    }
  }
  return out;
}

function neckPoint(coco: readonly MaybePoint[]): [number, number] {
  const ls = coco[5];
  const rs = coco[6];
  if (ls && rs) {
    return [(ls[0] + rs[0]) / 2, (ls[1] + rs[1]) / 2];
  }
  return [ABSENT[0], ABSENT[1]];
}

/**
 * One NDJSON line (no trailing newline).  JSON.stringify emits the shortest
 * round-trip decimal for each float64, which the Python side parses back to
 * the identical bits.
 */
export function formatFrame(frame: WireFrame): string {
  return JSON.stringify({
    frame_id: frame.frame_id,
    ts_ms: frame.ts_ms,
    person_id: frame.person_id,
    points: frame.points,
  });
}
