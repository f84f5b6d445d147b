/**
 * Regenerate fixtures/clip.json: a deterministic 10 s / 30 fps single-person
 * recording in the native 17-keypoint layout, shaped like a real estimator
 * dump.  The subject walks across frame, leaves for half a second, then
 * returns and slumps forward.  Keypoints drop out now and then (null), the
 * way detectors lose ears and wrists.
 */

import { writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { COCO_KEYPOINTS } from "../src/wire.js";

const FPS = 30;
const SECONDS = 10;
const WIDTH = 640;
const HEIGHT = 480;
const ABSENT_START = 150; // frames 150..164 have no detection
const ABSENT_END = 165;

let state = 404;
function rng(): number {
  state = (state * 48271) % 2147483647;
  return state / 2147483647;
}

type Pt = [number, number] | null;

function r2(v: number): number {
  return Math.round(v * 100) / 100;
}

function pose(i: number): Pt[] {
  const t = i / FPS;
  const walking = i < ABSENT_START;
  // hip-center path: stroll right, step out, come back and settle
  const cx = walking ? 120 + 80 * t : 520 - 24 * (t - ABSENT_END / FPS);
  const cy = 300 + 4 * Math.sin(2 * Math.PI * 1.6 * t);
  // forward pitch of the torso, degrees; upright while walking
  const slump = walking ? 3 * Math.sin(2 * Math.PI * 0.4 * t) : Math.min(55, 16 * (t - ABSENT_END / FPS));
  const phi = (slump * Math.PI) / 180;
  const swing = walking ? Math.sin(2 * Math.PI * 1.6 * t) : 0.1 * Math.sin(2 * Math.PI * 0.5 * t);

  const neck: [number, number] = [cx + 95 * Math.sin(phi), cy - 95 * Math.cos(phi)];
  const headDir: [number, number] = [Math.sin(phi), -Math.cos(phi)];
  const nose: [number, number] = [neck[0] + 28 * headDir[0], neck[1] + 28 * headDir[1]];

  const lShoulder: [number, number] = [neck[0] + 20, neck[1] + 2];
  const rShoulder: [number, number] = [neck[0] - 20, neck[1] + 2];
  const lHip: [number, number] = [cx + 14, cy];
  const rHip: [number, number] = [cx - 14, cy];
  // arms swing in opposition; slumping pulls both forward and down
  const lArm = 0.6 * swing + phi;
  const rArm = -0.6 * swing + phi;
  const lElbow: [number, number] = [lShoulder[0] + 32 * Math.sin(lArm), lShoulder[1] + 32 * Math.cos(lArm)];
  const rElbow: [number, number] = [rShoulder[0] + 32 * Math.sin(rArm), rShoulder[1] + 32 * Math.cos(rArm)];
  const lLeg = walking ? 0.45 * swing : 0.05;
  const rLeg = walking ? -0.45 * swing : -0.05;
  const lKnee: [number, number] = [lHip[0] + 42 * Math.sin(lLeg), lHip[1] + 42 * Math.cos(lLeg)];
  const rKnee: [number, number] = [rHip[0] + 42 * Math.sin(rLeg), rHip[1] + 42 * Math.cos(rLeg)];

  const kp: Record<(typeof COCO_KEYPOINTS)[number], [number, number]> = {
    nose,
    left_eye: [nose[0] + 8, nose[1] - 6],
    right_eye: [nose[0] - 8, nose[1] - 6],
    left_ear: [nose[0] + 14, nose[1] - 2],
    right_ear: [nose[0] - 14, nose[1] - 2],
    left_shoulder: lShoulder,
    right_shoulder: rShoulder,
    left_elbow: lElbow,
    left_wrist: [lElbow[0] + 32 * Math.sin(lArm * 1.3), lElbow[1] + 32 * Math.cos(lArm * 1.3)],
    right_elbow: rElbow,
    right_wrist: [rElbow[0] + 32 * Math.sin(rArm * 1.3), rElbow[1] + 32 * Math.cos(rArm * 1.3)],
    left_hip: lHip,
    right_hip: rHip,
    left_knee: lKnee,
    left_ankle: [lKnee[0] + 42 * Math.sin(lLeg * 0.5), lKnee[1] + 42 * Math.cos(lLeg * 0.5)],
    right_knee: rKnee,
    right_ankle: [rKnee[0] + 42 * Math.sin(rLeg * 0.5), rKnee[1] + 42 * Math.cos(rLeg * 0.5)],
  };

  return COCO_KEYPOINTS.map((name): Pt => {
    // detector dropouts: ears go first, then wrists and eyes
    const drop =
      (name.endsWith("_ear") && rng() < 0.08) ||
      (name.endsWith("_wrist") && rng() < 0.05) ||
      (name.endsWith("_eye") && rng() < 0.03);
    if (drop) {
      return null;
    }
    // a short stretch where the left shoulder is lost (neck falls back to absent)
    if (name === "left_shoulder" && i >= 40 && i < 43) {
      return null;
    }
    const p = kp[name];
    const jx = (rng() - 0.5) * 1.2;
    const jy = (rng() - 0.5) * 1.2;
    return [r2(p[0] + jx), r2(p[1] + jy)];
  });
}

const frames: string[] = [];
for (let i = 0; i < FPS * SECONDS; i++) {
  const tMs = Math.round((i * 1000) / FPS);
  const persons =
    i >= ABSENT_START && i < ABSENT_END ? [] : [{ id: 0, keypoints: pose(i) }];
  frames.push("    " + JSON.stringify({ t_ms: tMs, persons }));
}

const body = `{
  "source": "walk-then-slump, single subject",
  "fps": ${FPS},
  "width": ${WIDTH},
  "height": ${HEIGHT},
  "keypoint_order": ${JSON.stringify(COCO_KEYPOINTS)},
  "frames": [
${frames.join(",\n")}
  ]
}
`;

const out = fileURLToPath(new URL("../../fixtures/clip.json", import.meta.url));
writeFileSync(out, body);
console.log(`wrote ${out}: ${frames.length} frames`);
