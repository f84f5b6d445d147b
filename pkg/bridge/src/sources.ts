/** Pose sources: recorded clip replay and the live-estimator entry point. */

import { readFile, stat } from "node:fs/promises";
import type { MaybePoint } from "./wire.js";
import { COCO_KEYPOINTS } from "./wire.js";

/** Raised when the camera / video / clip cannot be opened.  Fatal at startup. */
export class SourceUnavailable extends Error {
  override name = "SourceUnavailable";
}

/** Raised when estimator weights are not supplied or not readable.  Fatal at startup. */
export class WeightsMissing extends Error {
  override name = "WeightsMissing";
}

export interface PersonPose {
  id: number;
  keypoints: MaybePoint[];
}

export interface DetectedFrame {
  tMs: number;
  persons: PersonPose[];
}

/** Anything that yields detections frame by frame. */
export interface PoseSource extends AsyncIterable<DetectedFrame> {
  readonly fps: number;
  readonly label: string;
}

interface ClipFile {
  fps: number;
  width: number;
  height: number;
  keypoint_order: string[];
  frames: { t_ms: number; persons: { id: number; keypoints: (number[] | null)[] }[] }[];
}

/** Replays an estimator session recorded to JSON (native 17-keypoint order). */
export class RecordedSource implements PoseSource {
  readonly fps: number;
  readonly label: string;
  readonly width: number;
  readonly height: number;
  private frames: DetectedFrame[];

  private constructor(clip: ClipFile, label: string) {
    this.fps = clip.fps;
    this.label = label;
    this.width = clip.width;
    this.height = clip.height;
    this.frames = clip.frames.map((f) => ({
      tMs: f.t_ms,
      persons: f.persons.map((p) => ({
        id: p.id,
        keypoints: p.keypoints.map((k) => (k === null ? null : [k[0]!, k[1]!])),
      })),
    }));
  }

  static async open(path: string): Promise<RecordedSource> {
    let raw: string;
    try {
      raw = await readFile(path, "utf8");
    } catch (err) {
      throw new SourceUnavailable(`cannot open clip ${path}: ${(err as Error).message}`);
    }
    let clip: ClipFile;
    try {
      clip = JSON.parse(raw) as ClipFile;
    } catch (err) {
      throw new SourceUnavailable(`clip ${path} is not valid JSON: ${(err as Error).message}`);
    }
    validateClip(clip, path);
    return new RecordedSource(clip, path);
  }

  get frameCount(): number {
    return this.frames.length;
  }

  async *[Symbol.asyncIterator](): AsyncIterator<DetectedFrame> {
    for (const frame of this.frames) {
      yield frame;
    }
  }
}

function validateClip(clip: ClipFile, path: string): void {
  if (!Number.isFinite(clip.fps) || clip.fps <= 0) {
    throw new SourceUnavailable(`clip ${path}: missing or bad fps`);
  }
  if (!Array.isArray(clip.frames) || clip.frames.length === 0) {
    throw new SourceUnavailable(`clip ${path}: no frames`);
  }
  const order = clip.keypoint_order;
  if (!Array.isArray(order) || order.join(",") !== COCO_KEYPOINTS.join(",")) {
    throw new SourceUnavailable(`clip ${path}: keypoint_order is not the native 17-point order`);
  }
  for (const [i, frame] of clip.frames.entries()) {
    if (!Number.isFinite(frame.t_ms) || frame.t_ms < 0) {
      throw new SourceUnavailable(`clip ${path}: frame ${i} has bad t_ms`);
    }
    for (const person of frame.persons) {
      if (person.keypoints.length !== COCO_KEYPOINTS.length) {
        throw new SourceUnavailable(
          `clip ${path}: frame ${i} person ${person.id} has ${person.keypoints.length} keypoints`,
        );
      }
    }
  }
}

/** Environment variable consulted when --weights is not given. */
export const WEIGHTS_ENV = "HPE_BRIDGE_WEIGHTS";

/** Resolve the weights path from a flag or the environment; fatal if absent. */
export async function resolveWeights(
  flag: string | undefined,
  env: NodeJS.ProcessEnv = process.env,
): Promise<string> {
  const path = flag ?? env[WEIGHTS_ENV];
  if (!path) {
    throw new WeightsMissing(`no estimator weights: pass --weights or set ${WEIGHTS_ENV}`);
  }
  try {
    const info = await stat(path);
    if (!info.isFile()) {
      throw new Error("not a file");
    }
  } catch {
    throw new WeightsMissing(`weights not readable: ${path}`);
  }
  return path;
}

export interface LiveOptions {
  /** "camera:<n>" / bare index for a capture device, otherwise a video path. */
  source: string;
  weightsFlag?: string;
  env?: NodeJS.ProcessEnv;
}

/**
 * Open a live estimator over a camera or video file.  All failure modes are
 * fatal here, before any frame is emitted: weights are checked first, then
 * the source, then the inference runtime.
 */
export async function openLiveSource(opts: LiveOptions): Promise<PoseSource> {
  await resolveWeights(opts.weightsFlag, opts.env ?? process.env);
  const cam = /^(camera:)?(\d+)$/.exec(opts.source);
  if (!cam) {
    try {
      const info = await stat(opts.source);
      if (!info.isFile()) {
        throw new Error("not a file");
      }
    } catch {
      throw new SourceUnavailable(`video not found: ${opts.source}`);
    }
  }
  let runtime: unknown;
  try {
    const spec = "@tensorflow/tfjs"; // resolved on the deploy host only
    runtime = await import(spec);
  } catch (err) {
    throw new SourceUnavailable(
      `cannot open ${opts.source}: inference runtime missing (${(err as Error).message})`,
    );
  }
  return await startEstimator(opts.source, runtime);
}

async function startEstimator(source: string, _runtime: unknown): Promise<PoseSource> {
  // Decoding camera/video frames in headless node needs an external decoder;
  // wire one in here when deploying.  Until then this is a startup failure,
  // never a mid-stream one.
  throw new SourceUnavailable(`cannot open ${source}: no frame decoder configured for this host`);
}
