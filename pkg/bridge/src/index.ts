export {
  ABSENT,
  COCO_KEYPOINTS,
  ENGINE_KEYPOINTS,
  ENGINE_TO_COCO,
  formatFrame,
  remapPose,
  type MaybePoint,
  type WireFrame,
} from "./wire.js";
export {
  openLiveSource,
  RecordedSource,
  resolveWeights,
  SourceUnavailable,
  WeightsMissing,
  WEIGHTS_ENV,
  type DetectedFrame,
  type LiveOptions,
  type PersonPose,
  type PoseSource,
} from "./sources.js";
export { openOutput, streamFrames, type LineSink, type StreamOptions, type StreamStats } from "./emit.js";
