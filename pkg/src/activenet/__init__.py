"""Streaming activeness classification over 2D skeleton keypoint frames.

Frames arrive as NDJSON records of 18 image-space keypoints, are folded
into a 15-angle position-invariant pose encoding, classified into four
activeness levels by from-scratch tree/forest/logistic models, and low
activeness sustained over k consecutive frames raises a debounced
webhook alert.
"""

from .alert import AlertConfig, AlertDispatcher, AlertEvent, AlertState, send_webhook, update
from .encoder import ENCODING_SIZE, PoseEncoding, angle_at, encode, encode_batch, spec_feature_names
from .forest import (
    Hyperparams,
    LogisticParams,
    Metrics,
    ModelBundle,
    evaluate,
    grid_search,
    kfold_cv,
    predict,
    train_forest,
    train_logistic,
    train_tree,
)
from .preprocess import LabeledDataset, PreprocessStats, filter_rows, fit, transform
from .skeleton import (
    KEYPOINT_NAMES,
    Keypoint,
    KeypointFrame,
    WireFormatError,
    mirror_frame,
    parse_frame,
    serialize_frame,
    transform_frame,
)
from .synth import (
    CLASS_BANDS,
    SyntheticPoseParams,
    generate_dataset,
    generate_stream,
    ideal_points,
    label_for_slump,
    make_frame,
)

__version__ = "0.1.0"

__all__ = [
    "AlertConfig", "AlertDispatcher", "AlertEvent", "AlertState", "send_webhook", "update",
    "ENCODING_SIZE", "PoseEncoding", "angle_at", "encode", "encode_batch", "spec_feature_names",
    "Hyperparams", "LogisticParams", "Metrics", "ModelBundle", "evaluate", "grid_search",
    "kfold_cv", "predict", "train_forest", "train_logistic", "train_tree",
    "LabeledDataset", "PreprocessStats", "filter_rows", "fit", "transform",
    "KEYPOINT_NAMES", "Keypoint", "KeypointFrame", "WireFormatError", "mirror_frame",
    "parse_frame", "serialize_frame", "transform_frame",
    "CLASS_BANDS", "SyntheticPoseParams", "generate_dataset", "generate_stream",
    "ideal_points", "label_for_slump", "make_frame",
    "__version__",
]
