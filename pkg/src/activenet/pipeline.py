"""End-to-end wiring: streaming runtime, batch commands, configuration.

The streaming path is frame-in, record-out: parse -> encode -> scale with
the model's persisted stats -> classify -> alert debounce, emitting one
NDJSON result per frame and a run summary on shutdown. Frames are
processed in order but in chunks, so the numeric hot path stays
vectorized; chunking never changes any output.
"""

from __future__ import annotations

import json
import logging
import os
import queue
import socket
import sys
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np

from . import alert as alert_mod
from . import encoder, forest, preprocess, synth
from .alert import AlertConfig, AlertDispatcher, AlertState
from .forest import Hyperparams, LogisticParams, ModelBundle
from .preprocess import LabeledDataset
from .skeleton import KeypointFrame, WireFormatError, parse_frame, parse_lines, serialize_frame

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3

WEBHOOK_ENV_VAR = "ACTIVENET_WEBHOOK_URL"

DEFAULT_CHUNK_SIZE = 4096


class InputUnavailable(Exception):
    """The configured input source cannot be opened."""


class UnreadableInput(Exception):
    """A data file exists but cannot be interpreted."""


@dataclass(frozen=True)
class PipelineConfig:
    source: str = "stdin"  # "stdin" | "tcp:<port>" | file path
    model_path: str = "model.json"
    alert: AlertConfig = field(default_factory=AlertConfig)
    dry_run: bool = False
    log_level: str = "INFO"
    summary_path: str | None = None
    chunk_size: int = DEFAULT_CHUNK_SIZE


def load_config(path: str | Path) -> PipelineConfig:
    """Read a TOML config file; the webhook URL env var wins over the file."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    alert_raw = dict(raw.get("alert", {}))
    dry_run = bool(alert_raw.pop("dry_run", False))
    cfg = PipelineConfig(
        source=raw.get("input", {}).get("source", "stdin"),
        model_path=raw.get("model", {}).get("path", "model.json"),
        alert=AlertConfig(**alert_raw),
        dry_run=dry_run,
        log_level=raw.get("log", {}).get("level", "INFO"),
        summary_path=raw.get("summary", {}).get("output") or None,
        chunk_size=int(raw.get("run", {}).get("chunk_size", DEFAULT_CHUNK_SIZE)),
    )
    return apply_env_overrides(cfg)


def apply_env_overrides(cfg: PipelineConfig) -> PipelineConfig:
    url = os.environ.get(WEBHOOK_ENV_VAR)
    if url:
        cfg = replace(cfg, alert=replace(cfg.alert, webhook_url=url))
    return cfg


def open_source(source: str) -> Iterator[str]:
    """Line iterator over stdin, a file, or a single-connection TCP listener."""
    if source == "stdin":
        return iter(sys.stdin)
    if source.startswith("tcp:"):
        try:
            port = int(source.split(":", 1)[1])
        except ValueError as exc:
            raise InputUnavailable(f"bad tcp source {source!r}") from exc
        return _tcp_lines(port)
    path = Path(source)
    if not path.exists():
        raise InputUnavailable(f"input file not found: {source}")
    return iter(path.open("r", encoding="utf-8"))


def _tcp_lines(port: int) -> Iterator[str]:
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        server.bind(("127.0.0.1", port))
    except OSError as exc:
        server.close()
        raise InputUnavailable(f"cannot listen on port {port}: {exc}") from exc
    server.listen(1)
    log.info("listening on tcp:%d", port)
    conn, addr = server.accept()
    log.info("stream connected from %s", addr)
    server.close()
    with conn, conn.makefile("r", encoding="utf-8") as fh:
        yield from fh


_EOS = object()


def _chunks(lines: Iterable[str], max_size: int) -> Iterator[list[str]]:
    """Adaptive chunker: yields whatever input has arrived, up to max_size.

    A reader thread feeds a queue; each yield blocks only for the first
    line and then drains greedily. Fast producers (files, saturated
    pipes) get full chunks for the vectorized path, while a trickling
    live stream is processed frame by frame with no added latency.
    """
    q: queue.SimpleQueue = queue.SimpleQueue()

    def _read() -> None:
        try:
            for line in lines:
                q.put(line)
        except OSError as exc:
            log.warning("input stream closed: %s", exc)
        finally:
            q.put(_EOS)

    threading.Thread(target=_read, daemon=True, name="stream-reader").start()
    eos = False
    while not eos:
        first = q.get()
        if first is _EOS:
            return
        chunk = [first]
        while len(chunk) < max_size:
            try:
                item = q.get_nowait()
            except queue.Empty:
                break
            if item is _EOS:
                eos = True
                break
            chunk.append(item)
        yield chunk


@dataclass
class StreamSummary:
    frames: int = 0
    malformed: int = 0
    class_counts: dict[int, int] = field(default_factory=lambda: {1: 0, 2: 0, 3: 0, 4: 0})
    alerts_fired: int = 0
    elapsed_s: float = 0.0

    @property
    def fps(self) -> float:
        return self.frames / self.elapsed_s if self.elapsed_s > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "frames": self.frames,
            "malformed": self.malformed,
            "class_counts": {str(k): v for k, v in self.class_counts.items()},
            "alerts_fired": self.alerts_fired,
            "elapsed_s": self.elapsed_s,
            "fps": self.fps,
        }


def run_stream(cfg: PipelineConfig, out: TextIO | None = None,
               lines: Iterable[str] | None = None) -> int:
    """Classify an inbound frame stream until EOF; returns an exit code.

    Emits one result record per well-formed frame; malformed lines are
    counted and skipped. Each person_id is debounced independently. The
    summary goes to stderr (and to ``summary_path`` as JSON when set).
    """
    out = out or sys.stdout
    try:
        bundle = ModelBundle.load(cfg.model_path)
    except forest.BadModelFile as exc:
        log.error("%s", exc)
        return EXIT_MODEL
    if lines is None:
        try:
            lines = open_source(cfg.source)
        except InputUnavailable as exc:
            log.error("%s", exc)
            return EXIT_DATA

    if cfg.dry_run or not cfg.alert.webhook_url:
        dispatcher = AlertDispatcher(cfg.alert, sink=lambda e: print(
            f"ALERT person={e.person_id} ts={e.ts} streak={e.streak_len}: {e.message}",
            file=sys.stderr))
    else:
        dispatcher = AlertDispatcher(cfg.alert)

    states: dict[int, AlertState] = {}
    summary = StreamSummary()
    dumps = json.dumps
    write = out.write
    started = time.perf_counter()
    try:
        for chunk in _chunks(lines, cfg.chunk_size):
            batch = parse_lines(chunk)
            summary.malformed += batch.malformed
            if not batch.ids:
                continue
            angles = encoder.encode_point_arrays(batch.coords, batch.present)
            labels, probs = bundle.predict_encodings(angles)
            labels_list = labels.tolist()
            probs_list = probs.tolist()
            for i, (frame_id, ts_ms, person_id) in enumerate(batch.ids):
                label = labels_list[i]
                state = states.get(person_id)
                if state is None:
                    state = AlertState()
                state, event = alert_mod.update(state, label, ts_ms, cfg.alert, person_id)
                states[person_id] = state
                if event is not None:
                    dispatcher.submit(event)
                    summary.alerts_fired += 1
                summary.frames += 1
                summary.class_counts[label] += 1
                write(dumps({
                    "frame_id": frame_id,
                    "person_id": person_id,
                    "label": label,
                    "probs": probs_list[i],
                    "alert": event is not None,
                }, separators=(",", ":")) + "\n")
    finally:
        summary.elapsed_s = time.perf_counter() - started
        dispatcher.close()
    _emit_summary(summary, cfg.summary_path)
    return EXIT_OK


def _emit_summary(summary: StreamSummary, path: str | None) -> None:
    counts = " ".join(f"L{k}={v}" for k, v in sorted(summary.class_counts.items()))
    print(
        f"processed {summary.frames} frames ({summary.malformed} malformed) "
        f"in {summary.elapsed_s:.2f}s ({summary.fps:.0f} frames/s); "
        f"classes: {counts}; alerts fired: {summary.alerts_fired}",
        file=sys.stderr,
    )
    if path:
        Path(path).write_text(json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Dataset loading
# ---------------------------------------------------------------------------

def parse_labeled_line(line: str) -> tuple[KeypointFrame, int | None]:
    """Wire frame plus its optional integer ``label`` side-channel field."""
    frame = parse_frame(line)
    label = json.loads(line).get("label")
    if label is not None:
        if isinstance(label, bool) or not isinstance(label, int) or not 1 <= label <= 4:
            raise WireFormatError(f"label must be an integer in 1..4, got {label!r}")
    return frame, label


def load_labeled_dataset(path: str | Path) -> tuple[LabeledDataset, dict]:
    """Read a labeled dataset from encoding CSV or labeled-frame NDJSON.

    Returns the dataset plus provenance info (row/synthetic counts).
    Raises UnreadableInput when the file is missing, has no labels, or
    carries malformed rows.
    """
    path = Path(path)
    if not path.exists():
        raise UnreadableInput(f"dataset not found: {path}")
    info: dict = {"path": str(path), "synthetic_rows": 0}
    if path.suffix.lower() == ".csv":
        try:
            features, labels = encoder.parse_csv_rows(path.read_text(encoding="utf-8").splitlines())
        except ValueError as exc:
            raise UnreadableInput(str(exc)) from exc
        if labels is None:
            raise UnreadableInput(f"{path}: CSV has no label column")
        return LabeledDataset(features, labels), info

    frames: list[KeypointFrame] = []
    labels_list: list[int] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                frame, label = parse_labeled_line(line)
            except WireFormatError as exc:
                raise UnreadableInput(f"{path}:{lineno}: {exc}") from exc
            if label is None:
                raise UnreadableInput(f"{path}:{lineno}: record has no label")
            frames.append(frame)
            labels_list.append(label)
            if json.loads(line).get("synthetic"):
                info["synthetic_rows"] += 1
    if not frames:
        raise UnreadableInput(f"{path}: no rows")
    features = encoder.encode_batch(frames)
    return LabeledDataset(features, np.array(labels_list, dtype=int)), info


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_synth(out_path: str | Path, n_per_class: int,
              noise_sigma: float = synth.DEFAULT_NOISE_SIGMA,
              occlusion_prob: float = synth.DEFAULT_OCCLUSION_PROB,
              seed: int = 0) -> int:
    """Write 4n labeled synthetic frames as NDJSON wire records."""
    rows = synth.generate_dataset(n_per_class, noise_sigma, occlusion_prob, seed)
    with open(out_path, "w", encoding="utf-8") as fh:
        for frame, label in rows:
            fh.write(serialize_frame(frame, extra={"label": label, "synthetic": True}) + "\n")
    print(f"wrote {len(rows)} labeled frames to {out_path}", file=sys.stderr)
    return EXIT_OK


def cmd_encode(in_path: str | Path, out_path: str | Path, fmt: str = "csv") -> int:
    """Batch-encode a frame file to CSV or NDJSON encodings."""
    in_path = Path(in_path)
    if not in_path.exists():
        log.error("input file not found: %s", in_path)
        return EXIT_DATA
    frames: list[KeypointFrame] = []
    labels: list[int | None] = []
    bad = 0
    with in_path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                frame, label = parse_labeled_line(line)
            except WireFormatError as exc:
                print(f"{in_path}:{lineno}: skipped: {exc}", file=sys.stderr)
                bad += 1
                continue
            frames.append(frame)
            labels.append(label)
    angles = encoder.encode_batch(frames)
    with_labels = bool(frames) and all(lb is not None for lb in labels)
    with open(out_path, "w", encoding="utf-8") as fh:
        if fmt == "csv":
            fh.write(encoder.csv_header(with_label=with_labels) + "\n")
            for i in range(len(frames)):
                fh.write(encoder.csv_row(angles[i], labels[i] if with_labels else None) + "\n")
        elif fmt == "ndjson":
            for i, frame in enumerate(frames):
                rec = encoder.ndjson_record(frame.frame_id, frame.person_id, angles[i])
                if with_labels:
                    rec["label"] = labels[i]
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
        else:
            log.error("unknown encode format: %s", fmt)
            return EXIT_USAGE
    print(f"encoded {len(frames)} frames ({bad} malformed skipped) to {out_path}",
          file=sys.stderr)
    return EXIT_OK


def _holdout_split(ds: LabeledDataset, seed: int) -> tuple[LabeledDataset, LabeledDataset]:
    # stratified 80/20: fold 0 of a 5-fold deal is the hold-out
    folds = forest.stratified_fold_indices(ds.labels, 5, seed)
    test_idx = folds[0]
    train_idx = np.concatenate(folds[1:])
    return (
        LabeledDataset(ds.features[train_idx], ds.labels[train_idx]),
        LabeledDataset(ds.features[test_idx], ds.labels[test_idx]),
    )


def cmd_train(data_path: str | Path, model_out: str | Path, seed: int = 0,
              kind: str = "forest", params: Hyperparams | None = None,
              use_grid: bool = True, k_folds: int = 5,
              report_out: TextIO | None = None) -> int:
    """Full training flow: filter -> CV/grid -> fit -> hold-out -> persist.

    Prints a per-classifier CV table, the chosen hyperparameters and
    hold-out per-class metrics. The persisted bundle is trained on the
    80% split whose held-out 20% produced the reported metrics.
    """
    report_out = report_out or sys.stdout
    try:
        ds, info = load_labeled_dataset(data_path)
    except UnreadableInput as exc:
        log.error("%s", exc)
        return EXIT_DATA
    filtered = preprocess.filter_rows(ds)
    rows_dropped = len(ds) - len(filtered)
    if len(filtered) == 0:
        log.error("no rows survive NaN filtering")
        return EXIT_DATA
    train_ds, test_ds = _holdout_split(filtered, seed)

    single_class = len(np.unique(train_ds.labels)) < 2
    can_cv = k_folds >= 2 and len(train_ds) >= k_folds
    lines = []
    if info.get("synthetic_rows"):
        lines.append(f"note: dataset is synthetic stick-figure data "
                     f"({info['synthetic_rows']} of {len(ds)} rows flagged); class = slump-angle band")
    lines.append(f"rows: {len(ds)} total, {rows_dropped} dropped (>7 invalid entries), "
                 f"{len(train_ds)} train / {len(test_ds)} hold-out")

    chosen = params or Hyperparams(seed=seed)
    if kind == "forest" and use_grid and can_cv and not single_class:
        chosen, _reports = forest.grid_search(train_ds, forest.default_grid(seed), k_folds)
        lines.append(f"grid search over {len(forest.default_grid(seed))} points, "
                     f"{k_folds}-fold CV: best = {chosen.to_dict()}")
    elif params is None and kind in ("forest", "tree"):
        chosen = Hyperparams(seed=seed) if kind == "forest" else Hyperparams(
            n_trees=1, max_features=encoder.ENCODING_SIZE, bootstrap=False, seed=seed)

    if can_cv and not single_class:
        table_rows = []
        for row_kind, row_params, name in (
            ("logistic", LogisticParams(), "Logistic Regression"),
            ("tree", replace(chosen, n_trees=1, max_features=encoder.ENCODING_SIZE,
                             bootstrap=False), "Decision Tree"),
            ("forest", chosen, "Random Forest"),
        ):
            report = forest.kfold_cv(train_ds, k_folds, row_params, row_kind, seed=seed)
            table_rows.append((name, report.mean_accuracy))
        lines.append(forest.format_classifier_table(table_rows))

    stats = preprocess.fit(train_ds, rows_dropped)
    X_train = preprocess.transform_matrix(train_ds.features, stats)
    if kind == "tree":
        chosen = replace(chosen, n_trees=1, bootstrap=False)
        model: forest.AnyModel = forest.DecisionTreeModel(
            forest.train_tree(X_train, train_ds.labels, chosen), chosen)
    elif kind == "logistic":
        model = forest.train_logistic(X_train, train_ds.labels)
    else:
        model = forest.train_forest(X_train, train_ds.labels, chosen)
    bundle = ModelBundle(kind, model, stats, seed)
    bundle.save(model_out)

    if len(test_ds):
        metrics = forest.evaluate(bundle, test_ds)
        lines.append(forest.format_class_table(metrics))
    lines.append(f"model written to {model_out}")
    print("\n".join(lines), file=report_out)
    return EXIT_OK


def cmd_evaluate(model_path: str | Path, data_path: str | Path,
                 metrics_out: str | Path | None = None,
                 report_out: TextIO | None = None) -> int:
    """Score a persisted model against a labeled dataset."""
    report_out = report_out or sys.stdout
    try:
        bundle = ModelBundle.load(model_path)
    except forest.BadModelFile as exc:
        log.error("%s", exc)
        return EXIT_MODEL
    try:
        ds, _info = load_labeled_dataset(data_path)
    except UnreadableInput as exc:
        log.error("%s", exc)
        return EXIT_DATA
    try:
        metrics = forest.evaluate(bundle, ds)
    except preprocess.EmptyDataset as exc:
        log.error("%s", exc)
        return EXIT_DATA
    print(forest.format_class_table(metrics), file=report_out)
    if metrics_out:
        Path(metrics_out).write_text(
            json.dumps(metrics.to_dict(), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK
