"""Release acceptance checklist.

One test per release criterion. Each prints a single [PASS]/[FAIL] line
straight to the terminal (bypassing capture) so a full run reads as a
checklist. The tolerances below are the contract; loosening them to make
a red run green defeats the point.
"""

import io
import json
import math
import shutil
import subprocess
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from activenet import encoder, forest, pipeline, preprocess, skeleton, synth
from activenet.alert import AlertConfig, AlertState, DeliveryFailed, send_webhook, update
from activenet.encoder import MIRROR_PAIRS, angle_at
from activenet.forest import Hyperparams, LogisticParams
from activenet.pipeline import PipelineConfig
from activenet.preprocess import LabeledDataset
from activenet.skeleton import Keypoint, serialize_frame
from webhook_stub import StubWebhook

ANGLE_TOL_DEG = 1e-6
INVARIANCE_BUDGET_S = 10.0
PREP_TOL = 1e-9
GRAD_RTOL = 1e-5
F1_TOL = 1e-3
MIN_CV_ACCURACY = 0.90
MIN_SEED_WINS = 8
BENCH_BUDGET_S = 120.0
LATENCY_BUDGET_S = 1e-3
MIN_FPS = 10_000


#: filled by check(); conftest prints it as a checklist after the run
RESULTS: list[str] = []


def check(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    RESULTS.append(line)
    print(line, file=sys.stderr, flush=True)
    assert ok, line


def test_01_encoding_invariance():
    started = time.perf_counter()
    frames = [f for f, _ in synth.generate_dataset(
        250, noise_sigma=1.0, occlusion_prob=0.05, seed=101)]
    base = encoder.encode_batch(frames)
    base_nan = np.isnan(base)

    rng = np.random.default_rng(202)
    moved = []
    for f in frames:
        dx, dy = rng.uniform(-400.0, 400.0, 2)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        s = rng.uniform(0.2, 5.0)
        ct, st = np.cos(theta), np.sin(theta)

        def fn(x, y, dx=dx, dy=dy, ct=ct, st=st, s=s):
            return (s * (ct * x - st * y) + dx, s * (st * x + ct * y) + dy)

        moved.append(skeleton.transform_frame(f, fn))
    transformed = encoder.encode_batch(moved)
    rigid_masks_ok = np.array_equal(base_nan, np.isnan(transformed))
    rigid_dev = float(np.max(np.abs(np.where(base_nan, 0.0, transformed - base))))

    perm = np.arange(encoder.ENCODING_SIZE)
    for i, j in MIRROR_PAIRS:
        perm[i], perm[j] = j, i
    mirrored = encoder.encode_batch([skeleton.mirror_frame(f) for f in frames])
    expected = base[:, perm]
    mirror_masks_ok = np.array_equal(np.isnan(expected), np.isnan(mirrored))
    mirror_dev = float(np.max(np.abs(np.where(np.isnan(expected), 0.0, mirrored - expected))))

    elapsed = time.perf_counter() - started
    ok = (rigid_masks_ok and mirror_masks_ok
          and rigid_dev <= ANGLE_TOL_DEG and mirror_dev <= ANGLE_TOL_DEG
          and elapsed < INVARIANCE_BUDGET_S)
    check("encoding invariance", ok,
          f"1000 frames: rigid+scale max dev {rigid_dev:.2e} deg, mirror+relabel "
          f"max dev {mirror_dev:.2e} deg (tol {ANGLE_TOL_DEG}), NaN masks "
          f"{'preserved' if rigid_masks_ok and mirror_masks_ok else 'BROKEN'}, "
          f"{elapsed:.1f}s (< {INVARIANCE_BUDGET_S:.0f}s)")


def test_02_encoding_arity_and_nan():
    frames = [f for f, _ in synth.generate_dataset(50, seed=7)]
    batch = encoder.encode_batch(frames)
    arity_ok = batch.shape == (200, encoder.ENCODING_SIZE) and all(
        encoder.encode(f).angles.shape == (encoder.ENCODING_SIZE,) for f in frames[:20])

    clean = synth.make_frame(synth.SyntheticPoseParams(slump_deg=20.0, droop_deg=10.0))
    pts = list(clean.points)
    pts[3] = Keypoint.absent()  # r_elbow: hinge of entry 6, endpoint of entry 8
    occluded = encoder.encode(replace(clean, points=tuple(pts))).angles
    sentinel_ok = bool(np.isnan(occluded[6]) and np.isnan(occluded[8]))
    coincident_ok = math.isnan(angle_at(Keypoint(1, 1), Keypoint(1, 1), Keypoint(2, 2)))

    # a million near-collinear / exactly-collinear / coincident triples
    # must come back as a number in [0, 180] or NaN, never a domain error
    rng = np.random.default_rng(99)
    n = 1_000_000
    a = rng.uniform(-1000.0, 1000.0, (n, 2))
    d = rng.uniform(-1.0, 1.0, (n, 2))
    b = a + rng.uniform(0.05, 3.0, (n, 1)) * d
    eps = rng.uniform(-1e-6, 1e-6, (n, 2))
    eps[: n // 4] = 0.0
    sign = np.where(rng.random((n, 1)) < 0.5, 1.0, -1.0)
    c = b + sign * rng.uniform(0.05, 3.0, (n, 1)) * d + eps
    c[: n // 100] = b[: n // 100]
    faults = 0
    try:
        for i in range(n):
            v = angle_at(Keypoint(a[i, 0], a[i, 1]), Keypoint(b[i, 0], b[i, 1]),
                         Keypoint(c[i, 0], c[i, 1]))
            if not (v != v or 0.0 <= v <= 180.0):
                faults += 1
    except ValueError:
        faults += 1

    # same triples through the vectorized path, with FP traps armed
    coords = np.full((n, 18, 2), -1.0)
    coords[:, 2] = a  # r_shoulder
    coords[:, 3] = b  # r_elbow
    coords[:, 4] = c  # r_wrist
    present = np.zeros((n, 18), dtype=bool)
    present[:, 2:5] = True
    try:
        with np.errstate(divide="raise", invalid="raise"):
            for lo in range(0, n, 100_000):
                chunk = encoder.encode_point_arrays(coords[lo:lo + 100_000],
                                                    present[lo:lo + 100_000])
                col = chunk[:, 8]
                bad = ~(np.isnan(col) | ((col >= 0.0) & (col <= 180.0)))
                faults += int(bad.sum())
    except FloatingPointError:
        faults += 1

    ok = arity_ok and sentinel_ok and coincident_ok and faults == 0
    check("encoding arity and invalid entries", ok,
          f"15 entries per encoding, sentinel/coincident -> NaN, "
          f"{faults} domain faults over 10^6 collinear-perturbed triples "
          f"(scalar and vectorized)")


def test_03_preprocessing():
    rng = np.random.default_rng(33)
    X = rng.normal(50.0, 12.0, (400, encoder.ENCODING_SIZE))
    X[rng.random(X.shape) < 0.25] = np.nan
    X[:5] = np.nan          # wholly invalid rows
    X[5, :8] = np.nan       # exactly 8 invalid: must be dropped
    X[5, 8:] = 1.0
    X[6, :7] = np.nan       # exactly 7 invalid: must survive
    X[6, 7:] = 1.0
    ds = LabeledDataset(X, rng.integers(1, 5, 400))

    kept = preprocess.filter_rows(ds)
    invalid = np.isnan(X).sum(axis=1)
    filter_ok = (len(kept) == int((invalid < 8).sum())
                 and int(np.isnan(kept.features).sum(axis=1).max()) <= 7)

    stats = preprocess.fit(kept, rows_dropped=len(ds) - len(kept))
    mean_dev = float(np.max(np.abs(stats.mean - np.nanmean(kept.features, axis=0))))
    std_dev = float(np.max(np.abs(stats.std - np.nanstd(kept.features, axis=0))))

    Z = preprocess.transform_matrix(kept.features, stats)
    finite = ~np.isnan(kept.features)
    col_mean_dev = max(abs(float(Z[finite[:, j], j].mean()))
                       for j in range(Z.shape[1]))
    col_std_dev = max(abs(float(Z[finite[:, j], j].std()) - 1.0)
                      for j in range(Z.shape[1]))
    imputed_ok = bool((Z[~finite] == 0.0).all())

    ok = (filter_ok and mean_dev <= PREP_TOL and std_dev <= PREP_TOL
          and col_mean_dev <= PREP_TOL and col_std_dev <= PREP_TOL and imputed_ok)
    check("preprocessing", ok,
          f">=8-invalid rows dropped, stats vs masked oracle dev "
          f"{max(mean_dev, std_dev):.1e}, scaled cols mean/std dev "
          f"{max(col_mean_dev, col_std_dev):.1e} (tol {PREP_TOL}), "
          f"imputed entries {'exactly 0' if imputed_ok else 'NONZERO'}")


def test_04_classifier_correctness():
    rng = np.random.default_rng(44)
    X = rng.normal(0.0, 1.0, (200, encoder.ENCODING_SIZE))
    y = rng.integers(1, 5, 200)
    hp = Hyperparams(n_trees=1, max_depth=None, max_features=encoder.ENCODING_SIZE,
                     bootstrap=False, seed=9)
    tree = forest.DecisionTreeModel(forest.train_tree(X, y, hp), hp)
    one = forest.train_forest(X, y, hp)
    Q = rng.normal(0.0, 1.0, (100, encoder.ENCODING_SIZE))
    equiv_ok = bool((tree.predict(Q) == one.predict(Q)).all())
    train_acc = float((tree.predict(X) == y).mean())

    W = rng.normal(0.0, 0.1, (4, encoder.ENCODING_SIZE))
    b = rng.normal(0.0, 0.1, 4)
    Xs = rng.normal(0.0, 1.0, (30, encoder.ENCODING_SIZE))
    ys = rng.integers(1, 5, 30)
    _, grad_w, grad_b = forest.logistic_loss_grad(W, b, Xs, ys, 1e-3)
    h = 1e-6
    grad_rel = 0.0
    for r, c in [(0, 3), (1, 7), (2, 0), (3, 14)]:
        Wp, Wm = W.copy(), W.copy()
        Wp[r, c] += h
        Wm[r, c] -= h
        num = (forest.logistic_loss_grad(Wp, b, Xs, ys, 1e-3)[0]
               - forest.logistic_loss_grad(Wm, b, Xs, ys, 1e-3)[0]) / (2 * h)
        grad_rel = max(grad_rel, abs(num - grad_w[r, c]) / max(abs(num), 1e-12))
    for r in range(4):
        bp, bm = b.copy(), b.copy()
        bp[r] += h
        bm[r] -= h
        num = (forest.logistic_loss_grad(W, bp, Xs, ys, 1e-3)[0]
               - forest.logistic_loss_grad(W, bm, Xs, ys, 1e-3)[0]) / (2 * h)
        grad_rel = max(grad_rel, abs(num - grad_b[r]) / max(abs(num), 1e-12))

    f1_a = forest.f1_score(0.989, 0.820)
    f1_b = forest.f1_score(1.000, 0.745)
    f1_ok = abs(f1_a - 0.896) <= F1_TOL and abs(f1_b - 0.853) <= F1_TOL

    ok = equiv_ok and train_acc == 1.0 and grad_rel <= GRAD_RTOL and f1_ok
    check("classifier correctness", ok,
          f"forest-of-one == tree on 100 inputs: {equiv_ok}; training accuracy "
          f"{train_acc:.3f} (need 1.000); logistic grad vs finite diff rel err "
          f"{grad_rel:.1e} (tol {GRAD_RTOL}); F1(0.989,0.820)={f1_a:.3f}, "
          f"F1(1.000,0.745)={f1_b:.3f} (pins 0.896/0.853 +-{F1_TOL})")


def test_05_forest_beats_baseline_on_synthetic():
    # the published 76.67% figure is not reproducible (source dataset
    # unavailable), so the stand-in benchmark is seeded synthetic data:
    # the tuned forest must clear 0.90 mean CV accuracy and match or beat
    # the logistic baseline in at least 8 of 10 seeds
    started = time.perf_counter()
    wins = 0
    forest_means, logistic_means = [], []
    for seed in range(10):
        rows = synth.generate_dataset(100, seed=seed)
        ds = LabeledDataset(encoder.encode_batch([f for f, _ in rows]),
                            np.array([lb for _, lb in rows]))
        grid = [Hyperparams(n_trees=nt, max_depth=md, min_samples_split=2, seed=seed)
                for nt in (50, 100) for md in (5, None)]
        _, reports = forest.grid_search(ds, grid, 5)
        f_mean = max(r.mean_accuracy for r in reports)
        l_mean = forest.kfold_cv(ds, 5, LogisticParams(), "logistic", seed=seed).mean_accuracy
        forest_means.append(f_mean)
        logistic_means.append(l_mean)
        if f_mean >= MIN_CV_ACCURACY and f_mean >= l_mean:
            wins += 1
    elapsed = time.perf_counter() - started
    ok = wins >= MIN_SEED_WINS and elapsed < BENCH_BUDGET_S
    check("forest benchmark on synthetic data", ok,
          f"forest >= {MIN_CV_ACCURACY} and >= logistic in {wins}/10 seeds "
          f"(need >= {MIN_SEED_WINS}); forest CV "
          f"{min(forest_means):.3f}-{max(forest_means):.3f}, logistic "
          f"{min(logistic_means):.3f}-{max(logistic_means):.3f}; "
          f"{elapsed:.0f}s (< {BENCH_BUDGET_S:.0f}s)")


def _expected_fires(labels, tss, k, cooldown_ms):
    fires = []
    last = None
    i, n = 0, len(labels)
    while i < n:
        if labels[i] != 1:
            i += 1
            continue
        j = i
        while j < n and labels[j] == 1:
            j += 1
        for completion in range(i + k - 1, j, k):
            if last is None or tss[completion] - last >= cooldown_ms:
                fires.append(tss[completion])
                last = tss[completion]
        i = j
    return fires


def test_06_alert_oracle():
    rng = np.random.default_rng(66)
    mismatches = 0
    for _ in range(10_000):
        n = int(rng.integers(0, 40))
        labels = rng.integers(1, 5, n).tolist()
        k = int(rng.integers(1, 6))
        cooldown_ms = int(rng.integers(0, 6)) * 100
        tss = list(range(0, n * 100, 100))
        cfg = AlertConfig(k=k, cooldown_ms=cooldown_ms)
        state, fired = AlertState(), []
        for label, ts in zip(labels, tss):
            state, event = update(state, label, ts, cfg)
            if event is not None:
                fired.append(event.ts)
        if fired != _expected_fires(labels, tss, k, cooldown_ms):
            mismatches += 1

    state, fired = AlertState(), []
    for pos, label in enumerate([1, 1, 2, 1, 1, 1], start=1):
        state, event = update(state, label, pos * 100, AlertConfig(k=3, cooldown_ms=0))
        if event is not None:
            fired.append(pos)
    pinned_ok = fired == [6]

    ok = mismatches == 0 and pinned_ok
    check("alert debounce oracle", ok,
          f"{mismatches} mismatches over 10,000 random sequences; "
          f"[1,1,2,1,1,1] with k=3 fires {fired} (need [6])")


class _TimingWriter(io.StringIO):
    def __init__(self):
        super().__init__()
        self.stamps = []

    def write(self, s):
        self.stamps.append(time.perf_counter())
        return super().write(s)


def test_07_webhook_contract_and_latency(model_path):
    from activenet.alert import AlertEvent

    with StubWebhook() as stub:
        r = send_webhook(AlertEvent(0, 0, "m", 1),
                         AlertConfig(webhook_url=stub.url, timeout_s=5.0),
                         sleep=lambda s: None)
        success_ok = r.ok and r.attempts == 1
    with StubWebhook(script=(404,)) as stub:
        try:
            send_webhook(AlertEvent(0, 0, "m", 1),
                         AlertConfig(webhook_url=stub.url, timeout_s=5.0),
                         sleep=lambda s: None)
            reject_ok = False
        except DeliveryFailed:
            reject_ok = stub.hits == 1
    with StubWebhook(script=(("stall", 1.0), ("stall", 1.0), 200)) as stub:
        r = send_webhook(AlertEvent(0, 0, "m", 1),
                         AlertConfig(webhook_url=stub.url, timeout_s=0.25),
                         sleep=lambda s: None)
        retry_ok = r.ok and r.attempts == 3

    # frame latency must not notice a 5s-stalled endpoint: delivery runs
    # behind the queue, so per-record write gaps stay at baseline
    lines = [serialize_frame(f)
             for f in synth.generate_stream([1] * 5000, noise_sigma=0.5, seed=70)]
    base_out = _TimingWriter()
    pipeline.run_stream(
        PipelineConfig(model_path=model_path, dry_run=True,
                       alert=AlertConfig(k=2, cooldown_ms=60_000)),
        out=base_out, lines=list(lines))
    with StubWebhook(script=(("stall", 5.0),)) as stub:
        hook_out = _TimingWriter()
        pipeline.run_stream(
            PipelineConfig(model_path=model_path,
                           alert=AlertConfig(k=2, cooldown_ms=60_000,
                                             webhook_url=stub.url, timeout_s=30.0)),
            out=hook_out, lines=list(lines))
        delivered = stub.hits
    p99_base = float(np.percentile(np.diff(base_out.stamps), 99))
    p99_hook = float(np.percentile(np.diff(hook_out.stamps), 99))
    added = p99_hook - p99_base
    latency_ok = added < LATENCY_BUDGET_S and delivered >= 1
    same_records = base_out.getvalue() == hook_out.getvalue()

    ok = success_ok and reject_ok and retry_ok and latency_ok and same_records
    check("webhook contract and isolation", ok,
          f"2xx first try: {success_ok}; 4xx no retry: {reject_ok}; "
          f"timeout x2 then 200 on attempt 3: {retry_ok}; p99 frame gap "
          f"+{added * 1e3:.3f}ms vs baseline (< {LATENCY_BUDGET_S * 1e3:.0f}ms) "
          f"while endpoint stalls 5s, {delivered} delivered")


def test_08_throughput(model_path, tmp_path):
    pattern = [4, 3, 2, 4, 1, 1, 1, 1, 1, 3, 2, 4, 2, 3, 4, 1, 1, 2, 3, 4]
    frames = synth.generate_stream(pattern * 5000, noise_sigma=1.0, seed=88)
    lines = [serialize_frame(f) for f in frames]
    summary_path = tmp_path / "summary.json"
    cfg = PipelineConfig(model_path=model_path, dry_run=True,
                         summary_path=str(summary_path))
    code = pipeline.run_stream(cfg, out=io.StringIO(), lines=lines)
    summary = json.loads(summary_path.read_text())
    ok = (code == 0 and summary["frames"] == 100_000
          and summary["fps"] >= MIN_FPS)
    check("streaming throughput", ok,
          f"{summary['fps']:.0f} frames/s over {summary['frames']:,} frames "
          f"(need >= {MIN_FPS:,}), {summary['alerts_fired']} alerts en route")


def test_09_determinism(model_path, tmp_path):
    data = tmp_path / "train.ndjson"
    pipeline.cmd_synth(data, n_per_class=20, seed=55)
    outs = [tmp_path / f"m{i}.json" for i in range(3)]
    for out, seed in zip(outs, (55, 55, 56)):
        pipeline.cmd_train(data, out, seed=seed, use_grid=False,
                           params=Hyperparams(n_trees=20, seed=seed),
                           report_out=io.StringIO())
    models_ok = (outs[0].read_bytes() == outs[1].read_bytes()
                 and outs[0].read_bytes() != outs[2].read_bytes())

    lines = [serialize_frame(f)
             for f in synth.generate_stream([1, 2, 3, 4] * 500, seed=56)]
    cfg = PipelineConfig(model_path=model_path, dry_run=True)
    texts = []
    for _ in range(2):
        out = io.StringIO()
        pipeline.run_stream(cfg, out=out, lines=list(lines))
        texts.append(out.getvalue())
    streams_ok = texts[0] == texts[1] and len(texts[0].splitlines()) == 2000

    ok = models_ok and streams_ok
    check("determinism", ok,
          f"same-seed training byte-identical: {models_ok} (different seed "
          f"differs); repeated stream runs identical over 2000 frames: {streams_ok}")


#: engine keypoint slot -> index in the estimator's native 17-point order
_BRIDGE_SLOTS = {0: 0, 2: 6, 3: 8, 4: 10, 5: 5, 6: 7, 7: 9, 8: 12, 9: 14,
                 10: 16, 11: 11, 12: 13, 13: 15, 14: 2, 15: 1, 16: 4, 17: 3}


def test_10_estimator_bridge(model_path):
    bridge_dir = Path(__file__).resolve().parent.parent / "bridge"
    cli = bridge_dir / "dist" / "src" / "cli.js"
    clip_path = bridge_dir / "fixtures" / "clip.json"
    node = shutil.which("node")
    if node is None or not cli.exists():
        pytest.skip("bridge is not built; run npm install && npm run build in bridge/")

    proc = subprocess.run([node, str(cli), "--source", str(clip_path)],
                          capture_output=True, text=True, timeout=120)
    lines = proc.stdout.splitlines()
    frames = [skeleton.parse_frame(line) for line in lines]

    clip = json.loads(clip_path.read_text())
    visible = [f for f in clip["frames"] if f["persons"]]
    coverage_ok = len(frames) == len(visible) > 0

    # every slot must carry the right joint, bit-exactly, on every frame
    remap_faults = 0
    for frame, src in zip(frames, visible):
        native = src["persons"][0]["keypoints"]
        for slot, idx in _BRIDGE_SLOTS.items():
            kp = frame.points[slot]
            want = native[idx]
            if want is None:
                remap_faults += kp.present
            else:
                remap_faults += not (kp.present and (kp.x, kp.y) == tuple(want))
        ls, rs = native[5], native[6]
        neck = frame.points[1]
        if ls is not None and rs is not None:
            mid = ((ls[0] + rs[0]) / 2, (ls[1] + rs[1]) / 2)
            remap_faults += not (neck.present and neck.xy == mid)
        else:
            remap_faults += neck.present

    # and the stream must drive the engine end to end
    out = io.StringIO()
    code = pipeline.run_stream(PipelineConfig(model_path=model_path, dry_run=True),
                               out=out, lines=lines)
    records = [json.loads(l) for l in out.getvalue().splitlines()]
    engine_ok = code == 0 and len(records) == len(frames)

    ok = (proc.returncode == 0 and coverage_ok and remap_faults == 0
          and engine_ok)
    check("estimator bridge interop", ok,
          f"{len(lines)}/{len(lines)} emitted lines parse, one per visible "
          f"frame ({len(visible)}/{len(clip['frames'])} frames, 10s clip); "
          f"0 remap faults across {len(frames) * 18} slots; engine classified "
          f"all {len(records)} records (exit {code})")
