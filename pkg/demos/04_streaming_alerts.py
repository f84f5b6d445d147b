"""
Streaming classification with sustained-lethargy alerts
=======================================================

The runtime loop end to end: NDJSON frames go in, one classified record
per frame comes out, and a webhook fires when someone sits in the lowest
activeness class for k consecutive frames. Here the "webhook" is a tiny
local HTTP server so the whole exchange is visible.
"""

import io
import json
import tempfile
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import numpy as np

from activenet import (
    AlertConfig,
    Hyperparams,
    LabeledDataset,
    ModelBundle,
    encode_batch,
    filter_rows,
    fit,
    generate_dataset,
    generate_stream,
    serialize_frame,
    train_forest,
)
from activenet.pipeline import PipelineConfig, run_stream
from activenet.preprocess import transform_matrix

# ---------------------------------------------------------------------------
# Train a quick model (see demo 03 for the full recipe)
# ---------------------------------------------------------------------------
rows = generate_dataset(60, seed=9)
ds = filter_rows(LabeledDataset(encode_batch([f for f, _ in rows]),
                                np.array([lb for _, lb in rows])))
stats = fit(ds)
bundle = ModelBundle("forest",
                     train_forest(transform_matrix(ds.features, stats),
                                  ds.labels, Hyperparams(n_trees=40, seed=9)),
                     stats, seed=9)
model_path = Path(tempfile.mkdtemp()) / "model.json"
bundle.save(model_path)

# ---------------------------------------------------------------------------
# A receiving endpoint: prints whatever is POSTed to it
# ---------------------------------------------------------------------------
received = []


class Hook(BaseHTTPRequestHandler):
    def do_POST(self):
        body = self.rfile.read(int(self.headers["Content-Length"]))
        received.append(json.loads(body))
        self.send_response(200)
        self.end_headers()

    def log_message(self, *args):
        pass


server = HTTPServer(("127.0.0.1", 0), Hook)
threading.Thread(target=server.serve_forever, daemon=True).start()
hook_url = f"http://127.0.0.1:{server.server_port}/alerts"
print(f"webhook endpoint listening at {hook_url}")

# ---------------------------------------------------------------------------
# A 12-second story at 10 fps: active, then slumped, then active again
# ---------------------------------------------------------------------------
# frames 0-39 upright (Level 4), 40-99 slumped (Level 1), 100-119 upright.
# With k=25 the alert needs 2.5 seconds of sustained Level 1 - brief dips
# never fire.
story = [4] * 40 + [1] * 60 + [4] * 20
lines = [serialize_frame(f) for f in generate_stream(story, noise_sigma=0.5, seed=9)]

cfg = PipelineConfig(
    model_path=str(model_path),
    alert=AlertConfig(k=25, cooldown_ms=30_000, webhook_url=hook_url),
)
out = io.StringIO()
run_stream(cfg, out=out, lines=lines)
time.sleep(0.2)  # let the dispatcher thread finish logging
server.shutdown()

# ---------------------------------------------------------------------------
# What came out
# ---------------------------------------------------------------------------
records = [json.loads(l) for l in out.getvalue().splitlines()]
labels = [r["label"] for r in records]
print(f"\n{len(records)} records; label timeline "
      f"(one char per 4 frames): "
      + "".join(str(labels[i]) for i in range(0, len(labels), 4)))

fired = [r for r in records if r["alert"]]
for r in fired:
    print(f"alert raised at frame {r['frame_id']} "
          f"(after 25 consecutive Level-1 frames)")

print(f"\nwebhook received {len(received)} delivery:")
for body in received:
    print(f"  {body}")
