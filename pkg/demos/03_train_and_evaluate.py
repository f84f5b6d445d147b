"""
Training an activeness classifier
=================================

The full training recipe on synthetic data: encode, drop hopeless rows,
standardize, compare three classifiers under cross-validation, grid-tune
the forest, then score the winner on a hold-out split and persist it.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from activenet import (
    Hyperparams,
    LabeledDataset,
    LogisticParams,
    ModelBundle,
    encode_batch,
    evaluate,
    filter_rows,
    fit,
    generate_dataset,
    grid_search,
    kfold_cv,
    train_forest,
)
from activenet.forest import format_class_table, stratified_fold_indices
from activenet.preprocess import transform_matrix

# ---------------------------------------------------------------------------
# Build a labeled dataset: 100 poses per class, realistic noise
# ---------------------------------------------------------------------------
rows = generate_dataset(n_per_class=100, seed=42)
ds = LabeledDataset(encode_batch([f for f, _ in rows]),
                    np.array([label for _, label in rows]))
kept = filter_rows(ds)  # rows with 8+ invalid angles can't be salvaged
print(f"{len(ds)} rows encoded, {len(ds) - len(kept)} dropped as mostly-invalid")

# hold out a stratified 20% that training never sees
folds = stratified_fold_indices(kept.labels, 5, seed=42)
test_idx, train_idx = folds[0], np.concatenate(folds[1:])
train = LabeledDataset(kept.features[train_idx], kept.labels[train_idx])
test = LabeledDataset(kept.features[test_idx], kept.labels[test_idx])

# ---------------------------------------------------------------------------
# Which classifier family earns its keep?
# ---------------------------------------------------------------------------
for name, kind, params in (
    ("logistic regression", "logistic", LogisticParams()),
    ("single decision tree", "tree",
     Hyperparams(n_trees=1, max_features=15, bootstrap=False, seed=42)),
    ("random forest (100 trees)", "forest", Hyperparams(seed=42)),
):
    report = kfold_cv(train, 5, params, kind, seed=42)
    accs = " ".join(f"{a:.3f}" for a in report.fold_accuracies)
    print(f"{name:<28}5-fold CV {report.mean_accuracy:.3f}  [{accs}]")

# ---------------------------------------------------------------------------
# Tune the forest and train the final model
# ---------------------------------------------------------------------------
grid = [Hyperparams(n_trees=nt, max_depth=md, seed=42)
        for nt in (50, 100) for md in (5, None)]
best, reports = grid_search(train, grid, 5)
print(f"\nbest grid point: {best.to_dict()} "
      f"(CV {max(r.mean_accuracy for r in reports):.3f})")

stats = fit(train, rows_dropped=len(ds) - len(kept))
model = train_forest(transform_matrix(train.features, stats), train.labels, best)
bundle = ModelBundle("forest", model, stats, seed=42)

# ---------------------------------------------------------------------------
# Score on the untouched hold-out and persist
# ---------------------------------------------------------------------------
print()
print(format_class_table(evaluate(bundle, test)))

model_path = Path(tempfile.mkdtemp()) / "model.json"
bundle.save(model_path)
reloaded = ModelBundle.load(model_path)
print(f"\nmodel saved to {model_path} "
      f"({model_path.stat().st_size / 1024:.0f} KiB)")
print("reload round-trip predictions match:",
      bool((reloaded.predict_encodings(test.features[:5])[0]
            == bundle.predict_encodings(test.features[:5])[0]).all()))
print("model file is canonical JSON:",
      json.loads(model_path.read_text())["format_version"] == 1)
