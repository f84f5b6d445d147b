from __future__ import annotations

import sys

import numpy as np
import pytest

from activenet import encoder, forest, preprocess, synth


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance checklist after capture is torn down."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance checklist")
        for line in lines:
            terminalreporter.write_line(line)


def build_dataset(n_per_class: int, seed: int = 0, **kwargs) -> preprocess.LabeledDataset:
    rows = synth.generate_dataset(n_per_class, seed=seed, **kwargs)
    features = encoder.encode_batch([f for f, _ in rows])
    labels = np.array([label for _, label in rows], dtype=int)
    return preprocess.LabeledDataset(features, labels)


@pytest.fixture(scope="session")
def dataset_small() -> preprocess.LabeledDataset:
    return build_dataset(30, seed=11)


@pytest.fixture(scope="session")
def trained_bundle(dataset_small) -> forest.ModelBundle:
    ds = preprocess.filter_rows(dataset_small)
    stats = preprocess.fit(ds)
    X = preprocess.transform_matrix(ds.features, stats)
    params = forest.Hyperparams(n_trees=30, seed=11)
    model = forest.train_forest(X, ds.labels, params)
    return forest.ModelBundle("forest", model, stats, seed=11)


@pytest.fixture()
def model_path(trained_bundle, tmp_path):
    path = tmp_path / "model.json"
    trained_bundle.save(path)
    return path
