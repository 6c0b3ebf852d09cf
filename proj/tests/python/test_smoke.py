import json
from pathlib import Path

import numpy as np
import pytest

import cospace

SCENES = Path(__file__).resolve().parents[2] / "scenes"


def paired(seed=0, n=40, dm=3, dh=10, classes=3):
    rng = np.random.default_rng(seed)
    means = rng.normal(size=(dh, classes))
    labels = [1 + i % classes for i in range(n)]
    hs = means[:, [l - 1 for l in labels]] + 0.2 * rng.normal(size=(dh, n))
    srf = np.abs(rng.normal(size=(dm, dh)))
    srf /= srf.sum(axis=1, keepdims=True)
    return srf @ hs, hs, labels


def test_fit_gives_orthonormal_rows_and_descends():
    ms, hs, labels = paired()
    hyper = cospace.Hyperparams()
    hyper.dim = 4
    model = cospace.fit(ms, hs, labels, hyper)
    theta = model.theta
    assert theta.shape == (4, 13)
    assert np.linalg.norm(theta @ theta.T - np.eye(4)) <= 1e-10
    trace = np.array(model.objective_trace)
    assert np.all(np.diff(trace) <= 1e-9 * np.maximum(1.0, np.abs(trace[:-1])))
    assert np.allclose(model.embed_ms(ms), model.theta_ms @ ms)
    assert len(model.predict(ms)) == ms.shape[1]


def test_infeasible_dimension_raises_value_error():
    ms, hs, labels = paired()
    hyper = cospace.Hyperparams()
    hyper.dim = 50
    with pytest.raises(ValueError):
        cospace.fit(ms, hs, labels, hyper)


def test_baselines_and_metrics():
    ms, hs, labels = paired(1)
    theta_ms, theta_hs = cospace.fit_baseline("lsma", ms, hs, labels, 2)
    assert theta_ms.shape == (2, 3) and theta_hs.shape == (2, 10)
    pred = cospace.knn1_predict(theta_ms @ ms, labels, theta_ms @ ms)
    assert pred == labels
    report = cospace.evaluate([1, 1, 2, 2], [1, 1, 1, 2], 2)
    assert report["kappa"] == 0.5
    assert report["confusion"].tolist() == [[2, 0], [1, 1]]


def test_shipped_scene_simulates():
    spec = (SCENES / "metamer_scene.json").read_text()
    scene = cospace.simulate_scene(spec)
    assert scene["train_ms"].shape == (7, 45)
    assert scene["train_hs"].shape == (31, 45)
    assert scene["test_ms"].shape[1] == len(scene["test_labels"]) == 360
    again = cospace.simulate_scene(json.dumps(json.loads(spec)))
    assert np.array_equal(scene["train_hs"], again["train_hs"])
