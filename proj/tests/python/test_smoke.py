import json
import math

import numpy as np
import pytest

import hfd


def test_truncation_and_legendre():
    assert hfd.truncation_count(3, 2, 10) == 331
    idx = hfd.enumerate_truncation(3, 2, 2)
    assert idx[0] == ([], [])
    assert len(idx) == hfd.truncation_count(3, 2, 2)
    vals = hfd.legendre_normalized(2, 0.5)
    assert vals[1] == pytest.approx(math.sqrt(1.5) * 0.5)
    with pytest.raises(hfd.ConfigError):
        hfd.enumerate_truncation(3, 0, 2)


@pytest.fixture(scope="module")
def fgm_fit():
    X = hfd.fgm_sample(4000, seed=3)
    y = hfd.fgm_target(X)
    model = hfd.fit(X, y, d=8, d_density=6, scaling="none", feature_names=["a", "b", "c"])
    return X, y, model


def test_fit_and_predict(fgm_fit):
    X, y, model = fgm_fit
    assert model.p == 3
    assert model.feature_names == ["a", "b", "c"]
    pred = model.predict(X)
    assert pred.shape == (4000,)
    assert hfd.reconstruction_r2(y, pred) > 0.95
    grid = np.zeros((50, 3))
    grid[:, 0] = np.linspace(-0.9, 0.9, 50)
    nu1 = model.component([0], grid)
    assert np.max(np.abs(nu1 - (5 * grid[:, 0] ** 3 - 5 * grid[:, 0]))) < 0.2


def test_shapley_efficiency(fgm_fit):
    X, y, model = fgm_fit
    for i in range(10):
        att = model.shapley(X[i], y[i])
        assert att["phi"].sum() == pytest.approx(att["prediction"] - att["baseline"], abs=1e-10)
        assert att["residual"] == pytest.approx(y[i] - att["prediction"], abs=1e-12)


def test_metrics_and_shares(fgm_fit):
    X, y, model = fgm_fit
    m = hfd.metrics(model, X, y)
    assert m["schema_version"] == "1.0"
    assert m["r2"] > 0.95
    shares = model.variance_shares(X)
    assert all(v >= 0 for v in shares.values())
    assert max(v for S, v in shares.items() if 2 in S) < 0.02


def test_json_round_trip(fgm_fit):
    X, _, model = fgm_fit
    back = hfd.Model.from_json(model.to_json())
    assert np.max(np.abs(back.predict(X) - model.predict(X))) <= 1e-12
    doc = json.loads(model.to_json())
    doc["schema_version"] = "7.0"
    with pytest.raises(hfd.SchemaError):
        hfd.Model.from_json(json.dumps(doc))


def test_export_bundle(fgm_fit):
    X, y, model = fgm_fit
    bundle = hfd.export_bundle(model, X, y, grid_1d=30, grid_2d=5, max_rows=3)
    assert len(bundle["attributions"]) == 3
    me = bundle["main_effects"][0]
    assert len(me["x_raw"]) == 30
    j = me["S"][0]
    assert me["x_raw"][0] == X[:, j].min()
    assert me["x_raw"][-1] == X[:, j].max()


def test_solver_helpers():
    rng = np.random.default_rng(0)
    B = np.column_stack([np.ones(60), rng.normal(size=(60, 4))])
    y = 2.0 * B[:, 2] + 0.01 * rng.normal(size=60)
    steps = hfd.lars_path(B, y)
    assert steps[0]["support"] == []
    assert steps[1]["support"] == [2]
    coef = hfd.solve_reduced(B, y)
    ne = np.linalg.solve(B.T @ B, B.T @ y)
    assert np.max(np.abs(coef - ne)) < 1e-8


def test_errors():
    X = np.zeros((10, 2))
    with pytest.raises(hfd.DimensionError):
        hfd.fit(X, np.zeros(9))
    with pytest.raises(hfd.ConfigError):
        hfd.fit(np.random.default_rng(1).normal(size=(20, 2)), np.zeros(20), K=3)
    with pytest.raises(hfd.ConfigError):
        hfd.fit(np.zeros((10, 2)), np.zeros(10), scaling="log")


def test_read_csv(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("u,v,y\n1,2,3\n4,,6\n7,8,9\n")
    names, X, y = hfd.read_csv(str(path), "y")
    assert names == ["u", "v"]
    assert X.shape == (2, 2)
    assert list(y) == [3.0, 9.0]


def test_gauss_tanh_samples_in_open_cube():
    X = hfd.gauss_tanh_sample(1000, seed=2)
    assert np.all(np.abs(X) < 1)
    assert hfd.gauss_tanh_target(X).shape == (1000,)
