import math

import numpy as np
import pytest

import kernsupp as ks


def test_kernel_values():
    k = ks.Kernel.abel(1.0)
    assert k([0.0, 0.0], [3.0, 4.0]) == pytest.approx(math.exp(-5.0), rel=1e-15)
    assert k.metric([0.0], [1.0]) == pytest.approx(math.sqrt(2 - 2 / math.e), rel=1e-15)
    assert ks.Kernel.linear().normalized().unit_diagonal
    g = k.gram(np.array([[0.0], [math.log(2.0)]]))
    assert np.allclose(g, [[1.0, 0.5], [0.5, 1.0]], rtol=0, atol=1e-15)
    p = ks.Kernel.product([(ks.Kernel.abel(1.0), 0, 1), (ks.Kernel.abel(1.0), 1, 2)])
    assert p([0.0, 0.0], [1.0, 1.0]) == pytest.approx(math.exp(-2.0), rel=1e-15)


def test_filters():
    f = ks.Filter.tikhonov(0.1)
    assert f.r(0.3) == pytest.approx(0.75, rel=1e-15)
    assert f.lipschitz == pytest.approx(10.0)
    assert ks.Filter.landweber(9).lipschitz == 10.0
    assert ks.Filter.kpca(0.1).lipschitz is None
    assert ks.Filter.parse(str(f)) == f


def test_fit_and_score():
    x = np.array([[0.0], [math.log(2.0)]])
    model = ks.fit(x, ks.Kernel.abel(1.0), ks.Filter.spectral_cutoff(0.1))
    s = model.score(np.array([[0.0], [0.2]]))
    assert s.shape == (2,)
    assert np.all((s >= 0) & (s <= 1))
    # n = 1, Tikhonov: F(x_1) = 1 / (1 + lambda)
    one = ks.fit(np.zeros((1, 2)), ks.Kernel.abel(1.0), ks.Filter.tikhonov(0.1))
    assert one.score(np.zeros(2))[0] == pytest.approx(1 / 1.1, rel=1e-14)


def test_algorithms_agree_and_path_is_monotone():
    task = ks.Task.make("two_moons")
    x = task.sample(60, 3)
    probe = task.sample(20, 4)
    k = ks.Kernel.abel(ks.width_heuristic(x))
    m = ks.fit(x, k, ks.Filter.tikhonov(1e-3), algorithm="spectral")
    c = m.with_filter(ks.Filter.tikhonov(1e-3), "cholesky")
    assert np.max(np.abs(m.score(probe) - c.score(probe))) < 1e-10
    path = m.path(probe, [1.0, 0.1, 0.01])
    assert path.shape == (20, 3)
    assert np.all(np.diff(path, axis=1) >= -1e-12)


def test_save_load(tmp_path):
    x = ks.Task.make("circle").sample(30, 1)
    m = ks.fit(x, ks.Kernel.abel(0.5), ks.Filter.landweber(20), tau=0.1)
    for binary in (False, True):
        path = str(tmp_path / f"m{int(binary)}.ksm")
        m.save(path, binary=binary)
        loaded = ks.SupportModel.load(path)
        assert loaded.filter == m.filter
        assert loaded.tau == 0.1
        assert np.max(np.abs(loaded.score(x) - m.score(x))) <= 1e-12


def test_selection_and_bounds():
    assert ks.rate_lambda(1024, 1.0, 1.0) == pytest.approx(0.176776695296636881, rel=1e-15)
    assert ks.lambda_curvature(np.array([1.0, 0.1, 0.01, 0.009, 0.008])) == pytest.approx(0.01)
    assert ks.concentration_bound(100, 2.0) == pytest.approx(0.4)
    assert ks.effective_dimension(np.array([1.0, 0.0]), 1.0) == pytest.approx(0.5)


def test_eval_helpers():
    auc, fpr, tpr = ks.roc_auc([0.9, 0.8], [0.1, 0.2])
    assert auc == 1.0
    assert fpr[0] == 0.0 and tpr[-1] == 1.0
    assert ks.hausdorff(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])) == pytest.approx(5.0)
    pts, inside, step, vol = ks.Task.make("cube").reference_grid(11)
    # the lattice spans the padded box [-0.5, 1.5]^2
    assert pts.shape == (121, 2)
    assert sum(inside) == 25
    assert step == pytest.approx(0.2) and vol == pytest.approx(0.04)


def test_errors():
    with pytest.raises(ks.UsageError):
        ks.Filter.tikhonov(-1.0)
    with pytest.raises(ks.DataError):
        ks.SupportModel.load("/nonexistent/model.ksm")
    with pytest.raises(ks.Error):
        ks.Task.make("torus")
    assert issubclass(ks.NumericError, RuntimeError)
