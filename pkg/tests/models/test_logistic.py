import numpy as np
import pytest
from fedalign.dataset import LabeledDataset
from fedalign.error import InputError, ConfigurationError
from fedalign.utils import power_iteration
from fedalign.models import (
    Objective,
    ParamShape,
    loss,
    grad,
    hessian_vector,
    sample_batch,
    estimate_L,
    accuracy,
    predict,
)


def random_dataset(n=40, d=5, C=3, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    y = rng.integers(0, C, size=n)
    return LabeledDataset(x, y, C)


def random_point(obj, seed=1, scale=0.5):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal(obj.size)


def test_loss_values():
    # balanced dataset at w = 0
    x = np.arange(12, dtype=float).reshape(6, 2)
    ds = LabeledDataset(x, [0, 1, 2, 0, 1, 2], 3)
    for reg in [0.0, 0.1]:
        obj = Objective(ds, reg)
        assert loss(obj.initial_point(), obj) == pytest.approx(np.log(3))

    # single sample with logits (2, 0)
    ds = LabeledDataset([[1.0]], [0], 2)
    obj = Objective(ds)
    w = obj.shape.flatten([[2.0, 0.0]], [0.0, 0.0])
    assert obj.loss(w) == pytest.approx(np.log(1 + np.exp(-2)))


def test_dimension_mismatch():
    obj = Objective(random_dataset(d=5, C=3))
    with pytest.raises(ConfigurationError):
        obj.loss(np.zeros(7))
    with pytest.raises(ConfigurationError):
        obj.grad(np.zeros(ParamShape(4, 3).size))


def test_grad_finite_difference():
    h = 1e-6
    for i in range(10):
        ds = random_dataset(n=20 + i, d=3 + i % 3, C=2 + i % 3, seed=i)
        obj = Objective(ds, reg_lambda=0.1 * (i % 2))
        w = random_point(obj, seed=100 + i)
        g = obj.grad(w)
        fd = np.zeros_like(w)
        for j in range(w.size):
            e = np.zeros_like(w)
            e[j] = h
            fd[j] = (obj.loss(w + e) - obj.loss(w - e)) / (2 * h)
        assert np.allclose(g, fd, rtol=1e-5, atol=1e-7)


def test_grad_reg_and_average():
    ds = random_dataset()
    obj = Objective(ds, 0.3)
    w = random_point(obj)

    diff = grad(w, ds, 0.3) - grad(w, ds, 0.0)
    assert np.allclose(diff, 0.3 * w, rtol=0, atol=1e-14)

    per_sample = [grad(w, ds.subset([i]), 0.0) for i in range(len(ds))]
    assert np.allclose(np.mean(per_sample, axis=0), grad(w, ds, 0.0))


def test_grad_empty_batch():
    obj = Objective(random_dataset())
    with pytest.raises(InputError):
        grad(obj.initial_point(), None, 0.0)


def test_convexity():
    obj = Objective(random_dataset(), 0.2)
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = rng.standard_normal(obj.size)
        v = rng.standard_normal(obj.size)
        t = rng.random()
        lhs = obj.loss(t * u + (1 - t) * v)
        assert lhs <= t * obj.loss(u) + (1 - t) * obj.loss(v) + 1e-12

        # strong convexity
        gu = obj.grad(u)
        linear = obj.loss(u) + np.dot(gu, v - u)
        dist = np.dot(v - u, v - u)
        assert obj.loss(v) >= linear + 0.5 * obj.reg_lambda * dist - 1e-12


def test_smoothness_small_features():
    # the bias coordinate dominates the curvature when the features are tiny
    rng = np.random.default_rng(4)
    x = 0.01 * rng.standard_normal((50, 3))
    y = rng.integers(0, 3, size=50)
    obj = Objective(LabeledDataset(x, y, 3), 0.01)
    L = obj.estimate_L()
    assert L >= 0.5

    for _ in range(100):
        u = rng.standard_normal(obj.size)
        v = rng.standard_normal(obj.size)
        linear = obj.loss(u) + np.dot(obj.grad(u), v - u)
        dist = np.dot(v - u, v - u)
        assert obj.loss(v) <= linear + 0.5 * L * dist + 1e-12

    # smoothness with the estimate of random features as well
    obj = Objective(random_dataset(), 0.2)
    L = obj.estimate_L()
    for _ in range(20):
        u = rng.standard_normal(obj.size)
        v = rng.standard_normal(obj.size)
        linear = obj.loss(u) + np.dot(obj.grad(u), v - u)
        dist = np.dot(v - u, v - u)
        assert obj.loss(v) <= linear + 0.5 * L * dist + 1e-12


def test_hessian_vector():
    obj = Objective(random_dataset(), 0.1)
    w = random_point(obj)
    v = random_point(obj, seed=7)
    h = 1e-6
    fd = (obj.grad(w + h * v) - obj.grad(w - h * v)) / (2 * h)
    assert np.allclose(hessian_vector(w, obj, v), fd, rtol=1e-5, atol=1e-8)
    assert np.array_equal(obj.hessian_vector(w, v), hessian_vector(w, obj, v))

    top = obj.curvature(w)
    assert obj.reg_lambda <= top <= obj.estimate_L()


def test_sample_batch():
    ds = random_dataset(n=10)
    rng = np.random.default_rng(0)

    batch = sample_batch(ds, 10, rng)
    assert sorted(map(tuple, batch.features)) == sorted(map(tuple, ds.features))

    b1 = sample_batch(ds, 4, np.random.default_rng(5))
    b2 = sample_batch(ds, 4, np.random.default_rng(5))
    assert b1.same_as(b2)

    with pytest.raises(InputError):
        sample_batch(ds, 11, rng)
    with pytest.raises(InputError):
        sample_batch(ds, 0, rng)


def test_sample_batch_frequency():
    ds = LabeledDataset(np.arange(4.0).reshape(4, 1), [0, 1, 0, 1], 2)
    rng = np.random.default_rng(11)
    n_draws = 100000
    counts = np.zeros(4)
    for _ in range(n_draws):
        counts[int(sample_batch(ds, 1, rng).features[0, 0])] += 1
    sigma = np.sqrt(0.25 * 0.75 / n_draws)
    assert np.all(np.abs(counts / n_draws - 0.25) < 3 * sigma)


def test_batch_unbiased():
    ds = random_dataset(n=30)
    obj = Objective(ds, 0.1)
    w = random_point(obj)
    rng = np.random.default_rng(2)
    draws = np.array([obj.grad(w, sample_batch(ds, 5, rng)) for _ in range(4000)])
    exact = obj.grad(w)

    # mean of the projected draws within 3 standard errors
    u = np.random.default_rng(9).standard_normal(obj.size)
    for direction in [exact / np.linalg.norm(exact), u / np.linalg.norm(u)]:
        proj = draws @ direction
        sem = proj.std() / np.sqrt(len(proj))
        assert abs(proj.mean() - np.dot(exact, direction)) <= 3 * sem


def test_estimate_L():
    ds = LabeledDataset(np.zeros((4, 3)), [0, 1, 0, 1], 2)
    for method in ["row_norm", "exact", "power"]:
        assert estimate_L(Objective(ds, 0.3), method) == pytest.approx(0.8, rel=1e-6)

    # Hessian at w = 0 is (a a^T) kron [[1, -1], [-1, 1]] / 4 with a = (2, 0, 1)
    ds = LabeledDataset([[2.0, 0.0]], [0], 2)
    obj = Objective(ds)
    assert estimate_L(obj) == pytest.approx(2.5)
    assert estimate_L(obj, "exact") == pytest.approx(2.5)
    assert estimate_L(obj, "power") == pytest.approx(2.5, rel=1e-6)
    w0 = obj.initial_point()
    top = power_iteration(lambda v: hessian_vector(w0, obj, v), obj.size, n_iter=500)
    assert top == pytest.approx(2.5, rel=1e-6)

    # never below the largest Hessian eigenvalue
    for seed in range(5):
        ds = random_dataset(n=30, d=4, C=3, seed=seed)
        obj = Objective(ds, 0.05)
        for w in [obj.initial_point(), random_point(obj, seed=seed, scale=2.0)]:
            top = power_iteration(lambda v: hessian_vector(w, obj, v), obj.size)
            for method in ["row_norm", "exact", "power"]:
                assert estimate_L(obj, method) >= top * (1 - 1e-6)

    ds = random_dataset()
    double = ds.replace(features=2 * ds.features)
    for method in ["row_norm", "exact", "power"]:
        a = estimate_L(Objective(ds, 0.1), method) - 0.1
        b = estimate_L(Objective(double, 0.1), method) - 0.1
        assert b >= a
    assert estimate_L(Objective(ds), "row_norm") >= estimate_L(Objective(ds), "exact")

    with pytest.raises(InputError):
        estimate_L(Objective(ds), "unknown")


def test_accuracy():
    x = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    ds = LabeledDataset(x, [0, 1, 1], 2)
    shape = ParamShape(2, 2)
    w = shape.flatten(np.eye(2), np.zeros(2))
    assert np.array_equal(predict(w, ds), [0, 1, 0])
    assert accuracy(w, ds) == pytest.approx(2.0 / 3.0)


if __name__ == "__main__":
    test_loss_values()
    test_grad_finite_difference()
    test_convexity()
    test_smoothness_small_features()
    test_estimate_L()
