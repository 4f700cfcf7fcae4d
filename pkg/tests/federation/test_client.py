import numpy as np
import pytest
from fedalign.dataset import LabeledDataset
from fedalign.models import Objective
from fedalign.federation import (
    ClientSpec,
    make_clients,
    check_clients,
    priority_ids,
    nonpriority_ids,
    weighted_loss,
)
from fedalign.error import InputError


def make_dataset(n, d=2, C=3, seed=0):
    rng = np.random.default_rng(seed)
    return LabeledDataset(rng.standard_normal((n, d)), rng.integers(0, C, n), C)


def test_make_clients():
    datasets = [make_dataset(10), make_dataset(20, seed=1), make_dataset(30, seed=2)]
    clients = make_clients(datasets, [True, False, True])
    assert [c.p_k for c in clients] == pytest.approx([0.25, 0.5, 0.75])
    assert priority_ids(clients) == [0, 2]
    assert nonpriority_ids(clients) == [1]
    assert clients[1].get_num_samples() == 20


def test_invalid_clients():
    datasets = [make_dataset(10), make_dataset(10, seed=1)]
    with pytest.raises(InputError):
        make_clients(datasets, [False, False])
    with pytest.raises(InputError):
        make_clients(datasets, [True])
    with pytest.raises(InputError):
        make_clients([make_dataset(10), make_dataset(10, d=3)], [True, False])
    with pytest.raises(InputError):
        check_clients([])
    with pytest.raises(InputError):
        check_clients([ClientSpec(1, datasets[0], True, 1.0)])
    with pytest.raises(InputError):
        check_clients([ClientSpec(0, datasets[0], True, 0.5)])
    with pytest.raises(InputError):
        ClientSpec(0, datasets[0], True, -1.0)


def test_weighted_loss():
    datasets = [make_dataset(10), make_dataset(30, seed=1), make_dataset(5, seed=2)]
    clients = make_clients(datasets, [True, True, False])
    objectives = [Objective(ds, 0.1) for ds in datasets]
    w = np.random.default_rng(3).standard_normal(objectives[0].size)
    expected = 0.25 * objectives[0].loss(w) + 0.75 * objectives[1].loss(w)
    assert weighted_loss(objectives, clients, w) == pytest.approx(expected, rel=1e-14)


if __name__ == "__main__":
    test_make_clients()
    test_invalid_clients()
    test_weighted_loss()
