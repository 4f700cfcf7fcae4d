import logging
import numpy as np
from ..error import InputError
from ..models import ParamShape

logger = logging.getLogger(__name__)


class ClientSpec:
    r"""A client of the federation.

    Parameters
    ----------
    id: int
        Position of the client, ``0 .. N-1``.

    dataset: LabeledDataset
        Local training data.

    is_priority: bool
        Whether the client belongs to the priority set whose weighted loss is optimized.

    p_k: float
        Aggregation weight, ``|D_k| / sum_{i in P} |D_i|`` (also for non-priority clients).
    """

    def __init__(self, id, dataset, is_priority, p_k):
        if p_k < 0:
            raise InputError("p_k should be >= 0, got {} for client {}.".format(p_k, id))
        self.id = int(id)
        self.dataset = dataset
        self.is_priority = bool(is_priority)
        self.p_k = float(p_k)

    def get_num_samples(self):
        return self.dataset.get_num_samples()

    def __repr__(self):
        return "ClientSpec(id={}, n={}, priority={}, p_k={:.6g})".format(
            self.id, self.get_num_samples(), self.is_priority, self.p_k
        )


def make_clients(datasets, priority_flags):
    r"""Build clients with weights proportional to their sample counts.

    Parameters
    ----------
    datasets: list of LabeledDataset
        One dataset per client, in id order.

    priority_flags: list of bool
        Priority membership, same length as ``datasets``.

    Return
    ------
    list of ClientSpec
    """
    if len(datasets) != len(priority_flags):
        raise InputError(
            "Got {} datasets but {} priority flags.".format(
                len(datasets), len(priority_flags)
            )
        )
    n_total = sum(ds.get_num_samples() for ds, f in zip(datasets, priority_flags) if f)
    if n_total == 0:
        raise InputError("At least one priority client is needed.")

    clients = [
        ClientSpec(k, ds, f, ds.get_num_samples() / n_total)
        for k, (ds, f) in enumerate(zip(datasets, priority_flags))
    ]
    check_clients(clients)
    return clients


def check_clients(clients):
    r"""Validate a list of clients.

    Ids must be ``0 .. N-1`` in order, the priority set non-empty, all datasets must share
    the same parameter shape, and the priority weights must sum to one.
    """
    if len(clients) == 0:
        raise InputError("The federation has no client.")
    for k, c in enumerate(clients):
        if c.id != k:
            raise InputError("Client at position {} has id {}.".format(k, c.id))

    priority = [c for c in clients if c.is_priority]
    if not priority:
        raise InputError("At least one priority client is needed.")

    shape = ParamShape.of(clients[0].dataset)
    for c in clients[1:]:
        other = ParamShape.of(c.dataset)
        if other != shape:
            raise InputError(
                "Client {} has parameters {}, client 0 has {}.".format(c.id, other, shape)
            )

    total = sum(c.p_k for c in priority)
    if abs(total - 1.0) > 1e-12:
        raise InputError("Priority weights sum to {!r}, expected 1.".format(total))


def priority_ids(clients):
    r"""Ids of the priority clients, in id order."""
    return [c.id for c in clients if c.is_priority]


def nonpriority_ids(clients):
    r"""Ids of the non-priority clients, in id order."""
    return [c.id for c in clients if not c.is_priority]


def weighted_loss(objectives, clients, w):
    r"""``F(w) = sum_{k in P} p_k F_k(w)``, accumulated in id order."""
    total = 0.0
    for obj, c in zip(objectives, clients):
        if c.is_priority:
            total += c.p_k * obj.loss(w)
    return total


def weighted_accuracy(accuracies, clients):
    return float(np.sum([c.p_k * a for a, c in zip(accuracies, clients) if c.is_priority]))
