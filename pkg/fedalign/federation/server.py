import logging
import numpy as np
from ..error import InputError
from .client import priority_ids

logger = logging.getLogger(__name__)


class ProtocolError(Exception):
    def __init__(self, msg):
        super(ProtocolError, self).__init__(msg)
        self.msg = msg

    def __str__(self):
        return self.msg


def report_error(msg):
    logger.error(msg)
    raise ProtocolError(msg)


def lr(t, mu, L, E):
    r"""Decaying step size ``eta_t = 2 / (mu (t + gamma))``, ``gamma = max(8 L / mu, E)``.

    Since ``gamma >= E``, ``eta_{t0} <= 2 eta_t`` for every ``t`` in the same round as
    ``t0``.

    Parameters
    ----------
    t: int
        Global local-iteration index, >= 0.

    mu: float
        Strong-convexity constant, > 0.

    L: float
        Smoothness constant, >= mu.

    E: int
        Local steps per round.

    Return
    ------
    float
    """
    if mu <= 0:
        raise InputError("mu should be > 0, got {}.".format(mu))
    if L < mu:
        raise InputError("L ({}) should be >= mu ({}).".format(L, mu))
    if t < 0 or E < 1:
        raise InputError("Need t >= 0 and E >= 1, got t={}, E={}.".format(t, E))
    gamma = max(8.0 * L / mu, float(E))
    return 2.0 / (mu * (t + gamma))


def include_nonpriority(global_loss, client_loss, eps):
    r"""Inclusion rule of the loss-matching aggregation: ``|F - F_k| < eps`` (strict).

    With ``eps = 0`` no client is ever included.
    """
    return bool(abs(global_loss - client_loss) < eps)


def client_opt_in(global_loss, client_loss, eps):
    r"""Client-side opt-in rule: ``F_k <= F + eps``.

    Every client passing :func:`include_nonpriority` also opts in.
    """
    return bool(client_loss <= global_loss + eps)


def aggregate(models, clients, indicators):
    r"""Full-participation aggregation.

    .. math::
        w = \frac{\sum_{k \in P} p_k w_k + \sum_{k \notin P} I_k p_k w_k}
                 {1 + \sum_{k \notin P} I_k p_k}

    Parameters
    ----------
    models: list of 1D array
        Local models, one per client in id order (``None`` for clients not included).

    clients: list of ClientSpec

    indicators: list of bool
        Inclusion flags, one per client in id order. Every priority client must be
        included and have a model, otherwise a ``ProtocolError`` is raised.

    Return
    ------
    1D array
    """
    numerator = None
    extra = 0.0
    missing = []
    for k, c in enumerate(clients):
        if c.is_priority and (not indicators[k] or models[k] is None):
            missing.append(c.id)
            continue
        if not indicators[k]:
            continue
        if not c.is_priority:
            extra += c.p_k
        term = c.p_k * models[k]
        numerator = term if numerator is None else numerator + term

    if not any(c.is_priority for c in clients):
        report_error("Aggregation without any priority client.")
    if missing:
        report_error(
            "Priority clients {} are missing from full aggregation; their weights would "
            "no longer sum to one.".format(missing)
        )

    return numerator / (1.0 + extra)


def aggregate_partial(models, sample, clients, indicators):
    r"""Aggregation with ``K`` priority clients sampled with replacement.

    .. math::
        w = \frac{1}{K} \sum_{k \in S} \frac{w_k}{1 + s}
            + \sum_{k \notin P} \frac{I_k p_k}{1 + s} w_k,
        \qquad s = \sum_{k \notin P} I_k p_k

    A client sampled several times counts several times. Without non-priority clients the
    expectation over the sample equals the full-participation aggregate.

    Parameters
    ----------
    models: list of 1D array
        Local models in id order.

    sample: list of int
        Sampled priority ids, repetitions included.

    clients: list of ClientSpec

    indicators: list of bool
        Inclusion flags of the non-priority clients (priority entries are ignored).

    Return
    ------
    1D array
    """
    if len(sample) == 0:
        report_error("Partial aggregation with an empty priority sample.")

    extra = 0.0
    for k, c in enumerate(clients):
        if not c.is_priority and indicators[k]:
            extra += c.p_k
    scale = 1.0 + extra

    total = None
    for k in sample:
        if not clients[k].is_priority:
            report_error("Client {} in the priority sample is not a priority client.".format(k))
        total = models[k] if total is None else total + models[k]
    w = total / len(sample) / scale

    for k, c in enumerate(clients):
        if not c.is_priority and indicators[k]:
            w = w + (c.p_k / scale) * models[k]
    return w


def sample_priority(clients, K, rng):
    r"""Draw ``K`` priority ids with replacement, with probabilities ``p_k``.

    Return
    ------
    list of int
    """
    if K < 1:
        raise InputError("K should be >= 1, got {}.".format(K))
    ids = np.array(priority_ids(clients))
    p = np.array([clients[k].p_k for k in ids])
    p = p / p.sum()
    return [int(i) for i in rng.choice(ids, size=K, replace=True, p=p)]
