import logging
import numpy as np
from ..models import Objective, sample_batch
from ..error import InputError

logger = logging.getLogger(__name__)


def estimate_noise(clients, w_samples, batch_size, n_draws, rng, reg_lambda=0.0):
    r"""Estimate the stochastic-gradient variance and second-moment bounds.

    For every client ``k`` and every point ``w``, ``n_draws`` minibatch gradients ``g``
    give the empirical means of ``||g - grad F_k(w)||^2`` and ``||g||^2``. The maxima over
    clients and points are returned, so that the estimates act as upper bounds.

    Parameters
    ----------
    clients: list of ClientSpec

    w_samples: list of 1D array
        Points at which gradients are sampled, e.g. models along a trajectory.

    batch_size: int or None
        Minibatch size; ``None`` or a value >= a client's sample count means full batch
        for that client, whose variance is then zero.

    n_draws: int
        Minibatches per (client, point), >= 1.

    rng: numpy.random.Generator

    reg_lambda: float
        L2 coefficient of the objectives.

    Return
    ------
    (float, float)
        ``sigma_sq_hat`` and ``G_sq_hat``.
    """
    if n_draws < 1:
        raise InputError("n_draws should be >= 1, got {}.".format(n_draws))
    if not w_samples:
        raise InputError("At least one sample point is needed.")

    sigma_sq = 0.0
    G_sq = 0.0
    for c in clients:
        obj = Objective(c.dataset, reg_lambda)
        full_batch = batch_size is None or batch_size >= c.get_num_samples()
        for w in w_samples:
            full = obj.grad(w)
            if full_batch:
                G_sq = max(G_sq, float(np.dot(full, full)))
                continue
            dev = 0.0
            sq = 0.0
            for _ in range(n_draws):
                g = obj.grad(w, sample_batch(c.dataset, batch_size, rng))
                dev += float(np.sum((g - full) ** 2))
                sq += float(np.dot(g, g))
            sigma_sq = max(sigma_sq, dev / n_draws)
            G_sq = max(G_sq, sq / n_draws)

    logger.debug("Gradient noise estimates: sigma^2=%.6g, G^2=%.6g.", sigma_sq, G_sq)
    return sigma_sq, G_sq
