import logging
import numpy as np
from ..dataset import LabeledDataset
from ..error import InputError
from ..utils import make_rng

logger = logging.getLogger(__name__)

# sub-stream tags of the experiment seed
MODEL_STREAM = 0
TRAIN_STREAM = 1
TEST_STREAM = 2


class SynthParams:
    r"""Parameters of the Synth(alpha, beta) generator.

    Client ``k`` labels its samples with ``y = argmax(W_k^T x + b_k)`` where the entries of
    ``W_k`` and ``b_k`` are drawn from ``N(u_k, 1)`` with ``u_k ~ N(0, alpha)``, and draws
    ``x ~ N(v_k, Sigma)`` with ``Sigma_jj = j^(-1.2)`` and the entries of ``v_k`` from
    ``N(B_k, 1)``, ``B_k ~ N(0, beta)``. ``alpha`` and ``beta`` are used as standard
    deviations (for Synth(1, 1) variance and standard deviation coincide).

    Parameters
    ----------
    alpha: float
        Model heterogeneity, >= 0.

    beta: float
        Feature-distribution heterogeneity, >= 0.

    d: int
        Feature dimension.

    C: int
        Number of classes.

    samples_per_client: int
        Training samples drawn for every client.

    n_clients: int
        Number of generated clients.

    seed: int
        Seed of all draws.

    iid: bool
        If ``True``, every client shares the generator drawn for client 0.
    """

    def __init__(
        self,
        alpha,
        beta,
        d=60,
        C=10,
        samples_per_client=500,
        n_clients=1,
        seed=0,
        iid=False,
    ):
        errors = []
        if alpha < 0:
            errors.append("alpha should be >= 0, got {}.".format(alpha))
        if beta < 0:
            errors.append("beta should be >= 0, got {}.".format(beta))
        if d < 1:
            errors.append("d should be >= 1, got {}.".format(d))
        if C < 2:
            errors.append("C should be >= 2, got {}.".format(C))
        if samples_per_client < 1:
            errors.append(
                "samples_per_client should be >= 1, got {}.".format(samples_per_client)
            )
        if n_clients < 1:
            errors.append("n_clients should be >= 1, got {}.".format(n_clients))
        if seed < 0:
            errors.append("seed should be >= 0, got {}.".format(seed))
        if errors:
            msg = " ".join(errors)
            logger.error(msg)
            raise InputError(msg)

        self.alpha = float(alpha)
        self.beta = float(beta)
        self.d = int(d)
        self.C = int(C)
        self.samples_per_client = int(samples_per_client)
        self.n_clients = int(n_clients)
        self.seed = int(seed)
        self.iid = bool(iid)


def feature_covariance_diagonal(d):
    r"""Diagonal ``Sigma_jj = j^(-1.2)`` for ``j = 1..d``."""
    return np.arange(1, d + 1, dtype=np.float64) ** (-1.2)


class SynthGenerator:
    r"""Sampling distribution of one synthetic client.

    Parameters
    ----------
    W: 2D array, shape(d, C)

    b: 1D array, shape(C,)

    v: 1D array, shape(d,)
        Mean of the features.
    """

    def __init__(self, W, b, v):
        self.W = W
        self.b = b
        self.v = v
        self.std = np.sqrt(feature_covariance_diagonal(len(v)))

    @classmethod
    def draw(cls, alpha, beta, d, C, rng):
        u = rng.normal(0.0, alpha)
        W = rng.normal(u, 1.0, size=(d, C))
        b = rng.normal(u, 1.0, size=C)
        B = rng.normal(0.0, beta)
        v = rng.normal(B, 1.0, size=d)
        return cls(W, b, v)

    @property
    def num_classes(self):
        return self.W.shape[1]

    def sample(self, n, rng):
        r"""Draw ``n`` labeled samples."""
        d = len(self.v)
        x = self.v + self.std * rng.standard_normal((n, d))
        y = np.argmax(x @ self.W + self.b, axis=1)
        return LabeledDataset(x, y, self.num_classes)


def synth_models(p):
    r"""Draw the per-client generators of ``p``; deterministic given ``p.seed``."""
    if p.iid:
        shared = SynthGenerator.draw(
            p.alpha, p.beta, p.d, p.C, make_rng(p.seed, MODEL_STREAM, 0)
        )
        return [shared for _ in range(p.n_clients)]
    return [
        SynthGenerator.draw(p.alpha, p.beta, p.d, p.C, make_rng(p.seed, MODEL_STREAM, k))
        for k in range(p.n_clients)
    ]


def synth_generate(p):
    r"""Generate one training dataset per client.

    Parameters
    ----------
    p: SynthParams

    Return
    ------
    list of LabeledDataset
        ``p.n_clients`` datasets of ``p.samples_per_client`` samples each.
    """
    models = synth_models(p)
    datasets = [
        g.sample(p.samples_per_client, make_rng(p.seed, TRAIN_STREAM, k))
        for k, g in enumerate(models)
    ]
    logger.info(
        "Generated Synth({}, {}) data for {} clients.".format(p.alpha, p.beta, p.n_clients)
    )
    return datasets


def mixture_sample(generators, weights, n, rng):
    r"""Draw ``n`` samples from a mixture of generators.

    The number of samples from each generator is multinomial with probabilities
    ``weights`` (normalized); the pooled rows are shuffled.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if len(generators) == 0 or len(generators) != len(weights) or np.any(weights < 0):
        raise InputError("Need one non-negative weight per generator.")
    counts = rng.multinomial(n, weights / weights.sum())
    parts = [g.sample(c, rng) for g, c in zip(generators, counts) if c > 0]
    x = np.concatenate([ds.features for ds in parts])
    y = np.concatenate([ds.labels for ds in parts])
    order = rng.permutation(n)
    return LabeledDataset(x[order], y[order], generators[0].num_classes)
