import logging
import numpy as np
import scipy.linalg
from scipy.special import logsumexp, softmax
from .parameter import ParamShape
from ..error import InputError, ConfigurationError
from ..utils import power_iteration

logger = logging.getLogger(__name__)


class Objective:
    r"""Regularized multinomial logistic loss of one client.

    .. math::
        F(w) = \frac{1}{n} \sum_{i=1}^n \left[\log \sum_c e^{z_{ic}} - z_{i y_i}\right]
        + \frac{\lambda}{2} \|w\|^2, \qquad z_i = W^T x_i + b

    With ``reg_lambda > 0`` the objective is ``reg_lambda``-strongly convex; the L2 term
    covers the biases as well, so ``mu = reg_lambda`` holds for the whole vector.

    Parameters
    ----------
    dataset: LabeledDataset
        Samples defining the empirical loss.

    reg_lambda: float
        L2 coefficient, non-negative.
    """

    def __init__(self, dataset, reg_lambda=0.0):
        if reg_lambda < 0:
            raise InputError("reg_lambda should be >= 0, got {}.".format(reg_lambda))
        self.dataset = dataset
        self.reg_lambda = float(reg_lambda)
        self.shape = ParamShape.of(dataset)

    @property
    def size(self):
        return self.shape.size

    def initial_point(self):
        return self.shape.zeros()

    def loss(self, w):
        return loss(w, self)

    def grad(self, w, batch=None):
        return grad(w, self.dataset if batch is None else batch, self.reg_lambda)

    def loss_and_grad(self, w):
        return loss(w, self), grad(w, self.dataset, self.reg_lambda)

    def hessian_vector(self, w, v):
        return hessian_vector(w, self, v)

    def curvature(self, w):
        r"""Largest Hessian eigenvalue at ``w``, by power iteration; never above ``L``."""
        return power_iteration(lambda v: hessian_vector(w, self, v), self.size)

    def estimate_L(self, method="row_norm"):
        return estimate_L(self, method)


def _logits(w, dataset, shape=None):
    if shape is None:
        shape = ParamShape.of(dataset)
    elif shape.d != dataset.get_num_features() or shape.C != dataset.get_num_classes():
        raise ConfigurationError(
            "Dataset with d={}, C={} does not match parameters of {}.".format(
                dataset.get_num_features(), dataset.get_num_classes(), shape
            )
        )
    W, b = shape.unflatten(w)
    return dataset.features @ W + b


def loss(w, obj):
    r"""Mean cross-entropy over all samples of ``obj.dataset`` plus the L2 term.

    Parameters
    ----------
    w: 1D array
        Flat parameter vector, see :class:`~fedalign.models.ParamShape`.

    obj: Objective

    Return
    ------
    float
    """
    z = _logits(w, obj.dataset, obj.shape)
    n = z.shape[0]
    data_term = np.mean(logsumexp(z, axis=1) - z[np.arange(n), obj.dataset.labels])
    return float(data_term + 0.5 * obj.reg_lambda * np.dot(w, w))


def grad(w, batch, obj_reg):
    r"""Gradient of the mean cross-entropy over ``batch`` plus ``obj_reg * w``.

    Parameters
    ----------
    w: 1D array
        Flat parameter vector.

    batch: LabeledDataset
        The minibatch (or the full dataset).

    obj_reg: float
        L2 coefficient.

    Return
    ------
    1D array, same layout as ``w``.
    """
    if batch is None or len(batch) == 0:
        raise InputError("Cannot compute a gradient over an empty batch.")
    shape = ParamShape.of(batch)
    z = _logits(w, batch, shape)
    n = z.shape[0]
    P = softmax(z, axis=1)
    P[np.arange(n), batch.labels] -= 1.0
    P /= n
    gW = batch.features.T @ P
    gb = P.sum(axis=0)
    return np.concatenate((gW.ravel(), gb)) + obj_reg * w


def hessian_vector(w, obj, v):
    r"""Product of the Hessian of :func:`loss` at ``w`` with the vector ``v``."""
    shape = obj.shape
    X = obj.dataset.features
    n = X.shape[0]
    z = _logits(w, obj.dataset, shape)
    P = softmax(z, axis=1)
    V, vb = shape.unflatten(v)
    # directional derivative of the logits, then of the softmax
    dz = X @ V + vb
    dP = P * (dz - np.sum(P * dz, axis=1, keepdims=True))
    dP /= n
    hW = X.T @ dP
    hb = dP.sum(axis=0)
    return np.concatenate((hW.ravel(), hb)) + obj.reg_lambda * v


def sample_batch(ds, batch_size, rng):
    r"""Draw a minibatch uniformly without replacement.

    Parameters
    ----------
    ds: LabeledDataset

    batch_size: int
        ``1 <= batch_size <= n``.

    rng: numpy.random.Generator
        Advanced by one ``choice`` call.

    Return
    ------
    LabeledDataset
    """
    n = ds.get_num_samples()
    if batch_size < 1 or batch_size > n:
        raise InputError(
            "batch_size should be in [1, {}], got {}.".format(n, batch_size)
        )
    idx = rng.choice(n, size=batch_size, replace=False)
    return ds.subset(idx)


def estimate_L(obj, method="row_norm"):
    r"""Upper estimate of the smoothness constant of ``obj``.

    The cross-entropy Hessian of a sample with input ``a = [x; 1]`` is
    ``(diag(p) - p p^T) kron (a a^T)``, and the eigenvalues of ``diag(p) - p p^T`` are at
    most 1/2. Hence ``L = reg_lambda + lambda_max / 2`` where ``lambda_max`` bounds the
    largest eigenvalue of the second-moment matrix ``A^T A / n`` of the inputs with the
    bias coordinate appended.

    Parameters
    ----------
    obj: Objective

    method: str
        ``row_norm``: the trace bound ``sum_i (||x_i||^2 + 1) / n`` (cheap, never below
        the exact value); ``exact``: dense symmetric eigen-solve; ``power``: power
        iteration on ``A^T A / n``.

    Return
    ------
    float
    """
    X = obj.dataset.features
    n = X.shape[0]
    A = np.hstack((X, np.ones((n, 1))))
    if method == "row_norm":
        lam = float(np.sum(A * A)) / n
    elif method == "exact":
        lam = float(scipy.linalg.eigvalsh(A.T @ A / n)[-1])
    elif method == "power":
        lam = power_iteration(lambda v: A.T @ (A @ v) / n, A.shape[1])
    else:
        raise InputError('Unknown method "{}" to estimate L.'.format(method))
    return obj.reg_lambda + 0.5 * max(lam, 0.0)


def predict(w, ds):
    r"""Most likely class of every sample of ``ds``."""
    return np.argmax(_logits(w, ds), axis=1)


def accuracy(w, ds):
    r"""Fraction of samples of ``ds`` whose label equals the predicted class."""
    return float(np.mean(predict(w, ds) == ds.labels))
