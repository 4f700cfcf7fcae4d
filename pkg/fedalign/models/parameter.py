import logging
import numpy as np
from ..error import ConfigurationError

logger = logging.getLogger(__name__)


class ParamShape:
    r"""Layout of a flat parameter vector of a multinomial logistic model.

    A parameter vector ``w`` is a 1D float64 array of length ``d*C + C``: the ``d x C``
    weight matrix flattened in row-major order, followed by the ``C`` biases.

    Parameters
    ----------
    d: int
        Feature dimension.

    C: int
        Number of classes.
    """

    def __init__(self, d, C):
        if d < 1 or C < 2:
            raise ConfigurationError(
                "Need d >= 1 and C >= 2, got d={} and C={}.".format(d, C)
            )
        self.d = int(d)
        self.C = int(C)

    @classmethod
    def of(cls, dataset):
        return cls(dataset.get_num_features(), dataset.get_num_classes())

    @property
    def size(self):
        return self.d * self.C + self.C

    def zeros(self):
        return np.zeros(self.size)

    def unflatten(self, w):
        r"""Split ``w`` into views of the weight matrix ``(d, C)`` and the bias ``(C,)``."""
        self.check(w)
        W = w[: self.d * self.C].reshape(self.d, self.C)
        b = w[self.d * self.C :]
        return W, b

    def flatten(self, W, b):
        W = np.asarray(W, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if W.shape != (self.d, self.C) or b.shape != (self.C,):
            raise ConfigurationError(
                "Expect weight of shape ({0}, {1}) and bias of shape ({1},), got {2} "
                "and {3}.".format(self.d, self.C, W.shape, b.shape)
            )
        return np.concatenate((W.ravel(), b))

    def check(self, w):
        r"""Raise if ``w`` has the wrong length or non-finite entries."""
        if w.ndim != 1 or w.shape[0] != self.size:
            msg = "Parameter vector of length {} does not match d={}, C={} ({}).".format(
                w.shape[0] if w.ndim == 1 else w.shape, self.d, self.C, self.size
            )
            logger.error(msg)
            raise ConfigurationError(msg)
        if not np.all(np.isfinite(w)):
            msg = "Parameter vector contains NaN or Inf."
            logger.error(msg)
            raise ConfigurationError(msg)

    def __eq__(self, other):
        return isinstance(other, ParamShape) and (self.d, self.C) == (other.d, other.C)

    def __repr__(self):
        return "ParamShape(d={}, C={})".format(self.d, self.C)
