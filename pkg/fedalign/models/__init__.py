from .parameter import ParamShape
from .logistic import Objective
from .logistic import loss
from .logistic import grad
from .logistic import hessian_vector
from .logistic import sample_batch
from .logistic import estimate_L
from .logistic import predict
from .logistic import accuracy

__all__ = [
    "ParamShape",
    "Objective",
    "loss",
    "grad",
    "hessian_vector",
    "sample_batch",
    "estimate_L",
    "predict",
    "accuracy",
]
