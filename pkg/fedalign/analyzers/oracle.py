import logging
import numpy as np
import scipy.optimize
from ..models import Objective
from ..parallel import parmap
from .theory import DiagnosticError

logger = logging.getLogger(__name__)


class OracleError(DiagnosticError):
    def __init__(self, msg, grad_norm=None):
        super(OracleError, self).__init__(msg)
        self.grad_norm = grad_norm


class OracleSolution:
    r"""Minimizer of a full-batch objective.

    Attributes
    ----------
    w_star: 1D array

    f_star: float
        Objective value at ``w_star``.

    grad_norm: float
        Gradient norm at ``w_star``.

    iterations: int
        Solver iterations (both stages).
    """

    def __init__(self, w_star, f_star, grad_norm, iterations):
        self.w_star = w_star
        self.f_star = f_star
        self.grad_norm = grad_norm
        self.iterations = iterations

    def to_dict(self):
        return {
            "f_star": self.f_star,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
        }


class WeightedObjective:
    r"""``sum_k weights_k * objectives_k``, e.g. the global objective ``F``.

    Parameters
    ----------
    objectives: list
        Objects providing ``loss(w)`` and ``grad(w)``.

    weights: list of float
    """

    def __init__(self, objectives, weights):
        if len(objectives) != len(weights) or not objectives:
            raise OracleError("Need one weight per objective, and at least one objective.")
        self.objectives = objectives
        self.weights = [float(p) for p in weights]

    @property
    def size(self):
        return self.objectives[0].size

    def initial_point(self):
        return self.objectives[0].initial_point()

    def loss(self, w):
        total = 0.0
        for p, obj in zip(self.weights, self.objectives):
            total += p * obj.loss(w)
        return total

    def grad(self, w):
        g = None
        for p, obj in zip(self.weights, self.objectives):
            term = p * obj.grad(w)
            g = term if g is None else g + term
        return g


def minimize(obj, tol=1e-8, max_iter=10000, w0=None):
    r"""Minimize a smooth strongly convex objective to gradient norm ``tol``.

    L-BFGS-B brings the iterate close to the minimum, then full-batch gradient descent
    with backtracking line search drives the gradient norm below ``tol``.

    Parameters
    ----------
    obj:
        Object providing ``loss(w)`` and ``grad(w)``; ``initial_point()`` is used when
        ``w0`` is ``None``.

    tol: float
        Target gradient norm, > 0.

    max_iter: int
        Iteration limit of each stage.

    w0: 1D array (optional)
        Starting point.

    Return
    ------
    OracleSolution
    """
    if tol <= 0:
        raise OracleError("tol should be > 0, got {}.".format(tol))
    w = np.array(obj.initial_point() if w0 is None else w0, dtype=np.float64)

    g = obj.grad(w)
    gnorm = float(np.linalg.norm(g))
    if gnorm <= tol:
        return OracleSolution(w, obj.loss(w), gnorm, 0)

    def fun(x):
        return obj.loss(x), obj.grad(x)

    res = scipy.optimize.minimize(
        fun,
        w,
        jac=True,
        method="L-BFGS-B",
        options={
            "maxiter": max_iter,
            "gtol": tol / (10.0 * np.sqrt(w.size)),
            "ftol": 1e-16,
        },
    )
    w = np.array(res.x, dtype=np.float64)
    iterations = int(res.nit)
    f = obj.loss(w)
    g = obj.grad(w)
    gnorm = float(np.linalg.norm(g))
    logger.debug("L-BFGS-B stage: %d iterations, f=%.12g, |g|=%.3g.", iterations, f, gnorm)

    step = 1.0
    it = 0
    while gnorm > tol and it < max_iter:
        gg = float(np.dot(g, g))
        while step >= 1e-20:
            w_new = w - step * g
            f_new = obj.loss(w_new)
            g_new = obj.grad(w_new)
            gnorm_new = float(np.linalg.norm(g_new))
            # near the minimum the Armijo decrease falls below rounding of f
            if f_new <= f - 0.5 * step * gg or (
                f_new <= f + 1e-15 * max(abs(f), 1.0) and gnorm_new < gnorm
            ):
                break
            step *= 0.5
        if step < 1e-20:
            break
        w, f, g, gnorm = w_new, f_new, g_new, gnorm_new
        step *= 2.0
        it += 1
    iterations += it

    if gnorm > tol:
        msg = "Oracle did not converge: |grad| = {:.3e} > tol = {:.3e} after {} iterations.".format(
            gnorm, tol, iterations
        )
        logger.error(msg)
        raise OracleError(msg, grad_norm=gnorm)

    logger.debug("Oracle converged: f*=%.12g, |g|=%.3g, %d iterations.", f, gnorm, iterations)
    return OracleSolution(w, f, gnorm, iterations)


def _client_oracle(client, reg_lambda, tol, max_iter):
    return minimize(Objective(client.dataset, reg_lambda), tol=tol, max_iter=max_iter)


def solve_oracles(clients, reg_lambda, tol=1e-8, max_iter=10000, nprocs=1):
    r"""Minimize the global objective ``F`` and every client objective ``F_k``.

    Parameters
    ----------
    clients: list of ClientSpec

    reg_lambda: float
        L2 coefficient, > 0 for the objectives to be strongly convex.

    tol, max_iter:
        See :func:`minimize`.

    nprocs: int
        Processes for the independent client minimizations.

    Return
    ------
    (OracleSolution, list of OracleSolution)
        Global solution and per-client solutions in id order.
    """
    priority = [c for c in clients if c.is_priority]
    F = WeightedObjective(
        [Objective(c.dataset, reg_lambda) for c in priority], [c.p_k for c in priority]
    )
    global_solution = minimize(F, tol=tol, max_iter=max_iter)
    client_solutions = parmap(
        _client_oracle, clients, reg_lambda, tol, max_iter, nprocs=nprocs
    )
    return global_solution, client_solutions
