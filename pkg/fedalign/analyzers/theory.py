r"""
Quantities of the convergence bound of loss-matching aggregation.

For a strongly convex run with the decaying step size ``eta_t = 2 / (mu (t + gamma))``,

.. math::
    E[F(w_T)] - F^* \le \frac{C_1 + C_2 \theta_T \Gamma}{T + \gamma} + \rho_T

where ``Gamma`` is the heterogeneity of the priority clients, ``theta_T`` the average
inclusion factor and ``rho_T`` the bias accumulated from aggregated non-priority clients.
"""

import logging
import numpy as np
from ..error import InputError

logger = logging.getLogger(__name__)


class DiagnosticError(Exception):
    def __init__(self, msg):
        super(DiagnosticError, self).__init__(msg)
        self.msg = msg

    def __str__(self):
        return self.msg


def report_error(msg, error_class=DiagnosticError):
    logger.error(msg)
    raise error_class(msg)


def gamma_lr(mu, L, E):
    r"""Shift ``gamma = max(8 L / mu, E)`` of the step-size schedule."""
    return max(8.0 * L / mu, float(E))


def _clamp(value, tol, name):
    if value >= 0:
        return value
    if value >= -10.0 * tol:
        return 0.0
    report_error(
        "{} = {:.3e} is negative beyond tolerance; the oracle is likely unconverged.".format(
            name, value
        )
    )


def compute_gamma(global_solution, client_solutions, objectives, clients, tol=1e-8):
    r"""Heterogeneity ``Gamma`` and the per-client gaps ``Gamma_k``.

    .. math::
        \Gamma = F^* - \sum_{k \in P} p_k F_k^*, \qquad \Gamma_k = F_k(w^*) - F_k^*

    Parameters
    ----------
    global_solution: OracleSolution
        Minimizer of ``F``.

    client_solutions: list of OracleSolution
        Minimizer of every ``F_k``, in id order.

    objectives: list
        ``F_k`` of every client, providing ``loss(w)``.

    clients: list of ClientSpec

    tol: float
        Negative values within ``10 * tol`` are clamped to zero.

    Return
    ------
    (float, list of float)
    """
    if len(client_solutions) != len(clients) or len(objectives) != len(clients):
        raise InputError("Need one oracle solution and one objective per client.")

    weighted = 0.0
    for c, sol in zip(clients, client_solutions):
        if c.is_priority:
            weighted += c.p_k * sol.f_star
    gamma = _clamp(global_solution.f_star - weighted, tol, "Gamma")

    gamma_k = []
    for c, obj, sol in zip(clients, objectives, client_solutions):
        gap = obj.loss(global_solution.w_star) - sol.f_star
        gamma_k.append(_clamp(gap, tol, "Gamma_{}".format(c.id)))
    return gamma, gamma_k


def _runs(logs):
    if len(logs) == 0:
        raise InputError("No round logs given.")
    if isinstance(logs[0], (list, tuple)):
        return [list(run) for run in logs]
    return [list(logs)]


def _round_length(run, E):
    if E is not None:
        return int(E)
    if len(run) < 2:
        raise InputError("Cannot infer E from a single round; pass E explicitly.")
    return run[1].t_start - run[0].t_start


def _step_average(logs, T, E, summand):
    r"""``sum_{i=1}^{T-1}`` of the per-run mean of ``summand(log of round i // E)``."""
    runs = _runs(logs)
    E = _round_length(runs[0], E)
    if E < 1 or T < 1 or T % E != 0:
        raise InputError("T = {} should be a positive multiple of E = {}.".format(T, E))
    n_rounds = T // E
    for run in runs:
        if len(run) < n_rounds:
            raise InputError(
                "Logs cover {} rounds but T = {} needs {}.".format(len(run), T, n_rounds)
            )

    # per-round values, averaged over runs
    per_round = []
    for r in range(n_rounds):
        values = [summand(run[r]) for run in runs]
        per_round.append(sum(values) / len(values))

    total = 0.0
    for i in range(1, T):
        total += per_round[i // E]
    return total


def _included_weight(log, clients):
    s = 0.0
    for c in clients:
        if not c.is_priority and log.indicators[c.id]:
            s += c.p_k
    return s


def theta_T(logs, clients, T, gamma_lr, E=None):
    r"""Average inclusion factor.

    .. math::
        \theta_T = \frac{1}{T + \gamma - 2} \sum_{i=1}^{T-1}
        \frac{1}{1 + \sum_{k \notin P} p_k I_{k, \tau(i)}}

    Step ``i`` uses the indicators logged for its round ``i // E``. The expectation is
    replaced by the mean over runs when ``logs`` is a list of runs.

    Parameters
    ----------
    logs: list of RoundLog, or list of such lists

    clients: list of ClientSpec

    T: int
        Horizon, a multiple of ``E``.

    gamma_lr: float
        Shift of the step-size schedule, >= 1.

    E: int (optional)
        Local steps per round; inferred from ``t_start`` of the logs if ``None``.

    Return
    ------
    float
    """
    if gamma_lr < 1:
        raise InputError("gamma_lr should be >= 1, got {}.".format(gamma_lr))
    total = _step_average(
        logs, T, E, lambda log: 1.0 / (1.0 + _included_weight(log, clients))
    )
    return total / (T + gamma_lr - 2.0)


def rho_T(logs, gamma_k, clients, T, L, mu, gamma_lr, E=None):
    r"""Bias accumulated from aggregated non-priority clients.

    .. math::
        \rho_T = \frac{2L}{\mu (T + \gamma - 2)} \sum_{i=1}^{T-1}
        \frac{\sum_{k \notin P} p_k I_{k, \tau(i)} \Gamma_k}
             {1 + \sum_{k \notin P} p_k I_{k, \tau(i)}}

    Parameters are those of :func:`theta_T` plus the per-client gaps ``gamma_k`` (id
    order) and the constants ``L`` and ``mu``.
    """
    if len(gamma_k) != len(clients):
        raise InputError("Need one Gamma_k per client.")
    if gamma_lr < 1:
        raise InputError("gamma_lr should be >= 1, got {}.".format(gamma_lr))

    def summand(log):
        s = 0.0
        num = 0.0
        for c in clients:
            if not c.is_priority and log.indicators[c.id]:
                s += c.p_k
                num += c.p_k * gamma_k[c.id]
        return num / (1.0 + s)

    total = _step_average(logs, T, E, summand)
    return 2.0 * L / (mu * (T + gamma_lr - 2.0)) * total


def theorem_constants(mu, L, E, sigma_sq, G_sq, w0, w_star, K=None):
    r"""Constants of the bound.

    .. math::
        C_1 = \frac{2L}{\mu^2}\left(\sigma^2 + 8(E-1)^2 G^2\right)
              + \frac{4L^2}{\mu}\|w_0 - w^*\|^2, \qquad C_2 = \frac{12 L^2}{\mu^2}

    ``C1_prime`` (partial participation with ``K`` sampled priority clients) adds
    ``8 E^2 G^2 / K`` inside the parentheses; it is ``None`` if ``K`` is not given.

    Return
    ------
    (float, float, float or None)
    """
    if mu <= 0 or L <= 0:
        raise InputError("mu and L should be > 0, got mu={}, L={}.".format(mu, L))
    dist_sq = float(np.sum((np.asarray(w0) - np.asarray(w_star)) ** 2))
    noise = sigma_sq + 8.0 * (E - 1) ** 2 * G_sq
    tail = 4.0 * L ** 2 / mu * dist_sq
    C1 = 2.0 * L / mu ** 2 * noise + tail
    C2 = 12.0 * L ** 2 / mu ** 2
    C1_prime = None
    if K is not None:
        if K < 1:
            raise InputError("K should be >= 1, got {}.".format(K))
        C1_prime = 2.0 * L / mu ** 2 * (noise + 8.0 * E ** 2 * G_sq / K) + tail
    return C1, C2, C1_prime


def bound(T, gamma_lr, C1, C2, theta, Gamma, rho):
    r"""Right-hand side ``(C1 + C2 theta Gamma) / (T + gamma) + rho``."""
    return (C1 + C2 * theta * Gamma) / (T + gamma_lr) + rho


class TheoryDiagnostics:
    r"""Every quantity of the bound for one run (or one set of runs).

    ``theta_T`` follows the displayed formula, which stays below one even when no
    non-priority client is ever included; ``bound_unit`` is the bound evaluated with
    ``theta = 1`` (the FedAvg-shaped value) for comparison.

    ``bound_trace`` holds, for every round boundary ``T = r E``, the empirical gap
    ``F(w_T) - F*`` and the bound at ``T``. The bound holds for the ``theorem`` step
    sizes only; for any other ``lr_schedule`` the quantities are reported with reference
    constants and ``violated`` is ``None``.

    ``curvature`` is the largest Hessian eigenvalue of the priority objectives at ``w*``,
    a lower check of ``L``.
    """

    def __init__(self, gamma, gamma_k, theta_T, rho_T, C1, C2, C1_prime, sigma_sq_hat,
                 G_sq_hat, bound_value, mu, L, gamma_lr, T, n_runs, bound_trace,
                 bound_unit, curvature=None, lr_schedule="theorem"):
        self.gamma = gamma
        self.gamma_k = gamma_k
        self.theta_T = theta_T
        self.rho_T = rho_T
        self.C1 = C1
        self.C2 = C2
        self.C1_prime = C1_prime
        self.sigma_sq_hat = sigma_sq_hat
        self.G_sq_hat = G_sq_hat
        self.bound_value = bound_value
        self.mu = mu
        self.L = L
        self.gamma_lr = gamma_lr
        self.T = T
        self.n_runs = n_runs
        self.bound_trace = bound_trace
        self.bound_unit = bound_unit
        self.curvature = curvature
        self.lr_schedule = lr_schedule

    @property
    def bound_applies(self):
        return self.lr_schedule == "theorem"

    @property
    def violations(self):
        if not self.bound_applies:
            return None
        return sum(1 for e in self.bound_trace if e["violated"])

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "gamma_k": list(self.gamma_k),
            "theta_T": self.theta_T,
            "rho_T": self.rho_T,
            "C1": self.C1,
            "C2": self.C2,
            "C1_prime": self.C1_prime,
            "sigma_sq_hat": self.sigma_sq_hat,
            "G_sq_hat": self.G_sq_hat,
            "bound_value": self.bound_value,
            "bound_theta_one": self.bound_unit,
            "mu": self.mu,
            "L": self.L,
            "curvature_at_optimum": self.curvature,
            "gamma_lr": self.gamma_lr,
            "T": self.T,
            "lr_schedule": self.lr_schedule,
            "bound_applies": self.bound_applies,
            "expectation": "single-run" if self.n_runs == 1 else "mean-of-{}-runs".format(
                self.n_runs
            ),
            "violations": self.violations,
            "bound_trace": self.bound_trace,
        }


def compute_diagnostics(results, clients, global_solution, client_solutions, objectives,
                        E, mu, L, sigma_sq, G_sq, K=None, tol=1e-8, lr_schedule="theorem"):
    r"""Evaluate the bound along one or several runs sharing the same clients.

    Parameters
    ----------
    results: FederationResult or list of FederationResult
        Runs of a federated algorithm (not ``LocalOnly``).

    clients: list of ClientSpec

    global_solution, client_solutions:
        Oracle solutions, see :func:`~fedalign.analyzers.solve_oracles`.

    objectives: list of Objective
        ``F_k`` of every client.

    E: int
        Local steps per round.

    mu, L: float
        Constants of the step-size schedule.

    sigma_sq, G_sq: float
        Gradient-noise estimates, see :func:`~fedalign.analyzers.estimate_noise`.

    K: int (optional)
        Sampled priority clients per round; the bound then uses ``C1_prime``.

    tol: float
        Oracle tolerance, used for clamping and for flagging violations.

    lr_schedule: str
        Step-size schedule of the runs. Violations are only flagged for ``theorem``.

    Return
    ------
    TheoryDiagnostics
    """
    if not isinstance(results, (list, tuple)):
        results = [results]
    if any(r.final_model is None for r in results):
        raise DiagnosticError("Diagnostics need a global model; LocalOnly runs have none.")

    n_rounds = len(results[0].logs)
    if n_rounds == 0:
        raise DiagnosticError("Diagnostics need at least one logged round.")
    runs = [r.logs for r in results]
    T = n_rounds * E
    g_lr = gamma_lr(mu, L, E)
    applies = lr_schedule == "theorem"

    gamma, gamma_k = compute_gamma(global_solution, client_solutions, objectives, clients, tol)
    w0 = results[0].trajectory[0]
    C1, C2, C1_prime = theorem_constants(
        mu, L, E, sigma_sq, G_sq, w0, global_solution.w_star, K
    )
    C = C1 if K is None else C1_prime

    priority = [(c.p_k, objectives[c.id]) for c in clients if c.is_priority]

    curvature = max(obj.curvature(global_solution.w_star) for _, obj in priority)
    if curvature > L * (1.0 + 1e-6):
        logger.warning(
            "Hessian eigenvalue %.6g at the optimum exceeds L = %.6g.", curvature, L
        )

    def F(w):
        total = 0.0
        for p, obj in priority:
            total += p * obj.loss(w)
        return total

    trace = []
    for r in range(1, n_rounds + 1):
        t = r * E
        gap = float(np.mean([F(res.trajectory[r]) for res in results])) - global_solution.f_star
        th = theta_T(runs, clients, t, g_lr, E)
        rh = rho_T(runs, gamma_k, clients, t, L, mu, g_lr, E)
        b = bound(t, g_lr, C, C2, th, gamma, rh)
        violated = bool(gap > b + 10.0 * tol) if applies else None
        trace.append({"T": t, "gap": gap, "bound": b, "violated": violated})

    th = theta_T(runs, clients, T, g_lr, E)
    rh = rho_T(runs, gamma_k, clients, T, L, mu, g_lr, E)
    diag = TheoryDiagnostics(
        gamma,
        gamma_k,
        th,
        rh,
        C1,
        C2,
        C1_prime,
        sigma_sq,
        G_sq,
        bound(T, g_lr, C, C2, th, gamma, rh),
        mu,
        L,
        g_lr,
        T,
        len(results),
        trace,
        bound(T, g_lr, C, C2, 1.0, gamma, rh),
        curvature=curvature,
        lr_schedule=lr_schedule,
    )
    if diag.violations:
        logger.warning("Bound violated at %d of %d round boundaries.", diag.violations, n_rounds)
    return diag


def average_diagnostics(diagnostics, tol=1e-8):
    r"""Average the diagnostics of independent runs on different data.

    Runs with different seeds have different clients, so the expectations of ``theta_T``
    and ``rho_T`` are estimated by the mean of the per-run values, and every scalar of the
    bound is averaged the same way. At every round boundary the mean gap is compared with
    the mean bound, which bounds the expected gap over the runs.

    Parameters
    ----------
    diagnostics: list of TheoryDiagnostics
        One per run, all with the same ``T``, round boundaries, client count and
        ``lr_schedule``.

    tol: float
        Tolerance for flagging violations.

    Return
    ------
    TheoryDiagnostics
    """
    if len(diagnostics) == 0:
        raise InputError("No diagnostics to average.")
    first = diagnostics[0]
    for d in diagnostics[1:]:
        if d.T != first.T or len(d.bound_trace) != len(first.bound_trace):
            report_error("Cannot average diagnostics with T = {} and T = {}.".format(
                first.T, d.T
            ))
        if len(d.gamma_k) != len(first.gamma_k):
            report_error("Cannot average diagnostics of different client counts.")
        if d.lr_schedule != first.lr_schedule:
            report_error("Cannot average diagnostics of different lr schedules.")

    def mean(name):
        values = [getattr(d, name) for d in diagnostics]
        if any(v is None for v in values):
            return None
        return float(np.mean(values))

    gamma_k = np.mean([d.gamma_k for d in diagnostics], axis=0).tolist()
    applies = first.bound_applies
    trace = []
    for i, entry in enumerate(first.bound_trace):
        gap = float(np.mean([d.bound_trace[i]["gap"] for d in diagnostics]))
        b = float(np.mean([d.bound_trace[i]["bound"] for d in diagnostics]))
        violated = bool(gap > b + 10.0 * tol) if applies else None
        trace.append({"T": entry["T"], "gap": gap, "bound": b, "violated": violated})

    curvatures = [d.curvature for d in diagnostics if d.curvature is not None]
    diag = TheoryDiagnostics(
        mean("gamma"),
        gamma_k,
        mean("theta_T"),
        mean("rho_T"),
        mean("C1"),
        mean("C2"),
        mean("C1_prime"),
        mean("sigma_sq_hat"),
        mean("G_sq_hat"),
        mean("bound_value"),
        mean("mu"),
        mean("L"),
        mean("gamma_lr"),
        first.T,
        sum(d.n_runs for d in diagnostics),
        trace,
        mean("bound_unit"),
        curvature=max(curvatures) if curvatures else None,
        lr_schedule=first.lr_schedule,
    )
    if diag.violations:
        logger.warning(
            "Averaged bound violated at %d of %d round boundaries.",
            diag.violations, len(trace),
        )
    return diag
