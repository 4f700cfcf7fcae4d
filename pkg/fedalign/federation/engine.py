import logging
import numpy as np
from .config import Algorithm
from .client import (
    check_clients,
    priority_ids,
    nonpriority_ids,
    weighted_loss,
    weighted_accuracy,
)
from .server import (
    lr,
    include_nonpriority,
    client_opt_in,
    aggregate,
    aggregate_partial,
    sample_priority,
)
from ..models import Objective, sample_batch, accuracy, estimate_L
from ..error import ConfigurationError
from ..utils import make_rng
from ..parallel import parmap

logger = logging.getLogger(__name__)

LOCAL_STREAM = 10
SAMPLE_STREAM = 11
AVAILABILITY_STREAM = 12


class RoundLog:
    r"""Record of one communication round.

    Losses and accuracy are evaluated at the model broadcast at the start of the round
    (for ``LocalOnly``, at every client's own model).

    Parameters
    ----------
    round: int
        Round index ``r``.

    t_start: int
        Local-iteration index ``r * E`` of the round start.

    global_loss: float
        ``F(w) = sum_{k in P} p_k F_k(w)``.

    per_client_loss: 1D array
        ``F_k(w)`` of every client, in id order.

    indicators: 1D bool array
        Whether a client's update entered the aggregate of this round.

    opt_in: 1D bool array
        Whether a client trained in this round (client-side gate for non-priority ones).

    epsilon: float
        Threshold of the round (0 for algorithms without loss matching).

    eta: float
        Step size at ``t_start``.

    test_accuracy: float
        Accuracy on the global test set.

    participating_priority: list of int
        Sampled priority ids (with repetitions); ``None`` under full participation.
    """

    def __init__(
        self,
        round,
        t_start,
        global_loss,
        per_client_loss,
        indicators,
        opt_in,
        epsilon,
        eta,
        test_accuracy,
        participating_priority=None,
    ):
        self.round = round
        self.t_start = t_start
        self.global_loss = global_loss
        self.per_client_loss = np.asarray(per_client_loss, dtype=np.float64)
        self.indicators = np.asarray(indicators, dtype=bool)
        self.opt_in = np.asarray(opt_in, dtype=bool)
        self.epsilon = epsilon
        self.eta = eta
        self.test_accuracy = test_accuracy
        self.participating_priority = participating_priority

    def n_nonpriority_included(self, clients):
        return int(sum(1 for c in clients if not c.is_priority and self.indicators[c.id]))

    def to_dict(self):
        return {
            "round": self.round,
            "t_start": self.t_start,
            "global_loss": self.global_loss,
            "per_client_loss": self.per_client_loss.tolist(),
            "indicators": self.indicators.tolist(),
            "opt_in": self.opt_in.tolist(),
            "epsilon": self.epsilon,
            "eta": self.eta,
            "test_accuracy": self.test_accuracy,
            "participating_priority": self.participating_priority,
        }


class FederationResult:
    r"""Outcome of :func:`run_federation`.

    Attributes
    ----------
    logs: list of RoundLog

    final_model: 1D array
        Global model after the last round; ``None`` for ``LocalOnly``.

    client_models: list of 1D array
        Per-client models of ``LocalOnly``; ``None`` otherwise.

    trajectory: list of 1D array
        Broadcast model of every round followed by the final model (for ``LocalOnly``,
        the list of client models instead of a single model).

    final_loss: float
        ``F`` at the final model (p-weighted own-model losses for ``LocalOnly``).

    final_accuracy: float
        Test accuracy at the final model (p-weighted over priority clients for
        ``LocalOnly``).

    client_accuracy: list of float
        Final accuracy of every client on its own test set; ``None`` without client test
        sets.

    mu, L: float
        Constants the learning-rate schedule used (``None`` for a constant schedule).
    """

    def __init__(self, logs, final_model, client_models, trajectory, final_loss,
                 final_accuracy, client_accuracy, mu, L):
        self.logs = logs
        self.final_model = final_model
        self.client_models = client_models
        self.trajectory = trajectory
        self.final_loss = final_loss
        self.final_accuracy = final_accuracy
        self.client_accuracy = client_accuracy
        self.mu = mu
        self.L = L


def learning_rate(cfg, t):
    r"""Step size of local iteration ``t`` under ``cfg``; ``mu`` and ``L`` must be set."""
    if cfg.lr_schedule == "constant":
        return float(cfg.eta)
    return lr(t, cfg.mu, cfg.L, cfg.E)


def resolve_constants(clients, cfg):
    r"""Fill in ``mu`` (``reg_lambda``) and ``L`` (largest client estimate) if missing.

    Return
    ------
    FederationConfig
        ``cfg`` itself when nothing is missing, otherwise an updated copy.
    """
    if cfg.lr_schedule != "theorem" or (cfg.mu is not None and cfg.L is not None):
        return cfg
    mu = cfg.reg_lambda if cfg.mu is None else cfg.mu
    L = cfg.L
    if L is None:
        L = max(estimate_L(Objective(c.dataset, cfg.reg_lambda)) for c in clients)
        L = max(L, mu)
    logger.debug("Learning-rate constants resolved to mu=%g, L=%g.", mu, L)
    return cfg.replace(mu=mu, L=L)


def local_update(w, client, E, t0, cfg, rng, w_broadcast=None):
    r"""Run ``E`` local SGD steps of ``client`` starting from ``w``.

    Step ``j`` uses ``eta_{t0 + j}`` and a minibatch of ``cfg.batch_size`` samples (the
    full dataset if ``batch_size`` is ``None`` or not smaller than the client's sample
    count). The ``FedProx*`` algorithms add ``prox_mu * (w - w_broadcast)`` to every
    gradient.

    Parameters
    ----------
    w: 1D array
        Starting point, also the default ``w_broadcast``.

    client: ClientSpec

    E: int
        Number of steps.

    t0: int
        Global local-iteration index of the first step.

    cfg: FederationConfig
        With ``mu`` and ``L`` resolved for the ``theorem`` schedule.

    rng: numpy.random.Generator
        Stream of this client in this round.

    w_broadcast: 1D array (optional)
        Anchor of the proximal term.

    Return
    ------
    1D array
    """
    obj = Objective(client.dataset, cfg.reg_lambda)
    obj.shape.check(w)
    if w_broadcast is None:
        w_broadcast = w
    n = client.get_num_samples()
    full_batch = cfg.batch_size is None or cfg.batch_size >= n
    prox = cfg.algorithm.is_prox and cfg.prox_mu > 0

    w = np.array(w, dtype=np.float64)
    for j in range(E):
        if full_batch:
            g = obj.grad(w)
        else:
            g = obj.grad(w, sample_batch(client.dataset, cfg.batch_size, rng))
        if prox:
            g = g + cfg.prox_mu * (w - w_broadcast)
        w = w - learning_rate(cfg, t0 + j) * g
    return w


def run_federation(clients, cfg, test_set, client_test_sets=None, nprocs=1):
    r"""Run the federated training loop.

    Every round broadcasts the global model and the global loss ``F(w)``. Priority clients
    (all of them, or ``K`` sampled ones) always train. Non-priority clients that are
    available train when the algorithm admits them (``*All``) or when they opt in
    (``*ALIGN``); the server then keeps those passing :func:`include_nonpriority` and
    aggregates. The run is a deterministic function of ``(clients, cfg)``.

    Parameters
    ----------
    clients: list of ClientSpec

    cfg: FederationConfig

    test_set: LabeledDataset
        Global test set for the logged accuracy.

    client_test_sets: list of LabeledDataset (optional)
        Per-client test sets for the final per-client accuracy.

    nprocs: int
        Processes for the local updates of a round; results do not depend on it.

    Return
    ------
    FederationResult
    """
    check_clients(clients)
    cfg = resolve_constants(clients, cfg)
    if client_test_sets is not None and len(client_test_sets) != len(clients):
        raise ConfigurationError(
            "Got {} client test sets for {} clients.".format(len(client_test_sets), len(clients))
        )

    objectives = [Objective(c.dataset, cfg.reg_lambda) for c in clients]
    shape = objectives[0].shape
    w0 = shape.zeros() if cfg.w0 is None else np.array(cfg.w0, dtype=np.float64)
    shape.check(w0)

    logger.debug(
        "Federation start: %s, %d clients, %d rounds, E=%d (%d local steps), participation %s.",
        cfg.algorithm.value, len(clients), cfg.rounds, cfg.E, cfg.total_iterations,
        cfg.participation.kind,
    )

    if cfg.algorithm is Algorithm.LocalOnly:
        return _run_local_only(clients, objectives, cfg, w0, test_set, client_test_sets)

    selection = cfg.algorithm.selection
    K = cfg.participation.priority_K
    p_avail = cfg.participation.nonpriority_p

    w = w0
    logs = []
    trajectory = []
    for r in range(cfg.rounds):
        t0 = r * cfg.E
        trajectory.append(w)
        losses = [obj.loss(w) for obj in objectives]
        global_loss = _weighted(losses, clients)
        eps = cfg.epsilon_schedule.value(t0) if selection == "align" else 0.0

        if K is None:
            sample = None
            active_priority = priority_ids(clients)
        else:
            sample = sample_priority(clients, K, make_rng(cfg.seed, SAMPLE_STREAM, r))
            active_priority = sorted(set(sample))

        if p_avail is None:
            available = np.ones(len(clients), dtype=bool)
        else:
            available = make_rng(cfg.seed, AVAILABILITY_STREAM, r).random(len(clients)) < p_avail

        indicators = np.zeros(len(clients), dtype=bool)
        opt_in = np.zeros(len(clients), dtype=bool)
        for k in active_priority:
            indicators[k] = True
            opt_in[k] = True
        for k in nonpriority_ids(clients):
            if not available[k] or selection == "priority":
                continue
            if selection == "all":
                opt_in[k] = True
            else:
                opt_in[k] = client_opt_in(global_loss, losses[k], eps)

        train_ids = [k for k in range(len(clients)) if opt_in[k]]
        trained = _train_round(clients, cfg, w, t0, r, train_ids, nprocs)
        models = [None] * len(clients)
        for k, wk in zip(train_ids, trained):
            models[k] = wk

        for k in nonpriority_ids(clients):
            if not opt_in[k]:
                continue
            if selection == "all":
                indicators[k] = True
            elif cfg.indicator_point == "broadcast":
                indicators[k] = include_nonpriority(global_loss, losses[k], eps)
            else:
                wk = models[k]
                indicators[k] = include_nonpriority(
                    weighted_loss(objectives, clients, wk), objectives[k].loss(wk), eps
                )

        eta = learning_rate(cfg, t0)
        test_acc = accuracy(w, test_set)
        if sample is None:
            w = aggregate(models, clients, indicators)
        else:
            w = aggregate_partial(models, sample, clients, indicators)

        log = RoundLog(
            r, t0, global_loss, losses, indicators, opt_in, eps, eta, test_acc, sample
        )
        logs.append(log)
        logger.debug(
            "Round %d: F=%.6g, eps=%g, eta=%.4g, acc=%.4f, non-priority included %d.",
            r, global_loss, eps, eta, test_acc, log.n_nonpriority_included(clients),
        )

    trajectory.append(w)
    final_loss = weighted_loss(objectives, clients, w)
    final_acc = accuracy(w, test_set)
    client_acc = None
    if client_test_sets is not None:
        client_acc = [accuracy(w, ts) for ts in client_test_sets]

    return FederationResult(
        logs, w, None, trajectory, final_loss, final_acc, client_acc, cfg.mu, cfg.L
    )


def _weighted(values, clients):
    total = 0.0
    for v, c in zip(values, clients):
        if c.is_priority:
            total += c.p_k * v
    return total


def _client_step(k, clients, cfg, w, t0, r):
    rng = make_rng(cfg.seed, LOCAL_STREAM, r, k)
    return local_update(w, clients[k], cfg.E, t0, cfg, rng, w_broadcast=w)


def _train_round(clients, cfg, w, t0, r, train_ids, nprocs):
    if nprocs > 1 and len(train_ids) > 1:
        return parmap(_client_step, train_ids, clients, cfg, w, t0, r, nprocs=nprocs)
    return [_client_step(k, clients, cfg, w, t0, r) for k in train_ids]


def _run_local_only(clients, objectives, cfg, w0, test_set, client_test_sets):
    models = [w0 for _ in clients]
    logs = []
    trajectory = []
    n = len(clients)
    for r in range(cfg.rounds):
        t0 = r * cfg.E
        losses = [obj.loss(wk) for obj, wk in zip(objectives, models)]
        global_loss = _weighted(losses, clients)
        test_acc = weighted_accuracy([accuracy(wk, test_set) for wk in models], clients)
        trajectory.append(list(models))
        models = [
            local_update(
                models[k], clients[k], cfg.E, t0, cfg, make_rng(cfg.seed, LOCAL_STREAM, r, k)
            )
            for k in range(n)
        ]
        logs.append(
            RoundLog(
                r,
                t0,
                global_loss,
                losses,
                np.zeros(n, dtype=bool),
                np.zeros(n, dtype=bool),
                0.0,
                learning_rate(cfg, t0),
                test_acc,
            )
        )
        logger.debug("Local round %d: weighted F_k=%.6g, acc=%.4f.", r, global_loss, test_acc)

    trajectory.append(list(models))
    final_loss = _weighted([obj.loss(wk) for obj, wk in zip(objectives, models)], clients)
    final_acc = weighted_accuracy([accuracy(wk, test_set) for wk in models], clients)
    client_acc = None
    if client_test_sets is not None:
        client_acc = [accuracy(wk, ts) for wk, ts in zip(models, client_test_sets)]

    return FederationResult(
        logs, None, models, trajectory, final_loss, final_acc, client_acc, cfg.mu, cfg.L
    )
