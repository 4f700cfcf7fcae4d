import copy
import logging
from enum import Enum
import numpy as np
from ..error import InputError, ConfigurationError, SupportError

logger = logging.getLogger(__name__)


class Algorithm(Enum):
    r"""Training algorithms.

    ``*Priority`` aggregate only priority clients, ``*All`` aggregate every client, and
    ``*ALIGN`` add non-priority clients whose loss matches the global loss within
    ``epsilon``. ``FedProx*`` add a proximal term to every local step. ``LocalOnly``
    trains each client on its own data without any aggregation.
    """

    FedAvgPriority = "FedAvgPriority"
    FedAvgAll = "FedAvgAll"
    FedALIGN = "FedALIGN"
    FedProxPriority = "FedProxPriority"
    FedProxAll = "FedProxAll"
    FedProxALIGN = "FedProxALIGN"
    LocalOnly = "LocalOnly"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(name)
        except ValueError:
            raise SupportError(
                'Algorithm "{}" not supported; valid ones are: {}.'.format(
                    name, ", ".join(cls.names())
                )
            )

    @classmethod
    def names(cls):
        return [a.value for a in cls]

    @property
    def is_prox(self):
        return self.value.startswith("FedProx")

    @property
    def selection(self):
        r"""One of ``priority``, ``all``, ``align`` or ``local``."""
        if self is Algorithm.LocalOnly:
            return "local"
        if self.value.endswith("ALIGN"):
            return "align"
        if self.value.endswith("All"):
            return "all"
        return "priority"


class EpsilonSchedule:
    r"""Threshold ``epsilon_t`` of the loss-matching rule.

    Parameters
    ----------
    kind: str
        ``constant``: ``eps0``.
        ``linear``: linear interpolation from ``eps0`` at ``t = 0`` to ``eps_end`` at
        ``t = horizon``, constant afterwards.
        ``step``: ``eps0 * factor ** (t // step)``.

    eps0: float
        Initial threshold, >= 0.

    eps_end: float
        Final threshold of ``linear``, >= 0.

    horizon: int
        Local iterations over which ``linear`` decays.

    factor: float
        Multiplicative decay of ``step``, in [0, 1].

    step: int
        Local iterations between two decays of ``step``.
    """

    kinds = ["constant", "linear", "step"]

    def __init__(self, kind="constant", eps0=0.0, eps_end=0.0, horizon=None, factor=0.5,
                 step=None):
        if kind not in self.kinds:
            raise SupportError(
                'Epsilon schedule "{}" not supported; valid ones are: {}.'.format(
                    kind, ", ".join(self.kinds)
                )
            )
        if eps0 < 0 or eps_end < 0:
            raise ConfigurationError("Epsilon values should be >= 0.")
        if kind == "linear" and (horizon is None or horizon <= 0):
            raise ConfigurationError('"linear" epsilon schedule needs horizon > 0.')
        if kind == "step":
            if step is None or step < 1:
                raise ConfigurationError('"step" epsilon schedule needs step >= 1.')
            if not 0 <= factor <= 1:
                raise ConfigurationError('"step" epsilon factor should be in [0, 1].')

        self.kind = kind
        self.eps0 = float(eps0)
        self.eps_end = float(eps_end)
        self.horizon = horizon
        self.factor = float(factor)
        self.step = step

    def value(self, t):
        r"""Threshold at local iteration ``t``."""
        if self.kind == "constant":
            return self.eps0
        elif self.kind == "linear":
            frac = min(float(t) / self.horizon, 1.0)
            return self.eps0 + (self.eps_end - self.eps0) * frac
        else:
            return self.eps0 * self.factor ** (t // self.step)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(**d)

    def to_dict(self):
        d = {"kind": self.kind, "eps0": self.eps0}
        if self.kind == "linear":
            d.update({"eps_end": self.eps_end, "horizon": self.horizon})
        elif self.kind == "step":
            d.update({"factor": self.factor, "step": self.step})
        return d


class ParticipationMode:
    r"""Which clients take part in a round.

    Parameters
    ----------
    priority_K: int (optional)
        If given, ``K`` priority clients are sampled with replacement with probabilities
        ``p_k`` every round; otherwise all priority clients participate.

    nonpriority_p: float (optional)
        If given, each non-priority client is available in a round independently with
        probability ``p``; otherwise all of them are available.
    """

    def __init__(self, priority_K=None, nonpriority_p=None):
        if priority_K is not None and priority_K < 1:
            raise ConfigurationError("priority_K should be >= 1, got {}.".format(priority_K))
        if nonpriority_p is not None and not 0 <= nonpriority_p <= 1:
            raise ConfigurationError(
                "nonpriority_p should be in [0, 1], got {}.".format(nonpriority_p)
            )
        self.priority_K = None if priority_K is None else int(priority_K)
        self.nonpriority_p = None if nonpriority_p is None else float(nonpriority_p)

    @classmethod
    def from_fraction(cls, fraction, n_priority):
        r"""``K = round(fraction * n_priority)`` (at least 1) and ``p = fraction``."""
        if not 0 < fraction <= 1:
            raise ConfigurationError(
                "Participation fraction should be in (0, 1], got {}.".format(fraction)
            )
        K = max(1, int(np.floor(fraction * n_priority + 0.5)))
        return cls(priority_K=K, nonpriority_p=fraction)

    @property
    def kind(self):
        if self.priority_K is None and self.nonpriority_p is None:
            return "full"
        parts = []
        if self.priority_K is not None:
            parts.append("partial_priority")
        if self.nonpriority_p is not None:
            parts.append("bernoulli_nonpriority")
        return "+".join(parts)

    def to_dict(self):
        return {"priority_K": self.priority_K, "nonpriority_p": self.nonpriority_p}


class FederationConfig:
    r"""Description of one federated training run.

    Parameters
    ----------
    algorithm: str or Algorithm

    E: int
        Local SGD steps per communication round.

    rounds: int
        Number of communication rounds (``T / E``).

    batch_size: int (optional)
        Minibatch size of the local steps. ``None`` or a value >= a client's sample
        count uses that client's full dataset.

    lr_schedule: str
        ``theorem``: ``eta_t = 2 / (mu (t + gamma))`` with ``gamma = max(8 L / mu, E)``;
        ``constant``: ``eta_t = eta``.

    eta: float (optional)
        Step size of the ``constant`` schedule.

    mu: float (optional)
        Strong-convexity constant of the ``theorem`` schedule; ``reg_lambda`` if ``None``.

    L: float (optional)
        Smoothness constant of the ``theorem`` schedule; estimated from the clients' data
        if ``None``.

    reg_lambda: float
        L2 coefficient of every client objective.

    epsilon_schedule: EpsilonSchedule (optional)
        Threshold of the ``*ALIGN`` algorithms; constant zero if ``None``.

    participation: ParticipationMode (optional)
        Full participation if ``None``.

    prox_mu: float
        Weight of the proximal term of the ``FedProx*`` algorithms.

    seed: int
        Seed of every random draw of the run.

    w0: 1D array (optional)
        Initial global model; the zero vector if ``None``.

    indicator_point: str
        ``broadcast``: the inclusion rule compares losses at the broadcast model;
        ``local``: at the client's trained model.
    """

    lr_schedules = ["theorem", "constant"]
    indicator_points = ["broadcast", "local"]

    def __init__(
        self,
        algorithm,
        E=5,
        rounds=50,
        batch_size=None,
        lr_schedule="theorem",
        eta=None,
        mu=None,
        L=None,
        reg_lambda=0.0,
        epsilon_schedule=None,
        participation=None,
        prox_mu=0.0,
        seed=0,
        w0=None,
        indicator_point="broadcast",
    ):
        self.algorithm = Algorithm.parse(algorithm)
        self.E = int(E)
        self.rounds = int(rounds)
        self.batch_size = None if batch_size is None else int(batch_size)
        self.lr_schedule = lr_schedule
        self.eta = eta
        self.mu = mu
        self.L = L
        self.reg_lambda = float(reg_lambda)
        self.epsilon_schedule = (
            EpsilonSchedule() if epsilon_schedule is None else epsilon_schedule
        )
        self.participation = (
            ParticipationMode() if participation is None else participation
        )
        self.prox_mu = float(prox_mu)
        self.seed = int(seed)
        self.w0 = None if w0 is None else np.array(w0, dtype=np.float64)
        self.indicator_point = indicator_point
        self.check()

    def check(self):
        errors = []
        if self.E < 1:
            errors.append("E should be >= 1, got {}.".format(self.E))
        if self.rounds < 1:
            errors.append("rounds should be >= 1, got {}.".format(self.rounds))
        if self.batch_size is not None and self.batch_size < 1:
            errors.append("batch_size should be >= 1, got {}.".format(self.batch_size))
        if self.reg_lambda < 0:
            errors.append("reg_lambda should be >= 0, got {}.".format(self.reg_lambda))
        if self.prox_mu < 0:
            errors.append("prox_mu should be >= 0, got {}.".format(self.prox_mu))
        if self.seed < 0:
            errors.append("seed should be >= 0, got {}.".format(self.seed))
        if self.lr_schedule not in self.lr_schedules:
            errors.append(
                'lr_schedule "{}" not supported; valid ones are: {}.'.format(
                    self.lr_schedule, ", ".join(self.lr_schedules)
                )
            )
        elif self.lr_schedule == "theorem":
            mu = self.reg_lambda if self.mu is None else self.mu
            if mu <= 0:
                errors.append(
                    'The "theorem" lr_schedule needs mu > 0 (mu or reg_lambda).'
                )
            if self.mu is not None and self.L is not None and self.L < self.mu:
                errors.append("L ({}) should be >= mu ({}).".format(self.L, self.mu))
        elif self.eta is None or self.eta <= 0:
            errors.append('The "constant" lr_schedule needs eta > 0.')
        if self.indicator_point not in self.indicator_points:
            errors.append(
                'indicator_point "{}" not supported; valid ones are: {}.'.format(
                    self.indicator_point, ", ".join(self.indicator_points)
                )
            )
        if errors:
            msg = " ".join(errors)
            logger.error(msg)
            raise ConfigurationError(msg)

    @property
    def total_iterations(self):
        return self.rounds * self.E

    def replace(self, **kwargs):
        r"""Return a copy with the given attributes changed."""
        new = copy.copy(self)
        for key, value in kwargs.items():
            if not hasattr(new, key):
                raise InputError('FederationConfig has no attribute "{}".'.format(key))
            setattr(new, key, value)
        if "algorithm" in kwargs:
            new.algorithm = Algorithm.parse(new.algorithm)
        new.check()
        return new

    def to_dict(self):
        return {
            "algorithm": self.algorithm.value,
            "E": self.E,
            "rounds": self.rounds,
            "batch_size": self.batch_size,
            "lr_schedule": self.lr_schedule,
            "eta": self.eta,
            "mu": self.mu,
            "L": self.L,
            "reg_lambda": self.reg_lambda,
            "epsilon": self.epsilon_schedule.to_dict(),
            "participation": self.participation.to_dict(),
            "prox_mu": self.prox_mu,
            "seed": self.seed,
            "indicator_point": self.indicator_point,
        }
