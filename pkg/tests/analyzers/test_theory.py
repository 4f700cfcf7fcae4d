import numpy as np
import pytest
from fedalign.dataset import LabeledDataset, concatenate
from fedalign.datagen import SynthParams, synth_generate, synth_models, mixture_sample
from fedalign.models import Objective
from fedalign.federation import (
    ClientSpec,
    EpsilonSchedule,
    FederationConfig,
    ParticipationMode,
    RoundLog,
    make_clients,
    run_federation,
)
from fedalign.analyzers import (
    DiagnosticError,
    OracleSolution,
    WeightedObjective,
    minimize,
    solve_oracles,
    estimate_noise,
    gamma_lr,
    compute_gamma,
    theta_T,
    rho_T,
    theorem_constants,
    bound,
    compute_diagnostics,
    average_diagnostics,
)
from fedalign.error import InputError
from fedalign.utils import make_rng

DS = LabeledDataset(np.zeros((2, 2)), [0, 1], 2)


class Quadratic:
    def __init__(self, c):
        self.c = np.atleast_1d(np.asarray(c, dtype=float))

    def initial_point(self):
        return np.zeros(len(self.c))

    def loss(self, w):
        return float(np.sum((w - self.c) ** 2))

    def grad(self, w):
        return 2.0 * (w - self.c)


class Constant:
    def __init__(self, value):
        self.value = value

    def loss(self, w):
        return self.value


def spec_clients(p, flags):
    return [ClientSpec(k, DS, f, pk) for k, (pk, f) in enumerate(zip(p, flags))]


def make_logs(indicator_rows, E):
    n = len(indicator_rows[0])
    return [
        RoundLog(r, r * E, 0.0, np.zeros(n), ind, ind, 0.0, 0.0, 0.0)
        for r, ind in enumerate(indicator_rows)
    ]


def test_gamma_lr():
    assert gamma_lr(1.0, 1.0, 5) == 8.0
    assert gamma_lr(1.0, 1.0, 16) == 16.0


def test_theorem_constants():
    C1, C2, C1p = theorem_constants(1.0, 1.0, 2, 1.0, 1.0, np.zeros(3), np.zeros(3))
    assert C1 == pytest.approx(18.0)
    assert C2 == pytest.approx(12.0)
    assert C1p is None

    _, C2, _ = theorem_constants(2.0, 3.0, 1, 0.0, 0.0, np.zeros(1), np.zeros(1))
    assert C2 == pytest.approx(27.0)

    C1, _, _ = theorem_constants(0.5, 2.0, 1, 0.3, 7.0, np.ones(2), np.ones(2))
    assert C1 == pytest.approx(2 * 2.0 * 0.3 / 0.25)

    C1, _, _ = theorem_constants(1.0, 1.0, 1, 0.0, 0.0, np.zeros(2), np.ones(2))
    assert C1 == pytest.approx(4.0 * 2)

    C1, _, C1p = theorem_constants(1.0, 2.0, 3, 1.0, 0.5, np.zeros(1), np.zeros(1), K=4)
    assert C1p - C1 == pytest.approx(2 * 2.0 * 8 * 9 * 0.5 / 4)

    with pytest.raises(InputError):
        theorem_constants(0.0, 1.0, 1, 0.0, 0.0, np.zeros(1), np.zeros(1))
    with pytest.raises(InputError):
        theorem_constants(1.0, 1.0, 1, 0.0, 0.0, np.zeros(1), np.zeros(1), K=0)


def test_bound():
    assert bound(10, 8.0, 18.0, 12.0, 1.0, 0.5, 0.0) == pytest.approx((18.0 + 6.0) / 18)
    assert bound(10, 8.0, 18.0, 12.0, 0.3, 0.0, 0.0) == pytest.approx(1.0)
    assert bound(10, 8.0, 18.0, 12.0, 0.5, 1.0, 0.25) == pytest.approx(24.0 / 18 + 0.25)
    values = [bound(T, 8.0, 18.0, 12.0, 0.5, 1.0, 0.1) for T in range(1, 50)]
    assert np.all(np.diff(values) < 0)


def test_theta_T():
    clients = spec_clients([0.5, 0.5, 0.6, 0.4], [True, True, False, False])
    E = 2
    T = 10
    g = 8.0

    none = make_logs([[True, True, False, False]] * 5, E)
    assert theta_T(none, clients, T, g) == pytest.approx((T - 1) / (T + g - 2), rel=1e-14)

    every = make_logs([[True, True, True, True]] * 5, E)
    assert theta_T(every, clients, T, g) == pytest.approx((T - 1) / (2 * (T + g - 2)))

    rng = np.random.default_rng(0)
    rows = [[True, True] + list(rng.random(2) < 0.5) for _ in range(5)]
    mixed = make_logs(rows, E)
    expected = 0.0
    for i in range(1, T):
        r = i // E
        s = 0.6 * rows[r][2] + 0.4 * rows[r][3]
        expected += 1.0 / (1.0 + s)
    expected /= T + g - 2
    assert theta_T(mixed, clients, T, g) == pytest.approx(expected, rel=1e-14)
    assert theta_T(mixed, clients, T, g, E=E) == pytest.approx(expected, rel=1e-14)
    assert 0 <= expected <= 1

    # expectation over runs
    avg = theta_T([none, every], clients, T, g)
    assert avg == pytest.approx((T - 1) * 0.75 / (T + g - 2))


def test_theta_T_errors():
    clients = spec_clients([1.0, 0.5], [True, False])
    logs = make_logs([[True, False]] * 3, 2)
    with pytest.raises(InputError):
        theta_T(logs, clients, 8, 8.0)
    with pytest.raises(InputError):
        theta_T(logs, clients, 5, 8.0)
    with pytest.raises(InputError):
        theta_T([], clients, 2, 8.0)
    with pytest.raises(InputError):
        theta_T(logs[:1], clients, 2, 8.0)
    assert theta_T(logs[:1], clients, 2, 8.0, E=2) == pytest.approx(1.0 / 8.0)


def test_rho_T():
    clients = spec_clients([1.0, 0.5], [True, False])
    E = 5
    T = 20
    L, mu = 2.0, 0.5
    g = gamma_lr(mu, L, E)

    none = make_logs([[True, False]] * 4, E)
    assert rho_T(none, [0.0, 0.1], clients, T, L, mu, g) == 0.0

    every = make_logs([[True, True]] * 4, E)
    assert rho_T(every, [0.0, 0.0], clients, T, L, mu, g) == 0.0
    expected = 2 * L / (mu * (T + g - 2)) * (T - 1) * (0.05 / 1.5)
    assert rho_T(every, [0.0, 0.1], clients, T, L, mu, g) == pytest.approx(expected)

    with pytest.raises(InputError):
        rho_T(every, [0.1], clients, T, L, mu, g)


def test_compute_gamma_quadratics():
    clients = spec_clients([0.5, 0.5], [True, True])
    objectives = [Quadratic(1.0), Quadratic(-1.0)]
    glob = minimize(WeightedObjective(objectives, [0.5, 0.5]))
    local = [minimize(obj) for obj in objectives]
    gamma, gamma_k = compute_gamma(glob, local, objectives, clients)
    assert gamma == pytest.approx(1.0, abs=1e-8)
    assert gamma_k == pytest.approx([1.0, 1.0], abs=1e-8)


def test_compute_gamma_clamp():
    clients = spec_clients([0.5, 0.5], [True, True])
    objectives = [Constant(1.0), Constant(1.0)]
    local = [OracleSolution(np.zeros(1), 1.0, 0.0, 0)] * 2

    glob = OracleSolution(np.zeros(1), 1.0 - 5e-8, 0.0, 0)
    gamma, gamma_k = compute_gamma(glob, local, objectives, clients, tol=1e-8)
    assert gamma == 0.0
    assert gamma_k == [0.0, 0.0]

    glob = OracleSolution(np.zeros(1), 0.9, 0.0, 0)
    with pytest.raises(DiagnosticError):
        compute_gamma(glob, local, objectives, clients, tol=1e-8)
    with pytest.raises(InputError):
        compute_gamma(glob, local[:1], objectives, clients)


def random_dataset(n, seed, d=4, C=3):
    rng = np.random.default_rng(seed)
    return LabeledDataset(rng.standard_normal((n, d)) + seed, rng.integers(0, C, n), C)


def test_compute_gamma_logistic():
    shared = random_dataset(40, 0)
    clients = make_clients([shared] * 3, [True, True, False])
    objectives = [Objective(c.dataset, 0.1) for c in clients]
    glob, local = solve_oracles(clients, 0.1)
    gamma, gamma_k = compute_gamma(glob, local, objectives, clients)
    assert gamma == pytest.approx(0.0, abs=1e-10)
    assert gamma_k == pytest.approx([0.0] * 3, abs=1e-10)

    a, b = random_dataset(30, 1), random_dataset(50, 2)
    clients = make_clients([a, b, concatenate([a, b])], [True, True, False])
    objectives = [Objective(c.dataset, 0.1) for c in clients]
    glob, local = solve_oracles(clients, 0.1)
    gamma, gamma_k = compute_gamma(glob, local, objectives, clients)
    assert gamma > 0
    assert gamma_k[2] == pytest.approx(0.0, abs=1e-10)
    assert gamma_k[0] > 0 and gamma_k[1] > 0


def make_federation(seed=0):
    p = SynthParams(1.0, 1.0, d=4, C=3, samples_per_client=40, n_clients=5, seed=seed)
    clients = make_clients(synth_generate(p), [True, True, False, False, False])
    test_set = mixture_sample(synth_models(p)[:2], [1.0, 1.0], 100, make_rng(seed, 2, 0))
    return clients, test_set


def diagnose(results, clients, E, batch_size, K=None, mu=None, L=None, lr_schedule="theorem"):
    reg = 0.1
    objectives = [Objective(c.dataset, reg) for c in clients]
    glob, local = solve_oracles(clients, reg)
    points = [w for res in results for w in res.trajectory[::3]]
    sigma_sq, G_sq = estimate_noise(
        clients, points, batch_size, 30, np.random.default_rng(0), reg
    )
    return compute_diagnostics(
        results, clients, glob, local, objectives, E,
        results[0].mu if mu is None else mu, results[0].L if L is None else L,
        sigma_sq, G_sq, K=K, lr_schedule=lr_schedule,
    )


def test_bound_holds():
    clients, test_set = make_federation()
    E = 2
    cfg = FederationConfig(
        "FedALIGN", E=E, rounds=8, batch_size=5, reg_lambda=0.1,
        epsilon_schedule=EpsilonSchedule("constant", 0.2),
    )
    results = [run_federation(clients, cfg.replace(seed=s), test_set) for s in range(5)]

    diag = diagnose(results, clients, E, 5)
    assert diag.violations == 0
    assert len(diag.bound_trace) == 8
    assert diag.T == 16
    assert 0 < diag.theta_T <= 1
    assert diag.rho_T >= 0
    assert diag.gamma >= 0
    assert diag.bound_unit >= diag.bound_value
    assert diag.gamma_lr == gamma_lr(results[0].mu, results[0].L, E)
    assert 0 < diag.curvature <= diag.L
    d = diag.to_dict()
    assert d["expectation"] == "mean-of-5-runs"
    assert d["violations"] == 0

    for res in results:
        single = diagnose([res], clients, E, 5)
        assert single.violations == 0
        assert single.to_dict()["expectation"] == "single-run"


def test_bound_epsilon_zero():
    clients, test_set = make_federation(seed=1)
    cfg = FederationConfig("FedALIGN", E=2, rounds=4, batch_size=5, reg_lambda=0.1)
    diag = diagnose([run_federation(clients, cfg, test_set)], clients, 2, 5)
    assert diag.rho_T == 0.0
    assert diag.theta_T == pytest.approx(7.0 / (8 + diag.gamma_lr - 2))
    assert diag.violations == 0


def test_partial_participation_constants():
    clients, test_set = make_federation(seed=2)
    cfg = FederationConfig(
        "FedAvgPriority", E=2, rounds=4, batch_size=5, reg_lambda=0.1,
        participation=ParticipationMode(priority_K=1),
    )
    diag = diagnose([run_federation(clients, cfg, test_set)], clients, 2, 5, K=1)
    assert diag.C1_prime > diag.C1
    assert diag.violations == 0


def test_average_diagnostics():
    E = 2
    cfg = FederationConfig(
        "FedALIGN", E=E, rounds=6, batch_size=5, reg_lambda=0.1,
        epsilon_schedule=EpsilonSchedule("constant", 0.2),
    )
    per_seed = []
    for seed in range(3):
        clients, test_set = make_federation(seed=seed)
        res = run_federation(clients, cfg.replace(seed=seed), test_set)
        per_seed.append(diagnose([res], clients, E, 5))

    avg = average_diagnostics(per_seed)
    assert avg.n_runs == 3
    assert avg.to_dict()["expectation"] == "mean-of-3-runs"
    assert avg.theta_T == pytest.approx(np.mean([d.theta_T for d in per_seed]))
    assert avg.rho_T == pytest.approx(np.mean([d.rho_T for d in per_seed]))
    assert avg.gamma == pytest.approx(np.mean([d.gamma for d in per_seed]))
    assert avg.T == 12
    for i, entry in enumerate(avg.bound_trace):
        assert entry["gap"] == pytest.approx(np.mean([d.bound_trace[i]["gap"] for d in per_seed]))
        assert entry["bound"] == pytest.approx(
            np.mean([d.bound_trace[i]["bound"] for d in per_seed])
        )
    assert avg.violations == 0

    short = cfg.replace(rounds=3)
    clients, test_set = make_federation(seed=0)
    other = diagnose([run_federation(clients, short, test_set)], clients, E, 5)
    with pytest.raises(DiagnosticError):
        average_diagnostics([per_seed[0], other])
    with pytest.raises(InputError):
        average_diagnostics([])


def test_constant_schedule_not_checked():
    clients, test_set = make_federation(seed=3)
    cfg = FederationConfig(
        "FedALIGN", E=2, rounds=4, batch_size=5, reg_lambda=0.1, lr_schedule="constant",
        eta=0.05, epsilon_schedule=EpsilonSchedule("constant", 0.2),
    )
    result = run_federation(clients, cfg, test_set)
    assert result.mu is None and result.L is None

    L = max(Objective(c.dataset, 0.1).estimate_L() for c in clients)
    diag = diagnose([result], clients, 2, 5, mu=0.1, L=L, lr_schedule="constant")
    assert not diag.bound_applies
    assert diag.violations is None
    assert all(e["violated"] is None for e in diag.bound_trace)
    d = diag.to_dict()
    assert d["lr_schedule"] == "constant"
    assert d["bound_applies"] is False
    assert d["violations"] is None
    assert 0 < diag.theta_T <= 1


def test_local_only_rejected():
    clients, test_set = make_federation()
    cfg = FederationConfig("LocalOnly", E=2, rounds=2, batch_size=5, reg_lambda=0.1)
    result = run_federation(clients, cfg, test_set)
    with pytest.raises(DiagnosticError):
        compute_diagnostics(result, clients, None, None, None, 2, 0.1, 1.0, 0.0, 0.0)


if __name__ == "__main__":
    test_theorem_constants()
    test_theta_T()
    test_rho_T()
    test_bound_holds()
    test_average_diagnostics()
