import csv
import json
import logging
import os
import numpy as np
from .. import __version__
from .config import ConfigError
from ..analyzers import (
    solve_oracles,
    estimate_noise,
    compute_diagnostics,
    average_diagnostics,
)
from ..datagen import (
    SynthParams,
    synth_models,
    mixture_sample,
    apply_noise,
    shard_partition,
)
from ..datagen.synthetic import TRAIN_STREAM, TEST_STREAM
from ..dataset import read_dataset
from ..federation import make_clients, run_federation
from ..federation.engine import resolve_constants
from ..models import Objective
from ..log import log_entry
from ..parallel import parmap
from ..utils import make_rng

logger = logging.getLogger(__name__)

SPLIT_STREAM = 4
SHARD_STREAM = 5
DIAGNOSTIC_STREAM = 20

ROUND_COLUMNS = [
    "round",
    "t_start",
    "epsilon",
    "eta",
    "global_loss",
    "test_accuracy",
    "n_nonpriority_included",
]


class FederationData:
    r"""Clients and test sets of one seed.

    Attributes
    ----------
    clients: list of ClientSpec
        Priority clients first.

    test_set: LabeledDataset
        Global test set drawn from the priority distribution.

    client_test_sets: list of LabeledDataset or None
    """

    def __init__(self, clients, test_set, client_test_sets=None):
        self.clients = clients
        self.test_set = test_set
        self.client_test_sets = client_test_sets


class ExperimentSummary:
    r"""Records of every (algorithm, seed) run of an experiment.

    Attributes
    ----------
    version: str
        Version of the package that produced the summary.

    complete: bool
        ``False`` if the experiment stopped on an error.

    error: str or None

    config: dict
        Echo of the configuration.

    records: list of dict
        One per (algorithm, seed), in (seed, algorithm) order.

    seed_diagnostics: dict
        Diagnostics of every algorithm label averaged over the seeds, see
        :func:`~fedalign.analyzers.average_diagnostics`. Empty without diagnostics.
    """

    def __init__(self, version, complete, config, records, error=None,
                 seed_diagnostics=None):
        self.version = version
        self.complete = complete
        self.config = config
        self.records = records
        self.error = error
        self.seed_diagnostics = {} if seed_diagnostics is None else seed_diagnostics

    def to_dict(self):
        return {
            "version": self.version,
            "complete": self.complete,
            "error": self.error,
            "config": self.config,
            "records": self.records,
            "seed_diagnostics": self.seed_diagnostics,
        }

    def write(self, path):
        with open(path, "w") as fout:
            json.dump(self.to_dict(), fout, indent=2, sort_keys=True)
            fout.write("\n")

    @classmethod
    def read(cls, path):
        try:
            with open(path, "r") as fin:
                d = json.load(fin)
            return cls(
                d["version"],
                d["complete"],
                d["config"],
                d["records"],
                d.get("error"),
                d.get("seed_diagnostics"),
            )
        except (OSError, ValueError, KeyError) as e:
            raise ConfigError('Cannot read summary "{}": {}'.format(path, e))


def build_data(cfg, seed):
    r"""Build the clients and test sets of ``cfg`` for ``seed``.

    For ``synth`` sources the priority clients receive noiseless Synth(alpha, beta) data.
    Non-priority clients sample the pooled priority generators (``mixture``) or their own
    generator (``synth``) and then get the label flips and irrelevant rows of the noise
    profile. For ``csv`` sources a random ``test_fraction`` of the rows is held out and the
    rest is dealt out in label-sorted shards; the first ``n_priority`` clients are the
    priority ones.

    Return
    ------
    FederationData
    """
    data = cfg.data
    if data["source"] == "csv":
        return _build_csv_data(cfg, seed)

    n_clients = cfg.n_clients
    n_priority = cfg.n_priority
    n_samples = data["samples_per_client"]
    params = SynthParams(
        data["alpha"],
        data["beta"],
        data["d"],
        data["C"],
        n_samples,
        n_clients,
        seed,
        data["iid"],
    )
    generators = synth_models(params)
    priority_gen = generators[:n_priority]
    uniform = [1.0] * n_priority

    def draw(k, n, rng):
        if k < n_priority or data["nonpriority_source"] == "synth":
            return generators[k].sample(n, rng)
        return mixture_sample(priority_gen, uniform, n, rng)

    datasets = [
        draw(k, n_samples, make_rng(seed, TRAIN_STREAM, k)) for k in range(n_clients)
    ]
    if n_clients > n_priority:
        datasets[n_priority:] = apply_noise(datasets[n_priority:], data["noise"], seed, 0)

    test_set = mixture_sample(
        priority_gen, uniform, data["test_samples"], make_rng(seed, TEST_STREAM, 0)
    )
    client_test_sets = None
    if data["client_test_samples"] > 0:
        client_test_sets = [
            draw(k, data["client_test_samples"], make_rng(seed, TEST_STREAM, 1, k))
            for k in range(n_clients)
        ]
        if n_clients > n_priority:
            client_test_sets[n_priority:] = apply_noise(
                client_test_sets[n_priority:], data["noise"], seed, 1
            )

    flags = [k < n_priority for k in range(n_clients)]
    return FederationData(make_clients(datasets, flags), test_set, client_test_sets)


def _build_csv_data(cfg, seed):
    data = cfg.data
    ds = read_dataset(data["path"])
    n = ds.get_num_samples()
    order = make_rng(seed, SPLIT_STREAM).permutation(n)
    n_test = int(np.floor(data["test_fraction"] * n))
    if n_test < 1 or n_test >= n:
        raise ConfigError(
            "data.test_fraction: {} of {} rows leaves an empty split.".format(
                data["test_fraction"], n
            )
        )
    test_set = ds.subset(np.sort(order[:n_test]))
    train = order[n_test:]
    # equal shards need the training size to be a multiple of n_shards
    n_train = (len(train) // data["n_shards"]) * data["n_shards"]
    if n_train == 0:
        raise ConfigError(
            "data.n_shards: {} shards for {} training rows.".format(data["n_shards"], len(train))
        )
    if n_train < len(train):
        logger.debug("Dropped {} rows to cut equal shards.".format(len(train) - n_train))
    train_set = ds.subset(np.sort(train[:n_train]))
    datasets = shard_partition(
        train_set, data["n_shards"], data["shards_per_client"], make_rng(seed, SHARD_STREAM)
    )
    flags = [k < cfg.n_priority for k in range(len(datasets))]
    return FederationData(make_clients(datasets, flags), test_set)


def rounds_to_target(result, target):
    r"""Rounds completed before the global model first reaches ``F <= target``.

    Round ``r``'s log holds ``F`` at the model obtained after ``r`` rounds; the final
    model counts as ``len(logs)`` rounds. ``None`` if the target is never reached.
    """
    if target is None:
        return None
    for log in result.logs:
        if log.global_loss <= target:
            return log.round
    if result.final_loss <= target:
        return len(result.logs)
    return None


def write_round_log(path, result, clients):
    r"""Write the per-round CSV: fixed columns, then ``included_k`` and ``loss_k`` of
    every client in id order."""
    header = list(ROUND_COLUMNS)
    for c in clients:
        header += ["included_{}".format(c.id), "loss_{}".format(c.id)]
    with open(path, "w", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(header)
        for log in result.logs:
            row = [
                log.round,
                log.t_start,
                repr(float(log.epsilon)),
                repr(float(log.eta)),
                repr(float(log.global_loss)),
                repr(float(log.test_accuracy)),
                log.n_nonpriority_included(clients),
            ]
            for c in clients:
                row += [int(log.indicators[c.id]), repr(float(log.per_client_loss[c.id]))]
            writer.writerow(row)


def _run_job(job, cfg, data_by_seed):
    seed, spec = job
    data = data_by_seed[seed]
    fc = cfg.federation_config(spec, seed)
    return run_federation(data.clients, fc, data.test_set, data.client_test_sets)


def _diagnose(cfg, spec, seed, data, result, oracle):
    fc = cfg.federation_config(spec, seed)
    if fc.lr_schedule == "theorem":
        mu, L = result.mu, result.L
    else:
        # reference constants of the theorem schedule; the bound is not checked
        ref = resolve_constants(data.clients, fc.replace(lr_schedule="theorem"))
        mu, L = ref.mu, ref.L
    diag = cfg.diagnostics
    rounds = len(result.logs)
    n_points = min(diag["noise_points"], rounds + 1)
    picks = np.unique(np.linspace(0, rounds, n_points).round().astype(int))
    w_samples = [result.trajectory[i] for i in picks]
    sigma_sq, G_sq = estimate_noise(
        data.clients,
        w_samples,
        fc.batch_size,
        diag["noise_draws"],
        make_rng(seed, DIAGNOSTIC_STREAM),
        fc.reg_lambda,
    )
    global_solution, client_solutions = oracle
    objectives = [Objective(c.dataset, fc.reg_lambda) for c in data.clients]
    return compute_diagnostics(
        result,
        data.clients,
        global_solution,
        client_solutions,
        objectives,
        fc.E,
        mu,
        L,
        sigma_sq,
        G_sq,
        K=fc.participation.priority_K,
        tol=diag["oracle_tol"],
        lr_schedule=fc.lr_schedule,
    )


def _record(cfg, spec, seed, data, result, csv_name, oracle):
    target = cfg.target_loss
    if target is None and oracle is not None:
        target = 1.05 * oracle[0].f_star

    included = [log.n_nonpriority_included(data.clients) for log in result.logs]
    record = {
        "algorithm": spec.name.value,
        "label": spec.label,
        "seed": seed,
        "final_loss": result.final_loss,
        "final_accuracy": result.final_accuracy,
        "target_loss": target,
        "rounds_to_target": rounds_to_target(result, target),
        "mean_nonpriority_included": float(np.mean(included)),
        "round_log": csv_name,
        "client_accuracy": result.client_accuracy,
        "nonpriority_client_accuracy": None,
        "diagnostics": None,
    }
    if result.client_accuracy is not None:
        values = [
            a for a, c in zip(result.client_accuracy, data.clients) if not c.is_priority
        ]
        if values:
            record["nonpriority_client_accuracy"] = float(np.mean(values))
    diag = None
    if oracle is not None:
        record["oracle"] = {
            "global": oracle[0].to_dict(),
            "clients": [s.to_dict() for s in oracle[1]],
        }
        if result.final_model is not None:
            diag = _diagnose(cfg, spec, seed, data, result, oracle)
            record["diagnostics"] = diag.to_dict()
    return record, diag


def _seed_average(cfg, per_label):
    averaged = {}
    for spec in cfg.algorithms:
        diags = per_label.get(spec.label, [])
        if diags:
            averaged[spec.label] = average_diagnostics(
                diags, tol=cfg.diagnostics["oracle_tol"]
            ).to_dict()
    return averaged


def run_experiment(cfg):
    r"""Run every (algorithm, seed) pair of ``cfg`` and write the outputs.

    For each seed the data is built once (and the oracles solved once when diagnostics
    are enabled); the runs of the seed then execute, in parallel with ``cfg.nprocs``
    processes. ``rounds_<label>_seed<seed>.csv`` is written for every run and
    ``summary.json`` at the end, also when an error stops the experiment (with
    ``"complete": false``) before the error is re-raised.

    With diagnostics enabled, the per-seed diagnostics of every algorithm label are also
    averaged into ``seed_diagnostics`` of the summary.

    Parameters
    ----------
    cfg: ExperimentConfig

    Return
    ------
    ExperimentSummary
    """
    os.makedirs(cfg.output_dir, exist_ok=True)
    log_entry(
        logger,
        'Experiment "{}": {} algorithms x {} seeds, output in "{}".'.format(
            cfg.name, len(cfg.algorithms), len(cfg.seeds), cfg.output_dir
        ),
        level="info",
    )

    summary = ExperimentSummary(__version__, False, cfg.to_dict(), [])
    summary_path = os.path.join(cfg.output_dir, "summary.json")
    per_label = {}
    try:
        for seed in cfg.seeds:
            data = build_data(cfg, seed)
            oracle = None
            if cfg.diagnostics_enabled:
                oracle = solve_oracles(
                    data.clients,
                    cfg.federation["reg_lambda"],
                    tol=cfg.diagnostics["oracle_tol"],
                    max_iter=cfg.diagnostics["oracle_max_iter"],
                    nprocs=cfg.nprocs,
                )

            jobs = [(seed, spec) for spec in cfg.algorithms]
            results = parmap(_run_job, jobs, cfg, {seed: data}, nprocs=cfg.nprocs)

            for spec, result in zip(cfg.algorithms, results):
                csv_name = "rounds_{}_seed{}.csv".format(spec.label, seed)
                write_round_log(os.path.join(cfg.output_dir, csv_name), result, data.clients)
                record, diag = _record(cfg, spec, seed, data, result, csv_name, oracle)
                summary.records.append(record)
                if diag is not None:
                    per_label.setdefault(spec.label, []).append(diag)
                log_entry(
                    logger,
                    "  {} seed {}: final loss {:.6f}, test accuracy {:.4f}.".format(
                        spec.label, seed, result.final_loss, result.final_accuracy
                    ),
                    level="info",
                )
        summary.seed_diagnostics = _seed_average(cfg, per_label)
        summary.complete = True
    except Exception as e:
        summary.error = "{}: {}".format(type(e).__name__, e)
        logger.error("Experiment stopped: %s", summary.error)
        raise
    finally:
        summary.write(summary_path)
        log_entry(logger, 'Summary written to "{}".'.format(summary_path), level="info")

    return summary
