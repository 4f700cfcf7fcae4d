import json
import logging
import os
from .presets import DEFAULTS, deep_merge, get_preset, preset_names
from ..datagen import SynthParams, NoiseProfile, noise_profile_preset
from ..federation import (
    Algorithm,
    EpsilonSchedule,
    ParticipationMode,
    FederationConfig,
)
from ..error import InputError, ConfigurationError, SupportError

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    r"""Invalid experiment configuration; ``errors`` lists every problem found."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        self.msg = "Invalid configuration:\n" + "\n".join(
            "  - " + e for e in self.errors
        )
        super(ConfigError, self).__init__(self.msg)

    def __str__(self):
        return self.msg


class AlgorithmSpec:
    r"""One entry of the algorithm matrix.

    Parameters
    ----------
    name: Algorithm

    label: str
        Unique name of the entry in outputs (file names, summary records).

    epsilon_schedule: EpsilonSchedule (optional)
        Overrides the federation-level schedule.

    prox_mu: float (optional)
        Overrides the federation-level proximal weight.
    """

    def __init__(self, name, label=None, epsilon_schedule=None, prox_mu=None):
        self.name = Algorithm.parse(name)
        self.label = self.name.value if label is None else str(label)
        self.epsilon_schedule = epsilon_schedule
        self.prox_mu = prox_mu

    def to_dict(self):
        d = {"name": self.name.value, "label": self.label}
        if self.epsilon_schedule is not None:
            d["epsilon"] = self.epsilon_schedule.to_dict()
        if self.prox_mu is not None:
            d["prox_mu"] = self.prox_mu
        return d


class ExperimentConfig:
    r"""A validated experiment description.

    Attributes
    ----------
    name: str

    data: dict
        Data section; for ``synth`` sources ``noise`` is a :class:`NoiseProfile`.

    n_clients, n_priority: int

    federation: dict
        Keyword arguments shared by every :class:`FederationConfig` of the experiment.

    algorithms: list of AlgorithmSpec

    seeds: list of int

    output_dir: str

    diagnostics_enabled: bool

    diagnostics: dict
        Oracle and gradient-noise settings.

    target_loss: float or None
        Fixed target of rounds-to-target; ``1.05 F*`` when ``None`` and diagnostics are on.

    nprocs: int
    """

    def __init__(self, raw, data, n_clients, n_priority, federation, algorithms, seeds):
        self.raw = raw
        self.name = raw["name"]
        self.data = data
        self.n_clients = n_clients
        self.n_priority = n_priority
        self.federation = federation
        self.algorithms = algorithms
        self.seeds = seeds
        self.output_dir = raw["output_dir"]
        self.diagnostics = dict(raw["diagnostics"])
        self.diagnostics_enabled = bool(self.diagnostics["enabled"])
        self.target_loss = raw["target_loss"]
        self.nprocs = int(raw["nprocs"])

    def federation_config(self, spec, seed):
        r"""The :class:`FederationConfig` of algorithm entry ``spec`` and ``seed``."""
        kwargs = dict(self.federation)
        if spec.epsilon_schedule is not None:
            kwargs["epsilon_schedule"] = spec.epsilon_schedule
        if spec.prox_mu is not None:
            kwargs["prox_mu"] = spec.prox_mu
        return FederationConfig(spec.name, seed=seed, **kwargs)

    def override(self, seeds=None, output_dir=None, diagnostics=None, nprocs=None):
        r"""Apply command-line overrides in place."""
        if seeds is not None:
            self.seeds = list(seeds)
            self.raw["seeds"] = list(seeds)
        if output_dir is not None:
            self.output_dir = output_dir
            self.raw["output_dir"] = output_dir
        if diagnostics is not None:
            self.diagnostics_enabled = bool(diagnostics)
            self.diagnostics["enabled"] = bool(diagnostics)
            self.raw["diagnostics"]["enabled"] = bool(diagnostics)
        if nprocs is not None:
            self.nprocs = int(nprocs)

    def to_dict(self):
        r"""Normalized echo of the configuration (without ``nprocs`` and ``preset``, which
        do not affect results)."""
        d = {k: v for k, v in self.raw.items() if k not in ("nprocs", "preset")}
        d["algorithms"] = [a.to_dict() for a in self.algorithms]
        if isinstance(self.data.get("noise"), NoiseProfile):
            d["data"] = dict(d["data"])
            d["data"]["noise"] = self.data["noise"].to_dict()
        return d


def parse_config(path):
    r"""Read and validate a JSON experiment configuration file.

    Parameters
    ----------
    path: str

    Return
    ------
    ExperimentConfig

    Raises
    ------
    ConfigError
        With the list of all problems found.
    """
    if not os.path.isfile(path):
        raise ConfigError('Configuration file "{}" does not exist.'.format(path))
    try:
        with open(path, "r") as fin:
            doc = json.load(fin)
    except ValueError as e:
        raise ConfigError('Cannot parse "{}" as JSON: {}'.format(path, e))
    logger.info('Read configuration file "{}".'.format(path))
    return config_from_dict(doc)


def config_from_dict(doc):
    r"""Validate a configuration held in a dict, see :func:`parse_config`."""
    errors = []
    if not isinstance(doc, dict):
        raise ConfigError("The configuration should be a JSON object.")

    raw = _merge_presets(doc, errors)
    _check_keys(raw, DEFAULTS, "", errors)

    data, n_clients, n_priority = _parse_data(raw["data"], errors)
    federation = _parse_federation(raw["federation"], n_priority, errors)
    algorithms = _parse_algorithms(raw["algorithms"], errors)
    seeds = _parse_seeds(raw["seeds"], errors)

    if not isinstance(raw["name"], str) or not raw["name"]:
        errors.append("name: should be a non-empty string.")
    if not isinstance(raw["output_dir"], str) or not raw["output_dir"]:
        errors.append("output_dir: should be a non-empty string.")
    if not isinstance(raw["nprocs"], int) or raw["nprocs"] < 1:
        errors.append("nprocs: should be an integer >= 1, got {!r}.".format(raw["nprocs"]))
    target = raw["target_loss"]
    if target is not None and (not _is_number(target) or target <= 0):
        errors.append("target_loss: should be a positive number or null, got {!r}.".format(target))
    diag = raw["diagnostics"]
    if isinstance(diag, dict):
        for key in ("oracle_tol",):
            if not _is_number(diag.get(key)) or diag[key] <= 0:
                errors.append("diagnostics.{}: should be > 0.".format(key))
        for key in ("oracle_max_iter", "noise_draws", "noise_points"):
            if not isinstance(diag.get(key), int) or diag[key] < 1:
                errors.append("diagnostics.{}: should be an integer >= 1.".format(key))
        if diag.get("enabled") and federation is not None:
            if federation.get("reg_lambda", 0) <= 0:
                errors.append(
                    "diagnostics.enabled: oracle diagnostics need federation.reg_lambda > 0."
                )

    if errors:
        err = ConfigError(errors)
        logger.error(err.msg)
        raise err

    return ExperimentConfig(raw, data, n_clients, n_priority, federation, algorithms, seeds)


def _merge_presets(doc, errors):
    names = doc.get("preset", [])
    if isinstance(names, str):
        names = [names]
    merged = DEFAULTS
    for name in names:
        fragment = get_preset(name)
        if fragment is None:
            errors.append(
                'preset: unknown preset "{}"; valid ones are: {}.'.format(
                    name, ", ".join(preset_names())
                )
            )
            continue
        merged = deep_merge(merged, fragment)
    own = {k: v for k, v in doc.items() if k != "preset"}
    merged = deep_merge(merged, own)
    merged["preset"] = list(names)
    return merged


def _check_keys(section, reference, prefix, errors):
    for key, value in section.items():
        if key == "preset" and not prefix:
            continue
        path = prefix + key
        if key not in reference:
            errors.append("{}: unknown field.".format(path))
        elif isinstance(reference[key], dict) and isinstance(value, dict):
            if key in ("noise", "epsilon"):
                continue
            _check_keys(value, reference[key], path + ".", errors)


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x, low=None):
    return isinstance(x, int) and not isinstance(x, bool) and (low is None or x >= low)


def _parse_noise(noise, errors):
    try:
        if isinstance(noise, str):
            return noise_profile_preset(noise)
        if isinstance(noise, dict):
            return NoiseProfile(**noise)
        errors.append("data.noise: should be a tag (low, medium, high) or an object.")
    except (InputError, TypeError) as e:
        errors.append("data.noise: {}".format(e))
    return None


def _parse_data(data, errors):
    if not isinstance(data, dict):
        errors.append("data: should be an object.")
        return None, 0, 0

    data = dict(data)
    source = data["source"]
    n_priority = data["n_priority"]
    if not _is_int(n_priority, 1):
        errors.append("data.n_priority: should be an integer >= 1, got {!r}.".format(n_priority))
        n_priority = None

    if source == "synth":
        n_clients = data["n_clients"]
        if not _is_int(n_clients, 1):
            errors.append("data.n_clients: should be an integer >= 1, got {!r}.".format(n_clients))
            n_clients = None
        try:
            SynthParams(
                data["alpha"],
                data["beta"],
                data["d"],
                data["C"],
                data["samples_per_client"],
                n_clients or 1,
                0,
                data["iid"],
            )
        except (InputError, TypeError) as e:
            errors.append("data: {}".format(e))
        if data["nonpriority_source"] not in ("mixture", "synth"):
            errors.append(
                'data.nonpriority_source: "{}" not supported; valid ones are: mixture, '
                "synth.".format(data["nonpriority_source"])
            )
        data["noise"] = _parse_noise(data["noise"], errors)
        if not _is_int(data["test_samples"], 1):
            errors.append("data.test_samples: should be an integer >= 1.")
        if not _is_int(data["client_test_samples"], 0):
            errors.append("data.client_test_samples: should be an integer >= 0.")

    elif source == "csv":
        n_clients = None
        if not isinstance(data["path"], str):
            errors.append("data.path: a CSV file is needed for the csv source.")
        elif not os.path.isfile(data["path"]):
            errors.append('data.path: file "{}" does not exist.'.format(data["path"]))
        n_shards = data["n_shards"]
        per_client = data["shards_per_client"]
        if not _is_int(n_shards, 1) or not _is_int(per_client, 1):
            errors.append(
                "data.n_shards, data.shards_per_client: integers >= 1 are needed for the "
                "csv source."
            )
        elif n_shards % per_client != 0:
            errors.append(
                "data.n_shards ({}) should be a multiple of data.shards_per_client "
                "({}).".format(n_shards, per_client)
            )
        else:
            n_clients = n_shards // per_client
        frac = data["test_fraction"]
        if not _is_number(frac) or not 0 < frac < 1:
            errors.append("data.test_fraction: should be in (0, 1), got {!r}.".format(frac))

    else:
        errors.append(
            'data.source: "{}" not supported; valid ones are: synth, csv.'.format(source)
        )
        n_clients = None

    if n_clients is not None and n_priority is not None and n_priority > n_clients:
        errors.append(
            "data.n_priority ({}) should not exceed data.n_clients ({}).".format(
                n_priority, n_clients
            )
        )
    return data, n_clients, n_priority


def _parse_epsilon(eps, path, errors):
    try:
        if _is_number(eps):
            return EpsilonSchedule("constant", eps0=eps)
        if isinstance(eps, dict):
            return EpsilonSchedule.from_dict(eps)
        errors.append("{}: should be a number or an object.".format(path))
    except (ConfigurationError, SupportError, TypeError) as e:
        errors.append("{}: {}".format(path, e))
    return None


def _parse_participation(part, n_priority, errors):
    if not isinstance(part, dict):
        errors.append("federation.participation: should be an object.")
        return None
    try:
        fraction = part.get("fraction")
        if fraction is not None:
            if part.get("priority_K") is not None or part.get("nonpriority_p") is not None:
                errors.append(
                    "federation.participation: give either fraction or "
                    "priority_K/nonpriority_p, not both."
                )
                return None
            return ParticipationMode.from_fraction(fraction, n_priority or 1)
        mode = ParticipationMode(part.get("priority_K"), part.get("nonpriority_p"))
        if n_priority is not None and mode.priority_K is not None and mode.priority_K > n_priority:
            errors.append(
                "federation.participation.priority_K ({}) should not exceed "
                "data.n_priority ({}).".format(mode.priority_K, n_priority)
            )
        return mode
    except (ConfigurationError, TypeError) as e:
        errors.append("federation.participation: {}".format(e))
    return None


def _parse_federation(fed, n_priority, errors):
    if not isinstance(fed, dict):
        errors.append("federation: should be an object.")
        return None

    kwargs = {
        k: fed[k]
        for k in (
            "E",
            "rounds",
            "batch_size",
            "lr_schedule",
            "eta",
            "mu",
            "L",
            "reg_lambda",
            "prox_mu",
            "indicator_point",
        )
    }
    n_errors = len(errors)
    kwargs["epsilon_schedule"] = _parse_epsilon(fed["epsilon"], "federation.epsilon", errors)
    kwargs["participation"] = _parse_participation(fed["participation"], n_priority, errors)
    if len(errors) > n_errors:
        return None

    try:
        FederationConfig(Algorithm.FedAvgPriority, **kwargs)
    except (ConfigurationError, SupportError, InputError, TypeError, ValueError) as e:
        errors.append("federation: {}".format(e))
        return None
    return kwargs


def _parse_algorithms(entries, errors):
    if not isinstance(entries, list) or not entries:
        errors.append("algorithms: should be a non-empty list.")
        return []

    specs = []
    for i, entry in enumerate(entries):
        path = "algorithms[{}]".format(i)
        if isinstance(entry, str):
            entry = {"name": entry}
        if not isinstance(entry, dict) or "name" not in entry:
            errors.append("{}: should be a name or an object with a name.".format(path))
            continue
        unknown = set(entry) - {"name", "label", "epsilon", "prox_mu"}
        if unknown:
            errors.append("{}: unknown fields {}.".format(path, sorted(unknown)))
        eps = None
        if "epsilon" in entry:
            eps = _parse_epsilon(entry["epsilon"], path + ".epsilon", errors)
        prox_mu = entry.get("prox_mu")
        if prox_mu is not None and (not _is_number(prox_mu) or prox_mu < 0):
            errors.append("{}.prox_mu: should be >= 0.".format(path))
        try:
            specs.append(AlgorithmSpec(entry["name"], entry.get("label"), eps, prox_mu))
        except SupportError as e:
            errors.append("{}: {}".format(path, e))

    labels = [s.label for s in specs]
    duplicated = sorted(set(x for x in labels if labels.count(x) > 1))
    if duplicated:
        errors.append("algorithms: duplicated labels {}; give each entry a label.".format(duplicated))
    return specs


def _parse_seeds(seeds, errors):
    if not isinstance(seeds, list) or not seeds:
        errors.append("seeds: should be a non-empty list of integers.")
        return []
    bad = [s for s in seeds if not _is_int(s, 0) or s >= 2 ** 64]
    if bad:
        errors.append("seeds: should be integers in [0, 2^64), got {}.".format(bad))
    if len(set(seeds)) != len(seeds):
        errors.append("seeds: duplicated values.")
    return list(seeds)
