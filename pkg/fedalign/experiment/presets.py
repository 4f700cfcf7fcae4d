import copy

# Default values of every configuration field. Presets and config files are merged on
# top of these, in that order.
DEFAULTS = {
    "name": "experiment",
    "data": {
        "source": "synth",
        "alpha": 1.0,
        "beta": 1.0,
        "d": 60,
        "C": 10,
        "samples_per_client": 200,
        "n_clients": 24,
        "n_priority": 4,
        "nonpriority_source": "mixture",
        "iid": False,
        "noise": {
            "label_noise_factor": 0.0,
            "label_noise_skew": 1.0,
            "random_data_fraction_factor": 0.0,
            "random_data_fraction_skew": 1.0,
        },
        "test_samples": 1000,
        "client_test_samples": 0,
        "path": None,
        "n_shards": None,
        "shards_per_client": None,
        "test_fraction": 0.2,
    },
    "federation": {
        "E": 5,
        "rounds": 50,
        "batch_size": 10,
        "lr_schedule": "theorem",
        "eta": None,
        "mu": None,
        "L": None,
        "reg_lambda": 0.1,
        "epsilon": {"kind": "constant", "eps0": 0.2},
        "participation": {"priority_K": None, "nonpriority_p": None, "fraction": None},
        "prox_mu": 0.0,
        "indicator_point": "broadcast",
    },
    "algorithms": ["FedAvgPriority", "FedAvgAll", "FedALIGN"],
    "seeds": [0],
    "output_dir": "results",
    "diagnostics": {
        "enabled": True,
        "oracle_tol": 1e-8,
        "oracle_max_iter": 20000,
        "noise_draws": 50,
        "noise_points": 5,
    },
    "target_loss": None,
    "nprocs": 1,
}


PRESETS = {
    "synth-1-1": {
        "description": "Synth(1, 1) data: alpha = beta = 1, d = 60, C = 10.",
        "config": {"data": {"source": "synth", "alpha": 1.0, "beta": 1.0, "d": 60, "C": 10}},
    },
    "synth-low-noise": {
        "description": "Non-priority noise with label factor 2.5, data-fraction factor 1, "
        "skew 0.5.",
        "config": {"data": {"noise": "low"}},
    },
    "synth-medium-noise": {
        "description": "Non-priority noise with label factor 2.5, data-fraction factor 1, "
        "skew 1.5.",
        "config": {"data": {"noise": "medium"}},
    },
    "synth-high-noise": {
        "description": "Non-priority noise with label factor 2.5, data-fraction factor 1, "
        "skew 5.",
        "config": {"data": {"noise": "high"}},
    },
    "full-participation": {
        "description": "2 priority out of 60 clients, E = 5, epsilon = 0.2, all clients "
        "every round.",
        "config": {
            "data": {"n_clients": 60, "n_priority": 2},
            "federation": {"E": 5, "epsilon": {"kind": "constant", "eps0": 0.2}},
            "algorithms": ["FedAvgPriority", "FedAvgAll", "FedALIGN"],
        },
    },
    "partial-participation": {
        "description": "18 priority out of 60 clients, participation fraction 0.3 "
        "(K = round(0.3 * 18) sampled priority clients).",
        "config": {
            "data": {"n_clients": 60, "n_priority": 18},
            "federation": {
                "E": 5,
                "epsilon": {"kind": "constant", "eps0": 0.2},
                "participation": {"fraction": 0.3},
            },
            "algorithms": ["FedAvgPriority", "FedAvgAll", "FedALIGN"],
        },
    },
    "fedprox": {
        "description": "4 priority and 60 non-priority clients with proximal weight 1.",
        "config": {
            "data": {"n_clients": 64, "n_priority": 4},
            "federation": {"prox_mu": 1.0, "epsilon": {"kind": "constant", "eps0": 0.2}},
            "algorithms": ["FedProxPriority", "FedProxAll", "FedProxALIGN"],
        },
    },
    "local-comparison": {
        "description": "Per-client test sets; federated models against purely local ones.",
        "config": {
            "data": {"client_test_samples": 200},
            "algorithms": ["FedAvgPriority", "FedALIGN", "LocalOnly"],
        },
    },
    "param-sweep-e3": {
        "description": "Three local steps per round.",
        "config": {"federation": {"E": 3}},
    },
}


def preset_names():
    return sorted(PRESETS)


def get_preset(name):
    r"""Configuration fragment of preset ``name`` (a copy), or ``None`` if unknown."""
    if name not in PRESETS:
        return None
    return copy.deepcopy(PRESETS[name]["config"])


def deep_merge(base, update):
    r"""Merge dict ``update`` into a copy of ``base``; nested dicts merge, other values
    (lists included) are replaced."""
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged
