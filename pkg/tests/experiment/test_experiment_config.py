import os
import json
import pytest
from fedalign.datagen import NoiseProfile
from fedalign.federation import Algorithm
from fedalign.experiment import ConfigError, config_from_dict, parse_config


def error_text(doc):
    with pytest.raises(ConfigError) as e:
        config_from_dict(doc)
    return str(e.value), e.value.errors


def test_defaults():
    cfg = config_from_dict({"preset": "synth-1-1"})
    assert cfg.data["d"] == 60
    assert cfg.data["C"] == 10
    assert cfg.data["alpha"] == 1.0
    assert cfg.n_clients == 24
    assert cfg.n_priority == 4
    assert isinstance(cfg.data["noise"], NoiseProfile)
    assert [a.name for a in cfg.algorithms] == [
        Algorithm.FedAvgPriority,
        Algorithm.FedAvgAll,
        Algorithm.FedALIGN,
    ]
    assert cfg.diagnostics_enabled
    assert cfg.seeds == [0]

    fc = cfg.federation_config(cfg.algorithms[2], 7)
    assert fc.seed == 7
    assert fc.E == 5
    assert fc.epsilon_schedule.value(0) == 0.2


def test_noise_and_epsilon():
    cfg = config_from_dict(
        {
            "data": {"noise": "high"},
            "federation": {"epsilon": 0.5},
            "algorithms": [
                "FedAvgPriority",
                {"name": "FedALIGN", "label": "eps0", "epsilon": 0.0},
                {"name": "FedALIGN", "label": "decay",
                 "epsilon": {"kind": "linear", "eps0": 1.0, "eps_end": 0.0, "horizon": 100}},
                {"name": "FedProxALIGN", "prox_mu": 1.0},
            ],
        }
    )
    assert cfg.data["noise"].label_noise_skew == 5.0
    labels = [a.label for a in cfg.algorithms]
    assert labels == ["FedAvgPriority", "eps0", "decay", "FedProxALIGN"]
    assert cfg.federation_config(cfg.algorithms[0], 0).epsilon_schedule.value(0) == 0.5
    assert cfg.federation_config(cfg.algorithms[1], 0).epsilon_schedule.value(0) == 0.0
    assert cfg.federation_config(cfg.algorithms[2], 0).epsilon_schedule.value(50) == 0.5
    assert cfg.federation_config(cfg.algorithms[3], 0).prox_mu == 1.0


def test_participation():
    cfg = config_from_dict(
        {
            "data": {"n_clients": 60, "n_priority": 18},
            "federation": {"participation": {"fraction": 0.3}},
        }
    )
    mode = cfg.federation["participation"]
    assert mode.priority_K == 5
    assert mode.nonpriority_p == 0.3

    _, errors = error_text({"federation": {"participation": {"fraction": 0.3, "priority_K": 2}}})
    assert len(errors) == 1
    _, errors = error_text({"federation": {"participation": {"priority_K": 5}}})
    assert "priority_K" in errors[0]


def test_n_priority_exceeds_n_clients():
    text, _ = error_text({"data": {"n_clients": 3, "n_priority": 5}})
    assert "data.n_priority" in text
    assert "data.n_clients" in text


def test_unknown_algorithm():
    text, _ = error_text({"algorithms": ["FedAvgPriority", "FedNova"]})
    assert "algorithms[1]" in text
    for name in Algorithm.names():
        assert name in text


def test_collects_errors():
    text, errors = error_text(
        {
            "bogus": 1,
            "data": {"d": 0, "extra": True},
            "federation": {"E": 0},
            "seeds": [1, 1],
        }
    )
    assert len(errors) >= 5
    assert "bogus: unknown field." in errors
    assert "data.extra: unknown field." in errors
    assert "seeds: duplicated values." in errors
    assert "federation" in text


def test_invalid_values():
    for doc in [
        {"algorithms": []},
        {"algorithms": ["FedALIGN", "FedALIGN"]},
        {"algorithms": [{"name": "FedALIGN", "epsilon": -1.0}]},
        {"seeds": [-1]},
        {"nprocs": 0},
        {"target_loss": -1.0},
        {"data": {"source": "mnist"}},
        {"data": {"noise": "extreme"}},
        {"data": {"source": "csv"}},
        {"data": {"source": "csv", "path": "x.csv", "n_shards": 10, "shards_per_client": 3}},
        {"federation": {"lr_schedule": "constant"}},
        {"federation": {"reg_lambda": 0.0, "mu": 0.1}},
        {"federation": {"epsilon": {"kind": "cosine"}}},
        {"preset": "unknown-preset"},
        {"diagnostics": {"oracle_tol": 0}},
    ]:
        error_text(doc)


def test_csv_source(tmpdir):
    path = str(tmpdir.join("data.csv"))
    with open(path, "w") as fout:
        fout.write("f0,label\n0.5,1\n")
    cfg = config_from_dict(
        {
            "data": {
                "source": "csv",
                "path": path,
                "n_shards": 20,
                "shards_per_client": 2,
                "n_priority": 3,
            }
        }
    )
    assert cfg.n_clients == 10
    assert cfg.n_priority == 3

    text, _ = error_text({"data": {"source": "csv", "path": str(tmpdir.join("no.csv")),
                                   "n_shards": 2, "shards_per_client": 1}})
    assert "does not exist" in text


def test_parse_config(tmpdir):
    path = str(tmpdir.join("exp.json"))
    with open(path, "w") as fout:
        json.dump({"name": "small", "preset": ["synth-1-1", "param-sweep-e3"]}, fout)
    cfg = parse_config(path)
    assert cfg.name == "small"
    assert cfg.federation["E"] == 3

    cfg.override(seeds=[4], output_dir="elsewhere", diagnostics=False, nprocs=2)
    assert cfg.seeds == [4]
    assert cfg.output_dir == "elsewhere"
    assert not cfg.diagnostics_enabled
    d = cfg.to_dict()
    assert d["seeds"] == [4]
    assert d["diagnostics"]["enabled"] is False
    assert "nprocs" not in d
    assert "preset" not in d
    assert d["data"]["noise"]["label_noise_factor"] == 0.0
    json.dumps(d)

    with pytest.raises(ConfigError):
        parse_config(str(tmpdir.join("missing.json")))

    bad = str(tmpdir.join("bad.json"))
    with open(bad, "w") as fout:
        fout.write("{not json")
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_bundled_configs():
    configs = os.path.join(os.path.dirname(__file__), "..", "..", "configs")
    names = sorted(f for f in os.listdir(configs) if f.endswith(".json"))
    assert len(names) == 5
    for f in names:
        cfg = parse_config(os.path.join(configs, f))
        assert cfg.algorithms
    cfg = parse_config(os.path.join(configs, "partial-participation.json"))
    assert cfg.federation["participation"].priority_K == 5
    assert cfg.n_priority == 18


if __name__ == "__main__":
    test_defaults()
    test_collects_errors()
