from fedalign.experiment import PRESETS, preset_names, get_preset, deep_merge, config_from_dict


def test_presets_valid():
    assert "synth-1-1" in preset_names()
    for name in preset_names():
        assert PRESETS[name]["description"]
        config_from_dict({"preset": name})


def test_participation_settings():
    cfg = config_from_dict({"preset": "full-participation"})
    assert (cfg.n_clients, cfg.n_priority) == (60, 2)
    assert cfg.federation["E"] == 5
    assert cfg.federation["epsilon_schedule"].value(0) == 0.2

    cfg = config_from_dict({"preset": "partial-participation"})
    assert cfg.federation["participation"].priority_K == 5

    cfg = config_from_dict({"preset": "fedprox"})
    assert cfg.federation["prox_mu"] == 1.0
    assert all(a.name.is_prox for a in cfg.algorithms)

    cfg = config_from_dict({"preset": ["synth-1-1", "synth-medium-noise"]})
    assert cfg.data["noise"].random_data_fraction_skew == 1.5


def test_get_preset_copy():
    a = get_preset("fedprox")
    a["data"]["n_clients"] = 3
    assert get_preset("fedprox")["data"]["n_clients"] == 64
    assert get_preset("nothing") is None


def test_deep_merge():
    base = {"a": {"b": 1, "c": [1, 2]}, "d": 1}
    merged = deep_merge(base, {"a": {"c": [3]}, "e": 2})
    assert merged == {"a": {"b": 1, "c": [3]}, "d": 1, "e": 2}
    assert base == {"a": {"b": 1, "c": [1, 2]}, "d": 1}


if __name__ == "__main__":
    test_presets_valid()
    test_deep_merge()
