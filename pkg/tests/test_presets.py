import pytest

from nlcs.experiment import DESK_SCALE, LARGE_SCALE, ExperimentConfig


def test_desk_preset(tmp_path):
    cfg = ExperimentConfig.preset("desk", {"kind": "abs"}, "pre", seed=1, output_dir=str(tmp_path))
    assert (cfg.m, cfg.n, cfg.k, cfg.trials) == (64, 128, 10, 100)


def test_large_preset_constructs(tmp_path):
    # heavier preset: validated here, deliberately never run by the suite
    cfg = ExperimentConfig.preset("large", {"kind": "sign"}, "pre", seed=1, output_dir=str(tmp_path))
    assert (cfg.m, cfg.n, cfg.k, cfg.trials) == (160, 512, 25, 100)
    assert cfg.k <= cfg.n and cfg.m <= cfg.n


def test_unknown_scale(tmp_path):
    with pytest.raises(ValueError):
        ExperimentConfig.preset("galactic", {"kind": "abs"}, "pre", seed=1, output_dir=str(tmp_path))


def test_preset_dicts_are_consistent():
    for preset in (DESK_SCALE, LARGE_SCALE):
        assert preset["k"] <= preset["n"] and preset["m"] <= preset["n"]
