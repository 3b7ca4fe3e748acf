import pytest

from sliptrack.config import WorkbenchConfig, config_fingerprint, load_config


def test_defaults_without_file():
    cfg = load_config(None)
    assert isinstance(cfg, WorkbenchConfig)
    assert cfg.robot.wheel_base == 0.287
    assert cfg.controller.n_previews == 2
    assert cfg.reward.r_dist == -20.0
    assert cfg.sac.hidden == (64, 64)
    assert cfg.world.mu_low == 0.01
    assert cfg.episode.max_steps == 4000


def test_partial_file_overrides_only_named_keys(tmp_path):
    path = tmp_path / "w.toml"
    path.write_text(
        "[robot]\n"
        "v_max = 2.0\n"
        "\n"
        "[sac]\n"
        "hidden = [32, 32]\n"
        "learning_rate = 1e-3\n"
        "\n"
        "[controller]\n"
        'lateral = "basic"\n'
    )
    cfg = load_config(path)
    assert cfg.robot.v_max == 2.0
    assert cfg.robot.wheel_base == 0.287  # untouched default
    assert cfg.sac.hidden == (32, 32)  # list becomes tuple
    assert cfg.sac.learning_rate == 1e-3
    assert cfg.sac.discount == 0.99
    assert cfg.controller.lateral == "basic"


def test_unknown_section_rejected(tmp_path):
    path = tmp_path / "w.toml"
    path.write_text("[mystery]\nx = 1\n")
    with pytest.raises(ValueError, match="unknown config section"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "w.toml"
    path.write_text("[robot]\nwheel_radius = 0.05\nturbo = true\n")
    with pytest.raises(ValueError, match=r"unknown key\(s\) in \[robot\]: turbo"):
        load_config(path)


def test_fingerprint_tracks_values(tmp_path):
    base = config_fingerprint(load_config(None))
    assert base == config_fingerprint(load_config(None))
    path = tmp_path / "w.toml"
    path.write_text("[robot]\nv_max = 1.5\n")
    assert config_fingerprint(load_config(path)) != base


def test_missing_file_is_an_error(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.toml")
