"""Config loading: strict key/type validation with dotted-path diagnostics."""

import json

import pytest

from astrocore.config import (
    ConfigError,
    default_config,
    load_config,
    merge_config,
)


def test_defaults_are_independent_copies():
    a = default_config()
    b = default_config()
    a["selfrepair"]["astro"]["tau_ag"] = 99.0
    assert b["selfrepair"]["astro"]["tau_ag"] == 10.0


def test_defaults_are_json_serializable():
    text = json.dumps(default_config())
    assert json.loads(text) == default_config()


def test_merge_overrides_nested_leaf():
    cfg = merge_config({"selfrepair": {"astro": {"tau_ag": 5.0},
                                       "n_seeds": 3}})
    assert cfg["selfrepair"]["astro"]["tau_ag"] == 5.0
    assert cfg["selfrepair"]["n_seeds"] == 3
    # Untouched leaves keep their defaults.
    assert cfg["selfrepair"]["astro"]["tau_esp"] == 40.0
    assert cfg["faults"]["n_seeds"] == 10


def test_int_promotes_to_float_leaf():
    cfg = merge_config({"selfrepair": {"source_rate_hz": 25}})
    assert cfg["selfrepair"]["source_rate_hz"] == 25.0
    assert isinstance(cfg["selfrepair"]["source_rate_hz"], float)


def test_unknown_keys_rejected_with_path():
    with pytest.raises(ConfigError, match="unknown config key: nonsense"):
        merge_config({"nonsense": 1})
    with pytest.raises(ConfigError,
                       match=r"unknown config key: selfrepair\.astro\.tau_qq"):
        merge_config({"selfrepair": {"astro": {"tau_qq": 1.0}}})


def test_type_mismatches_name_the_field():
    with pytest.raises(ConfigError, match=r"selfrepair\.duration_s"):
        merge_config({"selfrepair": {"duration_s": "long"}})
    with pytest.raises(ConfigError, match=r"selfrepair\.n_seeds"):
        merge_config({"selfrepair": {"n_seeds": 2.5}})
    with pytest.raises(ConfigError, match=r"selfrepair\.n_seeds"):
        merge_config({"selfrepair": {"n_seeds": True}})
    with pytest.raises(ConfigError, match=r"synthesize\.core"):
        merge_config({"synthesize": {"core": 7}})
    with pytest.raises(ConfigError, match=r"endurance\.tsh_literal"):
        merge_config({"reliability": {"endurance": {"tsh_literal": 1}}})


def test_section_must_be_object():
    with pytest.raises(ConfigError, match="selfrepair"):
        merge_config({"selfrepair": 3})


def test_list_leaves_validated():
    cfg = merge_config({"faults": {"error_rates_pct": [0, 5, 30]}})
    assert cfg["faults"]["error_rates_pct"] == [0.0, 5.0, 30.0]
    with pytest.raises(ConfigError, match=r"faults\.error_rates_pct"):
        merge_config({"faults": {"error_rates_pct": []}})
    with pytest.raises(ConfigError, match=r"faults\.error_rates_pct"):
        merge_config({"faults": {"error_rates_pct": ["a"]}})
    with pytest.raises(ConfigError, match=r"pwl\.segment_sweep"):
        merge_config({"pwl": {"segment_sweep": "16"}})


def test_nullable_leaves():
    # Auto-derived quantities accept null and explicit numbers alike.
    cfg = merge_config({"synthesize": {"synthesis": {"a_th": 0.75}},
                        "selfrepair": {"astro": {"k_plc": None}}})
    assert cfg["synthesize"]["synthesis"]["a_th"] == 0.75
    assert cfg["selfrepair"]["astro"]["k_plc"] is None
    with pytest.raises(ConfigError, match=r"synthesize\.synthesis\.a_th"):
        merge_config({"synthesize": {"synthesis": {"a_th": "auto"}}})
    # A required number cannot be nulled out.
    with pytest.raises(ConfigError, match=r"selfrepair\.astro\.tau_ag"):
        merge_config({"selfrepair": {"astro": {"tau_ag": None}}})


def test_load_config_none_gives_defaults():
    assert load_config(None) == default_config()


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"seed": 7, "power": {"activity": 0.5}}))
    cfg = load_config(path)
    assert cfg["seed"] == 7
    assert cfg["power"]["activity"] == 0.5


def test_load_config_failures(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="top level must be an object"):
        load_config(arr)
