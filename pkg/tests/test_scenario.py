import json
import math

import pytest

from optoloc.errors import ConfigurationError
from optoloc.scenario import DEFAULT_DYNAMIC_SOURCE, Scenario, default_dynamic_scenario


def test_defaults_match_published_setup():
    s = Scenario()
    assert s.node_count == 100
    assert s.bounds.size == (500.0, 500.0, 500.0)
    assert s.freq_khz == 8.0
    assert s.env.spreading_factor == 2.0
    assert len(s.source_positions) == 3


def test_json_round_trip():
    s = Scenario(snr_sweep_db=(10.0, math.inf), baseline=True, jitter_direction_deg=45.0)
    back = Scenario.from_json(s.dumps())
    assert back == s


def test_dynamic_round_trip():
    s = default_dynamic_scenario(node_count=7)
    assert Scenario.from_json(s.dumps()) == s


def test_dynamic_default_source_when_omitted():
    s = Scenario.from_dict({"mode": "dynamic"})
    assert s.source_positions == (DEFAULT_DYNAMIC_SOURCE,)


def test_single_position_form():
    s = Scenario.from_dict({"mode": "dynamic", "source_positions": [1, 2, -3]})
    assert tuple(s.source_positions[0]) == (1.0, 2.0, -3.0)


@pytest.mark.parametrize(
    "data",
    [
        {"nodes": 3},
        {"env": {"temp": 3}},
        {"source": {"laser": {"colour": "green"}}},
        {"bounds": {"origin": [0, 0, 0], "size": [1, 1, 1], "extra": 1}},
    ],
)
def test_unknown_keys_rejected(data):
    with pytest.raises(ConfigurationError, match="unknown key"):
        Scenario.from_dict(data)


@pytest.mark.parametrize(
    "data",
    [
        {"node_count": 0},
        {"snr_sweep_db": []},
        {"snr_sweep_db": ["loud"]},
        {"mode": "hover"},
        {"source_positions": [[0, 0, -2], [50, 0, -2], [100, 0, -2]]},
        {"source_positions": [[0, 0, -2], [50, 0, -2]]},
        {"source_positions": [[0, 0, 2], [50, 0, -2], [0, 50, -2]]},
        {"mode": "dynamic", "source_positions": [[0, 0, -2], [1, 1, -2]]},
        {"freq_khz": 700},
        {"env": {"spreading_factor": 1.5}},
        {"env": {"temperature_c": 80}},
        {"seed": -1},
        {"trials_per_node": 1.5},
        {"bounds": {"size": [-1, 1, 1]}},
        {"jitter_direction_deg": 120},
        {"baseline": "yes"},
    ],
)
def test_invalid_scenarios(data):
    with pytest.raises(ConfigurationError):
        Scenario.from_dict(data)


def test_bad_json():
    with pytest.raises(ConfigurationError):
        Scenario.from_json("{not json")


def test_infinity_spellings():
    s = Scenario.from_json(json.dumps({"snr_sweep_db": ["inf", "Infinity", 30]}))
    assert s.snr_sweep_db == (math.inf, math.inf, 30.0)
    assert Scenario.from_json('{"snr_sweep_db": [Infinity]}').snr_sweep_db == (math.inf,)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        Scenario.load(tmp_path / "nope.json")
