"""Tests for run configuration."""

import json
from pathlib import Path

import pytest

from absorbing_walk.config import RunConfig, load_config
from absorbing_walk.exceptions import InvalidArgumentError


@pytest.fixture
def fixtures_dir():
    """Path to test fixtures."""
    return Path(__file__).parent / "fixtures"


class TestRunConfig:
    """Test cases for RunConfig."""

    def test_defaults(self):
        config = RunConfig()
        assert config.params.eta == 1.0
        assert config.s0 == 8
        assert config.eta_list == (0.25, 0.5, 1.0, 2.0, 4.0)

    def test_time_grid(self):
        times = RunConfig(t_max=0.3, dt=0.1).times()
        assert len(times) == 4
        assert times[-1] == pytest.approx(0.3)

    def test_time_grid_is_multiples_of_dt(self):
        times = RunConfig(t_max=30.0, dt=0.1).times()
        assert len(times) == 301
        assert times[123] == 123 * 0.1

    def test_lists_become_tuples(self):
        config = RunConfig(eta_list=[1, 2], snapshots=[0, 3])
        assert config.eta_list == (1.0, 2.0)
        assert config.snapshots == (0.0, 3.0)

    @pytest.mark.parametrize("changes", [
        {"omega": 0.0},
        {"kappa": -1.0},
        {"s0": 0},
        {"dt": 0.0},
        {"t_max": -1.0},
        {"sites": 1},
        {"format": "xml"},
        {"eta_list": (1.0, -2.0)},
        {"snapshots": (-1.0,)},
        {"m_max": 1},
        {"k_nodes": 2},
    ])
    def test_invalid(self, changes):
        with pytest.raises(InvalidArgumentError):
            RunConfig(**changes)

    def test_merged_ignores_none(self):
        config = RunConfig().merged(kappa=4.0, s0=None)
        assert config.kappa == 4.0
        assert config.s0 == 8

    def test_merged_validates(self):
        with pytest.raises(InvalidArgumentError):
            RunConfig().merged(dt=-0.5)

    def test_dict_round_trip(self):
        config = RunConfig(kappa=0.25, snapshots=(1.0,))
        assert RunConfig.from_dict(config.to_dict()) == config

    def test_unknown_keys(self):
        with pytest.raises(InvalidArgumentError, match="colour"):
            RunConfig.from_dict({"colour": "blue"})


class TestLoadConfig:
    """Test cases for load_config."""

    def test_load_fixture(self, fixtures_dir):
        config = load_config(fixtures_dir / "weak_run.json")
        assert config.kappa == 0.5
        assert config.s0 == 3
        assert config.snapshots == (0.0, 1.0)
        assert config.format == "csv"

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            load_config(tmp_path / "absent.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{omega: 1", encoding="utf-8")
        with pytest.raises(InvalidArgumentError):
            load_config(path)

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text(json.dumps([1, 2]), encoding="utf-8")
        with pytest.raises(InvalidArgumentError):
            load_config(path)
