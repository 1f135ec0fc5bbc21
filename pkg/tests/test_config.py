# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Tests for run configuration and persisted settings."""

import json

import pytest

from fano_congruence.config import HOME_ENV, THREADS_ENV, ConfigManager, RunConfig
from fano_congruence.error_handling import ConfigurationError


class TestRunConfig:
    """Defaults, validation and overrides."""

    def test_defaults(self):
        """Test the documented defaults."""
        config = RunConfig()
        assert config.starts == 4000
        assert config.rank_tol == 1e-9
        assert config.membership_tol == 1e-8
        assert config.threads == 1
        assert not config.strict_cusp
        assert config.validate() is config

    @pytest.mark.parametrize(
        "changes", [{"rank_tol": 0.0}, {"dedup_radius": -1e-6}, {"starts": 0}, {"seeds": 0}]
    )
    def test_validate_rejects(self, changes):
        """Test non-positive tolerances and counts are rejected."""
        with pytest.raises(ConfigurationError):
            RunConfig().with_overrides(**changes)

    def test_none_overrides_ignored(self):
        """Test that None leaves a field untouched."""
        config = RunConfig().with_overrides(starts=None, seed=7)
        assert config.starts == 4000
        assert config.seed == 7

    def test_unknown_key(self):
        """Test that unknown keys are reported."""
        with pytest.raises(ConfigurationError, match="Unknown configuration key"):
            RunConfig().with_overrides(tolerance=1e-3)


class TestConfigManager:
    """Persisted overrides in the configuration directory."""

    @pytest.fixture
    def manager(self, tmp_path, monkeypatch):
        """Manager rooted in a temporary directory."""
        monkeypatch.delenv(THREADS_ENV, raising=False)
        return ConfigManager(tmp_path)

    def test_home_from_environment(self, tmp_path, monkeypatch):
        """Test the configuration directory follows the home variable."""
        monkeypatch.setenv(HOME_ENV, str(tmp_path))
        assert ConfigManager().config_file == tmp_path / "config.json"

    def test_empty_by_default(self, manager):
        """Test that no file means no overrides."""
        assert manager.load_config() == {}
        assert manager.run_config() == RunConfig()

    def test_set_value(self, manager):
        """Test values are coerced, saved and applied."""
        manager.set_value("starts", "250")
        manager.set_value("strict_cusp", "yes")
        manager.set_value("rank_tol", "1e-7")
        assert json.loads(manager.config_file.read_text()) == {
            "rank_tol": 1e-7,
            "starts": 250,
            "strict_cusp": True,
        }
        config = manager.run_config()
        assert config.starts == 250
        assert config.strict_cusp
        assert config.rank_tol == 1e-7

    def test_set_invalid_value(self, manager):
        """Test bad values never reach the file."""
        with pytest.raises(ConfigurationError):
            manager.set_value("starts", "many")
        with pytest.raises(ConfigurationError):
            manager.set_value("starts", "0")
        with pytest.raises(ConfigurationError):
            manager.set_value("colour", "blue")
        assert not manager.config_file.exists()

    def test_precedence(self, manager, monkeypatch):
        """Test file < environment < explicit overrides for the thread count."""
        manager.set_value("threads", "2")
        assert manager.run_config().threads == 2
        monkeypatch.setenv(THREADS_ENV, "3")
        assert manager.run_config().threads == 3
        assert manager.run_config(threads=5).threads == 5

    def test_reset(self, manager):
        """Test reset removes the overrides."""
        manager.set_value("seed", "9")
        manager.reset()
        assert manager.run_config().seed == 0

    def test_unreadable_file(self, manager):
        """Test a corrupt file falls back to defaults."""
        manager.config_dir.mkdir(parents=True, exist_ok=True)
        manager.config_file.write_text("not json")
        assert manager.load_config() == {}
