from pathlib import Path

import pytest

from ocata import (
    Config,
    config,
    consume_config_warnings,
    get_config,
    reload_config,
    reset_config,
    set_config,
)
from ocata.config import CURRENT_CONFIG_VERSION


@pytest.fixture
def home(tmp_path, monkeypatch):
    home = tmp_path / "home"
    (home / ".ocata").mkdir(parents=True)
    project = tmp_path / "project"
    project.mkdir()
    monkeypatch.setattr(Path, "home", lambda: home)
    monkeypatch.chdir(project)
    reset_config()
    return home


def _write(directory: Path, text: str) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    config_file = directory / "config.toml"
    config_file.write_text(text, encoding="utf-8")
    return config_file


def test_defaults_without_files(home):
    cfg = get_config()
    assert cfg.partition.strict
    assert cfg.search.pruning == "ancestors"
    assert cfg.search.trim_locations
    assert cfg.search.max_nodes == 0
    assert cfg.budget.seconds == 0
    assert cfg.report.format == "text"
    assert consume_config_warnings() == []


def test_global_file_is_merged_over_defaults(home):
    _write(home / ".ocata", '[search]\npruning = "global"\n')
    cfg = get_config()
    assert cfg.search.pruning == "global"
    assert cfg.search.trim_locations


def test_project_file_wins_over_global_file(home):
    _write(home / ".ocata", "[search]\nmax_nodes = 10\n\n[budget]\nseconds = 5\n")
    _write(Path.cwd() / ".ocata", "[search]\nmax_nodes = 99\n")
    cfg = get_config()
    assert cfg.search.max_nodes == 99
    assert cfg.budget.seconds == 5


def test_invalid_toml_falls_back_to_defaults_and_records_warning(home):
    config_file = _write(home / ".ocata", "[bad")
    cfg = get_config()
    assert isinstance(cfg, Config)
    assert cfg.search.pruning == "ancestors"

    warnings = consume_config_warnings()
    assert len(warnings) == 1
    assert "Invalid config" in warnings[0]
    assert str(config_file) in warnings[0]
    assert consume_config_warnings() == []


def test_invalid_values_fall_back_to_defaults(home):
    _write(home / ".ocata", '[search]\npruning = "sometimes"\n')
    cfg = get_config()
    assert cfg.search.pruning == "ancestors"
    warnings = consume_config_warnings()
    assert len(warnings) == 1
    assert "Falling back to built-in defaults" in warnings[0]


def test_newer_config_version_is_reported(home):
    _write(home / ".ocata", f"[meta]\nconfig_version = {CURRENT_CONFIG_VERSION + 1}\n")
    get_config()
    assert any("newer than supported" in w for w in consume_config_warnings())


def test_overrides_leave_the_original_untouched():
    base = Config({"search": {"max_nodes": 3}})
    changed = base.with_overrides({"search": {"pruning": "global"}, "report": {"format": "json"}})
    assert changed.search.pruning == "global"
    assert changed.search.max_nodes == 3
    assert changed.report.format == "json"
    assert base.search.pruning == "ancestors"
    assert base.report.format == "text"


def test_config_proxy_follows_injection():
    set_config(Config({"partition": {"strict": False}}))
    assert not config.partition.strict
    set_config(Config({}))
    assert config.partition.strict


def test_reload_config_reads_files_again(home):
    set_config(Config({"budget": {"seconds": 42}}))
    assert config.budget.seconds == 42
    _write(home / ".ocata", "[budget]\nseconds = 7\n")
    reloaded = reload_config()
    assert reloaded.budget.seconds == 7
    assert config.budget.seconds == 7
