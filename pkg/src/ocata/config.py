import tomllib
from contextvars import ContextVar
from copy import deepcopy
from importlib import resources
from pathlib import Path
from typing import Any, Literal, get_args

from pydantic import BaseModel, Field, ValidationError

CONFIG_DIR_NAME: str = ".ocata"

PruningMode = Literal["ancestors", "global"]
ReportFormat = Literal["text", "json"]
PRUNING_MODES: tuple[PruningMode, ...] = get_args(PruningMode)
REPORT_FORMATS: tuple[ReportFormat, ...] = get_args(ReportFormat)


# =================================================================================================
# Persisted Config Schema and Defaults
# =================================================================================================


def _load_default_config_toml() -> str:
    return resources.files("ocata.defaults").joinpath("config.toml").read_text(encoding="utf-8")


_DEFAULT_CONFIG_DATA = tomllib.loads(_load_default_config_toml())
CURRENT_CONFIG_VERSION = int(_DEFAULT_CONFIG_DATA.get("meta", {}).get("config_version", 1))

_config_var: ContextVar["Config | None"] = ContextVar("ocata_config", default=None)
_config_warnings: list[str] = []


class MetaConfig(BaseModel):
    config_version: int = CURRENT_CONFIG_VERSION


class PartitionConfig(BaseModel):
    strict: bool = True


class SearchConfig(BaseModel):
    pruning: PruningMode = "ancestors"
    trim_locations: bool = True
    max_nodes: int = Field(default=0, ge=0)


class BudgetConfig(BaseModel):
    seconds: float = Field(default=0, ge=0)


class ReportConfig(BaseModel):
    format: ReportFormat = "text"


class ConfigSchema(BaseModel):
    meta: MetaConfig
    partition: PartitionConfig = PartitionConfig()
    search: SearchConfig = SearchConfig()
    budget: BudgetConfig = BudgetConfig()
    report: ReportConfig = ReportConfig()


# =================================================================================================
# Runtime Config Accessors
# =================================================================================================


class Config:
    def __init__(self, data: dict[str, Any]) -> None:
        self._data = self.merge_with_defaults(data)
        self._parsed = ConfigSchema.model_validate(self._data)

    @staticmethod
    def deep_merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
        merged = deepcopy(base)
        for key, value in overrides.items():
            current_value = merged.get(key)
            if isinstance(current_value, dict) and isinstance(value, dict):
                merged[key] = Config.deep_merge(current_value, value)
            else:
                merged[key] = deepcopy(value)
        return merged

    @staticmethod
    def merge_with_defaults(data: dict[str, Any]) -> dict[str, Any]:
        return Config.deep_merge(_DEFAULT_CONFIG_DATA, data)

    def with_overrides(self, overrides: dict[str, Any]) -> "Config":
        """Return a new config with ``overrides`` merged on top (used for CLI flags)."""
        return Config(self.deep_merge(self._data, overrides))

    @property
    def partition(self) -> PartitionConfig:
        return self._parsed.partition

    @property
    def search(self) -> SearchConfig:
        return self._parsed.search

    @property
    def budget(self) -> BudgetConfig:
        return self._parsed.budget

    @property
    def report(self) -> ReportConfig:
        return self._parsed.report


# =================================================================================================
# Persisted Config Loading and Runtime Cache
# =================================================================================================


def get_config_dir() -> Path:
    return Path.home() / CONFIG_DIR_NAME


def _config_files(cwd: Path | None = None) -> list[Path]:
    """Global file first, project file last so that project settings win."""
    resolved_cwd = (cwd or Path.cwd()).resolve()
    candidates = [get_config_dir() / "config.toml", resolved_cwd / CONFIG_DIR_NAME / "config.toml"]
    unique = list(dict.fromkeys(path.resolve(strict=False) for path in candidates))
    return [path for path in unique if path.is_file()]


def _record_config_warning(message: str) -> None:
    _config_warnings.append(message)


def consume_config_warnings() -> list[str]:
    warnings = _config_warnings.copy()
    _config_warnings.clear()
    return warnings


def _read_config_data(config_file: Path) -> dict[str, Any]:
    try:
        return tomllib.loads(config_file.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        _record_config_warning(
            f"Invalid config at {config_file}: {exc}. Ignoring this file."
        )
        return {}


def _load_config(cwd: Path | None = None) -> Config:
    data: dict[str, Any] = {}
    files = _config_files(cwd)
    for config_file in files:
        data = Config.deep_merge(data, _read_config_data(config_file))

    version = data.get("meta", {}).get("config_version", CURRENT_CONFIG_VERSION)
    if isinstance(version, int) and version > CURRENT_CONFIG_VERSION:
        _record_config_warning(
            f"Config version {version} is newer than supported v{CURRENT_CONFIG_VERSION}."
        )

    try:
        return Config(data)
    except ValidationError as exc:
        where = ", ".join(str(f) for f in files)
        _record_config_warning(
            f"Invalid config values at {where}: {exc}. Falling back to built-in defaults."
        )
        return Config({})


def get_config() -> Config:
    """
    Get the current config instance.

    Returns the config from context variable if set, otherwise loads it from
    ``~/.ocata/config.toml`` and ``./.ocata/config.toml``. The loaded config is
    cached in the context variable.
    """
    cfg = _config_var.get()
    if cfg is None:
        cfg = _load_config()
        _config_var.set(cfg)
    return cfg


def set_config(config: Config) -> None:
    """Set the config instance (useful for testing and CLI overrides)."""
    _config_var.set(config)


def reload_config(cwd: Path | None = None) -> Config:
    """Reload config from files and update the context variable."""
    cfg = _load_config(cwd)
    _config_var.set(cfg)
    return cfg


def reset_config() -> None:
    """Reset config to uninitialized state (next get_config() will reload from files)."""
    _config_var.set(None)
    _config_warnings.clear()
