from ocata.automaton import (
    Ata,
    CombineMode,
    Nta,
    NtaTransition,
    Rule,
    build_ata,
    check_partition,
    combine,
    complement,
    complete_with_sink,
    from_nta,
)
from ocata.config import (
    CONFIG_DIR_NAME,
    Config,
    consume_config_warnings,
    get_config,
    get_config_dir,
    reload_config,
    reset_config,
    set_config,
)
from ocata.decision import check_contains, check_empty, check_universal, concretize_witness
from ocata.semantics import ConfigSet, Configuration, TimedWord, accepts, game_accepts
from ocata.syntax import parse_ata, parse_lcs, parse_word, print_ata, print_lcs, print_word


class _ConfigProxy:
    """Proxy that delegates to get_config() for runtime reloading and test injection."""

    def __getattr__(self, name: str):
        return getattr(get_config(), name)


config: Config = _ConfigProxy()  # type: ignore[assignment]

__all__ = [
    "CONFIG_DIR_NAME",
    "Ata",
    "CombineMode",
    "Config",
    "ConfigSet",
    "Configuration",
    "Nta",
    "NtaTransition",
    "Rule",
    "TimedWord",
    "accepts",
    "build_ata",
    "check_contains",
    "check_empty",
    "check_partition",
    "check_universal",
    "combine",
    "complement",
    "complete_with_sink",
    "concretize_witness",
    "config",
    "consume_config_warnings",
    "from_nta",
    "game_accepts",
    "get_config",
    "get_config_dir",
    "parse_ata",
    "parse_lcs",
    "parse_word",
    "print_ata",
    "print_lcs",
    "print_word",
    "reload_config",
    "reset_config",
    "set_config",
]
