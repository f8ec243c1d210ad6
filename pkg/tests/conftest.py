import logging
from pathlib import Path

import pytest
from factories import EXAMPLE_ONE_SOURCE, accept_all, example_one, worked_example

from ocata import Config, reset_config, set_config
from ocata.automaton import Ata


def pytest_runtest_setup(item):
    # Never pick up ~/.ocata or ./.ocata while testing
    set_config(Config({}))


def pytest_runtest_teardown(item, nextitem):
    reset_config()
    package = logging.getLogger("ocata")
    package.handlers.clear()
    package.propagate = True
    package.setLevel(logging.NOTSET)


@pytest.fixture
def fixtures() -> Path:
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def ex1() -> Ata:
    return example_one()


@pytest.fixture
def everything() -> Ata:
    return accept_all()


@pytest.fixture
def worked() -> Ata:
    return worked_example()


@pytest.fixture
def ex1_source() -> str:
    return EXAMPLE_ONE_SOURCE
