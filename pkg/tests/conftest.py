"""
Shared fixtures for the toolkit tests
"""

import pytest

from cfunc.config import RunConfig
from cfunc.logging_setup import configure_logging


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    configure_logging("WARNING")


@pytest.fixture
def config() -> RunConfig:
    """Fixed-seed configuration, one worker"""
    return RunConfig(seed=20240601, workers=1)
