"""Fixtures for stablelab tests."""

from unittest import mock

import pytest

from stablelab.config import get_settings


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Drop cached settings so that environment patches take effect."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def mock_logger():
    """Fixture that returns a mock logger object for testing purposes."""
    logger = mock.Mock()
    return logger


@pytest.fixture
def output_dir(tmp_path):
    """Return an empty directory receiving reports and artifacts."""
    path = tmp_path / "results"
    path.mkdir()
    return path
