"""Unit tests for stablelab.config module.

These tests cover:
- LogLevelEnum and ReportFormatEnum values
- get_level function for various input types
- Settings model field defaults, environment overrides and validation
- get_settings caching
"""

import logging
from pathlib import Path

import pytest
from pydantic import ValidationError

from stablelab.config import (
    LogLevelEnum,
    ReportFormatEnum,
    Settings,
    get_level,
    get_settings,
)


def test_log_level_enum_values():
    """Test that LogLevelEnum values match the standard logging levels."""
    assert LogLevelEnum.DEBUG == logging.DEBUG
    assert LogLevelEnum.INFO == logging.INFO
    assert LogLevelEnum.WARNING == logging.WARNING
    assert LogLevelEnum.ERROR == logging.ERROR
    assert LogLevelEnum.CRITICAL == logging.CRITICAL


def test_report_format_enum_values():
    """Test that ReportFormatEnum values are correct."""
    assert ReportFormatEnum.json == "json"
    assert ReportFormatEnum.csv == "csv"
    assert ReportFormatEnum.human == "human"


def test_get_level_with_string():
    """Test get_level with string input returns the correct logging level."""
    assert get_level("info") == logging.INFO
    assert get_level("DEBUG") == logging.DEBUG
    assert get_level("warning") == logging.WARNING


def test_get_level_with_enum():
    """Test get_level with LogLevelEnum input returns the correct logging level."""
    assert get_level(LogLevelEnum.ERROR) == logging.ERROR


def test_get_level_with_int():
    """Test get_level with integer input returns the same integer."""
    assert get_level(logging.CRITICAL) == logging.CRITICAL


def test_settings_defaults():
    """Test that Settings model has correct default values and types."""
    s = Settings()
    assert s.PROJECT_NAME == "stablelab"
    assert isinstance(s.LOG_LEVEL, LogLevelEnum)
    assert s.OUTPUT_DIR == Path("results")
    assert s.REPORT_FORMAT == ReportFormatEnum.json
    assert s.DEFAULT_TOLERANCE == 1e-6
    assert s.FD_STEP > 0
    assert s.GRADIENT_EPS < s.VERTEX_EXCLUSION
    assert isinstance(s.EIGEN_MAX_ITER, int)
    assert s.RK_MIN_STEP > 0


def test_settings_from_environment(monkeypatch):
    """Test that environment variables override the defaults."""
    monkeypatch.setenv("LOG_LEVEL", "debug")
    monkeypatch.setenv("REPORT_FORMAT", "human")
    monkeypatch.setenv("DEFAULT_TOLERANCE", "1e-9")
    s = get_settings()
    assert s.LOG_LEVEL == LogLevelEnum.DEBUG
    assert s.REPORT_FORMAT == ReportFormatEnum.human
    assert s.DEFAULT_TOLERANCE == 1e-9


def test_get_settings_caching():
    """Test that get_settings returns a cached Settings instance."""
    s1 = get_settings()
    s2 = get_settings()
    assert s1 is s2


def test_settings_gradient_eps_above_exclusion_raises():
    """Test that ValueError is raised if GRADIENT_EPS >= VERTEX_EXCLUSION."""
    with pytest.raises(ValueError) as exc:
        Settings(GRADIENT_EPS=1e-2, VERTEX_EXCLUSION=1e-3)
    assert "GRADIENT_EPS must be smaller" in str(exc.value)


@pytest.mark.parametrize(
    "field", ["DEFAULT_TOLERANCE", "FD_STEP", "GRADIENT_EPS", "RK_MIN_STEP"]
)
def test_settings_positive_fields(field):
    """Test that tolerances and steps must be positive."""
    with pytest.raises(ValidationError):
        Settings(**{field: 0.0})
