"""
Unit tests for settings, logging setup, the error hierarchy and HTTP error mapping.
"""

import json
import logging

import pytest
from arthurkit import logging_setup
from arthurkit.config import Settings
from arthurkit.exceptions import (
    ArthurkitError,
    BudgetExceededError,
    InvalidInputError,
    InvariantViolation,
    NotApplicableError,
    OracleMissError,
    ParseError,
    VanishingError,
)
from arthurkit.utils import domain_errors, sanitize_log_value
from fastapi import HTTPException


class TestSettings:
    def test_defaults(self, fixtures_dir):
        s = Settings()
        assert s.version == "0.4.0"
        assert s.node_budget == 200_000
        assert s.threads == 1
        assert s.fixtures_path == fixtures_dir

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("ARTHURKIT_THREADS", "4")
        monkeypatch.setenv("ARTHURKIT_SYMBOL_ASCII", "true")
        s = Settings()
        assert s.threads == 4
        assert s.symbol_ascii is True

    @pytest.mark.parametrize("field", ["threads", "node_budget", "placement_budget"])
    def test_must_be_positive(self, field):
        with pytest.raises(ValueError):
            Settings(**{field: 0})

    def test_missing_oracle_file_only_warns(self, tmp_path, caplog):
        with caplog.at_level(logging.WARNING, logger="arthurkit.config"):
            s = Settings(oracle_file=str(tmp_path / "absent.json"))
        assert s.oracle_file.endswith("absent.json")
        assert "not found" in caplog.text


class TestConfigureLogging:
    @pytest.fixture(autouse=True)
    def fresh_root(self, monkeypatch):
        monkeypatch.setattr(logging_setup, "_CONFIGURED", False)
        monkeypatch.setattr(logging.root, "handlers", [])
        level = logging.root.level
        yield
        logging.root.setLevel(level)

    def test_json_records(self):
        logging_setup.configure_logging("INFO", debug=False)
        (handler,) = logging.root.handlers
        record = logging.LogRecord("arthurkit.engine", logging.INFO, __file__, 1, "built %d", (3,), None)
        document = json.loads(handler.format(record))
        assert document["level"] == "INFO"
        assert document["logger"] == "arthurkit.engine"
        assert document["message"] == "built 3"
        assert "timestamp" in document

    def test_debug_is_plain_text(self):
        logging_setup.configure_logging("DEBUG", debug=True)
        (handler,) = logging.root.handlers
        assert type(handler.formatter) is logging.Formatter
        assert logging.root.level == logging.DEBUG

    def test_second_call_is_a_no_op(self):
        logging_setup.configure_logging("INFO", debug=False)
        first = logging.root.handlers
        logging_setup.configure_logging("DEBUG", debug=True)
        assert logging.root.handlers is first
        assert logging.root.level == logging.INFO


class TestErrors:
    @pytest.mark.parametrize(
        "error, code, exit_code, status",
        [
            (InvalidInputError("x"), "invalid_input", 2, 400),
            (ParseError("x", position=4), "parse_error", 64, 422),
            (VanishingError("x"), "vanishing", 2, 400),
            (NotApplicableError("x"), "not_applicable", 2, 400),
            (BudgetExceededError("x", budget=10), "budget_exceeded", 69, 507),
            (OracleMissError("x"), "oracle_miss", 2, 400),
            (InvariantViolation("x"), "invariant_violation", 70, 500),
        ],
    )
    def test_codes(self, error, code, exit_code, status):
        assert isinstance(error, ArthurkitError)
        assert error.code == code
        assert error.exit_code == exit_code
        assert error.http_status == status

    def test_document(self):
        error = InvalidInputError("bad order", order=[1, 0])
        assert error.to_dict() == {"error": "invalid_input", "message": "bad order", "details": {"order": [1, 0]}}

    def test_budget_trail(self):
        error = BudgetExceededError("too many nodes", budget=5, trail=["a", "b"])
        assert error.details == {"budget": 5, "trail": ["a", "b"]}
        assert error.trail == ["a", "b"]

    def test_parse_position(self):
        assert ParseError("x", position=7).details["position"] == 7


class TestDomainErrors:
    def test_mapped_to_http(self):
        with pytest.raises(HTTPException) as exc_info:
            with domain_errors():
                raise ParseError("Invalid JSON", position=3)
        assert exc_info.value.status_code == 422
        assert exc_info.value.detail["error"] == "parse_error"

    def test_other_errors_pass_through(self):
        with pytest.raises(KeyError):
            with domain_errors():
                raise KeyError("x")

    def test_sanitize(self):
        assert sanitize_log_value("a\r\nb") == "ab"
