"""
Tests for logger setup
"""

import io
import json
import logging

from oodrl_bench.utils import logger_settings, setup_logger


class TestSetupLogger:
    """Test handler configuration"""

    def test_level_by_name(self):
        logger = setup_logger("oodrl_bench.test_level", "debug", stream=io.StringIO())
        assert logger.level == logging.DEBUG

    def test_single_handler(self):
        """Repeated setup replaces the handler"""
        for _ in range(3):
            logger = setup_logger("oodrl_bench.test_handlers", stream=io.StringIO())
        assert len(logger.handlers) == 1

    def test_json_lines(self):
        """JSON records parse and carry the message"""
        stream = io.StringIO()
        logger = setup_logger("oodrl_bench.test_json", "INFO", "json", stream=stream)
        logger.info('AUC "0.91" for cartpole/length/2')
        logger.debug("dropped")

        lines = stream.getvalue().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["message"] == 'AUC "0.91" for cartpole/length/2'
        assert record["level"] == "INFO"

    def test_json_exception(self):
        stream = io.StringIO()
        logger = setup_logger("oodrl_bench.test_exc", format_type="json", stream=stream)
        try:
            raise RuntimeError("boom")
        except RuntimeError:
            logger.error("stage failed", exc_info=True)
        record = json.loads(stream.getvalue())
        assert "RuntimeError: boom" in record["exc_info"]


class TestLoggerSettings:
    """Test reading back a configured logger"""

    def test_unconfigured(self):
        assert logger_settings("oodrl_bench.test_never_configured") is None

    def test_round_trip(self):
        """Worker processes rebuild the parent's level and format from this"""
        setup_logger("oodrl_bench.test_settings", "WARNING", "json", stream=io.StringIO())
        assert logger_settings("oodrl_bench.test_settings") == (logging.WARNING, "json")
        setup_logger("oodrl_bench.test_settings", "DEBUG", stream=io.StringIO())
        assert logger_settings("oodrl_bench.test_settings") == (logging.DEBUG, "text")
