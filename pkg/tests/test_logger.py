"""
Unit tests for the structured logger
"""
import json

from utils.logger import LogLevel, Logger, configure_logger, get_logger, reset_logger


class TestLogger:
    """Test Logger functionality"""

    def test_writes_json_lines(self, temp_dir):
        """Every entry is one JSON object with its context"""
        logger = Logger(log_dir=str(temp_dir))
        logger.info("Dataset parsed", interactions=3)

        lines = logger.current_file.read_text(encoding="utf-8").splitlines()
        entry = json.loads(lines[-1])
        assert entry["level"] == "INFO"
        assert entry["message"] == "Dataset parsed"
        assert entry["context"] == {"interactions": 3}

    def test_level_filter(self, temp_dir):
        """Entries below the level are dropped"""
        logger = Logger(log_dir=str(temp_dir), level=LogLevel.WARNING)
        logger.info("hidden")
        logger.warning("shown")
        assert [e["message"] for e in logger.get_session_logs()] == ["shown"]

    def test_domain_events(self, temp_dir):
        """Fold and stage events carry their fields"""
        logger = Logger(log_dir=str(temp_dir))
        logger.fold_complete(2, "cn-path", positives=17, duration=0.5)
        logger.stage_complete("score", 1.25)
        fold, stage = logger.get_session_logs()
        assert fold["context"]["event"] == "fold_complete"
        assert fold["context"]["positives"] == 17
        assert stage["context"] == {"stage": "score", "duration": 1.25, "event": "stage_complete"}

    def test_session_filter_by_level(self, temp_dir):
        """get_session_logs filters by minimum level"""
        logger = Logger(log_dir=str(temp_dir))
        logger.info("a")
        logger.error("b")
        assert [e["message"] for e in logger.get_session_logs(LogLevel.ERROR)] == ["b"]


class TestLoggerSingleton:
    """Test singleton helpers"""

    def test_get_logger_is_shared(self):
        """get_logger returns the same instance until reset"""
        first = get_logger()
        assert get_logger() is first
        reset_logger()
        assert get_logger() is not first

    def test_configure_logger(self, temp_dir):
        """configure_logger replaces the singleton with a new directory"""
        logger = configure_logger(str(temp_dir / "logs"))
        assert get_logger() is logger
        assert (temp_dir / "logs").is_dir()
