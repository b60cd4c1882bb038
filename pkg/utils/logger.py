"""
Logger - Structured logging for dtilink
JSON-lines log files with rotation; warnings and errors echoed to the console
"""
import json
import os
import sys
import threading
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

# Fix Windows encoding
if sys.platform == 'win32':
    if hasattr(sys.stderr, 'reconfigure'):
        sys.stderr.reconfigure(encoding='utf-8', errors='replace')

from rich.console import Console
from rich.markup import escape

console = Console(stderr=True)


class LogLevel(Enum):
    DEBUG = 10
    INFO = 20
    WARNING = 30
    ERROR = 40
    CRITICAL = 50


def _default_log_dir() -> Path:
    return Path(os.getenv("DTILINK_LOG_DIR") or Path.cwd() / "logs")


def _default_level() -> LogLevel:
    name = os.getenv("DTILINK_LOG_LEVEL", "INFO").upper()
    return LogLevel[name] if name in LogLevel.__members__ else LogLevel.INFO


class Logger:
    """Structured logger with file rotation"""

    def __init__(
        self,
        name: str = "dtilink",
        log_dir: Optional[str] = None,
        level: Optional[LogLevel] = None,
        max_file_size: int = 10 * 1024 * 1024,  # 10MB
        max_files: int = 5
    ):
        self.name = name
        self.log_dir = Path(log_dir) if log_dir else _default_log_dir()
        self.log_dir.mkdir(parents=True, exist_ok=True)

        self.level = level or _default_level()
        self.max_file_size = max_file_size
        self.max_files = max_files

        self.current_file = self.log_dir / f"{name}_{datetime.now().strftime('%Y%m%d')}.log"
        self._lock = threading.Lock()

        self.session_id = datetime.now().strftime('%Y%m%d_%H%M%S')
        self.session_logs: List[Dict[str, Any]] = []

    def _should_log(self, level: LogLevel) -> bool:
        return level.value >= self.level.value

    def _rotate_if_needed(self):
        """Rotate log file if it exceeds max size"""
        if self.current_file.exists() and self.current_file.stat().st_size > self.max_file_size:
            stem = f"{self.name}_{datetime.now().strftime('%Y%m%d')}"
            for i in range(self.max_files - 1, 0, -1):
                old_file = self.log_dir / f"{stem}_{i}.log"
                if old_file.exists():
                    old_file.replace(self.log_dir / f"{stem}_{i + 1}.log")
            self.current_file.replace(self.log_dir / f"{stem}_1.log")

    def _write_log(self, entry: Dict[str, Any]):
        with self._lock:
            self._rotate_if_needed()
            with open(self.current_file, 'a', encoding='utf-8') as f:
                f.write(json.dumps(entry, ensure_ascii=False, default=str) + '\n')
            self.session_logs.append(entry)

    def _create_entry(self, level: LogLevel, message: str, context: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "timestamp": datetime.now().isoformat(),
            "level": level.name,
            "session_id": self.session_id,
            "logger": self.name,
            "message": message,
            "context": context or {}
        }

    def _log(self, level: LogLevel, message: str, context: Dict[str, Any]):
        if self._should_log(level):
            self._write_log(self._create_entry(level, message, context))

    def debug(self, message: str, **context):
        self._log(LogLevel.DEBUG, message, context)

    def info(self, message: str, **context):
        self._log(LogLevel.INFO, message, context)

    def warning(self, message: str, **context):
        if self._should_log(LogLevel.WARNING):
            self._log(LogLevel.WARNING, message, context)
            console.print(f"[yellow]⚠️ {escape(message)}[/yellow]", markup=True, highlight=False)

    def error(self, message: str, **context):
        if self._should_log(LogLevel.ERROR):
            self._log(LogLevel.ERROR, message, context)
            console.print(f"[red]❌ {escape(message)}[/red]", markup=True, highlight=False)

    # Domain events

    def stage_complete(self, stage: str, duration: float, **context):
        self.info(
            f"Stage completed: {stage}",
            stage=stage,
            duration=duration,
            event="stage_complete",
            **context
        )

    def fold_complete(self, fold: int, config: str, positives: int = None, duration: float = None):
        self.info(
            f"Fold {fold} completed: {config}",
            fold=fold,
            config=config,
            positives=positives,
            duration=duration,
            event="fold_complete"
        )

    def experiment_start(self, configs: List[str], k: int, seed: int):
        self.info(
            "Experiment started",
            configs=configs,
            folds=k,
            seed=seed,
            event="experiment_start"
        )

    def experiment_complete(self, success: bool, duration: float = None):
        self.info(
            f"Experiment completed: {'success' if success else 'with failures'}",
            success=success,
            duration=duration,
            event="experiment_complete"
        )

    def get_session_logs(self, level: LogLevel = None) -> List[Dict[str, Any]]:
        """Get logs from current session"""
        if level:
            return [
                log for log in self.session_logs
                if LogLevel[log['level']].value >= level.value
            ]
        return self.session_logs


# Singleton instance
_logger: Optional[Logger] = None
_logger_lock = threading.Lock()


def get_logger(name: str = "dtilink") -> Logger:
    """Get singleton Logger instance"""
    global _logger
    if _logger is None:
        with _logger_lock:
            if _logger is None:
                _logger = Logger(name)
    return _logger


def configure_logger(log_dir: Optional[str] = None, level: Optional[LogLevel] = None) -> Logger:
    """Replace the singleton, e.g. to log into an output directory"""
    global _logger
    with _logger_lock:
        _logger = Logger("dtilink", log_dir, level)
    return _logger


def reset_logger():
    """Reset the singleton (useful for testing)"""
    global _logger
    _logger = None
