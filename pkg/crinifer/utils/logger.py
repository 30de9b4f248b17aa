"""
Structured logging for crinifer
"""
import logging
import sys
from typing import Any, Optional

from ..config import Config

ROOT_LOGGER = "crinifer"


class RunLogger:
    """Structured logger for trace and check events"""

    def __init__(self, log_level: Optional[int] = None):
        """Initialize logger"""
        if log_level is None:
            log_level = self._get_log_level(Config.LOG_LEVEL)
        self.logger = logging.getLogger(ROOT_LOGGER)
        self.logger.setLevel(log_level)

        # Create console handler if not exists
        if not self.logger.handlers:
            handler = logging.StreamHandler(sys.stdout)
            handler.setLevel(log_level)

            formatter = logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                datefmt='%Y-%m-%d %H:%M:%S'
            )
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)

    def log_trace(self, kind: str, address: str, depth: int, points: int):
        """Log a finished trace"""
        self.logger.info(
            f"Trace: {kind} | Address: {address} | Depth: {depth} | Points: {points}"
        )

    def log_report(self, name: str, report: Any):
        """Log a check report; failures are warnings"""
        passed = getattr(report, "passed", False)
        level = logging.INFO if passed else logging.WARNING
        status = "PASS" if passed else "FAIL"
        self.logger.log(level, f"Check: {name} | Status: {status}")

    def log_failure(self, context: str, error: Exception):
        """Log an operation that raised"""
        self.logger.error(f"Failure: {context} | {type(error).__name__}: {error}")

    def _get_log_level(self, name: str) -> int:
        """Map a level name to a logging level"""
        mapping = {
            "debug": logging.DEBUG,
            "info": logging.INFO,
            "warning": logging.WARNING,
            "error": logging.ERROR,
        }
        return mapping.get(str(name).lower(), logging.INFO)
