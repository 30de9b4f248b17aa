"""
Configuration management for crinifer
"""
import os
from typing import Any, Dict

from dotenv import load_dotenv

load_dotenv()


def _default_threads() -> int:
    return min(8, os.cpu_count() or 1)


class Config:
    """Environment-level settings"""

    # Parallelism
    THREADS = int(os.getenv("CRINIFER_THREADS", str(_default_threads())))

    # Numerics
    ESCAPE_THRESHOLD = float(os.getenv("CRINIFER_ESCAPE_THRESHOLD", "1e300"))
    SYMBOL_WINDOW = int(os.getenv("CRINIFER_SYMBOL_WINDOW", "16"))
    MEMBERSHIP_TOL = float(os.getenv("CRINIFER_MEMBERSHIP_TOL", "1e-6"))
    DIVERGENCE_FACTOR = float(os.getenv("CRINIFER_DIVERGENCE_FACTOR", "10.0"))

    # Rendering
    MAX_RESOLUTION = int(os.getenv("CRINIFER_MAX_RESOLUTION", "16384"))

    # Logging
    LOG_LEVEL = os.getenv("CRINIFER_LOG_LEVEL", "INFO")

    @classmethod
    def get_all(cls) -> Dict[str, Any]:
        """Get all configuration values"""
        return {
            "threads": cls.THREADS,
            "escape_threshold": cls.ESCAPE_THRESHOLD,
            "symbol_window": cls.SYMBOL_WINDOW,
            "membership_tol": cls.MEMBERSHIP_TOL,
            "divergence_factor": cls.DIVERGENCE_FACTOR,
            "max_resolution": cls.MAX_RESOLUTION,
            "log_level": cls.LOG_LEVEL,
        }
