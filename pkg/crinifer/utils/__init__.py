"""Shared utilities for crinifer"""
from .errors import CriniferError
from .logger import RunLogger
from .models import Ordering, PrecisionMode, Sign

__all__ = ["CriniferError", "RunLogger", "Ordering", "PrecisionMode", "Sign"]
