# utils/logger.py
import os
import sys


def _is_truthy(value: str) -> bool:
    return value.strip().lower() in {"1", "true", "yes", "on"}


VERBOSE_LOGS = _is_truthy(os.getenv("PERIODIC_DEBUG_LOGS", "0"))


def log_debug(message: str) -> None:
    if VERBOSE_LOGS:
        print(message, file=sys.stderr)


def log_info(message: str) -> None:
    # stdout carries JSON/CSV results, progress goes to stderr
    print(message, file=sys.stderr)
