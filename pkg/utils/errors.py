# utils/errors.py
"""
Error hierarchy shared by every engine module.

The CLI maps these onto exit codes (see cli/main.py):
  1 - a negative verdict
  2 - a budget or precision cap was hit (inconclusive)
  3 - usage / input errors
"""


class PeriodicError(Exception):
    """Base class for all library errors."""

    exit_code = 3


# --- field construction -------------------------------------------------
class NotMonic(PeriodicError):
    pass


class Reducible(PeriodicError):
    def __init__(self, witness, message: str = ""):
        self.witness = witness
        super().__init__(message or f"polynomial is reducible, factor {witness}")


class IrreducibilityUndetermined(PeriodicError):
    exit_code = 2


class DivisionByZero(PeriodicError, ZeroDivisionError):
    pass


class FieldMismatch(PeriodicError):
    pass


# --- certified numerics -------------------------------------------------
class PrecisionExhausted(PeriodicError):
    exit_code = 2


class NotExpandingPlace(PeriodicError):
    pass


class DenominatorCapExceeded(PeriodicError):
    exit_code = 2


class MemoryBudgetExceeded(PeriodicError):
    exit_code = 2


class UnitCirclePlacePresent(PeriodicError):
    pass


# --- representation engine ----------------------------------------------
class NoAdmissibleDigit(PeriodicError):
    exit_code = 1

    def __init__(self, state, message: str = ""):
        self.state = state
        super().__init__(message or f"no digit keeps the orbit admissible at state {state}")


class IterationCapExceeded(PeriodicError):
    exit_code = 2

    def __init__(self, iterations: int, message: str = ""):
        self.iterations = iterations
        super().__init__(message or f"no cycle found within {iterations} iterations")


# --- surface --------------------------------------------------------------
class UsageError(PeriodicError):
    pass


class ConfigError(PeriodicError):
    pass


class AlphabetError(UsageError):
    pass
