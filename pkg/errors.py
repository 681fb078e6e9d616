# =========================================================
# errors.py - EXCEPTIONS SHARED BY ALL SELP-KIT MODULES
# =========================================================

from typing import Optional


class SelpError(Exception):
    """Base class for every failure the toolchain reports to the user"""

    code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ElpSyntaxError(SelpError):
    """Text could not be parsed; carries the offending source span"""

    def __init__(self, message: str, span=None):
        if span is not None:
            message = f"{message} (line {span.line}, column {span.column})"
        super().__init__(message)
        self.span = span


class InvalidProgram(SelpError):
    def __init__(self, message: str, diagnostics: Optional[list] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class InvalidGuess(SelpError):
    pass


class CapExceeded(SelpError):
    """Brute-force enumeration would exceed a configured cap"""


class BudgetExceeded(SelpError):
    """Grounding or search exceeded a configured budget"""


class UnsafeRule(SelpError):
    pass


class InvalidDecomposition(SelpError):
    def __init__(self, message: str, diagnostics: Optional[list] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class QbfFormatError(SelpError):
    pass


class WitnessFormatError(SelpError):
    pass
