from __future__ import annotations


class WaveletKitError(Exception):
    exit_code = 1


class VerificationError(WaveletKitError):
    exit_code = 1


class FormatError(WaveletKitError):
    exit_code = 2


class DimensionError(WaveletKitError):
    exit_code = 2


class InvariantError(WaveletKitError):
    exit_code = 3


class NumericSingularityError(WaveletKitError):
    exit_code = 4


class SingularMatrixError(NumericSingularityError):
    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class PoleError(NumericSingularityError):
    pass


class ConvergenceError(NumericSingularityError):
    pass


class UnsupportedModeError(WaveletKitError):
    exit_code = 5


class NonCanonicalWarning(UserWarning):
    pass


class IndefiniteCertificateWarning(UserWarning):
    pass
