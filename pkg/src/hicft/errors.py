"""Exception hierarchy with machine-readable error codes.

Every exception carries a ``code`` attribute; the CLI maps codes to exit
statuses (2 for NOT_STABILIZED, 3 for unsupported input, 1 otherwise).
"""


class HicftError(Exception):
    code = "ERROR"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details


class UnsupportedInput(HicftError):
    """Base class for inputs outside the supported computational range."""

    code = "UNSUPPORTED"


class MixedModulus(HicftError):
    code = "MIXED_MODULUS"


class DivisionByZero(HicftError, ZeroDivisionError):
    code = "DIVISION_BY_ZERO"


class ZeroElement(HicftError):
    code = "ZERO_ELEMENT"


class PrecisionExhausted(HicftError):
    code = "PRECISION_EXHAUSTED"


class UnitConstantRequired(HicftError):
    code = "UNIT_CONSTANT_REQUIRED"


class ExactFormRequired(UnsupportedInput):
    code = "EXACT_FORM_REQUIRED"


class UnsupportedField(UnsupportedInput):
    code = "UNSUPPORTED_FIELD"


class WildCoefficients(UnsupportedInput):
    code = "WILD_COEFFICIENTS"


class UnsupportedPrime(UnsupportedInput):
    code = "UNSUPPORTED_PRIME"


class AnalyticSplittingUnsupported(UnsupportedInput):
    code = "ANALYTIC_SPLITTING_UNSUPPORTED"


class UnsupportedElementForm(UnsupportedInput):
    code = "UNSUPPORTED_ELEMENT_FORM"


class NotMaximalChain(HicftError):
    code = "NOT_MAXIMAL_CHAIN"


class NotStabilized(HicftError):
    code = "NOT_STABILIZED"


class FaceMapIncompatible(HicftError):
    code = "FACE_MAP_INCOMPATIBLE"


class DegreeOutOfRange(HicftError):
    code = "DEGREE_OUT_OF_RANGE"


class GoldenMismatch(HicftError):
    code = "GOLDEN_MISMATCH"


class ParseError(UnsupportedInput):
    code = "PARSE_ERROR"


class InvalidJob(HicftError):
    code = "INVALID_JOB"
