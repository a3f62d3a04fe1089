"""Typed domain errors.

Every error carries a stable ``name`` that the command line writes into its
JSON report, so callers can branch on the failure kind without parsing text.
"""


class AnticycError(Exception):
    """Base class for all domain errors raised by the library."""

    name = "AnticycError"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": self.name, "message": str(self)}
        if self.details:
            out["details"] = {k: _plain(v) for k, v in sorted(self.details.items())}
        return out


def _plain(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return str(v)


def _make(name, doc):
    cls = type(name, (AnticycError,), {"name": name, "__doc__": doc})
    return cls


BoundExceeded = _make("BoundExceeded", "An enumeration bound was exceeded.")
NonSplitPrime = _make("NonSplitPrime", "The prime does not split in the field.")
NonIntegralResult = _make("NonIntegralResult", "A quantity that must be an integer was not.")
ConductorMismatch = _make("ConductorMismatch", "Orders or conductors are not compatible.")
NoSolution = _make("NoSolution", "No finite twist satisfies the unit constraints.")
ClassNumberUnsupported = _make("ClassNumberUnsupported", "Only class number one is supported here.")
NotPrimitive = _make("NotPrimitive", "The character is not primitive.")
ConductorGap = _make("ConductorGap", "Conductor exponent lies in the excluded range 1 <= s < ord_p(N0).")
InternalMismatch = _make("InternalMismatch", "Two independent computations disagree.")
VanishingSplitCoefficient = _make("VanishingSplitCoefficient", "A required Hecke eigenvalue vanishes.")
SchemaError = _make("SchemaError", "Input file does not match the expected schema.")
MultiplicativityError = _make("MultiplicativityError", "Coefficients are not multiplicative.")
PrecisionExhausted = _make("PrecisionExhausted", "No significant p-adic digits remain.")
DivisionNotExact = _make("DivisionNotExact", "An exact division had a nonzero remainder.")
CyclotomicLevelTooSmall = _make("CyclotomicLevelTooSmall", "The coefficient ring lacks the needed roots of unity.")
CoefficientNotIntegral = _make("CoefficientNotIntegral", "A coefficient is not p-integral.")
NotDepleted = _make("NotDepleted", "A component measure is not supported on units.")
PrecisionLoss = _make("PrecisionLoss", "The truncation tail is too large relative to the value.")
IncompleteRepresentatives = _make("IncompleteRepresentatives", "Representatives do not cover the class group.")
DivisionByZero = _make("DivisionByZero", "A displayed denominator vanishes.")
SlowConvergence = _make("SlowConvergence", "The truncated series has not settled.")
UsageError = _make("UsageError", "Bad command line usage.")

# The report name is "RecursionError"; the Python name avoids shadowing the builtin.
HeckeRecursionError = type(
    "HeckeRecursionError",
    (AnticycError,),
    {"name": "RecursionError", "__doc__": "Hecke recursion fails at a good prime."},
)

__all__ = [n for n, v in list(globals().items()) if isinstance(v, type) and issubclass(v, AnticycError)]
