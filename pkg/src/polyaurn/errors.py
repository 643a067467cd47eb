"""Exception hierarchy shared across the package."""


class PolyaUrnError(Exception):
    """Base class for all errors raised by this package."""


class UrnValidationError(PolyaUrnError, ValueError):
    """An urn definition violates a structural constraint."""


class SupportViolation(UrnValidationError):
    """A replacement atom removes a ball other than the drawn one."""


class ProbabilityMass(UrnValidationError):
    """Atom probabilities of a replacement measure do not sum to one."""


class ZeroActivityRule(UrnValidationError):
    """A zero-activity colour carries a non-trivial replacement measure."""


class NegativeActivity(UrnValidationError):
    """An activity is negative."""


class NegativeInitial(UrnValidationError):
    """An initial ball count is negative."""


class NotInjective(PolyaUrnError, ValueError):
    """A colour map used for a measure pushforward is not injective."""


class SizeCapExceeded(PolyaUrnError):
    """A backtracking search was requested beyond its configured size cap."""


class ConvergenceFailure(PolyaUrnError):
    """The numerical eigensolver failed to converge."""


class NonRealTop(PolyaUrnError):
    """The eigenvalue of maximal real part has a non-negligible imaginary
    part, which Perron-Frobenius theory rules out for intensity matrices."""


class AssumptionsFail(PolyaUrnError):
    """A computation required assumptions (A1)-(A6) that do not hold.

    Attributes:
        assumption: name of the first failing assumption, e.g. "A4".
        which: which operand failed ("left", "right", or "urn").
    """

    def __init__(self, assumption, which, detail=""):
        self.assumption = assumption
        self.which = which
        super().__init__(f"assumption {assumption} fails for {which} urn: {detail}")


class DegenerateNormalization(PolyaUrnError):
    """The eigenvector normalization <a, v1> = 1 is numerically degenerate."""


class AlreadyExtinct(PolyaUrnError):
    """A step was requested from an essentially extinct state."""


class ZeroSteps(PolyaUrnError):
    """Normalized composition is undefined for a trace with zero steps."""


class NotASlowedProduct(PolyaUrnError):
    """The trace was not produced from product(u, scalar_urn(alpha)) with a
    retained draw log."""


class InputError(PolyaUrnError, ValueError):
    """Malformed input file or field (CLI exit code 2)."""
