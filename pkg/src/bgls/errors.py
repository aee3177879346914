"""Exception hierarchy shared by the whole package."""


class BglsError(Exception):
    """Base class for package errors."""


class QuadratureError(BglsError):
    """Base class for quadrature failures."""


class NonConvergence(QuadratureError):
    """Error estimate stalled above the requested tolerance."""


class DivergentIntegral(QuadratureError):
    """Truncation refinement shows unbounded growth."""


class PoleOutsideDomain(QuadratureError):
    """Principal-value pole not in the interior of the domain."""


class DivergentSum(BglsError):
    """Series norm diverges."""


class NoCertificate(BglsError):
    """Sequence lacks the decay certificate needed for a certified tail."""


class UnknownTail(BglsError):
    """Tail function not computable for this input."""


class UnboundedNorm(BglsError):
    """Grand-Lebesgue norm grows without bound under grid refinement."""


class EmptySupport(BglsError):
    """No exponent interval with a finite norm."""


class NoRoot(BglsError):
    """Continuity equation has no solution in the admissible interval."""


class ConstraintViolation(BglsError):
    """An exponent relation required by a bound functional fails."""


class OutOfRegion(BglsError):
    """Exponent outside the admissible region of an index map."""


class HypothesisMismatch(BglsError):
    """Kernel metadata does not match the requested asymptotic regime."""


class BadParams(BglsError):
    """Parameters outside the documented range."""


class UnknownTheorem(BglsError):
    """Verification requested for an unknown theorem id."""


class ResolutionError(BglsError):
    """CLI identifier could not be resolved."""
