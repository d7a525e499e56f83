"""Exception types shared across the package."""


class EllregError(Exception):
    """Base class for all package-specific errors."""


class SingularCurve(EllregError):
    """Raised when a Weierstrass model has discriminant zero."""


class NotMinimalAtP(EllregError):
    """Raised when a local reduction routine is handed a model that is not
    minimal (or not integral) at the requested prime."""


class PointNotOnCurve(EllregError):
    """Raised when a point fails the Weierstrass equation of the given model."""


class InfinityPoint(EllregError):
    """Raised when an affine-only operation receives the point at infinity."""


class DegenerateLattice(EllregError):
    """Raised when a Gram matrix is not positive definite beyond its certified
    error bounds (e.g. generators that are dependent or torsion)."""


class EnumerationBudgetExceeded(EllregError):
    """Raised when a lattice enumeration would visit more vectors than the
    configured cap allows."""


class ParseError(EllregError):
    """Raised on malformed harness input; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TorsionMismatch(EllregError):
    """Raised when a record's declared torsion order disagrees with the
    computed torsion subgroup."""
