"""Exception types raised by the hingechain library."""


class HingeChainError(Exception):
    """Base class for all library-specific errors."""


class GeometryError(HingeChainError):
    """An operation received geometry it cannot handle (wrong codimension, ...)."""


class DegenerateHinge(HingeChainError):
    """A hinge passes through the reference point, so its frame is undefined."""


class ChainValidationError(HingeChainError):
    """A chain description violates a structural invariant."""


class ChainFormatError(ChainValidationError):
    """A chain file could not be parsed.  Carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotCritical(HingeChainError):
    """A formula valid only at critical configurations was used elsewhere."""


class ZeroValue(HingeChainError):
    """The end-point coincides with the origin, so the head-to-tail line is undefined."""


class NotIncident(HingeChainError):
    """The head-to-tail line misses at least one hinge beyond tolerance."""


class Degenerate(HingeChainError):
    """Intersection parameters violate the genericity needed by a closed form."""


class PointOffHinge(HingeChainError):
    """A polygonal-arc point does not lie on its hinge."""


class NoConvergence(HingeChainError):
    """An iterative solve exhausted its budget.  Carries the last iterate."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class FoldAmbiguity(HingeChainError):
    """A straightening rotation is underdetermined by coincident arc points."""


class DegenerateHyperplane(HingeChainError):
    """A reflection hyperplane through a marked point and a hinge is undefined."""


class NotFlattenable(HingeChainError):
    """The reference placement does not put all panels in one hyperplane."""


class NotPanelChain(HingeChainError):
    """A panel-only operation was called without panel data."""


class Inconsistent(HingeChainError):
    """Mutually exclusive census outcomes were detected (numerical misclassification)."""
