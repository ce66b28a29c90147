"""Exception types shared by all staudtlab modules."""


class StaudtlabError(Exception):
    """Base class for all staudtlab errors."""


class RingSyntaxError(StaudtlabError):
    """Malformed ring-spec or element expression; carries the offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class RingSemanticError(StaudtlabError):
    """Well-formed spec text with invalid parameters (n < 2, p not prime, ...)."""


class NonUnitError(StaudtlabError):
    """Inverse requested for an element without a two-sided inverse."""

    def __init__(self, element, message="element is not a unit"):
        super().__init__(message)
        self.element = element


class InfiniteRingError(StaudtlabError):
    """Operation needs a finite carrier but the ring is infinite."""


class UnsupportedError(StaudtlabError):
    """No decision procedure for this ring kind."""


class NotAdmissibleError(StaudtlabError):
    """Pair cannot be completed to an invertible 2x2 array."""


class NotAffineError(StaudtlabError):
    """Point has no affine coordinate (second coordinate not a unit)."""


class FrameDegenerateError(StaudtlabError):
    """Cross-ratio frame points are not pairwise distant."""


class NotResolvableError(StaudtlabError):
    """Fourth point is not distant from the first frame point."""


class TwoNotUnitError(StaudtlabError):
    """2 = 1+1 must be invertible for this operation."""


class NonUnitDifferenceError(StaudtlabError):
    """A difference (or derived term) that must be inverted is not a unit."""

    def __init__(self, witness, message="non-unit difference"):
        super().__init__(message)
        self.witness = witness


class InvalidParameterError(StaudtlabError):
    """Named-map parameter out of range (non-unit conjugator, bad power, ...)."""


class BudgetExceededError(StaudtlabError):
    """Search space larger than the configured budget."""

    def __init__(self, estimate, budget):
        super().__init__(f"estimated {estimate} candidates exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


class FrameNotFixedError(StaudtlabError):
    """Line map does not fix the reference points 0, 1, infinity."""


class CharacteristicTwoError(StaudtlabError):
    """Operation undefined in characteristic two."""


class NotJordanError(StaudtlabError):
    """Map fails the Jordan homomorphism axioms."""


class InconsistentParameterizationError(StaudtlabError):
    """Two parameterizations of one point received different images."""

    def __init__(self, witness, message="inconsistent parameterization"):
        super().__init__(message)
        self.witness = witness


class DegenerateArgumentsError(StaudtlabError):
    """Geometric arguments coincide or are otherwise degenerate."""


class DegenerateAuxError(StaudtlabError):
    """Auxiliary elements of a geometric construction are in bad position."""


class ChainMismatchError(StaudtlabError):
    """Perspectivity chain links do not compose."""


class PreconditionFailedError(StaudtlabError):
    """A declared operation precondition does not hold."""
