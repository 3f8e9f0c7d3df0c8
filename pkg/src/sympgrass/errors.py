"""Exception hierarchy for sympgrass."""


class SympGrassError(Exception):
    """Base class for all errors raised by this package."""


class RankDeficient(SympGrassError, ValueError):
    """Spanning matrix has lower numerical rank than its column count."""


class ClassificationUnstable(SympGrassError, ArithmeticError):
    """A singular value sits too close to the rank cut to decide the type."""


class SpectrumPairingFailure(SympGrassError, ArithmeticError):
    """Eigenvalues of the Kahler operator could not be grouped into pairs."""


class NotApplicable(SympGrassError, ValueError):
    pass


class InconsistentSignature(SympGrassError, ValueError):
    pass


class InvalidSplitting(SympGrassError, ValueError):
    pass


class DegeneratePairing(InvalidSplitting):
    """The omega-pairing between the isotropic kernel and its dual is singular."""


class NotTotallyReal(SympGrassError, ValueError):
    pass


class NotHalfDimensional(SympGrassError, ValueError):
    pass


class NotJCompatible(SympGrassError, ValueError):
    pass


class NonSymmetricInput(SympGrassError, ValueError):
    pass


class FlavorViolation(SympGrassError, ValueError):
    pass


class NotCritical(SympGrassError, ValueError):
    pass


class StepRejected(SympGrassError):
    """Raised by a flow step whose energy went up; carries both energies."""

    def __init__(self, f_before, f_after, h):
        super().__init__(f"energy increased from {f_before!r} to {f_after!r} at step {h!r}")
        self.f_before = f_before
        self.f_after = f_after
        self.h = h
