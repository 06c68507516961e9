"""Exception hierarchy shared by all modules."""


class MaslovCWError(Exception):
    """Base class for all library errors."""


class SingularInput(MaslovCWError):
    """Matrix too far from invertible for the requested factorization."""


class BranchCut(MaslovCWError):
    """An eigenphase sits on the principal-branch cut at +-pi."""


class DegenerateSpectrum(MaslovCWError):
    """Joint diagonalization failed for every deterministic shift."""


class RankMismatch(MaslovCWError):
    """Operands carry different ranks."""


class NotTransverse(MaslovCWError):
    """Lagrangian pair intersects nontrivially where transversality is required."""


class Undersampled(MaslovCWError):
    """Sampled data varies too fast for the phase-unwrap or derivative guard."""


class ZeroSample(MaslovCWError):
    """A winding-number input touches zero."""


class LoopNotClosed(MaslovCWError):
    """End-to-start frames of a sampled path do not span the same Lagrangian."""


class UnknownName(MaslovCWError):
    """No built-in object registered under the requested name."""


class Unrefined(MaslovCWError):
    """A per-face curvature angle exceeds the branch guard; refine the mesh."""


class NonUnitaryConnection(MaslovCWError):
    """Connection form is not skew-Hermitian and was not tagged as such."""


class InconsistentFormulas(MaslovCWError):
    """Two index formulas that must agree exactly disagree (internal bug)."""


class ViolatedIdentity(MaslovCWError):
    """A numerical identity check failed; carries full diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
