"""Exception hierarchy shared by all modules.

Every error names the violated condition and, where meaningful, carries the
offending magnitude so callers (and the CLI) can report it.
"""


class DomainError(Exception):
    """Base class for physically or numerically invalid inputs."""


class NotHermitian(DomainError):
    pass


class TraceNotOne(DomainError):
    pass


class NotPositive(DomainError):
    pass


class DimMismatch(DomainError):
    pass


class NotFockBasis(DomainError):
    pass


class OrderTooHigh(DomainError):
    pass


class TailMassTooLarge(DomainError):
    pass


class GridTooCoarse(DomainError):
    pass


class UnsupportedCombination(DomainError):
    pass


class Unphysical(DomainError):
    """Level constraints violate a physicality condition (e.g. N(N+1) < |M|^2)."""


class SuperThermal(DomainError):
    """Photon-number variance exceeds the thermal bound; the mean/variance
    level has no normalizable maximum-entropy state."""


class Infeasible(DomainError):
    """No density matrix satisfies the constraint set."""


class MaxIterExceeded(DomainError):
    pass


class Overflow(DomainError):
    pass


class UnsupportedPreset(DomainError):
    pass


class UnphysicalMeans(DomainError):
    pass


class NoPhysicalPoint(DomainError):
    """Every candidate in a parametric-completion scan failed positivity."""


class PurityViolation(DomainError):
    """Asymptotic pure-state inference requires unit Bloch-vector length.

    Carries the offending squared length as ``total``.
    """

    def __init__(self, total: float):
        self.total = total
        super().__init__(
            f"sum of squared means is {total:.6g}, a pure state requires 1"
        )


class QuadratureUnderflow(DomainError):
    pass


class NegativeWeight(DomainError):
    pass


class SingularSystem(DomainError):
    pass


class InvalidPovm(DomainError):
    pass


class RankDeficiency(DomainError):
    pass
