"""Exception types raised by doamap."""


class DoaMapError(Exception):
    """Base class for all doamap errors."""


class DegenerateAngles(DoaMapError, ValueError):
    """Two requested angles coincide, making the steering matrix rank deficient."""


class NotPositiveDefinite(DoaMapError, ValueError):
    """A matrix required to be Hermitian positive definite is not."""


class SingularNoiseCovariance(DoaMapError, ValueError):
    """The noise-only sample covariance is numerically singular (need M >= m)."""


class RankDeficientSteering(DoaMapError, ValueError):
    """The steering matrix is rank deficient after whitening."""


class NumericalBlowup(DoaMapError, ArithmeticError):
    """An intermediate linear system became singular during the search."""


class EmptySample(DoaMapError, ValueError):
    """An aggregate statistic was requested over an empty sample."""
