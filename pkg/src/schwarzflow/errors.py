"""Exception types raised across the package."""


class SchwarzFlowError(Exception):
    """Base class for all package errors."""


class RankDeficientError(SchwarzFlowError, ValueError):
    """A least-squares design matrix does not have full column rank."""


class ContourError(SchwarzFlowError, ValueError):
    """Contour integration hit a non-finite sample or failed to converge."""


class SingularPointError(SchwarzFlowError, ValueError):
    """Evaluation requested at a singular point.

    The offending singularity record is attached as ``record``.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class UnsupportedFamilyError(SchwarzFlowError, NotImplementedError):
    """The operation is not defined for the requested curve family."""


class InadmissibleSinksError(SchwarzFlowError, ValueError):
    """The sink configuration cannot drive the requested family."""


class ParameterRecoveryError(SchwarzFlowError, ValueError):
    """No family parameters reproduce the requested coefficients."""


class CollocationError(SchwarzFlowError, RuntimeError):
    """Boundary collocation residual exceeded its threshold."""


class DomainError(SchwarzFlowError, ValueError):
    """A point lies outside the domain where it is required to lie."""


class UnbalancedLogError(SchwarzFlowError, ValueError):
    """Logarithmic terms on the symmetry axis do not cancel."""
