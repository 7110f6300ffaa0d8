"""Exception hierarchy for the planning engine."""


class EonPlanError(Exception):
    """Base class for all engine errors."""


class TopologyError(EonPlanError):
    """Malformed physical topology: parse failure, unknown node, bad span sums."""


class RoutingError(EonPlanError):
    """No path exists between the requested endpoints."""


class CatalogError(EonPlanError):
    """Transceiver catalog generation or lookup failed."""


class SpectrumStateError(EonPlanError):
    """Illegal grid mutation, e.g. releasing a demand that holds no spectrum."""


class ModelDomainError(EonPlanError):
    """Channel layout outside the interference model's domain (overlapping channels)."""


class EstimatorError(EonPlanError):
    """Numerical estimator failed to converge within its evaluation budget."""


class NoiseUndefinedError(EonPlanError):
    """OSNR is undefined because every noise contribution is zero."""


class ComparisonError(EonPlanError):
    """Plan reports cannot be compared (mismatched demand sets)."""


class ReportError(EonPlanError):
    """Report serialization or deserialization failed."""
