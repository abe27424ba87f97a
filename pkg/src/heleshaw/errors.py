"""Exception types shared across the library."""


class HeleShawError(Exception):
    """Base class for all library errors."""


class DomainError(HeleShawError):
    """Input lies outside the mathematical domain of the operation."""


class NotExactDerivative(HeleShawError):
    """The differential polynomial is not a total x-derivative."""


class JetTooShort(HeleShawError):
    """The jet does not carry enough derivative values for evaluation."""


class NoConvergence(HeleShawError):
    """Iteration failed to converge (typically: entered a multivalued region)."""


class DerivativeVanishes(HeleShawError):
    """Newton derivative vanished: at or beyond a gradient catastrophe."""


class SingularJacobian(HeleShawError):
    """2-d Newton hit a singular Jacobian (critical point of the map)."""


class DegenerateReduction(HeleShawError):
    """The multiscale reduction degenerates (leading multiplier vanishes)."""


class UnsupportedOrder(HeleShawError):
    """Criticality order not covered by the implemented reduction."""


class OutOfRange(HeleShawError):
    """Evaluation point lies outside the constructed solution's domain."""


class TooCloseToPole(HeleShawError):
    """Evaluation point is too close to a solution pole to be reliable."""


class NoPoleInRange(HeleShawError):
    """Integration finished without reaching a blow-up point."""


class StepSizeUnderflow(HeleShawError):
    """Integrator step size underflowed away from a detected pole."""


class SeedUnreliable(HeleShawError):
    """Seeding abscissa too small for the asymptotic series to be trusted."""


class ConfigError(HeleShawError):
    """Malformed configuration file or option value."""
