"""Exception types shared across the laboratory."""


class MonopoleLabError(Exception):
    """Base class for all errors raised by this package."""


class PunctureError(MonopoleLabError, ValueError):
    """A field was queried at (or a stencil touched) a singular point."""


class UnsupportedDensityError(MonopoleLabError, TypeError):
    """Energy-density query on a sampler that only carries a Higgs field."""


class ConfigurationError(MonopoleLabError, ValueError):
    """Invalid geometric configuration (overlapping balls, bad centers...)."""


class DomainError(MonopoleLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegreeUndefinedError(MonopoleLabError, ValueError):
    """The Higgs field vanishes on the sphere; the degree is undefined."""


class DegreeResolutionError(MonopoleLabError, ValueError):
    """Degree quadrature did not land within 0.1 of an integer."""


class BlowupError(MonopoleLabError, RuntimeError):
    """ODE integration left the stable branch before the matching radius."""


class BracketingError(MonopoleLabError, RuntimeError):
    """Outer root-find could not bracket the requested target."""


class DivergenceError(MonopoleLabError, ArithmeticError):
    """Improper integral tail estimate does not converge."""


class SchemaError(MonopoleLabError, ValueError):
    """A run configuration document violates the documented schema."""
