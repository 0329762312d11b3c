"""Exception hierarchy shared by every octlab module."""


class OctlabError(Exception):
    """Base class for all octlab errors."""


class ConfigError(OctlabError):
    pass


class CharacteristicForbidden(ConfigError):
    pass


class NotPrime(ConfigError):
    pass


class FieldMismatch(OctlabError):
    pass


class DimensionMismatch(OctlabError):
    pass


class NonScalarNorm(OctlabError):
    pass


class NotImaginary(OctlabError):
    pass


class NonScalarValue(OctlabError):
    pass


class FormulaMismatch(OctlabError):
    """A product formula disagreed with the direct matrix computation.

    ``payload`` carries the counterexample.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class FlavorMismatch(OctlabError):
    pass


class DegenerateAlgebra(OctlabError):
    pass


class NoUnit(OctlabError):
    pass


class PrimeDividesDenominator(OctlabError):
    pass


class DimensionDisagreement(OctlabError):
    pass


class VerificationFailed(OctlabError):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class NotProportional(OctlabError):
    pass


class ResourceBoundExceeded(OctlabError):
    pass
