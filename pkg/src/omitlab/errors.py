"""Exception types raised across omitlab."""


class OmitlabError(Exception):
    pass


class ConfigError(OmitlabError, ValueError):
    """Bad configuration document or a violated parameter bound."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NoPhysicalRoot(OmitlabError):
    pass


class BistableWarning(UserWarning):
    pass


class Bistable(OmitlabError):
    """Raised instead of warning when the steady-state solver runs in strict mode."""


class DetunedModes(OmitlabError):
    pass


class NoInteriorMinimum(OmitlabError):
    pass


class SingularDenominator(OmitlabError, ZeroDivisionError):
    pass


class NonConverged(OmitlabError):
    pass


class StepTooLarge(OmitlabError, ValueError):
    pass


class Diverged(OmitlabError):
    pass


class WindowTooShort(OmitlabError, ValueError):
    pass


class InvalidSpec(OmitlabError, ValueError):
    pass
