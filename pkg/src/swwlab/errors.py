"""Exception hierarchy shared by all swwlab modules."""


class SwwlabError(Exception):
    """Base class for every error raised by the library."""


class ZeroDirection(SwwlabError, ValueError):
    pass


class PoleProximity(SwwlabError, ValueError):
    pass


class NoConvergence(SwwlabError, RuntimeError):
    def __init__(self, iterations: int, last_residual: float, message: str = ""):
        self.iterations = iterations
        self.last_residual = last_residual
        text = f"no convergence after {iterations} iterations (|F| = {last_residual:.3e})"
        if message:
            text = f"{text}: {message}"
        super().__init__(text)


class SingularJacobian(SwwlabError, RuntimeError):
    pass


class AngleViolation(SwwlabError, ValueError):
    pass


class MissingProfile(SwwlabError, ValueError):
    pass


class NonPositiveH0(SwwlabError, ValueError):
    pass


class DomainError(SwwlabError, ValueError):
    """Evaluation left the domain where the closed-form solution is defined."""


class SingularTime(SwwlabError, ValueError):
    """The rotating-frame transformation is singular (sin(omega t) = 0)."""


class StencilFailure(SwwlabError, RuntimeError):
    pass


class DomainSingular(SwwlabError, ValueError):
    pass


class DegenerateSamples(SwwlabError, ValueError):
    pass


class ConfigError(SwwlabError, ValueError):
    pass
