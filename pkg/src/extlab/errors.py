"""Exception types shared across the package."""


class ExtlabError(Exception):
    """Base class for all errors raised by this package."""


class RepresentationMismatch(ExtlabError, ValueError):
    """Two vectors live in incompatible concrete representations."""


class DegenerateBasis(ExtlabError, ValueError):
    """Gram-Schmidt input is linearly dependent below tolerance."""

    def __init__(self, index, residual, tol):
        self.index = index
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"vector {index} is linearly dependent on its predecessors "
            f"(residual norm {residual:.3e} < tol {tol:.3e})"
        )


class UnitarityError(ExtlabError, ValueError):
    """A matrix fails the unitarity check."""

    def __init__(self, deviation):
        self.deviation = deviation
        super().__init__(f"matrix is not unitary: deviation {deviation:.3e}")


class FrameConstructionError(ExtlabError, RuntimeError):
    """Deficiency-frame construction failed or its residual is too large."""


class NearSingular(ExtlabError, RuntimeError):
    """A Wronskian or linear system is too close to singular."""


class KernelCrossCheckError(ExtlabError, RuntimeError):
    """Closed-form and quadrature kernel values disagree."""


class DomainSupportError(ExtlabError, ValueError):
    """A core function's support violates the model domain."""


class ConfigError(ExtlabError, ValueError):
    """A scenario configuration is malformed."""
