"""Exception types shared across the package."""


class CrystalError(Exception):
    """Base class for all crystal-related failures."""


class PositivityViolation(CrystalError):
    """An explicit edge weight is negative."""


class SymmetryViolation(CrystalError):
    """w_ji(-k) != w_ij(k) for some explicit entry or tail rule."""


class LoopViolation(CrystalError):
    """A diagonal family carries weight at offset zero."""


class SummabilityViolation(CrystalError):
    """A weight family has no finite certified l1 sum."""


class NotAdmissible(CrystalError):
    """A torus function fails the coefficient conditions for defining a graph."""


class IntegrationFailure(CrystalError):
    """Adaptive quadrature did not converge to the requested accuracy."""


class ResolutionExceeded(CrystalError):
    """Grid doubling hit the hard cap before reaching the target accuracy."""

    def __init__(self, message, resolution=None, achieved=None):
        super().__init__(message)
        self.resolution = resolution
        self.achieved = achieved


class SpectrumProximity(CrystalError):
    """A resolvent energy z is inside or too close to the sampled spectrum."""

    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class DivergentGradientEnergy(CrystalError):
    """The gradient-energy integral does not stabilise under grid refinement."""
