"""Error and warning types shared across the package."""


class FibersimError(Exception):
    """Base class for package errors."""


class NonFiniteFieldError(FibersimError):
    """Field blow-up detected (NaN/Inf) -- the run is unstable."""


class GridMismatchError(FibersimError):
    """Operands were produced on incompatible grids or wavelength axes."""


class InvalidGeometryError(FibersimError):
    """Scene construction violates a geometric constraint."""


class OutOfBoundsError(FibersimError):
    """A finite shape extends beyond the simulation grid."""


class NoRootError(FibersimError):
    """The mode characteristic equation has no root for these inputs."""


class EmptyChannelError(FibersimError):
    """A correlation was requested on a stream missing one channel."""


class NoConvergenceError(FibersimError):
    """A nonlinear fit failed to converge."""


class DegenerateHistogramError(FibersimError):
    """Histogram carries no antibunching signature; T unidentifiable."""


class ZeroDenominatorError(FibersimError):
    """A ratio-form observable has an all-zero denominator."""


class InsufficientCoverageError(FibersimError):
    """HWP scan does not cover one full transmission period."""


class ParseError(FibersimError):
    """A file failed to parse.

    Carries the byte offset at which parsing stopped.
    """

    def __init__(self, message: str, byte_offset: int = 0):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class MultimodeWarning(UserWarning):
    """V > 2.405: higher-order modes exist; HE11 still returned."""


class PlaneTooCloseWarning(UserWarning):
    """Overlap plane is closer to the scatterer than recommended."""


class NegativeMinWarning(UserWarning):
    """Fitted HWP transmission minimum is negative; clipped to zero."""


class NegativeInterceptWarning(UserWarning):
    """Power-dependence fit gave a negative 1/tau intercept."""


class NotConvergedWarning(UserWarning):
    """FDTD run hit the step cap before the energy decay criterion."""
