"""Exception hierarchy shared by all modules."""


class SU4Error(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(SU4Error, ValueError):
    pass


class ShapeError(SU4Error, ValueError):
    pass


class NormalizationError(SU4Error, ValueError):
    pass


class CapacityError(SU4Error, MemoryError):
    pass


class TruncationError(SU4Error):
    """Photon population at the Fock cutoff exceeded the configured tolerance."""

    def __init__(self, n_max, boundary_population, tol):
        self.n_max = n_max
        self.boundary_population = boundary_population
        self.tol = tol
        super().__init__(
            f"photon population {boundary_population:.3e} at n_max={n_max} "
            f"exceeds trunc_tol={tol:.1e}; increase n_max "
            f"(suggested n_max >= {suggest_n_max(n_max)})"
        )


def suggest_n_max(n_max):
    return max(2 * n_max, n_max + 4)


class StiffnessError(SU4Error):
    pass


class ConservationError(SU4Error):
    pass


class ConvergenceError(SU4Error):
    pass


class DegenerateSteadyStateError(SU4Error):
    pass


class PreconditionError(SU4Error, ValueError):
    pass


class UndefinedG2Error(SU4Error, ValueError):
    pass


class WindowTooShortError(SU4Error, ValueError):
    pass


class UnphysicalStateError(SU4Error, ValueError):
    pass


class ConfigError(SU4Error, ValueError):
    pass
