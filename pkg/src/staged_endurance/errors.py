"""Exception types shared across the package."""


class StagingError(Exception):
    """Base class for all errors raised by staged_endurance."""


class DomainError(StagingError, ValueError):
    """An argument lies outside the domain of a formula."""


class UnreachableTargetError(StagingError):
    """The requested flight time exceeds what any storage mass can deliver."""

    def __init__(self, target_seconds, max_seconds, argmax_mass_kg):
        self.target_seconds = target_seconds
        self.max_seconds = max_seconds
        self.argmax_mass_kg = argmax_mass_kg
        super().__init__(
            f"target {target_seconds:.6g} s is unreachable; maximum achievable is "
            f"{max_seconds:.6g} s at storage mass {argmax_mass_kg:.6g} kg"
        )


class SolverError(StagingError):
    """Iterative solver failed to converge. Carries the best iterate found."""

    def __init__(self, message, best_iterate=None, residual=float("nan"), iterations=0):
        self.best_iterate = best_iterate
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")


class RefusalError(StagingError):
    """An exhaustive oracle was asked for a problem size it refuses to enumerate."""
