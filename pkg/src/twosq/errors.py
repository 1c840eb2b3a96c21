"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ResourceError(RuntimeError):
    """A computation would exceed the configured memory/size budget."""


class ConvergenceError(RuntimeError):
    """A numerical integrator failed to reach its target accuracy."""


class AdmissibilityError(DomainError):
    """A system of linear forms covers all residues modulo some prime."""
