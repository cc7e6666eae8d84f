"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a mathematical function."""


class ConfigurationError(ValueError):
    """Inconsistent or infeasible parameters."""


class ContractError(RuntimeError):
    """A caller violated a documented precondition on an operator object."""


class InternalError(RuntimeError):
    """A numerical search produced something that contradicts known structure."""
