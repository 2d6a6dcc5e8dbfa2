class DomainError(ValueError):
    """An argument falls outside the domain an operation is defined on."""
