class InputError(ValueError):
    """Malformed or out-of-range input (bad shapes, empty subsets, bad rational strings)."""


class ContractError(AssertionError):
    """A mathematical contract was violated (nilpotency, compatibility, d^2 = 0)."""


class ResourceError(RuntimeError):
    """A combinatorial or truncation guard was exceeded."""
