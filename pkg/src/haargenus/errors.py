"""Shared exception types with a CLI exit-code contract.

Exit codes: 0 ok, 2 validation, 3 cap exceeded, 4 pole, 5 verification failure.
"""


class ValidationError(ValueError):
    """Malformed input: bad ground sets, non-bijective mappings, mode mixing."""

    exit_code = 2


class GroundMismatchError(ValidationError):
    """Two lattice elements or permutations live on different ground sets."""


class CapExceededError(RuntimeError):
    """A combinatorial enumeration would exceed its configured cap."""

    exit_code = 3


class PoleError(ArithmeticError):
    """A polynomial fraction was evaluated at a zero of its denominator."""

    exit_code = 4

    def __init__(self, message, n_value=None, factors=None):
        super().__init__(message)
        self.n_value = n_value
        self.factors = tuple(factors) if factors else ()


class VerificationFailure(AssertionError):
    """A verification suite found a counterexample."""

    exit_code = 5
