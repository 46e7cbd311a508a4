"""Exceptions raised by bpire."""

from __future__ import annotations


class BpireError(Exception):
    """Exception to indicate a general toolkit error."""


class ValidationError(
    BpireError,
):
    """Exception to indicate a model violating one or more invariants."""

    def __init__(self, problems: list[str]) -> None:
        """Keep every violated invariant, not just the first."""
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParseError(
    BpireError,
):
    """Exception to indicate a model file that cannot be read."""


class DomainError(
    BpireError,
):
    """Exception to indicate an argument outside the domain of a function."""


class CramerNotSatisfiedError(
    BpireError,
):
    """Exception to indicate lambda(kappa) is not 1."""


class NoCramerRootError(
    BpireError,
):
    """Exception to indicate E m^kappa = 1 has no positive root in range."""


class NotSubcriticalError(
    BpireError,
):
    """Exception to indicate E log m >= 0."""


class OverflowGuardError(
    BpireError,
):
    """Exception to indicate a state too large for 64-bit storage."""


class ProgenyCapExceededError(
    BpireError,
):
    """Exception to indicate a finite-support progeny sum above the cap."""


class DegenerateTailError(
    BpireError,
):
    """Exception to indicate equal top order statistics."""


class InsufficientExceedancesError(
    BpireError,
):
    """Exception to indicate a plateau window with too few exceedances."""


class TooFewExceedancesError(
    BpireError,
):
    """Exception to indicate too few threshold exceedances for a test."""


class NotTwoPointLatticeError(
    BpireError,
):
    """Exception to indicate a model outside the two-point +-h lattice class."""


class RegimeMismatchError(
    BpireError,
):
    """Exception to indicate a kappa regime the operation does not handle."""


class IllConditionedFitError(
    BpireError,
):
    """Exception to indicate too few usable characteristic-function points."""


class HorizonTooSmallError(
    BpireError,
):
    """Exception to indicate walk mass left beyond the simulated horizon."""


class StepBudgetExceededError(
    BpireError,
):
    """Exception to indicate a walk that did not reach its target in budget."""


class FingerprintMismatchError(
    BpireError,
):
    """Exception to indicate reports produced from different models."""


class UsageError(
    BpireError,
):
    """Exception to indicate a subcommand invoked with unusable arguments."""


class RunFailedError(
    BpireError,
):
    """Exception to indicate a failed run, carrying its process exit code."""

    def __init__(self, message: str, exit_code: int) -> None:
        """Keep the exit code for the command line."""
        self.exit_code = exit_code
        super().__init__(message)


class BurnInTooSmallWarning(UserWarning):
    """Warning to indicate a stationary batch with a large bias bound."""
