"""Custom exceptions for HCSP Tools."""


class HcspToolsError(Exception):
    """Base exception for all HCSP Tools errors."""

    pass


class ConfigurationError(HcspToolsError):
    """Raised when configuration is invalid or missing."""

    pass


class JobError(HcspToolsError):
    """Raised when a verification job file is malformed."""

    pass


# ============================================================================
# Language errors
# ============================================================================


class HcspSyntaxError(HcspToolsError):
    """Raised when program or condition text does not match the grammar."""

    def __init__(
        self,
        line: int,
        column: int,
        expected: frozenset[str],
        found: str,
        message: str | None = None,
    ):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        wanted = ", ".join(sorted(expected)) or "end of input"
        super().__init__(
            message
            or f"line {line}, column {column}: expected one of {{{wanted}}}, found {found!r}"
        )


class InvalidProcessError(HcspToolsError):
    """Raised when a process tree violates a structural rule."""

    pass


# ============================================================================
# Evaluation errors
# ============================================================================


class EvaluationError(HcspToolsError):
    """Base class for concrete evaluation failures."""

    pass


class UnboundVariableError(EvaluationError, KeyError):
    """Raised when a variable has no value in the current state."""

    def __init__(self, name: str, message: str | None = None):
        self.name = name
        super().__init__(message or f"Unbound variable: {name}")

    def __str__(self) -> str:
        return str(self.args[0])


class DivisionByZeroError(EvaluationError):
    """Raised when a denominator evaluates to zero."""

    pass


class UnsupportedConstructError(HcspToolsError):
    """Raised when an operation meets a node it cannot handle."""

    def __init__(self, node: object, message: str | None = None):
        self.node = node
        super().__init__(message or f"Unsupported construct: {node}")


class StateMergeError(HcspToolsError):
    """Raised when merging states whose domains overlap."""

    pass


# ============================================================================
# Execution errors
# ============================================================================


class ScheduleError(HcspToolsError):
    """Base class for schedule problems during execution."""

    pass


class ScheduleExhaustedError(ScheduleError):
    """Raised when execution needs a choice but the schedule is empty."""

    def __init__(self, expected: str, message: str | None = None):
        self.expected = expected
        super().__init__(message or f"Schedule exhausted while waiting for '{expected}'")


class ScheduleMismatchError(ScheduleError):
    """Raised when the next scheduled choice does not fit the request."""

    pass


class DivergenceError(HcspToolsError):
    """Raised when a continuous evolution never leaves its domain."""

    pass


class DeadlockError(HcspToolsError):
    """Raised when parallel components cannot synchronize."""

    pass


class UnsupportedODEError(HcspToolsError):
    """Raised when an ODE system is outside the supported class."""

    def __init__(self, variables: list[str], message: str | None = None):
        self.variables = variables
        super().__init__(
            message or f"Unsupported ODE system over {', '.join(variables)}"
        )


class IrrationalCrossingError(HcspToolsError):
    """Raised when a concrete run leaves its domain at an irrational time."""

    def __init__(self, variables: list[str], approx: float):
        self.variables = variables
        self.approx = approx
        super().__init__(
            f"Domain over {', '.join(variables)} is left at an irrational time near "
            f"{approx:.6g}; concrete runs use exact rationals"
        )


# ============================================================================
# Assertion errors
# ============================================================================


class SatisfactionError(HcspToolsError):
    """Base class for failures of the satisfaction checker."""

    pass


class SatisfactionInconclusiveError(SatisfactionError):
    """Raised when recursion unfolding hits its bound without a verdict."""

    pass


class ResidualAssertionError(SatisfactionError):
    """Raised when an assertion still contains a sync residual."""

    pass


class AssertionPositionError(HcspToolsError):
    """Raised when a rewrite position does not exist in the assertion."""

    pass


# ============================================================================
# Synchronization errors
# ============================================================================


class SynchronizationError(HcspToolsError):
    """Base class for synchronization failures."""

    pass


class RecRulePremiseError(SynchronizationError):
    """Raised when a premise of the recursion rule cannot be established."""

    def __init__(self, premise: int, detail: str):
        self.premise = premise
        super().__init__(f"Recursion rule premise {premise} failed: {detail}")


class UnsupportedResidualError(SynchronizationError):
    """Raised when no synchronization rule applies to a pair of assertions."""

    pass


class NameCollisionError(SynchronizationError):
    """Raised when process prefixes or variable sets collide."""

    pass


class MixedPrefixError(SynchronizationError):
    """Raised when an expression mixes variables from both sides."""

    pass


class SolverError(HcspToolsError):
    """Raised when the external SMT solver cannot be run."""

    pass
