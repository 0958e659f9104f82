"""Exception types shared across the package.

The split mirrors the command-line exit-code contract: precondition
violations (callers passed something outside an operation's domain) are
``ParameterError``; computations that fail despite valid inputs are
``NumericsError``.
"""


class ParameterError(ValueError):
    """A precondition on the inputs was violated."""


class UnsupportedPriorError(ParameterError):
    """The requested closed form is only available for the uniform prior."""


class ValidityThresholdError(ParameterError):
    """A bound was requested below its proven validity threshold in steps."""


class NonContractingError(ParameterError):
    """Certificate parameters make the geometric term fail to contract."""


class EmptyFeasibleGridError(ParameterError):
    """Every point of an optimization grid violated a constraint."""


class NumericsError(RuntimeError):
    """A numerical computation failed despite valid inputs."""


class NoSolutionError(NumericsError):
    """No step count up to the search cap satisfies the target."""


class ConvergenceError(NumericsError):
    """An iterative routine hit its iteration cap before its tolerance."""


class TruncationError(NumericsError):
    """A state-space truncation leaks more probability mass than allowed."""


class NonContractingWarning(UserWarning):
    """A bound was evaluated whose geometric term does not decay."""
