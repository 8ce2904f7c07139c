"""
Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI should return for it:
2 for bad input (files, specs, plans), 3 for numerical failures.
"""

from typing import Optional


class AncovaCheckError(Exception):
    """Base class for all errors raised by ancova_check"""
    exit_code = 1


class InputError(AncovaCheckError):
    """Invalid user-supplied input"""
    exit_code = 2


class TrialDataError(InputError):
    """A trial CSV failed validation"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class DgpSpecError(InputError):
    """A data-generating process spec failed validation"""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PlanError(InputError):
    """A simulation plan failed validation"""


class UnknownScenarioError(InputError):
    """A scenario name is not among the bundled scenario files"""

    def __init__(self, name: str, available: list[str]):
        self.name = name
        self.available = available
        super().__init__(f"unknown scenario '{name}'; available: {', '.join(available)}")


class NumericalError(AncovaCheckError):
    """A computation is undefined or numerically unreliable for the given data"""
    exit_code = 3


class RankDeficientError(NumericalError):
    """The design matrix does not have full column rank"""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"design matrix is rank deficient: column '{column}' is linearly dependent on earlier columns")


class IllConditionedError(NumericalError):
    """The design matrix condition number exceeds the configured limit"""

    def __init__(self, condition_number: float, limit: float):
        self.condition_number = condition_number
        self.limit = limit
        super().__init__(
            f"design matrix condition number {condition_number:.3e} exceeds {limit:.1e}; "
            "rescale or drop covariates"
        )


class DegenerateDesignError(NumericalError):
    """Empty or constant arm, too few observations, or a zero variance"""


class RedrawLimitError(NumericalError):
    """Too many simulated replications had a degenerate design"""
