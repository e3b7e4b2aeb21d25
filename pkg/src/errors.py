#src/errors.py
"""Error taxonomy shared by the library and the CLI.

Every failure the toolkit raises on purpose is an EnsembleError. The class
attributes `category` and `exit_code` drive the CLI's machine-readable error
line and process exit status, so scripts running benchmark sweeps can tell a
bad flag from a bad CSV from a solver that ran out of iterations.

Only the message travels in `args`; extra context lives in attributes. That
keeps every error picklable across the watchdog's process boundary."""


class EnsembleError(Exception):
    """Base class for all deliberate failures."""

    category = "error"
    exit_code = 1

    def __init__(self, message, *, stage=None):
        super().__init__(message)
        self.stage = stage

    def with_stage(self, stage):
        """Labels the pipeline stage once; inner labels win."""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self):
        message = super().__str__()
        return f"[{self.stage}] {message}" if self.stage else message


class UsageError(EnsembleError):
    """Invalid configuration values or flag combinations."""

    category = "usage"
    exit_code = 2


class DataError(EnsembleError):
    """Malformed inputs: shapes, non-finite values, missing columns."""

    category = "data"
    exit_code = 3


class DimensionError(DataError):
    """Array shapes that do not line up."""

    category = "dimension"


class SimplexError(DataError):
    """A weight vector outside the probability simplex beyond tolerance."""

    category = "simplex"


class NotFittedError(DataError):
    """predict() called before fit()."""

    category = "not_fitted"


class ModelFitError(DataError):
    """A base model failed to fit on some training split."""

    category = "model_fit"

    def __init__(self, message, *, model_name=None, fold=None, stage=None):
        super().__init__(message, stage=stage)
        self.model_name = model_name
        self.fold = fold


class ConvergenceError(EnsembleError):
    """The solver did not reach its optimality certificate."""

    category = "convergence"
    exit_code = 4


class NumericalError(ConvergenceError):
    """NaN or Inf showed up in solver iterates."""

    category = "numerical"
