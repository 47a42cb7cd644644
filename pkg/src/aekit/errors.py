"""Exception hierarchy shared across the toolkit.

DataError covers problems with user-supplied inputs (bad files, invalid
records, out-of-range ids); the CLI maps it to exit status 2.  Everything
else derived from AekitError maps to exit status 3.
"""


class AekitError(Exception):
    """Base class for all toolkit errors."""


class DataError(AekitError):
    """Invalid input data: malformed files, bad records, out-of-range ids."""


class TokenizerError(DataError):
    pass


class CorpusError(DataError):
    pass


class PredictorError(AekitError):
    """Prediction failed: bad model state, unscripted step, remote failure."""


class PredictionInvariantError(PredictorError):
    """A Prediction violated its contract (wrong length, duplicates, order)."""


class EngineError(AekitError):
    pass


class AeUndefinedError(EngineError):
    """AE ratio requested for a ledger with zero manual keystrokes."""
