"""Exception types shared across the package."""


class PortbankError(Exception):
    """Base class for all portbank errors."""


# -- market data ingestion ---------------------------------------------------

class MalformedCsv(PortbankError):
    """CSV file has a bad header, inconsistent row arity or unparsable cells."""


class NonPositivePrice(PortbankError):
    """A close price is zero or negative."""


class NonMonotonicDates(PortbankError):
    """Dates in a price series are not strictly increasing."""


class DateMisalignment(PortbankError):
    """Price series do not share an identical date vector."""


class InsufficientHistory(PortbankError):
    """Too few observations to compute returns or estimates."""


class BadDimension(PortbankError):
    """Asset count or period count outside the supported range."""


# -- numerics ----------------------------------------------------------------

class DimensionMismatch(PortbankError):
    """Vector/matrix dimensions are inconsistent."""


class ZeroVariancePortfolio(PortbankError):
    """Portfolio variance is zero where a ratio requires it positive."""


class DegenerateRisk(PortbankError):
    """All asset risks are zero; risk-based allocation is undefined."""


# -- solvers -----------------------------------------------------------------

class Infeasible(PortbankError):
    """Linear program has no feasible point."""


class Unbounded(PortbankError):
    """Linear program objective is unbounded on the feasible region."""


# -- solution bank -----------------------------------------------------------

class EmptyBank(PortbankError):
    """Operation requires a non-empty solution bank."""


class IoFailure(PortbankError):
    """File could not be read or written."""


class SchemaMismatch(PortbankError):
    """Persisted data does not match the expected schema."""


# -- configuration -----------------------------------------------------------

class BadConfig(PortbankError):
    """Invalid configuration values."""


class OutOfBounds(PortbankError):
    """Point lies outside a benchmark function's domain."""


class StageError(PortbankError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
