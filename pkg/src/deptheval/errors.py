"""Exception types shared across the toolkit."""


class DepthEvalError(Exception):
    """Base class for domain errors raised by this package."""


class InsufficientDataError(DepthEvalError):
    """Too few valid pixels (or rows) to perform the requested computation."""


class DegenerateDataError(DepthEvalError):
    """Input is numerically degenerate: constant prediction, zero baseline cell,
    or a RANSAC run in which every sampled model was ill-posed."""


class TableParseError(DepthEvalError):
    """A result-table file does not conform to the CSV/JSON schema."""
