"""Exception hierarchy for the framesieve toolkit.

Every error raised by this package derives from :class:`FrameSieveError`,
so callers can catch one type at API boundaries.
"""


class FrameSieveError(Exception):
    """Base class for all framesieve errors."""


class EmptySequenceError(FrameSieveError):
    """An operation received an empty frame sequence."""


class EmptyTimelineError(FrameSieveError):
    """A timeline with zero frames cannot be sampled."""


class TooShortError(FrameSieveError):
    """Fewer frames than the operation requires (distances need >= 2)."""


class DegenerateVectorError(FrameSieveError):
    """A zero vector has no direction; cosine similarity is undefined."""


class EmptyQueryError(FrameSieveError):
    """Query text is empty or whitespace-only."""


class EmptyRewardsError(FrameSieveError):
    """Reward vector is empty."""


class EmptySelectionError(FrameSieveError):
    """No r-frame ordinals were selected."""


class EmptyRFrameSetError(FrameSieveError):
    """Coverage metrics need at least one r-frame."""


class BadParamsError(FrameSieveError):
    """Synthetic instance parameters are out of range."""


class NoJsonError(FrameSieveError):
    """No JSON object could be extracted from provider text."""


class MissingFieldError(FrameSieveError):
    """A required field is absent from a parsed response."""


class NonBooleanError(FrameSieveError):
    """The isGlobal field was present but not a JSON boolean."""


class OutOfRangeError(FrameSieveError):
    """A reward fell outside the closed interval [0, 100]."""


class ProviderDownError(FrameSieveError):
    """A remote provider failed for every request despite retries."""


class DigfError(FrameSieveError):
    """Base class for feature-file format errors."""


class DigfMagicError(DigfError):
    """File does not start with the DIGF magic bytes."""


class DigfVersionError(DigfError):
    """File declares an unsupported format version."""


class DigfTruncatedError(DigfError):
    """File is shorter than its header promises (or has trailing junk)."""


class DigfOrderError(DigfError):
    """Record indices or timestamps are not strictly increasing."""
