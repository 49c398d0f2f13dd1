"""Exception types shared across the package."""


class PosecodecError(Exception):
    """Base class for all package-specific errors."""


class DegenerateGeometry(PosecodecError):
    """A geometric measurement was requested on a near-zero-length segment."""


class UnknownKind(PosecodecError):
    """Unrecognized synthetic motion kind."""


class ParseError(PosecodecError):
    """A file or response could not be parsed; message carries location context."""


class SchemaMismatch(PosecodecError):
    """File structure disagrees with the declared schema (for instance wrong joint count)."""


class OutOfDomain(PosecodecError):
    """A classifier input was outside its documented domain (NaN/inf)."""


class IndexOutOfRange(PosecodecError):
    """A code or category id outside the codebook."""


class TooShort(PosecodecError):
    """Motion has fewer frames than one downsampling window."""


class MutualExclusivityViolation(PosecodecError):
    """A K-hot vector activates zero or several codes within one category."""


class ShapeMismatch(PosecodecError):
    """Tensor operands have incompatible shapes; message prints both."""


class LengthMismatch(PosecodecError):
    """Two sequences that must align frame-by-frame have different lengths."""


class EmptyDataset(PosecodecError):
    """Training requested on an empty dataset."""


class PrefixTooLong(PosecodecError):
    """Generation prefix already at or beyond the maximum sequence length."""


class MissingSlot(PosecodecError):
    """A prompt template placeholder was left unfilled."""

    def __init__(self, slot: str):
        super().__init__(slot)
        self.slot = slot


class MalformedResponse(PosecodecError):
    """Backend response failed strict parsing; carries the raw text."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class WrongLength(MalformedResponse):
    """Parsed list has the wrong number of entries."""


class NonMonotonicRange(MalformedResponse):
    """Range response where start > end."""


class RangeOutOfBounds(PosecodecError):
    """Edit range outside the code sequence."""


class InvalidCodeForCategory(PosecodecError):
    """Stage-3 response contains a code id that is not in the edited category."""


class BackendError(PosecodecError):
    """Editor backend failure (exhausted fixtures, HTTP failure, prompt mismatch)."""


class NonSymmetricInput(PosecodecError):
    """Covariance input asymmetric beyond tolerance."""


class PoolTooLarge(PosecodecError):
    """Ranking pool larger than the corpus allows."""


class InsufficientSamples(PosecodecError):
    """Not enough samples for the requested metric."""
