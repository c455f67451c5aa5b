"""Exception hierarchy shared by all fupcantor modules.

Three branches matter to callers (and to the CLI exit-code contract):
``ValidationError`` for malformed inputs, ``CapExceeded`` for requests
beyond a configured size cap, and ``InvariantViolation`` for checks that
computed data failed to satisfy.
"""


class FupError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FupError):
    """Input violates a precondition (bad digits, shape mismatch, ...)."""


class CapExceeded(FupError):
    """Requested computation exceeds a configured size cap."""


class InvariantViolation(FupError):
    """A verified property failed on concrete data."""


class BaseTooSmall(ValidationError):
    """Alphabet base M must be at least 3."""


class DigitOutOfRange(ValidationError):
    """Alphabet digit outside {0, ..., M-1}."""


class DuplicateDigit(ValidationError):
    """Alphabet digits must be distinct."""


class EmptyAlphabet(ValidationError):
    """Alphabet must contain at least one digit."""


class IndexOutOfRange(ValidationError):
    """Index outside {0, ..., N-1}."""


class LengthMismatch(ValidationError):
    """Vector length does not match the declared transform size."""


class BaseMismatch(ValidationError):
    """Operands live over different bases M."""


class ShapeMismatch(ValidationError):
    """Operands have incompatible shapes or sizes."""


class TrivialAlphabet(ValidationError):
    """Operation requires 1 < A < M (exponent undefined or zero otherwise)."""


class NonpositiveLipschitz(ValidationError):
    """Tail bound requires a strictly positive Lipschitz norm."""


class NonpositiveInput(ValidationError):
    """Quantity must be strictly positive."""


class OrderTooSmall(ValidationError):
    """Refinement order k below the minimum for this operation."""


class OrderTooLarge(CapExceeded):
    """M**k exceeds the configured size cap."""


class DenseCapExceeded(CapExceeded):
    """Dense linear algebra requested beyond the dense-matrix cap."""


class EnumerationTooLarge(CapExceeded):
    """Exact enumeration requested beyond the enumeration cap."""


class CertificateViolation(InvariantViolation):
    """A partition-chain certificate failed verification.

    Carries enough structure to point at the offending level and blocks.
    """

    def __init__(self, message, level=None, blocks=None, witness=None):
        super().__init__(message)
        self.level = level
        self.blocks = blocks
        self.witness = witness
