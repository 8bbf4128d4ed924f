"""Exception hierarchy for the codec.

Everything raised by the library derives from CodecError so callers can
catch one type at the boundary (the CLI maps it to exit code 2).
"""


class CodecError(Exception):
    pass


class EmptyInput(CodecError):
    """Codebook construction got no nonzero symbol counts."""


class LengthOverflow(CodecError):
    """An optimal or supplied code length exceeds the 32-bit cap."""


class KraftViolation(CodecError):
    """Code lengths do not satisfy the Kraft inequality."""


class NotPrefixFree(CodecError):
    """An explicit code set contains a codeword prefixing another."""


class InvalidCode(CodecError):
    """Bits match no codeword in the decode table."""


class Truncated(CodecError):
    """The bit source ended mid-codeword or counts fall short of the header."""


class UnknownSymbol(CodecError):
    """A symbol to encode has no codeword."""


class GapOverflow(CodecError):
    """A gap entry does not fit in one byte (defensive; cannot happen
    under the 32-bit codeword cap)."""


class OutOfRange(CodecError):
    """Bit cursor points beyond the padded unit storage."""


class NoFixpoint(CodecError):
    """Synchronization did not converge within the round cap."""


class NotPresent(CodecError):
    """A gap array was requested but the stream does not carry one."""


class BadGap(CodecError):
    """A gap entry does not land on a codeword boundary."""


class NonFiniteInput(CodecError):
    """Quantizer input contains NaN or infinity."""


class NonPositiveRatio(CodecError):
    """Compression-ratio classification needs a ratio > 0."""


class ContainerError(CodecError):
    """Container file has a bad magic, version, or inconsistent framing."""
