"""Parallel multi-byte Huffman codec.

Decoding is work-partitioned: the bitstream splits into fixed-bit
subsequences (one decoding slot each) grouped into sequences (one task
each).  Two fine-grained decoders recover each slot's starting bit: the
self-synchronization decoder discovers and validates synchronization
points speculatively, while the gap-array decoder reads them from a
one-byte-per-subsequence side table emitted at encode time.  Both share a
staged decode-and-write pass whose buffer capacity can be tuned per
compression-ratio class, plus an error-bounded quantization front-end that
produces the skewed multi-byte symbol streams this pipeline targets.
"""

from . import gap_decoder, sync_decoder, tuner
from .bitstream import DEFAULT_LAYOUT, BitWriter, EncodedStream, LayoutConfig, read_bits, subseq_boundary
from .codebook import (
    Codebook,
    DecodeTable,
    build_lengths,
    canonize,
    codes_from_strings,
    decode_one,
    from_explicit,
)
from .container import read_container, write_container
from .encoder import OracleResult, emit_gap, encode, mis_sync_decode, oracle_decode, signed_gaps
from .errors import (
    BadGap,
    CodecError,
    ContainerError,
    EmptyInput,
    GapOverflow,
    InvalidCode,
    KraftViolation,
    LengthOverflow,
    NoFixpoint,
    NonFiniteInput,
    NonPositiveRatio,
    NotPrefixFree,
    NotPresent,
    OutOfRange,
    Truncated,
    UnknownSymbol,
)
from .quant import QuantConfig, QuantResult, dequantize, quantize, synth_codes
from .staging import DEFAULT_CAPACITY, DecodeStats, decode_write
from .state import SyncState, output_index
from .tuner import PartitionPlan, TunerConfig

__version__ = "0.1.0"
