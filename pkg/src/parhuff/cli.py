"""Command-line surface: encode, decode, quantize, dequantize, bench.

Exit codes: 0 success, 1 usage error, 2 data or I/O error.

Codes files are raw little-endian words (16-bit by default, 8-bit with
``--width 8``); float files are raw little-endian float32.  An explicit
codebook JSON maps symbols to bit strings, e.g. ``{"A": "00", "66": "10"}``
(single-character keys are taken as character codes).
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gap_decoder, sync_decoder
from .bitstream import LayoutConfig
from .codebook import Codebook, build_lengths, canonize, codes_from_strings, from_explicit
from .container import read_container, write_container
from .encoder import encode, oracle_decode
from .errors import CodecError
from .quant import QuantConfig, QuantResult, dequantize, quantize, synth_codes
from .staging import DEFAULT_CAPACITY, decode_write
from .tuner import TunerConfig

_SIDECAR_MAGIC = b"HUFQ"
_SIDECAR_HEADER = struct.Struct("<4sBBdQ")
_SIDECAR_ENTRY = struct.Struct("<Qd")


@dataclass
class BenchReport:
    """Per-phase timing for one decode run.

    Throughput is decoded (quantization-code) bytes divided by phase time,
    so numbers stay comparable across compression ratios.
    """

    decoder: str
    workers: int
    decoded_bytes: int
    cr: float
    capacities: str
    phase_times: dict[str, float] = field(default_factory=dict)
    total_time: float = 0.0

    def throughput(self, seconds: float) -> float:
        return self.decoded_bytes / seconds if seconds > 0 else 0.0

    def rows(self) -> list[tuple]:
        out = []
        for phase, secs in self.phase_times.items():
            out.append(
                (self.decoder, self.workers, f"{self.cr:.3f}", self.capacities,
                 phase, f"{secs:.6f}", self.decoded_bytes, f"{self.throughput(secs):.0f}")
            )
        out.append(
            (self.decoder, self.workers, f"{self.cr:.3f}", self.capacities,
             "overall", f"{self.total_time:.6f}", self.decoded_bytes,
             f"{self.throughput(self.total_time):.0f}")
        )
        return out

    def print_text(self, file=sys.stdout) -> None:
        print(f"decoder={self.decoder} workers={self.workers} cr={self.cr:.3f} "
              f"capacities={self.capacities}", file=file)
        for phase, secs in self.phase_times.items():
            print(f"  {phase:16s} {secs:10.6f} s  {self.throughput(secs) / 1e6:10.1f} MB/s",
                  file=file)
        print(f"  {'overall':16s} {self.total_time:10.6f} s  "
              f"{self.throughput(self.total_time) / 1e6:10.1f} MB/s", file=file)


CSV_HEADER = "decoder,workers,cr,capacities,phase,seconds,decoded_bytes,throughput_bps"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_size(text: str) -> int:
    units = {"kib": 1024, "mib": 1024**2, "gib": 1024**3,
             "kb": 1000, "mb": 1000**2, "gb": 1000**3, "b": 1}
    t = text.strip().lower()
    for suffix in sorted(units, key=len, reverse=True):
        if t.endswith(suffix):
            return int(float(t[: -len(suffix)]) * units[suffix])
    return int(t)


def _parse_capacities(items: list[str] | None) -> dict[int, int]:
    table = {}
    for item in items or []:
        cls, _, value = item.partition("=")
        table[int(cls)] = int(value)
    return table


def _load_codebook(path: str, width: int) -> Codebook:
    raw = json.loads(Path(path).read_text())
    codes = raw.get("codes", raw)
    width = int(raw.get("symbol_width", width))

    def key(k: str) -> int:
        return int(k) if k.lstrip("-").isdigit() else ord(k)

    return from_explicit(codes_from_strings({key(k): v for k, v in codes.items()}),
                         symbol_width=width)


def _read_codes(path: str, width: int) -> np.ndarray:
    data = Path(path).read_bytes()
    word = width // 8
    if len(data) % word:
        raise CodecError(f"{path}: size {len(data)} not a multiple of {word} bytes")
    return np.frombuffer(data, dtype="<u2" if width == 16 else "u1").astype(np.uint16)


def _write_codes(path: str, codes: np.ndarray, width: int) -> None:
    dtype = "<u2" if width == 16 else "u1"
    Path(path).write_bytes(np.asarray(codes).astype(dtype).tobytes())


def _layout_from_args(args) -> LayoutConfig:
    return LayoutConfig(
        unit_bits=args.unit_bits,
        units_per_subseq=args.subseq_units,
        subseqs_per_seq=args.seq_subseqs,
    )


def cmd_encode(args) -> int:
    width = args.width
    symbols = _read_codes(args.input, width)
    if args.codebook:
        book = _load_codebook(args.codebook, width)
    elif symbols.size:
        values, counts = np.unique(symbols, return_counts=True)
        book = canonize(
            build_lengths({int(v): int(c) for v, c in zip(values, counts)}),
            symbol_width=width,
        )
    else:
        book = canonize({0: 1}, symbol_width=width)
    stream = encode(symbols, book, layout=_layout_from_args(args), with_gap=args.gap)
    write_container(stream, args.output)
    raw_bytes = symbols.size * width // 8
    packed = Path(args.output).stat().st_size
    payload = max(len(stream.units) * stream.layout.unit_bits // 8, 1)
    print(f"symbols={symbols.size} payload_bytes={payload} container_bytes={packed} "
          f"cr={raw_bytes / payload:.3f}")
    return 0


def cmd_decode(args) -> int:
    book = _load_codebook(args.codebook, 16) if args.codebook else None
    stream = read_container(args.input, codebook=book)
    width = stream.codebook.symbol_width
    config = TunerConfig(t_high=args.t_high, capacity_table=_parse_capacities(args.capacity))
    timings: dict[str, float] = {}
    start = time.perf_counter()
    if args.decoder == "sync":
        out = sync_decoder.decode(stream, workers=args.workers, tuner_config=config,
                                  timings=timings)
    elif args.decoder == "gap":
        out = gap_decoder.decode(stream, workers=args.workers, tuner_config=config,
                                 timings=timings)
    else:
        out = oracle_decode(stream).symbols
        timings["oracle"] = time.perf_counter() - start
    total = time.perf_counter() - start
    _write_codes(args.output, out, width)

    payload = max(len(stream.units) * stream.layout.unit_bits // 8, 1)
    report = BenchReport(
        decoder=args.decoder,
        workers=args.workers,
        decoded_bytes=out.size * width // 8,
        cr=(out.size * width // 8) / payload,
        capacities=_capacities_text(config),
        phase_times=timings,
        total_time=total,
    )
    report.print_text()
    return 0


def _capacities_text(config: TunerConfig) -> str:
    from . import tuner

    caps = [tuner.capacity(c, config) for c in range(1, config.t_high + 2)]
    return "/".join(str(c) for c in caps)


def _compute_eb(args, data: np.ndarray) -> float:
    if args.eb is not None:
        return args.eb
    if args.rel_eb is not None:
        span = float(data.max() - data.min()) if data.size else 1.0
        return args.rel_eb * span if span > 0 else args.rel_eb
    raise CodecError("one of --eb or --rel-eb is required")


def cmd_quantize(args) -> int:
    raw = Path(args.input).read_bytes()
    if len(raw) % 4:
        raise CodecError(f"{args.input}: size {len(raw)} not a multiple of 4 bytes")
    data = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    eb = _compute_eb(args, data)
    config = QuantConfig(error_bound=eb, symbol_width=args.width)
    result = quantize(data, config)
    _write_codes(args.output, result.codes, 16)
    _write_sidecar(args.output + ".outliers", config, result)
    print(f"points={data.size} eb={eb:.9g} outliers={len(result.outlier_indices)}")
    return 0


def cmd_dequantize(args) -> int:
    codes = _read_codes(args.input, 16)
    config, result = _read_sidecar(args.input + ".outliers", codes)
    if args.eb is not None:
        config = QuantConfig(error_bound=args.eb, symbol_width=config.symbol_width)
    data = dequantize(result, config)
    Path(args.output).write_bytes(data.astype("<f4").tobytes())
    print(f"points={codes.size} eb={config.error_bound:.9g}")
    return 0


def _write_sidecar(path: str, config: QuantConfig, result: QuantResult) -> None:
    with open(path, "wb") as f:
        f.write(_SIDECAR_HEADER.pack(_SIDECAR_MAGIC, 1, config.symbol_width,
                                     config.error_bound, len(result.outlier_indices)))
        for idx, val in zip(result.outlier_indices, result.outlier_values):
            f.write(_SIDECAR_ENTRY.pack(int(idx), float(val)))


def _read_sidecar(path: str, codes: np.ndarray) -> tuple[QuantConfig, QuantResult]:
    data = Path(path).read_bytes()
    magic, version, width, eb, count = _SIDECAR_HEADER.unpack_from(data, 0)
    if magic != _SIDECAR_MAGIC or version != 1:
        raise CodecError(f"{path}: not an outlier sidecar")
    idx = np.empty(count, dtype=np.int64)
    val = np.empty(count, dtype=np.float64)
    off = _SIDECAR_HEADER.size
    for i in range(count):
        idx[i], val[i] = _SIDECAR_ENTRY.unpack_from(data, off)
        off += _SIDECAR_ENTRY.size
    config = QuantConfig(error_bound=eb, symbol_width=width)
    return config, QuantResult(codes=codes, outlier_indices=idx, outlier_values=val)


def cmd_bench(args) -> int:
    if args.synth:
        sharp_text, _, size_text = args.synth.partition(":")
        sharpness = float(sharp_text)
        n = _parse_size(size_text) // 2
        codes = synth_codes(n, sharpness, seed=args.seed)
        values, counts = np.unique(codes, return_counts=True)
        book = canonize(build_lengths({int(v): int(c) for v, c in zip(values, counts)}),
                        symbol_width=16)
        stream = encode(codes, book, with_gap=True)
    elif args.container:
        stream = read_container(args.container)
    else:
        raise CodecError("bench needs --synth or a container path")

    width = stream.codebook.symbol_width
    decoded_bytes = stream.symbol_count * width // 8
    payload = max(len(stream.units) * stream.layout.unit_bits // 8, 1)
    cr = decoded_bytes / payload
    out_file = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.sweep:
            _bench_sweep(args, stream, decoded_bytes, out_file)
            return 0
        print(CSV_HEADER, file=out_file)
        config = TunerConfig(t_high=args.t_high, capacity_table=_parse_capacities(args.capacity))
        for decoder in args.decoders.split(","):
            report = _bench_one(decoder.strip(), stream, args.workers, config,
                                decoded_bytes, cr)
            for row in report.rows():
                print(",".join(str(c) for c in row), file=out_file)
        return 0
    finally:
        if args.out:
            out_file.close()


def _bench_one(decoder, stream, workers, config, decoded_bytes, cr) -> BenchReport:
    timings: dict[str, float] = {}
    start = time.perf_counter()
    if decoder == "sync":
        sync_decoder.decode(stream, workers=workers, tuner_config=config, timings=timings)
    elif decoder == "gap":
        gap_decoder.decode(stream, workers=workers, tuner_config=config, timings=timings)
    elif decoder == "oracle":
        oracle_decode(stream)
        timings["oracle"] = time.perf_counter() - start
    else:
        raise CodecError(f"unknown decoder {decoder!r}")
    total = time.perf_counter() - start
    return BenchReport(
        decoder=decoder, workers=workers, decoded_bytes=decoded_bytes, cr=cr,
        capacities=_capacities_text(config), phase_times=timings, total_time=total,
    )


def _bench_sweep(args, stream, decoded_bytes, out_file) -> None:
    lo, hi, step = (int(x) for x in args.sweep.split(":"))
    if stream.gap is not None:
        state = gap_decoder.entries_from_gap(stream)
        oi = gap_decoder.count_pass(stream, state, workers=args.workers)
    else:
        state = sync_decoder.synchronize(stream, workers=args.workers)
        oi = sync_decoder.output_index(state.counts)
    print("capacity,seconds,throughput_bps", file=out_file)
    for cap in range(lo, hi + 1, step):
        start = time.perf_counter()
        decode_write(stream, state, oi, capacity=cap, workers=args.workers)
        secs = time.perf_counter() - start
        tput = decoded_bytes / secs if secs > 0 else 0.0
        print(f"{cap},{secs:.6f},{tput:.0f}", file=out_file)


def build_parser() -> _Parser:
    parser = _Parser(prog="parhuff", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a codes file into a container")
    enc.add_argument("input")
    enc.add_argument("output")
    enc.add_argument("--gap", action="store_true", help="emit a gap array")
    enc.add_argument("--width", type=int, default=16, choices=(8, 16))
    enc.add_argument("--unit-bits", type=int, default=32, choices=(8, 16, 32))
    enc.add_argument("--subseq-units", type=int, default=4)
    enc.add_argument("--seq-subseqs", type=int, default=32)
    enc.add_argument("--codebook", help="explicit codebook JSON instead of a built one")
    enc.set_defaults(fn=cmd_encode)

    dec = sub.add_parser("decode", help="decode a container back to codes")
    dec.add_argument("input")
    dec.add_argument("output")
    dec.add_argument("--decoder", default="sync", choices=("sync", "gap", "oracle"))
    dec.add_argument("--workers", type=int, default=1)
    dec.add_argument("--t-high", type=int, default=8)
    dec.add_argument("--capacity", action="append", metavar="CLASS=N",
                     help="staging capacity override, repeatable")
    dec.add_argument("--codebook", help="explicit codebook JSON (containers store lengths only)")
    dec.set_defaults(fn=cmd_decode)

    qnt = sub.add_parser("quantize", help="error-bounded quantization of raw float32")
    qnt.add_argument("input")
    qnt.add_argument("output")
    qnt.add_argument("--eb", type=float, help="absolute error bound")
    qnt.add_argument("--rel-eb", type=float, help="error bound as a fraction of the value range")
    qnt.add_argument("--width", type=int, default=16, choices=(8, 16))
    qnt.set_defaults(fn=cmd_quantize)

    dqt = sub.add_parser("dequantize", help="reconstruct raw float32 from codes")
    dqt.add_argument("input")
    dqt.add_argument("output")
    dqt.add_argument("--eb", type=float, help="override the sidecar's error bound")
    dqt.set_defaults(fn=cmd_dequantize)

    ben = sub.add_parser("bench", help="timing harness, CSV output")
    ben.add_argument("container", nargs="?")
    ben.add_argument("--synth", metavar="SHARPNESS:SIZE",
                     help="benchmark a synthetic stream, e.g. 0.999:64MiB")
    ben.add_argument("--decoders", default="sync,gap")
    ben.add_argument("--workers", type=int, default=1)
    ben.add_argument("--t-high", type=int, default=8)
    ben.add_argument("--capacity", action="append", metavar="CLASS=N")
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--sweep", nargs="?", const="1024:8192:512", metavar="LO:HI:STEP",
                     help="brute-force capacity sweep (default 1024:8192:512)")
    ben.add_argument("--out", help="write CSV here instead of stdout")
    ben.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as e:
        return int(e.code or 0)
    except (CodecError, OSError, ValueError) as e:
        print(f"parhuff: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
