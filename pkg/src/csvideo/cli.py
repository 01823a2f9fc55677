"""Command-line surface: encode, decode, metrics, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bitstream, codec, ida, metrics, vfi, videoio

log = logging.getLogger(__name__)

META_NAME = "stream_meta.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csvideo",
        description="Distributed video block compressive sensing codec",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="sense a luminance sequence into a stream")
    enc.add_argument("--input", required=True, help="raw 4:2:0 file or Y-only container")
    enc.add_argument("--output", required=True, help="output stream path")
    enc.add_argument("--width", type=int, help="frame width (raw 4:2:0 input)")
    enc.add_argument("--height", type=int, help="frame height (raw 4:2:0 input)")
    enc.add_argument("--frames", type=int, help="limit the number of encoded frames")
    enc.add_argument("--gop", type=int, default=8, help="GOP size (default 8)")
    enc.add_argument("--delta-key", type=float, default=0.7, help="key measurement ratio")
    enc.add_argument("--delta-avg", type=float, default=0.175, help="average ratio per GOP")
    enc.add_argument("--block-size", type=int, default=16, choices=(4, 8, 16, 32))
    enc.add_argument("--alloc", choices=("thi", "mdd"), default="mdd", help="non-key allocator")
    enc.set_defaults(func=_cmd_encode)

    dec = sub.add_parser("decode", help="decode a stream into PGM frames")
    dec.add_argument("--input", required=True, help="stream path")
    dec.add_argument("--output-dir", required=True, help="directory for decoded PGM frames")
    dec.add_argument("--interp", choices=("linear", "external"), default="linear")
    dec.add_argument("--plugin-cmd", help="interpolation plugin command (external mode)")
    dec.add_argument("--plugin-timeout", type=float, default=30.0, help="plugin timeout seconds")
    dec.add_argument("--recon", choices=("fast", "ida"), default="fast")
    dec.add_argument("--ida-iters", type=int, default=20)
    dec.add_argument("--ida-damping", type=float, default=1.0)
    dec.add_argument(
        "--ida-denoiser", choices=sorted(ida.BUILTIN_DENOISERS), default="gaussian"
    )
    dec.add_argument("--td", type=float, help="best-pixel-discriminator threshold")
    dec.set_defaults(func=_cmd_decode)

    met = sub.add_parser("metrics", help="PSNR / MS-SSIM of decoded frames")
    met.add_argument("--original", required=True, help="original sequence file")
    met.add_argument("--decoded", required=True, help="directory of decoded PGM frames")
    met.add_argument("--csv", required=True, help="per-frame CSV output path")
    met.add_argument("--width", type=int, help="frame width (raw 4:2:0 original)")
    met.add_argument("--height", type=int, help="frame height (raw 4:2:0 original)")
    met.add_argument("--frames", type=int, help="limit comparison to the first N frames")
    met.set_defaults(func=_cmd_metrics)

    rep = sub.add_parser("report", help="aggregate per-sequence CSVs into a summary table")
    rep.add_argument("csvs", nargs="+", help="per-sequence CSV files from the metrics command")
    rep.add_argument("--output", help="summary CSV path (default: stdout)")
    rep.set_defaults(func=_cmd_report)
    return parser


def _cmd_encode(args) -> int:
    frames = videoio.read_y_sequence(args.input, args.width, args.height, args.frames)
    config = codec.GopConfig(
        gop_size=args.gop,
        delta_key=args.delta_key,
        delta_avg=args.delta_avg,
        block_size=args.block_size,
        allocation=args.alloc.upper(),
    )
    log.info(
        "encoding %d frames: G=%d, key ratio %.4f, derived non-key ratio %.4f, %s allocation",
        len(frames), config.gop_size, config.delta_key, config.delta_nonkey, config.allocation,
    )
    stream = codec.encode_sequence(frames, config)
    bitstream.save_stream(args.output, stream)
    ratios = stream.realized_ratios()
    log.info(
        "wrote %s: %d frames, realized ratio %.4f average",
        args.output, stream.frame_count, sum(ratios) / len(ratios),
    )
    return 0


def _cmd_decode(args) -> int:
    stream = bitstream.load_stream(args.input)
    if args.interp == "external":
        if not args.plugin_cmd:
            raise ValueError("--interp external requires --plugin-cmd")
        interpolator = vfi.ExternalInterpolator(args.plugin_cmd, timeout=args.plugin_timeout)
    else:
        interpolator = vfi.LinearInterpolator()
    config = codec.GopConfig(
        gop_size=stream.gop_size,
        delta_key=stream.delta_key,
        delta_nonkey=stream.delta_nonkey,
        block_size=stream.block_size,
        allocation=stream.allocation,
        reconstruction=args.recon.upper(),
        bpd_threshold=args.td,
    )
    ida_config = ida.IdaConfig(
        iterations=args.ida_iters,
        damping=args.ida_damping,
        denoiser=ida.BUILTIN_DENOISERS[args.ida_denoiser],
    )
    decoded = codec.decode_sequence(stream, interpolator, config, ida_config)
    out_dir = Path(args.output_dir)
    videoio.write_frame_dir(out_dir, [frame.pixels for frame in decoded])
    meta = {
        "frames": [
            {"kind": payload.kind, "delta_realized": ratio}
            for payload, ratio in zip(stream.payloads, stream.realized_ratios())
        ]
    }
    (out_dir / META_NAME).write_text(json.dumps(meta, indent=2))
    log.info("decoded %d frames into %s", len(decoded), out_dir)
    return 0


def _cmd_metrics(args) -> int:
    originals = videoio.read_y_sequence(args.original, args.width, args.height, args.frames)
    decoded = videoio.read_frame_dir(args.decoded)
    metadata = None
    meta_path = Path(args.decoded) / META_NAME
    if meta_path.exists():
        entries = json.loads(meta_path.read_text())["frames"]
        metadata = [(e["kind"], e["delta_realized"]) for e in entries]
    if args.frames is not None:
        decoded = decoded[: args.frames]
        metadata = metadata[: args.frames] if metadata is not None else None
    report = metrics.evaluate_sequence(originals, decoded, metadata)
    report.write_csv(args.csv)
    log.info(
        "%d frames: average PSNR %.2f dB, average MS-SSIM %.4f",
        len(report.rows), report.average_psnr, report.average_ms_ssim,
    )
    return 0


def _read_average_row(path) -> tuple[float, float]:
    import csv as _csv

    with open(path, newline="") as fh:
        for row in _csv.DictReader(fh):
            if row["frame"] == "average":
                return float(row["psnr"]), float(row["ms_ssim"])
    raise ValueError(f"{path} has no average row; was it written by `csvideo metrics`?")


def _cmd_report(args) -> int:
    import csv as _csv

    rows = []
    for path in args.csvs:
        avg_psnr, avg_ssim = _read_average_row(path)
        rows.append((Path(path).stem, avg_psnr, avg_ssim))
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = _csv.writer(out)
        writer.writerow(["sequence", "psnr", "ms_ssim"])
        for name, p, s in rows:
            writer.writerow([name, f"{p:.2f}", f"{s:.4f}"])
        writer.writerow(
            [
                "average",
                f"{sum(r[1] for r in rows) / len(rows):.2f}",
                f"{sum(r[2] for r in rows) / len(rows):.4f}",
            ]
        )
    finally:
        if args.output:
            out.close()
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
