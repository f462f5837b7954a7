"""``rffinr`` command line: compress, decompress, inspect, rd-sweep, kernel-exp.

Exit codes: 0 success, 2 input error, 3 training divergence, 4 decode error.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import codec
from .encoding import EncodingConfig
from .imageio import ImageReadError, center_crop, load_image, save_image
from .inr import DEFAULT_LR, reconstruct
from .kernel_lab import DEFAULT_MAPPING_SIZES, run_kernel_experiment
from .metrics import psnr, rd_table
from .nn import DivergenceError
from .rng import derive_seed
from .sweep import aggregate, bd_report, cells_csv, compress_image, load_sweep_config, run_sweep, with_overrides

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGED = 3
EXIT_DECODE = 4

logger = logging.getLogger("rffinr")


def _clean(value):
    # json.dumps would emit bare Infinity/NaN, which is not JSON
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _dump(obj, indent=2):
    return json.dumps(_clean(obj), indent=indent)


def _fail(code, message):
    print(f"rffinr: {message}", file=sys.stderr)
    return code


def cmd_compress(args):
    try:
        image = center_crop(load_image(args.image), args.crop)
    except ImageReadError as exc:
        return _fail(EXIT_INPUT, str(exc))
    seed_w = args.seed_w if args.seed_w is not None else derive_seed(args.seed, "w")
    seed_b = args.seed_b if args.seed_b is not None else derive_seed(args.seed, "b")
    init_seed = args.init_seed if args.init_seed is not None else derive_seed(args.seed, "init") >> 32
    try:
        encoding = EncodingConfig(args.encoding, args.mapping_size, args.sigma, seed_w, seed_b)
        arch = codec.named_arch(args.arch, args.mapping_size)
    except ValueError as exc:
        return _fail(EXIT_INPUT, str(exc))
    out = Path(args.out) if args.out else Path(args.image).with_suffix(".inrb")
    try:
        stream, stats = compress_image(
            image, arch, encoding, iterations=args.iterations, lr=args.lr, init_seed=init_seed
        )
    except DivergenceError as exc:
        return _fail(EXIT_DIVERGED, f"training diverged: {exc}")
    codec.write_bitstream(out, stream)
    if stream.saturated:
        logger.warning("%d parameters saturated to the binary16 range", stream.saturated)
    stats["output"] = str(out)
    print(_dump(stats, indent=2 if args.json else None))
    return EXIT_OK


def cmd_decompress(args):
    try:
        data = Path(args.bitstream).read_bytes()
    except OSError as exc:
        return _fail(EXIT_INPUT, f"{args.bitstream}: {exc.strerror or exc}")
    try:
        model, (width, height) = codec.decode(data)
    except codec.DecodeError as exc:
        return _fail(EXIT_DECODE, f"{args.bitstream}: {exc}")
    width = args.width or width
    height = args.height or height
    out = Path(args.out) if args.out else Path(args.bitstream).with_suffix(".png")
    image = reconstruct(model, width, height)
    save_image(out, image)
    stats = {"output": str(out), "width": width, "height": height}
    if args.reference:
        try:
            ref = center_crop(load_image(args.reference), args.crop)
            decoded = load_image(out)
        except ImageReadError as exc:
            return _fail(EXIT_INPUT, str(exc))
        if ref.shape != decoded.shape:
            return _fail(EXIT_INPUT, f"reference is {ref.shape[1]}x{ref.shape[0]}, decoded is {width}x{height}")
        stats["psnr"] = psnr(ref, decoded)
    if args.json or args.reference:
        print(_dump(stats))
    return EXIT_OK


def cmd_inspect(args):
    try:
        data = Path(args.bitstream).read_bytes()
    except OSError as exc:
        return _fail(EXIT_INPUT, f"{args.bitstream}: {exc.strerror or exc}")
    try:
        header = codec.inspect_bytes(data)
    except codec.DecodeError as exc:
        return _fail(EXIT_DECODE, f"{args.bitstream}: {exc}")
    print(_dump(header))
    return EXIT_OK


def cmd_rd_sweep(args):
    try:
        config = load_sweep_config(args.config)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_INPUT, f"{args.config}: {exc}")
    config = with_overrides(
        config,
        seed=args.seed,
        output=args.out,
        threads=args.threads,
        iterations=args.iterations,
    )
    outdir = Path(config.output)
    outdir.mkdir(parents=True, exist_ok=True)
    results = run_sweep(config)
    rows = aggregate(results)
    table = rd_table(rows)
    report = bd_report(results, config)
    (outdir / "rd_table.csv").write_text(table)
    (outdir / "rd_table.json").write_text(rd_table(rows, fmt="json") + "\n")
    (outdir / "cells.csv").write_text(cells_csv(results))
    (outdir / "bd_rate.json").write_text(_dump(report) + "\n")
    if args.keep_bitstreams:
        for r in results:
            if r.ok:
                name = f"{Path(r.cell.image).stem}_{r.cell.arch}_m{r.cell.mapping_size}_{r.cell.kind.label}.inrb"
                (outdir / name).write_bytes(r.bitstream)
    failed = [r for r in results if not r.ok]
    for r in failed:
        print(f"rffinr: cell {r.cell} failed: {r.error}", file=sys.stderr)
    if args.json:
        print(_dump({"rows": json.loads(rd_table(rows, fmt="json")), "bd_rate": report, "failed": len(failed)}))
    else:
        sys.stdout.write(table)
        for entry in report:
            value = entry["bd_rate_percent"]
            text = "n/a" if value is None else f"{value:+.2f}%"
            print(f"BD-rate m={entry['mapping_size']}: {text}")
    return EXIT_OK


def cmd_kernel_exp(args):
    result = run_kernel_experiment(
        mapping_sizes=args.sizes,
        trials=args.trials,
        seed=args.seed,
        n=args.n,
        percentile=args.percentile,
        inputs=args.inputs,
    )
    csv_text = result.to_csv()
    if args.out:
        Path(args.out).write_text(csv_text)
    crossover = result.crossover()
    if args.json:
        keys = ("mapping_size", "kind", "mean_error", "stddev_error", "trials")
        rows = [dict(zip(keys, row)) for row in result.rows()]
        print(_dump({"sigma": result.sigma, "rows": rows, "crossover": crossover}))
    else:
        sys.stdout.write(csv_text)
        print(f"# sigma = {result.sigma:.6g}", file=sys.stderr)
        if crossover is None:
            print("# no crossover in the tested sizes", file=sys.stderr)
        else:
            print(f"# crossover at mapping size {crossover}", file=sys.stderr)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="rffinr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="root seed")
        p.add_argument("--out", help="output path")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--json", action="store_true", help="print JSON output")

    p = sub.add_parser("compress", help="overfit an INR to an image and write a .inrb bitstream")
    p.add_argument("image")
    common(p)
    p.add_argument("--arch", default="Q1", help="Q1-Q4 or 'layers,width'")
    p.add_argument("--mapping-size", type=int, default=8)
    p.add_argument("--encoding", default="rff_cosine", choices=["baseline", "rff_cosine"])
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed-w", type=int)
    p.add_argument("--seed-b", type=int)
    p.add_argument("--init-seed", type=int)
    p.add_argument("--lr", type=float, default=DEFAULT_LR)
    p.add_argument("--iterations", type=int, default=5000)
    p.add_argument("--crop", type=int, default=0, help="centre crop size, 0 keeps the full image")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a .inrb bitstream to PNG")
    p.add_argument("bitstream")
    common(p)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--reference", help="original image; prints PSNR of the decoded file against it")
    p.add_argument("--crop", type=int, default=0, help="crop applied to --reference")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("inspect", help="dump a .inrb header as JSON")
    p.add_argument("bitstream")
    common(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("rd-sweep", help="run an RD sweep from a manifest")
    p.add_argument("config")
    common(p)
    p.set_defaults(seed=None)
    p.add_argument("--iterations", type=int)
    p.add_argument("--keep-bitstreams", action="store_true")
    p.set_defaults(func=cmd_rd_sweep)

    p = sub.add_parser("kernel-exp", help="kernel approximation error of both feature maps")
    common(p)
    p.add_argument("--sizes", type=int, nargs="+", default=list(DEFAULT_MAPPING_SIZES))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--percentile", type=float, default=5.0)
    p.add_argument("--inputs", choices=["values", "pairs"], default="values")
    p.set_defaults(func=cmd_kernel_exp)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
