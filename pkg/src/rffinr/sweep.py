"""Rate-distortion sweeps over (image x architecture x mapping size x encoding).

A sweep manifest is a flat ``key = value`` text file; list values are comma
separated and ``#`` starts a comment::

    images = kodim05.png, kodim06.png
    archs = Q1, Q2, Q3, Q4
    mapping_sizes = 8, 16, 32, 64
    encodings = baseline, rff_cosine
    sigma = 1.0
    iterations = 5000
    crop = 128
    seed = 0
    output = results/desk

Relative image paths are resolved against the manifest's directory.
"""

import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import codec
from .encoding import EncodingConfig, EncodingKind
from .imageio import center_crop, load_image, to_uint8
from .inr import DEFAULT_LR, TrainConfig, reconstruct, train
from .metrics import NoOverlapError, RdCurve, bd_rate, psnr
from .rng import derive_seed

logger = logging.getLogger(__name__)

_LIST_KEYS = {"images", "archs", "mapping_sizes", "encodings"}


@dataclass(frozen=True)
class SweepConfig:
    images: tuple = ()
    archs: tuple = ("Q1",)
    mapping_sizes: tuple = (8,)
    encodings: tuple = (EncodingKind.BASELINE, EncodingKind.RFF_COSINE)
    sigma: float = 1.0
    iterations: int = 5000
    lr: float = DEFAULT_LR
    crop: int = 128
    seed: int = 0
    output: str = "rd_results"
    threads: int = 1
    bd_mode: str = "average"  # or "per_image"
    extrapolate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "encodings", tuple(EncodingKind.parse(e) for e in self.encodings))
        object.__setattr__(self, "mapping_sizes", tuple(int(m) for m in self.mapping_sizes))
        if self.bd_mode not in ("average", "per_image"):
            raise ValueError(f"bd_mode must be 'average' or 'per_image', got {self.bd_mode!r}")

    def cells(self):
        for image in self.images:
            for arch in self.archs:
                for m in self.mapping_sizes:
                    for kind in self.encodings:
                        yield Cell(str(image), str(arch), m, kind)


def _parse_bool(text):
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_sweep_config(text, base_dir=None):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SweepConfig.__dataclass_fields__:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in _LIST_KEYS:
            values[key] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key in ("sigma", "lr"):
            values[key] = float(value)
        elif key in ("iterations", "crop", "seed", "threads"):
            values[key] = int(value)
        elif key == "extrapolate":
            values[key] = _parse_bool(value)
        else:
            values[key] = value
    if base_dir is not None and "images" in values:
        base = Path(base_dir)
        values["images"] = tuple(str(p if Path(p).is_absolute() else base / p) for p in values["images"])
    return SweepConfig(**values)


def load_sweep_config(path):
    path = Path(path)
    return parse_sweep_config(path.read_text(), base_dir=path.parent)


@dataclass(frozen=True)
class Cell:
    image: str
    arch: str
    mapping_size: int
    kind: EncodingKind

    def seeds(self, root_seed):
        """Seeds depend only on this cell, so growing the grid never changes old cells."""
        key = (root_seed, Path(self.image).name, self.arch.upper(), self.mapping_size, self.kind.label)
        return (
            derive_seed(*key, "w"),
            derive_seed(*key, "b"),
            derive_seed(*key, "init") >> 32,
        )


@dataclass
class CellResult:
    cell: Cell
    bpp: float = math.nan
    psnr_db: float = math.nan
    width: int = 0
    height: int = 0
    train_seconds: float = 0.0
    error: str = ""
    bitstream: bytes = field(default=b"", repr=False)

    @property
    def ok(self):
        return not self.error


def compress_image(image, arch, encoding, iterations=5000, lr=DEFAULT_LR, init_seed=0, log_every=100):
    """Train, quantize and measure. Returns ``(bitstream, stats)``.

    The reported PSNR is measured on the 8-bit rendering of the quantized
    model, which is exactly what ``decompress`` writes to disk.
    """
    height, width, _ = image.shape
    config = TrainConfig(arch, encoding, lr=lr, iterations=iterations, init_seed=init_seed, log_every=log_every)
    started = time.perf_counter()
    model = train(image, config)
    seconds = time.perf_counter() - started
    stream = codec.encode(model, width, height)
    decoded, _ = codec.decode(stream.to_bytes())
    rendered = to_uint8(reconstruct(decoded, width, height)) / 255.0
    stats = {
        "bpp": codec.bits_per_pixel(arch, width, height),
        "bpp_with_header": codec.bits_per_pixel(arch, width, height, include_header=True),
        "psnr_after_quantization": psnr(image, rendered),
        "psnr_float": psnr(image, reconstruct(model, width, height)),
        "train_seconds": seconds,
        "iterations": iterations,
        "final_mse": model.loss_history[-1][1],
        "saturated": stream.saturated,
        "width": width,
        "height": height,
    }
    return stream, stats


def run_cell(cell, config):
    result = CellResult(cell)
    try:
        image = center_crop(load_image(cell.image), config.crop)
        seed_w, seed_b, init_seed = cell.seeds(config.seed)
        encoding = EncodingConfig(cell.kind, cell.mapping_size, config.sigma, seed_w, seed_b)
        arch = codec.named_arch(cell.arch, cell.mapping_size)
        stream, stats = compress_image(
            image, arch, encoding, iterations=config.iterations, lr=config.lr, init_seed=init_seed
        )
    except Exception as exc:  # recorded per cell; the sweep carries on
        logger.warning("cell %s failed: %s", cell, exc)
        result.error = f"{type(exc).__name__}: {exc}"
        return result
    result.bpp = stats["bpp"]
    result.psnr_db = stats["psnr_after_quantization"]
    result.width, result.height = stats["width"], stats["height"]
    result.train_seconds = stats["train_seconds"]
    result.bitstream = stream.to_bytes()
    return result


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(config, threads=None):
    """Run every cell; results come back in grid order whatever the parallelism."""
    threads = config.threads if threads is None else threads
    cells = list(config.cells())
    if threads > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_cell_args, [(c, config) for c in cells]))
    return [run_cell(c, config) for c in cells]


def aggregate(results):
    """Mean bpp and PSNR per (arch, mapping size, encoding) over images."""
    groups = {}
    for r in results:
        if r.ok:
            groups.setdefault((r.cell.arch, r.cell.mapping_size, r.cell.kind), []).append(r)
    rows = []
    for (arch, m, kind), rs in groups.items():
        rows.append(
            {
                "label": f"m{m}-{kind.label}",
                "arch": arch,
                "mapping_size": m,
                "encoding": kind.label,
                "bpp": float(np.mean([r.bpp for r in rs])),
                "psnr_db": float(np.mean([r.psnr_db for r in rs])),
                "images": len(rs),
            }
        )
    return rows


def _curve(label, points):
    points = sorted(points)
    return RdCurve.from_arrays(label, [p[0] for p in points], [p[1] for p in points])


def _bd_or_reason(anchor_pts, test_pts, label, extrapolate):
    if len(anchor_pts) < 2 or len(test_pts) < 2:
        return None, "fewer than two rate points per curve"
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            value = bd_rate(_curve("baseline", anchor_pts), _curve(label, test_pts), extrapolate=extrapolate)
        note = "; ".join(str(w.message) for w in caught)
        return value, note
    except (NoOverlapError, ValueError) as exc:
        return None, str(exc)


def bd_report(results, config):
    """BD-rate of the cosine map against the sin/cos anchor, per mapping size."""
    report = []
    ok = [r for r in results if r.ok]
    for m in config.mapping_sizes:
        entry = {"mapping_size": m}
        if config.bd_mode == "average":
            rows = [row for row in aggregate(ok) if row["mapping_size"] == m]
            anchor = [(row["bpp"], row["psnr_db"]) for row in rows if row["encoding"] == "baseline"]
            test = [(row["bpp"], row["psnr_db"]) for row in rows if row["encoding"] == "rff_cosine"]
            value, note = _bd_or_reason(anchor, test, f"m{m}", config.extrapolate)
        else:
            values, notes = [], []
            for image in config.images:
                mine = [r for r in ok if r.cell.image == str(image) and r.cell.mapping_size == m]
                anchor = [(r.bpp, r.psnr_db) for r in mine if r.cell.kind is EncodingKind.BASELINE]
                test = [(r.bpp, r.psnr_db) for r in mine if r.cell.kind is EncodingKind.RFF_COSINE]
                v, n = _bd_or_reason(anchor, test, f"{Path(image).name}-m{m}", config.extrapolate)
                if v is not None:
                    values.append(v)
                if n:
                    notes.append(n)
            value = float(np.mean(values)) if values else None
            note = "; ".join(notes)
        entry["bd_rate_percent"] = value
        if note:
            entry["note"] = note
        psnr_delta = _mean_psnr_delta(ok, m)
        if psnr_delta is not None:
            entry["mean_psnr_gain_db"] = psnr_delta
        report.append(entry)
    return report


def _mean_psnr_delta(results, m):
    pairs = {}
    for r in results:
        if r.cell.mapping_size == m:
            pairs.setdefault((r.cell.image, r.cell.arch), {})[r.cell.kind] = r.psnr_db
    deltas = [
        d[EncodingKind.RFF_COSINE] - d[EncodingKind.BASELINE]
        for d in pairs.values()
        if EncodingKind.RFF_COSINE in d and EncodingKind.BASELINE in d
    ]
    return float(np.mean(deltas)) if deltas else None


def cells_csv(results):
    lines = ["image,arch,mapping_size,encoding,width,height,bpp,psnr_db,train_seconds,error"]
    for r in results:
        err = r.error.replace(",", ";").replace("\n", " ")
        lines.append(
            f"{Path(r.cell.image).name},{r.cell.arch},{r.cell.mapping_size},{r.cell.kind.label},"
            f"{r.width},{r.height},{r.bpp:.6f},{r.psnr_db:.4f},{r.train_seconds:.2f},{err}"
        )
    return "\n".join(lines) + "\n"


def with_overrides(config, **overrides):
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})
