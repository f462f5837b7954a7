"""Distortion and rate metrics: MSE, PSNR, RD curves and Bjontegaard BD-rate."""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np


def mse(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def psnr(a, b):
    """RGB PSNR in dB for images on the [0, 1] scale; identical images give ``inf``."""
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


def psnr_from_mse(err):
    return math.inf if err == 0.0 else 10.0 * math.log10(1.0 / err)


@dataclass(frozen=True)
class RdPoint:
    bpp: float
    psnr_db: float

    def __post_init__(self):
        if not self.bpp > 0:
            raise ValueError(f"bpp must be positive, got {self.bpp}")


@dataclass(frozen=True)
class RdCurve:
    label: str
    points: tuple

    def __post_init__(self):
        pts = tuple(p if isinstance(p, RdPoint) else RdPoint(*p) for p in self.points)
        if len(pts) < 2:
            raise ValueError("an RD curve needs at least two points")
        rates = [p.bpp for p in pts]
        if any(r1 >= r2 for r1, r2 in zip(rates, rates[1:])):
            raise ValueError("RD points must be sorted by strictly increasing bpp")
        if any(math.isnan(p.psnr_db) for p in pts):
            raise ValueError("PSNR values must not be NaN")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_arrays(cls, label, bpp, psnr_db):
        return cls(label, tuple(RdPoint(float(r), float(q)) for r, q in zip(bpp, psnr_db)))

    @property
    def rates(self):
        return np.array([p.bpp for p in self.points])

    @property
    def psnrs(self):
        return np.array([p.psnr_db for p in self.points])


class NoOverlapError(ValueError):
    pass


def _finite_points(curve):
    rates, quality = curve.rates, curve.psnrs
    keep = np.isfinite(quality)
    if not keep.all():
        warnings.warn(f"{curve.label}: dropping {int((~keep).sum())} infinite-PSNR point(s) from BD fit")
    return rates[keep], quality[keep]


def _fit_log_rate(rates, quality, label):
    n = len(rates)
    if n < 2:
        raise ValueError(f"{label}: BD-rate needs at least 2 finite points, got {n}")
    degree = min(3, n - 1)
    if degree < 3:
        kind = "quadratic" if degree == 2 else "linear"
        warnings.warn(f"{label}: only {n} points, falling back to a {kind} fit")
    return np.polyfit(quality, np.log10(rates), degree)


def bd_rate(anchor, test, extrapolate=False):
    """Bjontegaard delta rate of ``test`` against ``anchor``, in percent.

    log10(rate) is fitted as a cubic in PSNR for each curve and both fits are
    integrated exactly over the common PSNR interval. Negative means ``test``
    needs fewer bits for the same quality.

    When the PSNR ranges do not overlap the result depends entirely on
    extrapolated fits, so it raises :class:`NoOverlapError` unless
    ``extrapolate`` is set. With ``extrapolate=True`` the fits are averaged
    over the gap between the two ranges instead, the behaviour of the
    classical reference scripts.
    """
    r_a, q_a = _finite_points(anchor)
    r_t, q_t = _finite_points(test)
    p_a = _fit_log_rate(r_a, q_a, anchor.label)
    p_t = _fit_log_rate(r_t, q_t, test.label)

    lo = max(q_a.min(), q_t.min())
    hi = min(q_a.max(), q_t.max())
    if lo >= hi:
        if not extrapolate or lo == hi:
            raise NoOverlapError(
                f"PSNR ranges do not overlap: {anchor.label} [{q_a.min():.4g}, {q_a.max():.4g}], "
                f"{test.label} [{q_t.min():.4g}, {q_t.max():.4g}]"
            )
        lo, hi = hi, lo
    int_a = np.polyint(p_a)
    int_t = np.polyint(p_t)
    area_a = np.polyval(int_a, hi) - np.polyval(int_a, lo)
    area_t = np.polyval(int_t, hi) - np.polyval(int_t, lo)
    avg_diff = (area_t - area_a) / (hi - lo)
    return (10.0**avg_diff - 1.0) * 100.0


RD_COLUMNS = ("label", "arch", "mapping_size", "encoding", "bpp", "psnr_db")


def _row_key(row):
    return (row["arch"], int(row["mapping_size"]), row["encoding"])


def _normalize_rows(results):
    rows = []
    seen = set()
    for r in results:
        row = dict(r)
        row.setdefault("label", "")
        key = _row_key(row)
        if key in seen:
            raise ValueError(f"duplicate RD entry for arch={key[0]} m={key[1]} encoding={key[2]}")
        seen.add(key)
        rows.append(row)
    rows.sort(key=lambda r: (int(r["mapping_size"]), r["encoding"], float(r["bpp"]), r["arch"]))
    return rows


def _fmt_row(row):
    return {
        "label": row["label"],
        "arch": row["arch"],
        "mapping_size": int(row["mapping_size"]),
        "encoding": row["encoding"],
        "bpp": f"{float(row['bpp']):.4g}",
        "psnr_db": f"{float(row['psnr_db']):.2f}",
    }


def rd_table(results, fmt="csv"):
    """Render RD results as CSV or JSON, one row per (arch, mapping size, encoding).

    Rows are ordered by mapping size, encoding, then rate; bpp is printed with
    4 significant digits and PSNR with 2 decimals.
    """
    rows = [_fmt_row(r) for r in _normalize_rows(results)]
    if fmt == "json":
        return json.dumps(rows, indent=2)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RD_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
