"""BD-rate between two RD curves.

Uses the published m=8 numbers for 768x512 Kodak images: four architectures
give four rates, both encodings share them, and the cosine map sits about
2 dB higher everywhere.
"""

import warnings

from rffinr import codec
from rffinr.metrics import NoOverlapError, RdCurve, bd_rate, rd_table

rates = [codec.bits_per_pixel(codec.named_arch(q, 8), 768, 512) for q in ("Q1", "Q2", "Q3", "Q4")]
existing = RdCurve.from_arrays("baseline", rates, [18.26, 18.70, 19.04, 19.38])
proposed = RdCurve.from_arrays("rff_cosine", rates, [20.33, 20.83, 21.37, 22.01])

print(rd_table(
    [{"label": f"m8-{c.label}", "arch": q, "mapping_size": 8, "encoding": c.label, "bpp": r, "psnr_db": p.psnr_db}
     for c in (existing, proposed) for q, r, p in zip(("Q1", "Q2", "Q3", "Q4"), c.rates, c.points)]
))

# the PSNR ranges do not overlap, so by default this is refused
try:
    bd_rate(existing, proposed)
except NoOverlapError as exc:
    print("refused:", exc)

# averaging the fits over the gap between the ranges gives the classical number
print(f"BD-rate over the gap: {bd_rate(existing, proposed, extrapolate=True):+.2f}%")

scaled = RdCurve.from_arrays("scaled", [0.9 * r for r in rates], existing.psnrs)
print(f"same curve at 90% of the rate: {bd_rate(existing, scaled):+.4f}%")

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    two = RdCurve.from_arrays("two", rates[:2], [18.3, 18.8])
    print(f"two-point curves fall back to a line: {bd_rate(RdCurve.from_arrays('a', rates[:2], [18.2, 18.7]), two):+.2f}%")
    print("warning:", caught[0].message)
