import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from rffinr.metrics import NoOverlapError, RdCurve, RdPoint, bd_rate, psnr, rd_table

PUBLISHED_BPP_M8 = [0.0782, 0.1661, 0.3111, 0.6202]
PUBLISHED_EXISTING_M8 = [18.26, 18.70, 19.04, 19.38]
PUBLISHED_OURS_M8 = [20.33, 20.83, 21.37, 22.01]


def reference_bd_rate(r1, q1, r2, q2):
    """Independent Bjontegaard: natural-log fits, numerical quadrature, sorted interval."""
    f1 = np.poly1d(np.linalg.lstsq(np.vander(q1, 4), np.log(r1), rcond=None)[0])
    f2 = np.poly1d(np.linalg.lstsq(np.vander(q2, 4), np.log(r2), rcond=None)[0])
    a, b = sorted((max(min(q1), min(q2)), min(max(q1), max(q2))))
    diff = quad(lambda q: f2(q) - f1(q), a, b)[0] / (b - a)
    return (math.exp(diff) - 1) * 100


def curve(label, rates, quality):
    return RdCurve.from_arrays(label, rates, quality)


def test_psnr_identical_is_inf():
    a = np.random.default_rng(0).uniform(size=(4, 4, 3))
    assert psnr(a, a) == math.inf


def test_psnr_arithmetic():
    a = np.zeros((2, 2, 3))
    assert psnr(a, a + 0.1) == pytest.approx(20.0)
    assert psnr(a, np.ones_like(a)) == 0.0


def test_psnr_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((2, 2, 3)), np.zeros((2, 3, 3)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 0.9))
def test_psnr_symmetric_and_scaling(seed, k):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.25, 0.75, size=(5, 6, 3))
    err = rng.uniform(-0.2, 0.2, size=a.shape)
    b = a + err
    assert psnr(a, b) == pytest.approx(psnr(b, a))
    assert psnr(a, a + k * err) == pytest.approx(psnr(a, b) - 20 * math.log10(k))


def test_rd_curve_validation():
    with pytest.raises(ValueError):
        RdCurve("x", ((0.2, 20.0), (0.1, 21.0)))
    with pytest.raises(ValueError):
        RdPoint(0.0, 20.0)
    with pytest.raises(ValueError):
        RdCurve("x", ((0.1, 20.0),))


def test_bd_rate_identical_is_zero():
    c = curve("a", PUBLISHED_BPP_M8, PUBLISHED_EXISTING_M8)
    assert bd_rate(c, c) == 0.0


def test_bd_rate_uniform_scaling():
    rates = np.array([0.1, 0.2, 0.4, 0.8])
    q = [25.0, 27.0, 28.5, 29.0]
    got = bd_rate(curve("a", rates, q), curve("b", 0.9 * rates, q))
    assert got == pytest.approx(-10.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 3.0), st.integers(0, 1000))
def test_bd_rate_scaling_property(c, seed):
    rng = np.random.default_rng(seed)
    rates = np.sort(rng.uniform(0.05, 1.0, 4)) + np.arange(4) * 0.01
    q = np.sort(rng.uniform(20, 35, 4)) + np.arange(4) * 0.1
    assert bd_rate(curve("a", rates, q), curve("b", c * rates, q)) == pytest.approx((c - 1) * 100, abs=1e-7)


def test_bd_rate_antisymmetric_in_log_domain():
    a = curve("a", [0.1, 0.2, 0.4, 0.8], [25.0, 27.0, 28.5, 29.5])
    b = curve("b", [0.12, 0.22, 0.41, 0.7], [25.5, 27.2, 28.0, 29.1])
    ab, ba = bd_rate(a, b), bd_rate(b, a)
    assert math.log10(1 + ab / 100) == pytest.approx(-math.log10(1 + ba / 100))


def test_bd_rate_matches_reference_on_overlapping_curves():
    r1, q1 = [0.0848, 0.1759, 0.3202, 0.633], [21.67, 22.48, 22.69, 23.51]
    r2, q2 = r1, [22.15, 22.79, 22.85, 23.50]
    got = bd_rate(curve("a", r1, q1), curve("b", r2, q2))
    assert got == pytest.approx(reference_bd_rate(np.array(r1), q1, np.array(r2), q2), abs=1e-6)


def test_bd_rate_disjoint_rejected_by_default():
    a = curve("existing", PUBLISHED_BPP_M8, PUBLISHED_EXISTING_M8)
    b = curve("ours", PUBLISHED_BPP_M8, PUBLISHED_OURS_M8)
    with pytest.raises(NoOverlapError, match="19.38"):
        bd_rate(a, b)


def test_bd_rate_published_m8():
    a = curve("existing", PUBLISHED_BPP_M8, PUBLISHED_EXISTING_M8)
    b = curve("ours", PUBLISHED_BPP_M8, PUBLISHED_OURS_M8)
    got = bd_rate(a, b, extrapolate=True)
    ref = reference_bd_rate(np.array(PUBLISHED_BPP_M8), PUBLISHED_EXISTING_M8, np.array(PUBLISHED_BPP_M8), PUBLISHED_OURS_M8)
    assert got == pytest.approx(ref, abs=2.0)
    assert -99.0 < got < -97.0


def test_bd_rate_quadratic_fallback_warns():
    a = curve("a", [0.1, 0.2, 0.4], [25.0, 27.0, 28.0])
    with pytest.warns(UserWarning, match="quadratic"):
        assert bd_rate(a, a) == 0.0


def test_bd_rate_drops_infinite_psnr():
    a = curve("a", [0.1, 0.2, 0.4, 0.8, 1.6], [25.0, 27.0, 28.0, 29.0, math.inf])
    with pytest.warns(UserWarning, match="infinite"):
        assert bd_rate(a, a) == 0.0


def row(arch="Q1", m=8, enc="baseline", bpp=0.078242, q=18.261):
    return {"label": "x", "arch": arch, "mapping_size": m, "encoding": enc, "bpp": bpp, "psnr_db": q}


def test_rd_table_empty_is_header_only():
    assert rd_table([]) == "label,arch,mapping_size,encoding,bpp,psnr_db\n"


def test_rd_table_one_row_four_significant_digits():
    lines = rd_table([row()]).splitlines()
    assert len(lines) == 2
    rec = next(csv.DictReader(io.StringIO(rd_table([row()]))))
    assert rec["bpp"] == "0.07824"


def test_rd_table_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        rd_table([row(), row(q=20.0)])


def test_rd_table_ordering_and_json():
    rows = [row("Q2", 8, "rff_cosine", 0.166), row("Q1", 8, "rff_cosine", 0.078), row("Q1", 8, "baseline")]
    text = rd_table(rows)
    assert [r["arch"] + r["encoding"] for r in csv.DictReader(io.StringIO(text))] == [
        "Q1baseline",
        "Q1rff_cosine",
        "Q2rff_cosine",
    ]
    assert [r["arch"] for r in json.loads(rd_table(rows, fmt="json"))] == ["Q1", "Q1", "Q2"]
    assert rd_table(list(reversed(rows))) == text
