"""Release gate: nine binding acceptance criteria, one test each.

Every test checks one criterion end to end and prints a one-line summary.
The numeric thresholds here are contractual; do not loosen them.  Random
corpora are seeded, so a green run is reproducible bit for bit.
"""

import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from ellreg.certificates import (
    david_exponent,
    exponent_sum,
    gamma_inequality,
    ideal_norm_floor,
    minima_floor,
    minkowski_certificate,
    reg_floor_corollary,
    stored_c0,
    vdc_lattice_check,
    vdc_reg_floor,
)
from ellreg.harness import bundled_dataset_path, ingest, run_batch
from ellreg.heights import canonical_height, gram_from_matrix, torsion_subgroup
from ellreg.lattice import (
    asymptotic_constant,
    count_below,
    regulator_L,
    successive_minima,
)
from ellreg.points import add, multiply, negate, point
from ellreg.primes import primes_up_to
from ellreg.weierstrass import curve

from oracles import (
    doubling_height_sequence,
    oracle_count_int_gram,
    oracle_minima_int_gram,
)

DATA = bundled_dataset_path()


def _int_det(mat):
    m = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, m):
            f = a[r][col] / a[col][col]
            for c in range(col, m):
                a[r][c] -= f * a[col][c]
    return det


def _random_int_gram(rng, m, spread=4):
    """A random positive-definite integer Gram matrix B^T B, det != 0 exactly."""
    while True:
        b = [[rng.randint(-spread, spread) for _ in range(m)] for _ in range(m)]
        if _int_det(b) != 0:
            break
    return [
        [sum(b[k][i] * b[k][j] for k in range(m)) for j in range(m)] for i in range(m)
    ]


def _positive_rank_curves():
    out = []
    for rec in ingest(DATA):
        if rec.gens:
            c = curve(rec.ainvs)
            out.append((rec.label, c, [point(x, y) for x, y in rec.gens]))
    return out


# ---------------------------------------------------------------------------
# criterion 1: height convergence along the doubling orbit
# ---------------------------------------------------------------------------


def test_criterion_1_height_convergence():
    t0 = time.perf_counter()
    pairs = [
        (label, i, c, gens[i])
        for label, c, gens in _positive_rank_curves()
        for i in range(len(gens))
    ]
    assert len(pairs) == 20
    worst_d8 = 0.0
    shrink = {}
    for label, i, c, p in pairs:
        hhat = canonical_height(c, p).value
        seq = doubling_height_sequence(c, p, 8)
        ds = [abs(hhat - 0.5 * seq[n] / 4.0**n) for n in range(9)]
        worst_d8 = max(worst_d8, ds[8])
        xs = np.array([n for n in range(9) if ds[n] > 0.0], dtype=float)
        ys = np.array([math.log(ds[int(n)]) for n in xs])
        slope = np.polyfit(xs, ys, 1)[0]
        shrink[(label, i)] = math.exp(-slope)
    elapsed = time.perf_counter() - t0
    in_range = {k: v for k, v in shrink.items() if 3.5 <= v <= 4.5}
    outliers = sorted(set(shrink) - set(in_range))
    assert worst_d8 <= 1e-4, f"worst n=8 discrepancy {worst_d8:.3e}"
    assert len(in_range) >= 18, f"only {len(in_range)}/20 in [3.5, 4.5]: {shrink}"
    # the two honest stragglers: their per-step factor drifts above 4.5
    assert set(outliers) <= {("446d1", 0), ("446d1", 1)}, outliers
    assert elapsed <= 60.0
    print(
        f"criterion 1 PASS: max d8 {worst_d8:.2e} <= 1e-4,"
        f" shrink factor in [3.5, 4.5] on {len(in_range)}/20, {elapsed:.1f}s"
    )


# ---------------------------------------------------------------------------
# criterion 2: quadraticity, parallelogram law, torsion kernel
# ---------------------------------------------------------------------------


def _combo(c, gens, coeffs):
    acc = None
    for coeff, g in zip(coeffs, gens):
        term = multiply(c, coeff, g) if coeff else None
        acc = term if acc is None else (acc if term is None else add(c, acc, term))
    return acc


def test_criterion_2_height_identities():
    rng = random.Random(20260814)
    curves = _positive_rank_curves()
    worst = 0.0
    for _ in range(100):
        label, c, gens = curves[rng.randrange(len(curves))]
        while True:
            coeffs_p = [rng.randint(-2, 2) for _ in gens]
            coeffs_q = [rng.randint(-2, 2) for _ in gens]
            if any(coeffs_p) and any(coeffs_q):
                break
        p = _combo(c, gens, coeffs_p)
        q = _combo(c, gens, coeffs_q)
        n = rng.randint(2, 10)
        hp = canonical_height(c, p).value
        hq = canonical_height(c, q).value
        hnp = canonical_height(c, multiply(c, n, p)).value
        worst = max(worst, abs(hnp - n * n * hp))
        hsum = canonical_height(c, add(c, p, q)).value
        hdif = canonical_height(c, add(c, p, negate(c, q))).value
        worst = max(worst, abs(hsum + hdif - 2.0 * hp - 2.0 * hq))
    assert worst <= 1e-9, f"worst identity residual {worst:.3e}"
    checked = 0
    for rec in ingest(DATA):
        c = curve(rec.ainvs)
        info = torsion_subgroup(c)
        for t in info.points:
            hv = canonical_height(c, t)
            assert hv.value == 0.0 and hv.err == 0.0
            checked += 1
    assert checked == 27  # every bundled affine torsion point
    print(
        f"criterion 2 PASS: 100 seeded pairs, worst residual {worst:.2e} <= 1e-9,"
        f" {checked} torsion points exactly 0"
    )


# ---------------------------------------------------------------------------
# criterion 3: enumeration agrees with brute force exactly
# ---------------------------------------------------------------------------


def test_criterion_3_lattice_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(31337)
    count_checks = 0
    for _ in range(200):
        m = rng.randint(1, 4)
        g_int = _random_int_gram(rng, m)
        gram = gram_from_matrix(g_int)
        prof = successive_minima(gram)
        want, _ = oracle_minima_int_gram(g_int)
        assert [int(v) for v in prof.values] == want
        bounds = {0, want[0], want[-1], want[-1] + 3, rng.randint(1, 2 * want[-1])}
        for bound in sorted(bounds):
            got = count_below(gram, bound, include_zero=True).C
            expect = oracle_count_int_gram(g_int, bound, include_zero=True)
            assert got == expect, (g_int, bound, got, expect)
            count_checks += 1
    elapsed = time.perf_counter() - t0
    assert elapsed <= 120.0
    print(
        f"criterion 3 PASS: 200 random Gram matrices, minima exact,"
        f" {count_checks} counts exact, {elapsed:.1f}s"
    )


# ---------------------------------------------------------------------------
# criterion 4: every certificate passes with exact counts
# ---------------------------------------------------------------------------


def test_criterion_4_certificate_suite():
    rng = random.Random(271828)
    cert_count = 0
    for _ in range(200):
        m = rng.randint(2, 4)
        g_int = _random_int_gram(rng, m)
        gram = gram_from_matrix(g_int)
        prof = successive_minima(gram)
        reg = regulator_L(gram)
        weak, sharp = minkowski_certificate(gram, profile=prof)
        assert weak.status == "PASS" and sharp.status == "PASS", g_int
        cert_count += 2
        for bound in (prof.values[0], 2.0 * prof.values[-1]):
            cert = vdc_lattice_check(gram, bound)
            assert cert.status == "PASS", (g_int, bound, cert)
            pair = count_below(gram, bound, include_zero=True)
            for i in range(1, m + 1):
                _, cert = minima_floor(pair, i, observed_sq=prof.values[i - 1])
                assert cert.status == "PASS", (g_int, bound, i, cert)
                cert_count += 1
            _, c1 = reg_floor_corollary(pair.H, pair.C, m, observed_reg=reg.value)
            _, c2 = vdc_reg_floor(pair.H, pair.C, m, observed_reg=reg.value)
            assert c1.status == "PASS" and c2.status == "PASS", (g_int, bound)
            cert_count += 3

    # bundled curves: no FAIL anywhere; INDETERMINATE only for the provably
    # exact equalities (rank-1 product bounds, empty prime products)
    entries, status = run_batch(DATA)
    assert status == 0
    equality_ok = {"gamma_inequality", "minkowski_weak", "minkowski_sharp", "ideal_norm_floor"}
    for entry in entries:
        for cert in entry["certificates"]:
            assert cert["status"] != "FAIL", (entry["label"], cert)
            if cert["status"] == "INDETERMINATE":
                assert cert["name"] in equality_ok, (entry["label"], cert)
                assert "equality" in cert["note"]
            cert_count += 1

    # pure formula comparison on a 1000-point grid
    hs = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 1000.0]
    cs = sorted({int(round(10 ** (k / 4.0))) for k in range(25)})
    grid = 0
    for m in (1, 2, 3, 4):
        for bound in hs:
            for cnt in cs:
                assert vdc_reg_floor(bound, cnt, m) >= reg_floor_corollary(
                    bound, cnt, m
                ) * (1 - 1e-12)
                grid += 1
    assert grid == 1000
    print(
        f"criterion 4 PASS: {cert_count} certificates PASS"
        f" (equalities INDETERMINATE by design), 1000-point floor comparison holds"
    )


# ---------------------------------------------------------------------------
# criterion 5: exact rational constants and the gamma inequality sweep
# ---------------------------------------------------------------------------


def test_criterion_5_exact_constants():
    s16 = exponent_sum(1, 16)
    s15 = exponent_sum(1, 15)
    assert s16 == Fraction(91969, 9801792)
    assert s16 >= Fraction(9, 1000)
    assert s15 == Fraction(-94219, 576576)
    assert s15 <= Fraction(-16, 100)
    assert david_exponent(5) == Fraction(1, 120)
    assert david_exponent(1) == Fraction(-7, 8)
    first = gamma_inequality(1)
    assert first.status == "INDETERMINATE"
    assert abs(first.lhs - first.rhs) <= 4 * math.ulp(first.rhs)
    for m in range(2, 51):
        assert gamma_inequality(m).status == "PASS", m
    print(
        "criterion 5 PASS: exponent sums exact"
        " (91969/9801792 >= 0.009, -94219/576576 <= -0.16),"
        " gamma bound holds for m <= 50 with equality at m = 1"
    )


# ---------------------------------------------------------------------------
# criterion 6: curve-level floors clear the measured minima by >= 10 orders
# ---------------------------------------------------------------------------


def test_criterion_6_curve_floor_certificates():
    entries, status = run_batch(DATA)
    assert status == 0
    checked = 0
    worst_orders = math.inf
    for entry in entries:
        if entry["rank"] == 0:
            continue
        by_name = {c["name"]: c for c in entry["certificates"]}
        for name in ("hs_height_floor", "szpiro_reg_floor"):
            cert = by_name[name]
            assert cert["status"] == "PASS", (entry["label"], cert)
            assert cert["lhs"] >= 1e-3
            orders = math.log10(cert["lhs"] / cert["rhs"])
            worst_orders = min(worst_orders, orders)
            checked += 1
    assert checked == 32  # two floors on each of the 16 positive-rank curves
    assert worst_orders >= 10.0
    print(
        f"criterion 6 PASS: {checked} floor certificates PASS,"
        f" smallest margin {worst_orders:.1f} orders of magnitude"
    )


# ---------------------------------------------------------------------------
# criterion 7: counting matches the volume asymptotic at 10^4 points
# ---------------------------------------------------------------------------


def test_criterion_7_counting_asymptotic():
    t0 = time.perf_counter()
    rng = random.Random(424242)
    summaries = []
    for m in (2, 3):
        g_int = _random_int_gram(rng, m)
        gram = gram_from_matrix(g_int)
        reg = regulator_L(gram).value
        c_lat = asymptotic_constant(m, 1, reg)
        target = 15000.0
        bound = (target / c_lat) ** (2.0 / m)
        n = count_below(gram, bound, include_zero=True).C
        ratio = n / (c_lat * bound ** (m / 2.0))
        assert n >= 10**4, (m, n)
        assert 0.9 <= ratio <= 1.1, (m, ratio)
        summaries.append(f"m={m}: {n} points, ratio {ratio:.4f}")
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    print(f"criterion 7 PASS: {'; '.join(summaries)}, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# criterion 8: the stored sieve constant is the true minimum and always passes
# ---------------------------------------------------------------------------


def test_criterion_8_sieve_constant():
    fixture = stored_c0()
    c0 = fixture["c0"]
    assert c0 == 0.630929
    assert fixture["argmin_S"] == 1 and fixture["max_S"] == 100000
    primes = primes_up_to(1_299_709)
    assert len(primes) == 100_000
    cums = np.cumsum(np.log(np.array(primes, dtype=float)))
    svals = np.arange(1, 100_001, dtype=float)
    ratios = cums / (svals * np.log(svals + 2.0))
    true_min = float(ratios.min())
    argmin = int(ratios.argmin()) + 1
    assert argmin == 1
    assert math.isclose(true_min, math.log(2) / math.log(3), rel_tol=1e-12)
    assert c0 <= true_min <= c0 + 1e-6  # stored value rounded down
    assert np.all(cums >= c0 * svals * np.log(svals + 2.0))
    statuses = {ideal_norm_floor(s, 1, c0).status for s in range(1, 100_001)}
    assert statuses == {"PASS"}
    print(
        f"criterion 8 PASS: c0 = {c0} (true min {true_min:.9f} at S = {argmin}),"
        f" floor PASSes for every S <= 1e5"
    )


# ---------------------------------------------------------------------------
# criterion 9: certify is deterministic end to end
# ---------------------------------------------------------------------------


def test_criterion_9_end_to_end_determinism(tmp_path):
    outs = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "ellreg.cli", "certify", DATA, "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert len(doc) == 22
    assert all(c["status"] != "FAIL" for e in doc for c in e["certificates"])
    print(
        f"criterion 9 PASS: certify exits 0, byte-identical output"
        f" ({len(outs[0])} bytes) across two runs"
    )
