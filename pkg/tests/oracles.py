"""Independent test oracles.

These deliberately avoid the library's height machinery: heights come from the
raw doubling limit on exact integer fractions, and lattice counts come from
naive box enumeration.  Agreement between these and the production code is the
core correctness evidence for the height and enumeration layers.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from ellreg.primes import factorize, log_int
from ellreg.weierstrass import integral_model
from ellreg.points import map_point


def duplication_orbit(c, pt, steps):
    """Exact x-coordinates (a_n, d_n) of 2^n * pt via duplication polynomials.

    Common factors of the duplication fraction are supported on bad primes, so
    reduction strips those only; the returned pairs are coprime with d_n > 0.
    """
    ci, tr = integral_model(c)
    pt = map_point(tr, pt)
    b2, b4, b6, b8 = int(ci.b2), int(ci.b4), int(ci.b6), int(ci.b8)
    bad = sorted(factorize(int(ci.disc)))
    a, d = pt.x.numerator, pt.x.denominator
    orbit = [(a, d)]
    for _ in range(steps):
        aa, dd = a * a, d * d
        num = aa * aa - b4 * aa * dd - 2 * b6 * a * d * dd - b8 * dd * dd
        den = d * (4 * a * aa + b2 * aa * d + 2 * b4 * a * dd + b6 * d * dd)
        if den == 0:
            raise ZeroDivisionError("orbit hit a two-torsion point")
        for p in bad:
            while num % p == 0 and den % p == 0:
                num //= p
                den //= p
        if den < 0:
            num, den = -num, -den
        a, d = num, den
        orbit.append((a, d))
    return orbit


def doubling_height_sequence(c, pt, steps):
    """[log max(|a_n|, d_n)] for n = 0..steps along the duplication orbit."""
    return [log_int(max(abs(a), d)) for a, d in duplication_orbit(c, pt, steps)]


def oracle_height(c, pt, steps=9):
    """Half the scaled doubling limit: 0.5 * 4^{-n} * h(x(2^n P)) at n = steps."""
    hs = doubling_height_sequence(c, pt, steps)
    return 0.5 * hs[-1] / 4 ** steps


def oracle_count_int_gram(gram, bound, include_zero=False):
    """Exact count of integer vectors with v^T G v <= bound, G integer.

    Naive box enumeration; intended for small ranks and moderate bounds.
    bound may be an int or Fraction.
    """
    g = np.asarray(gram, dtype=np.int64)
    m = g.shape[0]
    bound = Fraction(bound)
    if bound < 0:
        return 0
    ginv = np.linalg.inv(g.astype(float))
    radii = [
        int(math.isqrt(int(float(bound) * ginv[i, i] * (1 + 1e-9)) + 1)) + 1
        for i in range(m)
    ]
    axes = [np.arange(-r, r + 1, dtype=np.int64) for r in radii]
    grids = np.meshgrid(*axes, indexing="ij")
    vecs = np.stack([gr.ravel() for gr in grids], axis=1)
    q = np.einsum("ki,ij,kj->k", vecs, g, vecs)
    hits = int(np.count_nonzero(q * bound.denominator <= bound.numerator))
    if not include_zero:
        hits -= 1
    return hits


def oracle_count_fraction_gram(gram, bound, include_zero=False):
    """Exact count for a rational Gram matrix, evaluated per candidate."""
    m = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    bound = Fraction(bound)
    if bound < 0:
        return 0
    gf = np.array([[float(x) for x in row] for row in g])
    ginv = np.linalg.inv(gf)
    radii = [int(math.floor(math.sqrt(float(bound) * ginv[i, i] * (1 + 1e-9)))) + 1 for i in range(m)]
    count = 0
    for vec in itertools.product(*[range(-r, r + 1) for r in radii]):
        q = Fraction(0)
        for i in range(m):
            for j in range(m):
                q += g[i][j] * vec[i] * vec[j]
        if q <= bound:
            count += 1
    if not include_zero:
        count -= 1
    return count


def oracle_minima_int_gram(gram, limit=None):
    """Successive minima of an integer Gram form by brute enumeration."""
    g = np.asarray(gram, dtype=np.int64)
    m = g.shape[0]
    # grow the search radius until m independent vectors are found
    bound = max(int(g[i, i]) for i in range(m))
    while True:
        ginv = np.linalg.inv(g.astype(float))
        radii = [int(math.isqrt(int(bound * ginv[i, i] * (1 + 1e-9)) + 1)) + 1 for i in range(m)]
        axes = [np.arange(-r, r + 1, dtype=np.int64) for r in radii]
        grids = np.meshgrid(*axes, indexing="ij")
        vecs = np.stack([gr.ravel() for gr in grids], axis=1)
        q = np.einsum("ki,ij,kj->k", vecs, g, vecs)
        order = np.argsort(q, kind="stable")
        chosen = []
        minima = []
        for idx in order:
            if q[idx] == 0 or q[idx] > bound:
                continue
            v = vecs[idx]
            cand = chosen + [v]
            if np.linalg.matrix_rank(np.array(cand, dtype=float)) == len(cand):
                chosen.append(v)
                minima.append(int(q[idx]))
                if len(chosen) == m:
                    return minima, chosen
        bound *= 2
        if limit is not None and bound > limit:
            raise RuntimeError("oracle search bound exceeded")
