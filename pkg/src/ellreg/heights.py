"""Canonical heights with certified error, pairings, torsion, Gram matrices.

The height of a non-torsion point is computed as follows: map to the global
minimal model, multiply by the smallest integer m that moves the point into
the identity component of every special fiber, and there evaluate

    h_std(Q) = h(x(Q)) + sum_{n>=0} 4^{-(n+1)} F(x_n),
    F(x) = log max(|phi(x)|, |delta(x)|) - 4 log max(|x|, 1),

where x_{n+1} = phi(x_n)/delta(x_n) is the x-coordinate duplication map.  The
identity h(x(2Q)) = 4 h(x(Q)) + F(x(Q)) is exact for points with nonsingular
reduction everywhere (the duplication fraction stays in lowest terms), so the
only error is the series tail, bounded by sup|F| * 4^{-N} / 3 with sup|F|
certified from exact Bezout cofactors of (phi, delta).  The reported height is
h_std(Q) / (2 m^2), the quadratic-form normalization with the factor 1/2.
"""

import math
import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .errors import DegenerateLattice
from .points import RationalPoint, add, map_point, multiply, require_on_curve
from .primes import factorize
from .weierstrass import (
    invert_transform,
    minimal_model,
    singular_point_mod_p,
    tate_local,
)


@dataclass(frozen=True)
class HeightValue:
    """A real number with a certified absolute error bound."""

    value: float
    err: float

    def __post_init__(self):
        if self.err < 0:
            raise ValueError("error bound must be nonnegative")


@dataclass(frozen=True)
class TorsionInfo:
    """Order, cyclic structure, and affine points of the torsion subgroup."""

    order: int
    invariants: tuple
    points: tuple


@dataclass(frozen=True)
class GramLattice:
    """Symmetric positive-definite Gram matrix with per-entry error bounds.

    Positive definiteness is certified at construction: the smallest
    eigenvalue of the value matrix must exceed the operator bound of the
    error matrix, otherwise DegenerateLattice is raised.
    """

    values: tuple
    errs: tuple

    def __post_init__(self):
        vals = tuple(tuple(float(x) for x in row) for row in self.values)
        errs = tuple(tuple(float(x) for x in row) for row in self.errs)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "errs", errs)
        m = len(vals)
        for mat, name in ((vals, "values"), (errs, "errs")):
            if len(mat) != m or any(len(row) != m for row in mat):
                raise ValueError(f"{name} is not a square matrix of rank {m}")
        if any(x < 0 for row in errs for x in row):
            raise ValueError("error bounds must be nonnegative")
        for i in range(m):
            for j in range(i):
                if vals[i][j] != vals[j][i]:
                    raise ValueError("Gram matrix must be exactly symmetric")
        if m == 0:
            return
        ev = np.linalg.eigvalsh(np.array(vals))
        err_norm = max(sum(row) for row in errs)
        if ev[0] <= err_norm:
            raise DegenerateLattice(
                f"cannot certify positive definiteness: min eigenvalue {ev[0]:.3e}"
                f" vs accumulated error {err_norm:.3e}"
            )

    @property
    def m(self):
        return len(self.values)

    def value_matrix(self):
        return np.array(self.values, dtype=float).reshape(self.m, self.m)

    def err_matrix(self):
        return np.array(self.errs, dtype=float).reshape(self.m, self.m)

    def exact(self, i, j):
        """The (i, j) entry as the exact rational the float denotes."""
        return Fraction(self.values[i][j])


def gram_from_matrix(values, errs=None):
    """Build a GramLattice from nested lists; errors default to zero."""
    vals = tuple(tuple(float(x) for x in row) for row in values)
    if errs is None:
        errs = tuple(tuple(0.0 for _ in row) for row in vals)
    return GramLattice(vals, tuple(tuple(float(x) for x in row) for row in errs))


# ---------------------------------------------------------------------------
# certified bound for sup |F| over the real line
# ---------------------------------------------------------------------------


def _solve_fraction_system(mat, rhs):
    """Exact Gaussian elimination; mat is n x n of Fractions."""
    n = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise AssertionError("singular system in Bezout solve")
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _bezout_one_norms(pcoef, qcoef):
    """(sum|u_i|, sum|v_j|) for u p + v q = 1 with deg u < deg q, deg v < deg p."""
    dp = len(pcoef) - 1
    dq = len(qcoef) - 1
    n = dp + dq
    mat = [[Fraction(0)] * n for _ in range(n)]
    for j in range(dq):  # columns for u_j, multiplying p
        for i, pi in enumerate(pcoef):
            mat[i + j][j] = Fraction(pi)
    for k in range(dp):  # columns for v_k, multiplying q
        for i, qi in enumerate(qcoef):
            mat[i + k][dq + k] = Fraction(qi)
    rhs = [Fraction(1)] + [Fraction(0)] * (n - 1)
    sol = _solve_fraction_system(mat, rhs)
    u_norm = sum(abs(x) for x in sol[:dq])
    v_norm = sum(abs(x) for x in sol[dq:])
    return u_norm, v_norm


def _f_sup_bound(b2, b4, b6, b8):
    """Certified upper bound for sup_x |F(x)| from exact Bezout cofactors."""
    phi = [-b8, -2 * b6, -b4, 0, 1]
    dlt = [b6, 2 * b4, b2, 4]
    u1, v1 = _bezout_one_norms(phi, dlt)
    m_near = Fraction(1) / (u1 + v1)  # |x| <= 1

    # |x| >= 1 via t = 1/x: z(t) = t^4 phi(1/t), w(t) = t^3 delta(1/t)
    z = [1, 0, -b4, -2 * b6, -b8]
    w = [4, b2, 2 * b4, b6]
    u2, v2 = _bezout_one_norms(z, w)
    k = abs(b4) + 2 * abs(b6) + abs(b8)
    t_cut = Fraction(1) if k == 0 else Fraction(1, math.isqrt(2 * k) + 1)
    m_far = Fraction(1) / (u2 + v2 / t_cut)  # t_cut <= |t| <= 1
    m_low = min(m_near, m_far, Fraction(1, 2))  # |t| <= t_cut: |z| >= 1/2

    m_high = max(1 + k, 4 + abs(b2) + 2 * abs(b4) + abs(b6))
    lo = float(m_low) * (1 - 1e-9)
    hi = float(m_high) * (1 + 1e-9)
    return max(math.log(hi), -math.log(lo), 1.0)


# ---------------------------------------------------------------------------
# per-curve context (pure memo)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _HeightContext:
    reductions: tuple  # LocalReduction at each bad prime
    singular: tuple  # ((p, (x0, y0)), ...)
    f_sup: float


@lru_cache(maxsize=None)
def _minimal(c):
    return minimal_model(c)


@lru_cache(maxsize=None)
def _height_context(cmin):
    bad = sorted(factorize(abs(int(cmin.disc))))
    reds = tuple(tate_local(cmin, p) for p in bad)
    sing = tuple((p, singular_point_mod_p(cmin, p)) for p in bad)
    f_sup = _f_sup_bound(int(cmin.b2), int(cmin.b4), int(cmin.b6), int(cmin.b8))
    return _HeightContext(reds, sing, f_sup)


def _divisors(n):
    fac = factorize(n)
    divs = [1]
    for p, e in fac.items():
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def _torsion_multiple(c, pt, max_n=16):
    """The order of pt if it is <= max_n, else None."""
    acc = pt
    for n in range(1, max_n + 1):
        if acc is None:
            return n
        acc = add(c, acc, pt)
    return None


def _nonsingular_at(ctx, pt, p):
    """Whether pt on the minimal model reduces to a nonsingular point mod p."""
    if pt is None:
        return True
    xden = pt.x.denominator
    if xden % p == 0:
        return True  # reduces to the identity
    x0y0 = dict(ctx.singular)[p]
    xr = pt.x.numerator * pow(xden, -1, p) % p
    if xr != x0y0[0] % p:
        return True
    yr = pt.y.numerator * pow(pt.y.denominator, -1, p) % p
    return yr != x0y0[1] % p


def _saturation_multiple(cmin, ctx, pt):
    """Least m with m*pt in the identity component at every bad prime."""
    m = 1
    for red in ctx.reductions:
        if red.c == 1:
            continue
        for k in _divisors(red.c):
            if _nonsingular_at(ctx, multiply(cmin, k, pt), red.p):
                m = m * k // math.gcd(m, k)
                break
        else:
            raise AssertionError(f"no component multiple found at {red.p}")
    return m


# The mpmath context is process-global, so its precision changes must not
# interleave across threads; every workprec block takes this lock.
_MP_LOCK = threading.Lock()

_PRECISION_FLOOR = [128]


def set_precision_floor(bits):
    """Set the minimum working precision (bits) of the height series.

    The series already chooses enough precision for the requested error
    budget; this floor only ever raises it.  Returns the previous floor.
    """
    if int(bits) != bits or bits < 32:
        raise ValueError("precision floor must be an integer of at least 32 bits")
    old = _PRECISION_FLOOR[0]
    _PRECISION_FLOOR[0] = int(bits)
    return old


def _series_height(cmin, ctx, pt, tail_budget):
    """h_std of a point with everywhere-nonsingular reduction, and its error."""
    n_terms = max(8, int(math.ceil(math.log(ctx.f_sup / (3 * tail_budget), 4))) + 1)
    prec = 64 + 7 * n_terms + max(0, int(-math.log2(tail_budget)) + 16)
    prec = max(prec, _PRECISION_FLOOR[0])
    b2, b4, b6, b8 = (int(cmin.b2), int(cmin.b4), int(cmin.b6), int(cmin.b8))
    num, den = pt.x.numerator, pt.x.denominator
    with _MP_LOCK, mp.workprec(prec):
        acc = mp.log(max(abs(num), den))
        x = mp.mpf(num) / den
        weight = mp.mpf(1) / 4
        for _ in range(n_terms):
            xx = x * x
            phi = xx * xx - b4 * xx - 2 * b6 * x - b8
            dlt = ((4 * x + b2) * x + 2 * b4) * x + b6
            big = max(abs(phi), abs(dlt))
            low = max(abs(x), mp.mpf(1))
            acc += weight * (mp.log(big) - 4 * mp.log(low))
            weight /= 4
            x = phi / dlt
        value = float(acc)
    tail = ctx.f_sup * 4.0 ** (-n_terms) / 3
    rounding = math.ldexp(max(1.0, abs(value)), -(prec - 64))
    return value, tail + rounding


def canonical_height(c, pt, target_err=1e-12):
    """Quadratic-form canonical height of pt, certified within target_err.

    Torsion points (order <= 16) return exactly zero.  The value uses the
    normalization with the leading factor 1/2, i.e. half the doubling limit
    lim 4^{-n} h(x(2^n P)).
    """
    require_on_curve(c, pt)
    if pt is None or _torsion_multiple(c, pt) is not None:
        return HeightValue(0.0, 0.0)
    cmin, tr = _minimal(c)
    ctx = _height_context(cmin)
    q0 = map_point(tr, pt)
    msat = _saturation_multiple(cmin, ctx, q0)
    q = multiply(cmin, msat, q0)
    scale = 2 * msat * msat
    std, std_err = _series_height(cmin, ctx, q, target_err * scale / 2)
    value = std / scale
    err = std_err / scale + math.ldexp(max(1.0, abs(value)), -50)
    return HeightValue(value, err)


def pairing(c, p1, p2, target_err=1e-12):
    """Height pairing <P, Q> = (h(P+Q) - h(P) - h(Q)) / 2."""
    require_on_curve(c, p1)
    require_on_curve(c, p2)
    per = target_err / 2
    hs = canonical_height(c, add(c, p1, p2), per)
    h1 = canonical_height(c, p1, per)
    h2 = canonical_height(c, p2, per)
    value = (hs.value - h1.value - h2.value) / 2
    err = (hs.err + h1.err + h2.err) / 2 + math.ldexp(max(1.0, abs(value)), -50)
    return HeightValue(value, err)


def gram_matrix(c, gens, target_err=1e-12):
    """GramLattice of height pairings of the given generators.

    The generators are trusted to be a basis of the free part; a determinant
    below 1e-6 triggers a warning about possible dependence.
    """
    gens = list(gens)
    for i, g in enumerate(gens):
        require_on_curve(c, g)
        if g is None or _torsion_multiple(c, g) is not None:
            raise ValueError(f"generator {i} is a torsion point")
    m = len(gens)
    per = target_err / 2
    heights = [canonical_height(c, g, per) for g in gens]
    vals = [[0.0] * m for _ in range(m)]
    errs = [[0.0] * m for _ in range(m)]
    for i in range(m):
        vals[i][i] = heights[i].value
        errs[i][i] = heights[i].err
        for j in range(i + 1, m):
            hsum = canonical_height(c, add(c, gens[i], gens[j]), per)
            v = (hsum.value - heights[i].value - heights[j].value) / 2
            e = (hsum.err + heights[i].err + heights[j].err) / 2
            vals[i][j] = vals[j][i] = v
            errs[i][j] = errs[j][i] = e + math.ldexp(max(1.0, abs(v)), -50)
    lat = GramLattice(tuple(map(tuple, vals)), tuple(map(tuple, errs)))
    if m and float(np.linalg.det(lat.value_matrix())) < 1e-6:
        warnings.warn(
            "Gram determinant below 1e-6; generators may be dependent",
            stacklevel=2,
        )
    return lat


# ---------------------------------------------------------------------------
# torsion
# ---------------------------------------------------------------------------


def _count_points_mod_p(cmin, p):
    """#E(F_p) for an odd prime of good reduction, via character sums."""
    a1, a2, a3, a4, a6 = (int(a) % p for a in cmin.ainvs())
    total = p + 1
    for x in range(p):
        d = (a1 * x + a3) ** 2 + 4 * (x ** 3 + a2 * x * x + a4 * x + a6)
        d %= p
        if d != 0:
            total += 1 if pow(d, (p - 1) // 2, p) == 1 else -1
    return total


def _torsion_order_bound(cmin):
    disc = int(cmin.disc)
    bound = 0
    used = 0
    p = 3
    while used < 8 and p < 200:
        if disc % p != 0:
            bound = math.gcd(bound, _count_points_mod_p(cmin, p))
            used += 1
            if bound == 1:
                return 1
        p += 2
        while not _is_odd_prime(p):
            p += 2
    return bound if bound else 16


def _is_odd_prime(n):
    if n < 3 or n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _isqrt_floor(n):
    return math.isqrt(n) if n >= 0 else -1 - math.isqrt(-n - 1)


def _integer_cubic_roots(c2, c1, c0):
    """Integer roots of X^3 + c2 X^2 + c1 X + c0, by exact bisection.

    The derivative 3X^2 + 2 c2 X + c1 splits the line into at most three
    monotone pieces; on each piece a sign change pins down at most one
    integer root, found by binary search in exact integer arithmetic.
    """

    def f(x):
        return ((x + c2) * x + c1) * x + c0

    bound = 1 + max(abs(c2), abs(c1), abs(c0))
    cuts = [-bound, bound]
    quad_disc = c2 * c2 - 3 * c1
    if quad_disc >= 0:
        r = _isqrt_floor(quad_disc)
        for num in (-c2 - r, -c2 + r):
            for x in (num // 3 - 1, num // 3, num // 3 + 1):
                if -bound < x < bound:
                    cuts.append(x)
    cuts = sorted(set(cuts))
    out = set()
    for lo, hi in zip(cuts, cuts[1:]):
        flo, fhi = f(lo), f(hi)
        if flo == 0:
            out.add(lo)
        if fhi == 0:
            out.add(hi)
        if (flo < 0) == (fhi < 0) or flo == 0 or fhi == 0:
            continue
        sign = 1 if fhi > flo else -1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            val = sign * f(mid)
            if val == 0:
                out.add(mid)
                break
            if val < 0:
                lo = mid
            else:
                hi = mid
    return sorted(out)


def torsion_subgroup(c):
    """The rational torsion subgroup: order, structure, affine points.

    Candidates come from integral points on the scaled model
    Y^2 = X^3 - 27 c4 X - 54 c6 with Y = 0 or Y^2 dividing 6^12 disc, then are
    confirmed by exhibiting a vanishing multiple (order at most 16); a gcd of
    good-reduction point counts short-circuits curves with trivial torsion.
    """
    cmin, tr = _minimal(c)
    points = []
    if _torsion_order_bound(cmin) > 1:
        b2, c4, c6 = int(cmin.b2), int(cmin.c4), int(cmin.c6)
        a1, a3 = cmin.a1, cmin.a3
        dfac = dict(factorize(abs(int(cmin.disc))))
        dfac[2] = dfac.get(2, 0) + 12
        dfac[3] = dfac.get(3, 0) + 12
        etas = [0]
        for d in sorted(_square_divisors(dfac)):
            etas.append(d)
        seen = set()
        for eta in etas:
            for xi in _integer_cubic_roots(0, -27 * c4, -54 * c6 - eta * eta):
                for sgn in ((eta,) if eta == 0 else (eta, -eta)):
                    x = Fraction(xi - 3 * b2, 36)
                    y = (Fraction(sgn, 108) - a1 * x - a3) / 2
                    p = RationalPoint(x, y)
                    key = (p.x, p.y)
                    if key in seen:
                        continue
                    seen.add(key)
                    lhs = y * y + a1 * x * y + a3 * y
                    rhs = x ** 3 + cmin.a2 * x * x + cmin.a4 * x + cmin.a6
                    if lhs != rhs:
                        continue
                    if _torsion_multiple(cmin, p) is not None:
                        points.append(p)
    order = 1 + len(points)
    two_torsion = sum(1 for p in points if add(cmin, p, p) is None)
    if two_torsion == 3:
        invariants = (2, order // 2)
        if order % 4 != 0 or order // 2 not in (2, 4, 6, 8):
            raise AssertionError(f"non-Mazur torsion structure {invariants}")
    else:
        invariants = (order,)
        if order not in (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12):
            raise AssertionError(f"non-Mazur cyclic torsion order {order}")
    back = invert_transform(tr)
    mapped = sorted((map_point(back, p) for p in points), key=lambda q: (q.x, q.y))
    return TorsionInfo(order, invariants, tuple(mapped))


def _square_divisors(fac):
    divs = [1]
    for p, e in fac.items():
        divs = [d * p ** i for d in divs for i in range(e // 2 + 1)]
    return divs
