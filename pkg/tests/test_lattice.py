"""Lattice engine tests: regulators, LLL, minima, and counting.

Oracle comparisons use the independent brute-force enumerators in
oracles.py over seeded random integer Gram matrices.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from ellreg.errors import DegenerateLattice, EnumerationBudgetExceeded
from ellreg.heights import gram_from_matrix
from ellreg.lattice import (
    CountingPair,
    MinimaProfile,
    asymptotic_constant,
    count_below,
    count_points_below,
    lll_reduce,
    reg_convert,
    regulator_L,
    successive_minima,
)

from oracles import oracle_count_int_gram, oracle_minima_int_gram


def random_int_gram(rng, m, spread=4):
    """A random positive-definite integer Gram matrix B^T B."""
    while True:
        b = [[rng.randint(-spread, spread) for _ in range(m)] for _ in range(m)]
        g = [[sum(b[k][i] * b[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
        if round(np.linalg.det(np.array(g, float))) != 0:
            return g


class TestRegulator:
    def test_empty_is_one(self):
        r = regulator_L(gram_from_matrix([]))
        assert r.value == 1.0 and r.err == 0.0

    def test_identity(self):
        r = regulator_L(gram_from_matrix([[1.0, 0.0], [0.0, 1.0]]))
        assert r.value == 1.0 and r.err == 0.0

    def test_two_by_two(self):
        r = regulator_L(gram_from_matrix([[2.0, 1.0], [1.0, 2.0]]))
        assert r.value == 3.0 and r.err == 0.0

    def test_error_propagation(self):
        e = 1e-12
        g = gram_from_matrix([[2.0, 1.0], [1.0, 2.0]], [[e, e], [e, e]])
        r = regulator_L(g)
        assert r.value == 3.0
        # adjugate entries have absolute value 1 or 2; first-order sum is 6e-12
        assert 6e-12 <= r.err <= 2e-11

    def test_matches_basis_determinant(self):
        rng = random.Random(20240311)
        for m in (1, 2, 3, 4):
            b = [[rng.randint(-5, 5) for _ in range(m)] for _ in range(m)]
            while round(np.linalg.det(np.array(b, float))) == 0:
                b = [[rng.randint(-5, 5) for _ in range(m)] for _ in range(m)]
            g = [[sum(b[k][i] * b[k][j] for k in range(m)) for j in range(m)]
                 for i in range(m)]
            r = regulator_L(gram_from_matrix(g))
            expected = round(np.linalg.det(np.array(b, float))) ** 2
            assert r.value == float(expected)


class TestRegConvert:
    def test_rank_zero(self):
        assert reg_convert(0.37, 0) == 0.37

    def test_rank_one(self):
        assert abs(reg_convert(0.0511114, 1) - 0.1022228) < 1e-12

    def test_rank_two(self):
        assert reg_convert(0.25, 2) == 1.0

    def test_negative_rank_rejected(self):
        with pytest.raises(ValueError):
            reg_convert(1.0, -1)


class TestLLL:
    def test_hand_reduction(self):
        g = gram_from_matrix([[1.0, 10.0], [10.0, 101.0]])
        red, u = lll_reduce(g)
        assert red.values == ((1.0, 0.0), (0.0, 1.0))
        assert abs(u[0][0] * u[1][1] - u[0][1] * u[1][0]) == 1

    def test_identity_fixed(self):
        g = gram_from_matrix([[1.0, 0.0], [0.0, 1.0]])
        red, u = lll_reduce(g)
        assert red.values == g.values
        assert u == ((1, 0), (0, 1))

    def test_determinant_preserved(self):
        rng = random.Random(998877)
        for m in (2, 3, 4, 5):
            g = gram_from_matrix(random_int_gram(rng, m))
            red, u = lll_reduce(g)
            before = regulator_L(g)
            after = regulator_L(red)
            assert abs(before.value - after.value) <= before.err + after.err + 1e-9

    def test_transform_consistency(self):
        rng = random.Random(31415)
        for _ in range(10):
            g = gram_from_matrix(random_int_gram(rng, 3))
            red, u = lll_reduce(g)
            gm = np.array(g.values)
            um = np.array(u, float)
            assert np.allclose(um.T @ gm @ um, np.array(red.values), atol=1e-9)

    def test_lovasz_ordering_tendency(self):
        # the first reduced vector is a short one: never longer than the
        # shortest original diagonal entry
        rng = random.Random(2718)
        for _ in range(10):
            g = gram_from_matrix(random_int_gram(rng, 4))
            red, _ = lll_reduce(g)
            assert red.values[0][0] <= min(g.values[i][i] for i in range(4))


class TestSuccessiveMinima:
    def test_identity(self):
        for m in (1, 2, 3, 4):
            vals = [[float(i == j) for j in range(m)] for i in range(m)]
            prof = successive_minima(gram_from_matrix(vals))
            assert prof.values == tuple([1.0] * m)

    def test_diagonal(self):
        prof = successive_minima(gram_from_matrix([[2.0, 0.0], [0.0, 3.0]]))
        assert prof.values == (2.0, 3.0)
        assert prof.vectors == ((1, 0), (0, 1))

    def test_skew_example(self):
        prof = successive_minima(gram_from_matrix([[4.0, 2.0], [2.0, 3.0]]))
        assert prof.values == (3.0, 3.0)
        assert prof.vectors == ((0, 1), (1, -1))

    def test_empty(self):
        prof = successive_minima(gram_from_matrix([]))
        assert prof.values == () and prof.vectors == ()

    def test_vectors_realize_and_are_independent(self):
        rng = random.Random(424242)
        for _ in range(12):
            m = rng.choice((2, 3, 4))
            g = random_int_gram(rng, m)
            prof = successive_minima(gram_from_matrix(g))
            vm = np.array(prof.vectors, float)
            assert np.linalg.matrix_rank(vm) == m
            for q, v in zip(prof.values, prof.vectors):
                qv = sum(g[i][j] * v[i] * v[j] for i in range(m) for j in range(m))
                assert float(qv) == q

    def test_oracle_agreement(self):
        rng = random.Random(77)
        for _ in range(20):
            m = rng.choice((1, 2, 3))
            g = random_int_gram(rng, m, spread=3)
            prof = successive_minima(gram_from_matrix(g))
            want, _ = oracle_minima_int_gram(g)
            assert list(prof.values) == [float(v) for v in want]

    def test_invariant_under_lll(self):
        rng = random.Random(555)
        for _ in range(8):
            g = gram_from_matrix(random_int_gram(rng, 3))
            red, _ = lll_reduce(g)
            assert successive_minima(g).values == successive_minima(red).values


class TestCountBelow:
    def test_disk_of_radius_two(self):
        g = gram_from_matrix([[1.0, 0.0], [0.0, 1.0]])
        assert count_below(g, 4.0, include_zero=True).C == 13

    def test_zero_bound(self):
        g = gram_from_matrix([[1.0, 0.0], [0.0, 1.0]])
        assert count_below(g, 0.0, include_zero=True).C == 1
        assert count_below(g, 0.0, include_zero=False).C == 0

    def test_below_first_minimum(self):
        g = gram_from_matrix([[2.0, 1.0], [1.0, 2.0]])
        assert count_below(g, 0.9, include_zero=False).C == 0

    def test_boundary_is_inclusive(self):
        g = gram_from_matrix([[1.0, 0.0], [0.0, 1.0]])
        assert count_below(g, 1.0, include_zero=False).C == 4

    def test_negative_bound_rejected(self):
        with pytest.raises(ValueError):
            count_below(gram_from_matrix([[1.0]]), -1.0)

    def test_oracle_agreement(self):
        rng = random.Random(909090)
        for _ in range(16):
            m = rng.choice((1, 2, 3, 4))
            g = random_int_gram(rng, m, spread=3)
            gl = gram_from_matrix(g)
            hmax = max(g[i][i] for i in range(m))
            for h in (0, 1, hmax, 4 * hmax + 1):
                got = count_below(gl, float(h), include_zero=True).C
                want = oracle_count_int_gram(g, Fraction(h), include_zero=True)
                assert got == want, (g, h)

    def test_invariant_under_lll(self):
        rng = random.Random(606)
        for _ in range(6):
            g = gram_from_matrix(random_int_gram(rng, 3))
            red, _ = lll_reduce(g)
            h = 2.0 * max(r[i] for i, r in enumerate(g.values))
            assert (
                count_below(g, h, include_zero=True).C
                == count_below(red, h, include_zero=True).C
            )

    def test_budget_exceeded(self):
        g = gram_from_matrix([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(EnumerationBudgetExceeded):
            count_below(g, 1e9)
        with pytest.raises(EnumerationBudgetExceeded):
            count_below(g, 400.0, cap=10)


class TestCountPointsBelow:
    def test_rank_zero(self):
        assert count_points_below(gram_from_matrix([]), 5, 100.0) == 5

    def test_rank_one_small_bound(self):
        g = gram_from_matrix([[0.0511114]])
        assert count_points_below(g, 1, 0.06) == 3

    def test_rank_one_larger_bound(self):
        g = gram_from_matrix([[0.0511114]])
        assert count_points_below(g, 1, 0.25) == 5

    def test_torsion_multiplies(self):
        g = gram_from_matrix([[1.0, 0.0], [0.0, 1.0]])
        assert count_points_below(g, 3, 4.0) == 39


class TestAsymptoticConstant:
    def test_rank_two_unit(self):
        assert abs(asymptotic_constant(2, 1, 1.0) - math.pi) < 1e-14

    def test_rank_one_unit(self):
        assert abs(asymptotic_constant(1, 1, 1.0) - 2.0) < 1e-14

    def test_small_regulator(self):
        assert abs(asymptotic_constant(1, 1, 0.0511114) - 8.846) < 2e-3

    def test_validation(self):
        with pytest.raises(ValueError):
            asymptotic_constant(0, 1, 1.0)
        with pytest.raises(ValueError):
            asymptotic_constant(1, 0, 1.0)
        with pytest.raises(ValueError):
            asymptotic_constant(1, 1, 0.0)


class TestTypes:
    def test_minima_profile_validation(self):
        with pytest.raises(ValueError):
            MinimaProfile((2.0, 1.0), ((1, 0), (0, 1)))
        with pytest.raises(ValueError):
            MinimaProfile((1.0,), ())

    def test_counting_pair_validation(self):
        with pytest.raises(ValueError):
            CountingPair(-1.0, 3)
        with pytest.raises(ValueError):
            CountingPair(1.0, -3)
