import importlib
import math
from fractions import Fraction

import numpy as np
import pytest

from isoclass import kernels
from isoclass.arith import FiniteField
from isoclass.census import (
    WeierstrassEquation,
    census,
    frobenius_trace,
    ordinary_traces,
    point_count,
    weierstrass_discriminant,
)
from isoclass.classgroups import weighted_kronecker

# the package re-exports census() under the module's name
census_mod = importlib.import_module("isoclass.census")

SUPPORTED = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 37, 41, 43, 47, 49]


def test_cusp_is_singular():
    for q in (2, 3, 4, 5, 9):
        assert weierstrass_discriminant(WeierstrassEquation.short(FiniteField.of_order(q), 0, 0)) == 0


def test_discriminant_examples():
    F5 = FiniteField(5)
    # -16 (4 A^3 + 27 B^2) = -64 = 1 mod 5 for A = 1, B = 0
    assert weierstrass_discriminant(WeierstrassEquation.short(F5, 1, 0)) == (-64) % 5
    F2 = FiniteField(2)
    # y^2 + y = x^3: b6 = 1, so disc = -27 = 1 in F_2
    assert weierstrass_discriminant(WeierstrassEquation(F2, (0, 0, 1, 0, 0))) == 1


def test_discriminant_matches_short_form_formula():
    F = FiniteField(7)
    for A in range(7):
        for B in range(7):
            d = weierstrass_discriminant(WeierstrassEquation.short(F, A, B))
            assert d == (-16 * (4 * A**3 + 27 * B**2)) % 7


def test_point_count_examples():
    assert point_count(WeierstrassEquation.short(FiniteField(5), 1, 0)) == 4
    assert frobenius_trace(WeierstrassEquation.short(FiniteField(5), 1, 0)) == 2
    eq = WeierstrassEquation(FiniteField(2), (0, 0, 1, 0, 0))
    assert point_count(eq) == 3
    assert frobenius_trace(eq) == 0


def test_point_count_rejects_singular():
    with pytest.raises(ValueError):
        point_count(WeierstrassEquation.short(FiniteField(5), 0, 0))


@pytest.mark.parametrize("q", [2, 4, 5, 8, 9])
def test_kernel_counts_match_pairwise_enumeration_and_hasse(q):
    F = FiniteField.of_order(q)
    rng = np.random.default_rng(7 * q)
    eqs = rng.integers(0, q, size=(60, 5))
    if F.p >= 3:
        eqs[:, 0] = eqs[:, 2] = 0
    nsol = kernels.quadratic_solution_table(F.add_table, F.mul_table)
    fast = kernels.point_counts(eqs, F.p, F.add_table, F.mul_table, F.neg_table, nsol)
    bound = math.isqrt(4 * q)
    for row, n in zip(eqs, fast):
        eq = WeierstrassEquation(F, tuple(int(c) for c in row))
        if n == kernels.SINGULAR:
            assert weierstrass_discriminant(eq) == 0
            continue
        assert n == point_count(eq)
        assert abs(q + 1 - n) <= bound


@pytest.mark.parametrize(
    "q, expected",
    [
        (2, [-1, 1]),
        (5, [-4, -3, -2, -1, 1, 2, 3, 4]),
        (4, [-3, -1, 1, 3]),
        (9, [-5, -4, -2, -1, 1, 2, 4, 5]),
    ],
)
def test_ordinary_traces(q, expected):
    assert ordinary_traces(q) == expected


def test_census_examples():
    c2 = census(2)
    assert sum(c2.counts.values()) == 2
    assert set(c2.counts) <= {-2, -1, 0, 1, 2}
    assert census(5)[2] == Fraction(3, 4) == weighted_kronecker(2, 5)
    assert census(4)[3] == Fraction(1, 2) == weighted_kronecker(3, 4)
    assert census(4)[5] == 0
    for q in (3, 4, 5, 7):
        assert all(a * a <= 4 * q for a in census(q).counts)


@pytest.mark.parametrize("q", SUPPORTED)
def test_mass_identity(q):
    assert census(q).total_mass() == q


@pytest.mark.parametrize("q, family", [(5, "full"), (7, "full"), (11, "full"), (5, "cubic"), (7, "cubic"), (13, "cubic")])
def test_weighting_consistent_across_families(q, family):
    assert census(q, family).counts == census(q).counts


@pytest.mark.parametrize("q", [3, 9])
def test_char3_cubic_family_matches_full_family(q):
    assert census(q, "cubic").counts == census(q, "full").counts


def test_census_caps_and_errors():
    with pytest.raises(ValueError):
        census(6)
    with pytest.raises(ValueError):
        census(53)
    with pytest.raises(ValueError):
        census(32)
    with pytest.raises(ValueError):
        census(81)
    with pytest.raises(ValueError):
        census(4, "short")
    with pytest.raises(ValueError):
        census(8, "cubic")


def test_parallel_census_matches_serial():
    census_mod._census.cache_clear()
    assert census(13, jobs=2).counts == census(13, jobs=1).counts


def test_census_with_numpy_kernels(numpy_kernels):
    for q in (4, 7, 9):
        assert census(q).total_mass() == q
        for a in ordinary_traces(q):
            assert census(q)[a] == weighted_kronecker(a, q)
