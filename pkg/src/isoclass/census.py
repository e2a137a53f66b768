"""Elliptic curves over small finite fields, counted by brute force.

Weighted class sizes come from a mass formula rather than from explicit
automorphism groups: isomorphism classes are orbits of a coordinate-change
group G acting on a family of Weierstrass equations, an orbit has
#G / #Aut(E) members, hence

    sum over classes with trace a of 1/#Aut(E) = #{equations with trace a} / #G.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .arith import FiniteField, prime_power

CAP_LARGE_CHAR = 49
CAP_SMALL_CHAR = 27


@dataclass(frozen=True)
class WeierstrassEquation:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over ``field``."""

    field: FiniteField
    coeffs: tuple[int, int, int, int, int]

    @classmethod
    def short(cls, field: FiniteField, A: int, B: int) -> "WeierstrassEquation":
        return cls(field, (0, 0, 0, A, B))


def weierstrass_discriminant(eq: WeierstrassEquation) -> int:
    F = eq.field
    a1, a2, a3, a4, a6 = eq.coeffs
    return int(
        kernels._discriminant(
            a1, a2, a3, a4, a6, F.p, F.add_table, F.mul_table, F.neg_table
        )
    )


def point_count(eq: WeierstrassEquation) -> int:
    """Projective points of a nonsingular equation, by looping over all (x, y)."""
    if weierstrass_discriminant(eq) == 0:
        raise ValueError(f"singular curve {eq.coeffs} over {eq.field}")
    F = eq.field
    a1, a2, a3, a4, a6 = eq.coeffs
    count = 1
    for x in range(F.q):
        x2 = F.mul(x, x)
        rhs = F.add(F.add(F.mul(x2, x), F.mul(a2, x2)), F.add(F.mul(a4, x), a6))
        for y in range(F.q):
            lhs = F.add(F.mul(y, y), F.mul(F.add(F.mul(a1, x), a3), y))
            if lhs == rhs:
                count += 1
    return count


def frobenius_trace(eq: WeierstrassEquation) -> int:
    return eq.field.q + 1 - point_count(eq)


@dataclass(frozen=True)
class CensusResult:
    q: int
    counts: dict[int, Fraction]
    family: str = "default"
    group_order: int = 0
    equation_count: int = 0

    @property
    def p(self) -> int:
        return prime_power(self.q)[0]

    def __getitem__(self, a: int) -> Fraction:
        return self.counts.get(a, Fraction(0))

    def ordinary(self) -> dict[int, Fraction]:
        return {a: c for a, c in self.counts.items() if a % self.p != 0}

    def total_mass(self) -> Fraction:
        return sum(self.counts.values(), Fraction(0))


def ordinary_traces(q: int) -> list[int]:
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    p = pe[0]
    bound = math.isqrt(4 * q)
    return [a for a in range(-bound, bound + 1) if a % p != 0]


def census_cap(p: int) -> int:
    return CAP_LARGE_CHAR if p >= 5 else CAP_SMALL_CHAR


def default_family(p: int) -> str:
    if p >= 5:
        return "short"
    if p == 3:
        return "cubic"
    return "full"


def _family_blocks(q: int, family: str):
    """Split the family into blocks of equations (one block per value of the
    first free coefficient) and report #G for the family."""
    grid = np.arange(q, dtype=np.int64)
    if family == "short":
        # y^2 = x^3 + A x + B; u acts by (u^4 A, u^6 B)
        order = q - 1
        blocks = [np.stack([np.zeros(q, np.int64)] * 3 + [np.full(q, A), grid], axis=1) for A in range(q)]
    elif family == "cubic":
        # y^2 = x^3 + a2 x^2 + a4 x + a6; x -> u^2 x + r, y -> u^3 y
        order = q * (q - 1)
        a4, a6 = np.meshgrid(grid, grid, indexing="ij")
        rest = np.stack([a4.ravel(), a6.ravel()], axis=1)
        blocks = []
        for a2 in range(q):
            z = np.zeros(len(rest), np.int64)
            blocks.append(np.column_stack([z, np.full(len(rest), a2), z, rest]))
    elif family == "full":
        # all (u, r, s, t)
        order = q**3 * (q - 1)
        mesh = np.meshgrid(grid, grid, grid, grid, indexing="ij")
        rest = np.stack([m.ravel() for m in mesh], axis=1)
        blocks = [np.column_stack([np.full(len(rest), a1), rest]) for a1 in range(q)]
    else:
        raise ValueError(f"unknown family {family!r}")
    return blocks, order


@lru_cache(maxsize=None)
def _field_tables(q):
    F = FiniteField.of_order(q)
    add, mul, neg = F.add_table, F.mul_table, F.neg_table
    return F, add, mul, neg, kernels.quadratic_solution_table(add, mul)


def _tally_block(args):
    q, block = args
    F, add, mul, neg, nsol = _field_tables(q)
    counts = kernels.point_counts(block, F.p, add, mul, neg, nsol)
    good = counts[counts != kernels.SINGULAR]
    traces = q + 1 - good
    bound = math.isqrt(4 * q)
    return np.bincount(traces + bound, minlength=2 * bound + 1)


def census(q: int, family: str | None = None, jobs: int = 1) -> CensusResult:
    """Automorphism-weighted number of curves over F_q for each trace."""
    return _census(q, family, jobs)


@lru_cache(maxsize=None)
def _census(q, family, jobs):
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    p = pe[0]
    if q > census_cap(p):
        raise ValueError(f"q = {q} exceeds the census cap {census_cap(p)} for p = {p}")
    family = family or default_family(p)
    if family == "short" and p < 5:
        raise ValueError("short Weierstrass family needs p >= 5")
    if family == "cubic" and p == 2:
        raise ValueError("y^2 = cubic family needs p odd")
    blocks, order = _family_blocks(q, family)
    work = [(q, b) for b in blocks]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            tallies = list(pool.map(_tally_block, work))
    else:
        tallies = [_tally_block(w) for w in work]
    hist = np.sum(tallies, axis=0)
    bound = math.isqrt(4 * q)
    counts = {
        a: Fraction(int(hist[a + bound]), order)
        for a in range(-bound, bound + 1)
        if hist[a + bound]
    }
    for a in counts:
        assert a * a <= 4 * q
    return CensusResult(
        q=q,
        counts=counts,
        family=family,
        group_order=order,
        equation_count=sum(len(b) for b in blocks),
    )
