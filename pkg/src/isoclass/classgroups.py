"""Imaginary quadratic orders: discriminants, class numbers, L(1, chi)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import divisors, factorize, kronecker_symbol, primes_up_to, Surd


def _check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")


def is_fundamental(D: int) -> bool:
    _check_discriminant(D)
    if D % 4 == 1:
        return all(k == 1 for k in factorize(D).values())
    m = D // 4
    if m % 4 not in (2, 3):
        return False
    return all(k == 1 for k in factorize(m).values())


def fundamental_discriminant(delta: int) -> tuple[int, int]:
    """Write delta = f^2 * D_K with D_K fundamental; return (D_K, f)."""
    _check_discriminant(delta)
    f = 1
    for prime, k in factorize(delta).items():
        f *= prime ** (k // 2)
    # f^2 is the largest square dividing delta; back off until the quotient
    # is a discriminant (only the 2-part can fail)
    while (delta // (f * f)) % 4 not in (0, 1):
        f //= 2
    D = delta // (f * f)
    assert is_fundamental(D), (delta, D, f)
    return D, f


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Reduced primitive positive definite forms (A, B, C) of discriminant D."""
    _check_discriminant(D)
    forms = []
    A = 1
    while 3 * A * A <= -D:
        for B in range(-A + 1, A + 1):
            if (B * B - D) % (4 * A):
                continue
            C = (B * B - D) // (4 * A)
            if C < A:
                continue
            if C == A and B < 0:
                continue
            if math.gcd(math.gcd(A, B), C) != 1:
                continue
            forms.append((A, B, C))
        A += 1
    return forms


@lru_cache(maxsize=None)
def class_number(D: int) -> int:
    return len(reduced_forms(D))


def unit_count(D: int) -> int:
    _check_discriminant(D)
    return {-3: 6, -4: 4}.get(D, 2)


@dataclass(frozen=True)
class QuadraticFieldData:
    delta: int
    fundamental: int
    conductor: int

    @classmethod
    def from_discriminant(cls, delta: int) -> "QuadraticFieldData":
        D, f = fundamental_discriminant(delta)
        return cls(delta, D, f)

    @classmethod
    def from_frobenius(cls, a: int, q: int) -> "QuadraticFieldData":
        return cls.from_discriminant(a * a - 4 * q)

    def chi(self, n: int) -> int:
        """Quadratic character of K = Q(sqrt(delta))."""
        return kronecker_symbol(self.fundamental, n)


@dataclass(frozen=True)
class ClassGroupData:
    field: QuadraticFieldData
    orders: tuple[tuple[int, int, int, int], ...]  # (d, d^2 D_K, h, w)
    weighted_sum: Fraction

    @property
    def h_K(self) -> int:
        return class_number(self.field.fundamental)

    @property
    def w_K(self) -> int:
        return unit_count(self.field.fundamental)

    def L1(self) -> tuple[Fraction, int]:
        return L1_exact(self.field)


def class_group_data(delta: int) -> ClassGroupData:
    fd = QuadraticFieldData.from_discriminant(delta)
    rows = []
    total = Fraction(0)
    for d in divisors(fd.conductor):
        D = d * d * fd.fundamental
        h, w = class_number(D), unit_count(D)
        rows.append((d, D, h, w))
        total += Fraction(h, w)
    return ClassGroupData(fd, tuple(rows), total)


def weighted_kronecker(a: int, q: int) -> Fraction:
    """sum over d | f of h(d^2 D_K) / w(d^2 D_K) for delta = a^2 - 4q."""
    delta = a * a - 4 * q
    if delta >= 0:
        raise ValueError(f"a^2 - 4q = {delta} is not negative")
    return class_group_data(delta).weighted_sum


def hurwitz_class_number(delta: int) -> Fraction:
    """H(delta) = 2 * weighted sum; units weighted relative to w = 2."""
    return 2 * class_group_data(delta).weighted_sum


def L1_exact(field: QuadraticFieldData) -> tuple[Fraction, int]:
    """L(1, chi_K) = 2*pi * rational_part / sqrt(radicand)."""
    D = field.fundamental
    return Fraction(class_number(D), unit_count(D)), -D


def L1_surd(field: QuadraticFieldData) -> Surd:
    r, n = L1_exact(field)
    return Surd.make(2 * r, 1, 1) / Surd.make(1, n)


def character_table(D: int) -> np.ndarray:
    """chi_D(n) for n = 0..|D|-1; chi_D is periodic mod |D| for a discriminant D."""
    N = abs(D)
    return np.array([kronecker_symbol(D, n) if n else 0 for n in range(N)], dtype=np.int64)


def L1_truncated(field: QuadraticFieldData, prime_bound: int) -> float:
    """prod over primes ell <= bound of (1 - chi(ell)/ell)^(-1), ascending."""
    if prime_bound < 2:
        raise ValueError("prime_bound must be >= 2")
    ell = primes_up_to(prime_bound)
    table = character_table(field.fundamental)
    chi = table[ell % len(table)]
    factors = 1.0 / (1.0 - chi / ell.astype(np.float64))
    # sequential fold keeps the conditionally convergent product in order
    return float(np.multiply.accumulate(factors)[-1])
