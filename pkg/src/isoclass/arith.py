"""Exact arithmetic: valuations, Kronecker symbols, surds and finite fields.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Products of rationals with square roots and powers of pi are
carried by :class:`Surd` so that identities involving pi and sqrt(|disc|)
can be checked without floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational

import numpy as np

ExactRational = Fraction

FIELD_CAP = 64


class _InfiniteValuation:
    """Valuation of zero.  Compares greater than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE_VALUATION"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("INFINITE_VALUATION")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INFINITE_VALUATION = _InfiniteValuation()


def _check_prime(ell: int) -> None:
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")


def _int_valuation(n: int, ell: int) -> int:
    n = abs(n)
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def valuation(x, ell: int):
    """ell-adic valuation of a nonzero integer or rational.

    Returns :data:`INFINITE_VALUATION` for zero.
    """
    _check_prime(ell)
    if x == 0:
        return INFINITE_VALUATION
    if isinstance(x, int):
        return _int_valuation(x, ell)
    if isinstance(x, Rational):
        x = Fraction(x)
        return _int_valuation(x.numerator, ell) - _int_valuation(x.denominator, ell)
    raise TypeError(f"cannot take valuation of {type(x).__name__}")


@dataclass(frozen=True)
class PAdicValue:
    prime: int
    valuation: object  # int or INFINITE_VALUATION

    @classmethod
    def of(cls, x, ell: int) -> "PAdicValue":
        return cls(ell, valuation(x, ell))

    @property
    def abs(self) -> Fraction:
        """|x|_ell = ell^(-v) as an exact rational."""
        if self.valuation is INFINITE_VALUATION:
            return Fraction(0)
        return Fraction(self.prime) ** (-self.valuation)

    def sqrt_abs(self) -> "Surd":
        """sqrt(|x|_ell), exact (an ell-power possibly times sqrt(ell))."""
        if self.valuation is INFINITE_VALUATION:
            return Surd.zero()
        return Surd.sqrt(self.abs)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    for d in range(3, r + 1, 2):
        if n % d == 0:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation of ``|n|``; ``{}`` for n = +-1."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, e) with q = p**e, or None if q is not a prime power."""
    if q < 2:
        return None
    f = factorize(q)
    if len(f) != 1:
        return None
    (p, e), = f.items()
    return p, e


def primes_up_to(bound: int) -> np.ndarray:
    """All primes <= bound, ascending (sieve of Eratosthenes)."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).astype(np.int64)


def divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def kronecker_symbol(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for a positive integer n."""
    if n <= 0:
        raise ValueError("kronecker_symbol expects n >= 1")
    if n == 1:
        return 1
    result = 1
    # factor 2 out of n
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # n odd: Jacobi symbol (D/n)
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class Surd:
    """coeff * sqrt(radicand) * pi**pi_power, radicand squarefree.

    Only what the volume/L-value identities need: products, quotients,
    exact square roots of rationals and a float view.
    """

    coeff: Fraction
    radicand: int = 1
    pi_power: int = 0

    @classmethod
    def make(cls, coeff, radicand: int = 1, pi_power: int = 0) -> "Surd":
        coeff = Fraction(coeff)
        if radicand <= 0:
            raise ValueError("radicand must be positive")
        if coeff == 0:
            return cls(Fraction(0), 1, 0)
        outside, inside = 1, 1
        for prime, k in factorize(radicand).items():
            outside *= prime ** (k // 2)
            if k % 2:
                inside *= prime
        return cls(coeff * outside, inside, pi_power)

    @classmethod
    def zero(cls) -> "Surd":
        return cls(Fraction(0))

    @classmethod
    def rational(cls, x) -> "Surd":
        return cls(Fraction(x))

    @classmethod
    def sqrt(cls, x) -> "Surd":
        """Exact square root of a nonnegative rational."""
        x = Fraction(x)
        if x < 0:
            raise ValueError("square root of a negative rational")
        if x == 0:
            return cls.zero()
        # sqrt(n/d) = sqrt(n*d)/d
        return cls.make(Fraction(1, x.denominator), x.numerator * x.denominator)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1 and self.pi_power == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coeff

    def __mul__(self, other):
        if not isinstance(other, Surd):
            other = Surd.rational(other)
        return Surd.make(
            self.coeff * other.coeff,
            self.radicand * other.radicand,
            self.pi_power + other.pi_power,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Surd":
        if self.coeff == 0:
            raise ZeroDivisionError("inverse of zero surd")
        # 1/(c sqrt r) = sqrt(r) / (c r)
        return Surd.make(1 / (self.coeff * self.radicand), self.radicand, -self.pi_power)

    def __truediv__(self, other):
        if not isinstance(other, Surd):
            other = Surd.rational(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Surd.rational(other) * self.inverse()

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand) * math.pi**self.pi_power

    def __str__(self) -> str:
        parts = [str(self.coeff)]
        if self.radicand != 1:
            parts.append(f"sqrt({self.radicand})")
        if self.pi_power:
            parts.append("pi" if self.pi_power == 1 else f"pi^{self.pi_power}")
        return "*".join(parts)


def format_fraction(x: Fraction) -> str:
    """Render as "num/den" (integers stay "num/1"-free, e.g. "2")."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# finite fields


def _poly_mod(num: list[int], den: list[int], p: int) -> list[int]:
    """Remainder of num by monic den over F_p; coefficient lists low -> high."""
    num = [c % p for c in num]
    d = len(den) - 1
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i]
        if c:
            for j in range(d + 1):
                num[i - d + j] = (num[i - d + j] - c * den[j]) % p
    return num[:d] if d else []


def _monic_polys(p: int, degree: int):
    """Monic polynomials of the given degree, lexicographic in (c_{d-1}, ..., c_0)."""
    for tail in itertools.product(range(p), repeat=degree):
        yield list(reversed(tail)) + [1]


def _is_irreducible(poly: list[int], p: int) -> bool:
    e = len(poly) - 1
    for d in range(1, e // 2 + 1):
        for g in _monic_polys(p, d):
            if not any(_poly_mod(poly, g, p)):
                return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree e over F_p."""
    if e == 1:
        return (0, 1)
    for poly in _monic_polys(p, e):
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """F_q with q = p**e, elements encoded as integers 0..q-1.

    The integer ``x`` stands for the coefficient vector of its base-p digits
    (constant term first) reduced modulo :attr:`modulus`.  In particular the
    prime subfield is {0, ..., p-1} with its usual meaning.
    """

    def __init__(self, p: int, e: int = 1):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if e < 1:
            raise ValueError("degree must be >= 1")
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = least_irreducible(p, e)

    @classmethod
    def of_order(cls, q: int) -> "FiniteField":
        pe = prime_power(q)
        if pe is None:
            raise ValueError(f"{q} is not a prime power")
        return cls(*pe)

    def __repr__(self):
        return f"FiniteField(p={self.p}, e={self.e})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    def coeffs(self, x: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.e):
            x, r = divmod(x, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, c) -> int:
        c = _poly_mod(list(c), list(self.modulus), self.p) if len(c) > self.e else list(c)
        x = 0
        for coef in reversed(c):
            x = x * self.p + coef % self.p
        return x

    def from_int(self, k: int) -> int:
        return k % self.p

    def add(self, x: int, y: int) -> int:
        cx, cy = self.coeffs(x), self.coeffs(y)
        return self.from_coeffs([(a + b) % self.p for a, b in zip(cx, cy)])

    def neg(self, x: int) -> int:
        return self.from_coeffs([-a % self.p for a in self.coeffs(x)])

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        cx, cy = self.coeffs(x), self.coeffs(y)
        prod = [0] * (2 * self.e - 1)
        for i, a in enumerate(cx):
            if a:
                for j, b in enumerate(cy):
                    prod[i + j] += a * b
        return self.from_coeffs(_poly_mod(prod, list(self.modulus), self.p))

    def pow(self, x: int, k: int) -> int:
        result = 1
        for _ in range(k):
            result = self.mul(result, x)
        return result

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(x, self.q - 2)

    @cached_property
    def add_table(self) -> np.ndarray:
        return self._table(self.add)

    @cached_property
    def mul_table(self) -> np.ndarray:
        return self._table(self.mul)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([self.neg(x) for x in range(self.q)], dtype=np.int64)

    def _table(self, op) -> np.ndarray:
        if self.q > FIELD_CAP:
            raise ValueError(f"q = {self.q} exceeds the enumeration cap {FIELD_CAP}")
        t = np.empty((self.q, self.q), dtype=np.int64)
        for x in range(self.q):
            for y in range(self.q):
                t[x, y] = op(x, y)
        t.setflags(write=False)
        return t


def ff_enumerate(field: FiniteField):
    """Yield every element of ``field`` once, in increasing code order."""
    if field.q > FIELD_CAP:
        raise ValueError(f"q = {field.q} exceeds the enumeration cap {FIELD_CAP}")
    yield from range(field.q)
