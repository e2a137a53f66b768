"""Local densities of the characteristic-polynomial map on 2x2 matrices.

For a prime ell and n >= 1 let S_n be the number of 2x2 matrices mod ell^n
with trace a and determinant q.  Dividing by the average fibre size
(ell^2 - 1) ell^(2n-2) gives nu_{ell,n}; the sequence is eventually constant
and its limit is the local density nu_ell(a, q).  At ell = p the matrices
range over all of M_2(Z/p^n), elsewhere over GL_2 (automatic, since q is a
unit there).

S_n is computed by fibring over the diagonal: fix alpha, put delta = a - alpha,
and count off-diagonal pairs (beta, gamma) with beta*gamma = alpha*delta - q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from . import kernels
from .arith import INFINITE_VALUATION, Surd, is_prime, kronecker_symbol, prime_power, valuation


class StabilizationError(RuntimeError):
    pass


def count_bc_pairs(m: int, ell: int, n: int) -> int:
    """#{(beta, gamma) mod ell^n : beta*gamma = m}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m %= ell**n
    if m == 0:
        return (n + 1) * ell**n - n * ell ** (n - 1)
    k = valuation(m, ell)
    return (k + 1) * (ell - 1) * ell ** (n - 1)


def brute_force_bc_pairs(m: int, ell: int, n: int) -> int:
    N = ell**n
    r = np.arange(N, dtype=np.int64)
    return int(np.count_nonzero((np.multiply.outer(r, r) - m) % N == 0))


@dataclass(frozen=True)
class CharPolyTarget:
    """Characteristic polynomial T^2 - a T + d modulo ell^n."""

    a: int
    d: int
    ell: int
    n: int

    @property
    def modulus(self) -> int:
        return self.ell**self.n


def _bc_counts(ell: int, n: int) -> list[int]:
    # count_bc_pairs indexed by min(v(m), n)
    return [count_bc_pairs(ell**k if k < n else 0, ell, n) for k in range(n + 1)]


def count_charpoly_matrices(target: CharPolyTarget, ring: str = "GL") -> int:
    """#{gamma in ring(Z/ell^n) : tr = a, det = d}, by fibring over the diagonal."""
    ell, n = target.ell, target.n
    if ring not in ("GL", "M2"):
        raise ValueError(f"ring must be 'GL' or 'M2', not {ring!r}")
    if ring == "GL" and target.d % ell == 0:
        raise ValueError(f"det {target.d} is not a unit mod {ell}; use ring='M2'")
    hist = kernels.valuation_histogram(ell, n, target.a, target.d)
    return sum(int(h) * c for h, c in zip(hist, _bc_counts(ell, n)))


def brute_force_charpoly_table(N: int) -> np.ndarray:
    """table[a, d] = #{gamma in M_2(Z/N) : tr = a, det = d}, by enumeration."""
    r = np.arange(N, dtype=np.int64)
    beta, gamma, delta = (x.ravel() for x in np.meshgrid(r, r, r, indexing="ij"))
    bg = beta * gamma
    table = np.zeros(N * N, dtype=np.int64)
    for alpha in range(N):
        tr = (alpha + delta) % N
        det = (alpha * delta - bg) % N
        table += np.bincount(tr * N + det, minlength=N * N)
    return table.reshape(N, N)


def brute_force_charpoly_count(target: CharPolyTarget) -> int:
    """Literal enumeration of all ell^(4n) matrices; only for tiny moduli."""
    N = target.modulus
    if N > 16:
        raise ValueError("literal enumeration limited to moduli <= 16")
    count = 0
    for al, be, ga, de in product(range(N), repeat=4):
        if (al + de - target.a) % N == 0 and (al * de - be * ga - target.d) % N == 0:
            count += 1
    return count


def gekeler_denominator(ell: int, n: int) -> int:
    """#GL_2(Z/ell^n) / #A(Z/ell^n) = (ell^2 - 1) ell^(2n - 2)."""
    return (ell * ell - 1) * ell ** (2 * n - 2)


@dataclass(frozen=True)
class LocalDensityResult:
    ell: int
    a: int
    q: int
    values: tuple[tuple[int, int, Fraction], ...]  # (n, S_n, nu_{ell,n})
    stabilized_at: int | None
    disc_valuation: int

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at is not None

    @property
    def nu(self) -> Fraction:
        if self.stabilized_at is None:
            raise StabilizationError(
                f"nu_{self.ell}({self.a},{self.q}) did not stabilise: {self.ladder_str()}"
            )
        return self.values[-1][2]

    def ladder_str(self) -> str:
        return ", ".join(f"n={n}: S={s}, nu={v}" for n, s, v in self.values)


def _ladder_value(a, q, ell, n, ring):
    S = count_charpoly_matrices(CharPolyTarget(a, q, ell, n), ring)
    return S, Fraction(S, gekeler_denominator(ell, n))


@lru_cache(maxsize=4096)
def nu_ell(a: int, q: int, ell: int, n_max: int | None = None, full: bool = False) -> LocalDensityResult:
    """Density ladder for T^2 - aT + q at ell.

    The ladder is extended until two consecutive values past n = v_ell(a^2-4q)
    agree (or n_max, default 2 v + 4, is hit).  With ``full=True`` every n up
    to n_max is computed regardless.
    """
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    p = pe[0]
    delta = a * a - 4 * q
    if delta == 0:
        raise ValueError("a^2 = 4q: characteristic polynomial is not separable")
    v = valuation(delta, ell)
    if n_max is None:
        n_max = 2 * v + 4
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ring = "M2" if ell == p else "GL"
    values = []
    for n in range(1, n_max + 1):
        S, nu = _ladder_value(a, q, ell, n, ring)
        values.append((n, S, nu))
        if not full and n >= v + 2 and values[-2][2] == nu:
            break
    stabilized_at = None
    if len(values) >= 2 and values[-1][0] >= v + 2 and values[-1][2] == values[-2][2]:
        stabilized_at = values[-1][0]
        while stabilized_at > 1 and values[stabilized_at - 2][2] == values[-1][2]:
            stabilized_at -= 1
    return LocalDensityResult(ell, a, q, tuple(values), stabilized_at, v)


def euler_factor(a: int, q: int, ell: int) -> Fraction:
    """(1 - chi(ell)/ell)^(-1) with chi the Kronecker character of a^2 - 4q."""
    chi = kronecker_symbol(a * a - 4 * q, ell)
    return 1 / (1 - Fraction(chi, ell))


@dataclass(frozen=True)
class ArchimedeanFactor:
    """nu_inf = (2/pi) sqrt(1 - a^2/4q) = sqrt(4q - a^2) / (pi sqrt q)."""

    a: int
    q: int

    @property
    def radicand(self) -> int:
        return 4 * self.q - self.a * self.a

    @property
    def value(self) -> Surd:
        if self.radicand == 0:
            return Surd.zero()
        return Surd.make(1, self.radicand, -1) / Surd.make(1, self.q)

    def __float__(self) -> float:
        return float(self.value)


def nu_infinity(a: int, q: int) -> ArchimedeanFactor:
    if a * a > 4 * q:
        raise ValueError(f"a^2 = {a * a} exceeds 4q = {4 * q}")
    return ArchimedeanFactor(a, q)


# ---------------------------------------------------------------------------
# similarity versus characteristic polynomial, at ell = p


def _gl2_elements(N: int, ell: int) -> np.ndarray:
    r = np.arange(N)
    m = np.stack(np.meshgrid(r, r, r, r, indexing="ij"), axis=-1).reshape(-1, 4)
    det = (m[:, 0] * m[:, 3] - m[:, 1] * m[:, 2]) % N
    return m[det % ell != 0]


def similarity_orbit_size(a: int, d: int, ell: int, n: int) -> int:
    """Size of the GL_2(Z/ell^n)-conjugacy orbit of the companion matrix of
    T^2 - aT + d, by direct enumeration (tiny moduli only)."""
    N = ell**n
    if N > 27:
        raise ValueError("orbit enumeration limited to moduli <= 27")
    g = _gl2_elements(N, ell)
    ga, gb, gc, gd = g.T
    det = (ga * gd - gb * gc) % N
    inv_det = np.array([pow(int(x), -1, N) for x in det])
    # companion matrix [[0, -d], [1, a]]; conjugate h * C * h^-1
    c00, c01, c10, c11 = 0, -d, 1, a
    # h*C
    p00 = ga * c00 + gb * c10
    p01 = ga * c01 + gb * c11
    p10 = gc * c00 + gd * c10
    p11 = gc * c01 + gd * c11
    # h^-1 = inv_det * [[gd, -gb], [-gc, ga]]
    r00 = (p00 * gd - p01 * gc) * inv_det % N
    r01 = (-p00 * gb + p01 * ga) * inv_det % N
    r10 = (p10 * gd - p11 * gc) * inv_det % N
    r11 = (-p10 * gb + p11 * ga) * inv_det % N
    codes = ((r00 * N + r01) * N + r10) * N + r11
    return int(np.unique(codes).size)


def brute_force_ladder_value(a: int, q: int, ell: int, n: int) -> Fraction:
    """nu_{ell,n} from full enumeration of M_2(Z/ell^n)."""
    N = ell**n
    table = _cached_table(N)
    return Fraction(int(table[a % N, q % N]), gekeler_denominator(ell, n))


@lru_cache(maxsize=None)
def _cached_table(N: int) -> np.ndarray:
    return brute_force_charpoly_table(N)


def disc_valuation(a: int, q: int, ell: int) -> int:
    v = valuation(a * a - 4 * q, ell)
    assert v is not INFINITE_VALUATION
    return v


__all__ = [
    "ArchimedeanFactor",
    "CharPolyTarget",
    "LocalDensityResult",
    "StabilizationError",
    "brute_force_bc_pairs",
    "brute_force_charpoly_count",
    "brute_force_charpoly_table",
    "brute_force_ladder_value",
    "count_bc_pairs",
    "count_charpoly_matrices",
    "euler_factor",
    "gekeler_denominator",
    "nu_ell",
    "nu_infinity",
    "similarity_orbit_size",
]
