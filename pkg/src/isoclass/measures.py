"""Orbital integrals, measure conversions and the global product formulas.

Per prime ell the stabilised density nu_ell is turned into the orbital
integral for the geometric measure, then into the one for the canonical
measure (volume 1 on GL_2(Z_ell) and on the integral points of the torus).
The conversion constant is computed twice: from the local volumes of the
two invariant forms, and from the closed form
sqrt|D_K|_ell zeta_ell(2) / (sqrt|D(gamma)|_ell L_ell(1, chi)).

Two global assemblies then reproduce the weighted class size:

* ``assemble_lk``: global torus volume h_K/w_K times the product of canonical
  orbital integrals, all but finitely many of which are 1;
* ``assemble_gekeler``: (sqrt q / 2) nu_inf prod_ell nu_ell, once in floating
  point with a truncated Euler product and once exactly, with the tail
  replaced by the class number formula so that pi and sqrt|D_K| cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .arith import PAdicValue, Surd, factorize, primes_up_to, prime_power
from .census import census, census_cap, ordinary_traces
from .classgroups import (
    QuadraticFieldData,
    class_number,
    L1_surd,
    unit_count,
    weighted_kronecker,
)
from .densities import LocalDensityResult, StabilizationError, nu_ell, nu_infinity

DensityHook = Callable[[int, Fraction], Fraction]

CHECK_BOUND = 100


class VerificationFailure(AssertionError):
    def __init__(self, message: str, primes=(), details=None):
        super().__init__(message)
        self.primes = tuple(primes)
        self.details = details or {}


# ---------------------------------------------------------------------------
# local constants


def zeta_local(ell: int, s: int) -> Fraction:
    return 1 / (1 - Fraction(1, ell**s))


def local_L_factor(ell: int, chi_value: int) -> Fraction:
    """L_ell(1, chi) = (1 - chi(ell)/ell)^(-1); equals 1 at ramified ell."""
    return 1 / (1 - Fraction(chi_value, ell))


@dataclass(frozen=True)
class LocalFieldSplitting:
    ell: int
    kind: str  # "split", "inert" or "ramified"

    @classmethod
    def of(cls, fd: QuadraticFieldData, ell: int) -> "LocalFieldSplitting":
        kind = {1: "split", -1: "inert", 0: "ramified"}[fd.chi(ell)]
        if (kind == "ramified") != (fd.fundamental % ell == 0):
            raise AssertionError(f"splitting of {ell} inconsistent with D_K = {fd.fundamental}")
        return cls(ell, kind)


def local_volumes(ell: int, splitting: LocalFieldSplitting, fundamental: int) -> tuple[Fraction, Surd]:
    """Volumes of GL_2(Z_ell) and of the integral torus for the invariant forms
    dα dβ dγ dδ / det and dγ1 dγ2 / (γ1 γ2)."""
    if splitting.ell != ell:
        raise ValueError("splitting belongs to another prime")
    inv = Fraction(1, ell)
    vol_G = (1 - inv) * (1 - inv * inv)
    torus = {
        "split": (1 - inv) ** 2,
        "inert": 1 - inv * inv,
        "ramified": 1 - inv,
    }[splitting.kind]
    vol_T = PAdicValue.of(fundamental, ell).sqrt_abs() * torus
    return vol_G, vol_T


def torus_jacobian_constant(ell: int, fundamental: int) -> Surd:
    """|c_T|_ell = |D_K|_ell^(-1/2): 1 unless K ramifies at ell."""
    return PAdicValue.of(fundamental, ell).sqrt_abs().inverse()


def conversion_constant(ell: int, fd: QuadraticFieldData) -> Fraction:
    """O_can / O_geom from the two local volumes (dμ_geom = sqrt|D| vol_G/vol_T dμ_can)."""
    split = LocalFieldSplitting.of(fd, ell)
    vol_G, vol_T = local_volumes(ell, split, fd.fundamental)
    c = vol_T / (PAdicValue.of(fd.delta, ell).sqrt_abs() * vol_G)
    return _exact(c, f"conversion constant at {ell}")


def conversion_constant_closed_form(ell: int, fd: QuadraticFieldData) -> Fraction:
    """sqrt|D_K|_ell zeta_ell(2) / (sqrt|D(gamma)|_ell L_ell(1, chi))."""
    c = (
        PAdicValue.of(fd.fundamental, ell).sqrt_abs()
        * zeta_local(ell, 2)
        / (PAdicValue.of(fd.delta, ell).sqrt_abs() * local_L_factor(ell, fd.chi(ell)))
    )
    return _exact(c, f"closed-form conversion constant at {ell}")


def _exact(x: Surd, what: str) -> Fraction:
    if not x.is_rational:
        raise VerificationFailure(f"{what} is not rational: {x}")
    return x.to_fraction()


def geometric_orbital(density: LocalDensityResult) -> Fraction:
    """O_geom = nu_ell / zeta_ell(2) = nu_ell * #SL_2(F_ell) / ell^3."""
    if not density.stabilized:
        raise StabilizationError(f"ladder at {density.ell} did not stabilise: {density.ladder_str()}")
    return density.nu / zeta_local(density.ell, 2)


def canonical_orbital(o_geom: Fraction, ell: int, fd: QuadraticFieldData) -> Fraction:
    shift = PAdicValue.of(fd.delta, ell).valuation - PAdicValue.of(fd.fundamental, ell).valuation
    if shift % 2:
        raise VerificationFailure(
            f"v_{ell}(D) - v_{ell}(D_K) = {shift} is odd", primes=[ell]
        )
    c = conversion_constant(ell, fd)
    c_closed = conversion_constant_closed_form(ell, fd)
    if c != c_closed:
        raise VerificationFailure(
            f"conversion constants disagree at {ell}: {c} vs {c_closed}", primes=[ell]
        )
    return c * o_geom


@dataclass(frozen=True)
class OrbitalFactors:
    ell: int
    splitting: str
    nu: Fraction
    zeta2: Fraction
    L: Fraction
    o_geom: Fraction
    o_can: Fraction
    conversion: Fraction

    @property
    def nu_over_L(self) -> Fraction:
        return self.nu / self.L


def orbital_factors(
    a: int, q: int, ell: int, density_hook: DensityHook | None = None
) -> OrbitalFactors:
    fd = QuadraticFieldData.from_frobenius(a, q)
    density = nu_ell(a, q, ell)
    if density_hook is not None:
        nu = density_hook(ell, density.nu)
        density = LocalDensityResult(
            ell, a, q, density.values[:-1] + ((density.values[-1][0], density.values[-1][1], nu),),
            density.stabilized_at, density.disc_valuation,
        )
    o_geom = geometric_orbital(density)
    o_can = canonical_orbital(o_geom, ell, fd)
    return OrbitalFactors(
        ell=ell,
        splitting=LocalFieldSplitting.of(fd, ell).kind,
        nu=density.nu,
        zeta2=zeta_local(ell, 2),
        L=local_L_factor(ell, fd.chi(ell)),
        o_geom=o_geom,
        o_can=o_can,
        conversion=conversion_constant(ell, fd),
    )


def global_volume(fd: QuadraticFieldData) -> Fraction:
    """vol(T(Q) \\ T(A_f)) for the canonical measure = h_K / w_K."""
    return Fraction(class_number(fd.fundamental), unit_count(fd.fundamental))


def class_number_formula_identity(fd: QuadraticFieldData) -> tuple[Surd, Fraction]:
    """Both sides of sqrt|D_K| / (2 pi) * L(1, chi) = h_K / w_K."""
    lhs = Surd.make(Fraction(1, 2), -fd.fundamental, -1) * L1_surd(fd)
    return lhs, global_volume(fd)


def local_order_factor(fd: QuadraticFieldData, ell: int) -> Fraction:
    """ell-part of sum_{d | f} h(d^2 D_K)/w(d^2 D_K) divided by h_K/w_K.

    The index formula for h of an order makes the weighted sum multiplicative
    in d, so it factors as prod over ell | f of
    1 + sum_{k=1}^{v_ell(f)} ell^k (1 - chi(ell)/ell).  Used as the per-prime
    reference value when localising a mismatch.
    """
    m = PAdicValue.of(fd.conductor, ell).valuation
    step = 1 - Fraction(fd.chi(ell), ell)
    return 1 + sum(ell**k * step for k in range(1, m + 1))


def _offending_primes(a: int, q: int, o_can: dict[int, Fraction]) -> list[int]:
    fd = QuadraticFieldData.from_frobenius(a, q)
    off = [ell for ell, v in sorted(o_can.items()) if v != local_order_factor(fd, ell)]
    return off or bad_primes(a, q)


# ---------------------------------------------------------------------------
# global assembly


def bad_primes(a: int, q: int) -> list[int]:
    """Primes dividing q * (a^2 - 4q), ascending."""
    return sorted(set(factorize(q)) | set(factorize(a * a - 4 * q)))


@dataclass
class GlobalAssembly:
    a: int
    q: int
    fundamental: int
    conductor: int
    census_value: Fraction | None = None
    kronecker_value: Fraction | None = None
    global_volume: Fraction | None = None
    lk_value: Fraction | None = None
    gekeler_exact: Fraction | None = None
    gekeler_float: float | None = None
    prime_bound: int | None = None
    factors: dict[int, OrbitalFactors] = field(default_factory=dict)

    def route_values(self) -> dict[str, Fraction]:
        routes = {
            "census": self.census_value,
            "weighted_kronecker": self.kronecker_value,
            "langlands_kottwitz": self.lk_value,
            "gekeler_exact": self.gekeler_exact,
        }
        return {k: v for k, v in routes.items() if v is not None}

    def consistent(self) -> bool:
        return len(set(self.route_values().values())) <= 1


def _check_ordinary(a: int, q: int) -> int:
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    p = pe[0]
    if a % p == 0:
        raise ValueError(f"trace {a} is divisible by p = {p}: not ordinary")
    if a * a >= 4 * q:
        raise ValueError(f"|a| = {abs(a)} violates the Hasse bound for q = {q}")
    return p


def unit_factor_failures(
    a: int, q: int, bound: int = CHECK_BOUND, density_hook: DensityHook | None = None
) -> list[int]:
    """Primes ell <= bound, ell not dividing q*disc, where O_can != 1."""
    bad = set(bad_primes(a, q))
    out = []
    for ell in primes_up_to(bound).tolist():
        if ell in bad:
            continue
        if orbital_factors(a, q, ell, density_hook).o_can != 1:
            out.append(ell)
    return out


def assemble_lk(
    a: int,
    q: int,
    *,
    with_census: bool = True,
    check_bound: int = CHECK_BOUND,
    density_hook: DensityHook | None = None,
) -> GlobalAssembly:
    """h_K/w_K times the canonical orbital integrals at the primes dividing q*disc."""
    p = _check_ordinary(a, q)
    fd = QuadraticFieldData.from_frobenius(a, q)
    result = GlobalAssembly(a, q, fd.fundamental, fd.conductor)
    result.global_volume = global_volume(fd)
    value = result.global_volume
    for ell in bad_primes(a, q):
        fac = orbital_factors(a, q, ell, density_hook)
        result.factors[ell] = fac
        value *= fac.o_can
    result.lk_value = value
    result.kronecker_value = weighted_kronecker(a, q)
    if with_census and q <= census_cap(p):
        result.census_value = census(q)[a]

    failing = unit_factor_failures(a, q, check_bound, density_hook)
    if failing:
        raise VerificationFailure(
            f"O_can != 1 at unramified primes {failing} for (a, q) = ({a}, {q})",
            primes=failing,
            details={"assembly": result},
        )
    if not result.consistent():
        raise VerificationFailure(
            f"route mismatch for (a, q) = ({a}, {q}): {_fmt_routes(result)}",
            primes=_offending_primes(a, q, {ell: f.o_can for ell, f in result.factors.items()}),
            details={"assembly": result},
        )
    return result


def _fmt_routes(result: GlobalAssembly) -> str:
    return ", ".join(f"{k}={v}" for k, v in result.route_values().items())


def gekeler_prefactor(a: int, q: int) -> Surd:
    """(sqrt q / 2) * nu_inf = sqrt(4q - a^2) / (2 pi)."""
    return Surd.make(Fraction(1, 2), q) * nu_infinity(a, q).value


def assemble_gekeler(
    a: int,
    q: int,
    prime_bound: int = 10_000,
    *,
    with_census: bool = True,
    density_hook: DensityHook | None = None,
) -> GlobalAssembly:
    """(sqrt q / 2) nu_inf prod_ell nu_ell, truncated (float) and exact."""
    p = _check_ordinary(a, q)
    fd = QuadraticFieldData.from_frobenius(a, q)
    bad = bad_primes(a, q)
    if prime_bound < bad[-1]:
        raise ValueError(f"prime_bound {prime_bound} is below the largest bad prime {bad[-1]}")
    result = GlobalAssembly(a, q, fd.fundamental, fd.conductor, prime_bound=prime_bound)

    nus = {}
    for ell in bad:
        density = nu_ell(a, q, ell)
        nu = density.nu
        if density_hook is not None:
            nu = density_hook(ell, nu)
        nus[ell] = nu

    prefactor = gekeler_prefactor(a, q)
    expected = Surd.make(Fraction(fd.conductor, 2), -fd.fundamental, -1)
    if prefactor != expected:
        raise VerificationFailure(f"archimedean prefactor {prefactor} != {expected}")

    # exact: tail replaced by L(1, chi), corrected at the bad primes
    value = prefactor * L1_surd(fd)
    for ell in bad:
        value = value * (nus[ell] / local_L_factor(ell, fd.chi(ell)))
    result.gekeler_exact = _exact(value, f"Gekeler product for ({a}, {q})")

    # float: ascending fold of nu_ell, Euler factors away from the bad primes
    prod = float(prefactor)
    for ell in primes_up_to(prime_bound).tolist():
        if ell in nus:
            prod *= float(nus[ell])
        else:
            chi = fd.chi(ell)
            prod *= 1.0 / (1.0 - chi / ell)
    result.gekeler_float = prod

    result.kronecker_value = weighted_kronecker(a, q)
    result.global_volume = global_volume(fd)
    if with_census and q <= census_cap(p):
        result.census_value = census(q)[a]
    if not result.consistent():
        o_can = {
            ell: ell ** PAdicValue.of(fd.conductor, ell).valuation * nu / local_L_factor(ell, fd.chi(ell))
            for ell, nu in nus.items()
        }
        raise VerificationFailure(
            f"route mismatch for (a, q) = ({a}, {q}): {_fmt_routes(result)}",
            primes=_offending_primes(a, q, o_can),
            details={"assembly": result},
        )
    return result


def verify_class(
    a: int,
    q: int,
    prime_bound: int = 10_000,
    *,
    check_bound: int = CHECK_BOUND,
    density_hook: DensityHook | None = None,
) -> GlobalAssembly:
    """All four routes for one ordinary class; raises VerificationFailure on any gap."""
    lk = assemble_lk(a, q, check_bound=check_bound, density_hook=density_hook)
    gk = assemble_gekeler(a, q, prime_bound, with_census=False, density_hook=density_hook)
    lk.gekeler_exact = gk.gekeler_exact
    lk.gekeler_float = gk.gekeler_float
    lk.prime_bound = prime_bound
    if not lk.consistent():
        raise VerificationFailure(
            f"route mismatch for (a, q) = ({a}, {q}): {_fmt_routes(lk)}",
            primes=bad_primes(a, q),
            details={"assembly": lk},
        )
    return lk


def supported_prime_powers(q_max: int) -> list[int]:
    out = []
    for q in range(2, q_max + 1):
        pe = prime_power(q)
        if pe and q <= census_cap(pe[0]):
            out.append(q)
    return out


def ordinary_classes(q_max: int) -> list[tuple[int, int]]:
    return [(a, q) for q in supported_prime_powers(q_max) for a in ordinary_traces(q)]


__all__ = [
    "GlobalAssembly",
    "LocalFieldSplitting",
    "OrbitalFactors",
    "VerificationFailure",
    "assemble_gekeler",
    "assemble_lk",
    "bad_primes",
    "canonical_orbital",
    "class_number_formula_identity",
    "conversion_constant",
    "conversion_constant_closed_form",
    "gekeler_prefactor",
    "geometric_orbital",
    "global_volume",
    "local_order_factor",
    "local_L_factor",
    "local_volumes",
    "ordinary_classes",
    "orbital_factors",
    "supported_prime_powers",
    "torus_jacobian_constant",
    "unit_factor_failures",
    "verify_class",
    "zeta_local",
]
