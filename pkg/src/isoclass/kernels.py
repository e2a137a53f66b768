"""Hot counting loops, each in a numba flavour and a pure-numpy flavour.

Field elements are integer codes and field arithmetic goes through the
lookup tables of :class:`isoclass.arith.FiniteField`.  The public entry points
(:func:`point_counts`, :func:`valuation_histogram`) pick the numba flavour
unless it is disabled through ``ISOCLASS_DISABLE_NUMBA``; tests and the
benchmark call the ``*_numba`` / ``*_numpy`` variants directly.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, njit, numba_enabled

SINGULAR = -1


def _discriminant(a1, a2, a3, a4, a6, p, add, mul, neg):
    # Works elementwise on scalars (jitted) and on numpy arrays (fancy indexing).
    def k(c, x):
        return mul[c % p, x]

    b2 = add[mul[a1, a1], k(4, a2)]
    b4 = add[k(2, a4), mul[a1, a3]]
    b6 = add[mul[a3, a3], k(4, a6)]
    b8 = add[
        add[mul[mul[a1, a1], a6], k(4, mul[a2, a6])],
        neg[add[mul[mul[a1, a3], a4], add[neg[mul[a2, mul[a3, a3]]], mul[a4, a4]]]],
    ]
    t1 = mul[mul[b2, b2], b8]
    t2 = k(8, mul[b4, mul[b4, b4]])
    t3 = k(27, mul[b6, b6])
    t4 = k(9, mul[b2, mul[b4, b6]])
    return add[t4, neg[add[t1, add[t2, t3]]]]


_discriminant_jit = njit(_discriminant)


def _point_counts_loop(eqs, p, add, mul, neg, nsol, out):
    q = add.shape[0]
    for i in range(eqs.shape[0]):
        a1 = eqs[i, 0]
        a2 = eqs[i, 1]
        a3 = eqs[i, 2]
        a4 = eqs[i, 3]
        a6 = eqs[i, 4]
        if _discriminant_jit(a1, a2, a3, a4, a6, p, add, mul, neg) == 0:
            out[i] = SINGULAR
            continue
        count = 1
        for x in range(q):
            xx = mul[x, x]
            rhs = add[add[mul[xx, x], mul[a2, xx]], add[mul[a4, x], a6]]
            count += nsol[add[mul[a1, x], a3], rhs]
        out[i] = count


_point_counts_jit = njit(_point_counts_loop)


def point_counts_numba(eqs, p, add, mul, neg, nsol):
    """#E(F_q) for each row (a1, a2, a3, a4, a6) of ``eqs``; -1 if singular."""
    out = np.empty(eqs.shape[0], dtype=np.int64)
    _point_counts_jit(np.ascontiguousarray(eqs, dtype=np.int64), p, add, mul, neg, nsol, out)
    return out


def point_counts_numpy(eqs, p, add, mul, neg, nsol):
    eqs = np.asarray(eqs, dtype=np.int64)
    a1, a2, a3, a4, a6 = (eqs[:, j] for j in range(5))
    disc = _discriminant(a1, a2, a3, a4, a6, p, add, mul, neg)
    count = np.ones(eqs.shape[0], dtype=np.int64)
    for x in range(add.shape[0]):
        xx = mul[x, x]
        rhs = add[add[mul[xx, x], mul[a2, xx]], add[mul[a4, x], a6]]
        count += nsol[add[mul[a1, x], a3], rhs]
    count[disc == 0] = SINGULAR
    return count


def point_counts(eqs, p, add, mul, neg, nsol):
    if numba_enabled():
        return point_counts_numba(eqs, p, add, mul, neg, nsol)
    return point_counts_numpy(eqs, p, add, mul, neg, nsol)


def quadratic_solution_table(add, mul):
    """nsol[b, c] = #{y : y^2 + b*y = c} over the field given by its tables."""
    q = add.shape[0]
    y = np.arange(q)
    nsol = np.zeros((q, q), dtype=np.int64)
    for b in range(q):
        lhs = add[mul[y, y], mul[b, y]]
        nsol[b] = np.bincount(lhs, minlength=q)
    return nsol


# ---------------------------------------------------------------------------
# fibred counting of 2x2 matrices with prescribed trace and determinant


def _valuation_histogram_tree(ell, n, a, d, hist):
    # Descend the tree of residues alpha mod ell^k with ell^k | f(alpha),
    # f(alpha) = alpha (a - alpha) - d.  A child that is not a root mod
    # ell^(k+1) fixes v = k for all of its ell^(n-k-1) lifts at once, so only
    # the (few) Hensel roots are refined.
    modulus = ell**n
    a %= modulus
    d %= modulus
    pw = np.empty(n + 1, dtype=np.int64)
    pw[0] = 1
    for k in range(n):
        pw[k + 1] = pw[k] * ell
    # depth-first: at most ell pending siblings per level
    stack_r = np.empty(n * ell + 1, dtype=np.int64)
    stack_k = np.empty(n * ell + 1, dtype=np.int64)
    stack_r[0] = 0
    stack_k[0] = 0
    top = 1
    while top > 0:
        top -= 1
        r = stack_r[top]
        k = stack_k[top]
        if k == n:
            hist[n] += 1
            continue
        nxt = pw[k + 1]
        for t in range(ell):
            x = r + t * pw[k]
            m = (x * ((a - x) % modulus) - d) % modulus
            if m % nxt == 0:
                stack_r[top] = x
                stack_k[top] = k + 1
                top += 1
            else:
                hist[k] += pw[n - k - 1]


_valuation_histogram_jit = njit(_valuation_histogram_tree)

MAX_MODULUS = 1 << 31


def _check_modulus(ell, n):
    if ell**n > MAX_MODULUS:
        raise ValueError(f"modulus {ell}^{n} too large for the int64 kernels")


def valuation_histogram_numba(ell, n, a, d):
    """hist[k] = #{alpha mod ell^n : min(v(alpha*(a-alpha) - d), n) = k}."""
    _check_modulus(ell, n)
    hist = np.zeros(n + 1, dtype=np.int64)
    _valuation_histogram_jit(ell, n, a, d, hist)
    return hist


def valuation_histogram_numpy(ell, n, a, d):
    _check_modulus(ell, n)
    modulus = ell**n
    alpha = np.arange(modulus, dtype=np.int64)
    m = (alpha * ((a - alpha) % modulus) - d) % modulus
    k = np.zeros(modulus, dtype=np.int64)
    for j in range(1, n + 1):
        k += (m % ell**j == 0)
    return np.bincount(k, minlength=n + 1)


def valuation_histogram(ell, n, a, d):
    if numba_enabled():
        return valuation_histogram_numba(ell, n, a, d)
    return valuation_histogram_numpy(ell, n, a, d)


__all__ = [
    "HAVE_NUMBA",
    "SINGULAR",
    "point_counts",
    "point_counts_numba",
    "point_counts_numpy",
    "quadratic_solution_table",
    "valuation_histogram",
    "valuation_histogram_numba",
    "valuation_histogram_numpy",
]
