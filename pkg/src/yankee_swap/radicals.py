"""Exact sign of sums  sum_k c_k * k**p  for rational p and positive integers k.

Each power k**(a/b) is rewritten as rho * s**(1/b) with rho rational and s a
b-th-power-free integer. Roots of distinct b-th-power-free integers are
linearly independent over the rationals, so after grouping by s the sum is
zero exactly when every group coefficient is zero. Nonzero sums get their
sign from integer-root interval bounds refined until they exclude zero.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import gmpy2


@lru_cache(maxsize=None)
def _factor(k: int) -> tuple[tuple[int, int], ...]:
    out = []
    d = 2
    while d * d <= k:
        e = 0
        while k % d == 0:
            k //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if k > 1:
        out.append((k, 1))
    return tuple(out)


@lru_cache(maxsize=None)
def power_parts(k: int, p: Fraction) -> tuple[Fraction, int]:
    """Return (rho, s) with k**p == rho * s**(1/b), s b-th-power-free."""
    if k <= 0:
        raise ValueError("base must be a positive integer")
    a, b = p.numerator, p.denominator
    rho = Fraction(1)
    s = 1
    for prime, e in _factor(k):
        total = e * a
        whole, rest = divmod(total, b)  # floor division keeps rest in [0, b)
        rho *= Fraction(prime) ** whole
        s *= prime**rest
    return rho, s


def _root_bounds(s: int, b: int, bits: int) -> tuple[Fraction, Fraction]:
    if b == 1 or s == 1:
        return Fraction(s), Fraction(s)
    scale = 1 << bits
    r, exact = gmpy2.iroot(gmpy2.mpz(s) * scale**b, b)
    r = int(r)
    if exact:
        return Fraction(r, scale), Fraction(r, scale)
    return Fraction(r, scale), Fraction(r + 1, scale)


def sign_of_power_sum(terms, p: Fraction) -> int:
    """Sign (-1, 0, 1) of sum(c * k**p for k, c in terms)."""
    p = Fraction(p)
    groups: dict[int, Fraction] = {}
    for k, c in terms:
        if c == 0:
            continue
        rho, s = power_parts(int(k), p)
        groups[s] = groups.get(s, Fraction(0)) + Fraction(c) * rho
    groups = {s: c for s, c in groups.items() if c != 0}
    if not groups:
        return 0
    if len(groups) == 1:
        (c,) = groups.values()
        return 1 if c > 0 else -1
    b = p.denominator
    bits = 64
    while True:
        lo = hi = Fraction(0)
        for s, c in groups.items():
            rlo, rhi = _root_bounds(s, b, bits)
            if c > 0:
                lo += c * rlo
                hi += c * rhi
            else:
                lo += c * rhi
                hi += c * rlo
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2


def approx_power(k: int, p: Fraction) -> float:
    return float(k) ** float(p)
