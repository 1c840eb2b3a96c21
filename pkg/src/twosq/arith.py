"""Arithmetic constants and multiplicative functions for two-squares counts.

Exact rational values (fractions.Fraction) wherever the downstream algebra
needs exactness; the Landau-Ramanujan density constant is a truncated Euler
product with a rigorous tail bound.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .primes import factorize, is_prime, iter_prime_blocks, sieve_primes

__all__ = [
    "phi_S",
    "landau_constant",
    "nu",
    "p1_numbers",
    "p3_squarefree_upto",
]


def phi_S(q: int) -> Fraction:
    """Multiplicative normalizer for two-squares counts in progressions.

    Prime-power values: p^e for p = 1 (mod 4); p^(e+1)/(p+1) for
    p = 3 (mod 4); 2^(e-1) for p = 2, e >= 2; and 2 at q = 2.  Extended
    multiplicatively; phi_S(1) = 1.
    """
    if q < 1:
        raise DomainError(f"phi_S: q must be >= 1, got {q}")
    value = Fraction(1)
    for p, e in factorize(q).items():
        if p == 2:
            value *= 2 if e == 1 else 2 ** (e - 1)
        elif p % 4 == 1:
            value *= p**e
        else:
            value *= Fraction(p ** (e + 1), p + 1)
    return value


def landau_constant(truncation_limit: int) -> tuple[float, float]:
    """Truncated product for the two-squares density constant, with tail bound.

    Returns (value, tail_bound) where value is
    (1/sqrt(2)) * prod_{p = 3 (4), p <= limit} (1 - p^-2)^(-1/2) and the true
    constant lies in [value, value + tail_bound].  The tail uses
    -log(1-x) <= x/(1-x) and sum_{n > P} n^-2 < 1/(P-1), so the bound is
    crude but rigorous.
    """
    if truncation_limit < 10:
        raise DomainError(f"landau_constant: truncation_limit must be >= 10, got {truncation_limit}")
    log_parts: list[float] = []
    for block in iter_prime_blocks(truncation_limit):
        sel = block[(block % 4 == 3) & (block <= truncation_limit)]
        if sel.size:
            x = 1.0 / (sel.astype(np.float64) ** 2)
            log_parts.append(float(np.sum(np.log1p(-x))))
    log_product = math.fsum(log_parts)
    value = math.exp(-0.5 * log_product) / math.sqrt(2.0)

    # Remaining factors: 0 < -1/2 * sum_{p > P} log(1 - p^-2) and for P >= 10,
    # x/(1-x) <= (100/99) x at x = p^-2, so log-tail <= (50/99) / (P - 1).
    log_tail = (50.0 / 99.0) / (truncation_limit - 1)
    tail_bound = value * math.expm1(log_tail)
    return value, tail_bound


def nu(p: int, forms: Sequence) -> int:
    """Number of n in [1, p) with p dividing prod_i (a_i * n + b_i).

    Direct evaluation modulo p; the range deliberately excludes n = 0, which
    is the convention the downstream weight algebra is built on.
    """
    if not is_prime(p):
        raise DomainError(f"nu: p must be prime, got {p}")
    if not forms:
        raise DomainError("nu: forms must be nonempty")
    if p <= 2**20:
        n = np.arange(1, p, dtype=np.int64)
        prod = np.ones(p - 1, dtype=np.int64)
        for form in forms:
            prod = (prod * ((form.a * n + form.b) % p)) % p
        return int(np.count_nonzero(prod == 0))
    count = 0
    for n_ in range(1, p):
        acc = 1
        for form in forms:
            acc = (acc * (form.a * n_ + form.b)) % p
        if acc == 0:
            count += 1
    return count


def _all_factors_1mod4(n: int) -> bool:
    if n % 2 == 0:
        return False
    m = n
    f = 3
    while f * f <= m:
        while m % f == 0:
            if f % 4 == 3:
                return False
            m //= f
        f += 2
    return m == 1 or m % 4 == 1


def p1_numbers(k: int, exclude_prime: int | None = None) -> list[int]:
    """First k positive integers whose prime factors are all = 1 (mod 4).

    1 is included (empty product).  Integers divisible by exclude_prime are
    skipped.
    """
    if k < 1:
        raise DomainError(f"p1_numbers: k must be >= 1, got {k}")
    if exclude_prime is not None and exclude_prime != 1 and not is_prime(exclude_prime):
        raise DomainError(f"p1_numbers: exclude_prime must be prime or None, got {exclude_prime}")
    out: list[int] = []
    n = 1
    while len(out) < k:
        if _all_factors_1mod4(n) and not (exclude_prime and exclude_prime > 1 and n % exclude_prime == 0):
            out.append(n)
        n += 1
    return out


def _p3_primes_below(R: int, coprime_to: int = 1) -> list[int]:
    ps = sieve_primes(R - 1) if R > 3 else np.empty(0, dtype=np.int64)
    return [int(p) for p in ps[ps % 4 == 3] if math.gcd(int(p), coprime_to) == 1]


def p3_squarefree_upto(R: int, coprime_to: int = 1) -> list[int]:
    """Ascending squarefree r < R with all prime factors = 3 (mod 4).

    1 is included; r sharing a factor with coprime_to are dropped.  These
    are exactly the admissible divisor-support elements of the weight
    construction.
    """
    if R < 1:
        raise DomainError(f"p3_squarefree_upto: R must be >= 1, got {R}")
    primes = _p3_primes_below(R, coprime_to)
    out = [1]
    stack: list[tuple[int, int]] = [(1, 0)]
    while stack:
        prod, i = stack.pop()
        for j in range(i, len(primes)):
            nxt = prod * primes[j]
            if nxt >= R:
                # primes ascending, so larger j only overshoots further
                break
            out.append(nxt)
            stack.append((nxt, j + 1))
    out.sort()
    return out


def p3_squarefree_factored(R: int, coprime_to: int = 1) -> list[tuple[int, tuple[int, ...]]]:
    """Like p3_squarefree_upto but pairing each r with its prime tuple."""
    if R < 1:
        raise DomainError(f"p3_squarefree_factored: R must be >= 1, got {R}")
    primes = _p3_primes_below(R, coprime_to)
    out: list[tuple[int, tuple[int, ...]]] = [(1, ())]
    stack: list[tuple[int, tuple[int, ...], int]] = [(1, (), 0)]
    while stack:
        prod, facs, i = stack.pop()
        for j in range(i, len(primes)):
            nxt = prod * primes[j]
            if nxt >= R:
                break
            nfacs = facs + (primes[j],)
            out.append((nxt, nfacs))
            stack.append((nxt, nfacs, j + 1))
    out.sort()
    return out
