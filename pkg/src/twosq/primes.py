"""Prime generation and factorization helpers used throughout the toolkit.

Everything here is deliberately elementary: simple and segmented sieves of
Eratosthenes (numpy bit arrays), trial-division factorization, and the
partition of odd primes into the residue classes 1 and 3 mod 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Iterator

import numpy as np

from .errors import DomainError

# Segment length (in integers) for streaming prime enumeration.
PRIME_SEGMENT = 1 << 22


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (empty for limit < 2)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def iter_prime_blocks(limit: int, segment: int = PRIME_SEGMENT) -> Iterator[np.ndarray]:
    """Yield primes <= limit in ascending blocks without sieving all at once.

    Memory stays O(segment + sqrt(limit)); used for the truncated Euler
    products where limit can be 10^8.
    """
    if limit < 2:
        return
    base_limit = isqrt(limit)
    base = sieve_primes(base_limit)
    yield base
    lo = base_limit + 1
    while lo <= limit:
        hi = min(lo + segment - 1, limit)
        flags = np.ones(hi - lo + 1, dtype=bool)
        for p in base:
            p = int(p)
            start = ((lo + p - 1) // p) * p
            if start <= hi:
                flags[start - lo :: p] = False
        yield (lo + np.flatnonzero(flags)).astype(np.int64)
        lo = hi + 1


def is_prime(n: int) -> bool:
    """Trial-division primality test; fine for the desk-scale moduli used here."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization {p: exponent} by trial division; n >= 1."""
    if n < 1:
        raise DomainError(f"factorize: n must be >= 1, got {n}")
    out: dict[int, int] = {}
    m = n
    e = 0
    while m % 2 == 0:
        m //= 2
        e += 1
    if e:
        out[2] = e
    f = 3
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            out[f] = e
        f += 2
    if m > 1:
        out[m] = 1
    return out


@dataclass(frozen=True)
class PrimeClassTable:
    """Primes <= limit split by residue class mod 4.

    The union of the two lists with {2} is exactly the set of primes
    <= limit; the lists are sorted and disjoint.
    """

    limit: int
    primes_1mod4: np.ndarray = field(repr=False)
    primes_3mod4: np.ndarray = field(repr=False)
    has_two: bool

    @classmethod
    def build(cls, limit: int) -> "PrimeClassTable":
        ps = sieve_primes(limit)
        odd = ps[ps > 2]
        return cls(
            limit=limit,
            primes_1mod4=odd[odd % 4 == 1],
            primes_3mod4=odd[odd % 4 == 3],
            has_two=limit >= 2,
        )
