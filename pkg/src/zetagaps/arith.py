"""Sieved arithmetic functions.

Everything here is driven by a smallest-prime-factor table, which turns the
factorization of any ``n <= limit`` into ``O(log n)`` table lookups.  The
per-integer helpers are plain Python and meant for tests and small inputs;
the bulk array versions used by the finite-T evaluation live in
:mod:`zetagaps.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DomainError, SieveSizeError

DEFAULT_MAX_LIMIT = 2**25
HARD_MAX_LIMIT = 2**31

Factorization = List[Tuple[int, int]]


@dataclass(frozen=True)
class SpfSieve:
    """Smallest-prime-factor table for ``2 <= n <= limit``.

    ``spf[n]`` is the least prime dividing ``n``; entries 0 and 1 are unused
    and hold 0 and 1.  The array is marked read-only so a finished sieve can
    be shared between threads.
    """

    limit: int
    spf: np.ndarray

    def covers(self, n: int) -> bool:
        return 1 <= n <= self.limit

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.limit and int(self.spf[n]) == n

    def primes(self) -> np.ndarray:
        idx = np.arange(self.spf.size)
        return idx[(self.spf == idx) & (idx >= 2)]


def build_spf_sieve(limit: int, max_limit: int = DEFAULT_MAX_LIMIT) -> SpfSieve:
    """Build the smallest-prime-factor table up to ``limit`` inclusive.

    ``max_limit`` is a memory guard (4 bytes per entry); it may be raised up
    to ``2**31``.
    """
    limit = int(limit)
    if max_limit > HARD_MAX_LIMIT:
        raise SieveSizeError(f"max_limit {max_limit} exceeds the hard cap 2**31")
    if limit < 2:
        raise SieveSizeError(f"sieve limit must be at least 2, got {limit}")
    if limit > max_limit:
        raise SieveSizeError(
            f"sieve limit {limit} exceeds the memory cap {max_limit} "
            f"(~{4 * limit / 2**20:.0f} MiB needed); raise max_limit explicitly"
        )
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p]:
            continue
        seg = spf[p * p :: p]
        seg[seg == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest.astype(np.int32)
    spf.flags.writeable = False
    return SpfSieve(limit=limit, spf=spf)


def _check(n: int, sieve: SpfSieve) -> int:
    n = int(n)
    if n < 1:
        raise DomainError(f"expected a positive integer, got {n}")
    if n > sieve.limit:
        raise SieveSizeError(f"{n} exceeds the sieve limit {sieve.limit}")
    return n


def factorize(n: int, sieve: SpfSieve) -> Factorization:
    """Canonical factorization ``[(p, e), ...]`` with increasing primes."""
    n = _check(n, sieve)
    out: Factorization = []
    spf = sieve.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def big_omega(n: int, sieve: SpfSieve) -> int:
    return sum(e for _, e in factorize(n, sieve))


def von_mangoldt(n: int, sieve: SpfSieve) -> float:
    fac = factorize(n, sieve)
    if len(fac) == 1:
        return math.log(fac[0][0])
    return 0.0


def liouville(n: int, sieve: SpfSieve) -> int:
    return -1 if big_omega(n, sieve) % 2 else 1


def d_r_prime_power(m: int, r: float) -> float:
    """``Gamma(m + r) / (Gamma(r) m!)`` as the rising factorial ``r^(m) / m!``."""
    val = 1.0
    for j in range(m):
        val *= (r + j) / (j + 1)
    return val


def d_r(n: int, r: float, sieve: SpfSieve) -> float:
    """Generalized divisor function, multiplicative with ``d_r(p^m) = r^(m)/m!``."""
    if r < 1:
        raise DomainError(f"d_r needs r >= 1, got {r}")
    val = 1.0
    for _, e in factorize(n, sieve):
        val *= d_r_prime_power(e, r)
    return val


def ordered_tuple_sum(n: int, exps: Sequence[int], sieve: SpfSieve) -> float:
    """Sum over ordered tuples of pairwise-distinct primes dividing ``n``.

    Coordinate ``i`` of a tuple ``(p_1, ..., p_L)`` contributes the factor
    ``log(p_i) ** exps[i]``.  With ``exps=[1, 1]`` this is the squarefree
    prime-pair sum that enters the coefficients.
    """
    exps = [int(e) for e in exps]
    if not 1 <= len(exps) <= 4:
        raise DomainError(f"tuple length must be between 1 and 4, got {len(exps)}")
    if any(e < 1 for e in exps):
        raise DomainError("exponents must be positive integers")
    logs = [math.log(p) for p, _ in factorize(n, sieve)]
    total = 0.0
    for tup in permutations(logs, len(exps)):
        term = 1.0
        for lp, e in zip(tup, exps):
            term *= lp**e
        total += term
    return total


def prime_log_sum(n: int, sieve: SpfSieve) -> float:
    """``sum_{p | n} log p`` over distinct primes (``log`` of the radical)."""
    return sum(math.log(p) for p, _ in factorize(n, sieve))
