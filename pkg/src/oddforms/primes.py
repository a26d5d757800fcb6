"""Prime sieve and von Mangoldt table."""

from __future__ import annotations

import numpy as np

from .errors import CapExceeded

MAX_SIEVE = 10**9


def sieve(n: int) -> np.ndarray:
    """Boolean array ``is_prime[0..n]``."""
    if n > MAX_SIEVE:
        raise CapExceeded(f"sieve bound {n} exceeds {MAX_SIEVE}")
    flags = np.ones(max(n + 1, 2), dtype=bool)
    flags[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags[: n + 1]


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    return np.flatnonzero(sieve(n)).tolist()


def is_prime(n: int) -> bool:
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


def von_mangoldt_table(n: int) -> np.ndarray:
    """``lam[k] = log p`` if ``k`` is a power of the prime ``p``, else 0, for ``k <= n``."""
    lam = np.zeros(n + 1)
    for p in primes_up_to(n):
        lp = np.log(p)
        q = p
        while q <= n:
            lam[q] = lp
            q *= p
    return lam


def von_mangoldt(k: int) -> float:
    if k < 2:
        return 0.0
    for p in range(2, k + 1):
        if k % p == 0:
            while k % p == 0:
                k //= p
            return float(np.log(p)) if k == 1 else 0.0
    return 0.0


def prime_tools(n: int) -> tuple[list[int], np.ndarray]:
    if n < 2:
        raise ValueError("N must be at least 2")
    return primes_up_to(n), von_mangoldt_table(n)
