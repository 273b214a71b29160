"""Rational-integer sieves shared by the Gaussian tables."""

from __future__ import annotations

from functools import lru_cache
from math import isqrt

import numpy as np


@lru_cache(maxsize=8)
def prime_mask(limit: int) -> np.ndarray:
    """Boolean array ``m`` with ``m[k]`` true iff ``k`` is a rational prime, ``0 <= k <= limit``."""
    limit = max(int(limit), 2)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    mask.flags.writeable = False
    return mask


def primes_upto(limit: int) -> np.ndarray:
    return np.flatnonzero(prime_mask(limit))


@lru_cache(maxsize=8)
def squarefree_mask(limit: int) -> np.ndarray:
    limit = max(int(limit), 1)
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for p in primes_upto(int(limit**0.5) + 1):
        mask[p * p :: p * p] = False
    mask.flags.writeable = False
    return mask


def sqrt_minus_one(p: int) -> int:
    """Deterministic square root of -1 modulo a prime ``p = 1 mod 4``."""
    if p % 4 != 1:
        raise ValueError(f"{p} is not 1 mod 4")
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    return pow(c, (p - 1) // 4, p)


def two_squares(p: int) -> tuple[int, int]:
    """Return ``(a, b)`` with ``a*a + b*b == p``, ``a`` odd and ``b`` even, via Euclidean descent."""
    if p == 2:
        return 1, 1
    r0, r1 = p, sqrt_minus_one(p)
    while r1 * r1 > p:
        r0, r1 = r1, r0 % r1
    a = r1
    b = isqrt(p - a * a)
    if a * a + b * b != p:
        raise ArithmeticError(f"two-squares descent failed for {p}")
    if a % 2 == 0:
        a, b = b, a
    return a, b


def legendre_vec(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Vectorised Legendre symbol by Euler's criterion; ``p`` odd primes below 2**31."""
    x = np.asarray(x, dtype=np.int64)
    p = np.asarray(p, dtype=np.int64)
    x, p = np.broadcast_arrays(x, p)
    base = np.mod(x, p)
    e = (p - 1) // 2
    result = np.ones_like(base)
    while True:
        odd = (e & 1).astype(bool)
        if odd.any():
            result = np.where(odd, result * base % p, result)
        e = e >> 1
        if not e.any():
            break
        base = base * base % p
    out = np.where(result == 1, 1, np.where(result == 0, 0, -1)).astype(np.int8)
    return out
