"""Exact arithmetic in the Gaussian integers Z[i].

Odd elements are normalised to their *primary* associate, the unique one
congruent to 1 modulo (1+i)^3.  Factorisations are canonical: primary odd
primes sorted by (norm, re, im), the ramified prime carried as a power of
(1+i), and a leftover unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import isqrt, prod
from typing import Iterator, Literal, Union

import numpy as np
from sympy import factorint

from ._sieve import squarefree_mask, two_squares
from .errors import EvenInput, ZeroInput

IntLike = Union[int, "GaussianInt"]


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0 (ties toward +inf)."""
    return (2 * a + b) // (2 * b)


@dataclass(frozen=True, slots=True)
class GaussianInt:
    re: int
    im: int = 0

    @staticmethod
    def of(z: IntLike | complex) -> GaussianInt:
        if isinstance(z, GaussianInt):
            return z
        if isinstance(z, complex):
            if z.real != int(z.real) or z.imag != int(z.imag):
                raise ValueError(f"{z!r} is not a Gaussian integer")
            return GaussianInt(int(z.real), int(z.imag))
        return GaussianInt(int(z), 0)

    def __add__(self, other: IntLike) -> GaussianInt:
        o = GaussianInt.of(other)
        return GaussianInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> GaussianInt:
        return GaussianInt(-self.re, -self.im)

    def __sub__(self, other: IntLike) -> GaussianInt:
        o = GaussianInt.of(other)
        return GaussianInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: IntLike) -> GaussianInt:
        return GaussianInt.of(other) - self

    def __mul__(self, other: IntLike) -> GaussianInt:
        o = GaussianInt.of(other)
        return GaussianInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GaussianInt:
        if k < 0:
            raise ValueError("negative powers are not integral")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: IntLike) -> tuple[GaussianInt, GaussianInt]:
        o = GaussianInt.of(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        num = self * o.conj()
        q = GaussianInt(_round_div(num.re, n), _round_div(num.im, n))
        return q, self - q * o

    def __floordiv__(self, other: IntLike) -> GaussianInt:
        return divmod(self, other)[0]

    def __mod__(self, other: IntLike) -> GaussianInt:
        return divmod(self, other)[1]

    def exact_div(self, other: IntLike) -> GaussianInt:
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divides(self, other: IntLike) -> bool:
        if not self:
            return not GaussianInt.of(other)
        return not (GaussianInt.of(other) % self)

    def conj(self) -> GaussianInt:
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_odd(self) -> bool:
        return (self.re + self.im) % 2 == 1

    def is_unit(self) -> bool:
        return self.norm() == 1

    def is_primary(self) -> bool:
        if not self.is_odd():
            return False
        # (z - 1) / (-2 + 2i) integral  <=>  (z - 1)(-2 - 2i) = 0 mod 8 componentwise
        t = (self - 1) * GaussianInt(-2, -2)
        return t.re % 8 == 0 and t.im % 8 == 0

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def sort_key(self) -> tuple[int, int, int]:
        return (self.norm(), self.re, self.im)

    def __repr__(self) -> str:
        return f"GaussianInt({self.re}, {self.im})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        mag = "" if abs(self.im) == 1 else str(abs(self.im))
        if not self.re:
            return f"{'-' if self.im < 0 else ''}{mag}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{mag}i"


ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)
ONE_PLUS_I = GaussianInt(1, 1)
UNITS = (ONE, I, GaussianInt(-1, 0), GaussianInt(0, -1))


def norm(z: IntLike) -> int:
    return GaussianInt.of(z).norm()


def primary_associate(z: IntLike) -> tuple[GaussianInt, GaussianInt]:
    """Return ``(u, u*z)`` where ``u*z`` is the primary associate of odd ``z``."""
    z = GaussianInt.of(z)
    if not z:
        raise ZeroInput("0 has no primary associate")
    if not z.is_odd():
        raise EvenInput(f"{z} is divisible by 1+i")
    for u in UNITS:
        w = u * z
        if w.is_primary():
            return u, w
    raise AssertionError("no primary associate found")  # unreachable for odd z


def _two_adic_normal(z: GaussianInt) -> GaussianInt:
    k = 0
    while z and not z.is_odd():
        z = z.exact_div(ONE_PLUS_I)
        k += 1
    return ONE_PLUS_I**k * primary_associate(z)[1]


def gcd(a: IntLike, b: IntLike) -> GaussianInt:
    """Euclidean gcd, normalised to (1+i)^k times a primary element."""
    a, b = GaussianInt.of(a), GaussianInt.of(b)
    if not a and not b:
        raise ZeroInput("gcd(0, 0) is undefined")
    while b:
        a, b = b, a % b
    return _two_adic_normal(a)


@dataclass(frozen=True)
class Factorization:
    unit: GaussianInt
    two_exp: int
    odd_part: tuple[tuple[GaussianInt, int], ...]

    def reconstruct(self) -> GaussianInt:
        z = self.unit * ONE_PLUS_I**self.two_exp
        for p, e in self.odd_part:
            z = z * p**e
        return z

    @property
    def primes(self) -> tuple[GaussianInt, ...]:
        return tuple(p for p, _ in self.odd_part)

    def is_squarefree(self) -> bool:
        return self.two_exp <= 1 and all(e == 1 for _, e in self.odd_part)


_SPLIT_CACHE: dict[int, tuple[GaussianInt, GaussianInt]] = {}


def split_primes(p: int) -> tuple[GaussianInt, GaussianInt]:
    """The two primary primes above a rational prime ``p = 1 mod 4``, in canonical order."""
    pair = _SPLIT_CACHE.get(p)
    if pair is None:
        a, b = two_squares(p)
        w1 = primary_associate(GaussianInt(a, b))[1]
        w2 = primary_associate(GaussianInt(a, -b))[1]
        pair = tuple(sorted((w1, w2), key=GaussianInt.sort_key))
        _SPLIT_CACHE[p] = pair
    return pair


def factor(z: IntLike) -> Factorization:
    z = GaussianInt.of(z)
    if not z:
        raise ZeroInput("cannot factor 0")
    rest = z
    two_exp = 0
    odd: list[tuple[GaussianInt, int]] = []
    for p, e in sorted(factorint(z.norm()).items()):
        if p == 2:
            for _ in range(e):
                rest = rest.exact_div(ONE_PLUS_I)
            two_exp = e
        elif p % 4 == 3:
            for _ in range(e // 2):
                rest = rest.exact_div(p)
            odd.append((GaussianInt(-p, 0), e // 2))
        else:
            w1, w2 = split_primes(p)
            e1 = 0
            while e1 < e and w1.divides(rest):
                rest = rest.exact_div(w1)
                e1 += 1
            for _ in range(e - e1):
                rest = rest.exact_div(w2)
            odd.extend((w, k) for w, k in ((w1, e1), (w2, e - e1)) if k)
    # inert primes contributed q, not -q; fold the signs into the unit
    for w, k in odd:
        if w.im == 0 and k % 2:
            rest = -rest
    if not rest.is_unit():
        raise AssertionError(f"factorisation of {z} left {rest}")
    odd.sort(key=lambda pe: pe[0].sort_key())
    return Factorization(rest, two_exp, tuple(odd))


def moebius(z: IntLike) -> int:
    f = factor(z)
    if not f.is_squarefree():
        return 0
    return (-1) ** (len(f.odd_part) + f.two_exp)


def arith_fn(z: IntLike, kind: Literal["phi", "d_count", "sigma_norm"]) -> int:
    """Totient, divisor count or divisor-norm sum of ``z``, all taken over ideals."""
    f = factor(z)
    local = [(2, f.two_exp)] if f.two_exp else []
    local += [(p.norm(), e) for p, e in f.odd_part]
    if kind == "phi":
        return prod(q ** (e - 1) * (q - 1) for q, e in local)
    if kind == "d_count":
        return prod(e + 1 for _, e in local)
    if kind == "sigma_norm":
        return prod(sum(q**t for t in range(e + 1)) for q, e in local)
    raise ValueError(f"unknown arithmetic function {kind!r}")


def divisors_primary(z: IntLike) -> list[GaussianInt]:
    z = GaussianInt.of(z)
    if not z:
        raise ZeroInput("0 has infinitely many divisors")
    if not z.is_odd():
        raise EvenInput(f"{z} is even")
    f = factor(z)
    out = []
    for exps in product(*(range(e + 1) for _, e in f.odd_part)):
        out.append(prod((p**k for (p, _), k in zip(f.odd_part, exps)), start=ONE))
    return sorted(out, key=GaussianInt.sort_key)


def odd_squarefree_arrays(norm_lo: int, norm_hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of all odd squarefree z with norm in [lo, hi].

    Sorted by (norm, re, im).  Uses the fact that for z = g*w with
    g = gcd(re, im), z is squarefree iff N(z)/g is a squarefree integer.
    """
    norm_lo, norm_hi = max(int(norm_lo), 0), int(norm_hi)
    if norm_hi < max(norm_lo, 1):
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    sqf = squarefree_mask(norm_hi)
    R = isqrt(norm_hi)
    b_all = np.arange(-R, R + 1, dtype=np.int64)
    res, ims = [], []
    for a in range(-R, R + 1):
        n = a * a + b_all * b_all
        keep = (n >= norm_lo) & (n <= norm_hi) & ((a + b_all) % 2 == 1)
        if not keep.any():
            continue
        b = b_all[keep]
        n = n[keep]
        g = np.gcd(abs(a), b)
        ok = sqf[n // g]
        res.append(np.full(int(ok.sum()), a, dtype=np.int64))
        ims.append(b[ok])
    if not res:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    re = np.concatenate(res)
    im = np.concatenate(ims)
    order = np.lexsort((im, re, re * re + im * im))
    return re[order], im[order]


def enumerate_odd_squarefree(norm_lo: int, norm_hi: int) -> Iterator[GaussianInt]:
    re, im = odd_squarefree_arrays(norm_lo, norm_hi)
    for a, b in zip(re.tolist(), im.tolist()):
        yield GaussianInt(a, b)


def count_odd_squarefree(norm_lo: int, norm_hi: int) -> int:
    return int(odd_squarefree_arrays(norm_lo, norm_hi)[0].size)
