"""Quadratic residue symbol (a/n) on Z[i] and the characters chi_c = (c/.).

The scalar :func:`symbol` is the reference: it factors n and evaluates
a^((N(w)-1)/2) modulo each prime w in the residue ring.  The vectorised
paths use the ring isomorphisms Z[i]/(w) = F_p (split w, i -> rho) and
Z[i]/(q) = F_{q^2}, where the Frobenius gives x^((q^2-1)/2) = N(x)^((q-1)/2).
They are validated against the reference in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._sieve import legendre_vec
from .errors import EvenInput, EvenModulus, ZeroInput
from .gaussian import ONE_PLUS_I, GaussianInt, IntLike, factor
from .primary_table import PrimaryTable, primary_table

# (1+i)^5 = -4 - 4i
CONDUCTOR_2PART = ONE_PLUS_I**5


def _gaussian_powmod(a: GaussianInt, e: int, m: GaussianInt) -> GaussianInt:
    result, base = GaussianInt(1), a % m
    while e:
        if e & 1:
            result = result * base % m
        base = base * base % m
        e >>= 1
    return result


def symbol_prime(a: IntLike, w: GaussianInt) -> int:
    """(a/w) for an odd prime w, straight from the power-residue congruence."""
    a = GaussianInt.of(a)
    r = _gaussian_powmod(a, (w.norm() - 1) // 2, w)
    if not r:
        return 0
    if w.divides(r - 1):
        return 1
    if w.divides(r + 1):
        return -1
    raise ArithmeticError(f"{a}^((N-1)/2) mod {w} is not +-1")


def symbol(a: IntLike, n: IntLike) -> int:
    n = GaussianInt.of(n)
    if not n:
        raise ZeroInput("symbol modulo 0")
    if not n.is_odd():
        raise EvenModulus(f"modulus {n} is even")
    value = 1
    for w, e in factor(n).odd_part:
        s = symbol_prime(a, w)
        if s == 0:
            return 0
        if e % 2:
            value *= s
    return value


def chi_d(d: IntLike, n: IntLike) -> int:
    """chi_{(1+i)^5 d}(n)."""
    return symbol(CONDUCTOR_2PART * GaussianInt.of(d), n)


def _prime_rho(w: GaussianInt) -> int:
    p = w.norm()
    return (-w.re * pow(w.im, -1, p)) % p


def symbol_array(x_re, x_im, n: IntLike) -> np.ndarray:
    """(x/n) for arrays of x, fixed odd modulus n."""
    n = GaussianInt.of(n)
    if not n.is_odd():
        raise EvenModulus(f"modulus {n} is even")
    x_re = np.asarray(x_re, dtype=np.int64)
    x_im = np.asarray(x_im, dtype=np.int64)
    out = np.ones(np.broadcast(x_re, x_im).shape, dtype=np.int8)
    for w, e in factor(n).odd_part:
        if w.im == 0:
            q = -w.re
            vals = legendre_vec(np.mod(x_re, q) ** 2 + np.mod(x_im, q) ** 2, q)
        else:
            p = w.norm()
            vals = legendre_vec(np.mod(x_re, p) + np.mod(x_im, p) * _prime_rho(w), p)
        out *= vals if e % 2 else vals * vals
    return out


def prime_character_values(table: PrimaryTable, c_re, c_im, n_primes: int | None = None) -> np.ndarray:
    """(c/w) for every table prime w, batched over c.

    Returns an int8 array of shape ``c.shape + (n_primes,)``.
    """
    k = table.n_primes if n_primes is None else n_primes
    c_re = np.asarray(c_re, dtype=np.int64)[..., None]
    c_im = np.asarray(c_im, dtype=np.int64)[..., None]
    p = table.prime_p[:k]
    inert = table.prime_inert[:k]
    rho = table.prime_rho[:k]
    a = np.mod(c_re, p)
    b = np.mod(c_im, p)
    arg = np.where(inert, a * a + b * b, a + b * rho)
    return legendre_vec(arg, p)


@dataclass(frozen=True)
class CharTable:
    """chi_{(1+i)^5 d} on all primary n with N(n) <= cutoff."""

    modulus_label: GaussianInt
    cutoff: int
    table: PrimaryTable = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __getitem__(self, n: IntLike) -> int:
        n = GaussianInt.of(n)
        if n.norm() > self.cutoff:
            raise KeyError(f"{n} beyond cutoff {self.cutoff}")
        row = int(self.table.index_of(n.re, n.im))
        return int(self.values[row])

    def __len__(self) -> int:
        return int(self.values.size)

    def items(self):
        for a, b, v in zip(self.table.re[: len(self)].tolist(), self.table.im[: len(self)].tolist(), self.values.tolist()):
            yield GaussianInt(a, b), v

    def as_dict(self) -> dict[GaussianInt, int]:
        return dict(self.items())


def char_sieve(d: IntLike, cutoff: int, table: PrimaryTable | None = None) -> CharTable:
    """Tabulate chi_{(1+i)^5 d} from its values at primary primes."""
    d = GaussianInt.of(d)
    if not d.is_odd():
        raise EvenInput(f"{d} is even")
    table = table if table is not None and table.cutoff >= cutoff else primary_table(int(cutoff))
    rows = table.rows_upto(cutoff)
    k = int(np.searchsorted(table.prime_norm, cutoff, side="right"))
    c = CONDUCTOR_2PART * d
    pv = prime_character_values(table, c.re, c.im, k)
    values = table.completely_multiplicative(pv, upto=rows)
    values.flags.writeable = False
    return CharTable(c, int(cutoff), table, values)

