"""Euler-product constants and the local multiplicative functions of the mollifier.

Products run over odd prime ideals: two ideals of norm p above each split
p = 1 mod 4 and one of norm q^2 above each inert q = 3 mod 4.  The local
functions h, g, g1, H depend on a prime only through its norm, so they
are given both as exact rationals on factored input and as numpy
functions of the norm for table work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._sieve import primes_upto
from .errors import NotSquarefree, SlowConvergence
from .gaussian import GaussianInt, IntLike, factor
from .primary_table import primary_table
from .special import zeta_K_2

DEFAULT_P = 10**6


@lru_cache(maxsize=4)
def prime_ideal_norms(P: int) -> np.ndarray:
    """Sorted norms (with multiplicity) of odd prime ideals with norm <= P."""
    ps = primes_upto(P)
    split = ps[ps % 4 == 1]
    inert = ps[(ps % 4 == 3) & (ps * ps <= P)]
    norms = np.sort(np.concatenate([split, split, inert * inert])).astype(float)
    norms.flags.writeable = False
    return norms


# local factors as functions of the norm N of a primary prime

def h_local(N):
    N = np.asarray(N, dtype=float)
    return 1 + 1 / N + 1 / N**2 - 4 / (N * (N + 1))


def g_local(N):
    N = np.asarray(N, dtype=float)
    return (N + 1) / N * (1 - 1 / (N * (N + 1)))


def g1_local(N):
    N = np.asarray(N, dtype=float)
    return 1 / g_local(N) - 2 * N / (h_local(N) * (N + 1))


def H_local(N):  # noqa: N802
    N = np.asarray(N, dtype=float)
    return 1 - 4 * N / (h_local(N) * (N + 1) ** 2)


def euler_constant(kind: str, P: int = DEFAULT_P) -> float:
    """C = (1/3) prod(1 - 1/(N(N+1))) or D = (1/8) prod (1 - 1/N) h(w), truncated at norm P."""
    N = prime_ideal_norms(int(P))
    if kind == "C":
        return float(np.exp(np.sum(np.log1p(-1 / (N * (N + 1)))))) / 3
    if kind == "D":
        return float(np.exp(np.sum(np.log1p(-1 / N) + np.log(h_local(N))))) / 8
    raise ValueError(f"unknown constant {kind!r}")


# exact rational versions

def _h_exact(N: int) -> Fraction:
    N = Fraction(N)
    return 1 + 1 / N + 1 / N**2 - 4 / (N * (N + 1))


def _g_exact(N: int) -> Fraction:
    N = Fraction(N)
    return (N + 1) / N * (1 - 1 / (N * (N + 1)))


def _g1_exact(N: int) -> Fraction:
    return 1 / _g_exact(N) - 2 * Fraction(N) / (_h_exact(N) * (N + 1))


def _H_exact(N: int) -> Fraction:  # noqa: N802
    return 1 - 4 * Fraction(N) / (_h_exact(N) * (N + 1) ** 2)


def _odd_prime_norms(z: IntLike, squarefree: bool) -> list[int]:
    f = factor(z)
    if squarefree and any(e > 1 for _, e in f.odd_part):
        raise NotSquarefree(f"{GaussianInt.of(z)} is not squarefree")
    return [p.norm() for p, _ in f.odd_part]


def _product(values) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= v
    return out


def g_of(l: IntLike) -> Fraction:
    return _product(_g_exact(N) for N in _odd_prime_norms(l, False))


def h_of(z: IntLike) -> Fraction:
    return _product(_h_exact(N) for N in _odd_prime_norms(z, False))


def H_of(gamma: IntLike) -> Fraction:  # noqa: N802
    return _product(_H_exact(N) for N in _odd_prime_norms(gamma, True))


def g1_of(gamma: IntLike) -> Fraction:
    return _product(_g1_exact(N) for N in _odd_prime_norms(gamma, True))


# A_alpha(l) and B_alpha(l)

@dataclass(frozen=True)
class ABValues:
    l: GaussianInt
    alpha: complex
    A: complex
    B: complex
    A_direct: complex | None
    direct_residual: float | None
    prefactor_exponent: float  # B carries N(l*)^(prefactor_exponent * alpha)


def B_alpha(l: IntLike, alpha: complex, P: int = DEFAULT_P, prefactor_exponent: float = -1.0) -> complex:  # noqa: N802
    """Euler product of B_alpha(l) for squarefree primary l."""
    a = complex(alpha)
    l_norms = _odd_prime_norms(l, True)
    N = prime_ideal_norms(int(P))
    body = np.log1p(-(N ** (-2 - 2 * a)) / (1 + 1 / N)).sum()
    value = complex(np.exp(body))
    for q in l_norms:
        value /= 1 + 1 / q
        value /= 1 - q ** (-2 - 2 * a) / (1 + 1 / q)
    return value * GaussianInt.of(l).norm() ** (prefactor_exponent * a)


def A_direct(l: IntLike, alpha: complex, cutoff: int = DEFAULT_P, levels: int = 5, tol: float = 1e-6) -> tuple[complex, float]:
    """A_alpha(l) from its defining n-sum, tail extrapolated.

    For j = 1 the divisor sum collapses, sigma_alpha(m) = N(m)^-alpha, so the
    n-th term is N(l)^-alpha N(n)^(-1-2 alpha) prod_{w | nl} (1 + 1/N(w))^-1.
    Partial sums S(T) over N(n) <= T are fitted to A + K T^(-2 alpha) on a
    geometric ladder of T; the fit residual is returned.
    """
    a = complex(alpha)
    if a.real < 0.2:
        raise SlowConvergence("direct series needs Re(alpha) >= 0.2")
    l = GaussianInt.of(l)
    l_norms = _odd_prime_norms(l, True)
    table = primary_table(int(cutoff))
    l_primes = set()
    for p, _ in factor(l).odd_part:
        l_primes.add((p.re, p.im))
    in_l = np.array([(int(r), int(i)) in l_primes for r, i in zip(table.prime_re, table.prime_im)], dtype=bool)

    # prod over w | n with w not dividing l
    n = table.rows_upto(int(cutoff))
    P = table.fac_prime[:n]
    E = table.fac_exp[:n]
    local = np.ones(n)
    for k in range(P.shape[1]):
        live = E[:, k] > 0
        idx = P[live, k]
        local[live] *= np.where(in_l[idx], 1.0, 1 / (1 + 1 / table.prime_norm[idx]))
    norms = table.norm[:n].astype(float)
    terms = local * norms ** (-1 - 2 * a)
    partial = np.cumsum(terms)
    pref = l.norm() ** (-a)
    for q in l_norms:
        pref /= 1 + 1 / q

    T = cutoff / 2.0 ** np.arange(levels)
    S = np.array([partial[table.rows_upto(t) - 1] for t in T])
    design = np.stack([np.ones_like(T), T ** (-2 * a)], axis=1)
    coef, *_ = np.linalg.lstsq(design.astype(complex), S, rcond=None)
    resid = float(np.max(np.abs(design @ coef - S)))
    if resid > tol:
        raise SlowConvergence(f"tail fit residual {resid:.3g} exceeds {tol:g}")
    return complex(pref * coef[0]), resid


def A_and_B(l: IntLike, alpha: complex, direct: bool = True, P: int = DEFAULT_P, prefactor_exponent: float = -1.0) -> ABValues:  # noqa: N802
    l = GaussianInt.of(l)
    a = complex(alpha)
    B = B_alpha(l, a, P, prefactor_exponent)
    A = zeta_K_2(1 + 2 * a) * B
    A_dir, resid = A_direct(l, a) if direct else (None, None)
    return ABValues(l, a, A, B, A_dir, resid, prefactor_exponent)
