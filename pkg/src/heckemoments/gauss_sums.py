"""Quadratic Gauss sums over Z[i] and the Poisson summation check.

g(r, n) = sum_{x mod n} (x/n) e~(rx/n) with e~(z) = exp(2 pi i Im z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal

import numpy as np
from scipy.integrate import quad
from scipy.special import j0

from .errors import EvenModulus, NonPrimaryModulus, TruncationFailure, ZeroDenominator
from .gaussian import GaussianInt, IntLike, factor, odd_squarefree_arrays
from .symbol import symbol, symbol_array


@dataclass(frozen=True)
class GaussSumValue:
    value: complex
    method: Literal["brute", "fast"]


def e_tilde(num: IntLike, den: IntLike = 1) -> complex:
    """exp(2 pi i Im(num/den)), with Im(num/den) reduced exactly mod 1."""
    num, den = GaussianInt.of(num), GaussianInt.of(den)
    if not den:
        raise ZeroDenominator("e~ with zero denominator")
    im = Fraction((num * den.conj()).im, den.norm()) % 1
    return _unit_root(im)


def _unit_root(frac: Fraction) -> complex:
    # exact values at quarter turns keep real sums real
    if 4 % frac.denominator == 0:
        return (1, 1j, -1, -1j)[int(frac * 4)]
    ang = 2 * math.pi * float(frac)
    return complex(math.cos(ang), math.sin(ang))


def residue_system(n: IntLike) -> tuple[np.ndarray, np.ndarray]:
    """Complete residues mod n: u + vi with 0 <= u < N(n)/g, 0 <= v < g, g = gcd(re, im)."""
    n = GaussianInt.of(n)
    g = math.gcd(n.re, n.im)
    width = n.norm() // g
    u, v = np.meshgrid(np.arange(width, dtype=np.int64), np.arange(g, dtype=np.int64), indexing="ij")
    return u.ravel(), v.ravel()


def _brute_terms(n: GaussianInt):
    xr, xi = residue_system(n)
    chi = symbol_array(xr, xi, n).astype(float)
    live = chi != 0
    return xr[live], xi[live], chi[live]


def _brute_from_terms(r: GaussianInt, n: GaussianInt, xr, xi, chi) -> complex:
    N = n.norm()
    # Im(r x conj(n)) as an exact integer, reduced mod N
    a = r * n.conj()
    k = np.mod(a.re * xi + a.im * xr, N)
    phase = np.exp(2j * np.pi * k / N)
    return complex(np.sum(chi * phase))


def gauss_brute(r: IntLike, n: IntLike) -> complex:
    r, n = GaussianInt.of(r), GaussianInt.of(n)
    if not n.is_odd():
        raise EvenModulus(f"modulus {n} is even")
    return _brute_from_terms(r, n, *_brute_terms(n))


def gauss_brute_many(ks, n: IntLike) -> list[complex]:
    """gauss_brute for several r sharing one modulus (symbol values computed once)."""
    n = GaussianInt.of(n)
    if not n.is_odd():
        raise EvenModulus(f"modulus {n} is even")
    terms = _brute_terms(n)
    return [_brute_from_terms(GaussianInt.of(k), n, *terms) for k in ks]


def _valuation(k: GaussianInt, w: GaussianInt) -> tuple[float, GaussianInt]:
    if not k:
        return math.inf, k
    h = 0
    while w.divides(k):
        k = k.exact_div(w)
        h += 1
    return h, k


def _prime_power_sum(k: GaussianInt, w: GaussianInt, l: int) -> complex:
    h, rest = _valuation(k, w)
    N = w.norm()
    if l <= h:
        return 0.0 if l % 2 else float(N ** (l - 1) * (N - 1))
    if l == h + 1:
        if l % 2 == 0:
            return -float(N ** (l - 1))
        return symbol(GaussianInt(0, 1) * rest, w) * N ** (l - 0.5)
    return 0.0


def gauss_fast(r: IntLike, n: IntLike) -> complex:
    """Closed form for primary n: local prime-power table, multiplied over the factorisation."""
    r, n = GaussianInt.of(r), GaussianInt.of(n)
    if not n.is_primary():
        raise NonPrimaryModulus(f"{n} is not primary")
    value = 1.0
    for w, l in factor(n).odd_part:
        value *= _prime_power_sum(r, w, l)
        if value == 0:
            return 0.0
    return complex(value)


# Poisson summation over Z[i]

def w_gaussian(r):
    """W(r) = exp(-pi r); its transform is W~(t) = exp(-pi t^2)."""
    return np.exp(-math.pi * np.asarray(r, dtype=float))


def w_tilde_radial(W: Callable, t: float, r_max: float = 60.0) -> float:
    """W~(t) = pi int_0^inf J0(2 pi t sqrt r) W(r) dr, the radial form of the cosine integral.

    The interval is split at the zeros' spacing so each panel sees O(1)
    oscillations.
    """
    if t == 0:
        val, _ = quad(lambda r: float(W(r)), 0, r_max, epsabs=1e-14, limit=200)
        return math.pi * val
    # J0(2 pi t sqrt r) oscillates with period ~ 1/t in sqrt(r)
    edges = np.unique(np.concatenate([np.arange(0, math.sqrt(r_max), 0.5 / t), [math.sqrt(r_max)]]) ** 2)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = quad(lambda r: float(j0(2 * math.pi * t * math.sqrt(r)) * W(r)), a, b, epsabs=1e-15, limit=100)
        total += val
    return math.pi * total


@dataclass(frozen=True)
class PoissonResult:
    lhs: float
    rhs: float
    residual: float
    m_norm_cut: int
    k_norm_cut: int


def poisson_check(n: IntLike, X: float, W: Callable = w_gaussian, decay: float = math.pi, tail_tol: float = 1e-9) -> PoissonResult:
    """Both sides of sum_{m odd} (m/n) W(N(m)/X) = (X/2N(n)) ((1+i)/n) sum_k (-1)^N(k) g(k,n) W~(sqrt(N(k)X/2N(n))).

    ``decay`` is a rate with |W(r)|, |W~(sqrt r)| <= exp(-decay r); it sets both truncations.
    """
    n = GaussianInt.of(n)
    if not n.is_primary():
        raise NonPrimaryModulus(f"{n} is not primary")
    Nn = n.norm()
    # sum over a lattice of exp(-decay u) beyond u0 is about (pi/decay) * scale * exp(-decay u0)
    u0 = (math.log(max(X, 1.0) * 4 * Nn / tail_tol)) / decay
    m_cut = int(math.ceil(u0 * X))
    k_cut = int(math.ceil(u0 * 2 * Nn / X))
    if m_cut > 5 * 10**6 or k_cut > 5 * 10**6:
        raise TruncationFailure("Poisson truncation too large")

    mr, mi = _odd_arrays(m_cut)
    lhs = float(np.sum(symbol_array(mr, mi, n) * W(((mr * mr + mi * mi) / X))))

    kr, ki = _all_arrays(k_cut)
    kn = kr * kr + ki * ki
    cache: dict[int, float] = {}
    rhs_sum = 0.0
    for a, b, nk in zip(kr.tolist(), ki.tolist(), kn.tolist()):
        gk = gauss_fast(GaussianInt(a, b), n)
        if gk == 0:
            continue
        wt = cache.get(nk)
        if wt is None:
            wt = cache[nk] = w_tilde_radial(W, math.sqrt(nk * X / (2 * Nn)))
        rhs_sum += (-1) ** nk * gk.real * wt
    rhs = X / (2 * Nn) * symbol(GaussianInt(1, 1), n) * rhs_sum
    return PoissonResult(lhs, float(rhs), abs(lhs - float(rhs)), m_cut, k_cut)


def _all_arrays(norm_hi: int):
    R = math.isqrt(norm_hi)
    a, b = np.meshgrid(np.arange(-R, R + 1), np.arange(-R, R + 1), indexing="ij")
    keep = a * a + b * b <= norm_hi
    return a[keep], b[keep]


def _odd_arrays(norm_hi: int):
    a, b = _all_arrays(norm_hi)
    odd = (a + b) % 2 == 1
    return a[odd], b[odd]


def oracle_k_set(n: IntLike) -> list[GaussianInt]:
    """Test arguments: 0, 1, i, 1+i, each prime of n, their squares, and products with i, 1+i."""
    n = GaussianInt.of(n)
    base = [GaussianInt(0), GaussianInt(1), GaussianInt(0, 1), GaussianInt(1, 1)]
    primes = [w for w, _ in factor(n).odd_part] if n.norm() > 1 else []
    ks = list(base)
    prod_all = GaussianInt(1)
    for w in primes:
        prod_all = prod_all * w
        ks += [w, w * w, w * GaussianInt(0, 1), w * GaussianInt(1, 1)]
    if len(primes) > 1:
        ks += [prod_all, prod_all * GaussianInt(1, 1)]
    return list(dict.fromkeys(ks))


@dataclass(frozen=True)
class OracleSummary:
    max_norm: int
    moduli: int
    cases: int
    max_scaled_error: float
    worst: tuple[GaussianInt, GaussianInt] | None


def gauss_oracle_suite(max_norm: int = 1500) -> OracleSummary:
    """Compare gauss_fast with gauss_brute on every primary n with N(n) <= max_norm."""
    from .primary_table import primary_table

    table = primary_table(max_norm)
    rows = table.rows_upto(max_norm)
    worst, worst_err, cases = None, 0.0, 0
    for a, b, N in zip(table.re[:rows].tolist(), table.im[:rows].tolist(), table.norm[:rows].tolist()):
        n = GaussianInt(a, b)
        ks = oracle_k_set(n)
        brute = gauss_brute_many(ks, n)
        for k, gb in zip(ks, brute):
            err = abs(gauss_fast(k, n) - gb) / N
            cases += 1
            if err > worst_err:
                worst_err, worst = err, (k, n)
    return OracleSummary(max_norm, rows, cases, worst_err, worst)
