"""Mollifier for the family: xi, lambda, M(d), mollified moments and non-vanishing.

xi is supported on primary squarefree gamma with N(gamma) <= M = X^(theta/2) and
lambda is recovered from it by

    lambda(l) = sum_a mu(a) w(a) xi(l a),   w(a) = N(a) d(a) / (h(a) sigma(a)),

the inverse of xi(g) = sum_a w(a) lambda(a g).  Both tables are keyed by
(re, im) of the primary element.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DegenerateSecondMoment
from .euler import H_local, euler_constant, g1_local, g_local, h_local
from .gaussian import GaussianInt
from .lfunction import central_values
from .moments import ZETA_K_2, MomentReport, SweepData, chi_at, ordered_sum
from .primary_table import primary_table
from .weights import WeightSpec

Key = tuple[int, int]


def _local_w(N):
    """w at a prime: N d(p) / (h(p) sigma(p)) = 2N / (h(p)(N+1))."""
    return 2 * N / (h_local(N) * (N + 1))


def _local_w_exact(N: int) -> Fraction:
    N = Fraction(N)
    h = 1 + 1 / N + 1 / N**2 - 4 / (N * (N + 1))
    return 2 * N / (h * (N + 1))


@dataclass
class Support:
    """Primary squarefree elements with N <= M and their prime norms."""

    M: float
    keys: list[Key]
    norms: np.ndarray
    prime_norms: list[tuple[int, ...]]
    index: dict[Key, int] = field(repr=False)


def mollifier_support(M: float) -> Support:
    bound = int(math.floor(M))
    table = primary_table(max(bound, 1))
    rows = table.rows_upto(bound)
    sq = table.squarefree(rows)
    keys, norms, pn = [], [], []
    for r in np.flatnonzero(sq).tolist():
        keys.append((int(table.re[r]), int(table.im[r])))
        norms.append(int(table.norm[r]))
        ps = table.fac_prime[r][table.fac_exp[r] > 0]
        pn.append(tuple(int(table.prime_norm[p]) for p in ps))
    return Support(M, keys, np.array(norms, dtype=np.int64), pn, {k: i for i, k in enumerate(keys)})


def _mul(a: Key, b: Key) -> Key:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _products(sup: Support):
    """Yield (l index, a index, la index) for every pair with la squarefree in the support."""
    for i, l in enumerate(sup.keys):
        room = sup.M / sup.norms[i]
        for k in range(len(sup.keys)):
            if sup.norms[k] > room:
                break
            j = sup.index.get(_mul(l, sup.keys[k]))
            if j is not None:
                yield i, k, j


def invert_xi(sup: Support, xi: list, exact: bool = False) -> list:
    """lambda(l) = sum_a mu(a) w(a) xi(la)."""
    if exact:
        w = [math.prod((_local_w_exact(N) for N in pn), start=Fraction(1)) for pn in sup.prime_norms]
        lam = [Fraction(0)] * len(xi)
    else:
        w = [float(np.prod(_local_w(np.array(pn, dtype=float)))) if pn else 1.0 for pn in sup.prime_norms]
        lam = [0.0] * len(xi)
    mu = [(-1) ** len(pn) for pn in sup.prime_norms]
    for i, k, j in _products(sup):
        lam[i] += mu[k] * w[k] * xi[j]
    return lam


def recover_xi(sup: Support, lam: list, exact: bool = False) -> list:
    """xi(g) = sum_a w(a) lambda(a g): the forward map, used to check the inversion."""
    if exact:
        w = [math.prod((_local_w_exact(N) for N in pn), start=Fraction(1)) for pn in sup.prime_norms]
        xi = [Fraction(0)] * len(lam)
    else:
        w = [float(np.prod(_local_w(np.array(pn, dtype=float)))) if pn else 1.0 for pn in sup.prime_norms]
        xi = [0.0] * len(lam)
    for i, k, j in _products(sup):
        xi[i] += w[k] * lam[j]
    return xi


def xi_shape_exact(sup: Support) -> list[Fraction]:
    """The rational part h g1 / (N H) of xi, exactly."""
    from .euler import _H_exact, _g1_exact, _h_exact

    out = []
    for N, pn in zip(sup.norms.tolist(), sup.prime_norms):
        v = Fraction(1, N)
        for q in pn:
            v *= _h_exact(q) * _g1_exact(q) / _H_exact(q)
        out.append(v)
    return out


@dataclass
class MollifierParams:
    X: float
    theta: float
    M: float
    support: Support = field(repr=False)
    xi: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)

    @property
    def lambda_table(self) -> dict[Key, float]:
        return dict(zip(self.support.keys, self.lam.tolist()))

    @property
    def xi_table(self) -> dict[Key, float]:
        return dict(zip(self.support.keys, self.xi.tolist()))

    def export_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh)
            out.writerow(["l_re", "l_im", "norm", "lambda", "xi"])
            for (a, b), N, lam, xi in zip(self.support.keys, self.support.norms.tolist(), self.lam.tolist(), self.xi.tolist()):
                out.writerow([a, b, N, repr(lam), repr(xi)])


def build_mollifier(X: float, theta: float) -> MollifierParams:
    if not 0.2 < theta < 0.95:
        raise ValueError("theta must lie in (0.2, 0.95)")
    M = X ** (theta / 2)
    if M < 3:
        raise ValueError(f"M = {M:.3g} is below 3")
    sup = mollifier_support(M)
    C, D = euler_constant("C"), euler_constant("D")
    logM = math.log(M)
    shape = np.array([
        float(np.prod([h_local(q) * g1_local(q) / H_local(q) for q in pn])) if pn else 1.0
        for pn in sup.prime_norms
    ]) / sup.norms
    xi = C / (D * logM**3) * shape * np.log(math.sqrt(X) * sup.norms)
    lam = np.array(invert_xi(sup, xi.tolist()))
    return MollifierParams(X, theta, M, sup, xi, lam)


def inversion_check(M: float) -> tuple[bool, int]:
    """Exact xi -> lambda -> xi round trip on the rational xi shape; returns (exact, support size)."""
    sup = mollifier_support(M)
    xi = xi_shape_exact(sup)
    back = recover_xi(sup, invert_xi(sup, xi, exact=True), exact=True)
    return back == xi, len(xi)


def lambda_decay(p: MollifierParams, power: float = 0.9) -> float:
    """max N(l)^power |lambda(l)| over the table."""
    return float(np.max(p.support.norms**power * np.abs(p.lam)))


def xi_envelope(p: MollifierParams, const: float = 8.0) -> tuple[float, float]:
    """Envelope ratios for N(g) log^2 M |xi(g)|.

    The logarithmic factor (C/D) log(sqrt X N(g)) / log M is divided out first, leaving
    prod_{w | g} |h g1 / H|(w), which must lie between prod(1 - const/N(w)) and
    prod(1 + const/N(w)).  Returns (min of value/lower, max of value/upper); the
    bound holds when the first is >= 1 and the second <= 1.
    """
    logM = math.log(p.M)
    C, D = euler_constant("C"), euler_constant("D")
    log_part = C / D * np.log(math.sqrt(p.X) * p.support.norms) / logM
    scaled = p.support.norms * logM**2 * np.abs(p.xi) / log_part
    up = np.array([math.prod(1 + const / q for q in pn) for pn in p.support.prime_norms])
    lo = np.array([math.prod(max(1 - const / q, 0.0) for q in pn) for pn in p.support.prime_norms])
    ok_lo = lo > 0
    lower = float(np.min(scaled[ok_lo] / lo[ok_lo])) if ok_lo.any() else math.inf
    return lower, float(np.max(scaled / up))


def mollifier_values(p: MollifierParams, data: SweepData) -> np.ndarray:
    """M(d) = sum_l lambda(l) sqrt(N(l)) chi_{(1+i)^5 d}(l) for every d of the sweep."""
    out = np.zeros(len(data))
    for (a, b), N, lam in zip(p.support.keys, p.support.norms.tolist(), p.lam.tolist()):
        out += lam * math.sqrt(N) * chi_at(data, GaussianInt(a, b))
    return out


def predicted_first(theta: float, w: WeightSpec, prefactor: str = "(pi/4)^2") -> float:
    base = 2 / 9 * ((1 + 1 / theta) ** 3 - 1 / theta**3) * 2 * math.pi * w.mass / (3 * ZETA_K_2)
    return base * ((math.pi / 4) ** 2 if prefactor == "(pi/4)^2" else math.pi**2 / 4)


def predicted_second(theta: float, w: WeightSpec) -> float:
    t = theta
    poly = 4 / 81 + 8 / (27 * t) + 20 / (27 * t**2) + 76 / (81 * t**3) + 16 / (27 * t**4) + 4 / (27 * t**5)
    return (math.pi / 4) ** 4 * poly * 2 * math.pi * w.mass / (3 * ZETA_K_2)


def predicted_first_finite(p: MollifierParams, w: WeightSpec, C2: float) -> float:
    """(pi^2/4) C Phi-hat(1)/zeta_K(2) sum_l lambda(l)/g(l) (log(sqrt X / N(l)) + C2), from the twisted first moment."""
    g = np.array([float(np.prod(g_local(np.array(pn, dtype=float)))) if pn else 1.0 for pn in p.support.prime_norms])
    s = np.sum(p.lam / g * (np.log(math.sqrt(p.X) / p.support.norms) + C2))
    return math.pi**2 / 4 * euler_constant("C") * w.mass / ZETA_K_2 * float(s)


@dataclass(frozen=True)
class MollifiedReport:
    report: MomentReport
    predicted_alt: float | None  # first moment with the pi^2/4 prefactor
    predicted_finite: float | None


def mollified_moment(p: MollifierParams, j: int, data: SweepData, w: WeightSpec, C2: float | None = None, mvals: np.ndarray | None = None) -> MollifiedReport:
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    mvals = mollifier_values(p, data) if mvals is None else mvals
    emp = ordered_sum((data.values * mvals) ** j * data.weight) / data.X
    if j == 1:
        pred = predicted_first(p.theta, w)
        alt = predicted_first(p.theta, w, "pi^2/4")
        fin = predicted_first_finite(p, w, C2) if C2 is not None else None
    else:
        pred, alt, fin = predicted_second(p.theta, w), None, None
    rep = MomentReport(data.X, j, len(data), emp, pred, abs(emp - pred) / abs(pred), data.runtime_s)
    return MollifiedReport(rep, alt, fin)


@dataclass(frozen=True)
class NonvanishingReport:
    cs_bound: float
    cs_predicted: float
    empirical_proportion: float
    count: int
    rechecked: int
    S1: float
    S2: float


def nonvanishing_report(p: MollifierParams, data: SweepData, w: WeightSpec, threshold: float = 1e-8, recheck: Callable | None = None) -> NonvanishingReport:
    mvals = mollifier_values(p, data)
    S1 = mollified_moment(p, 1, data, w, mvals=mvals).report.empirical
    S2 = mollified_moment(p, 2, data, w, mvals=mvals).report.empirical
    if S2 <= 0:
        raise DegenerateSecondMoment(f"second mollified moment {S2}")
    count_w = ordered_sum(data.weight) / data.X
    cs = S1 * S1 / (S2 * count_w)
    small = np.flatnonzero(np.abs(data.values) <= threshold)
    zeros = 0
    if small.size:
        recheck = recheck or (lambda re, im: central_values(re, im, cutoff_scale=2.0)[0])
        again = recheck(data.d_re[small], data.d_im[small])
        zeros = int(np.sum(np.abs(again) <= threshold))
    prop = 1 - zeros / len(data)
    return NonvanishingReport(cs, 1 - 1 / (p.theta + 1) ** 3, prop, len(data), int(small.size), S1, S2)
