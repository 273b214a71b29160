"""Gamma, zeta_K and the archimedean factors of the approximate functional equation.

``V_tuple`` evaluates

    V(t) = (1 / 2 pi i) * integral over Re(s) = c of  G(s)/s * prod_i g_{a_i}(s) * t^(-s) ds,

    g_a(s) = (2^(5/2)/pi)^s * Gamma(1/2 + a + s) / Gamma(1/2 + a),

by Gauss-Legendre panels on a truncated vertical line.  For t < 1 the
contour is moved left of s = 0 and the residue 1 is added back, which
avoids cancellation between a huge integrand and a result near 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import PoleAt, QuadratureNonConvergent
from .gaussian import GaussianInt, IntLike, factor

LOG_2PI_HALF = 0.5 * math.log(2 * math.pi)
ARCH_SCALE = 2**2.5 / math.pi
LOG_ARCH_SCALE = math.log(ARCH_SCALE)

_LANCZOS_G = 7.0
_LANCZOS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)


def _is_nonpositive_integer(s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    return (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real))


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    z = z - 1
    x = np.full(z.shape, _LANCZOS[0], dtype=complex)
    for k in range(1, len(_LANCZOS)):
        x = x + _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return LOG_2PI_HALF + (z + 0.5) * np.log(t) - t + np.log(x)


def loggamma(s):
    """A logarithm of Gamma(s) (branch unspecified; exp of it is exact)."""
    s = np.asarray(s, dtype=complex)
    if _is_nonpositive_integer(s).any():
        raise PoleAt(f"Gamma has a pole at {s[_is_nonpositive_integer(s)].ravel()[0].real:g}")
    left = s.real < 0.5
    out = np.empty(s.shape, dtype=complex)
    out[~left] = _loggamma_right(s[~left])
    if left.any():
        z = s[left]
        # reflection; log(sin) written to avoid overflow at large |Im z|
        out[left] = math.log(math.pi) - _log_sin_pi(z) - _loggamma_right(1 - z)
    return out if out.ndim else complex(out)


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; factor out the dominant exponential
    w = 1j * math.pi * z
    big = w.real >= 0
    dom = np.where(big, w, -w)
    rest = 1 - np.exp(-2 * dom)
    sign = np.where(big, 1.0, -1.0)
    return dom + np.log(rest * sign / 2j)


def gamma_complex(s):
    out = np.exp(loggamma(s))
    return complex(out) if np.ndim(out) == 0 else out


def _expm1_complex(w: complex) -> complex:
    if abs(w) < 1e-3:
        return w * (1 + w / 2 * (1 + w / 3 * (1 + w / 4 * (1 + w / 5))))
    return cmath.exp(w) - 1


@lru_cache(maxsize=64)
def _cvz_weights(n: int) -> np.ndarray:
    """Cohen-Rodriguez Villegas-Zagier weights: sum (-1)^k a_k ~ sum w_k a_k."""
    d = (3 + math.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b, c = -1.0, -d
    w = np.empty(n)
    for k in range(n):
        c = b - c
        w[k] = c / d
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1))
    return w


def _alternating(s: complex, first: int, step: int) -> complex:
    n = 50 + int(abs(s.imag)) + int(max(0.0, -s.real) * 10)
    k = np.arange(n)
    terms = np.exp(-s * np.log(first + step * k))
    return complex(np.dot(_cvz_weights(n), terms))


def dirichlet_eta(s: complex) -> complex:
    return _alternating(complex(s), 1, 1)


def riemann_zeta(s: complex) -> complex:
    s = complex(s)
    if s == 1:
        raise PoleAt("zeta has a pole at s = 1")
    return dirichlet_eta(s) / -_expm1_complex((1 - s) * math.log(2))


def dirichlet_beta(s: complex) -> complex:
    """L(s, chi_4) for the non-trivial character modulo 4."""
    return _alternating(complex(s), 1, 2)


def zeta_K(s: complex) -> complex:
    """Dedekind zeta of Q(i): zeta(s) * beta(s)."""
    s = complex(s)
    if s == 1:
        raise PoleAt("zeta_K has a pole at s = 1")
    return riemann_zeta(s) * dirichlet_beta(s)


def zeta_K_residue_probe(h: float) -> complex:
    """(s - 1) zeta_K(s) at s = 1 + h, computed without cancellation."""
    s = 1 + h
    return dirichlet_eta(s) * h / -_expm1_complex(-h * math.log(2)) * dirichlet_beta(s)


def local_prime_norms(l: IntLike) -> list[int]:
    """Norms of the distinct prime ideals dividing l, (1+i) included."""
    f = factor(l)
    norms = [2] if f.two_exp else []
    return norms + [p.norm() for p, _ in f.odd_part]


def zeta_K_l(s: complex, l: IntLike) -> complex:
    s = complex(s)
    value = zeta_K(s)
    for q in local_prime_norms(l):
        value *= 1 - q ** (-s)
    return value


def zeta_K_2(s: complex) -> complex:
    return zeta_K_l(s, GaussianInt(1, 1))


def Gamma_alpha(alpha: complex) -> complex:  # noqa: N802
    """(32/pi^2)^(-a) Gamma(1/2 - a) / Gamma(1/2 + a)."""
    a = complex(alpha)
    lg = loggamma(np.array([0.5 - a, 0.5 + a]))
    return complex(np.exp(-a * math.log(32 / math.pi**2) + lg[0] - lg[1]))


def g_alpha(s, alpha: complex):
    s = np.asarray(s, dtype=complex)
    a = complex(alpha)
    out = np.exp(s * LOG_ARCH_SCALE + loggamma(0.5 + a + s) - loggamma(0.5 + a))
    return complex(out) if out.ndim == 0 else out


def g_tuple(s, shifts: Sequence[complex]):
    s = np.asarray(s, dtype=complex)
    out = np.ones(s.shape, dtype=complex)
    for a in shifts:
        out = out * g_alpha(s, a)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ShiftTuple:
    shifts: tuple[complex, ...]

    def __post_init__(self):
        if not 1 <= len(self.shifts) <= 3:
            raise ValueError("a shift tuple holds 1 to 3 shifts")
        if any(abs(complex(a).real) >= 0.25 for a in self.shifts):
            raise ValueError("shifts must satisfy |Re(a)| < 1/4")

    @staticmethod
    def of(shifts) -> ShiftTuple:
        if isinstance(shifts, ShiftTuple):
            return shifts
        if np.ndim(shifts) == 0:
            shifts = (shifts,)
        return ShiftTuple(tuple(complex(a) for a in shifts))

    def __len__(self) -> int:
        return len(self.shifts)

    def negated(self) -> ShiftTuple:
        return ShiftTuple(tuple(-a for a in self.shifts))

    @property
    def is_real(self) -> bool:
        return all(a.imag == 0 for a in self.shifts)


@dataclass(frozen=True)
class CutoffG:
    """Entire even G with G(0) = 1; ``width = None`` means G = 1, else exp(s^2 / width)."""

    width: float | None = None

    def log(self, s: np.ndarray) -> np.ndarray:
        if self.width is None:
            return np.zeros(np.shape(s), dtype=complex)
        return np.asarray(s, dtype=complex) ** 2 / self.width

    def __call__(self, s):
        return np.exp(self.log(s))

    @property
    def tag(self) -> str:
        return "one" if self.width is None else f"gauss{self.width:g}"


G_ONE = CutoffG()

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _log_integrand_abs(tau: np.ndarray, c: float, shifts: ShiftTuple, G: CutoffG) -> np.ndarray:
    s = c + 1j * tau
    val = np.real(G.log(s)) - np.log(np.abs(s)) + c * LOG_ARCH_SCALE * len(shifts)
    for a in shifts.shifts:
        val = val + np.real(loggamma(0.5 + a + s) - loggamma(0.5 + a))
    return val


def truncation_height(c: float, shifts: ShiftTuple, G: CutoffG, drop: float = 42.0, tmax: float = 4000.0) -> float:
    """Smallest T beyond which the integrand is e^-drop below its peak (Stirling decay)."""
    tau = np.arange(0.0, tmax + 1.0, 0.5)
    logs = _log_integrand_abs(tau, c, shifts, G)
    peak = logs.max()
    above = np.flatnonzero(logs > peak - drop)
    if above[-1] >= tau.size - 1:
        raise QuadratureNonConvergent(f"integrand not decayed by |Im s| = {tmax}")
    return float(tau[above[-1] + 1])


def _line_integral(t: np.ndarray, c: float, shifts: ShiftTuple, G: CutoffG) -> np.ndarray:
    """(1/2 pi i) int_{(c)} G(s)/s g(s) t^-s ds for an array of t."""
    T = truncation_height(c, shifts, G)
    logt = np.log(t)
    freq = float(np.max(np.abs(logt))) if logt.size else 0.0
    width = min(1.0, 6.0 / (freq + 1.0))
    n_panels = int(math.ceil(2 * T / width))
    edges = np.linspace(-T, T, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    tau = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    s = c + 1j * tau
    base = G.log(s) - np.log(s)
    for a in shifts.shifts:
        base = base + s * LOG_ARCH_SCALE + loggamma(0.5 + a + s) - loggamma(0.5 + a)
    out = np.empty(t.shape, dtype=complex)
    chunk = max(1, 4_000_000 // max(tau.size, 1))
    for i in range(0, t.size, chunk):
        lt = logt[i : i + chunk]
        integrand = np.exp(base[None, :] - s[None, :] * lt[:, None])
        out[i : i + chunk] = integrand @ wts / (2 * math.pi)
    return out


def _left_line(shifts: ShiftTuple) -> float:
    # halfway between s = 0 and the rightmost Gamma pole at -1/2 - Re(a)
    gap = 0.5 + min(a.real for a in shifts.shifts)
    return -0.5 * gap


def V_tuple(t, shifts, G: CutoffG = G_ONE, c: float | None = None):  # noqa: N802
    """The AFE cutoff function; vectorised over t > 0.

    With ``c`` omitted the line Re(s) = 2 is used for t >= 1 and a line
    left of 0 (plus the residue at s = 0) for t < 1.  A negative ``c``
    always adds the residue.
    """
    shifts = ShiftTuple.of(shifts)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if (t_arr <= 0).any():
        raise ValueError("V is defined for t > 0")
    out = np.empty(t_arr.shape, dtype=complex)
    if c is None:
        right = t_arr >= 1
        groups = [(right, 2.0), (~right, _left_line(shifts))]
    else:
        groups = [(np.ones(t_arr.shape, dtype=bool), float(c))]
    for mask, line in groups:
        if not mask.any():
            continue
        vals = _line_integral(t_arr[mask], line, shifts, G)
        if line < 0:
            vals = vals + 1.0
        out[mask] = vals
    if np.ndim(t) == 0:
        return complex(out[0])
    return out


def V_bound_constant(A: float, shifts, G: CutoffG = G_ONE) -> float:
    """C_A with |V(t)| <= C_A t^-A, from the integrand modulus on Re(s) = A."""
    shifts = ShiftTuple.of(shifts)
    T = truncation_height(A, shifts, G)
    tau = np.linspace(-T, T, 20001)
    mod = np.exp(_log_integrand_abs(tau, A, shifts, G))
    return float(np.trapezoid(mod, tau) / (2 * math.pi))


class VGrid:
    """Cubic-spline memo of V on a log-spaced grid, for fast repeated evaluation.

    The grid extends right until |V| < ``v_tol`` so :attr:`t_cut` gives
    the truncation point for Dirichlet sums weighted by V.
    """

    def __init__(self, shifts, G: CutoffG = G_ONE, t_min: float = 1e-7, step: float = 0.01, v_tol: float = 1e-14):
        self.shifts = ShiftTuple.of(shifts)
        self.G = G
        self.t_min = t_min
        self.step = step
        self.v_tol = v_tol
        t_max = 64.0 ** len(self.shifts)
        while True:
            u = np.arange(math.log(t_min), math.log(t_max) + step, step)
            vals = V_tuple(np.exp(u), self.shifts, G)
            small = np.abs(vals) < v_tol
            # need a decayed stretch at the end of the grid
            if small[-max(10, int(1 / step)) :].all():
                break
            t_max *= 4
            if t_max > 1e12:
                raise QuadratureNonConvergent("V does not decay below tolerance")
        last_big = np.flatnonzero(~small)
        self.t_cut = float(np.exp(u[last_big[-1] + 1])) if last_big.size else t_min
        self.u = u
        self.values = vals
        self.t_max = float(np.exp(u[-1]))
        self._re = CubicSpline(u, vals.real)
        self._im = CubicSpline(u, vals.imag) if not self.real else None

    @property
    def real(self) -> bool:
        return self.shifts.is_real

    def __call__(self, t):
        return self.at_log(np.log(np.asarray(t, dtype=float)))

    def at_log(self, logt):
        logt = np.asarray(logt, dtype=float)
        if (logt < self.u[0] - 1e-12).any():
            raise ValueError(f"t below grid minimum {self.t_min}")
        out = np.where(logt > self.u[-1], 0.0, self._re(np.minimum(logt, self.u[-1])))
        if self._im is None:
            return out
        return out + 1j * np.where(logt > self.u[-1], 0.0, self._im(np.minimum(logt, self.u[-1])))


@lru_cache(maxsize=32)
def v_grid(shifts: tuple[complex, ...], G: CutoffG = G_ONE) -> VGrid:
    return VGrid(shifts, G)


def archimedean_identity_sides(u: complex) -> tuple[complex, complex]:
    """Both sides of (2^(1-u) - 1) zeta_K(u) Gamma(u/2)/Gamma(1-u/2) = (4/pi)(pi^2/2)^(u/2) Gamma_{u/2} zeta_{K,2}(1-u)."""
    u = complex(u)
    lg = loggamma(np.array([u / 2, 1 - u / 2]))
    lhs = (2 ** (1 - u) - 1) * zeta_K(u) * complex(np.exp(lg[0] - lg[1]))
    rhs = 4 / math.pi * (math.pi**2 / 2) ** (u / 2) * Gamma_alpha(u / 2) * zeta_K_2(1 - u)
    return lhs, rhs


def g_identity_sides(s: complex, alpha: complex) -> tuple[complex, complex]:
    """g_{-a}(-s) Gamma_{-a-s} Gamma_a versus g_a(s)."""
    s, a = complex(s), complex(alpha)
    return g_alpha(-s, -a) * Gamma_alpha(-a - s) * Gamma_alpha(a), g_alpha(s, a)

