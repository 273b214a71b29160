"""Central values L(1/2 + a, chi_{(1+i)^5 d}) from the approximate functional equation.

For j = 1 and N(d) = D,

    L(1/2 + a) = sum_n chi(n) N(n)^(-1/2-a) V_a(N(n)/sqrt D)
               + D^(-a) Gamma_a sum_n chi(n) N(n)^(-1/2+a) V_{-a}(N(n)/sqrt D),

summed over primary n.  The j-fold version for L(1/2)^j uses the j-fold
divisor function and V over the zero j-tuple with argument N(n)/D^(j/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TableTooSmall
from .gaussian import GaussianInt, IntLike
from .primary_table import PrimaryTable, primary_table
from .special import G_ONE, CutoffG, Gamma_alpha, VGrid, v_grid
from .symbol import CONDUCTOR_2PART, prime_character_values

# density of primary n: #{N(n) <= x} ~ (pi/8) x
_PRIMARY_DENSITY = math.pi / 8
DEFAULT_TAIL_TOL = 1e-11


@dataclass(frozen=True)
class LValueRecord:
    d: GaussianInt
    shift: complex
    value: complex
    cutoff_norm: int
    g_choice: str
    tolerance: float


def _tail_profile(grid: VGrid, j: int) -> tuple[np.ndarray, np.ndarray]:
    """u and the bound on int_u^inf x^(-1/2) (1 + log x)^(j-1) |V(x)| dx on the grid."""
    u = np.exp(grid.u)
    f = np.abs(grid.values) * u ** -0.5 * np.maximum(1.0, 1 + grid.u) ** (j - 1) * u  # d(log u)
    cum = np.concatenate([np.cumsum((0.5 * (f[1:] + f[:-1]) * grid.step)[::-1])[::-1], [0.0]])
    return u, cum


def cutoff_norm(norm_d: float, grids: list[VGrid], j: int = 1, tol: float = DEFAULT_TAIL_TOL, scale: float = 1.0) -> int:
    """Norm bound for the n-sums so the dropped V-tail is below ``tol``.

    With s = N(d)^(j/2) the tail is about (pi/8) sqrt(s) int_{T/s}^inf x^(-1/2) |V(x)| dx
    (a divisor-function allowance is folded in for j > 1).
    """
    s = float(norm_d) ** (j / 2)
    u_cut = 0.0
    for g in grids:
        u, cum = _tail_profile(g, j)
        need = tol / (_PRIMARY_DENSITY * math.sqrt(s) * (1 + math.log(max(s, 1.0))) ** (j - 1))
        idx = int(np.searchsorted(-cum, -need))  # first index with cum <= need
        u_cut = max(u_cut, float(u[min(idx, u.size - 1)]))
    return max(1, int(math.ceil(scale * u_cut * s)))


def _check_table(table: PrimaryTable | None, cutoff: int) -> PrimaryTable:
    if table is None:
        return primary_table(int(cutoff))
    if table.cutoff < cutoff:
        raise TableTooSmall(f"table covers norms <= {table.cutoff}, need {cutoff}")
    return table


def _chi_rows(table: PrimaryTable, d_re, d_im, rows: int) -> np.ndarray:
    """chi_{(1+i)^5 d}(n) for the first ``rows`` table entries, batched over d."""
    c = CONDUCTOR_2PART
    d_re = np.asarray(d_re, dtype=np.int64)
    d_im = np.asarray(d_im, dtype=np.int64)
    c_re = c.re * d_re - c.im * d_im
    c_im = c.re * d_im + c.im * d_re
    top = float(table.norm[rows - 1]) if rows else 1.0
    k = int(np.searchsorted(table.prime_norm, top, side="right"))
    pv = prime_character_values(table, c_re, c_im, k)
    return table.completely_multiplicative(pv, upto=rows)


def afe_value(
    d: IntLike,
    shift: complex = 0.0,
    G: CutoffG = G_ONE,
    table: PrimaryTable | None = None,
    cutoff_scale: float = 1.0,
    tol: float = DEFAULT_TAIL_TOL,
) -> LValueRecord:
    d = GaussianInt.of(d)
    if not d.is_odd():
        raise ValueError(f"{d} is even")
    a = complex(shift)
    D = d.norm()
    g_plus = v_grid((a,), G)
    g_minus = v_grid((-a,), G) if a != 0 else g_plus
    cutoff = cutoff_norm(D, [g_plus, g_minus], 1, tol, cutoff_scale)
    table = _check_table(table, cutoff)
    rows = table.rows_upto(cutoff)
    chi = _chi_rows(table, d.re, d.im, rows).astype(float)
    N = table.norm[:rows].astype(float)
    logt = np.log(N) - 0.5 * math.log(D)
    first = np.sum(chi * N ** (-0.5 - a) * g_plus.at_log(logt))
    if a == 0:
        value = 2 * first
    else:
        second = np.sum(chi * N ** (-0.5 + a) * g_minus.at_log(logt))
        value = first + D ** (-a) * Gamma_alpha(a) * second
    return LValueRecord(d, a, complex(value), cutoff, G.tag, tol)


def central_values(
    d_re: np.ndarray,
    d_im: np.ndarray,
    G: CutoffG = G_ONE,
    cutoff_scale: float = 1.0,
    tol: float = DEFAULT_TAIL_TOL,
    batch: int = 128,
) -> tuple[np.ndarray, np.ndarray]:
    """L(1/2, chi_{(1+i)^5 d}) for many d; returns (values, cutoff norms).

    Each value is summed over its own prefix of the n-table, so the result
    for a given d does not depend on which other d share its batch.
    """
    d_re = np.asarray(d_re, dtype=np.int64)
    d_im = np.asarray(d_im, dtype=np.int64)
    if d_re.size == 0:
        return np.empty(0), np.empty(0, dtype=np.int64)
    grid = v_grid((0j,), G)
    norms = d_re * d_re + d_im * d_im
    uniq = np.unique(norms)
    cut_of = {int(D): cutoff_norm(int(D), [grid], 1, tol, cutoff_scale) for D in uniq}
    cutoffs = np.array([cut_of[int(D)] for D in norms], dtype=np.int64)
    table = primary_table(int(cutoffs.max()))
    N = table.norm[: table.rows_upto(int(cutoffs.max()))].astype(float)
    weight_of: dict[int, np.ndarray] = {}
    values = np.empty(d_re.size)
    for lo in range(0, d_re.size, batch):
        hi = min(lo + batch, d_re.size)
        rows_max = table.rows_upto(int(cutoffs[lo:hi].max()))
        chi = _chi_rows(table, d_re[lo:hi], d_im[lo:hi], rows_max)
        for b in range(hi - lo):
            D = int(norms[lo + b])
            w = weight_of.get(D)
            if w is None:
                r = table.rows_upto(cut_of[D])
                n = N[:r]
                w = weight_of[D] = 2 * n**-0.5 * grid.at_log(np.log(n) - 0.5 * math.log(D))
            values[lo + b] = float(np.sum(chi[b, : w.size] * w))
    return values, cutoffs


def _divisor_power_sum(table: PrimaryTable, d: GaussianInt, j: int, tol: float, cutoff_scale: float) -> tuple[float, int]:
    grid = v_grid((0j,) * j, G_ONE)
    D = d.norm()
    cutoff = cutoff_norm(D, [grid], j, tol, cutoff_scale)
    table = _check_table(table, cutoff)
    rows = table.rows_upto(cutoff)
    chi = _chi_rows(table, d.re, d.im, rows).astype(float)
    N = table.norm[:rows].astype(float)
    dj = table.divisor_count(j, upto=rows)
    v = grid.at_log(np.log(N) - 0.5 * j * math.log(D))
    return float(2 * np.sum(chi * dj * N**-0.5 * v)), cutoff


def afe_power(d: IntLike, j: int, table: PrimaryTable | None = None, tol: float = DEFAULT_TAIL_TOL, cutoff_scale: float = 1.0) -> float:
    """L(1/2)^j from the j-fold approximate functional equation."""
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    return _divisor_power_sum(table, GaussianInt.of(d), j, tol, cutoff_scale)[0]


def tuple_consistency(d: IntLike, j: int, table: PrimaryTable | None = None) -> float:
    """|AFE_j - AFE_1^j| at zero shifts."""
    d = GaussianInt.of(d)
    single = afe_value(d).value.real
    return abs(afe_power(d, j, table) - single**j)


def series_vs_euler_at2(d: IntLike, cutoff: int = 10**6) -> float:
    """|sum chi(n) N(n)^-2 - prod (1 - chi(w) N(w)^-2)^-1|, both truncated at norm ``cutoff``."""
    d = GaussianInt.of(d)
    table = primary_table(int(cutoff))
    rows = table.rows_upto(cutoff)
    chi = _chi_rows(table, d.re, d.im, rows).astype(float)
    N = table.norm[:rows].astype(float)
    series = math.fsum(chi * N**-2.0)
    k = int(np.searchsorted(table.prime_norm, cutoff, side="right"))
    chi_p = chi[table.prime_rows[:k]]
    Np = table.prime_norm[:k].astype(float)
    euler = math.exp(-math.fsum(np.log1p(-chi_p * Np**-2.0)))
    return abs(series - euler)
