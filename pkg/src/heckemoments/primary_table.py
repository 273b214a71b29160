"""Vectorised table of primary Gaussian integers up to a norm bound.

Every primary n with N(n) <= cutoff gets a row, ordered by (norm, re, im);
row 0 is n = 1.  The table stores each row's factorisation as padded
columns of (prime index, exponent), so any multiplicative function can be
evaluated over the whole table with a handful of numpy gathers.
"""

from __future__ import annotations

from math import comb, isqrt

import numpy as np

from ._sieve import prime_mask


def primary_mask(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    """a+bi is primary iff (a, b) = (1, 0) or (3, 2) mod 4."""
    a, b = np.mod(re, 4), np.mod(im, 4)
    return ((a == 1) & (b == 0)) | ((a == 3) & (b == 2))


class PrimaryTable:
    """Primary elements of norm at most ``cutoff`` with their factorisations."""

    def __init__(self, cutoff: int):
        self.cutoff = cutoff = max(int(cutoff), 1)
        R = isqrt(cutoff)
        self._R = R
        self._width = 2 * R + 1
        res, ims = [], []
        for a in range(-R + (R + 1) % 2, R + 1, 2):
            bmax = isqrt(cutoff - a * a)
            r = 0 if a % 4 == 1 else 2
            lo = -bmax + (r + bmax) % 4
            b = np.arange(lo, bmax + 1, 4, dtype=np.int64)
            res.append(np.full(b.size, a, dtype=np.int64))
            ims.append(b)
        a, b = np.concatenate(res), np.concatenate(ims)
        n = a * a + b * b
        order = np.lexsort((b, a, n))
        self.re, self.im, self.norm = a[order], b[order], n[order]
        self.size = int(self.norm.size)
        keys = self._key(self.re, self.im)
        self._key_order = np.argsort(keys)
        self._keys_sorted = keys[self._key_order]

        pmask = prime_mask(cutoff)
        is_prime = pmask[self.norm] | ((self.im == 0) & (self.re < 0) & (np.mod(-self.re, 4) == 3) & pmask[np.abs(self.re)])
        self.prime_rows = np.flatnonzero(is_prime)
        self.n_primes = int(self.prime_rows.size)
        prime_index = np.full(self.size, -1, dtype=np.int64)
        prime_index[self.prime_rows] = np.arange(self.n_primes)

        spf = np.full(self.size, -1, dtype=np.int64)
        cof = np.zeros(self.size, dtype=np.int64)
        spf[self.prime_rows] = self.prime_rows
        for row in self.prime_rows:
            pn = int(self.norm[row])
            if pn * pn > cutoff:
                break
            hi = int(np.searchsorted(self.norm, cutoff // pn, side="right"))
            ks = np.arange(1, hi)
            pr, pi = int(self.re[row]), int(self.im[row])
            mre = pr * self.re[ks] - pi * self.im[ks]
            mim = pr * self.im[ks] + pi * self.re[ks]
            idx = self.index_of(mre, mim)
            fresh = spf[idx] < 0
            spf[idx[fresh]] = row
            cof[idx[fresh]] = ks[fresh]

        # exponent of the smallest prime and the cofactor with it removed
        exp = np.ones(self.size, dtype=np.int64)
        rest = cof.copy()
        exp[0], rest[0] = 0, 0
        while True:
            same = (spf[cof] == spf) & (cof > 0)
            new_exp = np.where(same, exp[cof] + 1, exp)
            new_exp[0] = 0
            new_rest = np.where(same, rest[cof], cof)
            new_rest[0] = 0
            if np.array_equal(new_exp, exp) and np.array_equal(new_rest, rest):
                break
            exp, rest = new_exp, new_rest

        cols_p = [np.where(spf >= 0, prime_index[np.maximum(spf, 0)], -1)]
        cols_e = [exp]
        while True:
            nxt_p = cols_p[-1][rest]
            nxt_e = cols_e[-1][rest]
            if (nxt_p < 0).all():
                break
            cols_p.append(nxt_p)
            cols_e.append(nxt_e)
        fac_prime = np.stack(cols_p, axis=1)
        fac_exp = np.stack(cols_e, axis=1)
        fac_exp[fac_prime < 0] = 0
        fac_prime[fac_prime < 0] = -1
        self.fac_prime = fac_prime.astype(np.int32)
        self.fac_exp = fac_exp.astype(np.int8)

        pr = self.prime_rows
        self.prime_re = self.re[pr]
        self.prime_im = self.im[pr]
        self.prime_norm = self.norm[pr]
        self.prime_inert = self.prime_im == 0
        self.prime_p = np.where(self.prime_inert, -self.prime_re, self.prime_norm)
        # image of i in Z[i]/(w) = F_p for split primes w = x + yi: i = -x/y mod p
        rho = np.zeros(self.n_primes, dtype=np.int64)
        for k in np.flatnonzero(~self.prime_inert):
            p = int(self.prime_p[k])
            rho[k] = (-int(self.prime_re[k]) * pow(int(self.prime_im[k]), -1, p)) % p
        self.prime_rho = rho

    def _key(self, re: np.ndarray, im: np.ndarray) -> np.ndarray:
        return (np.asarray(re) + self._R) * self._width + (np.asarray(im) + self._R)

    def index_of(self, re, im) -> np.ndarray:
        """Row indices of primary elements given by coordinates (must be present)."""
        keys = self._key(re, im)
        pos = np.searchsorted(self._keys_sorted, keys)
        pos = np.minimum(pos, self.size - 1)
        if not np.array_equal(self._keys_sorted[pos], keys):
            raise KeyError("element not in table")
        return self._key_order[pos]

    def rows_upto(self, norm_bound: float) -> int:
        """Number of leading rows with norm <= bound."""
        return int(np.searchsorted(self.norm, norm_bound, side="right"))

    def multiplicative(self, prime_power_fn, upto: int | None = None, dtype=float) -> np.ndarray:
        """Evaluate f(n) = prod f(w^e) over the table.

        ``prime_power_fn(prime_norm, exponent)`` receives arrays and returns
        the local factors; it is only called where exponent >= 1.
        """
        rows = self.size if upto is None else upto
        P = self.fac_prime[:rows]
        E = self.fac_exp[:rows]
        out = np.ones(rows, dtype=dtype)
        for k in range(P.shape[1]):
            live = E[:, k] > 0
            if not live.any():
                continue
            vals = prime_power_fn(self.prime_norm[P[live, k]], E[live, k])
            out[live] *= vals
        return out

    def completely_multiplicative(self, prime_values: np.ndarray, upto: int | None = None) -> np.ndarray:
        """Extend values at primes (last axis = prime index) to the table rows.

        ``prime_values`` may carry leading batch axes; the result has shape
        ``batch + (rows,)``.
        """
        rows = self.size if upto is None else upto
        P = self.fac_prime[:rows]
        E = self.fac_exp[:rows]
        pv = np.asarray(prime_values)
        out = np.ones(pv.shape[:-1] + (rows,), dtype=pv.dtype)
        for k in range(P.shape[1]):
            live = np.flatnonzero(E[:, k] > 0)
            if live.size == 0:
                continue
            vals = pv[..., P[live, k]]
            e = E[live, k]
            out[..., live] *= np.where(e % 2 == 1, vals, vals * vals) if pv.dtype.kind == "i" else vals ** e
        return out

    def omega_counts(self, upto: int | None = None) -> np.ndarray:
        rows = self.size if upto is None else upto
        return (self.fac_exp[:rows] > 0).sum(axis=1)

    def squarefree(self, upto: int | None = None) -> np.ndarray:
        rows = self.size if upto is None else upto
        return (self.fac_exp[:rows] <= 1).all(axis=1)

    def divisor_count(self, j: int = 2, upto: int | None = None) -> np.ndarray:
        """The j-fold divisor function d_j over primary divisors."""
        top = int(self.fac_exp.max()) + 1
        local = np.array([comb(e + j - 1, j - 1) for e in range(top)], dtype=float)
        return self.multiplicative(lambda q, e: local[e], upto)


_TABLES: list[PrimaryTable] = []


def primary_table(cutoff: int) -> PrimaryTable:
    """Shared table covering ``cutoff``; a larger cached table is reused and subsumes smaller ones."""
    cutoff = int(cutoff)
    for t in _TABLES:
        if t.cutoff >= cutoff:
            return t
    table = PrimaryTable(cutoff)
    _TABLES[:] = [table]
    return table
