"""Smoothed moment sweeps over odd squarefree d, with an L-value cache.

The sum over d runs over every odd squarefree Gaussian integer (all
associates) with X < N(d) < 2X, weighted by Phi(N(d)/X).  L-values are
computed per fixed-size chunk of the canonically ordered d-list; each
chunk is reduced with a compensated sum and the chunk sums are merged in
chunk order, so the result does not depend on the worker count.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import CacheCorrupt, IoFailure, VersionMismatch
from .euler import euler_constant, g_of
from .gaussian import GaussianInt, IntLike, odd_squarefree_arrays
from .lfunction import DEFAULT_TAIL_TOL, central_values, cutoff_norm
from .special import G_ONE, v_grid, zeta_K
from .symbol import CONDUCTOR_2PART, symbol_array
from .weights import WeightSpec, weight_make

SCHEMA_VERSION = 1
CHUNK = 2048
ZETA_K_2 = zeta_K(2.0).real


@dataclass(frozen=True)
class MomentReport:
    X: float
    j: int
    count: int
    empirical: float
    predicted: float | None
    residual: float | None
    runtime_s: float

    CSV_FIELDS = ("X", "j", "count", "empirical", "predicted", "residual", "runtime_s")

    def row(self) -> list:
        return [getattr(self, f) for f in self.CSV_FIELDS]


@dataclass(frozen=True)
class CacheRecord:
    d_re: int
    d_im: int
    shift_re: float
    shift_im: float
    value_re: float
    value_im: float
    cutoff_norm: int
    schema_version: int = SCHEMA_VERSION

    @property
    def key(self) -> tuple:
        return (self.d_re, self.d_im, self.shift_re, self.shift_im, self.cutoff_norm, self.schema_version)


_FIELDS = tuple(CacheRecord.__dataclass_fields__)


def _parse_line(line: str, lineno: int) -> CacheRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CacheCorrupt(f"line {lineno}: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != set(_FIELDS):
        raise CacheCorrupt(f"line {lineno}: fields {sorted(obj) if isinstance(obj, dict) else type(obj)}")
    if obj["schema_version"] != SCHEMA_VERSION:
        raise VersionMismatch(f"line {lineno}: schema_version {obj['schema_version']} != {SCHEMA_VERSION}")
    try:
        return CacheRecord(
            int(obj["d_re"]), int(obj["d_im"]), float(obj["shift_re"]), float(obj["shift_im"]),
            float(obj["value_re"]), float(obj["value_im"]), int(obj["cutoff_norm"]), int(obj["schema_version"]),
        )
    except (TypeError, ValueError) as exc:
        raise CacheCorrupt(f"line {lineno}: {exc}") from exc


def cache_load(path: str | os.PathLike) -> dict[tuple, CacheRecord]:
    path = Path(path)
    if not path.exists():
        return {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    out: dict[tuple, CacheRecord] = {}
    for i, line in enumerate(text.splitlines(), 1):
        if line.strip():
            rec = _parse_line(line, i)
            out[rec.key] = rec
    return out


def cache_store(path: str | os.PathLike, records: list[CacheRecord]) -> None:
    """Append records, skipping keys already present; the file is replaced atomically."""
    path = Path(path)
    try:
        old = path.read_text(encoding="utf-8") if path.exists() else ""
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    have = {_parse_line(l, i).key for i, l in enumerate(old.splitlines(), 1) if l.strip()}
    lines = []
    for r in records:
        if r.key not in have:
            have.add(r.key)
            lines.append(json.dumps(asdict(r), separators=(",", ":")))
    if not lines:
        return
    if old and not old.endswith("\n"):
        old += "\n"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(old + "\n".join(lines) + "\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def kahan_sum(values) -> float:
    total = 0.0
    comp = 0.0
    for v in np.asarray(values, dtype=float).tolist():
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def ordered_sum(values, chunk: int = CHUNK) -> float:
    """Compensated sum per fixed chunk, chunk sums merged in order."""
    values = np.asarray(values, dtype=float)
    return kahan_sum([kahan_sum(values[i : i + chunk]) for i in range(0, values.size, chunk)])


# sweep data

@dataclass
class SweepData:
    """Odd squarefree d with X < N(d) < 2X, their weights and central values."""

    X: float
    d_re: np.ndarray
    d_im: np.ndarray
    weight: np.ndarray
    values: np.ndarray
    cutoffs: np.ndarray
    runtime_s: float

    @property
    def norm(self) -> np.ndarray:
        return self.d_re * self.d_re + self.d_im * self.d_im

    def __len__(self) -> int:
        return int(self.d_re.size)


def sweep_d(X: float, w: WeightSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Odd squarefree d with X*lo < N(d) < X*hi and their weights (some may underflow to 0)."""
    lo, hi = int(math.floor(X * w.lo)), int(math.ceil(X * w.hi))
    re, im = odd_squarefree_arrays(lo, hi)
    n = re * re + im * im
    keep = (n > X * w.lo) & (n < X * w.hi)
    re, im = re[keep], im[keep]
    return re, im, w(n[keep] / X)


def _chunk_values(args):
    re, im, scale = args
    return central_values(re, im, G_ONE, cutoff_scale=scale)


def expected_cutoffs(re: np.ndarray, im: np.ndarray, scale: float = 1.0) -> np.ndarray:
    grid = v_grid((0j,), G_ONE)
    norms = re * re + im * im
    uniq = {int(D): cutoff_norm(int(D), [grid], 1, DEFAULT_TAIL_TOL, scale) for D in np.unique(norms)}
    return np.array([uniq[int(D)] for D in norms], dtype=np.int64)


def compute_values(re: np.ndarray, im: np.ndarray, workers: int = 1, cache: str | None = None, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Central values for the listed d, reading and extending the cache if given."""
    cuts = expected_cutoffs(re, im, scale)
    values = np.full(re.size, np.nan)
    if cache:
        stored = cache_load(cache)
        for i, (a, b, c) in enumerate(zip(re.tolist(), im.tolist(), cuts.tolist())):
            rec = stored.get((a, b, 0.0, 0.0, c, SCHEMA_VERSION))
            if rec is not None:
                values[i] = rec.value_re
    todo = np.flatnonzero(np.isnan(values))
    if todo.size:
        jobs = [(re[todo[i : i + CHUNK]], im[todo[i : i + CHUNK]], scale) for i in range(0, todo.size, CHUNK)]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_chunk_values, jobs))
        else:
            results = [_chunk_values(job) for job in jobs]
        for i, (vals, c) in zip(range(0, todo.size, CHUNK), results):
            idx = todo[i : i + CHUNK]
            values[idx] = vals
            if not np.array_equal(c, cuts[idx]):
                raise AssertionError("cutoff bookkeeping mismatch")
        if cache:
            cache_store(cache, [
                CacheRecord(int(re[k]), int(im[k]), 0.0, 0.0, float(values[k]), 0.0, int(cuts[k]))
                for k in todo.tolist()
            ])
    return values, cuts


def sweep(X: float, w: WeightSpec | None = None, workers: int = 1, cache: str | None = None, scale: float = 1.0) -> SweepData:
    w = w or weight_make()
    t0 = time.perf_counter()
    re, im, weight = sweep_d(X, w)
    values, cuts = compute_values(re, im, workers, cache, scale)
    return SweepData(X, re, im, weight, values, cuts, time.perf_counter() - t0)


# predictions

def first_moment_constant(w: WeightSpec, l: IntLike = 1) -> float:
    """(pi^2/4) Phi-hat(1) C / (zeta_K(2) sqrt(N(l)) g(l)): the factor multiplying X(log(sqrt X / N(l)) + C2)."""
    l = GaussianInt.of(l)
    return math.pi**2 / 4 * w.mass * euler_constant("C") / (ZETA_K_2 * math.sqrt(l.norm()) * float(g_of(l)))


def first_moment_prediction(X: float, w: WeightSpec, C2: float, l: IntLike = 1) -> float:
    l = GaussianInt.of(l)
    return first_moment_constant(w, l) * X * (math.log(math.sqrt(X) / l.norm()) + C2)


def fit_C2(X: float, empirical: float, w: WeightSpec) -> float:
    """Solve the l = 1 first-moment formula for C2 at one X."""
    return empirical / (first_moment_constant(w) * X) - 0.5 * math.log(X)


def fit_C2_ladder(Xs, empiricals, w: WeightSpec) -> float:
    """Mean of the single-X C2 solutions over a ladder of X."""
    k = first_moment_constant(w)
    c = [e / (k * x) - 0.5 * math.log(x) for x, e in zip(Xs, empiricals)]
    return float(np.mean(c))


def moment_from_sweep(data: SweepData, j: int, predicted: float | None = None) -> MomentReport:
    emp = ordered_sum(data.values**j * data.weight)
    residual = None if predicted is None else abs(emp - predicted) / abs(predicted)
    return MomentReport(data.X, j, len(data), emp, predicted, residual, data.runtime_s)


def moment_sweep(X: float, j: int, w: WeightSpec | None = None, workers: int = 1, cache: str | None = None, C2: float | None = None) -> MomentReport:
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    if X < 100:
        raise ValueError("X must be at least 100")
    w = w or weight_make()
    data = sweep(X, w, workers, cache)
    pred = first_moment_prediction(X, w, C2) if (j == 1 and C2 is not None) else None
    return moment_from_sweep(data, j, pred)


def chi_at(data: SweepData, l: IntLike) -> np.ndarray:
    """chi_{(1+i)^5 d}(l) for every d of the sweep."""
    c = CONDUCTOR_2PART
    c_re = c.re * data.d_re - c.im * data.d_im
    c_im = c.re * data.d_im + c.im * data.d_re
    return symbol_array(c_re, c_im, l).astype(float)


def twisted_from_sweep(data: SweepData, l: IntLike, w: WeightSpec, C2: float | None) -> MomentReport:
    l = GaussianInt.of(l)
    emp = ordered_sum(data.values * chi_at(data, l) * data.weight)
    pred = None if C2 is None else first_moment_prediction(data.X, w, C2, l)
    residual = None if pred is None else abs(emp - pred) / abs(pred)
    return MomentReport(data.X, 1, len(data), emp, pred, residual, data.runtime_s)


def twisted_first_moment(X: float, l: IntLike, w: WeightSpec | None = None, C2: float | None = None, workers: int = 1, cache: str | None = None) -> MomentReport:
    l = GaussianInt.of(l)
    if not l.is_primary():
        raise ValueError(f"{l} is not primary")
    w = w or weight_make()
    return twisted_from_sweep(sweep(X, w, workers, cache), l, w, C2)


def sqfree_count(X: float) -> tuple[int, float]:
    """Odd squarefree count over X <= N(d) <= 2X and its ratio to 2 pi X / (3 zeta_K(2))."""
    from .gaussian import count_odd_squarefree

    count = count_odd_squarefree(int(math.ceil(X)), int(math.floor(2 * X)))
    return count, count / (2 * math.pi * X / (3 * ZETA_K_2))


def growth_degree(Xs, empiricals) -> float:
    """Slope of log(empirical/X) against log log X."""
    x = np.log(np.log(np.asarray(Xs, dtype=float)))
    y = np.log(np.asarray(empiricals, dtype=float) / np.asarray(Xs, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
