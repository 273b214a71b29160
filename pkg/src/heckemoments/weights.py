"""Smooth compactly supported weights and their Mellin transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureNonConvergent


def bump(t):
    """exp(-1/((t-1)(2-t))) on (1, 2), zero elsewhere."""
    t = np.asarray(t, dtype=float)
    inside = (t > 1) & (t < 2)
    out = np.zeros(t.shape)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / ((ti - 1.0) * (2.0 - ti)))
    return out if out.ndim else float(out)


_KINDS = {"bump": bump}


@dataclass
class WeightSpec:
    """A smooth weight Phi supported in [lo, hi] with memoised Mellin values."""

    kind: str = "bump"
    lo: float = 1.0
    hi: float = 2.0
    tol: float = 1e-12
    _mellin: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, t):
        return _KINDS[self.kind](t)

    def mellin(self, s: complex) -> complex:
        return weight_mellin(self, s)

    @property
    def mass(self) -> float:
        """Phi-hat(1) = integral of Phi."""
        return weight_mellin(self, 1.0).real


def weight_make(kind: str = "bump") -> WeightSpec:
    if kind not in _KINDS:
        raise ValueError(f"unknown weight kind {kind!r}; choose from {sorted(_KINDS)}")
    return WeightSpec(kind=kind)


def weight_mellin(w: WeightSpec, s: complex) -> complex:
    """int_0^inf Phi(t) t^(s-1) dt by adaptive quadrature over the support."""
    s = complex(s)
    key = (s.real, s.imag)
    hit = w._mellin.get(key)
    if hit is not None:
        return hit
    parts = []
    for fn in (math.cos, math.sin):
        def integrand(t, fn=fn):
            return w(t) * t ** (s.real - 1) * fn(s.imag * math.log(t))

        val, err = quad(integrand, w.lo, w.hi, epsabs=w.tol, epsrel=w.tol, limit=200)
        if err > 1e-9:
            raise QuadratureNonConvergent(f"Mellin transform at {s}: error estimate {err:.3g}")
        parts.append(val)
    value = complex(parts[0], parts[1])
    w._mellin[key] = value
    return value
