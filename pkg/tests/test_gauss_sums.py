from __future__ import annotations

import cmath
import math
import random

import pytest

from heckemoments.errors import EvenModulus, NonPrimaryModulus, ZeroDenominator
from heckemoments.gauss_sums import (
    e_tilde,
    gauss_brute,
    gauss_fast,
    gauss_oracle_suite,
    oracle_k_set,
    poisson_check,
    residue_system,
    w_gaussian,
    w_tilde_radial,
)
from heckemoments.gaussian import GaussianInt, arith_fn, gcd, primary_associate
from heckemoments.symbol import symbol

G = GaussianInt


def test_e_tilde():
    assert e_tilde(G(7), G(3)) == 1
    assert e_tilde(G(0, 1), G(4)) == 1j
    for num, den in ((G(3, 5), G(7, 2)), (G(1, 1), G(0, 3)), (G(-11, 4), G(5))):
        v = e_tilde(num, den)
        assert abs(abs(v) - 1) < 1e-15
        z = complex(num.re, num.im) / complex(den.re, den.im)
        assert abs(v - cmath.exp(2j * math.pi * z.imag)) < 1e-12
    with pytest.raises(ZeroDenominator):
        e_tilde(G(1), G(0))


def test_residue_system_complete():
    n = G(5, 2)
    xr, xi = residue_system(n)
    assert len(xr) == n.norm()
    # distinct classes: differences of two residues are never divisible by n
    pts = [G(int(a), int(b)) for a, b in zip(xr, xi)]
    for i in range(0, len(pts), 3):
        for j in range(i + 1, len(pts)):
            assert not n.divides(pts[i] - pts[j])


def test_brute_examples():
    assert abs(gauss_brute(1, -3) - 3) < 1e-12
    assert abs(gauss_brute(1, G(-1, 2)) + math.sqrt(5)) < 1e-12
    assert abs(gauss_brute(0, G(3, 2))) < 1e-12
    assert abs(gauss_brute(0, G(-3) * G(-3)) - arith_fn(9, "phi")) < 1e-9
    with pytest.raises(EvenModulus):
        gauss_brute(1, G(1, 1))


def test_fast_examples():
    w = G(3, 2)
    assert abs(gauss_fast(1, -3) - 3) < 1e-12
    assert abs(gauss_fast(w, w * w) + w.norm()) < 1e-12
    assert gauss_fast(1, w**3) == 0  # l = 3 >= h + 2 with h = 0
    assert gauss_fast(w, w**4) == 0
    with pytest.raises(NonPrimaryModulus):
        gauss_fast(1, 3)


def test_fast_equals_brute_small_suite():
    summary = gauss_oracle_suite(200)
    assert summary.max_scaled_error < 1e-8
    assert summary.moduli > 50


def test_oracle_k_set_contents():
    ks = oracle_k_set(G(-3) * G(3, 2))
    for k in (G(0), G(1), G(0, 1), G(1, 1), G(-3), G(3, 2), G(-3) * G(3, 2)):
        assert k in ks


def _rand_primary(rng, bound=20):
    while True:
        z = G(rng.randint(-bound, bound), rng.randint(-bound, bound))
        if z.is_odd() and z.norm() > 1:
            return primary_associate(z)[1]


def test_twisting_rule():
    rng = random.Random(3)
    done = 0
    while done < 100:
        n, s = _rand_primary(rng), G(rng.randint(-30, 30), rng.randint(-30, 30))
        r = G(rng.randint(-30, 30), rng.randint(-30, 30))
        if not s or gcd(s, n) != G(1):
            continue
        done += 1
        lhs = gauss_fast(r * s, n)
        rhs = symbol(s, n) * gauss_fast(r, n)  # real symbol, conjugation is trivial
        assert abs(lhs - rhs) < 1e-9 * n.norm()


def test_multiplicativity():
    rng = random.Random(4)
    done = 0
    while done < 60:
        m, n = _rand_primary(rng, 10), _rand_primary(rng, 10)
        if gcd(m, n) != G(1):
            continue
        done += 1
        k = G(rng.randint(-10, 10), rng.randint(-10, 10))
        assert abs(gauss_fast(k, m * n) - gauss_fast(k, m) * gauss_fast(k, n)) < 1e-9 * (m * n).norm()
        assert abs(gauss_brute(k, m * n) - gauss_fast(k, m * n)) < 1e-8 * (m * n).norm()


def test_w_tilde_gaussian_closed_form():
    # W(r) = exp(-pi r) is the radial profile of exp(-pi |x|^2); its 2-D transform is exp(-pi t^2)
    for t in (0.0, 0.3, 1.0, 2.5):
        assert abs(w_tilde_radial(w_gaussian, t) - math.exp(-math.pi * t * t)) < 1e-12


def test_poisson_trivial_modulus():
    res = poisson_check(1, 10)
    assert res.residual < 1e-6


@pytest.mark.parametrize("n,X", [(-3, 10), (G(-1, 2), 25), (G(3, 2), 10), (G(-3) * G(-1, 2), 25)])
def test_poisson_examples(n, X):
    res = poisson_check(n, X)
    assert res.residual < 1e-6
