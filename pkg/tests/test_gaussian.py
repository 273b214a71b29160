from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckemoments.errors import EvenInput, ZeroInput
from heckemoments.gaussian import (
    GaussianInt,
    UNITS,
    arith_fn,
    count_odd_squarefree,
    divisors_primary,
    enumerate_odd_squarefree,
    factor,
    gcd,
    moebius,
    norm,
    primary_associate,
)
from heckemoments.special import zeta_K

G = GaussianInt
small = st.integers(-60, 60)


def test_norm_examples():
    assert norm(0) == 0
    assert norm(G(1, 1)) == 2
    assert norm(G(-1, 2)) == 5


def test_primary_associate_examples():
    assert primary_associate(G(3, 2)) == (G(1), G(3, 2))
    assert primary_associate(3) == (G(-1), G(-3))
    assert primary_associate(G(1, 2))[1] == G(-1, -2)
    with pytest.raises(EvenInput):
        primary_associate(G(1, 1))
    with pytest.raises(ZeroInput):
        primary_associate(0)


def test_exactly_one_primary_associate_exhaustive():
    for a in range(-100, 101):
        for b in range(-100, 101):
            z = G(a, b)
            if z.norm() > 10**4 or not z.is_odd():
                continue
            assert sum((u * z).is_primary() for u in UNITS) == 1


def test_gcd_examples():
    assert gcd(5, G(-1, 2)) == G(-1, 2)
    assert gcd(7, 3) == G(1)
    assert gcd(G(3, 2), 0) == G(3, 2)
    assert gcd(G(2, 3), 0) == G(3, -2)  # primary associate
    with pytest.raises(ZeroInput):
        gcd(0, 0)


@settings(max_examples=300, deadline=None)
@given(small, small, small, small)
def test_gcd_divides_both(a, b, c, d):
    x, y = G(a, b), G(c, d)
    if not x and not y:
        return
    g = gcd(x, y)
    assert g.divides(x) and g.divides(y)
    # Bezout-free check: any common factor of the inputs divides g
    for h in (G(1, 1), G(-1, 2), G(-3), G(3, 2)):
        if h.divides(x) and h.divides(y):
            assert h.divides(g)


def test_factor_examples():
    f = factor(5)
    assert f.unit == G(1) and f.two_exp == 0
    assert set(f.odd_part) == {(G(-1, 2), 1), (G(-1, -2), 1)}
    f = factor(2)
    assert (f.unit, f.two_exp, f.odd_part) == (G(0, -1), 2, ())
    f = factor(-3)
    assert (f.unit, f.two_exp, f.odd_part) == (G(1), 0, ((G(-3), 1),))


def test_factor_round_trip_exhaustive():
    for a in range(-100, 101):
        for b in range(-100, 101):
            z = G(a, b)
            if not z or z.norm() > 10**4:
                continue
            f = factor(z)
            assert f.reconstruct() == z
            assert f.unit in UNITS
            keys = [p.sort_key() for p, _ in f.odd_part]
            assert keys == sorted(keys) and len(set(keys)) == len(keys)
            for p, e in f.odd_part:
                assert p.is_primary() and e >= 1
                N = p.norm()
                assert _is_prime(N) or (p.im == 0 and _is_prime(-p.re) and -p.re % 4 == 3)


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % k for k in range(2, math.isqrt(n) + 1))


def test_moebius_and_arith_examples():
    assert moebius(1) == 1
    assert moebius(-3) == -1
    assert moebius(5) == 1
    assert moebius(9) == 0
    assert arith_fn(G(-1, 2), "phi") == 4
    assert arith_fn(5, "d_count") == 4
    assert arith_fn(-3, "sigma_norm") == 10
    assert moebius(G(0, 1) * G(3, 2)) == moebius(G(3, 2))


def _random_primary(rng, bound=40):
    while True:
        z = G(rng.randint(-bound, bound), rng.randint(-bound, bound))
        if z.is_odd() and z.norm() > 1:
            return primary_associate(z)[1]


def test_multiplicativity_randomised():
    rng = random.Random(7)
    checked = 0
    while checked < 200:
        m, n = _random_primary(rng), _random_primary(rng)
        if gcd(m, n) != G(1):
            continue
        checked += 1
        assert moebius(m * n) == moebius(m) * moebius(n)
        for kind in ("phi", "d_count", "sigma_norm"):
            assert arith_fn(m * n, kind) == arith_fn(m, kind) * arith_fn(n, kind)


def test_divisors_primary():
    assert divisors_primary(1) == [G(1)]
    assert divisors_primary(-3) == [G(1), G(-3)]
    assert set(divisors_primary(5)) == {G(1), G(-1, 2), G(-1, -2), G(5)}
    assert len(divisors_primary(G(-3) * G(3, 2) ** 2)) == arith_fn(G(-3) * G(3, 2) ** 2, "d_count")
    with pytest.raises(EvenInput):
        divisors_primary(2)


def test_enumeration_examples():
    assert set(enumerate_odd_squarefree(1, 2)) == set(UNITS)
    norm5 = list(enumerate_odd_squarefree(5, 5))
    assert len(norm5) == 8 and {abs(z.re) for z in norm5} == {1, 2}
    assert list(enumerate_odd_squarefree(4, 4)) == []
    keys = [z.sort_key() for z in enumerate_odd_squarefree(1, 500)]
    assert keys == sorted(keys)


def test_enumeration_matches_brute_force():
    brute = 0
    for a in range(-40, 41):
        for b in range(-40, 41):
            z = G(a, b)
            if 100 <= z.norm() <= 1500 and z.is_odd() and moebius(z) != 0:
                brute += 1
    assert count_odd_squarefree(100, 1500) == brute


def test_squarefree_density_at_1e6():
    X = 10**6
    ratio = count_odd_squarefree(0, X) / (2 * math.pi * X / (3 * zeta_K(2).real))
    assert abs(ratio - 1) < 0.01
