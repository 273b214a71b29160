from __future__ import annotations

import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from heckemoments.errors import NotSquarefree, SlowConvergence
from heckemoments.euler import (
    A_and_B,
    A_direct,
    B_alpha,
    H_of,
    euler_constant,
    g1_of,
    g_of,
    g_local,
    h_local,
    h_of,
    H_local,
    g1_local,
    prime_ideal_norms,
)
from heckemoments.weights import bump, weight_make


def test_bump_examples():
    assert abs(bump(1.5) - math.exp(-4)) < 1e-16
    assert bump(1.0) == 0 and bump(2.0) == 0 and bump(0.3) == 0
    # one-sided derivatives vanish numerically
    for h in (1e-2, 1e-3):
        assert bump(1 + h) / h < 1e-10 or h == 1e-2 and bump(1 + h) / h < 1e-30
        assert bump(2 - h) / h**5 < 1e-8 or h == 1e-2


def test_mass_regression_and_mpmath():
    w = weight_make()
    assert abs(w.mass - 0.007029858406609657) < 1e-15
    ref = mp.quad(lambda t: mp.exp(-1 / ((t - 1) * (2 - t))), [1, 1.5, 2])
    assert abs(w.mass - float(ref)) < 1e-10
    s = 1 + 2j
    ref = mp.quad(lambda t: mp.exp(-1 / ((t - 1) * (2 - t))) * t ** (s - 1), [1, 1.5, 2])
    assert abs(w.mellin(s) - complex(ref)) < 1e-10


def test_unknown_weight():
    with pytest.raises(ValueError):
        weight_make("box")


def test_multiplicative_examples():
    assert g_of(1) == h_of(1) == H_of(1) == g1_of(1) == 1
    assert h_of(-3) == Fraction(91, 81) - Fraction(2, 45) == Fraction(437, 405)
    with pytest.raises(NotSquarefree):
        H_of(9)
    N = 13
    assert float(g1_of(complex_to_gi(3, 2))) == pytest.approx(float(g1_local(N)), rel=1e-14)
    assert float(H_of(complex_to_gi(3, 2))) == pytest.approx(float(H_local(N)), rel=1e-14)
    assert float(h_of(complex_to_gi(3, 2))) == pytest.approx(float(h_local(N)), rel=1e-14)
    assert float(g_of(complex_to_gi(3, 2))) == pytest.approx(float(g_local(N)), rel=1e-14)


def complex_to_gi(a, b):
    from heckemoments.gaussian import GaussianInt

    return GaussianInt(a, b)


def test_prime_ideal_norms():
    N = prime_ideal_norms(100)
    assert N.tolist() == [5, 5, 9, 13, 13, 17, 17, 29, 29, 37, 37, 41, 41, 49, 53, 53, 61, 61, 73, 73, 89, 89, 97, 97]


def test_euler_constants_stable():
    C5, C6 = euler_constant("C", 10**5), euler_constant("C", 10**6)
    D5, D6 = euler_constant("D", 10**5), euler_constant("D", 10**6)
    assert abs(C5 - C6) < 1e-5 and abs(D5 - D6) < 1e-5
    assert C6 == pytest.approx(0.29989250814076723, abs=1e-15)
    assert D6 == pytest.approx(0.08475394524219983, abs=1e-15)


def test_constant_identity():
    # C^2/(2D) prod (1 - 1/N)(1 + h g1^2/(N H)) = 4/9, an exact consequence of the definitions
    C, D = euler_constant("C"), euler_constant("D")
    N = prime_ideal_norms(10**6)
    rest = np.prod((1 - 1 / N) * (1 + h_local(N) * g1_local(N) ** 2 / (N * H_local(N))))
    assert abs(C**2 / (2 * D) * rest - 4 / 9) < 1e-6


def test_B_at_one_has_no_prefactor():
    a = 0.3
    assert B_alpha(1, a, prefactor_exponent=-1.0) == B_alpha(1, a, prefactor_exponent=-0.5)


@pytest.mark.parametrize(
    "l,alpha,expected",
    [(1, 0.3, 1.29933050), (-3, 0.3, 0.60671191), (complex_to_gi(-1, 2), 0.3, 0.67669708), (-3, 0.5, 0.33402627)],
)
def test_A_product_equals_direct(l, alpha, expected):
    ab = A_and_B(l, alpha)
    assert abs(ab.A - ab.A_direct) < 1e-6
    assert abs(ab.A - expected) < 1e-7


def test_half_exponent_convention_rejected():
    ab = A_and_B(-3, 0.3, prefactor_exponent=-0.5)
    assert abs(ab.A - ab.A_direct) > 1e-2


def test_A_direct_refuses_small_alpha():
    with pytest.raises(SlowConvergence):
        A_direct(1, 0.1)
