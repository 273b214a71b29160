from __future__ import annotations

import numpy as np
import pytest

from heckemoments.errors import TableTooSmall
from heckemoments.gaussian import GaussianInt, odd_squarefree_arrays
from heckemoments.lfunction import (
    afe_power,
    afe_value,
    central_values,
    cutoff_norm,
    series_vs_euler_at2,
    tuple_consistency,
)
from heckemoments.primary_table import PrimaryTable
from heckemoments.special import CutoffG, v_grid

G = GaussianInt
GAUSS = CutoffG(1.0)


def test_regression_value():
    rec = afe_value(G(3, 2))
    assert abs(rec.value - 1.479931588573282) < 1e-11
    assert rec.g_choice == "one" and rec.cutoff_norm == cutoff_norm(13, [v_grid((0j,))])


def test_unit_d_is_allowed():
    assert np.isfinite(afe_value(1).value.real)


def test_even_d_rejected():
    with pytest.raises(ValueError):
        afe_value(G(1, 1))


def test_table_too_small():
    with pytest.raises(TableTooSmall):
        afe_value(G(99, 10), table=PrimaryTable(50))


@pytest.mark.parametrize("d", [G(3, 2), G(-3), G(11, 4)])
@pytest.mark.parametrize("shift", [0.0, 0.1, -0.1, 0.05 + 0.03j])
def test_two_G_agreement(d, shift):
    a = afe_value(d, shift).value
    b = afe_value(d, shift, G=GAUSS, tol=1e-9).value
    assert abs(a - b) < 1e-8 * abs(a)


def test_cutoff_doubling():
    for d in (G(3, 2), G(99, 10)):
        a = afe_value(d).value
        b = afe_value(d, cutoff_scale=2.0).value
        assert abs(a - b) < 1e-10 * abs(a)


def test_shift_symmetry_real():
    # a real character gives real values at real shifts
    rec = afe_value(G(11, 4), 0.12)
    assert abs(rec.value.imag) < 1e-12


def test_central_values_match_scalar_and_are_batch_independent():
    re, im = odd_squarefree_arrays(900, 1000)
    vals, cuts = central_values(re, im)
    for k in range(0, re.size, 37):
        rec = afe_value(G(int(re[k]), int(im[k])))
        assert abs(vals[k] - rec.value.real) < 1e-12
        assert cuts[k] == rec.cutoff_norm
    sub, _ = central_values(re[5:9], im[5:9], batch=3)
    assert np.array_equal(sub, vals[5:9])


def test_associates_give_distinct_values():
    d = G(3, 2)
    a = afe_value(d).value.real
    b = afe_value(G(0, 1) * d).value.real
    assert abs(a - b) > 1e-3
    assert abs(afe_value(-d).value.real - a) < 1e-13


@pytest.mark.parametrize("j", [2, 3])
def test_tuple_consistency(j):
    for d in (G(3, 2), G(-3), G(5, 8)):
        assert tuple_consistency(d, j) < 1e-8
    with pytest.raises(ValueError):
        afe_power(G(3, 2), 4)


def test_series_vs_euler():
    for d in (G(3, 2), G(-3), G(7, 10)):
        assert series_vs_euler_at2(d) < 1e-9
