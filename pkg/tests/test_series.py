from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetspace.errors import ValidationError
from jetspace.polynomials import VariableUniverse, parse_polynomial
from jetspace.series import INFINITE_ORDER, TruncatedSeries, evaluate_series

XY = VariableUniverse.of("x", "y")


def series(*coeffs, order=None):
    values = [Fraction(c) for c in coeffs]
    if order is None:
        order = len(values)
    return TruncatedSeries.from_coefficients(values, order)


def test_order_of_nonzero_series():
    s = series(0, 0, 3, 1)
    assert s.order() == 2
    assert s.truncation_order == 4


def test_order_of_zero_series_is_infinite():
    assert TruncatedSeries.zero(5).order() == INFINITE_ORDER
    assert TruncatedSeries.zero(5).is_zero


def test_coefficient_access_is_range_checked():
    s = series(1, 2)
    assert s.coefficient(1) == 2
    with pytest.raises(ValidationError):
        s.coefficient(2)


def test_addition_aligns_to_coarser_truncation():
    a = series(1, 1, 1, 1)
    b = series(0, 2, order=2)
    total = a + b
    assert total.truncation_order == 2
    assert total.coefficients == (Fraction(1), Fraction(3))


def test_multiplication_truncates():
    t = TruncatedSeries.t_power(1, 5)
    assert (t * t).coefficients == (0, 0, 1, 0, 0)
    cube = t * t * t
    assert cube.order() == 3


def test_product_of_t_powers_beyond_truncation_vanishes():
    a = TruncatedSeries.t_power(2, 3)
    b = TruncatedSeries.t_power(1, 3)
    assert (a * b).is_zero


def test_shifted_down_requires_divisibility():
    s = series(0, 0, 5, 7)
    shifted = s.shifted_down(2)
    assert shifted.coefficients == (Fraction(5), Fraction(7))
    with pytest.raises(ValidationError):
        series(1, 0).shifted_down(1)


def test_padded_extends_with_zeros():
    s = series(1, 2)
    assert s.padded(4).coefficients == (1, 2, 0, 0)
    assert s.padded(2) == s


def test_truncate_only_shrinks():
    s = series(1, 2, 3)
    assert s.truncate(2).coefficients == (1, 2)
    with pytest.raises(ValidationError):
        s.truncate(4)


def test_inverse_of_unit():
    s = series(1, 1, order=6)  # 1 + t
    inv = s.inverse()
    assert inv.coefficients == (1, -1, 1, -1, 1, -1)
    assert (s * inv) == TruncatedSeries.constant(1, 6)


def test_inverse_requires_unit_constant_term():
    with pytest.raises(ValidationError):
        series(0, 1).inverse()


def test_power():
    s = series(1, 1, order=4)
    assert (s**3).coefficients == (1, 3, 3, 1)
    assert (s**0) == TruncatedSeries.constant(1, 4)


@given(
    st.lists(st.fractions(max_denominator=4), min_size=1, max_size=6),
    st.lists(st.fractions(max_denominator=4), min_size=1, max_size=6),
)
@settings(max_examples=50)
def test_ring_axioms(a_coeffs, b_coeffs):
    a = TruncatedSeries.from_coefficients(a_coeffs, len(a_coeffs))
    b = TruncatedSeries.from_coefficients(b_coeffs, len(b_coeffs))
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * a == a * a + b * a


# -- evaluate_series ----------------------------------------------------------


def cusp():
    return parse_polynomial("x^2 - y^3", XY)


def test_evaluate_series_on_exact_solution():
    arc = {0: TruncatedSeries.t_power(3, 12), 1: TruncatedSeries.t_power(2, 12)}
    assert evaluate_series(cusp(), arc, 12).is_zero


def test_evaluate_series_on_perturbed_arc():
    # (t^3)^2 - (t^2 + t^3)^3 = -3t^7 - 3t^8 - t^9
    arc = {
        0: TruncatedSeries.t_power(3, 10),
        1: TruncatedSeries.t_power(2, 10) + TruncatedSeries.t_power(3, 10),
    }
    value = evaluate_series(cusp(), arc, 10)
    expected = TruncatedSeries.from_coefficients(
        [0, 0, 0, 0, 0, 0, 0, -3, -3, -1], 10
    )
    assert value == expected


def test_evaluate_series_identity_substitution():
    f = parse_polynomial("x^2 + 2*x + 1", XY)
    one_plus_t = TruncatedSeries.from_coefficients([1, 1], 8)
    value = evaluate_series(f, {0: one_plus_t}, 8)
    assert value == (one_plus_t + TruncatedSeries.constant(1, 8)) ** 2


def test_evaluate_series_rejects_short_inputs():
    arc = {0: TruncatedSeries.t_power(3, 4), 1: TruncatedSeries.t_power(2, 12)}
    with pytest.raises(ValidationError):
        evaluate_series(cusp(), arc, 10)


def test_evaluate_series_requires_assignments():
    with pytest.raises(ValidationError):
        evaluate_series(cusp(), {0: TruncatedSeries.t_power(1, 4)}, 4)


def test_evaluate_series_truncation_consistency():
    # Evaluating then truncating agrees with truncating inputs first.
    arc = {
        0: TruncatedSeries.from_coefficients([1, 2, 3, 4, 5], 5),
        1: TruncatedSeries.from_coefficients([0, 1, 1, 0, 2], 5),
    }
    full = evaluate_series(cusp(), arc, 5)
    short = evaluate_series(cusp(), {k: v.truncate(3) for k, v in arc.items()}, 3)
    assert full.truncate(3) == short
