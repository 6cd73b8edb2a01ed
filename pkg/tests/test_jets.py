from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetspace.errors import ValidationError
from jetspace.groebner import IdealPresentation, krull_dimension
from jetspace.jets import (
    JetPoint,
    JetRing,
    arc_substitution_check,
    constant_jet,
    jet_ideal,
    jet_point,
    point_satisfies,
    scale_jet,
    total_derivative,
)
from jetspace.polynomials import (
    Polynomial,
    VariableUniverse,
    monomial,
    parse_polynomial,
    transport,
)

XY = VariableUniverse.of("x", "y")


def ideal(universe, *texts):
    return IdealPresentation.of(universe, [parse_polynomial(t, universe) for t in texts])


def jp(text, ring):
    return parse_polynomial(text, ring.jet_universe)


# -- ring construction --------------------------------------------------------


def test_jet_universe_naming_and_order():
    ring = JetRing(XY, 2)
    assert ring.jet_universe.names == ("x_0", "x_1", "x_2", "y_0", "y_1", "y_2")
    assert ring.jet_vid(1, 2) == 5
    assert ring.decompose(5) == (1, 2)


def test_level_zero_ring():
    ring = JetRing(XY, 0)
    assert ring.jet_universe.names == ("x_0", "y_0")


def test_negative_level_rejected():
    with pytest.raises(ValidationError):
        JetRing(XY, -1)


def test_embed_base():
    ring = JetRing(XY, 1)
    f = parse_polynomial("x^2 - y^3", XY)
    assert ring.embed_base(f) == jp("x_0^2 - y_0^3", ring)
    with pytest.raises(ValidationError):
        ring.embed_base(jp("x_0", ring))


def test_promote_is_retagging_by_name():
    low = JetRing(XY, 1)
    high = JetRing(XY, 3)
    f = jp("x_0*y_1 - x_1", low)
    promoted = high.promote(f)
    assert promoted.universe == high.jet_universe
    assert transport(promoted, low.jet_universe) == f


# -- the derivation -----------------------------------------------------------


def test_derivative_of_generator():
    ring = JetRing(XY, 1)
    assert total_derivative(jp("x_0", ring), ring) == jp("x_1", ring)


def test_derivative_of_square():
    ring = JetRing(XY, 2)
    once = total_derivative(jp("x_0^2", ring), ring)
    assert once == jp("2*x_0*x_1", ring)
    twice = total_derivative(once, ring)
    assert twice == jp("2*x_1^2 + 2*x_0*x_2", ring)


def test_derivative_of_cusp_equation():
    ring = JetRing(XY, 1)
    d = total_derivative(jp("x_0^2 - y_0^3", ring), ring)
    assert d == jp("2*x_0*x_1 - 3*y_0^2*y_1", ring)


def test_derivative_needs_room():
    ring = JetRing(XY, 1)
    with pytest.raises(ValidationError, match="house"):
        total_derivative(jp("x_1", ring), ring)


def small_jet_polys(ring: JetRing, top_order: int):
    usable = [
        ring.jet_vid(i, j)
        for i in range(len(ring.base))
        for j in range(top_order + 1)
    ]
    exponent_maps = st.dictionaries(
        st.sampled_from(usable), st.integers(min_value=1, max_value=2), max_size=2
    )
    coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    return st.dictionaries(exponent_maps.map(monomial), coeffs, max_size=3).map(
        lambda terms: Polynomial(ring.jet_universe, terms)
    )


RING3 = JetRing(XY, 3)


@given(small_jet_polys(RING3, 2), small_jet_polys(RING3, 2))
@settings(max_examples=50)
def test_derivation_is_additive_and_leibniz(f, g):
    assert total_derivative(f + g, RING3) == total_derivative(
        f, RING3
    ) + total_derivative(g, RING3)
    assert total_derivative(f * g, RING3) == total_derivative(
        f, RING3
    ) * g + f * total_derivative(g, RING3)


# -- jet ideals ---------------------------------------------------------------


def test_jet_ideal_of_zero_ideal_is_affine_space():
    empty = IdealPresentation.of(XY, [])
    eqs = jet_ideal(empty, 3)
    assert eqs.generators == ()
    assert krull_dimension(eqs) == 8


def test_jet_ideal_of_cusp_level_one():
    ring = JetRing(XY, 1)
    eqs = jet_ideal(ideal(XY, "x^2 - y^3"), 1)
    assert eqs.generators == (
        jp("x_0^2 - y_0^3", ring),
        jp("2*x_0*x_1 - 3*y_0^2*y_1", ring),
    )


def test_jet_ideal_of_node_level_two():
    ring = JetRing(XY, 2)
    eqs = jet_ideal(ideal(XY, "x*y"), 2)
    assert eqs.generators == (
        jp("x_0*y_0", ring),
        jp("x_1*y_0 + x_0*y_1", ring),
        jp("x_2*y_0 + 2*x_1*y_1 + x_0*y_2", ring),
    )


def test_jet_ideal_restriction_compatibility():
    # The level-p generators are literally the order-<=p prefix of each
    # generator group at any higher level.
    base = ideal(XY, "x^2 - y^3", "x*y")
    low = jet_ideal(base, 2)
    high = jet_ideal(base, 4)
    low_ring = JetRing(XY, 2)
    per_gen = 5  # orders 0..4
    picked = [
        high.generators[block * per_gen + j]
        for block in range(len(base.generators))
        for j in range(3)
    ]
    assert tuple(transport(g, low_ring.jet_universe) for g in picked) == low.generators


@pytest.mark.parametrize("m", range(5))
def test_smooth_jet_dimension_affine_line(m):
    eqs = jet_ideal(IdealPresentation.of(VariableUniverse.of("x"), []), m)
    assert krull_dimension(eqs) == m + 1


@pytest.mark.parametrize("m", range(5))
def test_smooth_jet_dimension_circle(m):
    eqs = jet_ideal(ideal(XY, "x^2 + y^2 - 1"), m)
    assert krull_dimension(eqs) == m + 1


# -- jet points ---------------------------------------------------------------


def test_jet_point_shape_validation():
    with pytest.raises(ValidationError):
        jet_point(XY, 1, [[1, 2]])
    with pytest.raises(ValidationError):
        jet_point(XY, 1, [[1], [2]])


def test_constant_jet_at_origin():
    a = constant_jet(XY, [0, 0], 3)
    assert all(v == 0 for row in a.values for v in row)


def test_constant_jet_lies_on_variety():
    eqs = jet_ideal(ideal(XY, "x - y"), 2)
    a = constant_jet(XY, [1, 1], 2)
    assert point_satisfies(a, eqs)


def test_scale_jet_laws():
    rng = random.Random(7)
    for _ in range(10):
        a = jet_point(
            XY, 3, [[rng.randint(-4, 4) for _ in range(4)] for _ in range(2)]
        )
        assert scale_jet(a, 1) == a
        assert scale_jet(scale_jet(a, 2), 3) == scale_jet(a, 6)
        assert scale_jet(a, 0) == constant_jet(XY, a.base_point(), 3)


def cusp_jet_from_parameter(u_coeffs: list[int], level: int) -> JetPoint:
    # Push the series u(t) = sum u_k t^k through the parametrization
    # (u^3, u^2) of the cusp, then read off divided-power coordinates.
    from math import factorial

    from jetspace.series import TruncatedSeries

    u = TruncatedSeries.from_coefficients([Fraction(c) for c in u_coeffs], level + 1)
    rows = []
    for power in (3, 2):
        arc = u**power
        rows.append([arc.coefficient(j) * factorial(j) for j in range(level + 1)])
    return jet_point(XY, level, rows)


def test_torus_action_preserves_jet_scheme():
    eqs = jet_ideal(ideal(XY, "x^2 - y^3"), 4)
    rng = random.Random(23)
    for _ in range(8):
        a = cusp_jet_from_parameter([rng.randint(-3, 3) for _ in range(5)], 4)
        assert point_satisfies(a, eqs)
        for c in (Fraction(2), Fraction(-1, 3), Fraction(0)):
            assert point_satisfies(scale_jet(a, c), eqs)


def test_truncate_point():
    a = jet_point(XY, 3, [[1, 2, 3, 4], [5, 6, 7, 8]])
    b = a.truncate(1)
    assert b.level == 1
    assert b.values == ((Fraction(1), Fraction(2)), (Fraction(5), Fraction(6)))
    with pytest.raises(ValidationError):
        a.truncate(9)


# -- substitution identity ----------------------------------------------------


def test_arc_substitution_monomial_case():
    a = jet_point(XY, 1, [[0, 1], [0, 1]])
    assert arc_substitution_check(parse_polynomial("x*y", XY), a)


def test_arc_substitution_on_cusp_arc():
    # x = t^3, y = t^2 in divided powers: a^(j) = j! * [t^j].
    rows = [
        [0, 0, 0, 6, 0, 0],
        [0, 0, 2, 0, 0, 0],
    ]
    a = jet_point(XY, 5, rows)
    assert arc_substitution_check(parse_polynomial("x^2 - y^3", XY), a)


def test_arc_substitution_randomized():
    rng = random.Random(515)
    names = ("x", "y", "z")
    for trial in range(100):
        n = rng.randint(1, 3)
        m = rng.randint(0, 4)
        universe = VariableUniverse.of(*names[:n])
        terms = {}
        for _ in range(rng.randint(1, 5)):
            exps = {v: rng.randint(0, 3) for v in range(n)}
            if sum(exps.values()) > 3:
                continue
            terms[monomial(exps)] = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        f = Polynomial(universe, terms)
        a = jet_point(
            universe,
            m,
            [
                [Fraction(rng.randint(-5, 5), rng.randint(1, 2)) for _ in range(m + 1)]
                for _ in range(n)
            ],
        )
        assert arc_substitution_check(f, a)


def test_arc_substitution_universe_mismatch():
    a = jet_point(XY, 1, [[0, 1], [0, 1]])
    with pytest.raises(ValidationError):
        arc_substitution_check(parse_polynomial("x", VariableUniverse.of("x")), a)
