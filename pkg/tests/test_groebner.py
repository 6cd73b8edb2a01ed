from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from jetspace.errors import BudgetExceededError, ValidationError
from jetspace.groebner import (
    EMPTY,
    IdealPresentation,
    MonomialOrder,
    certify_buchberger,
    eliminate,
    groebner_basis,
    ideal_equal,
    ideal_membership,
    ideal_quotient,
    intersect,
    is_unit_ideal,
    krull_dimension,
    normal_form,
    saturation,
)
from jetspace.polynomials import (
    Polynomial,
    VariableUniverse,
    monomial,
    parse_polynomial,
)

XY = VariableUniverse.of("x", "y")
XYZ = VariableUniverse.of("x", "y", "z")


def ideal(universe: VariableUniverse, *texts: str) -> IdealPresentation:
    return IdealPresentation.of(
        universe, [parse_polynomial(t, universe) for t in texts]
    )


def poly(text: str, universe: VariableUniverse = XY) -> Polynomial:
    return parse_polynomial(text, universe)


# -- basic bases --------------------------------------------------------------


def test_principal_ideal_basis_is_monic_generator():
    gb = groebner_basis(ideal(XY, "x^2 - y^3"))
    assert gb.basis == (poly("y^3 - x^2"),)
    assert certify_buchberger(gb)


def test_unit_ideal_detected():
    gb = groebner_basis(ideal(XY, "x", "x - 1"))
    assert gb.is_unit
    assert gb.basis == (poly("1"),)


def test_unit_ideal_needing_one_reduction():
    # y*(x*y - 1) and y^2*x give 1 after reduction.
    assert is_unit_ideal(ideal(XY, "x*y - 1", "x^2"))


def test_zero_ideal():
    gb = groebner_basis(IdealPresentation.of(XY, []))
    assert gb.basis == ()
    assert not gb.is_unit


def test_groebner_results_are_cached():
    a = groebner_basis(ideal(XY, "x^2 - y^3", "x*y"))
    b = groebner_basis(ideal(XY, "x^2 - y^3", "x*y"))
    assert a is b


def test_reduced_basis_is_canonical():
    # Permuting and rescaling generators cannot change the reduced basis.
    a = groebner_basis(ideal(XY, "x^2 - y^3", "2*x*y"))
    b = groebner_basis(ideal(XY, "x*y", "3*y^3 - 3*x^2"))
    assert a.basis == b.basis


def test_certify_buchberger_on_nontrivial_basis():
    cyclic3 = ideal(XYZ, "x + y + z", "x*y + y*z + z*x", "x*y*z - 1")
    gb = groebner_basis(cyclic3)
    assert certify_buchberger(gb)
    assert not gb.is_unit


def test_pair_budget_is_enforced():
    wxyz = VariableUniverse.of("x", "y", "z", "w")
    cyclic4 = ideal(
        wxyz,
        "x + y + z + w",
        "x*y + y*z + z*w + w*x",
        "x*y*z + y*z*w + z*w*x + w*x*y",
        "x*y*z*w - 1",
    )
    with pytest.raises(BudgetExceededError, match="budget"):
        groebner_basis(cyclic4, max_pairs=2)
    # The full computation fits comfortably in the default budget.
    assert certify_buchberger(groebner_basis(cyclic4))


# -- normal forms -------------------------------------------------------------


def test_normal_form_of_generator_is_zero():
    gens = ideal(XY, "x^2 - y^3", "x*y")
    gb = groebner_basis(gens)
    for g in gens.generators:
        assert normal_form(g, gb).is_zero


def test_normal_form_under_lex():
    gb = groebner_basis(ideal(XY, "x^2 - y^3"), order=MonomialOrder.lex())
    assert gb.basis == (poly("x^2 - y^3"),)
    remainder = normal_form(poly("x^3"), gb)
    assert remainder == poly("x*y^3")
    assert ideal_membership(poly("x^3") - remainder, ideal(XY, "x^2 - y^3"))


def test_normal_form_is_idempotent():
    gb = groebner_basis(ideal(XY, "x^2 - y^3", "x*y"))
    r = normal_form(poly("x^4 + x*y + y"), gb)
    assert normal_form(r, gb) == r


def test_normal_form_universe_mismatch():
    gb = groebner_basis(ideal(XY, "x"))
    with pytest.raises(ValidationError):
        normal_form(parse_polynomial("x", XYZ), gb)


def test_membership_by_explicit_combinations():
    # f = h1*g1 + h2*g2 must always reduce to zero; the remainder of a random
    # f must differ from f by an ideal member.
    rng = random.Random(91)

    def rand_poly(universe):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            exps = {v: rng.randint(0, 2) for v in range(len(universe))}
            terms[monomial(exps)] = Fraction(rng.randint(-5, 5))
        return Polynomial(universe, terms)

    for _ in range(20):
        g1, g2 = rand_poly(XY), rand_poly(XY)
        h1, h2 = rand_poly(XY), rand_poly(XY)
        gens = IdealPresentation.of(XY, [g1, g2])
        gb = groebner_basis(gens)
        assert normal_form(h1 * g1 + h2 * g2, gb).is_zero

        f = rand_poly(XY)
        r = normal_form(f, gb)
        assert normal_form(f - r, gb).is_zero
        assert normal_form(r, gb) == r


# -- ideal equality -----------------------------------------------------------


def test_ideal_equal_ignores_presentation():
    assert ideal_equal(ideal(XY, "x - y", "y^2"), ideal(XY, "y^2", "x - y", "x*y"))
    assert not ideal_equal(ideal(XY, "x"), ideal(XY, "x^2"))


def test_ideal_equal_requires_common_universe():
    with pytest.raises(ValidationError):
        ideal_equal(ideal(XY, "x"), ideal(XYZ, "x"))


# -- dimension ----------------------------------------------------------------


def test_dimension_of_full_space():
    assert krull_dimension(IdealPresentation.of(XYZ, [])) == 3


def test_dimension_of_plane_curve():
    assert krull_dimension(ideal(XY, "x^2 - y^3")) == 1


def test_dimension_of_union_of_axes_with_embedded_part():
    assert krull_dimension(ideal(XY, "x*y", "x^2")) == 1


def test_dimension_of_point():
    assert krull_dimension(ideal(XY, "x", "y")) == 0


def test_dimension_of_empty_locus_is_empty_marker():
    result = krull_dimension(ideal(XY, "x", "x - 1"))
    assert result is EMPTY
    assert repr(result) == "EMPTY"


def test_dimension_matches_brute_force_on_monomial_ideals():
    rng = random.Random(4096)
    universe = VariableUniverse.of("a", "b", "c", "d")

    def brute_force(supports, nvars):
        for size in range(nvars, -1, -1):
            for keep in combinations(range(nvars), size):
                kept = set(keep)
                if not any(s <= kept for s in supports):
                    return size
        raise AssertionError("unreachable")

    for _ in range(30):
        gens = []
        for _ in range(rng.randint(1, 4)):
            exps = {v: rng.randint(0, 2) for v in range(4)}
            if any(exps.values()):
                gens.append(Polynomial(universe, {monomial(exps): Fraction(1)}))
        if not gens:
            continue
        presentation = IdealPresentation.of(universe, gens)
        supports = [frozenset(g.variables()) for g in gens]
        assert krull_dimension(presentation) == brute_force(supports, 4)


# -- quotient, saturation, intersection ---------------------------------------


def test_quotient_oracle():
    quotient = ideal_quotient(ideal(XY, "x^2", "x*y"), ideal(XY, "x"))
    assert ideal_equal(quotient, ideal(XY, "x", "y"))


def test_quotient_by_unit_is_identity():
    base = ideal(XY, "x^2 - y^3", "x*y")
    assert ideal_equal(ideal_quotient(base, ideal(XY, "1")), base)


def test_quotient_by_zero_is_whole_ring():
    assert is_unit_ideal(ideal_quotient(ideal(XY, "x"), IdealPresentation.of(XY, [])))


def test_quotient_single_generator():
    assert ideal_equal(ideal_quotient(ideal(XY, "x*y"), ideal(XY, "x")), ideal(XY, "y"))


def test_saturation_removes_embedded_component():
    assert ideal_equal(saturation(ideal(XY, "x^2*y"), ideal(XY, "y")), ideal(XY, "x^2"))


def test_saturation_reaches_unit():
    assert is_unit_ideal(saturation(ideal(XY, "x*y", "x^2"), ideal(XY, "x")))


def test_saturation_fixes_prime_not_containing_divisor():
    curve = ideal(XY, "x^2 - y^3")
    assert ideal_equal(saturation(curve, ideal(XY, "x")), curve)


def test_intersection_of_coordinate_axes():
    assert ideal_equal(intersect(ideal(XY, "x"), ideal(XY, "y")), ideal(XY, "x*y"))


def test_quotient_membership_property():
    # f is in (I : J) exactly when f*J is inside I; check both directions on
    # a nonprincipal example.
    base = ideal(XY, "x^2", "x*y^2")
    divisor = ideal(XY, "y")
    quotient = ideal_quotient(base, divisor)
    for f in quotient.generators:
        assert ideal_membership(f * poly("y"), base)
    assert not ideal_membership(poly("x"), base)
    assert ideal_membership(poly("x*y"), quotient)


# -- elimination --------------------------------------------------------------


def test_eliminate_parametrized_curve():
    xyt = VariableUniverse.of("x", "y", "t")
    image = eliminate(ideal(xyt, "x - t^2", "y - t^3"), {xyt.index("t")})
    assert image.universe.names == ("x", "y")
    assert image.generators == (parse_polynomial("x^3 - y^2", image.universe),)


def test_eliminate_dominant_projection_gives_zero_ideal():
    image = eliminate(ideal(XY, "y - x^2"), {0})
    assert image.universe.names == ("y",)
    assert image.generators == ()


def test_eliminate_empty_block_is_identity():
    base = ideal(XY, "x^2 - y^3")
    same = eliminate(base, set())
    assert same.universe == XY
    assert same.generators == base.generators


def test_eliminate_rejects_foreign_ids():
    with pytest.raises(ValidationError):
        eliminate(ideal(XY, "x"), {7})


# -- order validation ---------------------------------------------------------


def test_monomial_order_validation():
    with pytest.raises(ValidationError):
        MonomialOrder("weight")
    with pytest.raises(ValidationError):
        MonomialOrder("block", ())
    with pytest.raises(ValidationError):
        MonomialOrder("block", (2, 1))


def test_block_order_key_rejects_out_of_range_block():
    order = MonomialOrder.block_elimination({5})
    with pytest.raises(ValidationError):
        groebner_basis(ideal(XY, "x"), order=order)
