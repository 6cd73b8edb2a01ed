from __future__ import annotations

import pytest

from jetspace.errors import CertificationError, ValidationError
from jetspace.groebner import (
    IdealPresentation,
    ideal_equal,
    ideal_membership,
    is_unit_ideal,
    krull_dimension,
)
from jetspace.polynomials import VariableUniverse, parse_polynomial
from jetspace.singular import (
    EmbeddedVariety,
    generic_ci_reduction,
    jacobian_ideal,
    jacobian_matrix,
    matrix_minors,
    residue_inclusion_check,
)

XY = VariableUniverse.of("x", "y")
XYZ = VariableUniverse.of("x", "y", "z")


def ideal(universe, *texts):
    return IdealPresentation.of(universe, [parse_polynomial(t, universe) for t in texts])


def variety(universe, dim, *texts):
    return EmbeddedVariety(ideal(universe, *texts), dim)


def cusp():
    return variety(XY, 1, "x^2 - y^3")


def twisted_cubic_cone():
    universe = VariableUniverse.of("x", "y", "z", "w")
    return variety(
        universe, 2, "x*z - y^2", "x*w - y*z", "y*w - z^2"
    )


# -- embedded varieties -------------------------------------------------------


def test_expected_dim_range_checked():
    with pytest.raises(ValidationError):
        variety(XY, 3, "x")
    with pytest.raises(ValidationError):
        EmbeddedVariety(ideal(XY, "x"), -1)


def test_verified_dim_catches_wrong_declaration():
    X = variety(XY, 0, "x^2 - y^3")
    with pytest.raises(ValidationError, match="dimension"):
        X.verified_dim


def test_codim():
    assert cusp().codim == 1
    assert twisted_cubic_cone().codim == 2


# -- jacobian ideals ----------------------------------------------------------


def test_jacobian_ideal_of_cusp():
    jac = jacobian_ideal(cusp())
    assert ideal_equal(jac, ideal(XY, "x", "y^2"))


def test_jacobian_ideal_of_smooth_line_is_unit():
    assert is_unit_ideal(jacobian_ideal(variety(XY, 1, "y")))


def test_jacobian_ideal_of_node_cuts_origin():
    jac = jacobian_ideal(variety(XY, 1, "x*y"))
    assert ideal_equal(jac, ideal(XY, "x", "y"))


def test_jacobian_ideal_of_circle_is_unit():
    assert is_unit_ideal(jacobian_ideal(variety(XY, 1, "x^2 + y^2 - 1")))


def test_jacobian_ideal_of_whitney_umbrella():
    # Singular along the z-axis.
    jac = jacobian_ideal(variety(XYZ, 2, "x^2 - y^2*z"))
    assert krull_dimension(jac) == 1
    assert ideal_membership(parse_polynomial("x", XYZ), jac)
    assert ideal_membership(parse_polynomial("y^2", XYZ), jac)


def test_jacobian_ideal_of_ambient_space_is_unit():
    assert is_unit_ideal(jacobian_ideal(EmbeddedVariety(IdealPresentation.of(XY, []), 2)))


def test_matrix_minors_shape():
    mat = jacobian_matrix(ideal(XYZ, "x*y", "y*z"))
    assert len(mat) == 2 and len(mat[0]) == 3
    assert [str(p) for p in mat[0]] == ["y", "x", "0"]
    minors = matrix_minors(mat, 2, XYZ)
    assert len(minors) == 3  # C(2,2) * C(3,2)


# -- generic reductions -------------------------------------------------------


def test_hypersurface_reduction_is_itself():
    red = generic_ci_reduction(cusp(), seed=11)
    assert red.certified
    assert ideal_equal(red.ci_ideal, cusp().ideal)
    assert is_unit_ideal(red.residue_ideal)


def test_reduction_needs_enough_generators():
    with pytest.raises(ValidationError, match="generators"):
        generic_ci_reduction(variety(XYZ, 1, "x"))  # codim 2, one generator


def test_reduction_rejects_nonreduced_input():
    # On the double line every combination's Jacobian minor ideal (x) wipes
    # out the whole variety, so certification can never succeed.
    with pytest.raises(CertificationError, match="degenerate"):
        generic_ci_reduction(variety(XY, 1, "x^2"), seed=3, max_attempts=3)


def test_reduction_is_deterministic():
    a = generic_ci_reduction(twisted_cubic_cone(), seed=5)
    b = generic_ci_reduction(twisted_cubic_cone(), seed=5)
    assert a.matrix == b.matrix


def test_cone_reduction_certifies_and_has_residual_component():
    X = twisted_cubic_cone()
    red = generic_ci_reduction(X, seed=5)
    assert red.certified
    assert len(red.ci_ideal.generators) == 2
    assert krull_dimension(red.ci_ideal) == 2
    assert not is_unit_ideal(red.residue_ideal)
    # The residual surface really is a different component: its ideal does
    # not contain X's.
    assert not ideal_equal(red.residue_ideal, X.ideal)
    for f in red.ci_ideal.generators:
        assert ideal_membership(f, X.ideal)


def test_residue_inclusion_on_cusp():
    assert residue_inclusion_check(generic_ci_reduction(cusp(), seed=2))


def test_residue_inclusion_on_cone():
    assert residue_inclusion_check(generic_ci_reduction(twisted_cubic_cone(), seed=5))


def test_residue_inclusion_requires_certification():
    red = generic_ci_reduction(cusp(), seed=2)
    stale = type(red)(red.source, red.matrix, red.ci_ideal, red.residue_ideal, False)
    with pytest.raises(ValidationError):
        residue_inclusion_check(stale)
