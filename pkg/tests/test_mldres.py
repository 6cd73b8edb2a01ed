from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from pathlib import Path

import pytest

from jetspace.errors import ValidationError
from jetspace.groebner import EMPTY
from jetspace.mldres import (
    NEG_INF,
    DegenerateMinimizerWarning,
    DivisorRecord,
    ResolutionData,
    contact_codim_combinatorial,
    log_discrepancies,
    mld_from_divisors,
    mld_via_contact,
    resolution_from_json,
)

DATA = Path(__file__).parent / "data"


def load(name):
    return resolution_from_json((DATA / name).read_text())


def reweighted(data, *weights):
    return dataclasses.replace(data, weights=tuple(Fraction(q) for q in weights))


@pytest.fixture(scope="module")
def cusp_res():
    return load("cusp_res.json")


@pytest.fixture(scope="module")
def node_res():
    return load("node_res.json")


@pytest.fixture(scope="module")
def cone_res():
    return load("quadric_cone_res.json")


@pytest.fixture(scope="module")
def smooth_res():
    return load("smooth_point_res.json")


@pytest.fixture(scope="module")
def ambient_quadric_res():
    return load("ambient_quadric_res.json")


# -- the direct route ----------------------------------------------------------


@pytest.mark.parametrize(
    "q, expected",
    [
        (Fraction(0), Fraction(2)),
        (Fraction(1, 2), Fraction(1)),
        (Fraction(3, 4), Fraction(1, 2)),
        (Fraction(5, 6), Fraction(0)),
    ],
    ids=["0", "1/2", "3/4", "5/6"],
)
def test_cusp_direct_values(cusp_res, q, expected):
    assert mld_from_divisors(reweighted(cusp_res, q)) == expected


def test_cusp_direct_goes_negative_at_weight_one(cusp_res):
    assert mld_from_divisors(reweighted(cusp_res, 1)) is NEG_INF


def test_node_direct_values(node_res):
    assert mld_from_divisors(node_res) == Fraction(1)
    assert mld_from_divisors(reweighted(node_res, 1)) == Fraction(0)


def test_cone_direct_value(cone_res):
    assert mld_from_divisors(cone_res) == Fraction(1)


def test_smooth_point_direct_value(smooth_res):
    """A smooth surface point has minimal log discrepancy 2."""
    assert mld_from_divisors(smooth_res) == Fraction(2)


def test_ambient_quadric_direct_value(ambient_quadric_res):
    assert mld_from_divisors(ambient_quadric_res) == Fraction(1)


def test_meets_only_divisor_can_force_negative(cusp_res):
    # push the weight past the strict transform's threshold: the strict
    # transform only meets W, yet its negative discrepancy still counts
    data = reweighted(cusp_res, 2)
    values = dict(log_discrepancies(data))
    assert values["C"] < 0
    assert mld_from_divisors(data) is NEG_INF


def test_no_in_w_divisor_rejected(cusp_res):
    stripped = dataclasses.replace(
        cusp_res,
        divisors=tuple(
            dataclasses.replace(d, in_w=False) for d in cusp_res.divisors
        ),
    )
    with pytest.raises(ValidationError):
        mld_from_divisors(stripped)


def test_log_discrepancies_table(cusp_res):
    table = dict(log_discrepancies(reweighted(cusp_res, Fraction(5, 6))))
    assert table == {
        "E1": Fraction(1, 3),
        "E2": Fraction(1, 2),
        "E3": Fraction(0),
        "C": Fraction(1, 6),
    }


# -- the contact-codimension route ----------------------------------------------


def test_single_divisor_codim_is_one_term(cusp_res):
    solo = ResolutionData(
        ambient_dim=2,
        index_r=1,
        weights=(Fraction(1),),
        divisors=(
            DivisorRecord("E", Fraction(4), 0, (6,), True, True),
        ),
        faces=frozenset(),
    )
    assert contact_codim_combinatorial(solo, (6,), 0) == Fraction(5)


def test_cusp_codim_at_order_six(cusp_res):
    assert contact_codim_combinatorial(cusp_res, (6,), 0) == Fraction(5)


def test_codim_empty_when_no_vector_meets_w(node_res):
    # order 1 on the node needs a branch divisor, and branches are not in W
    assert contact_codim_combinatorial(node_res, (1,), 0) is EMPTY


def test_codim_empty_at_zero_orders(cusp_res):
    assert contact_codim_combinatorial(cusp_res, (0,), 0) is EMPTY


def test_codim_respects_faces(node_res):
    # w = 2 via the two branches would need them to intersect; they do not,
    # so the only admissible vector is the exceptional divisor itself
    assert contact_codim_combinatorial(node_res, (2,), 0) == Fraction(2)


def test_codim_rejects_negative_orders(cusp_res):
    with pytest.raises(ValidationError):
        contact_codim_combinatorial(cusp_res, (-1,), 0)
    with pytest.raises(ValidationError):
        contact_codim_combinatorial(cusp_res, (1,), -2)


def test_codim_checks_vector_length(cusp_res):
    with pytest.raises(ValidationError):
        contact_codim_combinatorial(cusp_res, (1, 1), 0)


def test_ill_posed_unconstrained_negative_divisor():
    with pytest.raises(ValidationError, match="ill-posed"):
        contact_codim_combinatorial(
            ResolutionData(
                ambient_dim=2,
                index_r=1,
                weights=(),
                divisors=(
                    DivisorRecord("E", Fraction(-2), 0, (), True, True),
                ),
                faces=frozenset(),
            ),
            (),
            0,
        )


def test_objective_neutral_divisor_warns():
    data = ResolutionData(
        ambient_dim=2,
        index_r=1,
        weights=(),
        divisors=(
            DivisorRecord("E", Fraction(1), 0, (), True, True),
            DivisorRecord("F", Fraction(-1), 0, (), False, True),
        ),
        faces=frozenset((frozenset((0, 1)),)),
    )
    with pytest.warns(DegenerateMinimizerWarning):
        assert contact_codim_combinatorial(data, (), 0) == Fraction(2)


def test_codim_scaling_in_r(cone_res):
    """Scaling r, every z, and ell together only moves the ell/r term."""
    base = contact_codim_combinatorial(cone_res, (), 1)
    for k in (2, 3, 5):
        scaled = ResolutionData(
            ambient_dim=cone_res.ambient_dim,
            index_r=k * cone_res.index_r,
            weights=cone_res.weights,
            divisors=tuple(
                dataclasses.replace(d, z=k * d.z) for d in cone_res.divisors
            ),
            faces=cone_res.faces,
        )
        value = contact_codim_combinatorial(scaled, (), k)
        assert value - Fraction(k, scaled.index_r) == base - Fraction(
            1, cone_res.index_r
        )


def test_codim_concatenation_inequality(cusp_res):
    # a sum of realizable orders is realized by the sum vector whenever the
    # union of the minimizing supports is a face, so the minimum cannot
    # exceed the sum there; (2)+(3) is the face-incompatible counterpoint
    pairs = [((2,), 0), ((6,), 0), ((3,), 0)]
    for (w1, l1) in pairs:
        for (w2, l2) in pairs:
            both = contact_codim_combinatorial(
                cusp_res, tuple(a + b for a, b in zip(w1, w2)), l1 + l2
            )
            if both is EMPTY:
                continue
            one = contact_codim_combinatorial(cusp_res, w1, l1)
            two = contact_codim_combinatorial(cusp_res, w2, l2)
            assert both <= one + two
    assert contact_codim_combinatorial(cusp_res, (5,), 0) is EMPTY


# -- the two routes agree --------------------------------------------------------


@pytest.mark.parametrize(
    "q, expected",
    [
        (Fraction(0), Fraction(2)),
        (Fraction(1, 2), Fraction(1)),
        (Fraction(3, 4), Fraction(1, 2)),
        (Fraction(5, 6), Fraction(0)),
    ],
    ids=["0", "1/2", "3/4", "5/6"],
)
def test_cusp_contact_route(cusp_res, q, expected):
    assert mld_via_contact(reweighted(cusp_res, q)) == expected


def test_cusp_contact_route_negative_weight_one(cusp_res):
    assert mld_via_contact(reweighted(cusp_res, 1)) is NEG_INF


def test_agreement_on_corpus(
    cusp_res, node_res, cone_res, smooth_res, ambient_quadric_res
):
    """Both routes give the same exact rational on every corpus instance."""
    instances = [
        reweighted(cusp_res, q)
        for q in (0, Fraction(1, 2), Fraction(3, 4), Fraction(5, 6), 1)
    ]
    instances += [node_res, reweighted(node_res, 1)]
    instances += [cone_res, smooth_res, ambient_quadric_res]
    for data in instances:
        assert mld_from_divisors(data) == mld_via_contact(data)


def test_monotone_in_weights(cusp_res, node_res, ambient_quadric_res):
    for data in (cusp_res, node_res, ambient_quadric_res):
        steps = [Fraction(k, 6) for k in range(8)]
        direct = [mld_from_divisors(reweighted(data, q)) for q in steps]
        contact = [mld_via_contact(reweighted(data, q)) for q in steps]
        for a, b in zip(direct, direct[1:]):
            assert b <= a
        for a, b in zip(contact, contact[1:]):
            assert b <= a


# -- data validation --------------------------------------------------------------


def test_in_w_requires_meets_w():
    with pytest.raises(ValidationError):
        DivisorRecord("E", Fraction(1), 0, (), True, False)


def test_negative_alpha_rejected():
    with pytest.raises(ValidationError):
        DivisorRecord("E", Fraction(1), 0, (-1,), True, True)


def test_kappa_must_clear_index():
    with pytest.raises(ValidationError, match="kappa"):
        ResolutionData(
            ambient_dim=2,
            index_r=2,
            weights=(),
            divisors=(
                DivisorRecord("E", Fraction(1, 3), 0, (), True, True),
            ),
            faces=frozenset(),
        )


def test_fractional_kappa_allowed_when_cleared():
    data = ResolutionData(
        ambient_dim=2,
        index_r=2,
        weights=(),
        divisors=(DivisorRecord("E", Fraction(1, 2), 0, (), True, True),),
        faces=frozenset(),
    )
    assert mld_from_divisors(data) == Fraction(3, 2)


def test_alpha_length_must_match_weights():
    with pytest.raises(ValidationError):
        ResolutionData(
            ambient_dim=2,
            index_r=1,
            weights=(Fraction(1),),
            divisors=(DivisorRecord("E", Fraction(1), 0, (), True, True),),
            faces=frozenset(),
        )


def test_faces_are_subset_closed(cusp_res):
    e1 = cusp_res.index_of("E1")
    e3 = cusp_res.index_of("E3")
    assert frozenset((e1, e3)) in cusp_res.faces
    assert frozenset((e1,)) in cusp_res.faces
    assert frozenset((e3,)) in cusp_res.faces


def test_every_singleton_is_a_face(node_res):
    for j in range(len(node_res.divisors)):
        assert frozenset((j,)) in node_res.faces


def test_duplicate_names_rejected():
    with pytest.raises(ValidationError):
        ResolutionData(
            ambient_dim=2,
            index_r=1,
            weights=(),
            divisors=(
                DivisorRecord("E", Fraction(1), 0, (), True, True),
                DivisorRecord("E", Fraction(2), 0, (), True, True),
            ),
            faces=frozenset(),
        )


# -- the JSON loader ---------------------------------------------------------------


def test_loader_round_trip(cusp_res):
    assert cusp_res.ambient_dim == 2
    assert cusp_res.index_r == 1
    assert cusp_res.weights == (Fraction(5, 6),)
    assert [d.name for d in cusp_res.divisors] == ["E1", "E2", "E3", "C"]
    assert cusp_res.divisors[2].kappa == Fraction(4)
    assert cusp_res.divisors[3].in_w is False
    assert cusp_res.divisors[3].meets_w is True


def test_loader_rejects_floats():
    text = json.dumps(
        {
            "ambient_dim": 2,
            "r": 1,
            "weights": [0.5],
            "divisors": [],
        }
    )
    with pytest.raises(ValidationError, match="rationals"):
        resolution_from_json(text)


def test_loader_rejects_unknown_face_names():
    text = json.dumps(
        {
            "ambient_dim": 2,
            "r": 1,
            "weights": [],
            "divisors": [
                {
                    "name": "E",
                    "kappa": 1,
                    "z": 0,
                    "alpha": [],
                    "in_W": True,
                    "meets_W": True,
                }
            ],
            "faces": [["ghost"]],
        }
    )
    with pytest.raises(ValidationError, match="ghost"):
        resolution_from_json(text)


def test_loader_rejects_missing_fields():
    with pytest.raises(ValidationError, match="missing"):
        resolution_from_json(json.dumps({"ambient_dim": 2}))


def test_loader_rejects_bad_json():
    with pytest.raises(ValidationError):
        resolution_from_json("{not json")


def test_neg_inf_is_a_singleton_and_orders_below_rationals():
    assert NEG_INF < Fraction(-100)
    assert not NEG_INF < NEG_INF
    assert NEG_INF <= NEG_INF
    assert Fraction(0) > NEG_INF
    assert repr(NEG_INF) == "-inf"
