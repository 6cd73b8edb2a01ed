"""Contact loci inside jet spaces and the dimension bookkeeping around them.

A contact condition of order e on a subscheme Z constrains the first e
divided coefficients of every defining equation to vanish along a jet; the
"exactly e" flavour additionally demands that at position e not all of them
vanish.  Such loci are constructible: a closed part plus open witnesses.
Dimensions are measured on the witness-saturated closed part.

The cylinder codimension routine realizes the image of a Jacobian-stratified
cylinder at a finite level: the stratum of level-(m+e) jets is projected down
to level m by elimination, and the result is certified by recomputing at
m+1, where the value must not move.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import CertificationError, InternalInvariantError, ValidationError
from .groebner import (
    DEFAULT_PAIR_BUDGET,
    EMPTY,
    Dimension,
    IdealPresentation,
    eliminate,
    ideal_equal,
    krull_dimension,
    saturation,
)
from .jets import JetRing, jet_ideal, total_derivative
from .polynomials import (
    Polynomial,
    constant,
    partial_derivative,
    transport,
)
from .singular import EmbeddedVariety, jacobian_ideal, matrix_minors

AT_LEAST = "at-least"
EXACTLY = "exactly"

_STABILIZATION_CAP = 64


@dataclass(frozen=True)
class ContactSpec:
    """Vanishing-order condition on a subscheme, at one jet level."""

    subscheme: IdealPresentation
    order: int
    mode: str
    level: int

    def __post_init__(self) -> None:
        if self.mode not in (AT_LEAST, EXACTLY):
            raise ValidationError(f"unknown contact mode {self.mode!r}")
        if self.order < 0 or self.level < 0:
            raise ValidationError("contact order and level must be non-negative")
        if self.mode == AT_LEAST and self.order > self.level + 1:
            raise ValidationError(
                f"order {self.order} exceeds level {self.level} + 1"
            )
        if self.mode == EXACTLY and self.order > self.level:
            raise ValidationError(
                f"exact order {self.order} exceeds level {self.level}"
            )


@dataclass(frozen=True)
class ConstructibleLocus:
    """Closed conditions plus open witnesses inside one jet ring.

    Each witness ideal J_k means "not all generators of J_k vanish"; with no
    witnesses the locus is closed.
    """

    ring: JetRing
    closed: IdealPresentation
    open_witnesses: tuple[IdealPresentation, ...] = ()

    def __post_init__(self) -> None:
        if self.closed.universe != self.ring.jet_universe:
            raise ValidationError("closed part lives outside the jet ring")
        for witness in self.open_witnesses:
            if witness.universe != self.ring.jet_universe:
                raise ValidationError("witness lives outside the jet ring")


def _derivative_run(g: Polynomial, ring: JetRing, upto: int) -> list[Polynomial]:
    """[g^(0), ..., g^(upto)] as jet polynomials (empty when upto < 0)."""
    run: list[Polynomial] = []
    if upto < 0:
        return run
    current = ring.embed_base(g)
    run.append(current)
    for _ in range(upto):
        current = total_derivative(current, ring)
        run.append(current)
    return run


def contact_locus(
    spec: ContactSpec, ambient: IdealPresentation | None = None
) -> ConstructibleLocus:
    """The level-`spec.level` locus of jets with the prescribed contact order.

    Vanishing to order >= e means the divided coefficients g^(j) vanish for
    j < e.  When `ambient` is given its jet ideal is added, restricting to
    jets of that variety.
    """
    base = spec.subscheme.universe
    ring = JetRing(base, spec.level)
    closed_gens: list[Polynomial] = []
    if ambient is not None:
        if ambient.universe != base:
            raise ValidationError("ambient ideal lives in a different universe")
        closed_gens.extend(jet_ideal(ambient, spec.level).generators)
    witness_gens: list[Polynomial] = []
    depth = spec.order if spec.mode == EXACTLY else spec.order - 1
    for g in spec.subscheme.generators:
        run = _derivative_run(g, ring, depth)
        closed_gens.extend(run[: spec.order])
        if spec.mode == EXACTLY:
            witness_gens.append(run[spec.order])
    closed = IdealPresentation(ring.jet_universe, tuple(closed_gens))
    witnesses = ()
    if spec.mode == EXACTLY:
        witnesses = (IdealPresentation(ring.jet_universe, tuple(witness_gens)),)
    return ConstructibleLocus(ring, closed, witnesses)


def constructible_dimension(
    locus: ConstructibleLocus, max_pairs: int = DEFAULT_PAIR_BUDGET
) -> Dimension:
    """Dimension of the locus, or EMPTY.

    The closed part is saturated by each witness in turn, and the passes
    repeat until a full pass changes nothing; the dimension of the closure
    of the constructible set is then a Gröbner dimension.
    """
    current = locus.closed
    for _ in range(_STABILIZATION_CAP):
        changed = False
        for witness in locus.open_witnesses:
            refined = saturation(current, witness, max_pairs=max_pairs)
            if not ideal_equal(refined, current, max_pairs=max_pairs):
                current = refined
                changed = True
        if not changed:
            return krull_dimension(current, max_pairs=max_pairs)
    raise InternalInvariantError("witness saturation failed to stabilize")


def fiber_dim_formula(e: int, m: int, p: int, n: int) -> int:
    """Dimension of a truncation fiber over a liftable jet: e + (m-p)n.

    Valid in the stable range 2p >= m >= e + p, over a point where the
    Jacobian minor ideal has order e on an n-dimensional variety.
    """
    if e < 0 or n < 0:
        raise ValidationError("order and dimension must be non-negative")
    if not (2 * p >= m >= e + p):
        raise ValidationError(f"need 2p >= m >= e + p, got m={m}, p={p}, e={e}")
    return e + (m - p) * n


def cylinder_codim(
    X: EmbeddedVariety,
    jac_order: int,
    level_hint: int,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> int:
    """Codimension of the level-`level_hint` image of the order-`jac_order`
    Jacobian stratum of the arc space of X.

    Computes at `level_hint` and again at `level_hint + 1`; disagreement
    raises, signalling that the hint is below the stable range.
    """
    if jac_order < 0 or level_hint < jac_order:
        raise ValidationError(
            f"need level >= order >= 0, got level={level_hint}, order={jac_order}"
        )
    first = _cylinder_codim_at(X, jac_order, level_hint, max_pairs)
    second = _cylinder_codim_at(X, jac_order, level_hint + 1, max_pairs)
    if first != second:
        raise CertificationError(
            f"cylinder codimension is unstable: {first} at level {level_hint} "
            f"but {second} at level {level_hint + 1}; raise the level hint"
        )
    return first


def _cylinder_codim_at(
    X: EmbeddedVariety, e: int, m: int, max_pairs: int
) -> int:
    spec = ContactSpec(
        subscheme=jacobian_ideal(X), order=e, mode=EXACTLY, level=m + e
    )
    locus = contact_locus(spec, ambient=X.ideal)
    projected = eliminate(
        locus.closed, locus.ring.vids_with_order_above(m), max_pairs=max_pairs
    )
    # The witness only involves jet orders <= e <= m, so it survives the
    # projection and can be transported by name.
    witness = IdealPresentation(
        projected.universe,
        tuple(
            transport(g, projected.universe)
            for g in locus.open_witnesses[0].generators
        ),
    )
    refined = saturation(projected, witness, max_pairs=max_pairs)
    dim = krull_dimension(refined, max_pairs=max_pairs)
    if dim is EMPTY:
        raise ValidationError(
            f"the order-{e} Jacobian stratum is empty at level {m}"
        )
    return (m + 1) * X.expected_dim - dim


# -- change-of-variable probe ---------------------------------------------------


@dataclass(frozen=True)
class ChangeOfVariableReport:
    """Two independent codimension computations for the same contact locus.

    `by_order` lists (e, codim + e) per Jacobian-determinant order e, with
    None for orders whose locus is empty.  None codimensions mean empty.
    """

    direct_codim: int | None
    transformed_codim: int | None
    attained_at: int | None
    by_order: tuple[tuple[int, int | None], ...]

    @property
    def agree(self) -> bool:
        return self.direct_codim == self.transformed_codim


def _pullback(presentation: IdealPresentation, polys: Sequence[Polynomial]) -> IdealPresentation:
    """Compose every generator with the polynomial map given by `polys`."""
    source = polys[0].universe
    gens = []
    for g in presentation.generators:
        acc = constant(source, 0)
        for mono, coeff in g.terms.items():
            term = constant(source, coeff)
            for vid, exp in mono.exponents:
                term = term * polys[vid] ** exp
            acc = acc + term
        gens.append(acc)
    return IdealPresentation(source, tuple(gens))


def _combined_locus(specs: Sequence[ContactSpec]) -> ConstructibleLocus:
    loci = [contact_locus(s) for s in specs]
    ring = loci[0].ring
    gens = tuple(g for locus in loci for g in locus.closed.generators)
    witnesses = tuple(w for locus in loci for w in locus.open_witnesses)
    return ConstructibleLocus(
        ring, IdealPresentation(ring.jet_universe, gens), witnesses
    )


def change_of_variable_probe(
    map_polys: Sequence[Polynomial],
    conditions: Sequence[ContactSpec],
    e_max: int,
    level: int,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> ChangeOfVariableReport:
    """Compare a contact codimension with its pullback along a dominant map.

    The direct route measures the conditions in the target jet space.  The
    transformed route pulls the conditions back along the map, stratifies by
    the exact vanishing order e of the Jacobian determinant for e up to
    `e_max`, and minimizes (codim + e).  The two numbers agree when the
    level is large enough for the loci involved.
    """
    polys = tuple(map_polys)
    if not polys:
        raise ValidationError("the map needs at least one coordinate polynomial")
    source = polys[0].universe
    for p in polys:
        if p.universe != source:
            raise ValidationError("map coordinates live in different universes")
    if len(polys) != len(source):
        raise ValidationError("the map must have one polynomial per variable")
    specs = tuple(conditions)
    if not specs:
        raise ValidationError("at least one contact condition is required")
    target = specs[0].subscheme.universe
    for s in specs:
        if s.subscheme.universe != target:
            raise ValidationError("contact conditions live in different universes")
        if s.level != level:
            raise ValidationError(
                f"condition carries level {s.level}, probe runs at level {level}"
            )
    if len(target) != len(polys):
        raise ValidationError("map and conditions disagree on the ambient dimension")
    if not 0 <= e_max <= level:
        raise ValidationError(f"need 0 <= e_max <= level, got e_max={e_max}")

    n = len(polys)
    rows = [[partial_derivative(p, vid) for vid in range(n)] for p in polys]
    det = matrix_minors(rows, n, source)[0]
    if det.is_zero:
        raise ValidationError("the map's Jacobian determinant vanishes identically")

    jet_space_dim = (level + 1) * n
    direct_dim = constructible_dimension(_combined_locus(specs), max_pairs=max_pairs)
    direct = None if direct_dim is EMPTY else jet_space_dim - direct_dim

    pulled = tuple(
        ContactSpec(_pullback(s.subscheme, polys), s.order, s.mode, level)
        for s in specs
    )
    by_order: list[tuple[int, int | None]] = []
    best: int | None = None
    attained: int | None = None
    for e in range(e_max + 1):
        det_spec = ContactSpec(
            IdealPresentation(source, (det,)), e, EXACTLY, level
        )
        dim = constructible_dimension(
            _combined_locus(pulled + (det_spec,)), max_pairs=max_pairs
        )
        if dim is EMPTY:
            by_order.append((e, None))
            continue
        value = jet_space_dim - dim + e
        by_order.append((e, value))
        if best is None or value < best:
            best, attained = value, e
    return ChangeOfVariableReport(direct, best, attained, tuple(by_order))
