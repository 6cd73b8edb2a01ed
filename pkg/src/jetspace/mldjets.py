"""Minimal log discrepancies measured directly in jet spaces.

A pair here is an ambient variety (affine space, or an embedded complete
intersection) together with weighted subschemes and a center.  The minimal
log discrepancy along the center is an infimum of codimension expressions
over contact cells: prescribed vanishing orders on each weighted subscheme,
an exact vanishing order on the Jacobian ideal of the ambient variety, an
exact order on the supplied non-lci ideal, and passage through the center.
Each cell is evaluated at one admissible jet level; the expression is level
independent inside its admissible window, which we assert by recomputation
where the window allows it.

The infimum runs over an infinite family, so a finite scan can only certify
an upper bound in general.  A result whose minimizing cell is interior to
the search box is reported as-is; one on the boundary carries an explicit
upper-bound-only flag.  Negative values collapse to -infinity, since the
cell family can then be rescaled to push the value arbitrarily low.

The log-canonicity check scans the companion inequality, which quantifies
over the same cells without the center condition, and the
inversion-of-adjunction report runs the estimator on both sides of the
adjunction: the embedded variety with its Jacobian stratification against
the smooth ambient space with the variety adjoined to the boundary at
weight equal to its codimension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .contact import (
    AT_LEAST,
    EXACTLY,
    ConstructibleLocus,
    ContactSpec,
    constructible_dimension,
    contact_locus,
)
from .errors import InternalInvariantError, ValidationError
from .groebner import DEFAULT_PAIR_BUDGET, EMPTY, IdealPresentation, ideal_membership
from .mldres import NEG_INF, MldValue
from .polynomials import VariableUniverse
from .singular import EmbeddedVariety, jacobian_ideal


@dataclass(frozen=True)
class SmoothSpace:
    """Affine space as an ambient: no equations, every point smooth."""

    universe: VariableUniverse

    @property
    def dim(self) -> int:
        return len(self.universe)


WeightedSubscheme = tuple[IdealPresentation, Fraction]


def _is_unit_presentation(ideal: IdealPresentation) -> bool:
    # Syntactic check only: a nonzero constant among the generators.
    return any(g.total_degree == 0 for g in ideal.generators)


@dataclass(frozen=True)
class PairSpec:
    """An ambient variety with weighted subschemes and a center.

    `boundary` lists (subscheme, weight) pairs with nonnegative rational
    weights.  `center` must cut out a proper closed subset.  `non_lci` is
    the ideal whose vanishing order enters the value with coefficient
    1/index_r; passing None (or a unit presentation, which is normalized
    to None) asserts the ambient variety is a complete intersection.
    """

    ambient: EmbeddedVariety | SmoothSpace
    boundary: tuple[WeightedSubscheme, ...] = ()
    center: IdealPresentation | None = None
    non_lci: IdealPresentation | None = None
    index_r: int = 1

    def __post_init__(self) -> None:
        if self.center is None:
            raise ValidationError("a pair needs a center")
        object.__setattr__(
            self,
            "boundary",
            tuple((sub, Fraction(q)) for sub, q in self.boundary),
        )
        if self.index_r < 1:
            raise ValidationError("index_r must be a positive integer")
        universe = self.universe
        for sub, q in self.boundary:
            if q < 0:
                raise ValidationError("boundary weights must be nonnegative")
            if sub.universe != universe:
                raise ValidationError(
                    "boundary subscheme lives in a different universe"
                )
        if self.center.universe != universe:
            raise ValidationError("center lives in a different universe")
        if not self.center.generators:
            raise ValidationError("the center must cut out a proper closed subset")
        if self.non_lci is not None:
            if self.non_lci.universe != universe:
                raise ValidationError("non-lci ideal lives in a different universe")
            if _is_unit_presentation(self.non_lci):
                object.__setattr__(self, "non_lci", None)
            elif not self.non_lci.generators:
                raise ValidationError("the non-lci ideal must not be the zero ideal")
        if self.is_smooth and self.non_lci is not None:
            raise ValidationError(
                "a smooth ambient space is a complete intersection; "
                "its non-lci ideal must be the unit ideal"
            )

    @property
    def is_smooth(self) -> bool:
        return isinstance(self.ambient, SmoothSpace)

    @property
    def universe(self) -> VariableUniverse:
        if isinstance(self.ambient, SmoothSpace):
            return self.ambient.universe
        return self.ambient.ideal.universe

    @property
    def variety_dim(self) -> int:
        if isinstance(self.ambient, SmoothSpace):
            return self.ambient.dim
        return self.ambient.expected_dim


@dataclass(frozen=True)
class SearchBounds:
    """Caps for the scan: per-component contact orders, jet level, orders
    on the Jacobian and the non-lci ideal."""

    w_max: tuple[int, ...]
    m_max: int
    e_max: int = 0
    eprime_max: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "w_max", tuple(int(c) for c in self.w_max))
        if any(c < 0 for c in self.w_max):
            raise ValidationError("w_max entries must be nonnegative")
        if self.e_max < 0 or self.eprime_max < 0 or self.m_max < 0:
            raise ValidationError("bounds must be nonnegative")
        top = max(self.w_max, default=0)
        floor = max(
            2 * self.e_max, self.e_max + self.eprime_max, self.e_max + top
        )
        if self.m_max < floor:
            raise ValidationError(
                f"m_max = {self.m_max} is below {floor}, the level every "
                "cell in this box needs to be admissible"
            )


# Scan cell: contact orders on the boundary components, the Jacobian
# ideal, and the non-lci ideal, plus the jet level evaluated at.
Cell = tuple[tuple[int, ...], int, int, int]


@dataclass(frozen=True)
class MldEstimate:
    """Result of a bounded cell scan.

    `witness` is the minimizing cell (w, e, eprime, m).  When it touches
    the search box boundary the true infimum may be smaller, and
    `upper_bound_only` says so; -infinity results are exact.
    """

    value: MldValue
    witness: Cell
    upper_bound_only: bool
    cells_scanned: int


def _merged_locus(
    conditions: Sequence[ContactSpec], ambient: IdealPresentation | None
) -> ConstructibleLocus:
    """One constructible locus for the conjunction of contact conditions."""
    loci = [contact_locus(conditions[0], ambient=ambient)]
    loci.extend(contact_locus(spec) for spec in conditions[1:])
    ring = loci[0].ring
    closed_gens = dict.fromkeys(
        g for locus in loci for g in locus.closed.generators
    )
    witnesses = tuple(w for locus in loci for w in locus.open_witnesses)
    return ConstructibleLocus(
        ring,
        IdealPresentation(ring.jet_universe, tuple(closed_gens)),
        witnesses,
    )


def _cell_locus(
    pair: PairSpec,
    w: tuple[int, ...],
    e: int,
    eprime: int,
    m: int,
    jacobian: IdealPresentation | None,
) -> ConstructibleLocus:
    conditions = [ContactSpec(pair.center, 1, AT_LEAST, m)]
    for (sub, _), order in zip(pair.boundary, w):
        if order:
            conditions.append(ContactSpec(sub, order, AT_LEAST, m))
    if jacobian is not None:
        conditions.append(ContactSpec(jacobian, e, EXACTLY, m))
    if pair.non_lci is not None:
        conditions.append(ContactSpec(pair.non_lci, eprime, EXACTLY, m))
    ambient = None if pair.is_smooth else pair.ambient.ideal
    return _merged_locus(conditions, ambient)


def _cell_value(
    pair: PairSpec,
    w: tuple[int, ...],
    e: int,
    eprime: int,
    m: int,
    jacobian: IdealPresentation | None,
    max_pairs: int,
) -> Fraction | None:
    """The codimension expression at one cell; None when the cell is empty."""
    locus = _cell_locus(pair, w, e, eprime, m, jacobian)
    dim = constructible_dimension(locus, max_pairs=max_pairs)
    if dim is EMPTY:
        return None
    weight_total = sum(
        (q * order for (_, q), order in zip(pair.boundary, w)),
        start=Fraction(0),
    )
    return (
        (m + 1) * pair.variety_dim
        + Fraction(eprime, pair.index_r)
        - weight_total
        - dim
    )


def _admissible_cells(
    pair: PairSpec, bounds: SearchBounds
) -> Iterator[tuple[tuple[int, ...], int, int, int]]:
    """Cells in scan order, each paired with its minimal admissible level."""
    e_range: Sequence[int] = (0,) if pair.is_smooth else range(bounds.e_max + 1)
    ep_range: Sequence[int] = (
        range(bounds.eprime_max + 1) if pair.non_lci is not None else (0,)
    )
    w_grid = itertools.product(*(range(cap + 1) for cap in bounds.w_max))
    for w in w_grid:
        top = max(w, default=0)
        for e in e_range:
            for eprime in ep_range:
                level = max(2 * e, e + eprime, e + top)
                if level <= bounds.m_max:
                    yield w, e, eprime, level


def mld_jet_estimate(
    pair: PairSpec,
    bounds: SearchBounds,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> MldEstimate:
    """Bounded scan for the minimal log discrepancy along the center.

    Every cell in the box is evaluated at its minimal admissible jet
    level; for an embedded ambient the value is recomputed one level up
    (when the box allows) and must agree.  Empty cells contribute
    nothing.  A strictly negative minimum collapses to -infinity.
    """
    if len(bounds.w_max) != len(pair.boundary):
        raise ValidationError(
            f"bounds carry {len(bounds.w_max)} contact caps for "
            f"{len(pair.boundary)} boundary components"
        )
    jacobian = None if pair.is_smooth else jacobian_ideal(pair.ambient)
    best: Fraction | None = None
    best_cell: Cell | None = None
    scanned = 0
    for w, e, eprime, level in _admissible_cells(pair, bounds):
        value = _cell_value(pair, w, e, eprime, level, jacobian, max_pairs)
        scanned += 1
        if not pair.is_smooth and level + 1 <= bounds.m_max:
            again = _cell_value(pair, w, e, eprime, level + 1, jacobian, max_pairs)
            if again != value:
                raise InternalInvariantError(
                    f"cell {(w, e, eprime)} is not level-stable: "
                    f"{value} at level {level}, {again} at level {level + 1}"
                )
        if value is None:
            continue
        if best is None or value < best:
            best = value
            best_cell = (w, e, eprime, level)
    if best is None or best_cell is None:
        raise ValidationError(
            "every cell in the search box is empty; the center carries "
            "no jets of the ambient variety"
        )
    if best < 0:
        # Rescaling the minimizing cell drives the value below any bound,
        # so a negative minimum is already the exact answer.
        return MldEstimate(NEG_INF, best_cell, False, scanned)
    w_star, e_star, ep_star, _ = best_cell
    on_edge = any(order == cap for order, cap in zip(w_star, bounds.w_max))
    if not pair.is_smooth and e_star == bounds.e_max:
        on_edge = True
    if pair.non_lci is not None and ep_star == bounds.eprime_max:
        on_edge = True
    return MldEstimate(best, best_cell, on_edge, scanned)


@dataclass(frozen=True)
class LcReport:
    """Outcome of the log-canonicity inequality scan.

    `log_canonical` is a within-bounds verdict: True means no cell in the
    box violates the inequality, False comes with the violating cell as
    `certificate` = (w, ell).
    """

    log_canonical: bool
    certificate: tuple[tuple[int, ...], int] | None
    bounds: SearchBounds


def lc_check(
    pair: PairSpec,
    bounds: SearchBounds,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> LcReport:
    """Scan the log-canonicity inequality over the bounded cell grid.

    For each cell the codimension of the contact locus (no center
    condition here) must be at least ell/index_r plus the weighted sum
    of the contact orders, where ell is the order on the non-lci ideal.
    The first violated cell is returned as a certificate.
    """
    if len(bounds.w_max) != len(pair.boundary):
        raise ValidationError(
            f"bounds carry {len(bounds.w_max)} contact caps for "
            f"{len(pair.boundary)} boundary components"
        )
    jacobian = None if pair.is_smooth else jacobian_ideal(pair.ambient)
    for w, e, ell, level in _admissible_cells(pair, bounds):
        if not any(w) and e == 0 and ell == 0:
            continue  # the empty condition holds with codimension 0
        if pair.is_smooth:
            # Contact conditions alone define a cylinder, so any level
            # carrying all the equations computes its codimension.
            level = max(max(w, default=1) - 1, 0)
        conditions = []
        for (sub, _), order in zip(pair.boundary, w):
            if order:
                conditions.append(ContactSpec(sub, order, AT_LEAST, level))
        if jacobian is not None:
            conditions.append(ContactSpec(jacobian, e, EXACTLY, level))
        if pair.non_lci is not None:
            conditions.append(ContactSpec(pair.non_lci, ell, EXACTLY, level))
        if not conditions:
            continue
        ambient = None if pair.is_smooth else pair.ambient.ideal
        locus = _merged_locus(conditions, ambient)
        dim = constructible_dimension(locus, max_pairs=max_pairs)
        if dim is EMPTY:
            continue
        if pair.is_smooth:
            codim = (level + 1) * pair.variety_dim - dim
        else:
            codim = (level + 1) * pair.variety_dim + e - dim
        required = Fraction(ell, pair.index_r) + sum(
            (q * order for (_, q), order in zip(pair.boundary, w)),
            start=Fraction(0),
        )
        if codim < required:
            return LcReport(False, (w, ell), bounds)
    return LcReport(True, None, bounds)


@dataclass(frozen=True)
class IoaReport:
    """Both sides of the adjunction, with their witnesses."""

    left: MldEstimate
    right: MldEstimate

    @property
    def agree(self) -> bool:
        return self.left.value == self.right.value


def ioa_check(
    ambient_dim: int,
    variety: EmbeddedVariety,
    boundary: Sequence[WeightedSubscheme],
    center: IdealPresentation,
    bounds: SearchBounds,
    normal: bool = True,
    non_lci: IdealPresentation | None = None,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> IoaReport:
    """Compare the discrepancy along the center on the variety against the
    ambient pair that adjoins the variety at weight equal to its codimension.

    The equality needs a normal complete intersection.  Normality is the
    caller's assertion: passing normal=False is refused rather than
    computed incorrectly.  A non-unit non-lci ideal is likewise refused;
    only the complete-intersection case is supported.
    """
    if not normal:
        raise ValidationError(
            "the adjunction comparison needs a normal variety; "
            "refusing the caller's normal=False assertion"
        )
    if non_lci is not None and not _is_unit_presentation(non_lci):
        raise ValidationError(
            "only the complete-intersection case is supported: "
            "the non-lci ideal must be the unit ideal"
        )
    universe = variety.ideal.universe
    if len(universe) != ambient_dim:
        raise ValidationError(
            f"the variety lives in {len(universe)} ambient coordinates, "
            f"not {ambient_dim}"
        )
    for g in variety.ideal.generators:
        if not ideal_membership(g, center, max_pairs=max_pairs):
            raise ValidationError(
                "the center must lie on the variety: a defining equation "
                "does not vanish on it"
            )
    weighted = tuple(boundary)
    left = mld_jet_estimate(
        PairSpec(variety, weighted, center, None, 1),
        bounds,
        max_pairs=max_pairs,
    )
    adjoined = ((variety.ideal, Fraction(variety.codim)),) + weighted
    # The variety's own contact order is a new scan direction; anything
    # above m_max is inadmissible anyway, so cap it there.
    right_bounds = SearchBounds(
        (bounds.m_max,) + bounds.w_max, bounds.m_max, 0, 0
    )
    right = mld_jet_estimate(
        PairSpec(SmoothSpace(universe), adjoined, center, None, 1),
        right_bounds,
        max_pairs=max_pairs,
    )
    return IoaReport(left, right)
