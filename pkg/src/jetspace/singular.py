"""Jacobian ideals and generic complete-intersection reductions.

A variety X of expected dimension n inside A^N has codimension c = N - n.
Its Jacobian ideal is generated by the c x c minors of the Jacobian matrix
of the defining equations, taken together with the equations themselves, so
that membership questions are automatically modulo X.

For X cut out by d >= c equations, a *generic reduction* picks c random
integer combinations F_1, ..., F_c of the generators.  The complete
intersection M = V(F_1, ..., F_c) contains X together with a residual part
cut out by the ideal quotient (I_M : I_X).  Genericity cannot be sampled
exactly, so every draw is certified after the fact:

  1. M has dimension n (no component collapse),
  2. the quotient identity (I_M : I_X) * I_X <= I_M holds generator-wise,
  3. saturating I_X by the c-minors of Jac(F) removes no component of X,
     i.e. the minors vanish on no component (X reduced is the caller's
     contract).

Failed draws are retried with consecutive seeds; exhausting the retry
budget raises CertificationError.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .errors import CertificationError, ValidationError
from .groebner import (
    DEFAULT_PAIR_BUDGET,
    IdealPresentation,
    groebner_basis,
    ideal_equal,
    ideal_quotient,
    normal_form,
    krull_dimension,
    saturation,
)
from .polynomials import Polynomial, constant, partial_derivative

_MAX_ATTEMPTS = 5
_COEFFICIENT_BOUND = 7


@dataclass(frozen=True)
class EmbeddedVariety:
    """A closed subvariety of affine space with a declared dimension."""

    ideal: IdealPresentation
    expected_dim: int

    def __post_init__(self) -> None:
        if not 0 <= self.expected_dim <= self.ambient_dim:
            raise ValidationError(
                f"expected dimension {self.expected_dim} outside 0..{self.ambient_dim}"
            )

    @property
    def ambient_dim(self) -> int:
        return len(self.ideal.universe)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.expected_dim

    @cached_property
    def verified_dim(self) -> int:
        """krull_dimension of the ideal, checked once against expected_dim."""
        actual = krull_dimension(self.ideal)
        if actual != self.expected_dim:
            raise ValidationError(
                f"declared dimension {self.expected_dim} but the ideal has "
                f"dimension {actual!r}"
            )
        return self.expected_dim


def jacobian_matrix(presentation: IdealPresentation) -> list[list[Polynomial]]:
    """Rows indexed by generators, columns by ambient variables."""
    nvars = len(presentation.universe)
    return [
        [partial_derivative(g, vid) for vid in range(nvars)]
        for g in presentation.generators
    ]


def _determinant(rows: Sequence[Sequence[Polynomial]], universe) -> Polynomial:
    size = len(rows)
    if size == 0:
        return constant(universe, 1)
    if size == 1:
        return rows[0][0]
    total = Polynomial(universe)
    for col in range(size):
        entry = rows[0][col]
        if entry.is_zero:
            continue
        sub = [
            [row[c] for c in range(size) if c != col] for row in rows[1:]
        ]
        cofactor = entry * _determinant(sub, universe)
        total = total + cofactor if col % 2 == 0 else total - cofactor
    return total


def matrix_minors(
    matrix: Sequence[Sequence[Polynomial]], size: int, universe
) -> list[Polynomial]:
    """All size x size minors, rows-major then columns-major order."""
    if size == 0:
        return [constant(universe, 1)]
    nrows = len(matrix)
    ncols = len(matrix[0]) if matrix else 0
    out: list[Polynomial] = []
    for row_pick in combinations(range(nrows), size):
        for col_pick in combinations(range(ncols), size):
            rows = [[matrix[r][c] for c in col_pick] for r in row_pick]
            out.append(_determinant(rows, universe))
    return out


def jacobian_ideal(X: EmbeddedVariety) -> IdealPresentation:
    """codim x codim minors of the Jacobian, plus the defining equations."""
    universe = X.ideal.universe
    minors = matrix_minors(jacobian_matrix(X.ideal), X.codim, universe)
    return IdealPresentation.of(universe, tuple(minors) + X.ideal.generators)


@dataclass(frozen=True)
class CIReduction:
    """A certified generic complete-intersection reduction of a variety."""

    source: EmbeddedVariety
    matrix: tuple[tuple[int, ...], ...]
    ci_ideal: IdealPresentation
    residue_ideal: IdealPresentation
    certified: bool


def _draw_matrix(
    rng: random.Random, rows: int, cols: int, bound: int
) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(rng.randint(-bound, bound) for _ in range(cols)) for _ in range(rows)
    )


def _certify(
    X: EmbeddedVariety,
    ci: IdealPresentation,
    residue: IdealPresentation,
    minors: list[Polynomial],
    max_pairs: int,
) -> bool:
    if krull_dimension(ci, max_pairs=max_pairs) != X.expected_dim:
        return False
    # Quotient identity: (I_M : I_X) * I_X inside I_M, generator by generator.
    ci_basis = groebner_basis(ci, max_pairs=max_pairs)
    for g in X.ideal.generators:
        for h in residue.generators:
            if not normal_form(g * h, ci_basis).is_zero:
                return False
    minor_ideal = IdealPresentation.of(X.ideal.universe, minors)
    saturated = saturation(X.ideal, minor_ideal, max_pairs=max_pairs)
    return ideal_equal(saturated, X.ideal, max_pairs=max_pairs)


def generic_ci_reduction(
    X: EmbeddedVariety,
    seed: int = 0,
    coefficient_bound: int = _COEFFICIENT_BOUND,
    max_attempts: int = _MAX_ATTEMPTS,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> CIReduction:
    """Draw and certify integer combinations cutting X as part of a c-fold
    complete intersection.

    The draw is deterministic in `seed`; failed certifications retry with
    seed+1, seed+2, ... so results are reproducible end to end.
    """
    gens = X.ideal.generators
    d, c = len(gens), X.codim
    if d < c:
        raise ValidationError(
            f"{d} generators cannot present a codimension-{c} variety"
        )
    X.verified_dim  # raises when the declared dimension is wrong
    universe = X.ideal.universe

    for attempt in range(max_attempts):
        rng = random.Random(seed + attempt)
        matrix = _draw_matrix(rng, c, d, coefficient_bound)
        combos = []
        for row in matrix:
            f = Polynomial(universe)
            for a, g in zip(row, gens):
                if a:
                    f = f + g.scaled(a)
            combos.append(f)
        ci = IdealPresentation.of(universe, combos)
        if len(ci.generators) != c:
            continue  # a zero combination can never certify
        residue = ideal_quotient(ci, X.ideal, max_pairs=max_pairs)
        minors = matrix_minors(jacobian_matrix(ci), c, universe)
        if _certify(X, ci, residue, minors, max_pairs):
            return CIReduction(X, matrix, ci, residue, certified=True)

    raise CertificationError(
        f"no certified reduction after {max_attempts} attempts; the input may "
        f"be degenerate (non-reduced, wrong expected_dim) or the coefficient "
        f"bound {coefficient_bound} too small"
    )


def residue_inclusion_check(reduction: CIReduction, max_pairs: int = DEFAULT_PAIR_BUDGET) -> bool:
    """Every minor of Jac(F) lies in (I_M : I_X) + I_X.

    This inclusion is a theorem for certified reductions, so False signals
    an implementation bug rather than a property of the input.
    """
    if not reduction.certified:
        raise ValidationError("reduction is not certified")
    X = reduction.source
    universe = X.ideal.universe
    minors = matrix_minors(
        jacobian_matrix(reduction.ci_ideal), X.codim, universe
    )
    combined = IdealPresentation.of(
        universe, reduction.residue_ideal.generators + X.ideal.generators
    )
    basis = groebner_basis(combined, max_pairs=max_pairs)
    return all(normal_form(m, basis).is_zero for m in minors)
