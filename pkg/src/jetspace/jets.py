"""Jet rings, jet ideals, and rational jet points.

The level-m jet ring over base variables x_1, ..., x_n adjoins one symbol
per variable and per order 0 <= j <= m, named ``<base>_<j>``.  The order-0
symbol plays the role of the base variable itself.  The derivation D sends
an order-j symbol to the order-(j+1) symbol, and the level-m equations of a
variety are f, D(f), ..., D^m(f) for each defining equation f.

A :class:`JetPoint` stores divided-power coordinates: the arc it encodes is

    x_i(t) = sum_j  a_i^(j) t^j / j!

so that substituting the arc into f produces f^(j)(a) / j! as the t^j
coefficient, with f^(j) the j-fold total derivative.  Keeping the j! on the
point side (rather than inside the equations) keeps every jet ideal
generator integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ValidationError
from .groebner import IdealPresentation
from .polynomials import (
    Monomial,
    Polynomial,
    Scalar,
    VariableUniverse,
    evaluate,
    partial_derivative,
    transport,
    variable,
)
from .series import TruncatedSeries, evaluate_series


@dataclass(frozen=True)
class JetRing:
    """Polynomial ring of the level-`level` jet space over `base`.

    Jet symbols are ordered base-variable-major: all orders of the first
    base variable, then all orders of the second, and so on.  The naming
    scheme is injective (the order is the digit run after the last
    underscore), and the universe constructor independently rejects any
    duplicate that a hostile base name could try to smuggle in.
    """

    base: VariableUniverse
    level: int
    jet_universe: VariableUniverse = field(init=False)

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValidationError("jet level must be nonnegative")
        names = tuple(
            f"{name}_{j}" for name in self.base.names for j in range(self.level + 1)
        )
        object.__setattr__(self, "jet_universe", VariableUniverse(names))

    @property
    def base_size(self) -> int:
        return len(self.base)

    def jet_vid(self, i: int, j: int) -> int:
        if not 0 <= i < len(self.base):
            raise ValidationError(f"base variable index {i} out of range")
        if not 0 <= j <= self.level:
            raise ValidationError(f"jet order {j} outside level {self.level}")
        return i * (self.level + 1) + j

    def decompose(self, vid: int) -> tuple[int, int]:
        """Inverse of jet_vid: (base index, order)."""
        self.jet_universe.name(vid)
        return divmod(vid, self.level + 1)

    def jet_variable(self, i: int, j: int) -> Polynomial:
        return variable(self.jet_universe, self.jet_vid(i, j))

    def order_of(self, vid: int) -> int:
        return self.decompose(vid)[1]

    def vids_with_order_above(self, p: int) -> tuple[int, ...]:
        return tuple(
            vid for vid in range(len(self.jet_universe)) if self.order_of(vid) > p
        )

    def sub_ring(self, p: int) -> "JetRing":
        if p > self.level:
            raise ValidationError("sub-ring level exceeds the ring level")
        return JetRing(self.base, p)

    def embed_base(self, f: Polynomial) -> Polynomial:
        """Re-express a base polynomial in the order-0 jet symbols."""
        if f.universe != self.base:
            raise ValidationError("polynomial does not live in the base universe")
        step = self.level + 1
        out = {
            Monomial(tuple((v * step, e) for v, e in mono.exponents)): c
            for mono, c in f.terms.items()
        }
        return Polynomial(self.jet_universe, out)

    def promote(self, f: Polynomial) -> Polynomial:
        """Re-tag a polynomial from a lower-level jet ring (a no-op by name)."""
        return transport(f, self.jet_universe)


def total_derivative(f: Polynomial, ring: JetRing) -> Polynomial:
    """The derivation D with D(x_i at order j) = x_i at order j+1.

    `ring` is the ring housing the output: every jet variable occurring in
    f must have order strictly below ring.level.
    """
    if f.universe != ring.jet_universe:
        f = ring.promote(f)
    result = Polynomial(ring.jet_universe)
    for vid in sorted(f.variables()):
        i, j = ring.decompose(vid)
        if j + 1 > ring.level:
            raise ValidationError(
                f"level {ring.level} cannot house the derivative of "
                f"{ring.jet_universe.name(vid)!r}"
            )
        bumped = variable(ring.jet_universe, ring.jet_vid(i, j + 1))
        result = result + partial_derivative(f, vid) * bumped
    return result


def jet_ideal(presentation: IdealPresentation, level: int) -> IdealPresentation:
    """Equations of the level-`level` jet space of V(presentation).

    Generators are grouped by input generator, orders ascending, so the
    level-p list is literally a sublist of the level-m list for p < m.
    """
    ring = JetRing(presentation.universe, level)
    gens: list[Polynomial] = []
    for g in presentation.generators:
        current = ring.embed_base(g)
        gens.append(current)
        for _ in range(level):
            current = total_derivative(current, ring)
            gens.append(current)
    return IdealPresentation(ring.jet_universe, tuple(gens))


@dataclass(frozen=True)
class JetPoint:
    """A rational point of a level-`level` jet space, in divided powers.

    values[i][j] is the coordinate of base variable i at order j; the arc it
    describes is x_i(t) = sum_j values[i][j] t^j / j!.
    """

    base: VariableUniverse
    level: int
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValidationError("jet level must be nonnegative")
        if len(self.values) != len(self.base):
            raise ValidationError("one coordinate row per base variable required")
        for row in self.values:
            if len(row) != self.level + 1:
                raise ValidationError(
                    f"each row must list orders 0..{self.level}"
                )

    def coordinate(self, i: int, j: int) -> Fraction:
        if not 0 <= i < len(self.values):
            raise ValidationError(f"base variable index {i} out of range")
        if not 0 <= j <= self.level:
            raise ValidationError(f"jet order {j} outside level {self.level}")
        return self.values[i][j]

    def base_point(self) -> tuple[Fraction, ...]:
        return tuple(row[0] for row in self.values)

    def assignment(self, ring: JetRing) -> dict[int, Fraction]:
        if ring.base != self.base or ring.level != self.level:
            raise ValidationError("jet point does not belong to this ring")
        out: dict[int, Fraction] = {}
        for i, row in enumerate(self.values):
            for j, value in enumerate(row):
                out[ring.jet_vid(i, j)] = value
        return out

    def series_assignment(self, truncation_order: int) -> dict[int, TruncatedSeries]:
        """The encoded arcs as truncated series (divided powers resolved)."""
        out: dict[int, TruncatedSeries] = {}
        for i, row in enumerate(self.values):
            coeffs = [value / math.factorial(j) for j, value in enumerate(row)]
            out[i] = TruncatedSeries.from_coefficients(coeffs, truncation_order)
        return out

    def truncate(self, p: int) -> "JetPoint":
        if p > self.level:
            raise ValidationError("cannot truncate to a higher level")
        return JetPoint(self.base, p, tuple(row[: p + 1] for row in self.values))


def jet_point(
    base: VariableUniverse, level: int, rows: Sequence[Sequence[Scalar]]
) -> JetPoint:
    return JetPoint(
        base, level, tuple(tuple(Fraction(v) for v in row) for row in rows)
    )


def constant_jet(base: VariableUniverse, point: Sequence[Scalar], level: int) -> JetPoint:
    """The zero-section image of a base point: higher coordinates all vanish."""
    if len(point) != len(base):
        raise ValidationError("one value per base variable required")
    rows = tuple(
        (Fraction(value),) + (Fraction(0),) * level for value in point
    )
    return JetPoint(base, level, rows)


def scale_jet(a: JetPoint, c: Scalar) -> JetPoint:
    """Reparametrize the arc by t -> c*t: order-j coordinates pick up c^j."""
    factor = Fraction(c)
    rows = tuple(
        tuple(value * factor**j for j, value in enumerate(row)) for row in a.values
    )
    return JetPoint(a.base, a.level, rows)


def point_satisfies(a: JetPoint, equations: IdealPresentation) -> bool:
    """True when every generator vanishes at the jet point."""
    ring = JetRing(a.base, a.level)
    if equations.universe != ring.jet_universe:
        raise ValidationError("equations do not live in the point's jet ring")
    values = a.assignment(ring)
    return all(evaluate(g, values) == 0 for g in equations.generators)


def arc_substitution_check(f: Polynomial, a: JetPoint) -> bool:
    """Certify the two evaluation routes against each other.

    Route one substitutes the arc of `a` into f as a truncated series.
    Route two evaluates the iterated total derivatives of f at `a` and
    divides by j!.  The routes agree identically; a False return means the
    jet equations and the series substitution have drifted apart.
    """
    if f.universe != a.base:
        raise ValidationError("polynomial does not live in the point's base universe")
    ring = JetRing(a.base, a.level)
    order = a.level + 1
    series_route = evaluate_series(f, a.series_assignment(order), order)

    values = a.assignment(ring)
    current = ring.embed_base(f)
    for j in range(order):
        expected = evaluate(current, values) / math.factorial(j)
        if series_route.coefficient(j) != expected:
            return False
        if j + 1 < order:
            current = total_derivative(current, ring)
    return True
