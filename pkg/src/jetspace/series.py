"""Truncated power series: elements of Q[t]/(t^N) with explicit N.

The truncation order is part of the value.  Mixed-order arithmetic truncates
to the minimum of the operand orders, mirroring the quotient-ring semantics:
a product only determines coefficients that both factors determine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import ValidationError
from .polynomials import Polynomial, Scalar

INFINITE_ORDER = math.inf


@dataclass(frozen=True)
class TruncatedSeries:
    """A truncated series; coefficients[j] is the coefficient of t^j."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise ValidationError("truncation order must be at least 1")

    @staticmethod
    def from_coefficients(
        values: Sequence[Scalar], truncation_order: int | None = None
    ) -> "TruncatedSeries":
        coeffs = [Fraction(v) for v in values]
        if truncation_order is not None:
            if truncation_order < len(coeffs):
                coeffs = coeffs[:truncation_order]
            else:
                coeffs.extend([Fraction(0)] * (truncation_order - len(coeffs)))
        return TruncatedSeries(tuple(coeffs))

    @staticmethod
    def zero(truncation_order: int) -> "TruncatedSeries":
        return TruncatedSeries((Fraction(0),) * truncation_order)

    @staticmethod
    def constant(value: Scalar, truncation_order: int) -> "TruncatedSeries":
        return TruncatedSeries.from_coefficients([value], truncation_order)

    @staticmethod
    def t_power(exponent: int, truncation_order: int) -> "TruncatedSeries":
        coeffs = [Fraction(0)] * truncation_order
        if 0 <= exponent < truncation_order:
            coeffs[exponent] = Fraction(1)
        return TruncatedSeries(tuple(coeffs))

    @property
    def truncation_order(self) -> int:
        return len(self.coefficients)

    def order(self) -> Union[int, float]:
        """Least exponent with a nonzero coefficient, or INFINITE_ORDER."""
        for j, c in enumerate(self.coefficients):
            if c:
                return j
        return INFINITE_ORDER

    @property
    def is_zero(self) -> bool:
        return all(not c for c in self.coefficients)

    def coefficient(self, j: int) -> Fraction:
        if not 0 <= j < len(self.coefficients):
            raise ValidationError(f"coefficient t^{j} is beyond the truncation order")
        return self.coefficients[j]

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > len(self.coefficients):
            raise ValidationError("cannot extend a series by truncation")
        return TruncatedSeries(self.coefficients[:order])

    def padded(self, order: int) -> "TruncatedSeries":
        """Zero-extend to a higher truncation order (an exact lift for jets)."""
        if order < len(self.coefficients):
            raise ValidationError("padded() cannot shrink; use truncate()")
        return TruncatedSeries(
            self.coefficients + (Fraction(0),) * (order - len(self.coefficients))
        )

    def shifted_down(self, k: int) -> "TruncatedSeries":
        """Divide by t^k; the first k coefficients must vanish."""
        if k < 0 or k >= len(self.coefficients):
            raise ValidationError("shift amount out of range")
        if any(self.coefficients[:k]):
            raise ValidationError(f"series is not divisible by t^{k}")
        return TruncatedSeries(self.coefficients[k:])

    def _align(self, other: "TruncatedSeries") -> int:
        return min(len(self.coefficients), len(other.coefficients))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._align(other)
        return TruncatedSeries(
            tuple(self.coefficients[j] + other.coefficients[j] for j in range(n))
        )

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._align(other)
        return TruncatedSeries(
            tuple(self.coefficients[j] - other.coefficients[j] for j in range(n))
        )

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coefficients))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._align(other)
        out = [Fraction(0)] * n
        for i, ci in enumerate(self.coefficients[:n]):
            if not ci:
                continue
            for j in range(n - i):
                cj = other.coefficients[j]
                if cj:
                    out[i + j] += ci * cj
        return TruncatedSeries(tuple(out))

    def scaled(self, c: Scalar) -> "TruncatedSeries":
        frac = Fraction(c)
        return TruncatedSeries(tuple(coeff * frac for coeff in self.coefficients))

    def __pow__(self, n: int) -> "TruncatedSeries":
        if n < 0:
            raise ValidationError("negative series powers are not supported")
        result = TruncatedSeries.constant(1, self.truncation_order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a unit (nonzero constant term)."""
        c0 = self.coefficients[0]
        if not c0:
            raise ValidationError("series with zero constant term has no inverse")
        n = len(self.coefficients)
        inv = [Fraction(0)] * n
        inv[0] = 1 / c0
        for j in range(1, n):
            acc = Fraction(0)
            for i in range(1, j + 1):
                acc += self.coefficients[i] * inv[j - i]
            inv[j] = -acc / c0
        return TruncatedSeries(tuple(inv))

    def __str__(self) -> str:
        pieces = []
        for j, c in enumerate(self.coefficients):
            if not c:
                continue
            if j == 0:
                pieces.append(str(c))
            elif j == 1:
                pieces.append(f"{c}*t" if c != 1 else "t")
            else:
                pieces.append(f"{c}*t^{j}" if c != 1 else f"t^{j}")
        body = " + ".join(pieces) if pieces else "0"
        return f"{body} + O(t^{len(self.coefficients)})"


def evaluate_series(
    f: Polynomial, assignment: Mapping[int, TruncatedSeries], order: int
) -> TruncatedSeries:
    """Evaluate f at series arguments inside Q[t]/(t^order).

    Every assigned series must carry truncation order >= `order`; the result
    agrees with polynomial substitution followed by reading off coefficients
    whenever the assignments are polynomials in t.
    """
    if order < 1:
        raise ValidationError("truncation order must be at least 1")
    used = f.variables()
    missing = used - set(assignment)
    if missing:
        names = ", ".join(f.universe.name(v) for v in sorted(missing))
        raise ValidationError(f"no series assigned to variable(s) {names}")
    for vid in used:
        if assignment[vid].truncation_order < order:
            raise ValidationError(
                f"series for {f.universe.name(vid)!r} is truncated below {order}"
            )
    result = TruncatedSeries.zero(order)
    power_cache: dict[tuple[int, int], TruncatedSeries] = {}
    for mono, coeff in f.terms.items():
        piece = TruncatedSeries.constant(coeff, order)
        for vid, exp in mono.exponents:
            key = (vid, exp)
            powed = power_cache.get(key)
            if powed is None:
                powed = assignment[vid].truncate(order) ** exp
                power_cache[key] = powed
            piece = piece * powed
        result = result + piece
    return result
