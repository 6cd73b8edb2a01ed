"""Sparse multivariate polynomials over exact rationals.

A polynomial is a finite map from monomials to nonzero rational
coefficients.  Monomials store only their nonzero exponents, keyed by the
position of the variable inside a :class:`VariableUniverse`.  Coefficients
are :class:`fractions.Fraction` values, which are always reduced with a
positive denominator, so every number in the pipeline is exact.

All values are immutable after construction and all operations are pure
functions, so instances can be shared freely between threads.

The text format accepted by :func:`parse_polynomial` (and produced by
:func:`polynomial_to_string`) is::

    expr     := term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' posint)?
    base     := rational | identifier | '(' expr ')'
    rational := int ('/' posint)?

Identifiers are an ASCII letter followed by letters, digits or underscores.
Whitespace is insignificant.  Implicit multiplication is not accepted:
``2x`` is a syntax error, ``2*x`` is not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import ParseError, ValidationError

Scalar = Union[int, Fraction]

_IDENTIFIER_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class VariableUniverse:
    """An ordered tuple of distinct variable names.

    Variable ids are positions in the tuple.  :meth:`extend` appends names,
    so ids that were valid before the extension remain valid afterwards.
    """

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValidationError(f"variable names must be distinct: {self.names!r}")
        for name in self.names:
            if not _IDENTIFIER_RE.match(name):
                raise ValidationError(f"invalid variable name {name!r}")

    @staticmethod
    def of(*names: str) -> "VariableUniverse":
        return VariableUniverse(tuple(names))

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown variable {name!r}") from None

    def name(self, vid: int) -> str:
        if not 0 <= vid < len(self.names):
            raise ValidationError(f"variable id {vid} out of range")
        return self.names[vid]

    def extend(self, extra: Iterable[str]) -> "VariableUniverse":
        return VariableUniverse(self.names + tuple(extra))

    def fresh_name(self, stem: str) -> str:
        """A name based on `stem` that does not collide with existing names."""
        if stem not in self.names and _IDENTIFIER_RE.match(stem):
            return stem
        k = 0
        while f"{stem}{k}" in self.names:
            k += 1
        return f"{stem}{k}"


@dataclass(frozen=True)
class Monomial:
    """A power product, stored as sorted (variable id, positive exponent) pairs."""

    exponents: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        last = -1
        for vid, exp in self.exponents:
            if vid <= last:
                raise ValidationError("monomial pairs must be sorted by variable id")
            if exp <= 0:
                raise ValidationError("monomial exponents must be positive")
            last = vid

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exponents)

    @property
    def is_unit(self) -> bool:
        return not self.exponents

    def exponent(self, vid: int) -> int:
        for v, e in self.exponents:
            if v == vid:
                return e
        return 0

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.exponents)

    def times(self, other: "Monomial") -> "Monomial":
        return Monomial(_merge(self.exponents, other.exponents, 1))

    def divides(self, other: "Monomial") -> bool:
        theirs = dict(other.exponents)
        return all(theirs.get(v, 0) >= e for v, e in self.exponents)

    def quotient_by(self, other: "Monomial") -> "Monomial":
        """self / other; raises unless other divides self."""
        if not other.divides(self):
            raise ValidationError(f"{other} does not divide {self}")
        return Monomial(_merge(self.exponents, other.exponents, -1))

    def lcm(self, other: "Monomial") -> "Monomial":
        mine = dict(self.exponents)
        for v, e in other.exponents:
            if mine.get(v, 0) < e:
                mine[v] = e
        return Monomial(tuple(sorted(mine.items())))

    def coprime_with(self, other: "Monomial") -> bool:
        theirs = {v for v, _ in other.exponents}
        return all(v not in theirs for v, _ in self.exponents)

    def dense(self, nvars: int) -> tuple[int, ...]:
        out = [0] * nvars
        for v, e in self.exponents:
            out[v] = e
        return tuple(out)


def _merge(
    a: tuple[tuple[int, int], ...], b: tuple[tuple[int, int], ...], sign: int
) -> tuple[tuple[int, int], ...]:
    # Merge two sorted exponent lists, adding sign * b; drops zero results.
    out: list[tuple[int, int]] = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va < vb:
            out.append((va, ea))
            i += 1
        elif vb < va:
            out.append((vb, sign * eb))
            j += 1
        else:
            e = ea + sign * eb
            if e:
                out.append((va, e))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend((v, sign * e) for v, e in b[j:])
    return tuple(out)


ONE_MONOMIAL = Monomial()


def monomial(exponents: Mapping[int, int]) -> Monomial:
    """Build a monomial from a variable-id → exponent map; zeros are dropped."""
    return Monomial(tuple(sorted((v, e) for v, e in exponents.items() if e)))


def grevlex_key(mono: Monomial, nvars: int) -> tuple:
    """Sort key realizing graded reverse lexicographic order (larger = greater)."""
    dense = mono.dense(nvars)
    return (mono.degree, tuple(-e for e in reversed(dense)))


class Polynomial:
    """An immutable sparse polynomial tied to a :class:`VariableUniverse`."""

    __slots__ = ("universe", "_terms", "_hash")

    def __init__(
        self, universe: VariableUniverse, terms: Mapping[Monomial, Scalar] = {}
    ) -> None:
        clean: dict[Monomial, Fraction] = {}
        nvars = len(universe)
        for mono, coeff in terms.items():
            frac = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
            if not frac:
                continue
            if mono.exponents and mono.exponents[-1][0] >= nvars:
                raise ValidationError(f"monomial {mono} uses a variable outside the universe")
            clean[mono] = frac
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Polynomial is immutable")

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def total_degree(self) -> int:
        """Degree of the polynomial; the zero polynomial reports -1."""
        if not self._terms:
            return -1
        return max(m.degree for m in self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def variables(self) -> set[int]:
        used: set[int] = set()
        for mono in self._terms:
            used.update(mono.variables())
        return used

    def constant_value(self) -> Fraction:
        """The value of a constant polynomial; error if non-constant."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1 and ONE_MONOMIAL in self._terms:
            return self._terms[ONE_MONOMIAL]
        raise ValidationError("polynomial is not constant")

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending graded-reverse-lex order (the canonical order)."""
        nvars = len(self.universe)
        return sorted(
            self._terms.items(), key=lambda mc: grevlex_key(mc[0], nvars), reverse=True
        )

    # -- ring operations ---------------------------------------------------

    def _check_same_universe(self, other: "Polynomial") -> None:
        if self.universe != other.universe:
            raise ValidationError("polynomials live in different variable universes")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_same_universe(other)
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            acc = out.get(mono)
            if acc is None:
                out[mono] = coeff
            else:
                total = acc + coeff
                if total:
                    out[mono] = total
                else:
                    del out[mono]
        return _raw(self.universe, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return _raw(self.universe, {m: -c for m, c in self._terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_same_universe(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = m1.times(m2)
                acc = out.get(mono)
                if acc is None:
                    out[mono] = c1 * c2
                else:
                    total = acc + c1 * c2
                    if total:
                        out[mono] = total
                    else:
                        del out[mono]
        return _raw(self.universe, out)

    def scaled(self, c: Scalar) -> "Polynomial":
        frac = Fraction(c)
        if not frac:
            return Polynomial(self.universe)
        return _raw(self.universe, {m: coeff * frac for m, coeff in self._terms.items()})

    def term_multiple(self, mono: Monomial, c: Fraction) -> "Polynomial":
        """c * mono * self, the workhorse of polynomial reduction."""
        if not c:
            return Polynomial(self.universe)
        if mono.is_unit:
            return self.scaled(c) if c != 1 else self
        return _raw(
            self.universe, {m.times(mono): coeff * c for m, coeff in self._terms.items()}
        )

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValidationError("negative polynomial powers are not defined")
        result = constant(self.universe, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.universe == other.universe and self._terms == other._terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.universe, frozenset(self._terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self) -> str:
        return polynomial_to_string(self)

    def __repr__(self) -> str:
        return f"Polynomial({polynomial_to_string(self)!r})"


def _raw(universe: VariableUniverse, terms: dict[Monomial, Fraction]) -> Polynomial:
    # Internal fast path: terms are already clean (nonzero Fractions, valid ids).
    poly = Polynomial.__new__(Polynomial)
    object.__setattr__(poly, "universe", universe)
    object.__setattr__(poly, "_terms", terms)
    object.__setattr__(poly, "_hash", None)
    return poly


def constant(universe: VariableUniverse, value: Scalar) -> Polynomial:
    frac = Fraction(value)
    if not frac:
        return Polynomial(universe)
    return _raw(universe, {ONE_MONOMIAL: frac})


def variable(universe: VariableUniverse, vid: int) -> Polynomial:
    universe.name(vid)
    return _raw(universe, {Monomial(((vid, 1),)): Fraction(1)})


def variable_named(universe: VariableUniverse, name: str) -> Polynomial:
    return variable(universe, universe.index(name))


def partial_derivative(f: Polynomial, vid: int) -> Polynomial:
    """Formal partial derivative with respect to the variable with id `vid`."""
    f.universe.name(vid)
    out: dict[Monomial, Fraction] = {}
    for mono, coeff in f.terms.items():
        exp = mono.exponent(vid)
        if not exp:
            continue
        lowered = Monomial(_merge(mono.exponents, ((vid, 1),), -1))
        acc = out.get(lowered)
        contribution = coeff * exp
        out[lowered] = contribution if acc is None else acc + contribution
    return Polynomial(f.universe, out)


def substitute(f: Polynomial, assignment: Mapping[int, Polynomial]) -> Polynomial:
    """Image of f under the ring homomorphism sending each variable to its image.

    Every variable occurring in f must be assigned (assigning a variable to
    itself expresses the identity).  All images must share one universe,
    which becomes the universe of the result.
    """
    used = f.variables()
    missing = used - set(assignment)
    if missing:
        names = ", ".join(f.universe.name(v) for v in sorted(missing))
        raise ValidationError(f"no assignment for variable(s) {names}")
    if assignment:
        target = next(iter(assignment.values())).universe
        for image in assignment.values():
            if image.universe != target:
                raise ValidationError("assignment images live in different universes")
    else:
        target = f.universe
    result = Polynomial(target)
    power_cache: dict[tuple[int, int], Polynomial] = {}
    for mono, coeff in f.terms.items():
        piece = constant(target, coeff)
        for vid, exp in mono.exponents:
            key = (vid, exp)
            powed = power_cache.get(key)
            if powed is None:
                powed = assignment[vid] ** exp
                power_cache[key] = powed
            piece = piece * powed
        result = result + piece
    return result


def evaluate(f: Polynomial, point: Mapping[int, Scalar]) -> Fraction:
    """Value of f at a rational point (all used variables must be given)."""
    total = Fraction(0)
    for mono, coeff in f.terms.items():
        value = coeff
        for vid, exp in mono.exponents:
            if vid not in point:
                raise ValidationError(f"no value for variable {f.universe.name(vid)!r}")
            value *= Fraction(point[vid]) ** exp
        total += value
    return total


def transport(f: Polynomial, target: VariableUniverse) -> Polynomial:
    """Re-express f in another universe, matching variables by name."""
    mapping: dict[int, int] = {}
    for vid in f.variables():
        mapping[vid] = target.index(f.universe.name(vid))
    out: dict[Monomial, Fraction] = {}
    for mono, coeff in f.terms.items():
        remapped = Monomial(tuple(sorted((mapping[v], e) for v, e in mono.exponents)))
        out[remapped] = coeff
    return Polynomial(target, out)


# -- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^()/]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            where = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", where)
        kind = match.lastgroup
        assert kind is not None
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], universe: VariableUniverse, length: int):
        self.tokens = tokens
        self.universe = universe
        self.pos = 0
        self.length = length

    def peek(self) -> tuple[str, str, int] | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def advance(self) -> tuple[str, str, int]:
        token = self.peek()
        if token is None:
            raise ParseError("unexpected end of input", self.length)
        self.pos += 1
        return token

    def expect_op(self, op: str) -> None:
        token = self.advance()
        if token[0] != "op" or token[1] != op:
            raise ParseError(f"expected {op!r}, found {token[1]!r}", token[2])

    def parse_expr(self) -> Polynomial:
        result = self.parse_term()
        while True:
            token = self.peek()
            if token is None or token[0] != "op" or token[1] not in "+-":
                return result
            self.advance()
            rhs = self.parse_term()
            result = result + rhs if token[1] == "+" else result - rhs

    def parse_term(self) -> Polynomial:
        result = self.parse_factor()
        while True:
            token = self.peek()
            if token is None or token[0] != "op" or token[1] != "*":
                return result
            self.advance()
            result = result * self.parse_factor()

    def parse_factor(self) -> Polynomial:
        base = self.parse_base()
        token = self.peek()
        if token is not None and token[0] == "op" and token[1] == "^":
            self.advance()
            exponent = self.advance()
            if exponent[0] != "int":
                raise ParseError("exponent must be a positive integer", exponent[2])
            value = int(exponent[1])
            if value <= 0:
                raise ParseError("exponent must be positive", exponent[2])
            return base**value
        return base

    def parse_base(self) -> Polynomial:
        token = self.advance()
        kind, text, where = token
        if kind == "op" and text == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if kind == "op" and text == "-":
            magnitude = self.advance()
            if magnitude[0] != "int":
                raise ParseError("expected digits after '-'", magnitude[2])
            return constant(self.universe, -self._rational_tail(int(magnitude[1])))
        if kind == "int":
            return constant(self.universe, self._rational_tail(int(text)))
        if kind == "name":
            if text not in self.universe.names:
                raise ParseError(f"unknown variable {text!r}", where)
            return variable_named(self.universe, text)
        raise ParseError(f"unexpected {text!r}", where)

    def _rational_tail(self, numerator: int) -> Fraction:
        token = self.peek()
        if token is not None and token[0] == "op" and token[1] == "/":
            self.advance()
            denom = self.advance()
            if denom[0] != "int":
                raise ParseError("expected digits in denominator", denom[2])
            if int(denom[1]) == 0:
                raise ParseError("zero denominator", denom[2])
            return Fraction(numerator, int(denom[1]))
        return Fraction(numerator)


def parse_polynomial(text: str, universe: VariableUniverse) -> Polynomial:
    """Parse an expression in the module's grammar into a canonical Polynomial."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression", 0)
    parser = _Parser(tokens, universe, len(text))
    result = parser.parse_expr()
    leftover = parser.peek()
    if leftover is not None:
        raise ParseError(f"trailing input {leftover[1]!r}", leftover[2])
    return result


def _format_coefficient(coeff: Fraction) -> str:
    if coeff.denominator == 1:
        return str(coeff.numerator)
    return f"{coeff.numerator}/{coeff.denominator}"


def _format_monomial(mono: Monomial, universe: VariableUniverse) -> str:
    pieces = []
    for vid, exp in mono.exponents:
        name = universe.name(vid)
        pieces.append(name if exp == 1 else f"{name}^{exp}")
    return "*".join(pieces)


def polynomial_to_string(f: Polynomial) -> str:
    """Canonical text form; parse(print(f)) == f."""
    if f.is_zero:
        return "0"
    chunks: list[str] = []
    for index, (mono, coeff) in enumerate(f.sorted_terms()):
        magnitude = abs(coeff)
        body = _format_monomial(mono, f.universe)
        if mono.is_unit:
            rendered = _format_coefficient(magnitude)
        elif magnitude == 1:
            rendered = body
        else:
            rendered = f"{_format_coefficient(magnitude)}*{body}"
        if index == 0:
            # A negative leading coefficient must stay a literal, since the
            # grammar has no unary minus: "-1*x^2 - y" round-trips, "-x^2" not.
            if coeff < 0:
                if mono.is_unit:
                    rendered = _format_coefficient(coeff)
                else:
                    rendered = f"{_format_coefficient(-magnitude)}*{body}"
            chunks.append(rendered)
        else:
            chunks.append(f" {'-' if coeff < 0 else '+'} {rendered}")
    return "".join(chunks)
