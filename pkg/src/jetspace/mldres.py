"""Minimal log discrepancies from log-resolution numerical data.

The input is a table of numbers attached to the divisors of a log
resolution: the relative canonical coefficient kappa_j, the pullback
multiplicities alpha_{i,j} of each weighted subscheme, the multiplicity
z_j of the Nash subscheme, incidence flags against the center W, and the
nerve of nonempty divisor intersections.  Two independent routes compute
the minimal log discrepancy from this table: a direct per-divisor minimum,
and a contact-locus codimension formula minimized over integer vectors.
Agreement of the two routes is the headline cross-check.

Everything here is exact rational arithmetic; -infinity is a dedicated
symbolic value, never a numeric sentinel.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InternalInvariantError, ValidationError
from .groebner import EMPTY, Dimension


class NegativeInfinity:
    """Symbolic -infinity, below every rational."""

    _instance: "NegativeInfinity | None" = None

    def __new__(cls) -> "NegativeInfinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "-inf"

    def __lt__(self, other: object) -> bool:
        return other is not self

    def __le__(self, other: object) -> bool:
        return True

    def __gt__(self, other: object) -> bool:
        return False

    def __ge__(self, other: object) -> bool:
        return other is self


NEG_INF = NegativeInfinity()

MldValue = Fraction | NegativeInfinity

DEFAULT_NU_MAX = 3


class DegenerateMinimizerWarning(UserWarning):
    """A divisor contributes nothing to any constraint or to the objective.

    Its multiplicity is then a free parameter of the minimizing vector; the
    reported minimum is still exact.
    """


@dataclass(frozen=True)
class DivisorRecord:
    """Numerical data of one divisor on the resolution."""

    name: str
    kappa: Fraction
    z: int
    alpha: tuple[int, ...]
    in_w: bool
    meets_w: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        if self.z < 0:
            raise ValidationError(f"divisor {self.name}: negative z")
        if any(a < 0 for a in self.alpha):
            raise ValidationError(f"divisor {self.name}: negative alpha entry")
        if self.in_w and not self.meets_w:
            raise ValidationError(
                f"divisor {self.name}: in_W requires meets_W"
            )


def _closed_faces(
    faces: Iterable[frozenset[int]], count: int
) -> frozenset[frozenset[int]]:
    # subset closure, with every singleton present (divisors are nonempty)
    out: set[frozenset[int]] = {frozenset((j,)) for j in range(count)}
    for face in faces:
        members = tuple(face)
        for size in range(1, len(members) + 1):
            for sub in itertools.combinations(members, size):
                out.add(frozenset(sub))
    return frozenset(out)


@dataclass(frozen=True)
class ResolutionData:
    """A full numerical log-resolution table.

    `faces` is the nerve: the index sets with nonempty common intersection.
    The constructor closes it under subsets and adds all singletons, so
    hand-written instances may list only the maximal faces.
    """

    ambient_dim: int
    index_r: int
    weights: tuple[Fraction, ...]
    divisors: tuple[DivisorRecord, ...]
    faces: frozenset[frozenset[int]]

    def __post_init__(self) -> None:
        if self.ambient_dim < 1:
            raise ValidationError("ambient dimension must be positive")
        if self.index_r < 1:
            raise ValidationError("the index r must be a positive integer")
        object.__setattr__(
            self, "weights", tuple(Fraction(q) for q in self.weights)
        )
        if any(q < 0 for q in self.weights):
            raise ValidationError("weights must be non-negative")
        names = [d.name for d in self.divisors]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate divisor names")
        s = len(self.weights)
        for d in self.divisors:
            if len(d.alpha) != s:
                raise ValidationError(
                    f"divisor {d.name}: alpha has length {len(d.alpha)}, "
                    f"expected {s}"
                )
            if (d.kappa * self.index_r).denominator != 1:
                raise ValidationError(
                    f"divisor {d.name}: r*kappa is not an integer"
                )
        for face in self.faces:
            for j in face:
                if not 0 <= j < len(self.divisors):
                    raise ValidationError(f"face member {j} is not a divisor")
        object.__setattr__(
            self, "faces", _closed_faces(self.faces, len(self.divisors))
        )

    def index_of(self, name: str) -> int:
        for j, d in enumerate(self.divisors):
            if d.name == name:
                return j
        raise ValidationError(f"no divisor named {name!r}")


def log_discrepancies(data: ResolutionData) -> tuple[tuple[str, Fraction], ...]:
    """(name, kappa_j + 1 - sum_i q_i alpha_{i,j}) for every divisor."""
    out = []
    for d in data.divisors:
        a = d.kappa + 1 - sum(
            (q * a for q, a in zip(data.weights, d.alpha)), Fraction(0)
        )
        out.append((d.name, a))
    return tuple(out)


def mld_from_divisors(data: ResolutionData) -> MldValue:
    """Direct route: minimum log discrepancy over the divisors mapped into W.

    Any divisor meeting W with a negative log discrepancy forces -infinity;
    otherwise the infimum is attained on the resolution itself.
    """
    if not any(d.in_w for d in data.divisors):
        raise ValidationError("no divisor maps into W; nothing to minimize")
    values = dict(log_discrepancies(data))
    if any(values[d.name] < 0 for d in data.divisors if d.meets_w):
        return NEG_INF
    return min(values[d.name] for d in data.divisors if d.in_w)


def _nu_bounds(
    data: ResolutionData, w: Sequence[int], ell: int, nu_max: int
) -> list[int]:
    bounds: list[int] = []
    for j, d in enumerate(data.divisors):
        cap: int | None = None
        for i, wi in enumerate(w):
            if d.alpha[i] > 0:
                c = wi // d.alpha[i]
                cap = c if cap is None else min(cap, c)
        if d.z > 0:
            c = ell // d.z
            cap = c if cap is None else min(cap, c)
        if cap is None:
            # no constraint ever touches this divisor
            if d.kappa + 1 < 0:
                raise ValidationError(
                    f"ill-posed data: divisor {d.name} has no constraint "
                    "column and kappa + 1 < 0, so the minimum is unbounded"
                )
            if d.kappa + 1 == 0:
                warnings.warn(
                    f"divisor {d.name} is unconstrained and objective-"
                    "neutral; minimizers are degenerate in its direction",
                    DegenerateMinimizerWarning,
                    stacklevel=3,
                )
            cap = nu_max
        bounds.append(cap)
    return bounds


def _admissible_vectors(
    data: ResolutionData, w: Sequence[int], ell: int, nu_max: int
) -> Iterable[tuple[int, ...]]:
    bounds = _nu_bounds(data, w, ell, nu_max)
    d = len(data.divisors)
    alpha_cols = [rec.alpha for rec in data.divisors]
    z_col = [rec.z for rec in data.divisors]

    def rec(j: int, nu: list[int], rw: list[int], rl: int):
        if j == d:
            if any(rw) or rl:
                return
            support = frozenset(k for k, v in enumerate(nu) if v)
            if not support:
                return
            if support not in data.faces:
                return
            if not any(data.divisors[k].in_w for k in support):
                return
            yield tuple(nu)
            return
        hi = bounds[j]
        for i, wi in enumerate(rw):
            if alpha_cols[j][i] > 0:
                hi = min(hi, wi // alpha_cols[j][i])
        if z_col[j] > 0:
            hi = min(hi, rl // z_col[j])
        for v in range(hi + 1):
            nu.append(v)
            yield from rec(
                j + 1,
                nu,
                [wi - v * alpha_cols[j][i] for i, wi in enumerate(rw)],
                rl - v * z_col[j],
            )
            nu.pop()

    yield from rec(0, [], list(w), ell)


def contact_codim_combinatorial(
    data: ResolutionData,
    w: Sequence[int],
    ell: int,
    nu_max: int = DEFAULT_NU_MAX,
) -> Fraction | Dimension:
    """Codimension of the contact stratum with orders w on the Y_i and ell
    on the Nash subscheme, touching W.

    Exact minimum of ell/r + sum_j (kappa_j + 1) nu_j over lattice vectors
    nu with the prescribed pullback orders, face-supported, and meeting W.
    EMPTY when no such vector exists.
    """
    w = tuple(int(x) for x in w)
    if len(w) != len(data.weights):
        raise ValidationError(
            f"w has length {len(w)}, expected {len(data.weights)}"
        )
    if any(x < 0 for x in w) or ell < 0:
        raise ValidationError("contact orders must be non-negative")
    best: Fraction | None = None
    for nu in _admissible_vectors(data, w, ell, nu_max):
        cost = sum(
            ((d.kappa + 1) * v for d, v in zip(data.divisors, nu)),
            Fraction(0),
        )
        if best is None or cost < best:
            best = cost
    if best is None:
        return EMPTY
    return Fraction(ell, data.index_r) + best


def _candidate_pairs(
    data: ResolutionData, nu_max: int
) -> list[tuple[tuple[int, ...], int]]:
    pairs: set[tuple[tuple[int, ...], int]] = set()
    for d in data.divisors:
        if d.in_w:
            pairs.add((d.alpha, d.z))
    # every face-supported vector in the small ball, to expose negativity
    count = len(data.divisors)
    for total in range(1, nu_max + 1):
        for nu in _compositions(total, count):
            support = frozenset(j for j, v in enumerate(nu) if v)
            if support not in data.faces:
                continue
            if not any(data.divisors[j].in_w for j in support):
                continue
            w = tuple(
                sum(data.divisors[j].alpha[i] * nu[j] for j in range(count))
                for i in range(len(data.weights))
            )
            ell = sum(data.divisors[j].z * nu[j] for j in range(count))
            pairs.add((w, ell))
    return sorted(pairs)


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _pair_value(
    data: ResolutionData,
    w: tuple[int, ...],
    ell: int,
    nu_max: int,
) -> Fraction | Dimension:
    codim = contact_codim_combinatorial(data, w, ell, nu_max)
    if codim is EMPTY:
        return EMPTY
    assert isinstance(codim, Fraction)
    penalty = Fraction(ell, data.index_r) + sum(
        (q * x for q, x in zip(data.weights, w)), Fraction(0)
    )
    return codim - penalty


def mld_via_contact(
    data: ResolutionData, nu_max: int = DEFAULT_NU_MAX
) -> MldValue:
    """Contact route: minimize codim - ell/r - sum q_i w_i over (w, ell).

    The grid of candidate pairs (the columns of the in-W divisors plus the
    small nu-ball) is sufficient: the minimizing divisor's own column
    attains the minimum when it is finite.  A negative candidate is
    escalated by doubling; a strict decrease certifies -infinity.
    """
    if not any(d.in_w for d in data.divisors):
        raise ValidationError("no divisor maps into W; nothing to minimize")
    best: Fraction | None = None
    best_pair: tuple[tuple[int, ...], int] | None = None
    for w, ell in _candidate_pairs(data, nu_max):
        value = _pair_value(data, w, ell, nu_max)
        if value is EMPTY:
            continue
        assert isinstance(value, Fraction)
        if best is None or value < best:
            best = value
            best_pair = (w, ell)
    if best is None:
        raise ValidationError(
            "no admissible contact stratum met W within the search ball"
        )
    if best < 0:
        assert best_pair is not None
        w, ell = best_pair
        doubled = _pair_value(
            data, tuple(2 * x for x in w), 2 * ell, 2 * nu_max
        )
        if doubled is EMPTY or not doubled < best:
            raise InternalInvariantError(
                "negative minimum did not strictly decrease under doubling"
            )
        return NEG_INF
    return best


# -- JSON interchange -----------------------------------------------------------


def _fraction_from_json(value: object, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"{where}: rationals must be strings or integers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"{where}: bad rational {value!r}") from exc
    raise ValidationError(f"{where}: bad rational {value!r}")


def _int_from_json(value: object, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer")
    return value


def resolution_from_json(text: str) -> ResolutionData:
    """Parse resolution data from its JSON interchange form.

    Rationals arrive as strings "a/b" (or bare integers); faces are lists
    of divisor names and are closed under subsets on load.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"resolution data is not valid JSON: {exc}") from exc
    if not isinstance(raw, Mapping):
        raise ValidationError("resolution data must be a JSON object")
    for field in ("ambient_dim", "r", "weights", "divisors"):
        if field not in raw:
            raise ValidationError(f"resolution data is missing {field!r}")
    weights = tuple(
        _fraction_from_json(q, f"weights[{i}]")
        for i, q in enumerate(raw["weights"])
    )
    divisors = []
    for k, entry in enumerate(raw["divisors"]):
        where = f"divisors[{k}]"
        if not isinstance(entry, Mapping):
            raise ValidationError(f"{where}: expected an object")
        for field in ("name", "kappa", "z", "alpha", "in_W", "meets_W"):
            if field not in entry:
                raise ValidationError(f"{where} is missing {field!r}")
        divisors.append(
            DivisorRecord(
                name=str(entry["name"]),
                kappa=_fraction_from_json(entry["kappa"], f"{where}.kappa"),
                z=_int_from_json(entry["z"], f"{where}.z"),
                alpha=tuple(
                    _int_from_json(a, f"{where}.alpha[{i}]")
                    for i, a in enumerate(entry["alpha"])
                ),
                in_w=bool(entry["in_W"]),
                meets_w=bool(entry["meets_W"]),
            )
        )
    name_to_index = {d.name: j for j, d in enumerate(divisors)}
    faces: set[frozenset[int]] = set()
    for k, face in enumerate(raw.get("faces", ())):
        members = set()
        for name in face:
            if name not in name_to_index:
                raise ValidationError(
                    f"faces[{k}]: unknown divisor {name!r}"
                )
            members.add(name_to_index[name])
        faces.add(frozenset(members))
    return ResolutionData(
        ambient_dim=_int_from_json(raw["ambient_dim"], "ambient_dim"),
        index_r=_int_from_json(raw["r"], "r"),
        weights=weights,
        divisors=tuple(divisors),
        faces=frozenset(faces),
    )
