"""Buchberger-based ideal engine.

Normal forms, Krull dimension, ideal quotient, saturation and elimination,
over exact rationals.  The pair queue uses the normal selection strategy
(smallest lcm first) with Gebauer-Moeller pair elimination, and a hard,
configurable pair budget turns runaway instances into clean
:class:`BudgetExceededError` failures instead of silent hangs.

Internally Buchberger runs on packed-integer monomials with
cleared-denominator integer coefficients; Monomial and Fraction objects exist
only at the API boundary.  Each variable owns a 32-bit field of one Python
int, so a monomial product is a single integer addition and divisibility is a
subtract-and-mask check against per-field guard bits.  Monomial order keys
are themselves packed integers, affine in the exponents, so the reduction
loop updates them incrementally instead of recomputing them.  A preprocessing
pass pins variables that a generator fixes to a constant (c*v + d),
substituting them out of the other generators, which collapses the
coordinate-hyperplane conditions that jet ideals produce.
"""

from __future__ import annotations

import heapq
import itertools
import math
from bisect import insort
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import BudgetExceededError, InternalInvariantError, ValidationError
from .polynomials import (
    Monomial,
    ONE_MONOMIAL,
    Polynomial,
    VariableUniverse,
    constant,
    monomial,
    transport,
    variable,
)

DEFAULT_PAIR_BUDGET = 50_000

_SATURATION_ITERATION_CAP = 256

# Strip accumulated junk content from a reduction in flight after this many
# coefficient rescales.  Purely a speed lever; the result is scale-exact
# either way.
_STRIP_INTERVAL = 16

# A dividing reducer whose tail is at most this short ends the search for a
# better one.
_SHORT_TAIL = 4


class _EmptyDimension:
    """Singleton returned for the dimension of an empty vanishing locus."""

    _instance: "_EmptyDimension | None" = None

    def __new__(cls) -> "_EmptyDimension":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY"


EMPTY = _EmptyDimension()

Dimension = int | _EmptyDimension


@dataclass(frozen=True)
class MonomialOrder:
    """A total monomial order: grevlex, lex, or a block elimination order.

    A block order compares the eliminated block first (with `outer`), so any
    monomial touching the block dominates every block-free monomial; ties are
    broken on the remaining variables (with `inner`).
    """

    kind: str  # "grevlex" | "lex" | "block"
    block: tuple[int, ...] = ()
    outer: str = "grevlex"
    inner: str = "grevlex"

    def __post_init__(self) -> None:
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValidationError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block":
            if not self.block:
                raise ValidationError("block order needs a nonempty block")
            if tuple(sorted(set(self.block))) != self.block:
                raise ValidationError("block must be sorted and duplicate-free")
            for simple in (self.outer, self.inner):
                if simple not in ("grevlex", "lex"):
                    raise ValidationError(f"unsupported block component {simple!r}")

    @staticmethod
    def grevlex() -> "MonomialOrder":
        return MonomialOrder("grevlex")

    @staticmethod
    def lex() -> "MonomialOrder":
        return MonomialOrder("lex")

    @staticmethod
    def block_elimination(block: Iterable[int]) -> "MonomialOrder":
        return MonomialOrder("block", tuple(sorted(set(block))))

    def key_function(self, nvars: int) -> Callable[[Monomial], tuple]:
        if self.kind == "grevlex":
            return _simple_key_function("grevlex", tuple(range(nvars)))
        if self.kind == "lex":
            return _simple_key_function("lex", tuple(range(nvars)))
        block = self.block
        if block and block[-1] >= nvars:
            raise ValidationError("block variable outside the universe")
        rest = tuple(v for v in range(nvars) if v not in set(block))
        outer_key = _simple_key_function(self.outer, block)
        inner_key = _simple_key_function(self.inner, rest)

        def key(mono: Monomial) -> tuple:
            return (outer_key(mono), inner_key(mono))

        return key


def _simple_key_function(kind: str, positions: tuple[int, ...]) -> Callable[[Monomial], tuple]:
    index_of = {vid: slot for slot, vid in enumerate(positions)}
    width = len(positions)

    if kind == "lex":

        def lex_key(mono: Monomial) -> tuple:
            dense = [0] * width
            for vid, exp in mono.exponents:
                slot = index_of.get(vid)
                if slot is not None:
                    dense[slot] = exp
            return tuple(dense)

        return lex_key

    def grevlex_key(mono: Monomial) -> tuple:
        dense = [0] * width
        degree = 0
        for vid, exp in mono.exponents:
            slot = index_of.get(vid)
            if slot is not None:
                dense[slot] = exp
                degree += exp
        dense.reverse()
        return (degree, tuple(-e for e in dense))

    return grevlex_key


DEFAULT_ORDER = MonomialOrder.grevlex()


@dataclass(frozen=True)
class IdealPresentation:
    """A finite generating set for an ideal of Q[universe]."""

    universe: VariableUniverse
    generators: tuple[Polynomial, ...]

    def __post_init__(self) -> None:
        kept = []
        for gen in self.generators:
            if gen.universe != self.universe:
                raise ValidationError("generator lives in a different universe")
            if not gen.is_zero:
                kept.append(gen)
        object.__setattr__(self, "generators", tuple(kept))

    @staticmethod
    def of(universe: VariableUniverse, generators: Iterable[Polynomial]) -> "IdealPresentation":
        return IdealPresentation(universe, tuple(generators))

    @property
    def is_zero(self) -> bool:
        return not self.generators


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Gröbner basis: monic, auto-reduced, sorted by leading term."""

    universe: VariableUniverse
    order: MonomialOrder
    basis: tuple[Polynomial, ...]
    reduced: bool = True

    @property
    def is_unit(self) -> bool:
        return any(
            len(g.terms) == 1 and ONE_MONOMIAL in g.terms for g in self.basis
        )

    def leading_monomials(self) -> tuple[Monomial, ...]:
        key = self.order.key_function(len(self.universe))
        return tuple(max(g.terms, key=key) for g in self.basis)


# -- packed integer core ---------------------------------------------------
#
# A monomial over n variables is one int: variable i owns bits [32i, 32i+31],
# with bit 32i+31 serving as a guard.  Exponents stay far below 2**30 at desk
# scale, so field arithmetic never carries: multiplication is integer
# addition, and `lead divides mono` is `(mono - lead) & guards == 0` (any
# per-field borrow raises that field's guard bit).
#
# Order keys are also single ints, one 32-bit field per tuple slot of the
# MonomialOrder semantics, most significant slot on top: grevlex packs the
# total degree above complemented exponents (2**30 - e, reversed), lex packs
# the exponents directly, and a block key concatenates outer above inner.
# Every field is affine in the exponents, so key(m * s) - key(m) does not
# depend on m and the reduction loop can shift keys by a precomputed delta
# instead of recomputing them.

_FIELD_BITS = 32
_COMPLEMENT = 1 << 30

_KeySpec = tuple[tuple[str, tuple[int, ...]], ...]


def _simple_key_spec(kind: str, positions: tuple[int, ...]) -> _KeySpec:
    """Key fields for one order block, least significant field first."""
    if kind == "lex":
        return tuple(("exp", (vid,)) for vid in reversed(positions))
    fields: list[tuple[str, tuple[int, ...]]] = [
        ("comp", (vid,)) for vid in positions
    ]
    fields.append(("deg", positions))
    return tuple(fields)


def _key_spec(order: MonomialOrder, nvars: int) -> _KeySpec:
    if order.kind == "grevlex":
        return _simple_key_spec("grevlex", tuple(range(nvars)))
    if order.kind == "lex":
        return _simple_key_spec("lex", tuple(range(nvars)))
    block = order.block
    if block and block[-1] >= nvars:
        raise ValidationError("block variable outside the universe")
    rest = tuple(v for v in range(nvars) if v not in set(block))
    inner = _simple_key_spec(order.inner, rest)
    outer = _simple_key_spec(order.outer, block)
    return inner + outer


class _Reducer:
    """A content-free basis element prepared for fast top-division."""

    __slots__ = ("terms", "lead", "lead_key", "lead_coeff", "tail", "mask")

    def __init__(
        self, terms: dict[int, int], lead: int, lead_key: int, mask: int
    ) -> None:
        if terms[lead] < 0:
            terms = {vec: -coeff for vec, coeff in terms.items()}
        self.terms = terms
        self.lead = lead
        self.lead_key = lead_key
        self.lead_coeff = terms[lead]
        self.tail: tuple[tuple[int, int, int], ...] = ()
        self.mask = mask


class _Engine:
    """Packed-monomial arithmetic for one (universe, order) pair."""

    def __init__(self, universe: VariableUniverse, order: MonomialOrder) -> None:
        self.universe = universe
        self.order = order
        n = len(universe)
        self.nvars = n
        self.guards = sum(
            1 << (_FIELD_BITS * i + _FIELD_BITS - 1) for i in range(n)
        )
        self.shifts = tuple(range(0, _FIELD_BITS * n, _FIELD_BITS))
        self.spec = _key_spec(order, n)
        self._keys: dict[int, int] = {}
        self._masks: dict[int, int] = {}

    # -- packing ------------------------------------------------------------

    def pack(self, exponents: Sequence[int]) -> int:
        vec = 0
        for vid, exp in enumerate(exponents):
            vec |= exp << (_FIELD_BITS * vid)
        return vec

    def unpack(self, vec: int) -> list[int]:
        mask = (1 << _FIELD_BITS) - 1
        return [(vec >> s) & mask for s in self.shifts]

    def key_of(self, vec: int) -> int:
        cached = self._keys.get(vec)
        if cached is not None:
            return cached
        exps = self.unpack(vec)
        key = 0
        shift = 0
        for kind, positions in self.spec:
            if kind == "exp":
                value = exps[positions[0]]
            elif kind == "comp":
                value = _COMPLEMENT - exps[positions[0]]
            else:  # "deg"
                value = 0
                for p in positions:
                    value += exps[p]
            key |= value << shift
            shift += _FIELD_BITS
        self._keys[vec] = key
        return key

    def mask_of(self, vec: int) -> int:
        cached = self._masks.get(vec)
        if cached is not None:
            return cached
        mask = 0
        for vid, exp in enumerate(self.unpack(vec)):
            if exp:
                mask |= 1 << vid
        self._masks[vec] = mask
        return mask

    def to_dense(self, poly: Polynomial) -> dict[int, int]:
        denominator = 1
        for coeff in poly.terms.values():
            denominator = denominator * coeff.denominator // math.gcd(
                denominator, coeff.denominator
            )
        terms: dict[int, int] = {}
        for mono, coeff in poly.terms.items():
            vec = 0
            for vid, exp in mono.exponents:
                vec |= exp << (_FIELD_BITS * vid)
            terms[vec] = int(coeff * denominator)
        _strip_content(terms)
        return terms

    def to_poly(self, terms: dict[int, int]) -> Polynomial:
        lead_coeff = terms[max(terms, key=self.key_of)]
        out: dict[Monomial, Fraction] = {}
        for vec, coeff in terms.items():
            sparse = {vid: exp for vid, exp in enumerate(self.unpack(vec)) if exp}
            out[monomial(sparse)] = Fraction(coeff, lead_coeff)
        return Polynomial(self.universe, out)

    # -- arithmetic ----------------------------------------------------------

    def make_reducer(self, terms: dict[int, int]) -> _Reducer:
        lead = max(terms, key=self.key_of)
        reducer = _Reducer(terms, lead, self.key_of(lead), self.mask_of(lead))
        key_of = self.key_of
        reducer.tail = tuple(
            (vec, key_of(vec), coeff)
            for vec, coeff in reducer.terms.items()
            if vec != lead
        )
        return reducer

    def divides(self, a: int, b: int) -> bool:
        return not ((b - a) & self.guards)

    def lcm(self, a: int, b: int) -> int:
        mask = (1 << _FIELD_BITS) - 1
        return sum(
            max((a >> s) & mask, (b >> s) & mask) << s for s in self.shifts
        )

    def coprime(self, a: int, b: int) -> bool:
        mask = (1 << _FIELD_BITS) - 1
        return all(
            not ((a >> s) & mask) or not ((b >> s) & mask) for s in self.shifts
        )

    def spoly(self, f: _Reducer, g: _Reducer) -> dict[int, int]:
        lcm = self.lcm(f.lead, g.lead)
        f_shift = lcm - f.lead
        g_shift = lcm - g.lead
        shared = math.gcd(f.lead_coeff, g.lead_coeff)
        f_mult = g.lead_coeff // shared
        g_mult = f.lead_coeff // shared
        out: dict[int, int] = {}
        for vec, coeff in f.terms.items():
            out[vec + f_shift] = coeff * f_mult
        for vec, coeff in g.terms.items():
            target = vec + g_shift
            now = out.get(target, 0) - coeff * g_mult
            if now:
                out[target] = now
            elif target in out:
                del out[target]
        return out

    def reduce(
        self,
        start: dict[int, int],
        reducers: Sequence[_Reducer],
        track_scale: bool = False,
        cache: "_DivisorCache | None" = None,
    ) -> tuple[dict[int, int], int]:
        """Full normal form over Z against reducers sorted by leading key.

        The input may get multiplied by positive integers along the way; with
        `track_scale` their product is returned, so the remainder equals
        scale times the exact rational normal form of the input.
        """
        guards = self.guards
        key_of = self.key_of
        mask_of = self.mask_of
        work = dict(start)
        heap = [(-key_of(vec), vec) for vec in work]
        heapq.heapify(heap)
        remainder: dict[int, int] = {}
        scale = 1
        mult_events = 0
        lookup = cache.find if cache is not None else None
        while heap:
            neg_key, mono = heapq.heappop(heap)
            coeff = work.pop(mono, 0)
            if not coeff:
                continue  # stale heap entry
            mono_key = -neg_key
            if lookup is not None:
                hit = lookup(mono, mono_key)
            else:
                mono_mask = mask_of(mono)
                hit = None
                for reducer in reducers:
                    if reducer.lead_key > mono_key:
                        break  # sorted ascending: no later reducer divides
                    if (reducer.mask & mono_mask) == reducer.mask and not (
                        (mono - reducer.lead) & guards
                    ):
                        hit = reducer
                        break
            if hit is None:
                remainder[mono] = coeff
                continue
            shared = math.gcd(coeff, hit.lead_coeff)
            multiplier = hit.lead_coeff // shared  # positive
            factor = coeff // shared  # carries the sign of coeff
            if multiplier != 1:
                work = {vec: c * multiplier for vec, c in work.items()}
                if remainder:
                    remainder = {
                        vec: c * multiplier for vec, c in remainder.items()
                    }
                if track_scale:
                    scale *= multiplier
                mult_events += 1
            delta_vec = mono - hit.lead
            delta_key = mono_key - hit.lead_key
            # Every monomial created here sits strictly below `mono`, and the
            # remainder holds only monomials strictly above it, so the pop
            # order stays monotone and the remainder is never revisited.
            for tail_vec, tail_key, tail_coeff in hit.tail:
                target = tail_vec + delta_vec
                prev = work.get(target)
                if prev is None:
                    work[target] = -factor * tail_coeff
                    heapq.heappush(heap, (-(tail_key + delta_key), target))
                else:
                    now = prev - factor * tail_coeff
                    if now:
                        work[target] = now
                    else:
                        del work[target]
            if mult_events >= _STRIP_INTERVAL:
                # Multiplier cascades swell every coefficient by a junk
                # common factor; strip it between rewrite steps, while the
                # polynomial is exactly work + remainder.  With a tracked
                # scale only the part dividing the scale may go.
                mult_events = 0
                content = 0
                for c in work.values():
                    content = math.gcd(content, c)
                    if content == 1:
                        break
                if content != 1:
                    for c in remainder.values():
                        content = math.gcd(content, c)
                        if content == 1:
                            break
                if track_scale and content > 1:
                    content = math.gcd(content, scale)
                if content > 1:
                    work = {vec: c // content for vec, c in work.items()}
                    remainder = {
                        vec: c // content for vec, c in remainder.items()
                    }
                    if track_scale:
                        scale //= content
        return remainder, scale

    def interreduce(self, all_terms: list[dict[int, int]]) -> list[dict[int, int]]:
        """Turn a Gröbner generating set into reduced-basis term dicts."""
        entries = []
        for terms in all_terms:
            if terms:
                entries.append((self.key_of(max(terms, key=self.key_of)), terms))
        entries.sort(key=lambda pair: pair[0])
        kept: list[_Reducer] = []
        for _, terms in entries:
            reducer = self.make_reducer(dict(terms))
            if any(self.divides(other.lead, reducer.lead) for other in kept):
                continue
            kept.append(reducer)
        reduced: list[dict[int, int]] = []
        for index, reducer in enumerate(kept):
            others = kept[:index] + kept[index + 1 :]
            remainder, _ = self.reduce(dict(reducer.terms), others)
            if not remainder:
                continue
            _strip_content(remainder)
            reduced.append(remainder)
        reduced.sort(key=lambda t: self.key_of(max(t, key=self.key_of)))
        return reduced


class _DivisorCache:
    """Memoized divisor lookup for one growing, sorted reducer list.

    Popped monomials repeat heavily across reductions, so both hits and
    misses are cached; a stale miss is re-verified only against reducers
    installed after it was recorded.
    """

    __slots__ = ("engine", "scan_order", "appended", "entries")

    def __init__(self, engine: _Engine, scan_order: list[_Reducer]) -> None:
        self.engine = engine
        self.scan_order = scan_order  # shared, ascending by lead key
        self.appended: list[_Reducer] = []
        self.entries: dict[int, tuple[int, _Reducer | None]] = {}

    def add(self, reducer: _Reducer) -> None:
        self.appended.append(reducer)

    def find(self, mono: int, mono_key: int) -> _Reducer | None:
        count = len(self.appended)
        entry = self.entries.get(mono)
        guards = self.engine.guards
        if entry is not None:
            stamp, hit = entry
            if hit is not None:
                return hit
            if stamp == count:
                return None
            best = None
            for reducer in self.appended[stamp:]:
                if not ((mono - reducer.lead) & guards):
                    if best is None or len(reducer.tail) < len(best.tail):
                        best = reducer
                        if len(best.tail) <= _SHORT_TAIL:
                            break
            self.entries[mono] = (count, best)
            return best
        # Any divisor is sound, so among all of them pick the shortest tail:
        # rewriting through a huge reducer floods the work heap.  Stop early
        # once the tail is too short to be worth beating.
        mono_mask = self.engine.mask_of(mono)
        best = None
        for reducer in self.scan_order:
            if reducer.lead_key > mono_key:
                break
            if (reducer.mask & mono_mask) == reducer.mask and not (
                (mono - reducer.lead) & guards
            ):
                if best is None or len(reducer.tail) < len(best.tail):
                    best = reducer
                    if len(best.tail) <= _SHORT_TAIL:
                        break
        self.entries[mono] = (count, best)
        return best


@lru_cache(maxsize=256)
def _engine_for(universe: VariableUniverse, order: MonomialOrder) -> _Engine:
    return _Engine(universe, order)


def _strip_content(terms: dict[int, int]) -> None:
    content = 0
    for coeff in terms.values():
        content = math.gcd(content, coeff)
        if content == 1:
            return
    if content > 1:
        for vec in terms:
            terms[vec] //= content


def _peel_pinned_coordinates(gens: list[dict[int, int]], engine: _Engine) -> bool:
    """Substitute away generators of the form c*v + d for a variable v.

    Such a generator pins v to a constant, so v can be eliminated from every
    other generator without changing the ideal; the pinning generator itself
    stays.  Returns True when a substitution exposes the unit ideal.
    """
    pinned: set[int] = set()

    def single_variable(vec: int) -> int | None:
        vid = None
        for index, exp in enumerate(engine.unpack(vec)):
            if exp == 0:
                continue
            if exp > 1 or vid is not None:
                return None
            vid = index
        return vid

    while True:
        found = None
        for position, gen in enumerate(gens):
            if len(gen) == 1:
                ((vec, coeff),) = gen.items()
                if vec:
                    vid = single_variable(vec)
                    if vid is not None and vid not in pinned:
                        found = (position, vid, coeff, 0)
                        break
            elif len(gen) == 2 and 0 in gen:
                vec = next(v for v in gen if v)
                vid = single_variable(vec)
                if vid is not None and vid not in pinned:
                    found = (position, vid, gen[vec], gen[0])
                    break
        if found is None:
            return False
        position, vid, c, d = found
        pinned.add(vid)
        shift = _FIELD_BITS * vid
        field = ((1 << _FIELD_BITS) - 1) << shift
        for index, gen in enumerate(gens):
            if index == position:
                continue
            top = max(((vec & field) >> shift for vec in gen), default=0)
            if top == 0:
                continue
            # v is pinned to -d/c; clear denominators with c**top.
            replaced: dict[int, int] = {}
            for vec, coeff in gen.items():
                k = (vec & field) >> shift
                base = vec & ~field
                contribution = coeff * c ** (top - k) * (-d) ** k
                now = replaced.get(base, 0) + contribution
                if now:
                    replaced[base] = now
                elif base in replaced:
                    del replaced[base]
            _strip_content(replaced)
            if len(replaced) == 1 and 0 in replaced:
                return True  # a nonzero constant: unit ideal
            gens[index] = replaced


class _PairQueue:
    """Pending S-pairs, popped smallest-lcm-first (normal strategy)."""

    def __init__(self) -> None:
        self._heap: list[tuple[int, int, int]] = []
        self._live: dict[tuple[int, int], int] = {}  # pair -> lcm vec

    def push(self, i: int, j: int, lcm_key: int, lcm_vec: int) -> None:
        pair = (min(i, j), max(i, j))
        if pair in self._live:
            return
        self._live[pair] = lcm_vec
        heapq.heappush(self._heap, (lcm_key, pair[0], pair[1]))

    def discard(self, i: int, j: int) -> None:
        self._live.pop((min(i, j), max(i, j)), None)

    def pop(self) -> tuple[int, int] | None:
        while self._heap:
            _, i, j = heapq.heappop(self._heap)
            if (i, j) in self._live:
                del self._live[(i, j)]
                return (i, j)
        return None

    def live_pairs(self) -> list[tuple[tuple[int, int], int]]:
        return list(self._live.items())

    def __bool__(self) -> bool:
        return bool(self._live)


def _gebauer_moeller_update(
    queue: _PairQueue,
    engine: _Engine,
    reducers: list[_Reducer],
    alive: set[int],
    new_index: int,
) -> None:
    """Install pairs against a new basis element, pruning redundant ones."""
    new_lead = reducers[new_index].lead
    candidates: list[tuple[int, int]] = []
    for i in sorted(alive):
        if i == new_index:
            continue
        candidates.append((i, engine.lcm(reducers[i].lead, new_lead)))

    # Criterion M/F: drop a new pair whose lcm is a multiple of another new
    # pair's lcm (ties keep exactly one survivor).
    surviving: list[tuple[int, int]] = []
    for idx, (i, lcm_i) in enumerate(candidates):
        dominated = False
        for jdx, (j, lcm_j) in enumerate(candidates):
            if idx == jdx:
                continue
            if engine.divides(lcm_j, lcm_i):
                if lcm_j == lcm_i:
                    if jdx < idx:
                        dominated = True
                        break
                else:
                    dominated = True
                    break
        if not dominated:
            surviving.append((i, lcm_i))

    # Criterion B: coprime leading monomials reduce to zero; drop them, but
    # only after they took part in the domination pass above.
    for i, lcm_i in surviving:
        if engine.coprime(reducers[i].lead, new_lead):
            continue
        queue.push(i, new_index, engine.key_of(lcm_i), lcm_i)

    # Prune old pairs strictly superseded by the new element.
    for (i, j), lcm_old in queue.live_pairs():
        if not engine.divides(new_lead, lcm_old):
            continue
        if engine.lcm(reducers[i].lead, new_lead) == lcm_old:
            continue
        if engine.lcm(reducers[j].lead, new_lead) == lcm_old:
            continue
        queue.discard(i, j)

    # Retire basis elements whose lead became redundant (pair generation only).
    for i in list(alive):
        if i != new_index and engine.divides(new_lead, reducers[i].lead):
            alive.discard(i)
    alive.add(new_index)


def groebner_basis(
    presentation: IdealPresentation,
    order: MonomialOrder = DEFAULT_ORDER,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> GroebnerBasis:
    """Reduced Gröbner basis of the ideal, certified on the input generators.

    Raises BudgetExceededError after `max_pairs` S-pair reductions, which
    flags the instance as beyond desk scale rather than looping silently.
    """
    return _groebner_cached(
        presentation.universe, presentation.generators, order, max_pairs
    )


@lru_cache(maxsize=1024)
def _groebner_cached(
    universe: VariableUniverse,
    generators: tuple[Polynomial, ...],
    order: MonomialOrder,
    max_pairs: int,
) -> GroebnerBasis:
    engine = _engine_for(universe, order)
    dense_gens = [engine.to_dense(g) for g in generators if not g.is_zero]
    if not dense_gens:
        return GroebnerBasis(universe, order, ())
    unit_basis = GroebnerBasis(universe, order, (constant(universe, 1),))
    originals = [dict(g) for g in dense_gens]

    if _peel_pinned_coordinates(dense_gens, engine):
        return unit_basis
    dense_gens = [g for g in dense_gens if g]

    reducers: list[_Reducer] = []
    scan_order: list[_Reducer] = []  # ascending by lead key, for reduce()
    alive: set[int] = set()
    queue = _PairQueue()
    cache = _DivisorCache(engine, scan_order)

    def install(terms: dict[int, int]) -> bool:
        """Add one polynomial; returns True when the ideal is revealed unit."""
        reducer = engine.make_reducer(terms)
        if not reducer.lead:
            return True
        reducers.append(reducer)
        insort(scan_order, reducer, key=lambda r: r.lead_key)
        cache.add(reducer)
        _gebauer_moeller_update(queue, engine, reducers, alive, len(reducers) - 1)
        return False

    key_of = engine.key_of
    for gen in sorted(dense_gens, key=lambda t: key_of(max(t, key=key_of))):
        remainder, _ = engine.reduce(gen, scan_order, cache=cache)
        if not remainder:
            continue
        _strip_content(remainder)
        if install(remainder):
            return unit_basis

    spent = 0
    while queue:
        popped = queue.pop()
        if popped is None:
            break
        spent += 1
        if spent > max_pairs:
            raise BudgetExceededError(
                f"Gröbner pair budget of {max_pairs} exhausted"
            )
        i, j = popped
        s = engine.spoly(reducers[i], reducers[j])
        if not s:
            continue
        remainder, _ = engine.reduce(s, scan_order, cache=cache)
        if not remainder:
            continue
        _strip_content(remainder)
        if install(remainder):
            return unit_basis

    basis_terms = engine.interreduce(
        [dict(reducers[i].terms) for i in sorted(alive)]
    )
    basis = tuple(engine.to_poly(t) for t in basis_terms)
    result = GroebnerBasis(universe, order, basis)

    final = [engine.make_reducer(dict(t)) for t in basis_terms]
    for gen in originals:
        check, _ = engine.reduce(gen, final)
        if check:
            raise InternalInvariantError(
                "input generator does not reduce to zero against its own basis"
            )
    return result


def normal_form(f: Polynomial, basis: GroebnerBasis) -> Polynomial:
    """Canonical remainder of f modulo the basis; zero iff f is in the ideal."""
    if f.universe != basis.universe:
        raise ValidationError("polynomial and basis universes differ")
    if f.is_zero or not basis.basis:
        return f
    engine = _engine_for(basis.universe, basis.order)
    reducers = [engine.make_reducer(engine.to_dense(p)) for p in basis.basis]
    denominator = 1
    for coeff in f.terms.values():
        denominator = denominator * coeff.denominator // math.gcd(
            denominator, coeff.denominator
        )
    work: dict[int, int] = {}
    for mono, coeff in f.terms.items():
        vec = 0
        for vid, exp in mono.exponents:
            vec |= exp << (_FIELD_BITS * vid)
        work[vec] = int(coeff * denominator)
    remainder, scale = engine.reduce(work, reducers, track_scale=True)
    if not remainder:
        return Polynomial(f.universe)
    divisor = denominator * scale
    terms = {}
    for vec, coeff in remainder.items():
        sparse = {vid: exp for vid, exp in enumerate(engine.unpack(vec)) if exp}
        terms[monomial(sparse)] = Fraction(coeff, divisor)
    return Polynomial(f.universe, terms)


def certify_buchberger(basis: GroebnerBasis) -> bool:
    """Check every S-polynomial of the basis reduces to zero (test oracle)."""
    engine = _engine_for(basis.universe, basis.order)
    reducers = [engine.make_reducer(engine.to_dense(p)) for p in basis.basis]
    for f, g in itertools.combinations(reducers, 2):
        s = engine.spoly(f, g)
        if not s:
            continue
        remainder, _ = engine.reduce(s, reducers)
        if remainder:
            return False
    return True


def is_unit_ideal(
    presentation: IdealPresentation, max_pairs: int = DEFAULT_PAIR_BUDGET
) -> bool:
    return groebner_basis(presentation, max_pairs=max_pairs).is_unit


def ideal_equal(
    left: IdealPresentation,
    right: IdealPresentation,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> bool:
    """Exact ideal equality via uniqueness of the reduced Gröbner basis."""
    if left.universe != right.universe:
        raise ValidationError("ideals live in different universes")
    lhs = groebner_basis(left, max_pairs=max_pairs)
    rhs = groebner_basis(right, max_pairs=max_pairs)
    return lhs.basis == rhs.basis


def ideal_membership(
    f: Polynomial, presentation: IdealPresentation, max_pairs: int = DEFAULT_PAIR_BUDGET
) -> bool:
    basis = groebner_basis(presentation, max_pairs=max_pairs)
    return normal_form(f, basis).is_zero


def krull_dimension(
    presentation: IdealPresentation, max_pairs: int = DEFAULT_PAIR_BUDGET
) -> Dimension:
    """Dimension of the vanishing set over the algebraic closure, or EMPTY.

    Computed as the maximum size of a variable subset independent modulo the
    leading-term ideal, i.e. nvars minus a minimum hitting set of the leading
    supports.
    """
    basis = groebner_basis(presentation, max_pairs=max_pairs)
    if basis.is_unit:
        return EMPTY
    nvars = len(presentation.universe)
    if not basis.basis:
        return nvars
    supports = [frozenset(m.variables()) for m in basis.leading_monomials()]
    return nvars - _minimum_hitting_set_size(supports)


def _minimum_hitting_set_size(supports: list[frozenset[int]]) -> int:
    minimal: list[frozenset[int]] = []
    for s in sorted(set(supports), key=len):
        if not any(t <= s for t in minimal):
            minimal.append(s)
    best = len(minimal)  # one fresh variable per support always suffices

    def search(remaining: tuple[frozenset[int], ...], chosen: int, best_so_far: int) -> int:
        if not remaining:
            return chosen
        if chosen + 1 >= best_so_far:
            return best_so_far
        pivot = min(remaining, key=len)
        result = best_so_far
        for var in sorted(pivot):
            rest = tuple(s for s in remaining if var not in s)
            result = min(result, search(rest, chosen + 1, result))
        return result

    return search(tuple(minimal), 0, best)


def _fresh_tag_universe(universe: VariableUniverse) -> tuple[VariableUniverse, int]:
    tag_name = universe.fresh_name("tagvar")
    extended = universe.extend([tag_name])
    return extended, extended.index(tag_name)


def intersect(
    left: IdealPresentation,
    right: IdealPresentation,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> IdealPresentation:
    """I ∩ J via a single tag variable: eliminate t from t·I + (1−t)·J."""
    if left.universe != right.universe:
        raise ValidationError("ideals live in different universes")
    universe = left.universe
    extended, tag = _fresh_tag_universe(universe)
    t = variable(extended, tag)
    one_minus_t = constant(extended, 1) - t
    gens = [t * transport(f, extended) for f in left.generators]
    gens += [one_minus_t * transport(g, extended) for g in right.generators]
    mixed = IdealPresentation(extended, tuple(gens))
    eliminated = eliminate(mixed, {tag}, max_pairs=max_pairs)
    return IdealPresentation(
        universe, tuple(transport(g, universe) for g in eliminated.generators)
    )


def _exact_divide(h: Polynomial, g: Polynomial) -> Polynomial:
    """h / g for h in the principal ideal (g); exact by construction."""
    key = DEFAULT_ORDER.key_function(len(h.universe))
    lead_g = max(g.terms, key=key)
    lc_g = g.terms[lead_g]
    work = dict(h.terms)
    quotient: dict[Monomial, Fraction] = {}
    while work:
        mono = max(work, key=key)
        coeff = work[mono]
        if not lead_g.divides(mono):
            raise InternalInvariantError("exact polynomial division left a remainder")
        q_mono = mono.quotient_by(lead_g)
        q_coeff = coeff / lc_g
        quotient[q_mono] = quotient.get(q_mono, Fraction(0)) + q_coeff
        for m2, c2 in g.terms.items():
            target = m2.times(q_mono)
            acc = work.get(target, Fraction(0)) - q_coeff * c2
            if acc:
                work[target] = acc
            else:
                work.pop(target, None)
    return Polynomial(h.universe, quotient)


def _quotient_by_element(
    presentation: IdealPresentation, g: Polynomial, max_pairs: int
) -> IdealPresentation:
    universe = presentation.universe
    principal = IdealPresentation(universe, (g,))
    common = intersect(presentation, principal, max_pairs=max_pairs)
    gens = tuple(_exact_divide(h, g) for h in common.generators)
    return IdealPresentation(universe, gens)


def ideal_quotient(
    presentation: IdealPresentation,
    divisor: IdealPresentation,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> IdealPresentation:
    """(I : J) = {f : f·J ⊆ I}; intersection of per-generator quotients."""
    if presentation.universe != divisor.universe:
        raise ValidationError("ideals live in different universes")
    universe = presentation.universe
    if not divisor.generators:
        # (I : (0)) is the whole ring.
        return IdealPresentation(universe, (constant(universe, 1),))
    result: IdealPresentation | None = None
    for g in divisor.generators:
        partial = _quotient_by_element(presentation, g, max_pairs)
        if result is None:
            result = partial
        else:
            result = intersect(result, partial, max_pairs=max_pairs)
    assert result is not None
    reduced = groebner_basis(result, max_pairs=max_pairs)
    if reduced.is_unit:
        return IdealPresentation(universe, (constant(universe, 1),))
    return IdealPresentation(universe, reduced.basis)


def saturation(
    presentation: IdealPresentation,
    divisor: IdealPresentation,
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> IdealPresentation:
    """(I : J^∞): iterate the quotient until two consecutive iterates agree."""
    current = presentation
    for _ in range(_SATURATION_ITERATION_CAP):
        next_step = ideal_quotient(current, divisor, max_pairs=max_pairs)
        if ideal_equal(next_step, current, max_pairs=max_pairs):
            return next_step
        current = next_step
    raise BudgetExceededError("saturation did not stabilize within the iteration cap")


def eliminate(
    presentation: IdealPresentation,
    block: Iterable[int],
    max_pairs: int = DEFAULT_PAIR_BUDGET,
) -> IdealPresentation:
    """I ∩ Q[remaining variables], presented over the surviving names.

    With an empty block this is the identity (same names, same generators).
    """
    block_set = set(block)
    universe = presentation.universe
    nvars = len(universe)
    for vid in block_set:
        if not 0 <= vid < nvars:
            raise ValidationError(f"block variable id {vid} outside the universe")
    if not block_set:
        return IdealPresentation(universe, presentation.generators)
    order = MonomialOrder.block_elimination(block_set)
    basis = groebner_basis(presentation, order=order, max_pairs=max_pairs)
    survivors = [name for vid, name in enumerate(universe.names) if vid not in block_set]
    reduced_universe = VariableUniverse(tuple(survivors))
    kept = [
        transport(g, reduced_universe)
        for g in basis.basis
        if not (g.variables() & block_set)
    ]
    return IdealPresentation(reduced_universe, tuple(kept))
