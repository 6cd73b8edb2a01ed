"""Order-by-order lifting of jets on complete intersections.

Everything here works with truncated power series.  A jet of level m is
represented by its canonical polynomial lift (coefficients beyond t^m are
zero), so criteria that compare orders beyond the jet level are decidable.

For F_1, ..., F_r cutting a complete intersection in A^N and an m-jet u
with F(u) ≡ 0 mod t^{m+1}, the lifting criterion picks r columns of the
Jacobian J(u) whose minor R has determinant of series order exactly e (e is
the order of the full r-minor ideal of J(u)), and asks that every entry of
adj(R) * F(u) have order at least m+e+1.  When the criterion holds, one new
coefficient vector v can be solved for so that w = u + t^{m+1} v satisfies
F(w) ≡ 0 mod t^{m+2}: the entries of adj(R)·J are themselves r-minors of J
(Cramer's column replacement), hence have order >= e, so the coefficient
equation at t^{m+e+1} is triangular in the bound coordinates.

The image test for the truncation map from level m to level p <= m uses the
Smith normal form of J(u) over Q[t]/(t^{m-p}).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import InternalInvariantError, ValidationError
from .polynomials import Polynomial, Scalar, partial_derivative
from .series import INFINITE_ORDER, TruncatedSeries, evaluate_series


@dataclass(frozen=True)
class SeriesVector:
    """A vector of truncated series with one shared truncation order."""

    entries: tuple[TruncatedSeries, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValidationError("a series vector needs at least one entry")
        orders = {s.truncation_order for s in self.entries}
        if len(orders) != 1:
            raise ValidationError("entries carry different truncation orders")

    @property
    def truncation_order(self) -> int:
        return self.entries[0].truncation_order

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> TruncatedSeries:
        return self.entries[i]

    def truncate(self, order: int) -> "SeriesVector":
        return SeriesVector(tuple(s.truncate(order) for s in self.entries))

    def padded(self, order: int) -> "SeriesVector":
        return SeriesVector(tuple(s.padded(order) for s in self.entries))

    def is_zero_vector(self) -> bool:
        return all(s.is_zero for s in self.entries)


def series_vector(
    entries: Sequence[Sequence[Scalar] | TruncatedSeries], truncation_order: int
) -> SeriesVector:
    converted = []
    for entry in entries:
        if isinstance(entry, TruncatedSeries):
            converted.append(entry.padded(truncation_order))
        else:
            converted.append(TruncatedSeries.from_coefficients(entry, truncation_order))
    return SeriesVector(tuple(converted))


@dataclass(frozen=True)
class SeriesMatrix:
    """A rectangular matrix of truncated series, uniform truncation."""

    rows: tuple[tuple[TruncatedSeries, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows or not self.rows[0]:
            raise ValidationError("a series matrix needs at least one entry")
        width = len(self.rows[0])
        orders = set()
        for row in self.rows:
            if len(row) != width:
                raise ValidationError("rows have different lengths")
            orders.update(s.truncation_order for s in row)
        if len(orders) != 1:
            raise ValidationError("entries carry different truncation orders")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def truncation_order(self) -> int:
        return self.rows[0][0].truncation_order

    @staticmethod
    def identity(n: int, truncation_order: int) -> "SeriesMatrix":
        return SeriesMatrix(
            tuple(
                tuple(
                    TruncatedSeries.constant(1 if i == j else 0, truncation_order)
                    for j in range(n)
                )
                for i in range(n)
            )
        )

    def entry(self, i: int, j: int) -> TruncatedSeries:
        return self.rows[i][j]

    def truncate(self, order: int) -> "SeriesMatrix":
        return SeriesMatrix(
            tuple(tuple(s.truncate(order) for s in row) for row in self.rows)
        )

    def times_matrix(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if self.ncols != other.nrows:
            raise ValidationError("matrix shapes do not compose")
        order = min(self.truncation_order, other.truncation_order)
        zero = TruncatedSeries.zero(order)
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(tuple(row))
        return SeriesMatrix(tuple(out))

    def times_vector(self, vec: SeriesVector) -> SeriesVector:
        if self.ncols != len(vec):
            raise ValidationError("matrix and vector shapes do not compose")
        order = min(self.truncation_order, vec.truncation_order)
        zero = TruncatedSeries.zero(order)
        out = []
        for i in range(self.nrows):
            acc = zero
            for k in range(self.ncols):
                acc = acc + self.rows[i][k] * vec[k]
            out.append(acc)
        return SeriesVector(tuple(out))

    def submatrix(self, row_pick: Sequence[int], col_pick: Sequence[int]) -> "SeriesMatrix":
        return SeriesMatrix(
            tuple(tuple(self.rows[i][j] for j in col_pick) for i in row_pick)
        )


def series_determinant(matrix: SeriesMatrix) -> TruncatedSeries:
    if matrix.nrows != matrix.ncols:
        raise ValidationError("determinant of a non-square matrix")
    return _det(matrix.rows, matrix.truncation_order)


def _det(rows: Sequence[Sequence[TruncatedSeries]], order: int) -> TruncatedSeries:
    size = len(rows)
    if size == 1:
        return rows[0][0]
    total = TruncatedSeries.zero(order)
    for col in range(size):
        entry = rows[0][col]
        if entry.is_zero:
            continue
        sub = [[row[c] for c in range(size) if c != col] for row in rows[1:]]
        term = entry * _det(sub, order)
        total = total + term if col % 2 == 0 else total - term
    return total


def series_adjugate(matrix: SeriesMatrix) -> SeriesMatrix:
    """Classical adjoint: adj(A) * A = A * adj(A) = det(A) * Id."""
    if matrix.nrows != matrix.ncols:
        raise ValidationError("adjugate of a non-square matrix")
    n = matrix.nrows
    order = matrix.truncation_order
    if n == 1:
        return SeriesMatrix(((TruncatedSeries.constant(1, order),),))
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            rows = [
                [matrix.rows[r][c] for c in range(n) if c != i]
                for r in range(n)
                if r != j
            ]
            cofactor = _det(rows, order)
            row.append(cofactor if (i + j) % 2 == 0 else -cofactor)
        out.append(tuple(row))
    return SeriesMatrix(tuple(out))


def jacobian_at(F: Sequence[Polynomial], u: SeriesVector) -> SeriesMatrix:
    """The matrix of partial derivatives of F evaluated along u."""
    if not F:
        raise ValidationError("at least one polynomial is required")
    universe = F[0].universe
    for f in F:
        if f.universe != universe:
            raise ValidationError("polynomials live in different universes")
    if len(u) != len(universe):
        raise ValidationError(
            f"vector length {len(u)} does not match {len(universe)} variables"
        )
    order = u.truncation_order
    assignment = {vid: u[vid] for vid in range(len(universe))}
    rows = []
    for f in F:
        row = []
        for vid in range(len(universe)):
            df = partial_derivative(f, vid)
            if df.is_zero:
                row.append(TruncatedSeries.zero(order))
            else:
                row.append(evaluate_series(df, assignment, order))
        rows.append(tuple(row))
    return SeriesMatrix(tuple(rows))


def _evaluate_system(F: Sequence[Polynomial], u: SeriesVector) -> SeriesVector:
    universe = F[0].universe
    assignment = {vid: u[vid] for vid in range(len(universe))}
    order = u.truncation_order
    out = []
    for f in F:
        if f.is_zero:
            out.append(TruncatedSeries.zero(order))
        else:
            out.append(evaluate_series(f, assignment, order))
    return SeriesVector(tuple(out))


def _minor_order_floor(matrix: SeriesMatrix, size: int) -> int | float:
    """Least series order among all size x size minors (INFINITE_ORDER if all vanish)."""
    best: int | float = INFINITE_ORDER
    for row_pick in combinations(range(matrix.nrows), size):
        for col_pick in combinations(range(matrix.ncols), size):
            det = series_determinant(matrix.submatrix(row_pick, col_pick))
            best = min(best, det.order())
    return best


@dataclass(frozen=True)
class _LiftFrame:
    """Shared preparation for liftable/lift_step at one working truncation."""

    F: tuple[Polynomial, ...]
    u: SeriesVector  # canonical lift, working truncation
    jacobian: SeriesMatrix
    values: SeriesVector  # F(u)
    bound_columns: tuple[int, ...]
    adjoint: SeriesMatrix
    residual: SeriesVector  # adj(R) * F(u)
    det_lead: Fraction  # coefficient of t^e in det(R)


def _prepare(
    F: Sequence[Polynomial], u: SeriesVector, m: int, e: int, working_order: int
) -> _LiftFrame:
    system = tuple(F)
    if not system:
        raise ValidationError("at least one polynomial is required")
    universe = system[0].universe
    n, r = len(universe), len(system)
    if r > n:
        raise ValidationError("more equations than variables")
    if e < 0 or m < e:
        raise ValidationError(f"need m >= e >= 0, got m={m}, e={e}")
    if len(u) != n:
        raise ValidationError("jet has the wrong number of coordinates")
    if u.truncation_order < m + 1:
        raise ValidationError(f"an m-jet needs truncation order at least {m + 1}")
    lift = u.truncate(m + 1).padded(working_order)

    values = _evaluate_system(system, lift)
    for s in values.entries:
        if s.order() < m + 1:
            raise ValidationError("the jet does not satisfy the equations mod t^(m+1)")

    jac = jacobian_at(system, lift)
    floor = _minor_order_floor(jac, r)
    if floor != e:
        raise ValidationError(
            f"the Jacobian minor ideal has order {floor}, not the declared e={e}"
        )
    for col_pick in combinations(range(n), r):
        sub = jac.submatrix(tuple(range(r)), col_pick)
        det = series_determinant(sub)
        if det.order() == e:
            adjoint = series_adjugate(sub)
            return _LiftFrame(
                F=system,
                u=lift,
                jacobian=jac,
                values=values,
                bound_columns=col_pick,
                adjoint=adjoint,
                residual=adjoint.times_vector(values),
                det_lead=det.coefficient(e),
            )
    raise InternalInvariantError("no column subset achieves the minimal minor order")


def liftable(F: Sequence[Polynomial], u: SeriesVector, m: int, e: int) -> bool:
    """Does the m-jet u extend to jets of every higher level?

    True exactly when every entry of adj(R) * F(u) has order >= m+e+1 for
    the selected order-e column submatrix R of the Jacobian at u.
    """
    frame = _prepare(F, u, m, e, working_order=m + e + 1)
    return all(s.order() >= m + e + 1 for s in frame.residual.entries)


def lift_step(
    F: Sequence[Polynomial],
    u: SeriesVector,
    m: int,
    e: int,
    free_choice: Mapping[int, Scalar] | None = None,
) -> SeriesVector:
    """Extend a liftable m-jet by one level.

    Returns w = u + t^{m+1} v with F(w) ≡ 0 mod t^{m+2}.  The coordinates of
    v in the bound (pivot) columns are solved for; the remaining N-r
    coordinates may be supplied in `free_choice` keyed by variable id and
    default to zero.
    """
    working = m + e + 2
    frame = _prepare(F, u, m, e, working_order=working)
    if any(s.order() < m + e + 1 for s in frame.residual.entries):
        raise ValidationError("jet is not liftable; no step possible")

    n = len(frame.u)
    r = len(frame.F)
    bound = frame.bound_columns
    free = tuple(j for j in range(n) if j not in bound)
    choice = dict(free_choice or {})
    for key in choice:
        if key not in free:
            raise ValidationError(
                f"variable id {key} is not one of the free columns {free}"
            )
    v = [Fraction(0)] * n
    for j in free:
        v[j] = Fraction(choice.get(j, 0))

    # Coefficient of t^{m+e+1} in adj(R)*F(w) must vanish:
    #   A_i + det_lead * v_bound_i + sum_k [t^e](adj(R)*J)_{i,free_k} v_free_k = 0
    product = frame.adjoint.times_matrix(frame.jacobian)
    for i in range(r):
        acc = frame.residual[i].coefficient(m + e + 1)
        for j in free:
            acc += product.entry(i, j).coefficient(e) * v[j]
        v[bound[i]] = -acc / frame.det_lead

    extended = []
    for j in range(n):
        coeffs = list(frame.u[j].truncate(m + 2).coefficients)
        coeffs[m + 1] = coeffs[m + 1] + v[j]
        extended.append(TruncatedSeries(tuple(coeffs)))
    w = SeriesVector(tuple(extended))

    for s in _evaluate_system(frame.F, w).entries:
        if not s.is_zero:
            raise InternalInvariantError("lift step failed to kill the residual")
    return w


# -- Smith normal form over Q[t]/(t^K) ----------------------------------------


def smith_form(
    matrix: SeriesMatrix,
) -> tuple[tuple[int, ...], SeriesMatrix, SeriesMatrix]:
    """U * A * V = diag(t^a_1, ..., t^a_k) (padded with zero rows/columns).

    Works over Q[t]/(t^K) where K is the truncation order of A.  Orders are
    reported in 0..K with K standing for the zero class, ascending.  U and V
    are unimodular (products of swaps, unit row scalings and shears).
    """
    K = matrix.truncation_order
    work = [list(row) for row in matrix.rows]
    nrows, ncols = matrix.nrows, matrix.ncols
    u_rows = [list(row) for row in SeriesMatrix.identity(nrows, K).rows]
    v_rows = [list(row) for row in SeriesMatrix.identity(ncols, K).rows]

    def swap_rows(a: int, b: int) -> None:
        work[a], work[b] = work[b], work[a]
        u_rows[a], u_rows[b] = u_rows[b], u_rows[a]

    def swap_cols(a: int, b: int) -> None:
        for row in work:
            row[a], row[b] = row[b], row[a]
        for row in v_rows:
            row[a], row[b] = row[b], row[a]

    def scale_row(i: int, factor: TruncatedSeries) -> None:
        work[i] = [factor * s for s in work[i]]
        u_rows[i] = [factor * s for s in u_rows[i]]

    def shear_row(target: int, source: int, factor: TruncatedSeries) -> None:
        work[target] = [a - factor * b for a, b in zip(work[target], work[source])]
        u_rows[target] = [
            a - factor * b for a, b in zip(u_rows[target], u_rows[source])
        ]

    def shear_col(target: int, source: int, factor: TruncatedSeries) -> None:
        for row in work:
            row[target] = row[target] - factor * row[source]
        for row in v_rows:
            row[target] = row[target] - factor * row[source]

    count = min(nrows, ncols)
    orders: list[int] = []
    for k in range(count):
        pivot_pos: tuple[int, int] | None = None
        pivot_order: int | float = INFINITE_ORDER
        for i in range(k, nrows):
            for j in range(k, ncols):
                order = work[i][j].order()
                if order < pivot_order:
                    pivot_order = order
                    pivot_pos = (i, j)
        if pivot_pos is None or pivot_order == INFINITE_ORDER:
            orders.extend([K] * (count - k))
            break
        a = int(pivot_order)
        orders.append(a)
        swap_rows(k, pivot_pos[0])
        swap_cols(k, pivot_pos[1])
        # Normalize the pivot to exactly t^a by a unit row scaling.
        unit = work[k][k].shifted_down(a).padded(K)
        scale_row(k, unit.inverse())
        for i in range(nrows):
            if i == k or work[i][k].is_zero:
                continue
            shear_row(i, k, work[i][k].shifted_down(a).padded(K))
        for j in range(ncols):
            if j == k or work[k][j].is_zero:
                continue
            shear_col(j, k, work[k][j].shifted_down(a).padded(K))

    U = SeriesMatrix(tuple(tuple(row) for row in u_rows))
    V = SeriesMatrix(tuple(tuple(row) for row in v_rows))

    transformed = U.times_matrix(matrix).times_matrix(V)
    for i in range(nrows):
        for j in range(ncols):
            expected = (
                TruncatedSeries.t_power(orders[i], K)
                if i == j and i < count and orders[i] < K
                else TruncatedSeries.zero(K)
            )
            if transformed.entry(i, j) != expected:
                raise InternalInvariantError("Smith reduction left a nonzero entry")
    return tuple(orders), U, V


def in_image(
    F: Sequence[Polynomial], u: SeriesVector, m: int, p: int, e: int
) -> bool:
    """Does the p-jet u extend to a level-m jet on the complete intersection?

    Valid in the stable range 2p >= m >= p + e.  Decides solvability of the
    linearized system via the Smith form of the Jacobian over Q[t]/(t^{m-p}).
    """
    if not (2 * p >= m >= p + e):
        raise ValidationError(f"need 2p >= m >= p + e, got m={m}, p={p}, e={e}")
    system = tuple(F)
    if not system:
        raise ValidationError("at least one polynomial is required")
    universe = system[0].universe
    n, r = len(universe), len(system)
    if r > n:
        raise ValidationError("more equations than variables")
    if len(u) != n:
        raise ValidationError("jet has the wrong number of coordinates")
    if u.truncation_order < p + 1:
        raise ValidationError(f"a p-jet needs truncation order at least {p + 1}")
    lift = u.truncate(p + 1).padded(m + 1)

    values = _evaluate_system(system, lift)
    for s in values.entries:
        if s.order() < p + 1:
            raise ValidationError("the jet does not satisfy the equations mod t^(p+1)")

    jac = jacobian_at(system, lift)
    floor = _minor_order_floor(jac, r)
    if floor != e:
        raise ValidationError(
            f"the Jacobian minor ideal has order {floor}, not the declared e={e}"
        )

    K = m - p
    if K == 0:
        return True  # level-m and level-p data coincide
    g = SeriesVector(
        tuple(s.shifted_down(p + 1).truncate(K) for s in values.entries)
    )
    orders, U, _ = smith_form(jac.truncate(K))
    h = U.times_vector(g)
    return all(h[i].order() >= orders[i] for i in range(r))
