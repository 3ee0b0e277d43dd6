"""Exact integer linear algebra: Smith normal form, kernels, integral solving,
and presentations of subquotients ker X / im Y.

All entries are arbitrary-precision Python ints; matrices are stored sparsely
by column.  Every routine is a pure function with deterministic pivoting
(smallest absolute value, row-major tie-break), so normal forms, kernel bases
and quotient coordinates reproduce byte for byte across runs.

>>> m = IntegerMatrix.from_rows([[2, 4], [6, 8]])
>>> smith_normal_form(m).diagonal()
[2, 4]
>>> kernel_basis(IntegerMatrix.from_rows([[1, 1, 1]])).to_rows()
[[1, 0], [0, 1], [-1, -1]]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ContractViolationError, UsageError


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b), g >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class IntegerMatrix:
    """Immutable dense-or-sparse integer matrix, stored as one {row: value}
    dict per column.  Zero entries are never stored."""

    __slots__ = ("rows", "cols", "_cols")

    def __init__(self, rows: int, cols: int, cols_data: list[dict[int, int]]):
        if rows < 0 or cols < 0 or len(cols_data) != cols:
            raise UsageError("inconsistent matrix shape")
        self.rows = rows
        self.cols = cols
        self._cols = cols_data  # adopted; treated as immutable from here on

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> "IntegerMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if nrows else 0
        cols_data: list[dict[int, int]] = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise UsageError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    cols_data[j][i] = v
        return cls(nrows, ncols, cols_data)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[dict[int, int]]) -> "IntegerMatrix":
        return cls(nrows, len(columns), [{i: v for i, v in c.items() if v} for c in columns])

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, [{i: 1} for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, [{} for _ in range(cols)])

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntegerMatrix":
        n = len(entries)
        rows = n if rows is None else rows
        cols = n if cols is None else cols
        data: list[dict[int, int]] = [{} for _ in range(cols)]
        for i, v in enumerate(entries):
            if v:
                data[i][i] = v
        return cls(rows, cols, data)

    # -- access ------------------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        return self._cols[j].get(i, 0)

    def column(self, j: int) -> dict[int, int]:
        return dict(self._cols[j])

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def is_zero(self) -> bool:
        return all(not c for c in self._cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self._cols == other._cols

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            return f"IntegerMatrix({self.to_rows()!r})"
        return f"IntegerMatrix(<{self.rows}x{self.cols}, {self.nnz()} nonzero>)"

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> "IntegerMatrix":
        return IntegerMatrix(self.rows, self.cols, [{i: -v for i, v in c.items()} for c in self._cols])

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise UsageError("shape mismatch in matrix addition")
        data = []
        for a, b in zip(self._cols, other._cols):
            c = dict(a)
            for i, v in b.items():
                w = c.get(i, 0) + v
                if w:
                    c[i] = w
                else:
                    c.pop(i, None)
            data.append(c)
        return IntegerMatrix(self.rows, self.cols, data)

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        return self + (-other)

    def scaled(self, k: int) -> "IntegerMatrix":
        if k == 0:
            return IntegerMatrix.zeros(self.rows, self.cols)
        return IntegerMatrix(self.rows, self.cols, [{i: k * v for i, v in c.items()} for c in self._cols])

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise UsageError("shape mismatch in matrix product")
        data = []
        for col in other._cols:
            acc: dict[int, int] = {}
            for r, v in col.items():
                for i, w in self._cols[r].items():
                    t = acc.get(i, 0) + v * w
                    if t:
                        acc[i] = t
                    else:
                        del acc[i]
            data.append(acc)
        return IntegerMatrix(self.rows, other.cols, data)

    def apply(self, vec: Sequence[int]) -> list[int]:
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise UsageError("vector length does not match column count")
        out = [0] * self.rows
        for j, v in enumerate(vec):
            if v:
                for i, w in self._cols[j].items():
                    out[i] += v * w
        return out

    def power(self, k: int) -> "IntegerMatrix":
        if self.rows != self.cols:
            raise UsageError("power of a non-square matrix")
        if k < 0:
            raise UsageError("negative power")
        result = IntegerMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base_needed = k >> 1
            if base_needed:
                base = base @ base
            k = base_needed
        return result

    def transpose(self) -> "IntegerMatrix":
        data: list[dict[int, int]] = [{} for _ in range(self.rows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                data[i][j] = v
        return IntegerMatrix(self.cols, self.rows, data)

    def kron(self, other: "IntegerMatrix") -> "IntegerMatrix":
        """Kronecker product; own index varies slowly, other's fast."""
        data: list[dict[int, int]] = []
        for ja in range(self.cols):
            ca = self._cols[ja]
            for jb in range(other.cols):
                cb = other._cols[jb]
                acc = {}
                for ia, va in ca.items():
                    base = ia * other.rows
                    for ib, vb in cb.items():
                        acc[base + ib] = va * vb
                data.append(acc)
        return IntegerMatrix(self.rows * other.rows, self.cols * other.cols, data)

    def block_diag(self, other: "IntegerMatrix") -> "IntegerMatrix":
        data = [dict(c) for c in self._cols]
        for c in other._cols:
            data.append({i + self.rows: v for i, v in c.items()})
        return IntegerMatrix(self.rows + other.rows, self.cols + other.cols, data)

    def determinant(self) -> int:
        """Fraction-free Gaussian elimination (Bareiss); exact."""
        if self.rows != self.cols:
            raise UsageError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


# -- abelian group values ----------------------------------------------------


@dataclass(frozen=True)
class AbelianGroupStructure:
    """Isomorphism type of a finitely generated abelian group: free rank plus
    invariant factors d_1 | d_2 | ... (all > 1)."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise UsageError("negative free rank")
        prev = 1
        for d in self.torsion:
            if d <= 1 or d % prev:
                raise UsageError("torsion must be a divisibility chain of integers > 1")
            prev = d

    def order(self) -> Optional[int]:
        """Group order, or None when the group is infinite."""
        if self.free_rank:
            return None
        return math.prod(self.torsion)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"C{d}" for d in self.torsion)
        return " x ".join(parts) if parts else "0"


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ source @ V == D with U, V unimodular and D diagonal with a
    divisibility chain d_1 | d_2 | ... followed by zeros."""

    u: IntegerMatrix
    d: IntegerMatrix
    v: IntegerMatrix

    def diagonal(self) -> list[int]:
        return [self.d.entry(i, i) for i in range(min(self.d.rows, self.d.cols))]

    def structure(self) -> AbelianGroupStructure:
        """Cokernel structure of the source matrix."""
        diag = [d for d in self.diagonal() if d]
        return AbelianGroupStructure(self.d.rows - len(diag), tuple(d for d in diag if d > 1))


# -- column echelon core -----------------------------------------------------


class _Echelon:
    """Column echelon form computed by unimodular column operations.

    ``pivots`` lists (row, column) pairs in the order the pivots were frozen;
    all non-pivot columns are reduced to zero.  Pivot columns vanish on every
    pivot row frozen earlier, so forward substitution along ``pivots`` is
    well defined.  ``transform`` (when tracked) holds the applied column
    operations as columns of V with M @ V = reduced matrix.

    With ``sparse_pivoting`` rows are processed lightest-first (a fill-in
    heuristic); the resulting echelon is not row-sorted, so callers that need
    a canonical Hermite basis run a second, ascending-order pass over the
    surviving columns.
    """

    def __init__(self, matrix: IntegerMatrix, track: bool = False, sparse_pivoting: bool = False):
        self.nrows = matrix.rows
        self.ncols = matrix.cols
        self.cols = [dict(c) for c in matrix._cols]
        self.transform = [{j: 1} for j in range(self.ncols)] if track else None
        self.row_lookup: dict[int, set[int]] = {}
        for j, col in enumerate(self.cols):
            for r in col:
                self.row_lookup.setdefault(r, set()).add(j)
        self.pivots: list[tuple[int, int]] = []
        self.pivot_cols: set[int] = set()
        self._new_rows: list[int] | None = None
        if sparse_pivoting:
            self._run_sparse()
        else:
            self._run_ascending()

    def _axpy(self, dst: int, src: int, q: int) -> None:
        """cols[dst] += q * cols[src], maintaining the row index and transform."""
        col_d = self.cols[dst]
        lookup = self.row_lookup
        new_rows = self._new_rows
        for r, v in self.cols[src].items():
            w = col_d.get(r, 0) + q * v
            if w:
                if r not in col_d:
                    s = lookup.get(r)
                    if s is None:
                        lookup[r] = {dst}
                        if new_rows is not None:
                            new_rows.append(r)
                    else:
                        s.add(dst)
                col_d[r] = w
            else:
                if r in col_d:
                    del col_d[r]
                    lookup[r].discard(dst)
        if self.transform is not None:
            t_d = self.transform[dst]
            for r, v in self.transform[src].items():
                w = t_d.get(r, 0) + q * v
                if w:
                    t_d[r] = w
                else:
                    del t_d[r]

    def _negate(self, c: int) -> None:
        col = self.cols[c]
        for r in col:
            col[r] = -col[r]
        if self.transform is not None:
            t = self.transform[c]
            for r in t:
                t[r] = -t[r]

    def _clear_row(self, r: int) -> None:
        """Euclidean reduction among the active columns meeting row r; the
        survivor becomes the pivot of r and is frozen."""
        live = self.row_lookup.get(r)
        if not live:
            return
        cols = self.cols
        frozen = self.pivot_cols
        active = sorted(c for c in live if c not in frozen)
        while active:
            p = min(active, key=lambda c: (abs(cols[c][r]), c))
            if cols[p][r] < 0:
                self._negate(p)
            if len(active) == 1:
                self.pivots.append((r, p))
                frozen.add(p)
                return
            d = cols[p][r]
            survivors = [p]
            for c in active:
                if c == p:
                    continue
                q = cols[c][r] // d
                if q:
                    self._axpy(c, p, -q)
                if cols[c].get(r):
                    survivors.append(c)
            active = sorted(survivors)

    def _run_ascending(self) -> None:
        # Fill from a pivot at row r lands only at rows > r, so one sweep
        # in row order is complete and yields a row-sorted echelon.
        for r in range(self.nrows):
            self._clear_row(r)

    def _run_sparse(self) -> None:
        # lightest-populated rows first (lazy heap; stale weights re-pushed)
        import heapq

        heap = [(len(cs), r) for r, cs in self.row_lookup.items()]
        heapq.heapify(heap)
        done: set[int] = set()
        self._new_rows = []
        while heap:
            weight, r = heapq.heappop(heap)
            if r in done:
                continue
            current = len(self.row_lookup.get(r, ()))
            if current == 0:
                done.add(r)
                continue
            if current != weight:
                heapq.heappush(heap, (current, r))
                continue
            self._clear_row(r)
            done.add(r)
            if self._new_rows:
                for rr in self._new_rows:
                    if rr not in done:
                        heapq.heappush(heap, (len(self.row_lookup[rr]), rr))
                self._new_rows.clear()
        self._new_rows = None

    def normalized_basis_columns(self) -> list[dict[int, int]]:
        """Pivot columns in pivot-row order, fully reduced (column-style HNF):
        entries above-the-diagonal pivots lie in [0, pivot).  Only valid after
        an ascending-order run."""
        order = [c for (_, c) in self.pivots]
        for k, (r, c) in enumerate(self.pivots):
            d = self.cols[c][r]
            for (_, c2) in self.pivots[:k]:
                q = self.cols[c2].get(r, 0) // d
                if q:
                    col2 = self.cols[c2]
                    for rr, vv in self.cols[c].items():
                        w = col2.get(rr, 0) - q * vv
                        if w:
                            col2[rr] = w
                        else:
                            col2.pop(rr, None)
        return [dict(self.cols[c]) for c in order]


def _canonical_basis(nrows: int, columns: list[dict[int, int]]) -> IntegerMatrix:
    ech = _Echelon(IntegerMatrix(nrows, len(columns), columns))
    return IntegerMatrix(nrows, len(ech.pivots), ech.normalized_basis_columns())


def span_basis(matrix: IntegerMatrix) -> IntegerMatrix:
    """Canonical basis of the column span over Z (column Hermite form)."""
    rough = _Echelon(matrix, sparse_pivoting=True)
    return _canonical_basis(matrix.rows, [dict(rough.cols[c]) for (_, c) in rough.pivots])


def kernel_basis(matrix: IntegerMatrix) -> IntegerMatrix:
    """Canonical basis of {x : matrix @ x == 0}.

    The kernel of an integer matrix is saturated, and the returned columns
    form a Z-basis of it (Hermite-normalized, hence deterministic).

    >>> kernel_basis(IntegerMatrix.identity(2)).cols
    0
    >>> kernel_basis(IntegerMatrix.zeros(2, 2)) == IntegerMatrix.identity(2)
    True
    """
    ech = _Echelon(matrix, track=True, sparse_pivoting=True)
    free = [j for j in range(matrix.cols) if j not in ech.pivot_cols]
    return _canonical_basis(matrix.cols, [dict(ech.transform[j]) for j in free])


class ColumnSolver:
    """Repeated exact solving of matrix @ x = b against a fixed matrix."""

    def __init__(self, matrix: IntegerMatrix):
        self.matrix = matrix
        self._ech = _Echelon(matrix, track=True, sparse_pivoting=True)

    def solve(self, b: dict[int, int]) -> Optional[dict[int, int]]:
        """A particular integral solution as a sparse column, or None."""
        residue = dict(b)
        coeffs: dict[int, int] = {}
        cols = self._ech.cols
        for r, c in self._ech.pivots:
            v = residue.get(r, 0)
            if not v:
                continue
            q, rem = divmod(v, cols[c][r])
            if rem:
                return None
            coeffs[c] = q
            for rr, vv in cols[c].items():
                w = residue.get(rr, 0) - q * vv
                if w:
                    residue[rr] = w
                else:
                    residue.pop(rr, None)
        if residue:
            return None
        out: dict[int, int] = {}
        for c, q in coeffs.items():
            for rr, vv in self._ech.transform[c].items():
                w = out.get(rr, 0) + q * vv
                if w:
                    out[rr] = w
                else:
                    del out[rr]
        return out

    def solve_matrix(self, rhs: IntegerMatrix) -> Optional[IntegerMatrix]:
        """Solve matrix @ X = rhs column by column; None if any column fails."""
        if rhs.rows != self.matrix.rows:
            raise UsageError("right-hand side has wrong number of rows")
        data = []
        for col in rhs._cols:
            x = self.solve(col)
            if x is None:
                return None
            data.append(x)
        return IntegerMatrix(self.matrix.cols, rhs.cols, data)


def solve_integral(matrix: IntegerMatrix, b: Sequence[int]) -> Optional[list[int]]:
    """Some integer solution x of matrix @ x = b, or None if there is none.

    >>> solve_integral(IntegerMatrix.diagonal([2, 3]), [4, 3])
    [2, 1]
    >>> solve_integral(IntegerMatrix.diagonal([2]), [1]) is None
    True
    """
    if len(b) != matrix.rows:
        raise UsageError("right-hand side length does not match row count")
    x = ColumnSolver(matrix).solve({i: v for i, v in enumerate(b) if v})
    if x is None:
        return None
    return [x.get(j, 0) for j in range(matrix.cols)]


# -- Smith normal form --------------------------------------------------------


class _SmithWorker:
    """Smith form by row and column operations on a synchronized sparse
    (rows dict, column index) pair.  Pivot rule: smallest absolute value,
    row-major tie-break."""

    def __init__(self, matrix: IntegerMatrix, track_u: bool, track_v: bool):
        self.nrows = matrix.rows
        self.ncols = matrix.cols
        self.rows: dict[int, dict[int, int]] = {}
        self.col_index: dict[int, set[int]] = {}
        for j, col in enumerate(matrix._cols):
            for i, v in col.items():
                self.rows.setdefault(i, {})[j] = v
                self.col_index.setdefault(j, set()).add(i)
        self.u_rows = {i: {i: 1} for i in range(self.nrows)} if track_u else None
        self.uinv_cols = [{i: 1} for i in range(self.nrows)] if track_u else None
        self.v_cols = [{j: 1} for j in range(self.ncols)] if track_v else None
        self.diag: list[int] = []
        self._run()

    # row_dst += q * row_src on the work matrix, with U and U^-1 bookkeeping
    def _row_axpy(self, dst, src, q):
        rd = self.rows.setdefault(dst, {})
        for j, v in self.rows.get(src, {}).items():
            w = rd.get(j, 0) + q * v
            if w:
                if j not in rd:
                    self.col_index.setdefault(j, set()).add(dst)
                rd[j] = w
            else:
                del rd[j]
                self.col_index[j].discard(dst)
        if not rd:
            self.rows.pop(dst, None)
        if self.u_rows is not None:
            ud = self.u_rows.setdefault(dst, {})
            for j, v in self.u_rows.get(src, {}).items():
                w = ud.get(j, 0) + q * v
                if w:
                    ud[j] = w
                else:
                    del ud[j]
            ci = self.uinv_cols[src]
            for i, v in self.uinv_cols[dst].items():
                w = ci.get(i, 0) - q * v
                if w:
                    ci[i] = w
                else:
                    del ci[i]

    def _col_axpy(self, dst, src, q):
        for i in list(self.col_index.get(src, ())):
            v = self.rows[i][src]
            ri = self.rows[i]
            w = ri.get(dst, 0) + q * v
            if w:
                if dst not in ri:
                    self.col_index.setdefault(dst, set()).add(i)
                ri[dst] = w
            else:
                del ri[dst]
                self.col_index[dst].discard(i)
        if self.v_cols is not None:
            cd = self.v_cols[dst]
            for i, v in self.v_cols[src].items():
                w = cd.get(i, 0) + q * v
                if w:
                    cd[i] = w
                else:
                    del cd[i]

    def _row_swap(self, a, b):
        if a == b:
            return
        ra, rb = self.rows.get(a), self.rows.get(b)
        for j in set(ra or ()) | set(rb or ()):
            s = self.col_index[j]
            ina, inb = a in s, b in s
            if ina != inb:
                if ina:
                    s.discard(a)
                    s.add(b)
                else:
                    s.discard(b)
                    s.add(a)
        if ra is None:
            self.rows.pop(b, None)
        else:
            self.rows[b] = ra
        if rb is None:
            self.rows.pop(a, None)
        else:
            self.rows[a] = rb
        if self.u_rows is not None:
            ua, ub = self.u_rows.get(a), self.u_rows.get(b)
            if ua is None:
                self.u_rows.pop(b, None)
            else:
                self.u_rows[b] = ua
            if ub is None:
                self.u_rows.pop(a, None)
            else:
                self.u_rows[a] = ub
            self.uinv_cols[a], self.uinv_cols[b] = self.uinv_cols[b], self.uinv_cols[a]

    def _col_swap(self, a, b):
        if a == b:
            return
        for i in self.col_index.get(a, set()) | self.col_index.get(b, set()):
            ri = self.rows[i]
            va, vb = ri.pop(a, None), ri.pop(b, None)
            if va is not None:
                ri[b] = va
            if vb is not None:
                ri[a] = vb
        sa = self.col_index.get(a, set())
        self.col_index[a] = self.col_index.get(b, set())
        self.col_index[b] = sa
        if self.v_cols is not None:
            self.v_cols[a], self.v_cols[b] = self.v_cols[b], self.v_cols[a]

    def _row_negate(self, i):
        for j, v in self.rows.get(i, {}).items():
            self.rows[i][j] = -v
        if self.u_rows is not None:
            for j, v in self.u_rows.get(i, {}).items():
                self.u_rows[i][j] = -v
            self.uinv_cols[i] = {k: -v for k, v in self.uinv_cols[i].items()}

    def _find_pivot(self, t):
        best = None
        for i in sorted(self.rows):
            if i < t:
                continue
            for j, v in self.rows[i].items():
                if j < t:
                    continue
                key = (abs(v), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            return None
        return best[1], best[2]

    def _run(self):
        t = 0
        limit = min(self.nrows, self.ncols)
        while t < limit:
            pos = self._find_pivot(t)
            if pos is None:
                break
            self._row_swap(pos[0], t)
            self._col_swap(pos[1], t)
            while True:
                if self.rows[t][t] < 0:
                    self._row_negate(t)
                d = self.rows[t][t]
                moved = False
                for i in sorted(self.col_index.get(t, ())):
                    if i == t:
                        continue
                    q = self.rows[i][t] // d
                    if q:
                        self._row_axpy(i, t, -q)
                    if self.rows.get(i, {}).get(t):
                        # remainder became the new smallest entry in column t
                        self._row_swap(i, t)
                        moved = True
                        break
                if moved:
                    continue
                for j in sorted(self.rows.get(t, {})):
                    if j == t:
                        continue
                    q = self.rows[t][j] // d
                    if q:
                        self._col_axpy(j, t, -q)
                    if self.rows.get(t, {}).get(j):
                        self._col_swap(j, t)
                        moved = True
                        break
                if moved:
                    continue
                break
            d = self.rows[t][t]
            if d != 1:
                # enforce divisibility of everything that remains
                culprit = None
                for i in sorted(self.rows):
                    if i <= t:
                        continue
                    for j, v in sorted(self.rows[i].items()):
                        if j > t and v % d:
                            culprit = i
                            break
                    if culprit is not None:
                        break
                if culprit is not None:
                    self._row_axpy(t, culprit, 1)
                    continue
            self.diag.append(d)
            # retire row t and column t from the active structures
            del self.rows[t][t]
            if not self.rows[t]:
                del self.rows[t]
            self.col_index[t].discard(t)
            t += 1

    def u_matrix(self) -> IntegerMatrix:
        data: list[dict[int, int]] = [{} for _ in range(self.nrows)]
        for i, row in self.u_rows.items():
            for j, v in row.items():
                data[j][i] = v
        return IntegerMatrix(self.nrows, self.nrows, data)

    def uinv_matrix(self) -> IntegerMatrix:
        return IntegerMatrix(self.nrows, self.nrows, [dict(c) for c in self.uinv_cols])

    def v_matrix(self) -> IntegerMatrix:
        return IntegerMatrix(self.ncols, self.ncols, [dict(c) for c in self.v_cols])

    def d_matrix(self) -> IntegerMatrix:
        return IntegerMatrix.diagonal(self.diag, self.nrows, self.ncols)


def smith_normal_form(matrix: IntegerMatrix) -> SmithDecomposition:
    """Full Smith decomposition U @ M @ V = D.

    >>> smith_normal_form(IntegerMatrix.identity(3)).diagonal()
    [1, 1, 1]
    >>> smith_normal_form(IntegerMatrix.zeros(2, 3)).d == IntegerMatrix.zeros(2, 3)
    True
    """
    w = _SmithWorker(matrix, track_u=True, track_v=True)
    return SmithDecomposition(w.u_matrix(), w.d_matrix(), w.v_matrix())


def smith_diagonal(matrix: IntegerMatrix) -> list[int]:
    """Invariant factors only (no transforms tracked); cheaper."""
    return _SmithWorker(matrix, track_u=False, track_v=False).diag


def cokernel_structure(matrix: IntegerMatrix) -> AbelianGroupStructure:
    """Structure of Z^rows / (column span of matrix)."""
    diag = [d for d in smith_diagonal(matrix) if d]
    return AbelianGroupStructure(matrix.rows - len(diag), tuple(d for d in diag if d > 1))


def quotient_of_spans(numerator: IntegerMatrix, denominator: IntegerMatrix) -> AbelianGroupStructure:
    """Structure of span(numerator columns) / span(denominator columns).

    The denominator span must be contained in the numerator span.
    """
    if numerator.rows != denominator.rows:
        raise UsageError("ambient ranks differ")
    basis = span_basis(numerator)
    coords = ColumnSolver(basis).solve_matrix(denominator)
    if coords is None:
        raise ContractViolationError("denominator span is not contained in numerator span")
    return cokernel_structure(coords)


# -- subquotients -------------------------------------------------------------


class SubquotientPresentation:
    """Presentation of ker X / im Y inside an ambient lattice Z^ambient_rank,
    with coordinates in the Smith basis of the quotient.

    ``coords`` maps an ambient vector of ker X to its coordinate tuple in the
    structure (torsion coordinates first, in divisibility order, then free
    coordinates); ``lift`` maps coordinates back to a representative, and the
    round trip is the identity modulo im Y.
    """

    def __init__(self, ambient_rank: int, x: IntegerMatrix, y: IntegerMatrix):
        if x.cols != ambient_rank or y.rows != ambient_rank:
            raise UsageError("subquotient shape mismatch")
        if not (x @ y).is_zero():
            raise ContractViolationError("X @ Y != 0: denominator does not land in the kernel")
        self.ambient_rank = ambient_rank
        self.numerator_basis = kernel_basis(x)
        self.denominator_basis = span_basis(y)
        self._solver = ColumnSolver(self.numerator_basis)
        coords_of_y = self._solver.solve_matrix(self.denominator_basis)
        if coords_of_y is None:  # impossible given X @ Y == 0 and saturation
            raise ContractViolationError("denominator escapes the kernel span")
        core = span_basis(coords_of_y)
        w = _SmithWorker(core, track_u=True, track_v=False)
        r = self.numerator_basis.cols
        diag = w.diag + [0] * (r - len(w.diag))
        self._moduli_full = diag
        self._positions = [i for i in range(r) if diag[i] != 1]
        self._u_rows = {i: dict(w.u_rows.get(i, {})) for i in self._positions}
        self._uinv_cols = w.uinv_cols
        torsion = tuple(d for d in w.diag if d > 1)
        self.structure = AbelianGroupStructure(r - len(w.diag), torsion)
        self.coord_moduli = tuple(self._moduli_full[i] for i in self._positions)

    def coords(self, vec: Sequence[int]) -> list[int]:
        """Coordinates of an ambient kernel vector in the quotient structure."""
        if len(vec) != self.ambient_rank:
            raise UsageError("vector has wrong length")
        x = self._solver.solve({i: v for i, v in enumerate(vec) if v})
        if x is None:
            raise ContractViolationError("vector is not in the numerator (kernel)")
        out = []
        for pos, d in zip(self._positions, self.coord_moduli):
            val = sum(c * x.get(j, 0) for j, c in self._u_rows[pos].items())
            out.append(val % d if d else val)
        return out

    def lift(self, coords: Sequence[int]) -> list[int]:
        """An ambient representative with the given structure coordinates."""
        if len(coords) != len(self._positions):
            raise UsageError("coordinate tuple has wrong length")
        acc: dict[int, int] = {}
        for pos, c in zip(self._positions, coords):
            if not c:
                continue
            for i, v in self._uinv_cols[pos].items():
                w = acc.get(i, 0) + c * v
                if w:
                    acc[i] = w
                else:
                    del acc[i]
        out = [0] * self.ambient_rank
        for j, c in acc.items():
            if c:
                for i, v in self.numerator_basis._cols[j].items():
                    out[i] += c * v
        return out

    def __repr__(self) -> str:
        return f"SubquotientPresentation({self.structure} in Z^{self.ambient_rank})"


def subquotient(ambient_rank: int, x: IntegerMatrix, y: IntegerMatrix) -> SubquotientPresentation:
    """Presentation of ker X / im Y; requires X @ Y == 0.

    >>> zmod = subquotient(1, IntegerMatrix.zeros(1, 1), IntegerMatrix.from_rows([[4]]))
    >>> str(zmod.structure)
    'C4'
    """
    return SubquotientPresentation(ambient_rank, x, y)


def induced_map(phi: IntegerMatrix, src: SubquotientPresentation, dst: SubquotientPresentation) -> IntegerMatrix:
    """Matrix, in structure coordinates, of the map induced by phi.

    phi must carry the numerator span of src into the numerator span of dst
    and likewise for the denominators; both inclusions are checked.  Entries
    in torsion coordinates are reduced modulo the invariant factor.
    """
    if phi.cols != src.ambient_rank or phi.rows != dst.ambient_rank:
        raise UsageError("phi has wrong shape for these subquotients")
    if ColumnSolver(dst.numerator_basis).solve_matrix(phi @ src.numerator_basis) is None:
        raise ContractViolationError("phi does not preserve the numerators")
    if src.denominator_basis.cols:
        if ColumnSolver(dst.denominator_basis).solve_matrix(phi @ src.denominator_basis) is None:
            raise ContractViolationError("phi does not preserve the denominators")
    n_src = len(src.coord_moduli)
    cols = []
    for k in range(n_src):
        unit = [0] * n_src
        unit[k] = 1
        image = dst.coords(phi.apply(src.lift(unit)))
        cols.append({i: v for i, v in enumerate(image) if v})
    return IntegerMatrix(len(dst.coord_moduli), n_src, cols)
