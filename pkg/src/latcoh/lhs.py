"""Second page, second differential, and third page of the spectral sequence
of the extension Z^n -> Z^n ⋊ Z/m -> Z/m, plus the order-ratio bookkeeping
that ties page orders to the homological Euler characteristic.

The cell at (i, j) is the degree-i cohomology of Z/m with coefficients in
the j-th exterior power of the dual lattice.  The second differential out of
(r, s+1) is realized as the coefficient map dual to the degree-s obstruction
extension, scaled by (-1)^r, followed by the periodicity identification into
column r+2; everything is stored as an integer matrix in the structure
coordinates of the two cells.  No differential beyond the second is
computed: the machinery decides collapse at the second page only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .alpha import AlphaData, compute_alpha
from .cohomology import CohomologyGroup, operators
from .errors import InternalInvariantError, UsageError
from .glattice import CyclicAction, dual, exterior_power, is_free_outside_origin
from .intlinalg import (
    AbelianGroupStructure,
    IntegerMatrix,
    SubquotientPresentation,
    induced_map,
    quotient_of_spans,
    kernel_basis,
    subquotient,
)


def _fold(i: int) -> int:
    """Representative column of a periodic cell: 0, 1, 2 verbatim, then by parity."""
    if i <= 2:
        return i
    return 2 - (i % 2)


@dataclass
class E2Page:
    """Cohomology table: rows j = 0..n, columns i = 0..i_max (2-periodic from
    column 1 on, so columns beyond 2 alias their parity representative)."""

    action: CyclicAction
    i_max: int
    presentations: dict[tuple[int, int], SubquotientPresentation] = field(repr=False)

    @property
    def n(self) -> int:
        return self.action.n

    def presentation(self, i: int, j: int) -> SubquotientPresentation:
        if i < 0 or not 0 <= j <= self.n:
            raise UsageError(f"cell ({i},{j}) outside the page")
        return self.presentations[(_fold(i), j)]

    def cell(self, i: int, j: int) -> CohomologyGroup:
        pres = self.presentation(i, j)
        return CohomologyGroup(i, pres.structure, pres)

    def cell_order(self, i: int, j: int) -> int:
        order = self.presentation(i, j).structure.order()
        if order is None:
            raise InternalInvariantError(f"cell ({i},{j}) is infinite where a finite one was required")
        return order


def build_e2(a: CyclicAction, i_max: int = 4) -> E2Page:
    """Assemble the page; coefficients in row j are the j-th exterior power of
    the dual action.

    >>> from .glattice import trivial_lattice
    >>> page = build_e2(trivial_lattice(4, 0))
    >>> [str(page.cell(i, 0).structure) for i in range(5)]
    ['Z', '0', 'C4', '0', 'C4']
    """
    if i_max < 2:
        raise UsageError("the page needs i_max >= 2")
    d = dual(a)
    presentations: dict[tuple[int, int], SubquotientPresentation] = {}
    for j in range(a.n + 1):
        coeff = exterior_power(d, j)
        ops = operators(coeff)
        rank = coeff.n
        presentations[(0, j)] = subquotient(rank, ops.aug, IntegerMatrix.zeros(rank, 0))
        presentations[(1, j)] = subquotient(rank, ops.norm, ops.aug)
        presentations[(2, j)] = subquotient(rank, ops.aug, ops.norm)
    return E2Page(a, i_max, presentations)


@dataclass
class DifferentialReport:
    """All second-differential matrices in structure coordinates, indexed by
    (r, s) for the map out of (r, s+1) into (r+2, s)."""

    action: CyclicAction
    maps: dict[tuple[int, int], IntegerMatrix]
    all_zero: bool
    witnesses: list[tuple[int, int, int]]

    def matrix(self, r: int, s: int) -> IntegerMatrix:
        return self.maps[(_fold(r), s)]


def d2(a: CyclicAction, page: Optional[E2Page] = None, alpha: Optional[AlphaData] = None) -> DifferentialReport:
    """Second differential of the page, realized through the obstruction maps.

    >>> from .glattice import paper3_lattice
    >>> d2(paper3_lattice()).all_zero
    True
    """
    if page is None:
        page = build_e2(a)
    if alpha is None:
        alpha = compute_alpha(a)
    maps: dict[tuple[int, int], IntegerMatrix] = {}
    witnesses: list[tuple[int, int, int]] = []
    for r in range(3):
        for s in range(a.n):
            src = page.presentation(r, s + 1)
            dst = page.presentation(r + 2, s)
            n_src = len(src.coord_moduli)
            n_dst = len(dst.coord_moduli)
            if n_src == 0 or n_dst == 0:
                mat = IntegerMatrix.zeros(n_dst, n_src)
            else:
                phi = alpha.alpha_s_wedge(s).transpose()
                if r % 2:
                    phi = phi.scaled(-1)
                mat = induced_map(phi, src, dst)
            maps[(r, s)] = mat
            if not mat.is_zero():
                col = min(j for j in range(mat.cols) if mat._cols[j])
                witnesses.append((r, s, col))
    report = DifferentialReport(a, maps, not witnesses, witnesses)
    if not d2_squared_is_zero(report, page):
        raise InternalInvariantError("stored second-differential matrices do not compose to zero")
    return report


def d2_squared_is_zero(report: DifferentialReport, page: E2Page) -> bool:
    """Composability check on the stored matrices: each composable pair of
    second differentials multiplies to zero in the target coordinates."""
    a = report.action
    for r in range(3):
        for s in range(1, a.n):
            first = report.maps[(r, s)]
            second = report.maps[(_fold(r + 2), s - 1)]
            composite = second @ first
            moduli = page.presentation(r + 4, s - 1).coord_moduli
            for col in composite._cols:
                for i, v in col.items():
                    d = moduli[i]
                    if (v % d) if d else v:
                        return False
    return True


@dataclass
class E3Page:
    """Cell-wise homology of the second page with respect to the stored
    second-differential matrices."""

    action: CyclicAction
    i_max: int
    cells: dict[tuple[int, int], AbelianGroupStructure]

    def cell(self, i: int, j: int) -> AbelianGroupStructure:
        return self.cells[(i, j)]


def _relation_columns(moduli: tuple[int, ...]) -> IntegerMatrix:
    cols = [{i: d} for i, d in enumerate(moduli) if d]
    return IntegerMatrix(len(moduli), len(cols), cols)


def _stack_columns(mats: list[IntegerMatrix], rows: int) -> IntegerMatrix:
    cols: list[dict[int, int]] = []
    for m in mats:
        cols.extend(dict(c) for c in m._cols)
    return IntegerMatrix(rows, len(cols), cols)


def build_e3(
    a: CyclicAction,
    page: Optional[E2Page] = None,
    report: Optional[DifferentialReport] = None,
    i_max: int = 4,
) -> E3Page:
    """Homology of (page, d2) in the window 0 <= i <= i_max, 0 <= j <= n."""
    if page is None:
        page = build_e2(a, max(i_max, 4))
    if report is None:
        report = d2(a, page)
    cells: dict[tuple[int, int], AbelianGroupStructure] = {}
    for i in range(i_max + 1):
        for j in range(a.n + 1):
            moduli_b = page.presentation(i, j).coord_moduli
            kb = len(moduli_b)
            if kb == 0:
                cells[(i, j)] = AbelianGroupStructure(0)
                continue
            rel_b = _relation_columns(moduli_b)
            outgoing = report.maps[(_fold(i), j - 1)] if j >= 1 else None
            if outgoing is None or outgoing.rows == 0:
                cycles = IntegerMatrix.identity(kb)
            else:
                moduli_c = page.presentation(i + 2, j - 1).coord_moduli
                stacked = _stack_columns([outgoing, _relation_columns(moduli_c)], outgoing.rows)
                ker = kernel_basis(stacked)
                proj = [
                    {r: v for r, v in col.items() if r < kb}
                    for col in ker._cols
                ]
                cycles = IntegerMatrix(kb, len(proj), proj)
            incoming = report.maps[(_fold(i - 2), j)] if i >= 2 and j < a.n else None
            bound = [rel_b] if incoming is None else [incoming, rel_b]
            boundaries = _stack_columns(bound, kb)
            cells[(i, j)] = quotient_of_spans(cycles, boundaries)
    return E3Page(a, i_max, cells)


def collapse_at_d2(a: CyclicAction) -> bool:
    """True iff every second-differential matrix vanishes.  Nothing is decided
    about higher differentials."""
    return d2(a).all_zero


@dataclass(frozen=True)
class EulerRatioReport:
    k: int
    lhs: Fraction
    rhs: Fraction
    equal: bool


def euler_ratio_check(a: CyclicAction, k: int, page: Optional[E2Page] = None) -> EulerRatioReport:
    """Compare two independently computed rationals: the alternating product
    of page-cell orders over the anti-diagonals of total degree 2k and 2k+1
    (folded into the periodic window), against the alternating product of
    Tate-order ratios over the exterior powers of the dual lattice.

    >>> from .glattice import sign_lattice
    >>> euler_ratio_check(sign_lattice(), 1)
    EulerRatioReport(k=1, lhs=Fraction(4, 1), rhs=Fraction(4, 1), equal=True)
    """
    if 2 * k <= a.n:
        raise UsageError(f"need 2k > n, got k={k} for rank {a.n}")
    if page is None:
        page = build_e2(a)
    lhs = Fraction(1)
    for j in range(a.n + 1):
        lhs *= page.cell_order(2 * k - j, j)
        lhs /= page.cell_order(2 * k + 1 - j, j)
    from .cohomology import homological_euler_h

    rhs = homological_euler_h(a)
    return EulerRatioReport(k, lhs, rhs, lhs == rhs)


@dataclass(frozen=True)
class PrimeCaseReport:
    p: int
    s: int
    h1_order: int
    h1_matches: bool
    euler_ratio: Fraction
    ratio_matches_prediction: bool
    ratio_matches_stated: bool
    predicted_even: AbelianGroupStructure
    predicted_odd: AbelianGroupStructure

    @property
    def ok(self) -> bool:
        return self.h1_matches and self.ratio_matches_prediction


def prime_case_report(a: CyclicAction) -> PrimeCaseReport:
    """For a prime group order acting freely outside the origin: the rank must
    be (p-1)s, the first cohomology must have order p^s, and in high even
    (odd) degrees the total cohomology is predicted to be (Z/p)^(p^s)
    (trivial), so the anti-diagonal order ratio must equal p^(p^s).

    Two ratio comparisons are reported: ``ratio_matches_prediction`` against
    p^(p^s), the order of the predicted group (the value consistent with the
    prediction and with the order-ratio identity), and ``ratio_matches_stated``
    against the sometimes-quoted p^s; the ``ok`` flag uses the former.
    """
    from .cohomology import group_cohomology

    p = a.m
    q = 2
    is_prime = p >= 2
    while q * q <= p:
        if p % q == 0:
            is_prime = False
            break
        q += 1
    if not is_prime:
        raise UsageError(f"group order {p} is not prime")
    if not is_free_outside_origin(a):
        raise UsageError("the action is not free outside the origin")
    if a.n % (p - 1):
        raise UsageError(f"rank {a.n} is not a multiple of p-1={p - 1}")
    s = a.n // (p - 1)
    count = p**s
    h1 = group_cohomology(a, 1).structure.order()
    if h1 is None:
        raise InternalInvariantError("first cohomology of a lattice came out infinite")
    k = a.n // 2 + 1
    ratio = euler_ratio_check(a, k)
    if not ratio.equal:
        raise InternalInvariantError("the two order-ratio computations disagree")
    predicted_even = AbelianGroupStructure(0, tuple([p] * count))
    return PrimeCaseReport(
        p=p,
        s=s,
        h1_order=h1,
        h1_matches=h1 == count,
        euler_ratio=ratio.lhs,
        ratio_matches_prediction=ratio.lhs == Fraction(p**count),
        ratio_matches_stated=ratio.lhs == Fraction(count),
        predicted_even=predicted_even,
        predicted_odd=AbelianGroupStructure(0),
    )
