"""Group and Tate cohomology of Z/m with lattice coefficients.

Everything is computed from the 2-periodic resolution of Z over ZG, whose
cochain operators on a lattice with action matrix A are

    aug  = A - I                (degree raising in odd positions)
    norm = I + A + ... + A^(m-1)

so H^0 = ker(aug), H^odd = ker(norm)/im(aug), H^even = ker(aug)/im(norm)
for even degrees >= 2, and Tate cohomology is the same subquotients in all
degrees (2-periodically, negative degrees included).

A small bar-resolution computation is included as an independent
cross-check; it shares only the raw linear algebra with the periodic route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalInvariantError, ResourceLimitError, UsageError
from .glattice import CyclicAction, dual, exterior_power
from .intlinalg import (
    AbelianGroupStructure,
    IntegerMatrix,
    SubquotientPresentation,
    subquotient,
)


@dataclass(frozen=True)
class NormOperators:
    """The two commuting cochain operators of the periodic resolution."""

    norm: IntegerMatrix
    aug: IntegerMatrix


@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    structure: AbelianGroupStructure
    presentation: SubquotientPresentation

    def __str__(self) -> str:
        return f"H^{self.degree} = {self.structure}"


def operators(a: CyclicAction) -> NormOperators:
    """norm = sum of all group-element actions, aug = A - I; norm @ aug = 0.

    >>> from .glattice import trivial_lattice
    >>> ops = operators(trivial_lattice(4, 1))
    >>> ops.norm.to_rows(), ops.aug.to_rows()
    ([[4]], [[0]])
    """
    ident = IntegerMatrix.identity(a.n)
    norm = ident
    power = ident
    for _ in range(a.m - 1):
        power = power @ a.action
        norm = norm + power
    aug = a.action - ident
    if not (norm @ aug).is_zero() or not (aug @ norm).is_zero():
        raise InternalInvariantError("norm and augmentation operators do not annihilate each other")
    return NormOperators(norm, aug)


def _empty_denominator(n: int) -> IntegerMatrix:
    return IntegerMatrix.zeros(n, 0)


def group_cohomology(a: CyclicAction, i: int, ops: NormOperators | None = None) -> CohomologyGroup:
    """H^i(G; L) from the periodic resolution.

    Degree 0 is the invariant sublattice ker(aug) (free); higher degrees are
    finite subquotients, 2-periodic from degree 1 on.
    """
    if i < 0:
        raise UsageError("group cohomology is defined for degrees >= 0")
    if ops is None:
        ops = operators(a)
    if i == 0:
        pres = subquotient(a.n, ops.aug, _empty_denominator(a.n))
    elif i % 2:
        pres = subquotient(a.n, ops.norm, ops.aug)
    else:
        pres = subquotient(a.n, ops.aug, ops.norm)
    return CohomologyGroup(i, pres.structure, pres)


def tate(a: CyclicAction, i: int, ops: NormOperators | None = None) -> CohomologyGroup:
    """Tate cohomology in any integer degree; depends only on the parity of i."""
    if ops is None:
        ops = operators(a)
    if i % 2:
        pres = subquotient(a.n, ops.norm, ops.aug)
    else:
        pres = subquotient(a.n, ops.aug, ops.norm)
    return CohomologyGroup(i, pres.structure, pres)


def h_hat(a: CyclicAction) -> Fraction:
    """|Tate^0| / |Tate^1| as a positive rational.

    Both Tate groups of a lattice are finite (the norm image has full rank in
    the invariants), which is asserted rather than assumed.
    """
    ops = operators(a)
    t0 = tate(a, 0, ops).structure.order()
    t1 = tate(a, 1, ops).structure.order()
    if t0 is None or t1 is None:
        raise InternalInvariantError("Tate cohomology of a lattice came out infinite")
    return Fraction(t0, t1)


def homological_euler_h(a: CyclicAction) -> Fraction:
    """Alternating product over j of h_hat on the j-th exterior power of the
    dual lattice: the image under h_hat of the alternating sum of the
    cohomology lattices of Z^n.

    >>> from .glattice import sign_lattice
    >>> homological_euler_h(sign_lattice())
    Fraction(4, 1)
    """
    d = dual(a)
    result = Fraction(1)
    for j in range(a.n + 1):
        term = h_hat(exterior_power(d, j))
        result = result * term if j % 2 == 0 else result / term
    return result


# -- independent oracle: bar resolution ---------------------------------------


BAR_GUARD = 20000


def _bar_delta(a: CyclicAction, s: int) -> IntegerMatrix:
    """Coboundary C^s -> C^(s+1) for inhomogeneous bar cochains G^s -> L."""
    m, n = a.m, a.n
    powers = [a.action.power(k).to_rows() for k in range(m)]
    src_tuples = m**s
    dst_tuples = m ** (s + 1)
    cols: list[dict[int, int]] = [{} for _ in range(src_tuples * n)]

    def tuple_index(t):
        idx = 0
        for g in t:
            idx = idx * m + g
        return idx

    import itertools

    for h in itertools.product(range(m), repeat=s + 1):
        row_base = tuple_index(h) * n
        # group element h[0] acts on the value of f(h[1:])
        col_base = tuple_index(h[1:]) * n
        act = powers[h[0]]
        for d in range(n):
            row = row_base + d
            for c in range(n):
                v = act[d][c]
                if v:
                    col = col_base + c
                    w = cols[col].get(row, 0) + v
                    if w:
                        cols[col][row] = w
                    else:
                        del cols[col][row]
        # inner face maps multiply adjacent entries
        for r in range(1, s + 1):
            merged = h[: r - 1] + ((h[r - 1] + h[r]) % m,) + h[r + 1 :]
            sign = -1 if r % 2 else 1
            col_base = tuple_index(merged) * n
            for d in range(n):
                col = col_base + d
                w = cols[col].get(row_base + d, 0) + sign
                if w:
                    cols[col][row_base + d] = w
                else:
                    del cols[col][row_base + d]
        # last face drops the final entry
        sign = -1 if (s + 1) % 2 else 1
        col_base = tuple_index(h[:s]) * n
        for d in range(n):
            col = col_base + d
            w = cols[col].get(row_base + d, 0) + sign
            if w:
                cols[col][row_base + d] = w
            else:
                del cols[col][row_base + d]
    return IntegerMatrix(dst_tuples * n, src_tuples * n, cols)


def bar_oracle(a: CyclicAction, i: int) -> AbelianGroupStructure:
    """H^i(G; L) computed from explicit bar cochain complexes; a test oracle
    for the periodic route, not used by it.

    >>> from .glattice import trivial_lattice
    >>> str(bar_oracle(trivial_lattice(3, 1), 2))
    'C3'
    """
    if i < 0:
        raise UsageError("bar oracle needs degree >= 0")
    if a.m**i * a.n > BAR_GUARD:
        raise ResourceLimitError(f"bar cochain space of dimension {a.m**i * a.n} exceeds guard {BAR_GUARD}")
    dim_i = a.m**i * a.n
    delta_i = _bar_delta(a, i)
    if i == 0:
        prev = _empty_denominator(dim_i)
    else:
        prev = _bar_delta(a, i - 1)
    return subquotient(dim_i, delta_i, prev).structure
