"""Integer representations of a finite cyclic group: constructors for the
lattice families used throughout the package and the functorial operations
(exterior power, dual, hom, direct sum, tensor product).

Conventions fixed here and relied on everywhere else:

* wedge basis vectors of an exterior power are the lexicographically ordered
  j-element subsets of {0, ..., n-1};
* hom lattices are flattened column-major, so hom(U, V) carries the action
  of tensor(dual(U), V).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InvalidActionError, UsageError
from .intlinalg import ColumnSolver, IntegerMatrix


@dataclass(frozen=True)
class CyclicAction:
    """A lattice Z^n with an automorphism of finite order generating the
    action of Z/m; ``order`` is the exact multiplicative order (a divisor
    of m, possibly proper: the representation need not be faithful)."""

    n: int
    m: int
    action: IntegerMatrix
    label: str = ""
    order: int = 1

    def __str__(self) -> str:
        tag = self.label or "lattice"
        return f"{tag} (rank {self.n}, m={self.m})"


class BasisIndexing:
    """Bijection between j-element subsets of {0..n-1} (lex order) and wedge
    basis positions; the same ordering is used by every exterior power."""

    def __init__(self, n: int, j: int):
        if j < 0 or n < 0:
            raise UsageError(f"wedge degree {j} out of range for rank {n}")
        # j > n is allowed and indexes the zero module (no subsets)
        self.n = n
        self.j = j
        self.subsets: tuple[tuple[int, ...], ...] = tuple(itertools.combinations(range(n), j))
        self.position = {s: i for i, s in enumerate(self.subsets)}
        self.rank = len(self.subsets)

    def merge(self, base: tuple[int, ...], extra: tuple[int, ...]) -> Optional[tuple[int, tuple[int, ...]]]:
        """Sign and sorted union of two disjoint index tuples, or None if they
        intersect.  ``base`` and ``extra`` must each be strictly increasing."""
        merged = base
        sign = 1
        for x in extra:
            if x in merged:
                return None
            pos = sum(1 for t in merged if t < x)
            if (len(merged) - pos) % 2:
                sign = -sign
            merged = tuple(sorted(merged + (x,)))
        return sign, merged


def _divisors(m: int) -> list[int]:
    out = [d for d in range(1, m + 1) if m % d == 0]
    return out


def _matrix_order(a: IntegerMatrix, m: int) -> Optional[int]:
    """Exact multiplicative order of ``a`` when it divides m, else None."""
    ident = IntegerMatrix.identity(a.rows)
    for d in _divisors(m):
        if a.power(d) == ident:
            return d
    return None


def make_action(m: int, matrix: IntegerMatrix | Sequence[Sequence[int]], label: str = "") -> CyclicAction:
    """Validated action of Z/m on Z^n.

    >>> make_action(4, [[0, -1], [1, 0]]).order
    4
    >>> make_action(4, [[2]])
    Traceback (most recent call last):
        ...
    latcoh.errors.InvalidActionError: action matrix is not a lattice automorphism (|det| != 1)
    """
    if m < 1:
        raise UsageError("group order must be >= 1")
    if not isinstance(matrix, IntegerMatrix):
        matrix = IntegerMatrix.from_rows([list(r) for r in matrix])
    if matrix.rows != matrix.cols:
        raise InvalidActionError("action matrix must be square")
    if matrix.rows and abs(matrix.determinant()) != 1:
        raise InvalidActionError("action matrix is not a lattice automorphism (|det| != 1)")
    order = _matrix_order(matrix, m)
    if order is None:
        raise InvalidActionError(f"matrix^{m} != identity")
    return CyclicAction(matrix.rows, m, matrix, label, order)


def _derived(m: int, matrix: IntegerMatrix, label: str) -> CyclicAction:
    # for functorial constructions whose unimodularity is inherited
    order = _matrix_order(matrix, m)
    if order is None:
        raise InvalidActionError("derived action lost finite order (internal)")
    return CyclicAction(matrix.rows, m, matrix, label, order)


def is_free_outside_origin(a: CyclicAction) -> bool:
    """True iff every nontrivial group element fixes only the origin.

    It is enough to test the prime-order elements: for each prime q | m the
    power action^(m/q) must have no nonzero fixed vector.
    """
    from .intlinalg import kernel_basis

    m = a.m
    q = 2
    rest = m
    primes = []
    while q * q <= rest:
        if rest % q == 0:
            primes.append(q)
            while rest % q == 0:
                rest //= q
        q += 1
    if rest > 1:
        primes.append(rest)
    ident = IntegerMatrix.identity(a.n)
    for q in primes:
        fixed = kernel_basis(a.action.power(m // q) - ident)
        if fixed.cols:
            return False
    return True


def inverse_action_matrix(a: CyclicAction) -> IntegerMatrix:
    """Integer inverse of the action matrix (exists: the matrix is unimodular)."""
    inv = ColumnSolver(a.action).solve_matrix(IntegerMatrix.identity(a.n))
    if inv is None:
        raise InvalidActionError("action matrix is not invertible over Z")
    return inv


def exterior_power(a: CyclicAction, j: int) -> CyclicAction:
    """Induced action on the j-th exterior power, rank C(n, j).

    Columns are indexed by BasisIndexing; the image of a wedge basis vector
    is the wedge of the corresponding action columns (j x j minors).

    >>> rot = make_action(4, [[0, -1], [1, 0]])
    >>> exterior_power(rot, 2).action.to_rows()
    [[1]]
    """
    if not 0 <= j <= a.n:
        raise UsageError(f"exterior power degree {j} out of range for rank {a.n}")
    return _exterior_any(a, j)


def _exterior_any(a: CyclicAction, j: int) -> CyclicAction:
    # like exterior_power but j > n yields the rank-0 lattice instead of an error
    idx = BasisIndexing(a.n, j)
    cols = []
    for s in idx.subsets:
        state: dict[tuple[int, ...], int] = {(): 1}
        for k in s:
            new: dict[tuple[int, ...], int] = {}
            for tup, c in state.items():
                for r, v in a.action._cols[k].items():
                    res = idx.merge(tup, (r,))
                    if res is None:
                        continue
                    sign, merged = res
                    w = new.get(merged, 0) + sign * c * v
                    if w:
                        new[merged] = w
                    elif merged in new:
                        del new[merged]
            state = new
        cols.append({idx.position[t]: c for t, c in state.items() if c})
    mat = IntegerMatrix(idx.rank, idx.rank, cols)
    return _derived(a.m, mat, f"Λ^{j}({a.label})" if a.label else f"Λ^{j}")


def dual(a: CyclicAction) -> CyclicAction:
    """Dual lattice hom(L, Z) with the contragredient action (A^-1)^T, so the
    evaluation pairing is invariant."""
    mat = inverse_action_matrix(a).transpose()
    return _derived(a.m, mat, f"{a.label}^" if a.label else "dual")


def direct_sum(a: CyclicAction, b: CyclicAction) -> CyclicAction:
    if a.m != b.m:
        raise UsageError("direct sum requires equal group orders")
    label = f"{a.label}⊕{b.label}" if a.label or b.label else ""
    return _derived(a.m, a.action.block_diag(b.action), label)


def tensor(a: CyclicAction, b: CyclicAction) -> CyclicAction:
    """Tensor product with the diagonal action; basis e_i⊗f_k ordered with the
    left index varying slowly (Kronecker product convention)."""
    if a.m != b.m:
        raise UsageError("tensor product requires equal group orders")
    label = f"{a.label}⊗{b.label}" if a.label or b.label else ""
    return _derived(a.m, a.action.kron(b.action), label)


def hom_lattice(u: CyclicAction, v: CyclicAction) -> CyclicAction:
    """hom(U, V) with action phi -> A_v phi A_u^-1, flattened column-major;
    identical, matrix for matrix, to tensor(dual(u), v)."""
    if u.m != v.m:
        raise UsageError("hom lattice requires equal group orders")
    out = tensor(dual(u), v)
    label = f"hom({u.label},{v.label})" if u.label or v.label else "hom"
    return CyclicAction(out.n, out.m, out.action, label, out.order)


def trivial_lattice(m: int, rank: int = 1) -> CyclicAction:
    return _derived(m, IntegerMatrix.identity(rank), f"Z^{rank}")


def syzygy_lattice(m: int, d: int) -> CyclicAction:
    """Rank m-d lattice ZG/(1 + t^d + t^{2d} + ... + t^{m-d}) for d | m:
    e_i -> e_{i+1} below the top, and the top basis vector to
    -(e_0 + e_d + ... + e_{m-2d}).

    >>> syzygy_lattice(4, 2).action.to_rows()
    [[0, -1], [1, 0]]
    """
    if d < 1 or m % d:
        raise UsageError("syzygy lattice needs a divisor d of m")
    rank = m - d
    cols: list[dict[int, int]] = []
    for i in range(rank):
        if i < rank - 1:
            cols.append({i + 1: 1})
        else:
            cols.append({k: -1 for k in range(0, m - 2 * d + 1, d)})
    return _derived(m, IntegerMatrix(rank, rank, cols), f"syzygy({m},{d})")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    q = 2
    while q * q <= p:
        if p % q == 0:
            return False
        q += 1
    return True


def cyclotomic_lattice(p: int, r: int) -> CyclicAction:
    """Ring of integers Z[zeta] for a primitive p^r-th root of unity, of rank
    (p-1)p^{r-1}, in the syzygy basis with d = p^{r-1}; the generator acts as
    multiplication by zeta.  Free outside the origin.

    >>> cyclotomic_lattice(3, 1).action.to_rows()
    [[0, -1], [1, -1]]
    """
    if not _is_prime(p):
        raise UsageError(f"{p} is not prime")
    if r < 1:
        raise UsageError("r must be >= 1")
    m = p**r
    out = syzygy_lattice(m, p ** (r - 1))
    return CyclicAction(out.n, out.m, out.action, f"Z[ζ_{m}]", out.order)


def permutation_lattice(m: int, subgroup_order: int) -> CyclicAction:
    """Z[G/H] for the subgroup H of the given order: rank m/|H| with the
    cyclic coset shift.

    >>> permutation_lattice(4, 4).action.to_rows()
    [[1]]
    """
    if subgroup_order < 1 or m % subgroup_order:
        raise UsageError("subgroup order must divide m")
    rank = m // subgroup_order
    cols = [{(i + 1) % rank: 1} for i in range(rank)]
    return _derived(m, IntegerMatrix(rank, rank, cols), f"Z[G/H_{subgroup_order}]")


def paper3_lattice() -> CyclicAction:
    """The canned rank-3, m=4 example with a nonzero obstruction class but a
    degenerating second differential."""
    return make_action(4, [[0, 1, 0], [-1, 0, 1], [0, 0, 1]], label="paper3")


def paper6_lattice() -> CyclicAction:
    """The canned rank-6, m=4 counterexample with a nonvanishing second
    differential; equals paper3 ⊕ dual(Λ² paper3) block for block."""
    return make_action(
        4,
        [
            [0, 1, 0, 0, 0, 0],
            [-1, 0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, 0, 0],
            [0, 0, 0, -1, 0, 1],
            [0, 0, 0, 0, -1, 0],
        ],
        label="paper6",
    )


def paper3_witness() -> list[int]:
    """The invariant pairing partner bundled with the paper3 builtin, in
    Λ²(dual L) ⊗ L coordinates (wedge pair slow, lattice index fast):
    (e1^∧e2^)⊗(e1+e2+2e3) − (e1^∧e3^)⊗e3 + (e2^∧e3^)⊗(e2+e3)."""
    n = 3
    pairs = BasisIndexing(n, 2)
    vec = [0] * (pairs.rank * n)
    terms = {
        (0, 1): {0: 1, 1: 1, 2: 2},
        (0, 2): {2: -1},
        (1, 2): {1: 1, 2: 1},
    }
    for pair, coeffs in terms.items():
        base = pairs.position[pair] * n
        for k, c in coeffs.items():
            vec[base + k] = c
    return vec


def sign_lattice() -> CyclicAction:
    return make_action(2, [[-1]], label="sign")


def gauss_lattice() -> CyclicAction:
    """Gaussian integers Z[i] with the order-4 rotation."""
    return make_action(4, [[0, -1], [1, 0]], label="gauss")


def named_lattice(name: str) -> CyclicAction:
    """Resolve a builtin name: paper3, paper6, sign, gauss, cyclotomic:p:r,
    syzygy:m:d, permutation:m:h."""
    plain = {
        "paper3": paper3_lattice,
        "paper6": paper6_lattice,
        "sign": sign_lattice,
        "gauss": gauss_lattice,
    }
    if name in plain:
        return plain[name]()
    parts = name.split(":")
    families = {"cyclotomic": cyclotomic_lattice, "syzygy": syzygy_lattice, "permutation": permutation_lattice}
    if len(parts) == 3 and parts[0] in families:
        try:
            i, j = int(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"bad builtin parameters in {name!r}")
        return families[parts[0]](i, j)
    raise UsageError(f"unknown builtin lattice {name!r}")


def action_to_dict(a: CyclicAction) -> dict:
    """JSON-ready form: {"m": ..., "matrix": [[...], ...], "label": ...}."""
    return {"m": a.m, "matrix": a.action.to_rows(), "label": a.label}


def action_from_dict(data: dict) -> CyclicAction:
    try:
        m = int(data["m"])
        matrix = data["matrix"]
        label = str(data.get("label", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed lattice spec: {exc}")
    return make_action(m, matrix, label=label)
