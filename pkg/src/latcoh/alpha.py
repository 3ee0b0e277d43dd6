"""Free-group computation of the obstruction classes attached to a lattice
action.

Lifting the inverse action to an endomorphism f of the free group F_n and
expanding f^m(x) x^{-1} to degree two (Magnus truncation) reads off a
derivation delta: L -> Λ²L.  Its negative is the convention-fixed wedge form
of the first obstruction class; higher maps Λ^s L -> Λ^{s+1} L follow by the
Leibniz rule.  The class is an obstruction to extending the group action to
a resolution, and it is detected either by norm-image membership in the hom
lattice or by pairing against invariant witnesses.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .errors import (
    ContractViolationError,
    InternalInvariantError,
    ResourceLimitError,
    UsageError,
)
from .glattice import (
    BasisIndexing,
    CyclicAction,
    _exterior_any,
    dual,
    inverse_action_matrix,
)
from .intlinalg import IntegerMatrix, solve_integral, kernel_basis

DEFAULT_WORD_CAP = 10**6


def word_length_cap() -> int:
    """Free-word length guard; override with LATCOH_WORD_CAP."""
    raw = os.environ.get("LATCOH_WORD_CAP")
    if raw is None:
        return DEFAULT_WORD_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"LATCOH_WORD_CAP must be an integer, got {raw!r}")
    if cap < 1:
        raise UsageError("LATCOH_WORD_CAP must be positive")
    return cap


@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word in generators 0..n-1; letters are (index, ±1)."""

    letters: tuple[tuple[int, int], ...]

    @classmethod
    def from_letters(cls, letters: Sequence[tuple[int, int]]) -> "FreeWord":
        stack: list[tuple[int, int]] = []
        for g, e in letters:
            if e not in (1, -1):
                raise UsageError("letter exponents must be +1 or -1")
            if stack and stack[-1][0] == g and stack[-1][1] == -e:
                stack.pop()
            else:
                stack.append((g, e))
        return cls(tuple(stack))

    @classmethod
    def generator(cls, g: int, e: int = 1) -> "FreeWord":
        return cls(((g, e),))

    @classmethod
    def empty(cls) -> "FreeWord":
        return cls(())

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord.from_letters(self.letters + other.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        out = []
        for g, e in self.letters:
            out.append(f"x{g + 1}" if e == 1 else f"x{g + 1}^-1")
        return "*".join(out)


def word_multiply(*words: FreeWord) -> FreeWord:
    """Freely reduced product.

    >>> str(word_multiply(FreeWord.from_letters([(0, 1), (1, 1)]),
    ...                   FreeWord.from_letters([(1, -1), (2, 1)])))
    'x1*x3'
    """
    out = FreeWord.empty()
    for w in words:
        out = out * w
    return out


def word_invert(w: FreeWord) -> FreeWord:
    return w.inverse()


def word_reduce(letters: Sequence[tuple[int, int]]) -> FreeWord:
    return FreeWord.from_letters(letters)


@dataclass(frozen=True)
class FreeEndomorphism:
    """Endomorphism of F_n given by generator images; ``abelianized`` is the
    matrix of exponent sums (column i = image of generator i)."""

    images: tuple[FreeWord, ...]

    @property
    def n(self) -> int:
        return len(self.images)

    def abelianized(self) -> IntegerMatrix:
        n = self.n
        cols = []
        for w in self.images:
            acc: dict[int, int] = {}
            for g, e in w.letters:
                acc[g] = acc.get(g, 0) + e
            cols.append({g: v for g, v in acc.items() if v})
        return IntegerMatrix(n, n, cols)

    def apply(self, w: FreeWord, cap: Optional[int] = None) -> FreeWord:
        cap = word_length_cap() if cap is None else cap
        n = self.n
        stack: list[tuple[int, int]] = []
        for g, e in w.letters:
            if not 0 <= g < n:
                raise UsageError(f"generator index {g} out of range")
            img = self.images[g].letters
            if e == -1:
                img = tuple((h, -f) for h, f in reversed(img))
            for letter in img:
                if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
                    stack.pop()
                else:
                    stack.append(letter)
                    if len(stack) > cap:
                        raise ResourceLimitError(
                            f"free word grew past the cap of {cap} letters; "
                            "raise LATCOH_WORD_CAP to proceed"
                        )
        return FreeWord(tuple(stack))


def endo_iterate_apply(f: FreeEndomorphism, k: int, w: FreeWord, cap: Optional[int] = None) -> FreeWord:
    """f^k(w), freely reduced, guarded by the word-length cap."""
    if k < 0:
        raise UsageError("iteration count must be >= 0")
    for _ in range(k):
        w = f.apply(w, cap)
    return w


def canonical_lift(a: CyclicAction, descending: bool = False) -> FreeEndomorphism:
    """The deterministic free-group lift of the inverse action: generator i
    maps to the product of x_r^(c_r) over r in ascending order, where c is
    column i of A^-1.  Any lift yields the same classes; this one is fixed
    for reproducibility (pass descending=True for the letter-reversed lift).

    >>> from .glattice import paper3_lattice
    >>> [str(w) for w in canonical_lift(paper3_lattice()).images]
    ['x2', 'x1^-1', 'x1*x3']
    """
    inv = inverse_action_matrix(a)
    images = []
    for i in range(a.n):
        col = inv._cols[i]
        letters: list[tuple[int, int]] = []
        for r in sorted(col, reverse=descending):
            c = col[r]
            letters.extend([(r, 1 if c > 0 else -1)] * abs(c))
        images.append(FreeWord.from_letters(letters))
    return FreeEndomorphism(tuple(images))


@dataclass(frozen=True)
class MagnusTruncation:
    """Degree-<=2 truncation of the Magnus expansion: 1 + sum a_i X_i +
    sum B_ij X_i X_j with the noncommutative multiplication law."""

    linear: tuple[int, ...]
    quadratic: tuple[tuple[int, ...], ...]

    @classmethod
    def one(cls, n: int) -> "MagnusTruncation":
        return cls(tuple([0] * n), tuple(tuple([0] * n) for _ in range(n)))


def magnus(w: FreeWord, n: int) -> MagnusTruncation:
    """Magnus expansion of a word truncated in degree 2.

    A generator contributes (e_i, 0); an inverse letter contributes
    (-e_i, e_i⊗e_i); products multiply by (a,B)(a',B') = (a+a', B+B'+a⊗a').

    >>> comm = FreeWord.from_letters([(0, 1), (1, 1), (0, -1), (1, -1)])
    >>> m = magnus(comm, 2)
    >>> m.linear, m.quadratic
    ((0, 0), ((0, 1), (-1, 0)))
    """
    lin = [0] * n
    quad = [[0] * n for _ in range(n)]
    for g, e in w.letters:
        if not 0 <= g < n:
            raise UsageError(f"generator index {g} out of range for rank {n}")
        if e == 1:
            # B += a ⊗ e_g
            for r in range(n):
                if lin[r]:
                    quad[r][g] += lin[r]
            lin[g] += 1
        else:
            quad[g][g] += 1
            for r in range(n):
                if lin[r]:
                    quad[r][g] -= lin[r]
            lin[g] -= 1
    return MagnusTruncation(tuple(lin), tuple(tuple(row) for row in quad))


def lcs_class(w: FreeWord, n: int) -> list[int]:
    """Class of a commutator-subgroup word in Λ²(Z^n) coordinates (wedge
    basis in lexicographic order, [x_i, x_j] -> +e_i ∧ e_j)."""
    exp = magnus(w, n)
    if any(exp.linear):
        raise ContractViolationError("word has nonzero exponent sums; not in the commutator subgroup")
    idx = BasisIndexing(n, 2)
    return [exp.quadratic[i][j] for (i, j) in idx.subsets]


class AlphaData:
    """The derivation delta: L -> Λ²L from a free-group lift, its negative
    (the wedge form of the first obstruction class), and the Leibniz
    extensions Λ^s L -> Λ^{s+1} L."""

    def __init__(self, action: CyclicAction, delta: IntegerMatrix, sign: int = -1):
        if sign not in (1, -1):
            raise UsageError("sign convention must be +1 or -1")
        self.action = action
        self.n = action.n
        self.m = action.m
        self.delta = delta
        self.alpha1_wedge = delta.scaled(sign)
        self._check_equivariance()

    def _check_equivariance(self) -> None:
        lam2 = _exterior_any(self.action, 2).action
        if lam2 @ self.alpha1_wedge != self.alpha1_wedge @ self.action.action:
            raise InternalInvariantError("first obstruction map is not equivariant; convention bug")

    @lru_cache(maxsize=None)
    def alpha_s_wedge(self, s: int) -> IntegerMatrix:
        """Degree-s Leibniz extension: e_{i_1}∧...∧e_{i_s} maps to the signed
        sum over positions j of e_{i_1}∧...∧ᾱ(e_{i_j})∧...∧e_{i_s}."""
        if not 0 <= s <= self.n:
            raise UsageError("wedge degree out of range")
        src = BasisIndexing(self.n, s)
        dst = BasisIndexing(self.n, s + 1) if s < self.n else None
        if dst is None:
            return IntegerMatrix.zeros(0, src.rank)
        pair_idx = BasisIndexing(self.n, 2)
        cols = []
        for subset in src.subsets:
            acc: dict[int, int] = {}
            for j, gen in enumerate(subset):
                rest = subset[:j] + subset[j + 1 :]
                pos_sign = -1 if j % 2 else 1
                for p, coeff in self.alpha1_wedge._cols[gen].items():
                    merged = dst.merge(rest, pair_idx.subsets[p])
                    if merged is None:
                        continue
                    sgn, key = merged
                    k = dst.position[key]
                    w = acc.get(k, 0) + pos_sign * sgn * coeff
                    if w:
                        acc[k] = w
                    elif k in acc:
                        del acc[k]
            cols.append(acc)
        return IntegerMatrix(dst.rank, src.rank, cols)


def compute_alpha(
    a: CyclicAction,
    sign: int = -1,
    descending_lift: bool = False,
    cap: Optional[int] = None,
) -> AlphaData:
    """Build the obstruction data from the canonical free-group lift.

    Column i of delta is the commutator class of f^m(x_i) x_i^{-1}; the
    wedge form of the obstruction is sign * delta (default sign -1).

    >>> from .glattice import paper3_lattice
    >>> compute_alpha(paper3_lattice()).delta.to_rows()
    [[0, 0, -1], [0, 0, 0], [0, 0, 0]]
    """
    f = canonical_lift(a, descending=descending_lift)
    idx = BasisIndexing(a.n, 2)
    cols = []
    for i in range(a.n):
        w = endo_iterate_apply(f, a.m, FreeWord.generator(i), cap)
        w = w * FreeWord.generator(i, -1)
        cls = lcs_class(w, a.n)
        cols.append({k: v for k, v in enumerate(cls) if v})
    delta = IntegerMatrix(idx.rank, a.n, cols)
    return AlphaData(a, delta, sign=sign)


def hom_action_norm(a: CyclicAction) -> IntegerMatrix:
    """Norm operator of hom(L, Λ²L) with the conjugation action, columns in
    the column-major flattening."""
    w_action = dual(a).action.kron(_exterior_any(a, 2).action)
    ident = IntegerMatrix.identity(w_action.rows)
    norm = ident
    power = ident
    for _ in range(a.m - 1):
        power = power @ w_action
        norm = norm + power
    return norm


def _flatten_column_major(mat: IntegerMatrix) -> list[int]:
    out = [0] * (mat.rows * mat.cols)
    for j in range(mat.cols):
        base = j * mat.rows
        for i, v in mat._cols[j].items():
            out[base + i] = v
    return out


def obstruction_nonzero(a: CyclicAction, alpha: Optional[AlphaData] = None) -> bool:
    """Whether the first obstruction class is nonzero: the equivariant wedge
    map, seen in the hom lattice hom(L, Λ²L), escapes the norm image.

    >>> from .glattice import permutation_lattice
    >>> obstruction_nonzero(permutation_lattice(4, 1))
    False
    """
    if alpha is None:
        alpha = compute_alpha(a)
    vec = _flatten_column_major(alpha.alpha1_wedge)
    w_action = dual(a).action.kron(_exterior_any(a, 2).action)
    if w_action.apply(vec) != vec:
        raise InternalInvariantError("obstruction vector is not invariant in the hom lattice")
    norm = hom_action_norm(a)
    return solve_integral(norm, vec) is None


def witness_rank(a: CyclicAction) -> int:
    return math.comb(a.n, 2) * a.n


def invariant_witness_basis(a: CyclicAction) -> IntegerMatrix:
    """Basis of the invariant vectors of Λ²(dual L) ⊗ L, the pairing partners
    of the obstruction class."""
    t = _exterior_any(dual(a), 2).action.kron(a.action)
    return kernel_basis(t - IntegerMatrix.identity(t.rows))


def pairing_value(a: CyclicAction, witness: Sequence[int], alpha: Optional[AlphaData] = None) -> int:
    """Evaluation of the obstruction against an invariant witness, mod m.

    The witness lives in Λ²(dual L) ⊗ L, flattened with the wedge index slow:
    coordinate (pair p, lattice index k) sits at p * n + k.  A nonzero value
    certifies that the obstruction class is nonzero.
    """
    if alpha is None:
        alpha = compute_alpha(a)
    n = a.n
    pairs = math.comb(n, 2)
    if len(witness) != pairs * n:
        raise UsageError(f"witness must have length {pairs * n}")
    t = _exterior_any(dual(a), 2).action.kron(a.action)
    wv = list(witness)
    if t.apply(wv) != wv:
        raise ContractViolationError("witness is not invariant under the diagonal action")
    total = 0
    for k in range(n):
        for p, coeff in alpha.alpha1_wedge._cols[k].items():
            total += coeff * wv[p * n + k]
    return total % a.m
