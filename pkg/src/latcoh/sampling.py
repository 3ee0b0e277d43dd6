"""Randomized finite-order integer actions for stress checks.

Actions are assembled from blocks of known order dividing m (trivial lines,
sign flips, coset shifts, syzygy companions) and conjugated by small random
unimodular matrices, so every sample is a genuine lattice automorphism with
bounded entries; everything is re-validated through make_action.
"""

from __future__ import annotations

import random

from .glattice import CyclicAction, make_action, permutation_lattice, syzygy_lattice
from .intlinalg import ColumnSolver, IntegerMatrix


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def _block_choices(m: int, max_rank: int) -> list[IntegerMatrix]:
    blocks: list[IntegerMatrix] = [IntegerMatrix.identity(1)]
    if m % 2 == 0:
        blocks.append(IntegerMatrix.from_rows([[-1]]))
    for d in _divisors(m):
        if d > 1 and d <= max_rank:
            blocks.append(permutation_lattice(m, m // d).action)
        for e in _divisors(d):
            rank = d - e
            if 0 < rank <= max_rank:
                blocks.append(syzygy_lattice(d, e).action)
    return blocks


def _random_unimodular(rng: random.Random, n: int, ops: int = 4) -> IntegerMatrix:
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(ops):
        kind = rng.randrange(3)
        i, j = rng.randrange(n), rng.randrange(n)
        if kind == 0 and i != j:
            c = rng.choice([-2, -1, 1, 2])
            for k in range(n):
                rows[j][k] += c * rows[i][k]
        elif kind == 1 and i != j:
            rows[i], rows[j] = rows[j], rows[i]
        elif kind == 2:
            rows[i] = [-v for v in rows[i]]
    return IntegerMatrix.from_rows(rows)


ENTRY_BOUND = 6
GROWTH_BOUND = 100_000


def _desk_scale(action: IntegerMatrix, inverse: IntegerMatrix, m: int) -> bool:
    # iterating a free-group lift of the inverse action grows words by at
    # most (max column 1-norm of A^-1)^m letters; keep that far below the cap
    if any(abs(v) > ENTRY_BOUND for col in action._cols for v in col.values()):
        return False
    longest = max((sum(abs(v) for v in col.values()) for col in inverse._cols), default=1)
    return max(longest, 1) ** m <= GROWTH_BOUND


def random_action(rng: random.Random, m: int, max_rank: int = 4, min_rank: int = 1) -> CyclicAction:
    """A validated action of Z/m on a lattice of rank in [min_rank, max_rank],
    with entries bounded so downstream free-group lifts stay at desk scale."""
    while True:
        target = rng.randint(min_rank, max_rank)
        block = None
        guard = 0
        while True:
            guard += 1
            choices = [b for b in _block_choices(m, target - (0 if block is None else block.rows)) if b.rows]
            pick = rng.choice(choices)
            block = pick if block is None else block.block_diag(pick)
            if block.rows >= target or guard > 50:
                break
            remaining = target - block.rows
            if not any(b.rows <= remaining for b in _block_choices(m, remaining)):
                break
        n = block.rows
        s = _random_unimodular(rng, n)
        s_inv = ColumnSolver(s).solve_matrix(IntegerMatrix.identity(n))
        conjugated = s @ block @ s_inv
        inverse = s @ ColumnSolver(block).solve_matrix(IntegerMatrix.identity(n)) @ s_inv
        if _desk_scale(conjugated, inverse, m):
            return make_action(m, conjugated, label=f"random(m={m},n={n})")
