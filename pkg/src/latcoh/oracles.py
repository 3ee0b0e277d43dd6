"""Self-contained brute-force oracles used to cross-check the main linear
algebra.  Nothing here imports the elimination code from intlinalg: the
point is an independent route to the same answers.
"""

from __future__ import annotations

import math
from itertools import combinations, product
from typing import Optional

from .intlinalg import AbelianGroupStructure, IntegerMatrix


def _det_fraction_free(rows: list[list[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    a = [row[:] for row in rows]
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


def minor_gcd_structure(m: IntegerMatrix) -> AbelianGroupStructure:
    """Cokernel structure from determinantal divisors: the k-th invariant
    factor is gcd(k-minors) / gcd((k-1)-minors).  Exponential in the size;
    meant for matrices with at most ~6 rows/columns."""
    rows = m.to_rows()
    r, c = m.rows, m.cols
    divisors = [1]
    rank = 0
    for k in range(1, min(r, c) + 1):
        g = 0
        for rsel in combinations(range(r), k):
            for csel in combinations(range(c), k):
                sub = [[rows[i][j] for j in csel] for i in rsel]
                g = math.gcd(g, _det_fraction_free(sub))
        if g == 0:
            break
        divisors.append(g)
        rank = k
    factors = [divisors[k] // divisors[k - 1] for k in range(1, rank + 1)]
    return AbelianGroupStructure(r - rank, tuple(d for d in factors if d > 1))


def _triangular_generators(m: IntegerMatrix) -> Optional[list[list[int]]]:
    """Column reduction (own implementation) to a lower-triangular generating
    set of the column span; None when some row has no pivot (infinite
    cokernel)."""
    r = m.rows
    cols = [[m.entry(i, j) for i in range(r)] for j in range(m.cols)]
    basis: list[list[int]] = []
    for row in range(r):
        live = [c for c in cols if c[row]]
        if not live:
            return None
        while len(live) > 1:
            live.sort(key=lambda col: abs(col[row]))
            pivot = live[0]
            for other in live[1:]:
                q = other[row] // pivot[row]
                for i in range(row, r):
                    other[i] -= q * pivot[i]
            live = [c for c in live if c[row]]
        pivot = live[0]
        if pivot[row] < 0:
            pivot[:] = [-v for v in pivot]
        basis.append(pivot[:])
        cols = [c for c in cols if c is not pivot and any(c[row:])]
    return basis


def enumerate_cokernel_structure(m: IntegerMatrix, max_order: int = 200) -> Optional[AbelianGroupStructure]:
    """Structure of Z^rows / im(m) by explicit enumeration of the quotient
    group; None when the quotient is infinite or larger than max_order.

    Residues are reduced against a triangular generating set; invariant
    factors are recovered from the sizes of the d-torsion subgroups, which
    determine a finite abelian group up to isomorphism.
    """
    r = m.rows
    if r == 0:
        return AbelianGroupStructure(0)
    basis = _triangular_generators(m)
    if basis is None:
        return None
    diag = [basis[i][i] for i in range(r)]
    order = math.prod(diag)
    if order > max_order:
        return None

    def reduce(vec: list[int]) -> tuple[int, ...]:
        v = vec[:]
        for i in range(r):
            q = v[i] // diag[i]
            if q:
                for k in range(i, r):
                    v[k] -= q * basis[i][k]
        return tuple(v)

    elements = [reduce([*combo]) for combo in product(*(range(d) for d in diag))]
    elements = sorted(set(elements))
    if len(elements) != order:
        raise AssertionError("enumeration inconsistency: residue count != determinant")

    def torsion_count(d: int) -> int:
        zero = tuple([0] * r)
        return sum(1 for e in elements if reduce([d * x for x in e]) == zero)

    exponents_by_prime: dict[int, list[int]] = {}
    rest = order
    p = 2
    primes = []
    while p * p <= rest:
        if rest % p == 0:
            primes.append(p)
            while rest % p == 0:
                rest //= p
        p += 1
    if rest > 1:
        primes.append(rest)
    for p in primes:
        counts = [0]
        j = 1
        while True:
            size = torsion_count(p**j)
            counts.append(round(math.log(size, p)))
            if p ** counts[-1] != size:
                raise AssertionError("p-torsion subgroup size is not a prime power")
            if j > 1 and counts[-1] == counts[-2]:
                counts.pop()
                break
            j += 1
        exps = []
        for level in range(1, len(counts)):
            new_factors = (counts[level] - counts[level - 1]) - (counts[level + 1] - counts[level] if level + 1 < len(counts) else 0)
            exps.extend([level] * new_factors)
        exponents_by_prime[p] = sorted(exps, reverse=True)

    width = max((len(v) for v in exponents_by_prime.values()), default=0)
    factors = []
    for k in range(width):
        f = 1
        for p, exps in exponents_by_prime.items():
            if k < len(exps):
                f *= p ** exps[k]
        factors.append(f)
    factors.reverse()
    return AbelianGroupStructure(0, tuple(d for d in factors if d > 1))
