import random

import pytest
from hypothesis import given, settings, strategies as st

from latcoh.errors import ContractViolationError, UsageError
from latcoh.intlinalg import (
    AbelianGroupStructure,
    ColumnSolver,
    IntegerMatrix,
    cokernel_structure,
    induced_map,
    kernel_basis,
    smith_normal_form,
    solve_integral,
    span_basis,
    subquotient,
)
from latcoh.oracles import enumerate_cokernel_structure, minor_gcd_structure


def M(rows, ncols=None):
    return IntegerMatrix.from_rows(rows, ncols=ncols)


small_matrices = st.integers(0, 5).flatmap(
    lambda r: st.integers(0, 5).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-5, 5), min_size=c, max_size=c),
            min_size=r,
            max_size=r,
        ).map(lambda rows: IntegerMatrix.from_rows(rows, ncols=c))
    )
)


# -- Smith normal form ---------------------------------------------------------


def test_smith_identity():
    s = smith_normal_form(IntegerMatrix.identity(3))
    assert s.diagonal() == [1, 1, 1]
    assert s.u @ IntegerMatrix.identity(3) @ s.v == s.d


def test_smith_derived_2x2():
    # d1 = gcd of entries = 2, d1*d2 = |det| = 8
    s = smith_normal_form(M([[2, 4], [6, 8]]))
    assert s.diagonal() == [2, 4]


def test_smith_zero_matrix():
    s = smith_normal_form(IntegerMatrix.zeros(2, 3))
    assert s.d == IntegerMatrix.zeros(2, 3)


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_smith_decomposition_properties(m):
    s = smith_normal_form(m)
    assert s.u @ m @ s.v == s.d
    assert abs(s.u.determinant()) == 1
    assert abs(s.v.determinant()) == 1
    diag = s.diagonal()
    nonzero = [d for d in diag if d]
    assert all(d >= 0 for d in diag)
    assert diag[len(nonzero) :] == [0] * (len(diag) - len(nonzero))
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0


@settings(max_examples=80, deadline=None)
@given(small_matrices)
def test_smith_matches_minor_gcd_oracle(m):
    assert cokernel_structure(m) == minor_gcd_structure(m)


def test_smith_matches_enumeration_oracle():
    rng = random.Random(40)
    done = 0
    while done < 40:
        r, c = rng.randint(1, 4), rng.randint(1, 5)
        m = M([[rng.randint(-5, 5) for _ in range(c)] for _ in range(r)], ncols=c)
        enumerated = enumerate_cokernel_structure(m, max_order=200)
        if enumerated is None:
            continue
        done += 1
        assert cokernel_structure(m) == enumerated


def test_smith_deterministic():
    rng = random.Random(3)
    m = M([[rng.randint(-9, 9) for _ in range(5)] for _ in range(4)])
    first = smith_normal_form(m)
    second = smith_normal_form(m)
    assert first.u == second.u and first.v == second.v and first.d == second.d


# -- kernels and solving -------------------------------------------------------


def test_kernel_identity_is_empty():
    assert kernel_basis(IntegerMatrix.identity(2)).cols == 0


def test_kernel_zero_is_identity():
    assert kernel_basis(IntegerMatrix.zeros(2, 2)) == IntegerMatrix.identity(2)


def test_kernel_derived_rank_one():
    # fixed vectors of the rank-3 canned example span Z*(1,1,2)
    a = M([[0, 1, 0], [-1, 0, 1], [0, 0, 1]])
    k = kernel_basis(a - IntegerMatrix.identity(3))
    assert k.cols == 1
    assert [k.entry(i, 0) for i in range(3)] == [1, 1, 2]


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_kernel_annihilates_and_is_saturated(m):
    k = kernel_basis(m)
    assert (m @ k).is_zero()
    rank = len([d for d in smith_normal_form(m).diagonal() if d])
    assert k.cols == m.cols - rank
    if k.cols:
        # saturation: the Smith form of a saturated basis has all factors 1
        assert cokernel_structure(k).torsion == ()


def test_solutions_parameterized_by_kernel():
    rng = random.Random(9)
    for _ in range(40):
        r, c = rng.randint(1, 4), rng.randint(1, 5)
        m = M([[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)], ncols=c)
        x = [rng.randint(-3, 3) for _ in range(c)]
        b = m.apply(x)
        y = solve_integral(m, b)
        assert y is not None and m.apply(y) == b
        k = kernel_basis(m)
        # x - y must be an integer combination of kernel columns
        diff = [xi - yi for xi, yi in zip(x, y)]
        assert solve_integral(k, diff) is not None if k.cols else diff == [0] * c
        if k.cols:
            z = [rng.randint(-2, 2) for _ in range(k.cols)]
            shifted = [yi + ki for yi, ki in zip(y, k.apply(z))]
            assert m.apply(shifted) == b


def test_solve_trivial_examples():
    assert solve_integral(IntegerMatrix.diagonal([2, 3]), [4, 3]) == [2, 1]
    assert solve_integral(IntegerMatrix.diagonal([2]), [1]) is None
    x = solve_integral(M([[2, 4], [6, 8]]), [2, 6])
    assert x is not None
    assert M([[2, 4], [6, 8]]).apply(x) == [2, 6]


def test_solve_dimension_mismatch():
    with pytest.raises(UsageError):
        solve_integral(IntegerMatrix.diagonal([2, 3]), [1, 2, 3])


# -- subquotients --------------------------------------------------------------


def test_subquotient_z_mod_m():
    pres = subquotient(1, IntegerMatrix.zeros(1, 1), M([[4]]))
    assert pres.structure == AbelianGroupStructure(0, (4,))


def test_subquotient_gaussian_odd_degree():
    # ker(0)/im(A - I) for the 90-degree rotation: index |det(A-I)| = 2
    aug = M([[-1, -1], [1, -1]])
    pres = subquotient(2, IntegerMatrix.zeros(2, 2), aug)
    assert pres.structure == AbelianGroupStructure(0, (2,))


def test_subquotient_trivial_action_even_degree():
    pres = subquotient(1, IntegerMatrix.zeros(1, 1), M([[4]]))
    assert pres.structure.order() == 4


def test_subquotient_rejects_non_complex():
    with pytest.raises(ContractViolationError):
        subquotient(2, IntegerMatrix.identity(2), IntegerMatrix.identity(2))


def test_subquotient_roundtrip_representatives():
    rng = random.Random(17)
    aug = M([[-1, -1], [1, -1]])
    pres = subquotient(2, IntegerMatrix.zeros(2, 2), aug)
    for _ in range(20):
        v = [rng.randint(-5, 5), rng.randint(-5, 5)]
        coords = pres.coords(v)
        w = pres.lift(coords)
        # v - w must lie in the denominator span
        diff = [a - b for a, b in zip(v, w)]
        assert ColumnSolver(pres.denominator_basis).solve({i: x for i, x in enumerate(diff) if x}) is not None


def _random_unimodular(rng, n):
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(6):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.choice([-2, -1, 1, 2])
        for k in range(n):
            rows[j][k] += c * rows[i][k]
    return IntegerMatrix.from_rows(rows)


def test_subquotient_invariant_under_base_change():
    rng = random.Random(23)
    for _ in range(25):
        n = rng.randint(1, 4)
        x = M([[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(1, 3))], ncols=n)
        k = kernel_basis(x)
        if not k.cols:
            continue
        width = rng.randint(1, 3)
        y_coeff = M([[rng.randint(-2, 2) for _ in range(width)] for _ in range(k.cols)], ncols=width)
        y = k @ y_coeff
        base = subquotient(n, x, y).structure
        s = _random_unimodular(rng, n)
        s_inv = ColumnSolver(s).solve_matrix(IntegerMatrix.identity(n))
        # ambient change of basis
        assert subquotient(n, x @ s_inv, s @ y).structure == base
        # numerator presented by a different matrix with the same kernel
        u = _random_unimodular(rng, x.rows)
        assert subquotient(n, u @ x, y).structure == base
        # denominator generators changed by a unimodular column mix
        if y.cols:
            t = _random_unimodular(rng, y.cols)
            assert subquotient(n, x, y @ t).structure == base


def test_induced_map_identity_and_zero():
    aug = M([[-1, -1], [1, -1]])
    pres = subquotient(2, IntegerMatrix.zeros(2, 2), aug)
    ident = induced_map(IntegerMatrix.identity(2), pres, pres)
    assert ident.to_rows() == [[1]]
    zero = induced_map(IntegerMatrix.zeros(2, 2), pres, pres)
    assert zero.to_rows() == [[0]]


def test_induced_map_multiplication_by_two_on_z4():
    pres = subquotient(1, IntegerMatrix.zeros(1, 1), M([[4]]))
    double = induced_map(M([[2]]), pres, pres)
    assert double.to_rows() == [[2]]


def test_induced_map_rejects_incompatible():
    pres4 = subquotient(1, IntegerMatrix.zeros(1, 1), M([[4]]))
    pres2 = subquotient(1, IntegerMatrix.zeros(1, 1), M([[2]]))
    with pytest.raises(ContractViolationError):
        # multiplication by 1 does not carry im(2) into im(4)
        induced_map(IntegerMatrix.identity(1), pres2, pres4)


def test_span_basis_is_canonical():
    rng = random.Random(31)
    for _ in range(30):
        r, c = rng.randint(1, 4), rng.randint(1, 5)
        m = M([[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)], ncols=c)
        b = span_basis(m)
        t = _random_unimodular(rng, c)
        assert span_basis(m @ t) == b


def test_structure_validation():
    with pytest.raises(UsageError):
        AbelianGroupStructure(0, (3, 4))  # not a divisibility chain
    with pytest.raises(UsageError):
        AbelianGroupStructure(0, (1,))
    assert AbelianGroupStructure(0, (2, 4)).order() == 8
    assert AbelianGroupStructure(1).order() is None
    assert str(AbelianGroupStructure(2, (2, 6))) == "Z^2 x C2 x C6"


def test_empty_shapes_are_legal():
    for m in (IntegerMatrix.zeros(0, 0), IntegerMatrix.zeros(0, 3), IntegerMatrix.zeros(3, 0)):
        s = smith_normal_form(m)
        assert s.u @ m @ s.v == s.d
        assert (m @ kernel_basis(m)).is_zero()
    assert kernel_basis(IntegerMatrix.zeros(0, 3)) == IntegerMatrix.identity(3)
    pres = subquotient(0, IntegerMatrix.zeros(2, 0), IntegerMatrix.zeros(0, 0))
    assert pres.structure.is_trivial()


def test_group_action_induces_identity_on_cohomology_coordinates():
    # the generator acts trivially on its own cohomology: the induced matrix
    # of the action on ker/im subquotients must be the identity mod moduli
    from latcoh.cohomology import operators
    from latcoh.sampling import random_action

    rng = random.Random(55)
    for _ in range(12):
        a = random_action(rng, rng.choice([2, 3, 4, 6]), max_rank=4)
        ops = operators(a)
        for x, y in ((ops.norm, ops.aug), (ops.aug, ops.norm)):
            pres = subquotient(a.n, x, y)
            k = len(pres.coord_moduli)
            if k == 0:
                continue
            mat = induced_map(a.action, pres, pres)
            for col in range(k):
                for row in range(k):
                    want = 1 if row == col else 0
                    got = mat.entry(row, col)
                    d = pres.coord_moduli[row]
                    assert (got - want) % d == 0 if d else got == want


def test_induced_map_respects_composition():
    from latcoh.cohomology import operators
    from latcoh.sampling import random_action

    rng = random.Random(56)
    for _ in range(10):
        a = random_action(rng, rng.choice([2, 3, 4, 6]), max_rank=4)
        ops = operators(a)
        pres = subquotient(a.n, ops.norm, ops.aug)
        k = len(pres.coord_moduli)
        if k == 0:
            continue
        single = induced_map(a.action, pres, pres)
        double = induced_map(a.action @ a.action, pres, pres)
        composite = single @ single
        for col in range(k):
            for row in range(k):
                d = pres.coord_moduli[row]
                diff = composite.entry(row, col) - double.entry(row, col)
                assert diff % d == 0 if d else diff == 0
