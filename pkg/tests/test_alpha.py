import random

import pytest
from hypothesis import given, settings, strategies as st

from latcoh.alpha import (
    FreeEndomorphism,
    FreeWord,
    canonical_lift,
    compute_alpha,
    endo_iterate_apply,
    invariant_witness_basis,
    lcs_class,
    magnus,
    obstruction_nonzero,
    pairing_value,
    word_invert,
    word_multiply,
    word_reduce,
)
from latcoh.errors import ContractViolationError, ResourceLimitError, UsageError
from latcoh.glattice import (
    BasisIndexing,
    cyclotomic_lattice,
    gauss_lattice,
    paper3_lattice,
    paper3_witness,
    paper6_lattice,
    permutation_lattice,
    syzygy_lattice,
    trivial_lattice,
)

letters = st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=30)


# -- words ----------------------------------------------------------------------


def test_word_examples():
    w1 = word_reduce([(0, 1), (1, 1)])
    w2 = word_reduce([(1, -1), (2, 1)])
    assert str(word_multiply(w1, w2)) == "x1*x3"
    assert str(word_invert(w1)) == "x2^-1*x1^-1"
    assert word_reduce([(0, 1), (0, -1)]) == FreeWord.empty()


@settings(max_examples=200, deadline=None)
@given(letters)
def test_reduction_is_confluent_under_splitting(ls):
    # reducing the whole word equals reducing both halves then multiplying
    whole = word_reduce(ls)
    for cut in (0, len(ls) // 2, len(ls)):
        assert word_multiply(word_reduce(ls[:cut]), word_reduce(ls[cut:])) == whole


@settings(max_examples=100, deadline=None)
@given(letters)
def test_inverse_cancels(ls):
    w = word_reduce(ls)
    assert word_multiply(w, word_invert(w)) == FreeWord.empty()


def test_words_are_freely_reduced():
    w = word_reduce([(0, 1), (1, 1), (1, -1), (0, -1), (2, 1)])
    assert w.letters == ((2, 1),)


# -- lifts and iteration ----------------------------------------------------------


def test_canonical_lift_of_rank3_example():
    f = canonical_lift(paper3_lattice())
    assert [str(w) for w in f.images] == ["x2", "x1^-1", "x1*x3"]
    inv_abelianized = f.abelianized()
    assert inv_abelianized.to_rows() == [[0, -1, 1], [1, 0, 0], [0, 0, 1]]


def test_canonical_lift_identity_and_rotation():
    ident = canonical_lift(trivial_lattice(3, 2))
    assert [str(w) for w in ident.images] == ["x1", "x2"]
    # abelianization of the lift must be A^-1 = [[0,1],[-1,0]], whose columns
    # are (0,-1) and (1,0)
    rot = canonical_lift(gauss_lattice())
    assert [str(w) for w in rot.images] == ["x2^-1", "x1"]
    assert rot.abelianized().to_rows() == [[0, 1], [-1, 0]]


def test_iterate_examples():
    f = canonical_lift(paper3_lattice())
    w = endo_iterate_apply(f, 4, FreeWord.generator(2))
    assert str(w) == "x2^-1*x1^-1*x2*x1*x3"
    assert endo_iterate_apply(f, 0, w) == w
    ident = FreeEndomorphism(tuple(FreeWord.generator(i) for i in range(3)))
    assert endo_iterate_apply(ident, 7, w) == w


def test_word_cap_enforced():
    # x1 -> x1^2 doubles length every application
    f = FreeEndomorphism((word_reduce([(0, 1), (0, 1)]),))
    with pytest.raises(ResourceLimitError):
        endo_iterate_apply(f, 40, FreeWord.generator(0), cap=10000)


def test_generator_out_of_range():
    f = canonical_lift(gauss_lattice())
    with pytest.raises(UsageError):
        f.apply(FreeWord.generator(5))


# -- Magnus expansion -------------------------------------------------------------


def test_magnus_examples():
    comm = word_reduce([(0, 1), (1, 1), (0, -1), (1, -1)])
    m = magnus(comm, 2)
    assert m.linear == (0, 0)
    assert m.quadratic == ((0, 1), (-1, 0))
    sq = magnus(word_reduce([(0, 1), (0, 1)]), 2)
    assert sq.linear == (2, 0) and sq.quadratic[0][0] == 1
    empty = magnus(FreeWord.empty(), 3)
    assert empty.linear == (0, 0, 0) and all(v == 0 for row in empty.quadratic for v in row)


@settings(max_examples=150, deadline=None)
@given(letters)
def test_magnus_antisymmetric_on_commutator_words(ls):
    w = word_reduce(ls)
    m = magnus(w, 3)
    if any(m.linear):
        return
    q = m.quadratic
    for i in range(3):
        assert q[i][i] == 0 or any(m.linear)  # diagonal vanishes when sums do
        for j in range(3):
            assert q[i][j] == -q[j][i]


def test_lcs_class_examples():
    idx = BasisIndexing(2, 2)
    comm = word_reduce([(0, 1), (1, 1), (0, -1), (1, -1)])
    assert lcs_class(comm, 2) == [1]
    inv_comm = word_reduce([(1, -1), (0, -1), (1, 1), (0, 1)])
    assert lcs_class(inv_comm, 2) == [-1]
    assert lcs_class(FreeWord.empty(), 4) == [0] * 6
    with pytest.raises(ContractViolationError):
        lcs_class(FreeWord.generator(0), 2)


# -- obstruction data ---------------------------------------------------------------


def test_compute_alpha_rank3_example():
    alpha = compute_alpha(paper3_lattice())
    idx = BasisIndexing(3, 2)
    p01 = idx.position[(0, 1)]
    assert alpha.delta._cols[0] == {} and alpha.delta._cols[1] == {}
    assert alpha.delta._cols[2] == {p01: -1}
    assert alpha.alpha1_wedge._cols[2] == {p01: 1}


def test_compute_alpha_trivial_cases():
    assert compute_alpha(trivial_lattice(4, 3)).delta.is_zero()
    for h in (1, 2, 4):
        assert compute_alpha(permutation_lattice(4, h)).delta.is_zero()


def test_alpha_equivariance_holds_for_samples():
    from latcoh.sampling import random_action

    rng = random.Random(12)
    for _ in range(20):
        a = random_action(rng, rng.choice([2, 3, 4, 6]), max_rank=4)
        alpha = compute_alpha(a)  # internal equivariance assertion must pass
        assert alpha.alpha1_wedge.rows == len(BasisIndexing(a.n, 2).subsets)


def test_obstruction_verdicts():
    assert obstruction_nonzero(paper3_lattice())
    assert obstruction_nonzero(paper6_lattice())
    for lat in (permutation_lattice(4, 1), permutation_lattice(6, 2), cyclotomic_lattice(2, 2), cyclotomic_lattice(3, 1), cyclotomic_lattice(2, 3)):
        assert not obstruction_nonzero(lat), lat.label


def test_pairing_example_and_invariance_check():
    a = paper3_lattice()
    assert pairing_value(a, paper3_witness()) == 2
    assert pairing_value(a, [0] * 9) == 0
    with pytest.raises(ContractViolationError):
        bad = [1] + [0] * 8  # not invariant
        pairing_value(a, bad)
    with pytest.raises(UsageError):
        pairing_value(a, [0] * 5)


def test_pairing_vanishes_for_permutation_lattices():
    lat = permutation_lattice(4, 2)
    basis = invariant_witness_basis(lat)
    for j in range(basis.cols):
        witness = [basis.entry(i, j) for i in range(basis.rows)]
        assert pairing_value(lat, witness) == 0


def test_nonzero_pairing_implies_obstruction():
    # consistency direction: over a spanning set of invariant witnesses,
    # a nonzero pairing forces the norm-membership test to say nonzero
    pool = [paper3_lattice(), paper6_lattice(), syzygy_lattice(4, 1), permutation_lattice(6, 3), cyclotomic_lattice(2, 2)]
    for lat in pool:
        alpha = compute_alpha(lat)
        basis = invariant_witness_basis(lat)
        hit = False
        for j in range(basis.cols):
            witness = [basis.entry(i, j) for i in range(basis.rows)]
            if pairing_value(lat, witness, alpha) != 0:
                hit = True
        if hit:
            assert obstruction_nonzero(lat, alpha)


def test_leibniz_law_on_random_wedges():
    from latcoh.verify import check_leibniz

    result = check_leibniz(trials=150, seed=99, sign=-1)
    assert result.ok, result.detail


def test_lift_independence():
    for lat in (paper3_lattice(), paper6_lattice(), cyclotomic_lattice(2, 2), syzygy_lattice(6, 2)):
        up = compute_alpha(lat)
        down = compute_alpha(lat, descending_lift=True)
        assert obstruction_nonzero(lat, up) == obstruction_nonzero(lat, down)


def test_sign_flip_does_not_change_verdicts():
    a = paper3_lattice()
    flipped = compute_alpha(a, sign=1)
    assert obstruction_nonzero(a, flipped)
    assert pairing_value(a, paper3_witness(), flipped) == 2  # -2 == 2 mod 4


def test_rank6_example_also_has_pairing_certificates():
    lat = paper6_lattice()
    alpha = compute_alpha(lat)
    basis = invariant_witness_basis(lat)
    values = set()
    for j in range(basis.cols):
        witness = [basis.entry(i, j) for i in range(basis.rows)]
        values.add(pairing_value(lat, witness, alpha))
    assert 2 in values  # a nonzero evaluation certifies the nonzero class
    assert obstruction_nonzero(lat, alpha)


def _magnus_compose(a, b, n):
    linear = tuple(x + y for x, y in zip(a.linear, b.linear))
    quad = [[a.quadratic[i][j] + b.quadratic[i][j] + a.linear[i] * b.linear[j] for j in range(n)] for i in range(n)]
    return linear, tuple(tuple(row) for row in quad)


@settings(max_examples=120, deadline=None)
@given(letters, letters)
def test_magnus_is_multiplicative(ls1, ls2):
    w1, w2 = word_reduce(ls1), word_reduce(ls2)
    m1, m2 = magnus(w1, 3), magnus(w2, 3)
    expected = _magnus_compose(m1, m2, 3)
    product = magnus(word_multiply(w1, w2), 3)
    assert (product.linear, product.quadratic) == expected


def test_obstruction_vanishes_for_all_syzygy_lattices():
    # every syzygy lattice admits an order-m lift, so its class vanishes
    for m in range(2, 13):
        for d in range(1, m):
            if m % d == 0 and (m - d) > 0:
                assert not obstruction_nonzero(syzygy_lattice(m, d)), (m, d)


def test_obstruction_vanishing_is_basis_independent():
    # conjugated syzygy lattices often have a nonzero derivation delta, but
    # the class itself must still vanish
    from latcoh.glattice import make_action
    from latcoh.intlinalg import ColumnSolver, IntegerMatrix

    rng = random.Random(808)
    nontrivial = 0
    for _ in range(12):
        m, d = rng.choice([(4, 2), (4, 1), (6, 2), (6, 3), (9, 3)])
        base = syzygy_lattice(m, d)
        n = base.n
        rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for _ in range(3):
            i, j = rng.randrange(n), rng.randrange(n)
            if i != j:
                c = rng.choice([-1, 1])
                for k in range(n):
                    rows[j][k] += c * rows[i][k]
        s = IntegerMatrix.from_rows(rows)
        s_inv = ColumnSolver(s).solve_matrix(IntegerMatrix.identity(n))
        lat = make_action(m, s @ base.action @ s_inv)
        alpha = compute_alpha(lat)
        nontrivial += 0 if alpha.delta.is_zero() else 1
        assert not obstruction_nonzero(lat, alpha)
    assert nontrivial  # the zero verdict was reached the nontrivial way at least once
