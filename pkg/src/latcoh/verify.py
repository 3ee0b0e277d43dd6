"""The bundled verification suite: one named check per acceptance criterion,
runnable from the CLI (`latcoh verify`) and exercised by the test suite.

Each check returns a CheckResult; the runner never raises on a mathematical
failure, it reports it.  Two test-mode switches exist: ``sign=+1`` re-runs
everything under the flipped convention for the first obstruction map (all
checks must still pass), and ``corrupt=True`` sabotages the rank-3 builtin
to demonstrate that the suite notices (the delta check must then fail).

The check named ``prime-case-euler-ratio-as-stated`` is expected to FAIL on
a correct build: the stated target p^s for the prime-case order ratio is
inconsistent with the predicted high-degree cohomology (Z/p)^(p^s), whose
order ratio is p^(p^s) = p^(|H^1|); the green companion check
``prime-case-euler-ratio-consistent`` asserts that value.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .alpha import compute_alpha, obstruction_nonzero, pairing_value
from .cohomology import bar_oracle, group_cohomology, h_hat, operators, tate
from .glattice import (
    BasisIndexing,
    CyclicAction,
    cyclotomic_lattice,
    direct_sum,
    dual,
    exterior_power,
    make_action,
    named_lattice,
    paper3_lattice,
    paper3_witness,
    paper6_lattice,
    permutation_lattice,
)
from .intlinalg import IntegerMatrix
from .lhs import build_e2, d2, d2_squared_is_zero, euler_ratio_check, prime_case_report
from .sampling import random_action


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9]
PRIME_CASES = [(2, 1), (2, 2), (3, 1), (5, 1)]


def _factor_prime_power(q: int) -> tuple[int, int]:
    p = 2
    while q % p:
        p += 1
    r = 0
    while q > 1:
        q //= p
        r += 1
    return p, r


def vanishing_family(size: int = len(PRIME_POWERS)) -> list[CyclicAction]:
    """Cyclotomic lattices for the listed prime powers and the direct sums of
    two of them with the same group order."""
    singles = [cyclotomic_lattice(*_factor_prime_power(q)) for q in PRIME_POWERS[:size]]
    family = list(singles)
    for a in singles:
        family.append(direct_sum(a, a))
    return family


def _paper3(corrupt: bool) -> CyclicAction:
    if corrupt:
        # still a valid order-4 action, but the wrong one
        return make_action(4, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], label="paper3")
    return paper3_lattice()


def check_main_example(sign: int, corrupt: bool) -> CheckResult:
    a = _paper3(corrupt)
    alpha = compute_alpha(a, sign=sign)
    idx = BasisIndexing(3, 2)
    want = [{}, {}, {idx.position[(0, 1)]: -1}]
    delta_ok = [dict(alpha.delta._cols[i]) for i in range(3)] == want
    obstruction = obstruction_nonzero(a, alpha)
    pairing = pairing_value(a, paper3_witness(), alpha) if not corrupt else None
    ok = delta_ok and obstruction and pairing == 2
    detail = f"delta columns {'exact' if delta_ok else 'WRONG'}, obstruction_nonzero={obstruction}, pairing={pairing} (want 2 mod 4)"
    return CheckResult("main-example-delta-obstruction-pairing", ok, detail)


def check_main_example_collapse(sign: int, corrupt: bool) -> CheckResult:
    a = _paper3(corrupt)
    report = d2(a, alpha=compute_alpha(a, sign=sign))
    return CheckResult("main-example-collapse", report.all_zero, f"all_zero={report.all_zero}")


def check_counterexample(sign: int) -> CheckResult:
    a3, a6 = paper3_lattice(), paper6_lattice()
    block = direct_sum(a3, dual(exterior_power(a3, 2)))
    block_ok = block.action == a6.action
    report = d2(a6, alpha=compute_alpha(a6, sign=sign))
    s2 = any(s == 2 for (_, s, _) in report.witnesses)
    ok = block_ok and not report.all_zero and s2
    return CheckResult(
        "counterexample-nonzero-d2",
        ok,
        f"block identity={block_ok}, witnesses={report.witnesses} (need some s=2)",
    )


def check_tate_vanishing(family_size: int = len(PRIME_POWERS)) -> CheckResult:
    bad = []
    for lat in vanishing_family(family_size):
        d = dual(lat)
        for j in range(lat.n + 1):
            ops = operators(exterior_power(d, j))
            for i in (0, 1):
                if (i + j) % 2:
                    if not tate(exterior_power(d, j), i, ops).structure.is_trivial():
                        bad.append((lat.label, i, j))
    return CheckResult("tate-vanishing-free-families", not bad, f"violations={bad or 'none'}")


def check_free_collapse(sign: int, family_size: int = len(PRIME_POWERS)) -> CheckResult:
    bad = [lat.label for lat in vanishing_family(family_size) if not d2(lat, alpha=compute_alpha(lat, sign=sign)).all_zero]
    return CheckResult("free-implies-d2-collapse", not bad, f"failures={bad or 'none'}")


def check_corollary_no_four(trials: int, seed: int, sign: int) -> CheckResult:
    rng = random.Random(seed)
    bad = []
    for t in range(trials):
        m = rng.choice([2, 3, 6])
        a = random_action(rng, m, max_rank=4)
        if not d2(a, alpha=compute_alpha(a, sign=sign)).all_zero:
            bad.append((t, m, a.action.to_rows()))
    return CheckResult(
        "collapse-when-m-not-divisible-by-4",
        not bad,
        f"{trials} random actions with m in (2,3,6); failures={bad or 'none'}",
    )


def _prime_case_lattices() -> list[tuple[int, int, CyclicAction]]:
    out = []
    for p, s in PRIME_CASES:
        lat = cyclotomic_lattice(p, 1)
        for _ in range(s - 1):
            lat = direct_sum(lat, cyclotomic_lattice(p, 1))
        out.append((p, s, lat))
    return out


def check_prime_case_h1() -> CheckResult:
    bad = []
    for p, s, lat in _prime_case_lattices():
        rep = prime_case_report(lat)
        if lat.n != (p - 1) * s or not rep.h1_matches:
            bad.append((p, s, rep.h1_order))
    return CheckResult("prime-case-rank-and-h1", not bad, f"failures={bad or 'none'}")


def check_prime_case_ratio_stated() -> CheckResult:
    bad = []
    for p, s, lat in _prime_case_lattices():
        rep = prime_case_report(lat)
        if not rep.ratio_matches_stated:
            bad.append((p, s, str(rep.euler_ratio)))
    return CheckResult(
        "prime-case-euler-ratio-as-stated",
        not bad,
        f"ratio==p^s fails for {bad or 'none'}; expected failure: the consistent value "
        "is p^(p^s) = p^|H1|, checked by prime-case-euler-ratio-consistent",
    )


def check_prime_case_ratio_consistent() -> CheckResult:
    bad = []
    for p, s, lat in _prime_case_lattices():
        rep = prime_case_report(lat)
        if not rep.ratio_matches_prediction or rep.euler_ratio != Fraction(p ** rep.h1_order):
            bad.append((p, s, str(rep.euler_ratio)))
    return CheckResult("prime-case-euler-ratio-consistent", not bad, f"ratio==p^(p^s) failures={bad or 'none'}")


def _euler_lattices() -> list[CyclicAction]:
    names = [
        "paper3",
        "paper6",
        "sign",
        "gauss",
        "cyclotomic:2:2",
        "cyclotomic:3:1",
        "cyclotomic:2:3",
        "syzygy:4:2",
        "syzygy:6:2",
        "syzygy:6:1",
        "permutation:4:1",
        "permutation:6:2",
        "permutation:12:3",
    ]
    return [named_lattice(n) for n in names]


def check_euler_ratio(trials: int, seed: int) -> CheckResult:
    rng = random.Random(seed)
    lattices = _euler_lattices()
    for _ in range(trials):
        lattices.append(random_action(rng, rng.choice([2, 3, 4, 5, 6]), max_rank=4))
    bad = []
    for lat in lattices:
        page = build_e2(lat)
        k0 = -(-(lat.n + 1) // 2)  # ceil((n+1)/2), so 2k > n throughout
        for k in range(k0, k0 + 3):
            rep = euler_ratio_check(lat, k, page)
            if not rep.equal:
                bad.append((lat.label, k, str(rep.lhs), str(rep.rhs)))
    return CheckResult(
        "euler-order-ratio-identity",
        not bad,
        f"builtins + {trials} random actions, 3 window positions each; failures={bad or 'none'}",
    )


def check_hhat_permutation() -> CheckResult:
    bad = []
    for h in (1, 2, 3, 4, 6, 12):
        value = h_hat(permutation_lattice(12, h))
        if value != Fraction(h):
            bad.append((h, str(value)))
    return CheckResult("hhat-counts-stabilizer-order", not bad, f"h | 12 failures={bad or 'none'}")


def check_bar_oracle(trials: int, seed: int) -> CheckResult:
    rng = random.Random(seed)
    bad = []
    for t in range(trials):
        a = random_action(rng, rng.randint(1, 6), max_rank=3)
        for i in range(4):
            got = bar_oracle(a, i)
            want = group_cohomology(a, i).structure
            if got != want:
                bad.append((t, i, str(got), str(want)))
    return CheckResult("bar-oracle-equivalence", not bad, f"{trials} random lattices, degrees 0..3; failures={bad or 'none'}")


def check_leibniz(trials: int, seed: int, sign: int) -> CheckResult:
    rng = random.Random(seed)
    pool = [paper3_lattice(), paper6_lattice(), cyclotomic_lattice(3, 2), named_lattice("syzygy:6:1")]
    alphas = {id(a): compute_alpha(a, sign=sign) for a in pool}
    bad = 0
    for _ in range(trials):
        a = rng.choice(pool)
        alpha = alphas[id(a)]
        n = a.n
        p = rng.randint(0, n)
        q = rng.randint(0, n - p)
        iu = BasisIndexing(n, p)
        iv = BasisIndexing(n, q)
        u = {iu.position[s]: rng.randint(-2, 2) for s in iu.subsets}
        v = {iv.position[s]: rng.randint(-2, 2) for s in iv.subsets}
        if not _leibniz_holds(alpha, n, p, q, u, v):
            bad += 1
    return CheckResult("leibniz-law", bad == 0, f"{trials} random wedge pairs; failures={bad}")


def _wedge_product(n: int, p: int, q: int, u: dict[int, int], v: dict[int, int]) -> dict[int, int]:
    iu, iv, iw = BasisIndexing(n, p), BasisIndexing(n, q), BasisIndexing(n, p + q)
    out: dict[int, int] = {}
    for su, cu in u.items():
        if not cu:
            continue
        for sv, cv in v.items():
            if not cv:
                continue
            merged = iw.merge(iu.subsets[su], iv.subsets[sv])
            if merged is None:
                continue
            sgn, key = merged
            k = iw.position[key]
            w = out.get(k, 0) + sgn * cu * cv
            if w:
                out[k] = w
            elif k in out:
                del out[k]
    return out


def _apply(mat: IntegerMatrix, vec: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for j, c in vec.items():
        if not c:
            continue
        for i, w in mat._cols[j].items():
            t = out.get(i, 0) + c * w
            if t:
                out[i] = t
            elif i in out:
                del out[i]
    return out


def _leibniz_holds(alpha, n, p, q, u, v) -> bool:
    left = _apply(alpha.alpha_s_wedge(p + q), _wedge_product(n, p, q, u, v))
    term1 = _wedge_product(n, p + 1, q, _apply(alpha.alpha_s_wedge(p), u), v)
    term2 = _wedge_product(n, p, q + 1, u, _apply(alpha.alpha_s_wedge(q), v))
    right = dict(term1)
    sgn = -1 if p % 2 else 1
    for k, c in term2.items():
        w = right.get(k, 0) + sgn * c
        if w:
            right[k] = w
        elif k in right:
            del right[k]
    return left == right


def check_lift_independence(sign: int) -> CheckResult:
    bad = []
    for lat in [paper3_lattice(), paper6_lattice(), named_lattice("cyclotomic:2:2"), named_lattice("syzygy:6:2")]:
        up = compute_alpha(lat, sign=sign)
        down = compute_alpha(lat, sign=sign, descending_lift=True)
        if obstruction_nonzero(lat, up) != obstruction_nonzero(lat, down):
            bad.append((lat.label, "obstruction"))
            continue
        page = build_e2(lat)
        if d2(lat, page, up).maps != d2(lat, page, down).maps:
            bad.append((lat.label, "d2"))
    return CheckResult("lift-independence", not bad, f"failures={bad or 'none'}")


def check_d2_squared(seed: int, sign: int) -> CheckResult:
    rng = random.Random(seed)
    pool = [paper3_lattice(), paper6_lattice(), named_lattice("syzygy:6:1")]
    for _ in range(10):
        pool.append(random_action(rng, rng.choice([2, 3, 4, 6]), max_rank=4))
    bad = []
    for lat in pool:
        page = build_e2(lat)
        if not d2_squared_is_zero(d2(lat, page, compute_alpha(lat, sign=sign)), page):
            bad.append(lat.label)
    return CheckResult("d2-squared-is-zero", not bad, f"failures={bad or 'none'}")


def check_smith_bruteforce(trials: int, seed: int) -> CheckResult:
    from .intlinalg import cokernel_structure
    from .oracles import enumerate_cokernel_structure

    rng = random.Random(seed)
    done = 0
    bad = []
    attempts = 0
    while done < trials and attempts < trials * 60:
        attempts += 1
        r = rng.randint(1, 4)
        c = rng.randint(1, 5)
        m = IntegerMatrix.from_rows([[rng.randint(-5, 5) for _ in range(c)] for _ in range(r)], ncols=c)
        enumerated = enumerate_cokernel_structure(m, max_order=200)
        if enumerated is None:
            continue
        done += 1
        if cokernel_structure(m) != enumerated:
            bad.append(m.to_rows())
    return CheckResult(
        "smith-vs-enumeration-oracle",
        not bad and done == trials,
        f"{done} finite cokernels (order<=200) enumerated; failures={bad or 'none'}",
    )


def run_checks(
    *,
    sign: int = -1,
    corrupt: bool = False,
    seed: int = 2024,
    trials_corollary: int = 200,
    trials_euler: int = 50,
    trials_bar: int = 100,
    trials_wedges: int = 500,
    trials_smith: int = 30,
    family_size: int = len(PRIME_POWERS),
) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_main_example(sign, corrupt),
        lambda: check_main_example_collapse(sign, corrupt),
        lambda: check_counterexample(sign),
        lambda: check_tate_vanishing(family_size),
        lambda: check_free_collapse(sign, family_size),
        lambda: check_corollary_no_four(trials_corollary, seed, sign),
        check_prime_case_h1,
        check_prime_case_ratio_stated,
        check_prime_case_ratio_consistent,
        lambda: check_euler_ratio(trials_euler, seed + 1),
        check_hhat_permutation,
        lambda: check_bar_oracle(trials_bar, seed + 2),
        lambda: check_leibniz(trials_wedges, seed + 3, sign),
        lambda: check_lift_independence(sign),
        lambda: check_d2_squared(seed + 4, sign),
        lambda: check_smith_bruteforce(trials_smith, seed + 5),
    ]
    return [c() for c in checks]
