"""Command-line front end.

    latcoh <command> [--input FILE | --builtin NAME] [--json] [options]

Commands: tate, e2, alpha1, d2, collapse, euler, verify.  Exit codes:
0 = success (and verdict true), 1 = a mathematical verdict came out false,
2 = usage or input error.  Every command accepts --json for schema-stable
machine output carrying the same verdicts as the human rendering.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from .alpha import compute_alpha, obstruction_nonzero, pairing_value
from .cohomology import operators, tate
from .errors import LatcohError, UsageError
from .glattice import (
    CyclicAction,
    action_from_dict,
    action_to_dict,
    dual,
    exterior_power,
    is_free_outside_origin,
    named_lattice,
    paper3_lattice,
    paper3_witness,
)
from .intlinalg import AbelianGroupStructure
from .lhs import build_e2, d2, euler_ratio_check
from . import verify as verify_mod

EXIT_OK = 0
EXIT_VERDICT_FALSE = 1
EXIT_USAGE = 2


def _load_action(args) -> CyclicAction:
    if bool(args.input) == bool(args.builtin):
        raise UsageError("exactly one of --input or --builtin is required")
    if args.builtin:
        return named_lattice(args.builtin)
    path = args.input
    try:
        if path.endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib

            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        else:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    except ValueError as exc:
        raise UsageError(f"cannot parse {path}: {exc}")
    return action_from_dict(data)


def _digest(a: CyclicAction) -> str:
    canonical = json.dumps(action_to_dict(a), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _structure_dict(s: AbelianGroupStructure) -> dict:
    return {"free_rank": s.free_rank, "torsion": list(s.torsion)}


def _report(command: str, a: Optional[CyclicAction], payload: dict, status: str) -> dict:
    rep = {"command": command, "payload": payload, "status": status}
    if a is not None:
        rep["input"] = action_to_dict(a)
        rep["input_digest"] = _digest(a)
    return rep


def _emit(rep: dict, as_json: bool, human: str) -> None:
    if as_json:
        print(json.dumps(rep, indent=2, sort_keys=True))
    else:
        print(human)


def _frac(f: Fraction) -> str:
    return str(f)


def cmd_tate(args) -> int:
    a = _load_action(args)
    jmax = a.n if args.jmax is None else min(args.jmax, a.n)
    free = is_free_outside_origin(a)
    d = dual(a)
    rows = []
    violations = []
    for j in range(jmax + 1):
        coeff = exterior_power(d, j)
        ops = operators(coeff)
        t0 = tate(coeff, 0, ops).structure
        t1 = tate(coeff, 1, ops).structure
        rows.append({"j": j, "tate0": _structure_dict(t0), "tate1": _structure_dict(t1)})
        if free:
            for i, s in ((0, t0), (1, t1)):
                if (i + j) % 2 and not s.is_trivial():
                    violations.append({"i": i, "j": j})
    payload = {"free_outside_origin": free, "rows": rows, "vanishing_violations": violations}
    status = "ok" if not violations else "verdict-false"
    lines = [f"Tate cohomology of exterior powers of the dual lattice (rank {a.n}, m={a.m})"]
    lines.append(f"free outside origin: {free}")
    lines.append(f"{'j':>3}  {'Tate^0':<18} {'Tate^1':<18}")
    for j, row in enumerate(rows):
        t0 = AbelianGroupStructure(row["tate0"]["free_rank"], tuple(row["tate0"]["torsion"]))
        t1 = AbelianGroupStructure(row["tate1"]["free_rank"], tuple(row["tate1"]["torsion"]))
        lines.append(f"{j:>3}  {str(t0):<18} {str(t1):<18}")
    if free:
        lines.append("vanishing violations: " + (str(violations) if violations else "none"))
    _emit(_report("tate", a, payload, status), args.json, "\n".join(lines))
    return EXIT_OK if not violations else EXIT_VERDICT_FALSE


def cmd_e2(args) -> int:
    a = _load_action(args)
    page = build_e2(a, args.imax)
    cells = []
    for j in range(a.n + 1):
        for i in range(args.imax + 1):
            s = page.cell(i, j).structure
            cells.append({"i": i, "j": j, **_structure_dict(s)})
    payload = {"i_max": args.imax, "cells": cells}
    lines = [f"Second page for {a.label or 'lattice'} (rank {a.n}, m={a.m}); rows j, columns i"]
    header = "  j\\i " + "".join(f"{i:>14}" for i in range(args.imax + 1))
    lines.append(header)
    for j in range(a.n, -1, -1):
        row = f"{j:>5} " + "".join(f"{str(page.cell(i, j).structure):>14}" for i in range(args.imax + 1))
        lines.append(row)
    _emit(_report("e2", a, payload, "ok"), args.json, "\n".join(lines))
    return EXIT_OK


def cmd_alpha1(args) -> int:
    a = _load_action(args)
    alpha = compute_alpha(a)
    nonzero = obstruction_nonzero(a, alpha)
    pairing = None
    if a.action == paper3_lattice().action and a.m == 4:
        pairing = pairing_value(a, paper3_witness(), alpha)
    payload = {
        "delta": alpha.delta.to_rows(),
        "alpha1_wedge": alpha.alpha1_wedge.to_rows(),
        "obstruction_nonzero": nonzero,
        "pairing_with_bundled_witness": pairing,
    }
    lines = [f"First obstruction data for {a.label or 'lattice'} (rank {a.n}, m={a.m})"]
    lines.append(f"delta (L -> Λ²L, columns are generator images): {alpha.delta.to_rows()}")
    lines.append(f"alpha1 wedge form (= -delta): {alpha.alpha1_wedge.to_rows()}")
    lines.append("[alpha_1] != 0" if nonzero else "[alpha_1] = 0")
    if pairing is not None:
        lines.append(f"pairing with bundled witness: {pairing} mod {a.m}")
    _emit(_report("alpha1", a, payload, "ok"), args.json, "\n".join(lines))
    return EXIT_OK


def _d2_payload(a: CyclicAction) -> tuple[dict, bool]:
    page = build_e2(a)
    report = d2(a, page)
    maps = []
    for (r, s), mat in sorted(report.maps.items()):
        maps.append(
            {
                "r": r,
                "s": s,
                "source": [r, s + 1],
                "target": [r + 2, s],
                "source_moduli": list(page.presentation(r, s + 1).coord_moduli),
                "target_moduli": list(page.presentation(r + 2, s).coord_moduli),
                "matrix": mat.to_rows(),
            }
        )
    payload = {
        "all_zero": report.all_zero,
        "witnesses": [list(w) for w in report.witnesses],
        "maps": maps,
    }
    return payload, report.all_zero


def cmd_d2(args) -> int:
    a = _load_action(args)
    payload, _ = _d2_payload(a)
    lines = [f"Second differential for {a.label or 'lattice'} (rank {a.n}, m={a.m})"]
    lines.append(f"all matrices zero: {payload['all_zero']}")
    if payload["witnesses"]:
        lines.append(f"nonzero at (r, s, column): {payload['witnesses']}")
        for entry in payload["maps"]:
            if any(any(row) for row in entry["matrix"]):
                lines.append(
                    f"  map ({entry['source']}) -> ({entry['target']}): {entry['matrix']}"
                    f"  target moduli {entry['target_moduli']}"
                )
    _emit(_report("d2", a, payload, "ok"), args.json, "\n".join(lines))
    return EXIT_OK


def cmd_collapse(args) -> int:
    a = _load_action(args)
    payload, all_zero = _d2_payload(a)
    status = "ok" if all_zero else "verdict-false"
    lines = [f"collapse at the second differential: {all_zero}"]
    if not all_zero:
        lines.append(f"witness bidegrees (r, s, column): {payload['witnesses']}")
    _emit(_report("collapse", a, {"all_zero": all_zero, "witnesses": payload["witnesses"]}, status), args.json, "\n".join(lines))
    return EXIT_OK if all_zero else EXIT_VERDICT_FALSE


def cmd_euler(args) -> int:
    a = _load_action(args)
    k = args.k if args.k is not None else -(-(a.n + 1) // 2)
    rep = euler_ratio_check(a, k)
    payload = {"k": k, "lhs": _frac(rep.lhs), "rhs": _frac(rep.rhs), "equal": rep.equal}
    status = "ok" if rep.equal else "verdict-false"
    mark = "==" if rep.equal else "!="
    human = f"k={k}: page-order product {rep.lhs} {mark} {rep.rhs} alternating Tate-ratio product"
    _emit(_report("euler", a, payload, status), args.json, human)
    return EXIT_OK if rep.equal else EXIT_VERDICT_FALSE


def cmd_verify(args) -> int:
    kwargs = {}
    if args.trials is not None:
        kwargs = dict(
            trials_corollary=min(200, args.trials),
            trials_euler=min(50, args.trials),
            trials_bar=min(100, args.trials),
            trials_wedges=min(500, args.trials * 5),
            trials_smith=min(30, args.trials),
            family_size=min(7, max(2, args.trials)),
        )
    results = verify_mod.run_checks(
        sign=1 if args.flip_sign else -1,
        corrupt=args.corrupt,
        seed=args.seed,
        **kwargs,
    )
    payload = [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results]
    failures = [r for r in results if not r.ok]
    lines = [f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    lines.append(f"{len(results) - len(failures)}/{len(results)} checks passed")
    rep = {"command": "verify", "payload": payload, "status": "ok" if not failures else "verdict-false"}
    _emit(rep, args.json, "\n".join(lines))
    return EXIT_OK if not failures else EXIT_VERDICT_FALSE


def _add_lattice_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="lattice spec file (.json or .toml with keys m, matrix, label)")
    p.add_argument(
        "--builtin",
        help="named lattice: paper3, paper6, sign, gauss, cyclotomic:p:r, syzygy:m:d, permutation:m:h",
    )
    p.add_argument("--json", action="store_true", help="emit the machine-readable report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latcoh", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--word-cap", type=int, default=None, help="free-word length cap (default 10^6)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tate", help="Tate table of the exterior powers of the dual lattice")
    _add_lattice_args(p)
    p.add_argument("--jmax", type=int, default=None)
    p.set_defaults(func=cmd_tate)

    p = sub.add_parser("e2", help="second page of the spectral sequence")
    _add_lattice_args(p)
    p.add_argument("--imax", type=int, default=4)
    p.set_defaults(func=cmd_e2)

    p = sub.add_parser("alpha1", help="first obstruction map and verdict")
    _add_lattice_args(p)
    p.set_defaults(func=cmd_alpha1)

    p = sub.add_parser("d2", help="all second-differential matrices")
    _add_lattice_args(p)
    p.set_defaults(func=cmd_d2)

    p = sub.add_parser("collapse", help="does the second differential vanish identically? (exit 1 if not)")
    _add_lattice_args(p)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("euler", help="order-ratio identity check at a window position k")
    _add_lattice_args(p)
    p.add_argument("--k", type=int, default=None, help="window position; needs 2k > rank (default: smallest such k)")
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("verify", help="run the bundled verification suite")
    p.add_argument("--json", action="store_true")
    p.add_argument("--flip-sign", action="store_true", help="re-run under the flipped obstruction sign convention")
    p.add_argument("--corrupt", action="store_true", help="sabotage the rank-3 builtin (the suite must notice)")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--trials", type=int, default=None, help="cap the randomized trial counts (default: full counts)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.word_cap is not None:
        if args.word_cap < 1:
            print("latcoh: --word-cap must be positive", file=sys.stderr)
            return EXIT_USAGE
        os.environ["LATCOH_WORD_CAP"] = str(args.word_cap)
    try:
        return args.func(args)
    except LatcohError as exc:
        print(f"latcoh: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
