#!/usr/bin/env python3
"""Solve exported LP models with an external MILP solver and compare the
optimum with the exact branch-and-bound objective.

Uses scipy.optimize.milp (HiGHS). Usage:

    cargo build --release
    python3 scripts/verify_lp.py --bin target/release/dirgroup

Exit status is 0 when every instance agrees within the tolerance.
"""

import argparse
import csv
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix


def parse_terms(tokens):
    terms, sign, coef = [], 1.0, None
    for tok in tokens:
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
            continue
        try:
            coef = float(tok)
        except ValueError:
            terms.append((sign * (1.0 if coef is None else coef), tok))
            sign, coef = 1.0, None
    return terms


def parse_lp(text):
    section, pending = None, []
    objective, rows, free, binary = [], [], set(), set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Maximize", "Subject To", "Bounds", "Binary", "End"):
            section = line
            continue
        if section == "Maximize":
            objective = parse_terms(line.split(":", 1)[1].split())
        elif section == "Subject To":
            pending += line.split()
            if len(pending) >= 2 and pending[-2] in ("<=", ">=", "="):
                rows.append((pending[0].rstrip(":"), parse_terms(pending[1:-2]), pending[-2], float(pending[-1])))
                pending = []
        elif section == "Bounds":
            free.add(line.split()[0])
        elif section == "Binary":
            binary.add(line)
    return objective, rows, free, binary


def solve(path):
    objective, rows, free, binary = parse_lp(Path(path).read_text())
    names = sorted({v for _, terms, _, _ in rows for _, v in terms} | {v for _, v in objective} | free | binary)
    index = {n: i for i, n in enumerate(names)}
    c = np.zeros(len(names))
    for coef, var in objective:
        c[index[var]] = -coef
    a = lil_matrix((len(rows), len(names)))
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for r, (_, terms, sense, rhs) in enumerate(rows):
        for coef, var in terms:
            a[r, index[var]] += coef
        if sense in ("<=", "="):
            hi[r] = rhs
        if sense in (">=", "="):
            lo[r] = rhs
    lower = np.array([-np.inf if n in free else 0.0 for n in names])
    upper = np.array([1.0 if n in binary else np.inf for n in names])
    integrality = np.array([1 if n in binary else 0 for n in names])
    res = milp(
        c,
        constraints=LinearConstraint(a.tocsr(), lo, hi),
        bounds=Bounds(lower, upper),
        integrality=integrality,
        options={"mip_rel_gap": 0.0, "time_limit": 600.0},
    )
    if res.status != 0:
        return None, res.message
    # Integrality is only enforced to a tolerance, which the 2π big-M rows
    # amplify; fix the rounded binaries and re-solve the continuous part.
    fixed = np.round(res.x)
    lower = np.where(integrality == 1, fixed, lower)
    upper = np.where(integrality == 1, fixed, upper)
    res = milp(c, constraints=LinearConstraint(a.tocsr(), lo, hi), bounds=Bounds(lower, upper))
    if res.status != 0:
        return None, res.message
    return -res.fun, res.message


def run(bin_path, *args):
    subprocess.run([bin_path, *map(str, args)], check=True, stderr=subprocess.DEVNULL)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--bin", default="target/release/dirgroup")
    ap.add_argument("--nodes", type=int, nargs="+", default=[5, 6, 7])
    ap.add_argument("--groups", type=int, default=2)
    ap.add_argument("--pilots", type=int, default=4)
    ap.add_argument("--instances", type=int, default=1)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--tolerance", type=float, default=1e-6)
    ap.add_argument("--verbatim", action="store_true", help="also solve the verbatim formulation")
    args = ap.parse_args()

    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        nodes = ",".join(map(str, args.nodes))
        run(args.bin, "generate", "--nodes", nodes, "--instances", args.instances, "--seed", args.seed, "--out", tmp / "inst")
        run(args.bin, "evaluate", tmp / "inst", "--methods", "exact", "--groups", args.groups, "--pilots", args.pilots,
            "--timeout", 0, "--out", tmp / "res")
        with open(tmp / "res" / "results.csv", newline="") as f:
            exact = {row["instance"]: float(row["objective_b"]) for row in csv.DictReader(f)}
        for name, b_exact in sorted(exact.items()):
            lp = tmp / (name + ".lp")
            run(args.bin, "export-lp", tmp / "inst" / name, "--groups", args.groups, "--pilots", args.pilots, "--out", lp)
            b_ext, msg = solve(lp)
            ok = b_ext is not None and abs(b_ext - b_exact) <= args.tolerance
            failures += not ok
            line = f"{'PASS' if ok else 'FAIL'} {name}: exact B = {b_exact:.12f}, external B = {b_ext}"
            if args.verbatim:
                vlp = tmp / (name + ".verbatim.lp")
                run(args.bin, "export-lp", tmp / "inst" / name, "--groups", args.groups, "--pilots", args.pilots,
                    "--verbatim", "--out", vlp)
                b_verb, vmsg = solve(vlp)
                line += f", verbatim B = {b_verb if b_verb is not None else vmsg}"
            print(line, flush=True)
    print(f"{len(exact) - failures}/{len(exact)} instances agree within {args.tolerance:g}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
