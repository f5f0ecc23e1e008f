#!/usr/bin/env python3
"""Offline helper: build the bundled q-expansion datasets with PARI/GP.

For each square-free level N the script computes the subspace of
S_2(Gamma_0(N)) fixed by every Atkin-Lehner involution W_p (p | N), puts it
in echelon form h1 = q + O(q^3), h2 = q^2 + O(q^3) and writes the JSON
dataset consumed by `qstar derive-equation` / `qstar pipeline`.

Requires the `cypari` wheel (bundles libpari). Not used by the test suite.

    python3 tools/gen_datasets.py [--margin 24] [--out DIR] [N ...]
"""
import argparse
import json
import os
from fractions import Fraction

import cypari

pari = cypari.pari

LEVELS = [67, 73, 85, 93, 103, 106, 107, 115, 122, 129, 133, 134, 146, 154,
          158, 161, 165, 167, 170, 177, 186, 191, 205, 206, 209, 213, 215,
          221, 230, 266, 285, 286, 287, 299, 357, 390]


def sigma(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def primes_of(n):
    out, p = [], 2
    while n > 1:
        if n % p == 0:
            out.append(p)
            n //= p
        else:
            p += 1
    return out


def invariant_space(n):
    mf = pari(f"mfinit([{n},2],1)")
    dim = int(pari.mfdim(mf))
    basis = pari.matid(dim)
    for p in primes_of(n):
        mc = pari.mfatkininit(mf, p)[1]
        # restrict to the current subspace and keep the +1 eigenspace
        ker = pari.matker(mc * basis - basis)
        basis = basis * ker
    return mf, basis


def echelon(rows):
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(len(rows[0])):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def dataset(n, margin):
    precision = sigma(n) + margin
    mf, basis = invariant_space(n)
    if int(pari.matsize(basis)[1]) != 2:
        raise SystemExit(f"level {n}: invariant space is not 2-dimensional")
    coefs = pari.mfcoefs(mf, precision - 1) * basis
    rows = []
    for j in range(2):
        rows.append([Fraction(int(pari.numerator(coefs[i, j])), int(pari.denominator(coefs[i, j])))
                     for i in range(1, precision)])
    rows, pivots = echelon(rows)
    if pivots != [0, 1]:
        raise SystemExit(f"level {n}: unexpected pivots {pivots}")
    for row in rows:
        if any(v.denominator != 1 for v in row):
            raise SystemExit(f"level {n}: non-integral echelon basis")
    h1 = [str(v.numerator) for v in rows[0]]
    h2 = [str(v.numerator) for v in rows[1][1:]]
    return {"format": 1, "level": n, "precision": precision, "h1": h1, "h2": h2}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--margin", type=int, default=24)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data", "datasets"))
    ap.add_argument("levels", nargs="*", type=int)
    args = ap.parse_args()
    pari.allocatemem(4 * 10**9)
    os.makedirs(args.out, exist_ok=True)
    for n in args.levels or LEVELS:
        data = dataset(n, args.margin)
        path = os.path.join(args.out, f"{n}.json")
        with open(path, "w") as fh:
            json.dump(data, fh, separators=(",", ":"))
            fh.write("\n")
        print(f"{n}: precision {data['precision']} -> {path}")


if __name__ == "__main__":
    main()
