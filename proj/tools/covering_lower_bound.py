#!/usr/bin/env python3
"""Lower bound on the uncovered probability of ANY binary Hamming codebook with mass <= exp(nR).

Union bound per source type class, relaxed to a linear program over the number of codewords of
each output type. Used to check whether finite-n trends in `spherecover simulate` are achievable.
"""
import argparse
from math import comb, exp, floor

import numpy as np
from scipy.optimize import linprog


def lower_bound(n, R, D, p1, m1):
    radius = floor(n * D + 1e-9)
    prob = lambda k: (1 - p1) ** (n - k) * p1**k
    mass = lambda j: (1 - m1) ** (n - j) * m1**j if m1 is not None else 1.0
    # variables: codewords per output type (n+1), covered probability per source type (n+1)
    cost = np.concatenate([np.zeros(n + 1), -np.ones(n + 1)])
    rows, rhs = [], []
    for k in range(n + 1):
        row = np.zeros(2 * n + 2)
        row[n + 1 + k] = 1.0
        for j in range(n + 1):
            ball = sum(comb(j, a) * comb(n - j, k - a)
                       for a in range(min(j, k) + 1) if k - a <= n - j and (j - a) + (k - a) <= radius)
            row[j] -= ball * prob(k)
        rows.append(row)
        rhs.append(0.0)
    row = np.zeros(2 * n + 2)
    row[: n + 1] = [mass(j) for j in range(n + 1)]
    rows.append(row)
    rhs.append(exp(n * R))
    bounds = [(0, comb(n, j)) for j in range(n + 1)] + [(0, comb(n, k) * prob(k)) for k in range(n + 1)]
    res = linprog(cost, A_ub=np.array(rows), b_ub=rhs, bounds=bounds, method="highs")
    return max(0.0, 1.0 + res.fun)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p1", type=float, default=0.4, help="P(1)")
    ap.add_argument("--m1", type=float, default=0.4, help="M(1) with M(0) = 1 - M(1); omit mass with --counting")
    ap.add_argument("--counting", action="store_true")
    ap.add_argument("--D", type=float, default=0.3)
    ap.add_argument("--R", type=float, default=-0.625)
    ap.add_argument("--n", default="8,10,12,14")
    args = ap.parse_args()
    m1 = None if args.counting else args.m1
    print("n,radius,error_lower_bound")
    for n in map(int, args.n.split(",")):
        print(f"{n},{floor(n * args.D + 1e-9)},{lower_bound(n, args.R, args.D, args.p1, m1):.6f}")


if __name__ == "__main__":
    main()
