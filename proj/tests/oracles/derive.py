#!/usr/bin/env python3
"""Independent reference values frozen into the C++ tests.

Nothing here shares code with the library: rates come from a generic conic solver,
exponents from one-dimensional grids, covering probabilities from brute-force enumeration.
"""
import itertools
from math import comb, exp, log, log2

import cvxpy as cp
import numpy as np


def rate(P, M, rho, D):
    """min I(X;Y) + E log M(Y) s.t. E rho <= D, as a convex program over the joint law."""
    P, M, rho = map(np.asarray, (P, M, rho))
    rho = rho[P > 0]  # letters of probability zero contribute nothing
    P = P[P > 0]
    nx, ny = rho.shape
    J = cp.Variable((nx, ny), nonneg=True)
    py = cp.sum(J, axis=0)
    outer = cp.reshape(P, (nx, 1), order="C") @ cp.reshape(py, (1, ny), order="C")
    obj = cp.sum(cp.rel_entr(J, outer)) + py @ np.log(M)
    cons = [cp.sum(J, axis=1) == P, cp.sum(cp.multiply(J, rho)) <= D]
    cp.Problem(cp.Minimize(obj), cons).solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12,
                                               tol_feas=1e-12)
    return obj.value


def kl(q, p):
    return sum(a * log(a / b) for a, b in zip(q, p) if a > 0)


def hb(x):
    return 0.0 if x in (0, 1) else -x * log(x) - (1 - x) * log(1 - x)


def main():
    ham = [[0, 1], [1, 0]]
    print("fig1 rate D=0.3:", repr(rate([0.6, 0.4], [0.6, 0.4], ham, 0.3)))
    tern_rho = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
    print("ternary rate D=0.4:", repr(rate([0.5, 0.3, 0.2], [1, 2, 0.5], tern_rho, 0.4)))
    rect_rho = [[0, 1], [1, 0], [0, 0.5]]
    for D in (0.05, 0.2):
        print(f"rectangular rate D={D}:", repr(rate([0.3, 0.3, 0.4], [1.0, 0.5], rect_rho, D)))
    # Source on a face of the simplex, where the optimal output law sits at a vertex.
    face_M = [1.2236372009673586, 0.570943259468641, 1.9967469288812856]
    ham3 = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    print("face source rate D=0.3:", repr(rate([0.3140219827033352, 0, 0.68597801729666485], face_M, ham3, 0.3)))

    # Binary example exponent: grid over Q = Bernoulli(t), rate by the conic solver on a coarse grid,
    # then the crossing by bisection in t on the side of P.
    def rate_t(t):
        return rate([1 - t, t], [0.6, 0.4], ham, 0.3)

    for r in (0.62, 0.625):
        ts = np.linspace(0.001, 0.4, 400)
        feas = [t for t in ts if rate_t(t) >= -r]
        t_hi = max(feas)
        lo, hi = t_hi, 0.4  # rate(lo) >= -r > rate(hi)
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if rate_t(mid) >= -r:
                lo = mid
            else:
                hi = mid
        print(f"fig1 exponent r={r}:", repr(kl([1 - lo, lo], [0.6, 0.4])), "at t =", lo)

    # Hoeffding: P0 = (0.5, 0.5), P1 = (0.2, 0.8), r = 0.05 bits; min H(Q||P1) s.t. H(Q||P0) <= r.
    r = 0.05 * log(2)
    qs = np.linspace(1e-7, 1 - 1e-7, 2_000_001)
    best = min(kl([1 - q, q], [0.2, 0.8]) for q in qs if kl([1 - q, q], [0.5, 0.5]) <= r)
    print("hoeffding r=0.05 bits:", repr(best))

    # Marton: P = (0.4, 0.6), Hamming, D = 0.1, R = 0.6 bits; R(D;Q) = h(q) - h(D) in nats.
    # At R = 0.6 bits the set is empty: sup_q h(q) - h(0.1) = 1 - h2(0.1) ~ 0.531 bits.
    print("marton sup R D=0.1 (bits):", repr(1 - (-0.1 * log2(0.1) - 0.9 * log2(0.9))))
    R = 0.52 * log(2)
    best = min(kl([1 - q, q], [0.4, 0.6]) for q in qs if hb(q) - hb(0.1) >= R)
    print("marton R=0.52 bits D=0.1:", repr(best))

    # Blowup n=4, P = (0.4, 0.6), codebook {0000, 1111}, D = 0.25.
    p = {0: 0.4, 1: 0.6}
    err = 0.0
    for x in itertools.product((0, 1), repeat=4):
        covered = any(sum(a != b for a, b in zip(x, y)) <= 1 for y in ((0,) * 4, (1,) * 4))
        if not covered:
            err += np.prod([p[a] for a in x])
    print("blowup n=4:", repr(err))

    # Exhaustive optimum n = 3, M = 1, D = 0, cap 4 strings: every subset of {0,1}^3.
    words = list(itertools.product((0, 1), repeat=3))
    atoms = {w: np.prod([p[a] for a in w]) for w in words}
    best = 1.0
    for mask in range(1 << 8):
        chosen = [w for i, w in enumerate(words) if mask >> i & 1]
        if len(chosen) <= 4:
            best = min(best, 1.0 - sum(atoms[w] for w in chosen))
    print("exhaustive n=3:", repr(best))


if __name__ == "__main__":
    main()
