#!/usr/bin/env python3
"""Exhaustive active-set oracle for the p=2 two-obstacle problem in 1D.

For every assignment of interior nodes to {free, lower, upper} the KKT system
of the 3-point Laplacian is solved; the unique feasible point whose
multipliers have the right sign is the solution. Writes a field CSV.
"""
import argparse
import itertools
import sys

import numpy as np


def solve(n, x0, x1, f, psi, phi):
    h = (x1 - x0) / (n - 1)
    m = n - 2
    A = (np.diag(2.0 * np.ones(m)) - np.diag(np.ones(m - 1), 1) - np.diag(np.ones(m - 1), -1)) / h**2
    b = np.full(m, float(f)) if np.isscalar(f) else np.asarray(f, float)
    lo = np.full(m, float(psi)) if np.isscalar(psi) else np.asarray(psi, float)
    hi = np.full(m, float(phi)) if np.isscalar(phi) else np.asarray(phi, float)
    choices = [(0,) + ((1,) if np.isfinite(lo[i]) else ()) + ((2,) if np.isfinite(hi[i]) else ()) for i in range(m)]
    found = []
    for pattern in itertools.product(*choices):
        fixed = {i: (lo[i] if s == 1 else hi[i]) for i, s in enumerate(pattern) if s}
        free = [i for i in range(m) if i not in fixed]
        u = np.zeros(m)
        for i, v in fixed.items():
            u[i] = v
        if free:
            rhs = b[free] - A[np.ix_(free, list(fixed))] @ u[list(fixed)]
            u[free] = np.linalg.solve(A[np.ix_(free, free)], rhs)
        r = A @ u - b  # multiplier density
        ok = all(lo[i] - 1e-12 <= u[i] <= hi[i] + 1e-12 for i in range(m))
        for i, s in enumerate(pattern):
            ok = ok and ((s == 1 and r[i] >= -1e-9) or (s == 2 and r[i] <= 1e-9) or s == 0)
        if ok:
            found.append(u)
    if not found:
        sys.exit("no KKT point found")
    return np.concatenate(([0.0], found[0], [0.0])), h


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=9)
    ap.add_argument("--f", type=float, default=8.0)
    ap.add_argument("--psi", type=float, default=-np.inf)
    ap.add_argument("--phi", type=float, default=0.5)
    ap.add_argument("--out", default="-")
    a = ap.parse_args()
    u, h = solve(a.n, 0.0, 1.0, a.f, a.psi, a.phi)
    lines = ["x,value"]
    for i, v in enumerate(u):
        x = 1.0 if i == a.n - 1 else i * h
        lines.append(f"{x:.17g},{v:.17g}")
    text = "\n".join(lines) + "\n"
    if a.out == "-":
        sys.stdout.write(text)
    else:
        with open(a.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
