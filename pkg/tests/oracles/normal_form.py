"""Exact-rational third-order reduction at a bifurcation point (needs sympy).

Expands A = base + eps e_k + eps^2 b, omega = omega_* + eps^2 Omega and
solves the stationary system order by order.  Prints Omega as a fraction.
The frozen values in tests/test_solver.py come from running this script:

    python3 tests/oracles/normal_form.py
"""

from fractions import Fraction

import sympy as sp


def T(a, N):
    out = [0] * N
    for n in range(N):
        for j in range(N):
            for k in range(N):
                l = n + j - k
                if 0 <= l < N:
                    out[n] += (min(n, j, k, l) + 1) * a[j] * a[k] * a[l]
    return out


def omega2(base, k, omega_star, normalization, N):
    e, Om = sp.symbols("e Om")
    b = sp.symbols(f"b0:{N}")
    A = [sp.Integer(0)] * N
    A[base] = sp.Integer(1)
    A[k] += e
    A = [A[i] + (e**2 * b[i] if i != k else 0) for i in range(N)]
    w = sp.Rational(omega_star.numerator, omega_star.denominator) + e**2 * Om
    lam = 1 if normalization == "lambda" else 1 + w
    TT = T(A, N)
    R = [sp.expand(TT[n] - (n + 1) * (lam - n * w) * A[n]) for n in range(N)]
    eq2 = [r.coeff(e, 2) for r in R]
    sol = sp.solve([q for q in eq2 if q != 0], [x for i, x in enumerate(b) if i != k], dict=True)[0]
    eq3 = sp.expand(R[k].coeff(e, 3).subs(sol))
    eq3 = eq3.subs({x: 0 for x in eq3.free_symbols if x != Om})
    return sp.solve(eq3, Om)[0]


CASES = {
    "lowest 1/6 branch ii": (0, 2, Fraction(1, 6), "lambda", 12),
    "lowest 1/6 branch i": (0, 3, Fraction(1, 6), "lambda", 12),
    "second 3/35": (1, 6, Fraction(3, 35), "lambda-omega", 16),
    "second 1/15 branch ii": (1, 4, Fraction(1, 15), "lambda-omega", 16),
    "second 1/15 branch i": (1, 11, Fraction(1, 15), "lambda-omega", 23),
}

if __name__ == "__main__":
    for name, args in CASES.items():
        print(name, omega2(*args))
