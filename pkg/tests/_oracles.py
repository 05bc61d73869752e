"""Independent reference implementations used only by the tests.

They are written for clarity, not speed: explicit index loops for the
cubic sums, Sylvester inertia via LDL^T for eigenvalue counts, and a
linear-response formula for the D-matrix.
"""

import numpy as np
import scipy.linalg


def S(n, j, k, l):
    return min(n, j, k, l) + 1


def naive_T(a):
    a = np.asarray(a, dtype=complex)
    N = a.shape[0]
    out = np.zeros(N, dtype=complex)
    for n in range(N):
        for j in range(N):
            for k in range(N):
                l = n + j - k
                if 0 <= l < N:
                    out[n] += S(n, j, k, l) * np.conj(a[j]) * a[k] * a[l]
    return out


def naive_rhs(a):
    N = len(a)
    return -1j * naive_T(a) / np.arange(1, N + 1)


def naive_H(a):
    a = np.asarray(a, dtype=complex)
    N = a.shape[0]
    h = 0.0 + 0.0j
    for n in range(N):
        for j in range(N):
            for k in range(N):
                l = n + j - k
                if 0 <= l < N:
                    h += S(n, j, k, l) * np.conj(a[n]) * np.conj(a[j]) * a[k] * a[l]
    return h


def naive_hessians(A, lam, omega):
    """Entrywise L+ and L- from the index formula."""
    N = len(A)
    Lp = np.zeros((N, N))
    Lm = np.zeros((N, N))
    for n in range(N):
        for j in range(N):
            for k in range(N):
                l = n + j - k
                if 0 <= l < N:
                    s = S(n, j, k, l)
                    Lp[n, k] += 2 * s * A[j] * A[l]
                    Lm[n, k] += 2 * s * A[j] * A[l]
                    Lp[n, j] += s * A[k] * A[l]
                    Lm[n, j] -= s * A[k] * A[l]
        Lp[n, n] -= (n + 1) * (lam - n * omega)
        Lm[n, n] -= (n + 1) * (lam - n * omega)
    return Lp, Lm


def negative_count(M, shift=0.0):
    """Number of eigenvalues of M below `shift`, by Sylvester's law on M - shift I = L D L^T."""
    _, d, _ = scipy.linalg.ldl(M - shift * np.eye(M.shape[0]))
    return int(np.sum(np.linalg.eigvalsh(d) < 0))


def bisection_eigs(M, tol=1e-13):
    """All eigenvalues of a symmetric M by bisection on inertia counts."""
    r = np.max(np.sum(np.abs(M), axis=1)) + 1.0
    N = M.shape[0]
    out = []
    for k in range(N):
        lo, hi = -r, r
        while hi - lo > tol * max(1.0, r):
            mid = 0.5 * (lo + hi)
            if negative_count(M, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)


def linear_response_D(A, lam, omega):
    """D = d(Q, Q - E)/d(lam, omega) of the two-parameter family, via L+ dA = -dR."""
    N = len(A)
    n = np.arange(N)
    Lp, _ = naive_hessians(A, lam, omega)
    dA_dlam = np.linalg.solve(Lp, (n + 1) * A)
    dA_domega = np.linalg.solve(Lp, -(n + 1) * n * A)
    w = n + 1
    dQ = [2 * np.sum(w * A * d) for d in (dA_dlam, dA_domega)]
    dE = [2 * np.sum(w * w * A * d) for d in (dA_dlam, dA_domega)]
    return np.array([dQ, [dQ[0] - dE[0], dQ[1] - dE[1]]])
