"""Compiled inner loops for the cubic interaction sums.

The coefficient min(n, j, k, l) + 1 is written as a sum of indicators
over shells r = 0, 1, ..., so that every shell reduces to a
self-convolution of the shifted sequence alpha[r:] followed by a
correlation with its conjugate.  This avoids evaluating the min in the
innermost loop and costs about N^3/2 multiply-adds per call.

All sums are truncated to indices in [0, N).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def cubic_sum(a):
    """T_n = sum_j sum_k S_{njkl} conj(a_j) a_k a_l with l = n + j - k."""
    N = a.shape[0]
    out = np.zeros_like(a)
    ac = np.conj(a)
    c = np.zeros(2 * N, dtype=a.dtype)
    for r in range(N):
        L = N - r
        for q in range(2 * L - 1):
            c[q] = 0
        for k in range(L):
            ak = a[r + k]
            c[2 * k] += ak * ak
            ak2 = 2 * ak
            for l in range(k + 1, L):
                c[k + l] += ak2 * a[r + l]
        for m in range(L):
            acc = c[0] * 0
            for j in range(L):
                acc += ac[r + j] * c[m + j]
            out[m + r] += acc
    return out


@njit(cache=True)
def trilinear_sum(x, y, z):
    """T_n(x, y, z) = sum_j sum_k S_{njkl} conj(x_j) y_k z_l, l = n + j - k."""
    N = x.shape[0]
    out = np.zeros(N, dtype=np.complex128)
    xc = np.conj(x)
    c = np.zeros(2 * N, dtype=np.complex128)
    for r in range(N):
        L = N - r
        for q in range(2 * L - 1):
            c[q] = 0
        for k in range(L):
            yk = y[r + k]
            for l in range(L):
                c[k + l] += yk * z[r + l]
        for m in range(L):
            acc = 0j
            for j in range(L):
                acc += xc[r + j] * c[m + j]
            out[m + r] += acc
    return out


@njit(cache=True)
def hessian_blocks(A):
    """Cubic parts of L+ and L- at a real amplitude vector A.

    Returns (P, M) with
        (P a)_n = sum S [2 A_j A_l a_k + A_k A_l a_j]
        (M a)_n = sum S [2 A_j A_l a_k - A_k A_l a_j]
    The diagonal -(n+1)(lambda - n omega) is added by the caller.
    """
    N = A.shape[0]
    P = np.zeros((N, N))
    M = np.zeros((N, N))
    for n in range(N):
        for j in range(N):
            kmin = max(0, n + j - N + 1)
            kmax = min(n + j, N - 1)
            for k in range(kmin, kmax + 1):
                l = n + j - k
                s = min(min(n, j), min(k, l)) + 1.0
                t1 = 2.0 * s * A[j] * A[l]
                t2 = s * A[k] * A[l]
                P[n, k] += t1
                M[n, k] += t1
                P[n, j] += t2
                M[n, j] -= t2
    return P, M


@njit(cache=True)
def _flow_rhs(a, inv_weight):
    return -1j * inv_weight * cubic_sum(a)


@njit(cache=True)
def rk4_flow(alpha0, dt, n_steps, stride, blowup):
    """Classical RK4 for i(n+1) d(alpha_n)/dt = T_n(alpha).

    Returns (snapshots, status); status is -1 on success or the index of
    the step at which max |alpha| exceeded `blowup`.
    """
    N = alpha0.shape[0]
    inv_weight = np.empty(N)
    for n in range(N):
        inv_weight[n] = 1.0 / (n + 1.0)
    n_snap = n_steps // stride + 1
    snaps = np.zeros((n_snap, N), dtype=np.complex128)
    a = alpha0.copy()
    snaps[0] = a
    s = 1
    for step in range(1, n_steps + 1):
        k1 = _flow_rhs(a, inv_weight)
        k2 = _flow_rhs(a + 0.5 * dt * k1, inv_weight)
        k3 = _flow_rhs(a + 0.5 * dt * k2, inv_weight)
        k4 = _flow_rhs(a + dt * k3, inv_weight)
        a = a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if np.max(np.abs(a)) > blowup:
            return snaps[:s], step
        if step % stride == 0:
            snaps[s] = a
            s += 1
    return snaps[:s], -1
