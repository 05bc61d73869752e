"""Second variation of the action, inertia counts and the constrained index.

At a stationary state (A, lam, omega) the action

    K = H/2 - lam Q - omega (Q - E)

has Hessian blocks L+ (real directions) and L- (imaginary directions).  The
negative index of L+ restricted to the tangent space of {Q, E fixed} is

    n_c = n(L+) - p(D) - z(D),

with D the 2x2 matrix of derivatives of (Q, Q - E) along the two-parameter
family of stationary states.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .core import charge, hamiltonian, linear_energy
from .errors import IndeterminateIndex, NoConvergenceEig
from .families import NORMALIZATIONS

ZERO_TOL_REL = 1e-8
D_STEP = 1e-5


@dataclass(frozen=True)
class HessianPair:
    L_plus: np.ndarray
    L_minus: np.ndarray


def _diag(state):
    n = np.arange(state.truncation)
    return (n + 1) * (state.lam - n * state.omega)


def assemble_hessians(state):
    P, M = _kernels.hessian_blocks(np.ascontiguousarray(state.A, dtype=np.float64))
    d = np.diag(_diag(state))
    Lp, Lm = P - d, M - d
    Lp.setflags(write=False)
    Lm.setflags(write=False)
    return HessianPair(Lp, Lm)


def apply_hessians(state, a):
    """(L+ a, L- a) without forming the matrices."""
    A = np.ascontiguousarray(state.A, dtype=np.complex128)
    x = np.ascontiguousarray(a, dtype=np.complex128)
    t1 = 2.0 * _kernels.trilinear_sum(A, x, A)
    t2 = _kernels.trilinear_sum(x, A, A)
    lin = _diag(state) * x
    plus, minus = t1 + t2 - lin, t1 - t2 - lin
    if np.isrealobj(a):
        return plus.real, minus.real
    return plus, minus


def action_K(alpha, lam, omega):
    """K = H/2 - lam Q - omega (Q - E)."""
    Q = charge(alpha)
    return 0.5 * hamiltonian(alpha) - lam * Q - omega * (Q - linear_energy(alpha))


def sym_eigs(matrix, vectors=False, check=True):
    """Ascending eigenvalues of a real symmetric matrix (LAPACK tridiagonal QL/QR path)."""
    Mx = np.asarray(matrix, dtype=float)
    if Mx.ndim != 2 or Mx.shape[0] != Mx.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(Mx)))) if Mx.size else 1.0
    if np.max(np.abs(Mx - Mx.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    try:
        w, v = scipy.linalg.eigh(Mx, driver="ev")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NoConvergenceEig(str(exc)) from exc
    if check and Mx.size:
        resid = np.max(np.abs(Mx @ v - v * w))
        if resid > 1e-10 * scale:
            raise NoConvergenceEig(f"eigenpair residual {resid:.3e} too large")
    return (w, v) if vectors else w


def zero_threshold(matrix, rel=ZERO_TOL_REL):
    """rel * max(1, ||L||_inf)."""
    return rel * max(1.0, float(np.max(np.sum(np.abs(matrix), axis=1))))


def inertia(eigs, zero_tol):
    """(negative, zero, positive) counts; |x| < zero_tol counts as zero."""
    e = np.asarray(eigs, dtype=float)
    z = int(np.sum(np.abs(e) < zero_tol))
    n = int(np.sum(e <= -zero_tol))
    return n, z, e.size - n - z


def d_step(Omega, h_max=D_STEP, fraction=0.05):
    """Difference step for d_matrix that stays on the same side of the bifurcation point."""
    if Omega == 0:
        return h_max
    return min(h_max, fraction * abs(Omega))


def d_matrix(branch_fn, omega, h=D_STEP, normalization="lambda"):
    """D from Q_0(omega), E_0(omega) of the normalized branch and centered differences.

    `branch_fn(omega)` must return the normalized stationary state at that
    frequency.  With lambda = 1:

        D = [[Q0 - w Q0',              Q0'],
             [Q0 - E0 - w (Q0' - E0'), Q0' - E0']]

    and with lambda - omega = 1 the columns become
    (F - w F', -F + (1 + w) F') for F in {Q0, Q0 - E0}.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    s0, sp, sm = branch_fn(omega), branch_fn(omega + h), branch_fn(omega - h)
    Q0, E0 = s0.Q, s0.E
    dQ = (sp.Q - sm.Q) / (2 * h)
    dE = (sp.E - sm.E) / (2 * h)
    rows = []
    for F, dF in ((Q0, dQ), (Q0 - E0, dQ - dE)):
        if normalization == "lambda":
            rows.append([F - omega * dF, dF])
        else:
            rows.append([F - omega * dF, -F + (1 + omega) * dF])
    return np.array(rows)


def _gauge_removed(state, w, v, count=2):
    """Drop the `count` eigenpairs of L- closest to span{A, M A}."""
    n = np.arange(state.truncation)
    G = np.stack([state.A, (n + 1) * state.A], axis=1)
    Qb, _ = np.linalg.qr(G)
    overlap = np.sum((Qb.T @ v) ** 2, axis=0)
    drop = np.argsort(overlap)[::-1][:count]
    keep = np.setdiff1d(np.arange(w.size), drop)
    return w[keep]


CLASSES = ("constrained-minimizer", "constrained-maximizer", "saddle", "indeterminate", "unclassified")


@dataclass(frozen=True)
class SpectralReport:
    eigs_plus: np.ndarray
    eigs_minus: np.ndarray
    n_plus: int
    z_plus: int
    n_minus: int
    z_minus: int
    D: np.ndarray | None
    p_D: int | None
    z_D: int | None
    n_constrained: int | None
    classification: str
    zero_tol_plus: float
    zero_tol_minus: float
    eigs_minus_reduced: np.ndarray

    @property
    def eig_plus_min1(self):
        return float(self.eigs_plus[0])

    @property
    def eig_plus_min2(self):
        return float(self.eigs_plus[1])

    @property
    def eig_minus_min1(self):
        """Smallest L- eigenvalue once the two gauge directions are removed."""
        return float(self.eigs_minus_reduced[0])


def spectral_report(
    state,
    branch_fn=None,
    *,
    D=None,
    normalization="lambda",
    h=D_STEP,
    zero_tol_rel=ZERO_TOL_REL,
    strict=True,
):
    """Inertia of L+/L-, the D-matrix and the constrained classification.

    Pass either `branch_fn` (D is computed by finite differences at
    state.omega) or a precomputed `D`.  Without either, counts are filled in
    and the constrained quantities are left as None.  When L+ has a zero
    eigenvalue the index formula does not apply: strict mode raises
    IndeterminateIndex, otherwise the report is tagged 'indeterminate'.
    """
    H = assemble_hessians(state)
    wp = sym_eigs(H.L_plus)
    wm, vm = sym_eigs(H.L_minus, vectors=True)
    tp, tm = zero_threshold(H.L_plus, zero_tol_rel), zero_threshold(H.L_minus, zero_tol_rel)
    n_p, z_p, p_p = inertia(wp, tp)
    n_m, z_m, p_m = inertia(wm, tm)
    reduced = _gauge_removed(state, wm, vm)

    if D is None and branch_fn is not None:
        D = d_matrix(branch_fn, state.omega, h, normalization)
    p_D = z_D = n_D = n_c = None
    cls = "saddle" if D is not None else "unclassified"
    if D is not None:
        D = np.asarray(D, dtype=float)
        wd = np.linalg.eigvalsh(0.5 * (D + D.T))
        n_D, z_D, p_D = inertia(wd, zero_threshold(D, zero_tol_rel))
    if z_p > 0:
        if strict:
            raise IndeterminateIndex(f"L+ has {z_p} zero eigenvalue(s) below threshold {tp:.3e}")
        cls = "indeterminate"
    elif D is not None:
        n_c = n_p - p_D - z_D
        p_c = p_p - n_D - z_D
        if n_c == 0 and n_m == 0:
            cls = "constrained-minimizer"
        elif p_c == 0 and p_m == 0:
            cls = "constrained-maximizer"
    return SpectralReport(wp, wm, n_p, z_p, n_m, z_m, D, p_D, z_D, n_c, cls, tp, tm, reduced)
