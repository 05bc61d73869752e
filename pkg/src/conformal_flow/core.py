"""Interaction coefficients, the truncated flow, conserved quantities and symmetries.

The cubic conformal flow for complex amplitudes alpha_n reads

    i (n+1) d(alpha_n)/dt = sum_j sum_k S_{njkl} conj(alpha_j) alpha_k alpha_l,

with l = n + j - k and S_{njkl} = min(n, j, k, l) + 1.  Everything here
works at a finite truncation N: all sums run over indices in [0, N) and
terms referencing an index >= N are dropped.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import TailOverflow

DEFAULT_N = 64
EVOLUTION_N = 32
TAIL_TOL = 1e-10


def _frozen(x, dtype):
    arr = np.array(x, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AmplitudeState:
    """Finite complex amplitude vector alpha_0, ..., alpha_{N-1}."""

    alpha: np.ndarray

    def __post_init__(self):
        alpha = _frozen(self.alpha, np.complex128)
        if alpha.ndim != 1 or alpha.size == 0:
            raise ValueError("alpha must be a non-empty 1-d vector")
        if not np.all(np.isfinite(alpha)):
            raise ValueError("alpha contains NaN or Inf")
        object.__setattr__(self, "alpha", alpha)

    @property
    def truncation(self):
        return self.alpha.shape[0]

    def __len__(self):
        return self.truncation


@dataclass(frozen=True)
class ConservedSet:
    H: float
    Q: float
    E: float
    Z: complex


def _as_alpha(state):
    if isinstance(state, AmplitudeState):
        return state.alpha
    return np.asarray(state, dtype=np.complex128)


def interaction_coeff(n, j, k, l):
    """S_{njkl} = min(n, j, k, l) + 1."""
    return min(n, j, k, l) + 1


def cubic_term(alpha):
    """The cubic sum T_n(alpha) on the right of the flow (complex or real input)."""
    a = np.asarray(alpha)
    if np.iscomplexobj(a):
        return _kernels.cubic_sum(np.ascontiguousarray(a, dtype=np.complex128))
    return _kernels.cubic_sum(np.ascontiguousarray(a, dtype=np.float64))


def mode_weights(N):
    """(n + 1) for n = 0..N-1, the diagonal of M = diag(1, 2, 3, ...)."""
    return np.arange(1, N + 1, dtype=float)


def flow_rhs(state):
    """d(alpha_n)/dt = -i/(n+1) T_n(alpha)."""
    alpha = _as_alpha(state)
    return -1j * cubic_term(alpha) / mode_weights(alpha.shape[0])


def hamiltonian(alpha):
    alpha = _as_alpha(alpha)
    return float(np.real(np.vdot(alpha, cubic_term(alpha))))


def charge(alpha):
    alpha = _as_alpha(alpha)
    return float(np.sum(mode_weights(alpha.shape[0]) * np.abs(alpha) ** 2))


def linear_energy(alpha):
    alpha = _as_alpha(alpha)
    return float(np.sum(mode_weights(alpha.shape[0]) ** 2 * np.abs(alpha) ** 2))


def z_quantity(alpha):
    """Z = sum (n+1)(n+2) conj(alpha_{n+1}) alpha_n."""
    alpha = _as_alpha(alpha)
    n = np.arange(alpha.shape[0] - 1)
    return complex(np.sum((n + 1) * (n + 2) * np.conj(alpha[1:]) * alpha[:-1]))


def conserved(state):
    alpha = _as_alpha(state)
    return ConservedSet(
        H=hamiltonian(alpha), Q=charge(alpha), E=linear_energy(alpha), Z=z_quantity(alpha)
    )


def apply_scaling(state, c):
    """alpha -> c alpha.  Time is rescaled by c^2, which callers track."""
    return AmplitudeState(c * _as_alpha(state))


def apply_global_phase(state, theta):
    return AmplitudeState(np.exp(1j * theta) * _as_alpha(state))


def apply_local_phase(state, phi):
    alpha = _as_alpha(state)
    n = np.arange(alpha.shape[0])
    return AmplitudeState(np.exp(1j * n * phi) * alpha)


def d_operator(N):
    """Matrix of [D alpha]_n = n alpha_{n-1} - (n+2) alpha_{n+1}, truncated to N modes."""
    n = np.arange(N, dtype=float)
    D = np.zeros((N, N))
    D[np.arange(1, N), np.arange(N - 1)] = n[1:]
    D[np.arange(N - 1), np.arange(1, N)] = -(n[:-1] + 2)
    return D


def apply_D(state):
    alpha = _as_alpha(state)
    out = np.zeros_like(alpha)
    n = np.arange(alpha.shape[0])
    out[1:] += n[1:] * alpha[:-1]
    out[:-1] -= (n[:-1] + 2) * alpha[1:]
    return out


def apply_expD(state, s, *, tail_tol=TAIL_TOL, max_abs_s=2.0):
    """Flow of d(alpha)/ds = D alpha for parameter s, by RK4 with ds <= 0.1/N.

    Raises TailOverflow when |alpha_{N-1}| exceeds `tail_tol` times the
    largest amplitude, i.e. when N modes cannot hold exp(sD) alpha.
    """
    alpha = _as_alpha(state).copy()
    N = alpha.shape[0]
    if abs(s) > max_abs_s:
        raise ValueError(f"|s| = {abs(s)} exceeds the configured bound {max_abs_s}")
    if s == 0:
        return AmplitudeState(alpha)
    D = d_operator(N)
    n_steps = int(np.ceil(abs(s) / (0.1 / N)))
    h = s / n_steps
    for _ in range(n_steps):
        k1 = D @ alpha
        k2 = D @ (alpha + 0.5 * h * k1)
        k3 = D @ (alpha + 0.5 * h * k2)
        k4 = D @ (alpha + h * k3)
        alpha = alpha + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    scale = np.max(np.abs(alpha))
    if np.abs(alpha[-1]) > tail_tol * scale:
        raise TailOverflow(
            f"tail |alpha_{N - 1}| = {np.abs(alpha[-1]):.3e} exceeds {tail_tol:g} x max amplitude"
        )
    return AmplitudeState(alpha)


def random_state(N, rng, charge_value=1.0, decay=0.4):
    """Random complex amplitudes with geometric envelope, rescaled to a given Q.

    The default decay keeps |alpha_{N-1}| near 1e-12 at N = 32, so the data
    are resolved by the truncation and Z is not spoiled by tail leakage.
    """
    envelope = decay ** np.arange(N)
    alpha = envelope * (rng.standard_normal(N) + 1j * rng.standard_normal(N))
    alpha *= np.sqrt(charge_value / charge(alpha))
    return AmplitudeState(alpha)
