"""Exact stationary families and the stationary residual.

A stationary state alpha_n(t) = A_n exp(-i lam t + i n omega t) with real
A solves

    (n+1)(lam - n omega) A_n = sum_j sum_k S_{njkl} A_j A_k A_l.

Every constructor below returns a StationaryState at truncation N whose
residual is at rounding level once p^N is negligible.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_N, TAIL_TOL, AmplitudeState, _frozen, charge, cubic_term, hamiltonian, linear_energy
from .errors import DomainError, IndexOutOfRange

PAIR_P_MAX = 2.0 - np.sqrt(3.0)

NORMALIZATIONS = ("lambda", "lambda-omega")


@dataclass(frozen=True)
class StationaryState:
    A: np.ndarray
    lam: float
    omega: float
    tail_warning: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        A = _frozen(self.A, np.float64)
        if A.ndim != 1 or A.size == 0:
            raise ValueError("A must be a non-empty 1-d vector")
        if not np.all(np.isfinite(A)):
            raise ValueError("A contains NaN or Inf")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def truncation(self):
        return self.A.shape[0]

    def amplitudes(self, t=0.0):
        """alpha_n(t) = A_n exp(-i lam t + i n omega t)."""
        n = np.arange(self.truncation)
        return AmplitudeState(self.A * np.exp(-1j * self.lam * t + 1j * n * self.omega * t))

    def scaled(self, c):
        """Image under the scaling symmetry: (cA, c^2 lam, c^2 omega)."""
        return StationaryState(c * self.A, c * c * self.lam, c * c * self.omega, self.tail_warning, self.label)

    def with_truncation(self, N):
        A = np.zeros(N)
        m = min(N, self.truncation)
        A[:m] = self.A[:m]
        return StationaryState(A, self.lam, self.omega, self.tail_warning, self.label)

    @property
    def Q(self):
        return charge(self.A)

    @property
    def E(self):
        return linear_energy(self.A)


@dataclass(frozen=True)
class InvariantManifoldParams:
    """Parameters of A_n = (beta + gamma n) p^n."""

    p: float
    beta: float
    gamma: float

    @property
    def y(self):
        return self.p**2 / (1.0 - self.p**2)

    def amplitudes(self, N):
        n = np.arange(N)
        return (self.beta + self.gamma * n) * self.p**n


def _tail_flag(A, tail_tol=TAIL_TOL):
    scale = np.max(np.abs(A))
    return bool(scale > 0 and abs(A[-1]) > tail_tol * scale)


def _check_p(p, open_left=True):
    if not (0.0 < p < 1.0 if open_left else 0.0 <= p < 1.0):
        raise DomainError(f"p = {p} must lie in {'(0, 1)' if open_left else '[0, 1)'}")


def stationary_residual(state):
    """R_n = sum S A_j A_k A_l - (n+1)(lam - n omega) A_n."""
    A = state.A
    n = np.arange(A.shape[0])
    return cubic_term(A) - (n + 1) * (state.lam - n * state.omega) * A


def residual_norm(state):
    return float(np.max(np.abs(stationary_residual(state))))


def z_constraint(A):
    """sum (n+1)(n+2) A_n A_{n+1}; must vanish for stationary states with omega != 0."""
    A = np.asarray(A, dtype=float)
    n = np.arange(A.shape[0] - 1)
    return float(np.sum((n + 1) * (n + 2) * A[:-1] * A[1:]))


def normalize(state, normalization="lambda"):
    """Rescale so that lam = 1 ('lambda') or lam - omega = 1 ('lambda-omega')."""
    if normalization == "lambda":
        level = state.lam
    elif normalization == "lambda-omega":
        level = state.lam - state.omega
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    if level <= 0:
        raise DomainError(f"cannot normalize: {normalization} level is {level}")
    return state.scaled(1.0 / np.sqrt(level))


def single_mode(mode, c=1.0, omega=0.0, N=DEFAULT_N):
    if not 0 <= mode < N:
        raise IndexOutOfRange(f"mode {mode} outside truncation N = {N}")
    A = np.zeros(N)
    A[mode] = c
    return StationaryState(A, mode * omega + c * c, omega, label=f"single-mode {mode}")


def ground_state(p, c=None, N=DEFAULT_N):
    """A_n = c p^n, lam = c^2/(1-p^2)^2, omega = 0.  Default c = 1 - p^2 gives lam = 1."""
    _check_p(p, open_left=False)
    if c is None:
        c = 1.0 - p * p
    A = c * p ** np.arange(N)
    return StationaryState(A, c * c / (1 - p * p) ** 2, 0.0, _tail_flag(A), "ground")


def twisted_state(p, c=None, N=DEFAULT_N):
    """A_n = c p^(n-1) ((1-p^2) n - 2p^2), lam = c^2/(1-p^2)^2, omega = 0."""
    _check_p(p)
    if c is None:
        c = 1.0 - p * p
    n = np.arange(N)
    A = c * ((1 - p * p) * n * p ** (n - 1.0) - 2.0 * p ** (n + 1.0))
    return StationaryState(A, c * c / (1 - p * p) ** 2, 0.0, _tail_flag(A), "twisted")


def pair_params(p, c=1.0, sign=+1):
    """(beta, gamma, omega, lam) of the pair family; sign +1 upper, -1 lower."""
    sign = _sign(sign)
    if not 0.0 < p:
        raise DomainError(f"p = {p} must be positive")
    disc = 1 - 14 * p**2 + p**4
    if disc <= 0 or p >= PAIR_P_MAX:
        raise DomainError(f"p = {p} outside (0, 2 - sqrt(3)): 1 - 14p^2 + p^4 = {disc:.3e}")
    root = np.sqrt(disc)
    q = 1 - p * p
    gamma = c * q
    beta = -0.5 * c * (1 + 5 * p * p + sign * root)
    omega = c * c / 12 * (1 + p * p + sign * root) / q
    lam = c * c / 6 * ((3 - 4 * p * p) / q + sign * (3 + 4 * p * p) * root / q**2)
    return beta, gamma, omega, lam


def _sign(sign):
    if sign in (+1, "+", "plus", "upper"):
        return +1
    if sign in (-1, "-", "minus", "lower"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def pair_state(p, c=1.0, sign=+1, N=DEFAULT_N):
    """A_n = (beta + gamma n) p^n with omega != 0; exists for 0 < p < 2 - sqrt(3)."""
    s = _sign(sign)
    beta, gamma, omega, lam = pair_params(p, c, s)
    A = InvariantManifoldParams(p, beta, gamma).amplitudes(N)
    return StationaryState(A, lam, omega, _tail_flag(A), "pair+" if s > 0 else "pair-")


def blaschke_state(p, N=DEFAULT_N):
    """One-factor Blaschke product: A_0 = -p, A_n = (1-p^2) p^(n-1) for n >= 1."""
    _check_p(p)
    n = np.arange(N)
    A = (1 - p * p) * p ** (n - 1.0)
    A[0] = -p
    return StationaryState(A, 1.0, 0.0, _tail_flag(A), "blaschke")


def alternating_state(p, c=None, N=DEFAULT_N):
    """A_n = c p^(n-1) on odd n, 0 on even n; lam = c^2/(1-p^4)^2."""
    _check_p(p)
    if c is None:
        c = 1.0 - p**4
    n = np.arange(N)
    A = np.where(n % 2 == 1, c * p ** (n - 1.0), 0.0)
    return StationaryState(A, c * c / (1 - p**4) ** 2, 0.0, _tail_flag(A), "alternating")


def pair_state_normalized(p, sign=+1, N=DEFAULT_N):
    """Pair state scaled to lam = 1 (upper) or lam - omega = 1 (lower).

    The amplitude sign is chosen so that the dominant base mode (A_0 for the
    upper branch, A_1 for the lower) is positive.
    """
    s = _sign(sign)
    state = normalize(pair_state(p, 1.0, s, N), "lambda" if s > 0 else "lambda-omega")
    base = 0 if s > 0 else 1
    if state.A[base] < 0:
        state = state.scaled(-1.0)
    return state


def verify_families(N=DEFAULT_N):
    """Residual table for the standard parameter set; one dict per constructed state."""
    cases = [("ground", p) for p in (0.1, 0.3, 0.6)]
    cases += [("twisted", p) for p in (0.1, 0.3)]
    cases += [("pair+", p) for p in (0.05, 0.15, 0.25)]
    cases += [("pair-", p) for p in (0.05, 0.15, 0.25)]
    cases += [("blaschke", 0.3), ("alternating", 0.3)]
    return [family_row(name, p, N) for name, p in cases]


FAMILY_BUILDERS = {
    "ground": lambda p, N: ground_state(p, N=N),
    "twisted": lambda p, N: twisted_state(p, N=N),
    "pair+": lambda p, N: pair_state(p, 1.0, +1, N),
    "pair-": lambda p, N: pair_state(p, 1.0, -1, N),
    "blaschke": lambda p, N: blaschke_state(p, N),
    "alternating": lambda p, N: alternating_state(p, N=N),
}


def family_row(name, p, N=DEFAULT_N):
    state = FAMILY_BUILDERS[name](p, N)
    return {
        "family": name,
        "p": p,
        "N": N,
        "residual": residual_norm(state),
        "Q": state.Q,
        "E": state.E,
        "H": hamiltonian(state.A),
        "lam": state.lam,
        "omega": state.omega,
        "tail_warning": state.tail_warning,
    }
