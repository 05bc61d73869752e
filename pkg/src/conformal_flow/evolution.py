"""Time integration of the truncated flow, conservation audits and a stability probe."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .core import EVOLUTION_N, AmplitudeState, ConservedSet, _as_alpha, charge, conserved, hamiltonian, linear_energy, z_quantity
from .errors import BlowUp

BLOWUP = 1e6
GAUGE_GRID = 64


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    alphas: np.ndarray
    dt: float

    def __post_init__(self):
        if self.times.shape[0] != self.alphas.shape[0]:
            raise ValueError("times and snapshots differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return self.times.shape[0]

    @property
    def states(self):
        return [AmplitudeState(a) for a in self.alphas]

    @property
    def conserved(self):
        return [conserved(a) for a in self.alphas]

    @property
    def final(self):
        return AmplitudeState(self.alphas[-1])


def integrate(initial, T, dt, stride=None):
    """Classical RK4 with fixed step; dt is shrunk slightly so that T is hit exactly.

    Snapshots are kept every `stride` steps (default: about 1000 snapshots).
    """
    if dt <= 0 or T <= 0:
        raise ValueError("T and dt must be positive")
    alpha = np.ascontiguousarray(_as_alpha(initial), dtype=np.complex128)
    n_steps = int(np.ceil(T / dt - 1e-9))
    h = T / n_steps
    if stride is None:
        stride = max(1, n_steps // 1000)
    snaps, status = _kernels.rk4_flow(alpha, h, n_steps, int(stride), BLOWUP)
    if status >= 0:
        raise BlowUp(f"max |alpha| exceeded {BLOWUP:g} at t = {status * h:.6g}")
    times = np.arange(snaps.shape[0]) * stride * h
    snaps.setflags(write=False)
    return Trajectory(times, snaps, h)


@dataclass(frozen=True)
class Drift:
    H: float
    Q: float
    E: float
    Z: float

    def as_tuple(self):
        return (self.H, self.Q, self.E, self.Z)

    def max(self):
        return max(self.as_tuple())


def conservation_drift(traj):
    """Largest deviation of H, Q, E and |Z| from their initial values."""
    a = traj.alphas
    H = np.array([hamiltonian(x) for x in a])
    w = np.arange(1, a.shape[1] + 1)
    P = np.abs(a) ** 2
    Q = P @ w
    E = P @ (w * w)
    Z = np.abs(np.array([z_quantity(x) for x in a]))
    return Drift(*(float(np.max(np.abs(s - s[0]))) for s in (H, Q, E, Z)))


def _overlap(alpha, A, phi):
    n = np.arange(alpha.shape[0])
    c = np.conj(alpha) * A
    return np.exp(1j * np.outer(np.atleast_1d(phi), n)) @ c


def gauge_distance(state, reference):
    """min over (theta, phi) of || alpha - exp(i(theta + n phi)) A ||.

    theta is eliminated in closed form: for fixed phi the best theta is minus
    the argument of g(phi) = sum conj(alpha_n) A_n exp(i n phi).  |g| is scanned
    on a 64-point grid and refined by bounded Brent search.
    """
    alpha = _as_alpha(state)
    A = reference.A if hasattr(reference, "A") else np.asarray(reference)
    if alpha.shape[0] != A.shape[0]:
        raise ValueError("state and reference must share the truncation")
    grid = np.linspace(0.0, 2 * np.pi, GAUGE_GRID, endpoint=False)
    g = np.abs(_overlap(alpha, A, grid))
    k = int(np.argmax(g))
    width = 2 * np.pi / GAUGE_GRID
    res = minimize_scalar(
        lambda p: -abs(_overlap(alpha, A, p)[0]),
        bounds=(grid[k] - width, grid[k] + width),
        method="bounded",
        options={"xatol": 1e-12},
    )
    phi = res.x if -res.fun >= g[k] else grid[k]
    phi = _polish(alpha, A, phi)
    theta = -np.angle(_overlap(alpha, A, phi)[0])
    n = np.arange(A.shape[0])
    return float(np.linalg.norm(alpha - np.exp(1j * (theta + n * phi)) * A))


def _polish(alpha, A, phi, steps=5):
    """Newton on d|g|^2/dphi; the bounded search alone stalls near sqrt(eps)."""
    n = np.arange(A.shape[0])
    c = np.conj(alpha) * A
    for _ in range(steps):
        e = np.exp(1j * n * phi) * c
        g, g1, g2 = e.sum(), (1j * n * e).sum(), (-(n * n) * e).sum()
        d1 = 2 * np.real(np.conj(g) * g1)
        d2 = 2 * (abs(g1) ** 2 + np.real(np.conj(g) * g2))
        if d2 >= 0:
            break
        step = -d1 / d2
        if abs(step) > np.pi / GAUGE_GRID:
            break
        phi += step
    return phi


@dataclass(frozen=True)
class StabilityProbeReport:
    noise_amplitude: float
    horizon: float
    max_gauge_distance: float
    drift: tuple
    seed: int | None
    growth_rate: float
    initial_distance: float
    N: int
    dt: float


def stability_probe(reference, noise, T, seed=None, dt=5e-3, N=EVOLUTION_N, stride=None):
    """Perturb a stationary state by complex Gaussian noise of norm `noise` and track the orbit distance.

    `growth_rate` is the least-squares slope of log(distance) against time.
    """
    if noise < 0 or noise > 1e-2:
        raise ValueError("noise must lie in [0, 1e-2]")
    ref = reference.with_truncation(N) if reference.truncation != N else reference
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    alpha0 = ref.A.astype(complex)
    if noise > 0:
        alpha0 = alpha0 + noise * xi / np.linalg.norm(xi)
    traj = integrate(AmplitudeState(alpha0), T, dt, stride)
    dist = np.array([gauge_distance(a, ref) for a in traj.alphas])
    logd = np.log(np.maximum(dist, 1e-300))
    slope = float(np.polyfit(traj.times, logd, 1)[0]) if noise > 0 else 0.0
    drift = conservation_drift(traj).as_tuple()
    return StabilityProbeReport(
        float(noise), float(T), float(dist.max()), drift, seed, slope, float(dist[0]), N, traj.dt
    )
