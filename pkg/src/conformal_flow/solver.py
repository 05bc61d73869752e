"""Newton refinement, continuation and bifurcation analysis of stationary states.

Branches are parameterized by linear amplitude pins (for instance a_4 = eps)
with the frequency omega as an extra unknown.  lambda is tied to omega by the
normalization: lambda = 1 on the lowest-mode branches, lambda - omega = 1 on
the second-mode branches.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import _kernels
from .core import DEFAULT_N, TAIL_TOL
from .errors import NoConvergence, SingularJacobian, TruncationTooSmall, UnknownBranch
from .families import NORMALIZATIONS, StationaryState, stationary_residual

NEWTON_TOL = 1e-12
LSQ_TOL = 1e-10
MAX_ITER = 50
COND_MAX = 1e14

BASE_MODES = ("lowest", "second")
BRANCH_IDS = ("i", "ii", "iii", "unique")

# ---------------------------------------------------------------- bifurcation catalogs


@dataclass(frozen=True)
class BifurcationPoint:
    m: int
    omega: Fraction
    partner: int | None = None

    @property
    def double(self):
        return self.partner is not None

    @property
    def value(self):
        return float(self.omega)


def lowest_omega(m):
    if m < 1:
        raise ValueError("m must be >= 1")
    return Fraction(m - 1, m * (m + 1))


def second_omega(m):
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return Fraction(0)
    if m == 2:
        return Fraction(2, 3)
    return Fraction(m - 3, m * m - 1)


def _lowest_partner(m):
    # (m-1)/(m(m+1)) = (n-1)/(n(n+1)) has the second root n = (m+1)/(m-1)
    if m < 2:
        return None
    n = Fraction(m + 1, m - 1)
    return int(n) if n.denominator == 1 and n != m else None


def _second_partner(m):
    if m in (1, 3):
        return 4 - m
    if m <= 3:
        return None
    n = Fraction(3 * m - 1, m - 3)
    return int(n) if n.denominator == 1 and n != m else None


def bifurcation_points_lowest(m_max):
    """omega_m = (m-1)/(m(m+1)) for m = 1..m_max; the pair m = 2, 3 is the double point 1/6."""
    return [BifurcationPoint(m, lowest_omega(m), _lowest_partner(m)) for m in range(1, m_max + 1)]


def bifurcation_points_second(m_max):
    """Bifurcations from e_1: omega_1 = 0, omega_2 = 2/3, omega_m = (m-3)/(m^2-1) for m >= 3."""
    return [BifurcationPoint(m, second_omega(m), _second_partner(m)) for m in range(1, m_max + 1)]


# ---------------------------------------------------------------- linear operators


def _lam(omega, normalization):
    return 1.0 if normalization == "lambda" else 1.0 + omega


def _dlam(normalization):
    return 0.0 if normalization == "lambda" else 1.0


def jacobian(A, lam, omega):
    """dR/dA, which equals the Hessian block L+ at a real A."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    P, _ = _kernels.hessian_blocks(A)
    n = np.arange(A.shape[0])
    return P - np.diag((n + 1) * (lam - n * omega))


def base_state(base_mode, N=DEFAULT_N, omega=0.0):
    if base_mode == "lowest":
        A = np.zeros(N)
        A[0] = 1.0
        return StationaryState(A, 1.0, omega, label="e0")
    if base_mode == "second":
        A = np.zeros(N)
        A[1] = 1.0
        return StationaryState(A, 1.0 + omega, omega, label="e1")
    raise UnknownBranch(f"unknown base mode {base_mode!r}")


def linearization_operator(omega, base_mode="lowest", N=DEFAULT_N):
    """L(omega): the Jacobian of the stationary system at the base eigenmode."""
    s = base_state(base_mode, N, omega)
    return jacobian(s.A, s.lam, s.omega)


@dataclass(frozen=True)
class Crossing:
    omega: float
    multiplicity: int


def _neg_count(base_mode, N, omega):
    return int(np.sum(np.linalg.eigvalsh(linearization_operator(omega, base_mode, N)) < 0.0))


def linearization_scan(omega_range, base_mode="lowest", N=DEFAULT_N, step=1e-3, tol=1e-12, zero_tol=1e-10):
    """Locate omegas in [lo, hi] at which an eigenvalue of L(omega) vanishes.

    Changes of the negative-eigenvalue count between grid points are
    isolated by bisection down to `tol`; the size of the jump is the
    multiplicity.  Zeros that sit exactly on the left end are reported too.
    """
    lo, hi = omega_range
    if not hi > lo:
        return []
    if step <= 0:
        raise ValueError("step must be positive")
    grid = np.linspace(lo, hi, int(np.ceil((hi - lo) / step)) + 1)
    counts = [_neg_count(base_mode, N, w) for w in grid]
    found = []

    def isolate(a, ca, b, cb):
        if ca == cb:
            return
        if b - a <= tol:
            found.append(Crossing(0.5 * (a + b), abs(ca - cb)))
            return
        mid = 0.5 * (a + b)
        cm = _neg_count(base_mode, N, mid)
        isolate(a, ca, mid, cm)
        isolate(mid, cm, b, cb)

    for i in range(len(grid) - 1):
        isolate(grid[i], counts[i], grid[i + 1], counts[i + 1])

    eig0 = np.linalg.eigvalsh(linearization_operator(lo, base_mode, N))
    z0 = int(np.sum(np.abs(eig0) < zero_tol))
    if z0 and not any(abs(c.omega - lo) <= 2 * tol for c in found):
        found.append(Crossing(float(lo), z0))
    found.sort(key=lambda c: c.omega)
    # merge crossings closer than tol (a double zero may be split by rounding)
    merged = []
    for c in found:
        if merged and c.omega - merged[-1].omega <= 4 * tol:
            prev = merged.pop()
            c = Crossing(0.5 * (prev.omega + c.omega), prev.multiplicity + c.multiplicity)
        merged.append(c)
    return merged


# ---------------------------------------------------------------- pins and specs


@dataclass(frozen=True)
class Pin:
    """Linear constraint sum_i w_i A_{idx_i} = value."""

    weights: tuple
    value: float

    @classmethod
    def at(cls, index, value):
        return cls(((int(index), 1.0),), float(value))

    def row(self, N):
        r = np.zeros(N)
        for i, w in self.weights:
            if not 0 <= i < N:
                raise ValueError(f"pin index {i} outside truncation N = {N}")
            r[i] += w
        return r

    @property
    def indices(self):
        return tuple(i for i, _ in self.weights)


_DOUBLE_LOWEST = {2, 3}
_DOUBLE_SECOND = {4: 11, 11: 4, 5: 7, 7: 5}


@dataclass(frozen=True)
class BranchSpec:
    """Which branch to follow, and where on it.

    `eps` and `mu` are the pin values.  At the double points branch (i) is
    pinned by `mu`, branches (ii) and (iii) by `eps`; branch (iii) leaves
    the second kernel amplitude free.
    """

    base_mode: str
    m: int
    branch_id: str = "unique"
    eps: float = 0.0
    mu: float = 0.0
    N: int = DEFAULT_N
    pins: tuple = field(init=False)
    normalization: str = field(init=False)
    omega_star: float = field(init=False)

    def __post_init__(self):
        if self.base_mode not in BASE_MODES:
            raise UnknownBranch(f"unknown base mode {self.base_mode!r}")
        if self.branch_id not in BRANCH_IDS:
            raise UnknownBranch(f"unknown branch id {self.branch_id!r}")
        if self.m < 1:
            raise UnknownBranch("bifurcation index must be positive")
        pins, norm, w = _catalog(self)
        idx = [i for p in pins for i in p.indices]
        if len(set(idx)) != len(idx) or any(i >= self.N for i in idx):
            raise ValueError(f"pin indices {idx} must be distinct and below N = {self.N}")
        object.__setattr__(self, "pins", tuple(pins))
        object.__setattr__(self, "normalization", norm)
        object.__setattr__(self, "omega_star", float(w))

    @property
    def double(self):
        return self.branch_id != "unique"

    @property
    def parameter_name(self):
        return "mu" if self.branch_id == "i" else "eps"

    @property
    def parameter(self):
        return self.mu if self.branch_id == "i" else self.eps

    def with_parameter(self, value):
        return replace(self, **{self.parameter_name: float(value)})


def _require(spec, allowed):
    if spec.branch_id not in allowed:
        raise UnknownBranch(
            f"branch {spec.branch_id!r} not available at {spec.base_mode} m={spec.m}; choose from {allowed}"
        )


def _catalog(spec):
    m, b = spec.m, spec.branch_id
    if spec.base_mode == "lowest":
        w = lowest_omega(m)
        if m in _DOUBLE_LOWEST:
            _require(spec, ("i", "ii", "iii"))
            if b == "i":
                return [Pin.at(3, spec.mu)], "lambda", w
            if b == "iii" and spec.eps > 0:
                raise UnknownBranch("branch iii exists for eps < 0 only")
            return [Pin.at(2, spec.eps)], "lambda", w
        _require(spec, ("unique",))
        if m == 1:
            raise UnknownBranch("omega_1 = 0 of the lowest mode is the ground-state family; use ground_state")
        return [Pin.at(m, spec.eps)], "lambda", w

    w = second_omega(m)
    if m in (1, 3):
        raise UnknownBranch("the double point omega = 0 carries a two-parameter family; use two_param_family_second")
    if m == 2:
        _require(spec, ("unique",))
        return [Pin(((0, 3.0), (2, -1.0)), 10.0 * spec.eps)], "lambda-omega", w
    if m in (4, 11):
        _require(spec, ("i", "ii"))
        return ([Pin.at(11, spec.mu)] if b == "i" else [Pin.at(4, spec.eps)]), "lambda-omega", w
    if m in (5, 7):
        _require(spec, ("i", "ii", "iii"))
        if b == "i":
            return [Pin.at(7, spec.mu)], "lambda-omega", w
        if b == "iii" and spec.eps > 0:
            raise UnknownBranch("branch iii exists for eps < 0 only")
        return [Pin.at(5, spec.eps)], "lambda-omega", w
    _require(spec, ("unique",))
    return [Pin.at(m, spec.eps)], "lambda-omega", w


# ---------------------------------------------------------------- Newton


@dataclass(frozen=True)
class BranchSample:
    epsilon: float
    mu: float
    Omega: float
    state: StationaryState
    residual_norm: float
    iterations: int = 0
    flags: tuple = ()


@dataclass(frozen=True)
class NewtonResult:
    state: StationaryState
    residual_norm: float
    iterations: int


def _system(A, omega, pins, normalization, rows):
    lam = _lam(omega, normalization)
    R = stationary_residual(StationaryState(A, lam, omega))
    return np.concatenate([R, rows @ A - np.array([p.value for p in pins])]), lam


def newton_solve(
    A0,
    omega0,
    pins=(),
    normalization="lambda",
    omega_free=True,
    tol=None,
    max_iter=MAX_ITER,
    label="",
):
    """Solve R(A, omega) = 0 with linear pins.

    Unknowns are A and, when `omega_free`, omega.  A square system is solved
    directly; an overdetermined consistent system takes Gauss-Newton steps.
    The step is halved while the residual grows.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    A = np.array(A0, dtype=float)
    omega = float(omega0)
    N = A.shape[0]
    pins = tuple(pins)
    rows = np.array([p.row(N) for p in pins]).reshape(len(pins), N)
    n_unknown = N + int(omega_free)
    n_eq = N + len(pins)
    if n_eq < n_unknown:
        raise ValueError("underdetermined: add a pin or fix omega")
    square = n_eq == n_unknown
    if tol is None:
        tol = NEWTON_TOL if square else LSQ_TOL
    n = np.arange(N)
    dlam = _dlam(normalization)

    F, lam = _system(A, omega, pins, normalization, rows)
    res = np.max(np.abs(F))
    for it in range(max_iter + 1):
        scale = max(1.0, np.max(np.abs(A)) ** 3)
        if res <= tol * scale:
            state = StationaryState(A, lam, omega, label=label)
            return NewtonResult(state, float(np.max(np.abs(F[:N]))), it)
        if it == max_iter:
            break
        J = np.zeros((n_eq, n_unknown))
        J[:N, :N] = jacobian(A, lam, omega)
        J[N:, :N] = rows
        if omega_free:
            J[:N, N] = (n + 1) * (n - dlam) * A
        if square:
            cond = np.linalg.cond(J)
            if not np.isfinite(cond) or cond > COND_MAX:
                raise SingularJacobian(
                    f"Jacobian condition {cond:.3e} exceeds {COND_MAX:g}", parameter=omega, residual=res
                )
            dx = np.linalg.solve(J, -F)
        else:
            dx, *_ = np.linalg.lstsq(J, -F, rcond=None)
        t = 1.0
        for _ in range(30):
            A_try = A + t * dx[:N]
            w_try = omega + t * dx[N] if omega_free else omega
            F_try, lam_try = _system(A_try, w_try, pins, normalization, rows)
            res_try = np.max(np.abs(F_try))
            if res_try < res or t < 1e-6:
                break
            t *= 0.5
        A, omega, F, lam, res = A_try, w_try, F_try, lam_try, res_try
        if not np.isfinite(res):
            break
    raise NoConvergence(f"Newton did not converge in {max_iter} iterations (residual {res:.3e})", residual=res)


def _flags(spec, state):
    flags = []
    Omega = state.omega - spec.omega_star
    if abs(Omega) > 10 * (spec.eps**2 + spec.mu**2):
        flags.append("large-omega")
    scale = np.max(np.abs(state.A))
    if scale > 0 and abs(state.A[-1]) > TAIL_TOL * scale:
        flags.append("tail")
    return tuple(flags)


def newton_refine(guess, spec, max_iter=MAX_ITER, tol=None):
    """Refine a predictor onto the branch described by `spec`."""
    A = guess.A
    if A.shape[0] != spec.N:
        A = guess.with_truncation(spec.N).A
    r = newton_solve(A, guess.omega, spec.pins, spec.normalization, True, tol, max_iter, _label(spec))
    s = r.state
    eps, mu = _measured_parameters(spec, s.A)
    flags = _flags(spec, s)
    state = replace(s, tail_warning="tail" in flags)
    return BranchSample(eps, mu, s.omega - spec.omega_star, state, r.residual_norm, r.iterations, flags)


def _label(spec):
    return f"{spec.base_mode}-m{spec.m}-{spec.branch_id}"


def _measured_parameters(spec, A):
    """(eps, mu) read back from the converged amplitudes."""
    if spec.base_mode == "lowest" and spec.m in _DOUBLE_LOWEST:
        return float(A[2]), float(A[3])
    if spec.base_mode == "second" and spec.m in (4, 11):
        return float(A[4]), float(A[11]) if A.shape[0] > 11 else 0.0
    if spec.base_mode == "second" and spec.m in (5, 7):
        return float(A[5]), float(A[7]) if A.shape[0] > 7 else 0.0
    if spec.base_mode == "second" and spec.m == 2:
        return float((3 * A[0] - A[2]) / 10), 0.0
    return float(A[spec.m]), 0.0


def solve_at_omega(guess, omega, normalization="lambda", tol=NEWTON_TOL, max_iter=MAX_ITER):
    """Stationary state at fixed omega near `guess`; the Jacobian is L+ itself."""
    r = newton_solve(guess.A, omega, (), normalization, False, tol, max_iter, guess.label)
    return r.state


def branch_function(sample_or_state, normalization="lambda"):
    """omega -> stationary state on the branch through the given point.

    Each call re-converges from the seed at fixed omega.
    """
    seed = sample_or_state.state if isinstance(sample_or_state, BranchSample) else sample_or_state

    def fn(omega):
        return solve_at_omega(seed, omega, normalization)

    return fn


# ---------------------------------------------------------------- predictors


def _vec(N, entries):
    A = np.zeros(N)
    for i, v in entries.items():
        if i < N:
            A[i] += v
    return A


def branch_predictor(spec, param=None):
    """Normal-form guess for the branch point with pin value `param`.

    Returns a StationaryState whose omega is omega_star + Omega(param).
    """
    if param is not None:
        spec = spec.with_parameter(param)
    N, e, mu = spec.N, spec.eps, spec.mu
    w0 = spec.omega_star
    lab = _label(spec)

    if spec.base_mode == "lowest":
        if spec.m in _DOUBLE_LOWEST:
            A, Om = _lowest_double_predictor(spec.branch_id, e, mu, N)
        else:
            A, Om = _vec(N, {0: 1.0, spec.m: e}), 0.0
        return StationaryState(A, 1.0, w0 + Om, label=lab)

    m = spec.m
    if m == 2:
        A = _vec(N, {1: 1.0 - 4 * e * e, 0: 3 * e, 2: -e, 3: 0.75 * e * e})
        Om = -7.0 / 3.0 * e * e
    elif m in (4, 11):
        if spec.branch_id == "ii":
            # exact third-order reduction gives Omega = -7/15 eps^2 and -7/255 mu^2
            A, Om = _vec(N, {1: 1.0 - e * e, 4: e, 7: 2.5 * e * e}), -7.0 / 15.0 * e * e
        else:
            A, Om = _vec(N, {1: 1.0 - mu * mu, 11: mu, 21: -3.0 / 17.0 * mu * mu}), -7.0 / 255.0 * mu * mu
    elif m in (5, 7):
        half = N // 2
        A_low, Om_low = _lowest_double_predictor(spec.branch_id, e, mu, half)
        low = StationaryState(A_low, 1.0, 1.0 / 6.0 + Om_low)
        img = half_wavelength_map(low, N)
        return replace(img, label=lab)
    elif m == 6:
        A = _vec(N, {1: 1.0 - e * e, 6: e, 11: -7.0 / 8.0 * e * e})
        Om = 9.0 / 70.0 * e * e
    else:
        A, Om = _vec(N, {1: 1.0, m: e}), 0.0
    w = w0 + Om
    return StationaryState(A, 1.0 + w, w, label=lab)


def _lowest_double_predictor(branch_id, e, mu, N):
    if branch_id == "i":
        return _vec(N, {0: 1.0 - mu * mu, 3: mu, 6: -0.5 * mu * mu}), mu * mu / 12.0
    if branch_id == "ii":
        return _vec(N, {0: 1.0 - e * e, 2: e, 4: -3 * e * e, 6: 3 * e**3}), 7.0 / 6.0 * e * e
    if e > 0:
        raise UnknownBranch("branch iii exists for eps < 0 only")
    d = np.sqrt(-e)
    A = _vec(
        N,
        {
            0: 1.0 - d**4 - 4 * d**6,
            1: 12 * d**5,
            2: e,
            3: 2 * d**3,
            4: -3 * d**4,
            5: 4 * d**5,
            6: -5 * d**6,
        },
    )
    return A, 7.0 / 6.0 * d**4 + 28.0 / 3.0 * d**6


# ---------------------------------------------------------------- continuation


def _pinned_residual(guess, spec):
    A = guess.with_truncation(spec.N).A
    rows = np.array([p.row(spec.N) for p in spec.pins])
    F, _ = _system(A, guess.omega, spec.pins, spec.normalization, rows)
    return float(np.max(np.abs(F)))


@dataclass(frozen=True)
class Branch:
    spec: BranchSpec
    samples: tuple

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def parameters(self):
        key = "mu" if self.spec.branch_id == "i" else "epsilon"
        return np.array([getattr(s, key) for s in self.samples])

    @property
    def Omegas(self):
        return np.array([s.Omega for s in self.samples])


def continue_branch(spec, schedule, max_iter=MAX_ITER):
    """Predictor-corrector along the pin parameter.

    Each point starts from whichever of the normal-form predictor and the
    secant through the previous two samples has the smaller residual.  A failure raises
    NoConvergence carrying the offending parameter value.
    """
    schedule = [float(x) for x in schedule]
    if len(schedule) > 1:
        d = np.diff(schedule)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("schedule must be strictly monotone")
    samples = []
    for k, value in enumerate(schedule):
        s = spec.with_parameter(value)
        candidates = [branch_predictor(s)]
        if k == 1:
            candidates.append(samples[-1].state)
        elif k > 1:
            a, b = samples[-2], samples[-1]
            pa, pb = schedule[k - 2], schedule[k - 1]
            t = (value - pb) / (pb - pa)
            candidates.append(
                StationaryState(
                    b.state.A + t * (b.state.A - a.state.A),
                    b.state.lam,
                    b.state.omega + t * (b.state.omega - a.state.omega),
                )
            )
        # near the bifurcation point the normal form beats the secant
        guess = min(candidates, key=lambda g: _pinned_residual(g, s))
        try:
            samples.append(newton_refine(guess, s, max_iter=max_iter))
        except NoConvergence as exc:
            raise NoConvergence(
                f"continuation failed at {spec.parameter_name} = {value}: {exc}",
                parameter=value,
                residual=exc.residual,
            ) from exc
    return Branch(spec, tuple(samples))


# ---------------------------------------------------------------- omega = 0 family and symmetry map


def two_param_series(eps, mu, N=DEFAULT_N):
    """Cubic-order expansion of the omega = 0 family around e_1."""
    e, u = eps, mu
    return _vec(
        N,
        {
            0: e + e * u + (e * u * u - 0.5 * e**3),
            1: 1.0 - (e * e + u * u) + e * e * u,
            2: -e + e * u + (e * u * u - 0.5 * e**3),
            3: u,
            4: -2 * e * u + (e**3 + e * u * u),
            5: u * u + e * e * u,
            6: -3 * e * u * u,
        },
    )


def two_param_family_second(eps, mu, N=DEFAULT_N, tol=LSQ_TOL, max_iter=MAX_ITER):
    """Stationary state with lambda = 1, omega = 0 near e_1 pinned by (a_0 - a_2)/2 = eps and a_3 = mu.

    The Jacobian has a two-dimensional kernel along the family, so the two
    pins make the system overdetermined; Gauss-Newton converges to it.
    """
    if N < 8:
        raise TruncationTooSmall("two-parameter family needs N >= 8")
    pins = (Pin(((0, 0.5), (2, -0.5)), eps), Pin.at(3, mu))
    guess = two_param_series(eps, mu, N)
    r = newton_solve(guess, 0.0, pins, "lambda", False, tol, max_iter, "two-param")
    return r.state


def half_wavelength_map(state, N_out=None):
    """A~_{2m+1} = A_m, A~_{2m} = 0, lambda~ = lambda + omega/2, omega~ = omega/2.

    Raises TruncationTooSmall when N_out cannot hold the image.
    """
    N = state.truncation
    if N_out is None:
        N_out = 2 * N
    out = np.zeros(max(N_out, 2 * N))
    out[1::2][:N] = state.A
    dropped = out[N_out:]
    scale = np.max(np.abs(state.A))
    if dropped.size and np.max(np.abs(dropped)) > TAIL_TOL * max(scale, 1e-300):
        raise TruncationTooSmall(f"image needs N >= {2 * N}, got N_out = {N_out}")
    return StationaryState(out[:N_out], state.lam + 0.5 * state.omega, 0.5 * state.omega, state.tail_warning, state.label)
