"""Command-line front end: verify, scan, spectrum, continue, evolve, probe.

Every command writes rows (CSV or JSON) that echo the truncation and the
tolerances in use.  Exit status: 0 success, 1 numerical failure, 2 usage.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import evolution, families, solver, spectral
from .core import DEFAULT_N, EVOLUTION_N, TAIL_TOL, AmplitudeState, random_state
from .errors import ConformalFlowError, DomainError, UnknownBranch

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

PAIR_ORIGIN = {+1: 1.0 / 6.0, -1: 2.0 / 3.0}


@dataclass(frozen=True)
class RunConfig:
    command: str
    N: int
    newton_tol: float = solver.NEWTON_TOL
    zero_tol: float = spectral.ZERO_TOL_REL
    tail_tol: float = TAIL_TOL
    output_path: str | None = None
    format: str = "csv"
    seed: int | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 8:
            raise ValueError("N must be at least 8")
        for name in ("newton_tol", "zero_tol", "tail_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    def echo(self):
        return {"N": self.N, "newton_tol": self.newton_tol, "zero_tol": self.zero_tol, "tail_tol": self.tail_tol}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(rows, config, extra=None):
    rows = [{**r, **config.echo()} for r in rows]
    if config.format == "json":
        doc = {"config": asdict(config), "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    keys = list(rows[0].keys()) if rows else list(config.echo())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in keys])
    return buf.getvalue()


def _emit(text, config):
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- parsing helpers


def _sweep(text):
    """'a:b:n' -> n points from a to b; 'x' -> [x]."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            return list(np.linspace(a, b, n))
    except ValueError:
        pass
    raise UsageError(f"bad sweep {text!r}; expected start:stop:count or a single number")


def _range(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"bad range {text!r}; expected lo:hi")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None


def _family_state(name, p, N, branch=None):
    if name == "pair":
        name = branch if branch in ("pair+", "pair-") else "pair+"
    if name not in families.FAMILY_BUILDERS:
        raise UsageError(f"unknown family {name!r}; choose from {sorted(families.FAMILY_BUILDERS)} or pair")
    return name, families.FAMILY_BUILDERS[name](p, N)


# ---------------------------------------------------------------- commands


def cmd_verify(args, config):
    tol = args.tol
    if args.family:
        if args.p is None:
            raise UsageError("--family needs --p")
        cases = [(args.family, args.p)]
    else:
        cases = None
    rows, ok = [], True
    if cases is None:
        table = families.verify_families(config.N)
    else:
        table = []
        for name, p in cases:
            try:
                fam, _ = _family_state(name, p, config.N, args.branch)
                table.append(families.family_row(fam, p, config.N))
            except DomainError as exc:
                ok = False
                print(f"DomainError: {exc}", file=sys.stderr)
                table.append({"family": name, "p": p, "N": config.N, "error": str(exc)})
    for row in table:
        if "error" not in row:
            passed = row["residual"] <= tol * max(1.0, abs(row["lam"]))
            if row["tail_warning"]:
                print(f"warning: {row['family']} p={row['p']} tail not resolved at N={config.N}", file=sys.stderr)
            row["pass"] = passed
            ok &= passed
        rows.append(row)
    _emit(render(rows, config), config)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_scan(args, config):
    lo, hi = _range(args.range)
    crossings = solver.linearization_scan((lo, hi), args.mode, config.N, step=args.step)
    catalog_fn = solver.bifurcation_points_lowest if args.mode == "lowest" else solver.bifurcation_points_second
    catalog = catalog_fn(config.N - 1)
    rows = []
    for c in crossings:
        match = [b for b in catalog if abs(b.value - c.omega) < 1e-8]
        rows.append(
            {
                "omega": c.omega,
                "multiplicity": c.multiplicity,
                "m": ";".join(str(b.m) for b in match),
                "omega_exact": str(match[0].omega) if match else "",
                "double": any(b.double for b in match),
            }
        )
    _emit(render(rows, config), config)
    return EXIT_OK


def _spec_from_args(args, N, **params):
    branch = args.branch or ("unique" if not _is_double(args) else "ii")
    return solver.BranchSpec(args.mode, args.m, branch, N=N, **params)


def _is_double(args):
    if args.mode == "lowest":
        return args.m in (2, 3)
    return args.m in (4, 5, 7, 11)


def _report_row(param, state, Omega, normalization, config):
    fn = solver.branch_function(state, normalization)
    r = spectral.spectral_report(
        state, fn, normalization=normalization, h=spectral.d_step(Omega), zero_tol_rel=config.zero_tol, strict=False
    )
    return {
        "param": param,
        "omega": state.omega,
        "eig_plus_min1": r.eig_plus_min1,
        "eig_plus_min2": r.eig_plus_min2,
        "eig_minus_min1": r.eig_minus_min1,
        "n_plus": r.n_plus,
        "z_plus": r.z_plus,
        "n_minus": r.n_minus,
        "z_minus": r.z_minus,
        "n_constrained": r.n_constrained,
        "classification": r.classification,
        "status": "ok",
    }


def _failed_row(param, exc):
    keys = ("omega", "eig_plus_min1", "eig_plus_min2", "eig_minus_min1", "n_plus", "z_plus", "n_minus", "z_minus")
    row = {"param": param, **{k: None for k in keys}, "n_constrained": None, "classification": ""}
    row["status"] = f"failed: {type(exc).__name__}"
    return row


def cmd_spectrum(args, config):
    params = _sweep(args.param_sweep)
    rows, failures = [], 0
    if args.branch in ("pair+", "pair-"):
        sign = +1 if args.branch == "pair+" else -1
        norm = "lambda" if sign > 0 else "lambda-omega"
        for p in params:
            try:
                st = families.pair_state_normalized(p, sign, config.N)
                rows.append(_report_row(p, st, st.omega - PAIR_ORIGIN[sign], norm, config))
            except ConformalFlowError as exc:
                failures += 1
                rows.append(_failed_row(p, exc))
    else:
        spec = _spec_from_args(args, config.N)
        prev = None
        for p in params:
            s = spec.with_parameter(p)
            try:
                guess = prev.state if prev is not None else solver.branch_predictor(s)
                sample = solver.newton_refine(guess, s)
                prev = sample
                rows.append(_report_row(p, sample.state, sample.Omega, spec.normalization, config))
            except ConformalFlowError as exc:
                failures += 1
                prev = None
                rows.append(_failed_row(p, exc))
    _emit(render(rows, config), config)
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def cmd_continue(args, config):
    spec = _spec_from_args(args, config.N)
    text = args.mu if spec.branch_id == "i" else args.eps
    if text is None:
        raise UsageError(f"branch {spec.branch_id} needs --{spec.parameter_name}")
    branch = solver.continue_branch(spec, _sweep(text))
    rows = [
        {
            "eps": s.epsilon,
            "mu": s.mu,
            "Omega": s.Omega,
            "omega": s.state.omega,
            "lam": s.state.lam,
            "residual": s.residual_norm,
            "iterations": s.iterations,
            "flags": ";".join(s.flags),
        }
        for s in branch
    ]
    _emit(render(rows, config), config)
    return EXIT_OK


def _initial(args, N):
    if args.family == "random":
        return random_state(N, np.random.default_rng(args.seed)), None
    if args.p is None and args.family not in (None,):
        raise UsageError("--family needs --p (or use --family random)")
    _, st = _family_state(args.family, args.p, N, args.branch)
    return AmplitudeState(st.A), st


def cmd_evolve(args, config):
    alpha0, _ = _initial(args, config.N)
    traj = evolution.integrate(alpha0, args.T, args.dt, args.stride)
    drift = evolution.conservation_drift(traj)
    rows = []
    for t, c in zip(traj.times, traj.conserved):
        rows.append({"t": t, "H": c.H, "Q": c.Q, "E": c.E, "absZ": abs(c.Z), "dt": traj.dt})
    text = render(rows, config, {"drift": asdict(drift)})
    _emit(text, config)
    print(
        f"drift H={drift.H:.3e} Q={drift.Q:.3e} E={drift.E:.3e} |Z|={drift.Z:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_probe(args, config):
    _, st = _initial(args, DEFAULT_N)
    if st is None:
        raise UsageError("probe needs a stationary --family")
    rep = evolution.stability_probe(st, args.noise, args.T, seed=args.seed, dt=args.dt, N=config.N)
    row = asdict(rep)
    dH, dQ, dE, dZ = row.pop("drift")
    row.update({"drift_H": dH, "drift_Q": dQ, "drift_E": dE, "drift_Z": dZ, "family": args.family, "p": args.p})
    row.pop("N")
    _emit(render([row], config), config)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "scan": cmd_scan,
    "spectrum": cmd_spectrum,
    "continue": cmd_continue,
    "evolve": cmd_evolve,
    "probe": cmd_probe,
}


# ---------------------------------------------------------------- entry point


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=None, help="truncation (default 64; 32 for evolve/probe)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--newton-tol", type=float, default=solver.NEWTON_TOL)
    common.add_argument("--zero-tol", type=float, default=spectral.ZERO_TOL_REL, help="relative zero threshold")
    common.add_argument("--tail-tol", type=float, default=TAIL_TOL)
    common.add_argument("--mode", choices=solver.BASE_MODES, default="lowest")
    common.add_argument("--m", type=int, default=2, help="bifurcation index")
    common.add_argument("--branch", choices=("i", "ii", "iii", "unique", "pair+", "pair-"), default=None)
    common.add_argument("--family", default=None)
    common.add_argument("--p", type=float, default=None)
    common.add_argument("--eps", default=None, help="value or start:stop:count")
    common.add_argument("--mu", default=None, help="value or start:stop:count")
    common.add_argument("--T", type=float, default=10.0)
    common.add_argument("--dt", type=float, default=None, help="time step (evolve 1e-3, probe 5e-3)")

    parser = argparse.ArgumentParser(prog="conformal-flow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="residual table for the exact families")
    v.add_argument("--tol", type=float, default=1e-9)
    s = sub.add_parser("scan", parents=[common], help="zero crossings of L(omega) at a base mode")
    s.add_argument("--range", default="0:0.2")
    s.add_argument("--step", type=float, default=1e-3)
    sp = sub.add_parser("spectrum", parents=[common], help="smallest eigenvalues and inertia along a branch")
    sp.add_argument("--param-sweep", required=True, help="start:stop:count")
    sub.add_parser("continue", parents=[common], help="Newton continuation along a branch")
    e = sub.add_parser("evolve", parents=[common], help="integrate the flow and audit conservation")
    e.add_argument("--stride", type=int, default=None)
    pr = sub.add_parser("probe", parents=[common], help="orbital-stability probe")
    pr.add_argument("--noise", type=float, default=1e-3)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.dt is None:
        args.dt = 5e-3 if args.command == "probe" else 1e-3
    N = args.N if args.N is not None else (EVOLUTION_N if args.command in ("evolve", "probe") else DEFAULT_N)
    options = {k: v for k, v in sorted(vars(args).items()) if k not in ("N", "out", "format", "seed", "command")}
    try:
        config = RunConfig(
            args.command, N, args.newton_tol, args.zero_tol, args.tail_tol, args.out, args.format, args.seed, options
        )
        return COMMANDS[args.command](args, config)
    except UnknownBranch as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConformalFlowError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
