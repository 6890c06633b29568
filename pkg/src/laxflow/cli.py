"""Command-line front end: simulate, verify, brackets, exact.

Exit codes: 0 pass, 1 verification failure, 2 singular or runtime
failure, 3 usage or config error.  The environment variable LAXFLOW_LOG
(error, info, debug) controls diagnostic verbosity on standard error.
Every subcommand writes a machine-readable JSON verdict with one entry
per check: name, value, tolerance and a pass flag.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace as dc_replace

import numpy as np

from . import reports
from .config import FORMATS, RunConfig, load_config
from .dynamics import SCHEMES, integrate
from .errors import (ConfigError, DegenerateSpectrum, EigenFailure, LaxflowError,
                     NonFinite, SingularConfiguration, SpanTooShort, UnsupportedModel)
from .exact import exact_numeric_discrepancy, exact_trajectory, spectral_solution
from .invariants import (grad_B, grad_I, phase_evolution_check, poisson_bracket)
from .lax import (build_lax, check_commutator_identity, check_N_identity,
                  flow_residual_N1_N2, hermiticity_residuals, lax_flow_residual)
from .model import ModelParams, PhaseState, hamiltonian, random_state

__all__ = ["main"]

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3

IDENTITY_TOL = 1e-12
HERMITICITY_TOL = 1e-13
ORDER_TOL = 0.8          # allowed |ratio - 4| for the h -> h/2 residual ratios
PHASE_TOL = 1e-6
DRIFT_TOL = 1e-8
BRACKET_TOL = 1e-8
EXACT_TOL = 1e-6
FLOW_H_LEVELS = (4e-4, 2e-4, 1e-4)

log = logging.getLogger("laxflow")


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as exit code 3."""

    def error(self, message):
        raise ConfigError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--n", type=int, help="particle count override")
    p.add_argument("--g2", type=float, help="pair coupling override")
    p.add_argument("--omega", type=float, help="trap frequency override")
    p.add_argument("--t-end", dest="t_end", type=float, help="integration time override")
    p.add_argument("--dt", type=float, help="step size override")
    p.add_argument("--scheme", choices=list(SCHEMES), help="integration scheme")
    p.add_argument("--kmax", type=int, help="highest trace order")
    p.add_argument("--seed", type=int, help="random seed override")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--format", choices=list(FORMATS), help="data output format")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for independent sweep points")


def _build_parser() -> _Parser:
    parser = _Parser(prog="laxflow",
                     description="Simulate and verify the trapped inverse-square model.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p_sim = sub.add_parser("simulate", help="integrate and write trajectory outputs")
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="run the full matrix-identity suite")
    _add_common(p_ver)
    p_ver.add_argument("--states", type=int, default=100,
                       help="number of random states in the identity sweep")
    p_ver.add_argument("--corrupt-m", action="store_true",
                       help="test hook: zero out M before the identity checks")
    p_ver.add_argument("--phase-omega-factor", type=float, default=1.0,
                       help="test hook: scale omega in the phase-law check")
    p_ver.set_defaults(func=cmd_verify)

    p_br = sub.add_parser("brackets", help="emit Poisson-bracket involution matrices")
    _add_common(p_br)
    p_br.add_argument("--corrupt-gradients", action="store_true",
                      help="test hook: perturb the analytic gradients")
    p_br.set_defaults(func=cmd_brackets)

    p_ex = sub.add_parser("exact", help="compare the spectral oracle with the integrator")
    _add_common(p_ex)
    p_ex.set_defaults(func=cmd_exact)
    return parser


def _setup_logging() -> None:
    level_name = os.environ.get("LAXFLOW_LOG", "error").lower()
    level = {"error": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(level_name, logging.ERROR)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="laxflow %(levelname)s: %(message)s")


def _config_from_args(args) -> RunConfig:
    overrides = {key: getattr(args, key) for key in
                 ("n", "g2", "omega", "t_end", "dt", "scheme", "kmax", "seed",
                  "out", "format")}
    return load_config(args.config, overrides)


def _check(name: str, value: float, tolerance: float, passed: bool | None = None) -> dict:
    if passed is None:
        passed = bool(value < tolerance)
    entry = {"name": name, "value": float(value), "tolerance": float(tolerance),
             "pass": bool(passed)}
    log.info("check %-32s value=%.3e tolerance=%.3e %s",
             name, entry["value"], entry["tolerance"], "pass" if passed else "FAIL")
    return entry


def _write_verdict(outdir: str, command: str, checks: list[dict]) -> dict:
    verdict = {"command": command,
               "pass": all(c["pass"] for c in checks),
               "checks": checks}
    reports.write_json(os.path.join(outdir, f"{command}_verdict.json"), verdict)
    return verdict


def _effective_kmax(cfg: RunConfig) -> int:
    return cfg.resolve_kmax() if cfg.model.lax_supported else 0


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    state0 = cfg.resolve_initial()
    traj = integrate(cfg.model, state0, cfg.resolve_t_end(), cfg.run.dt,
                     scheme=cfg.run.scheme, record_every=cfg.run.record_every,
                     kmax=_effective_kmax(cfg))
    outdir = cfg.output.dir
    fmt = cfg.output.format
    if fmt in ("csv", "both"):
        reports.write_text(os.path.join(outdir, "trajectory.csv"),
                           reports.trajectory_csv(traj))
        reports.write_text(os.path.join(outdir, "invariants.csv"),
                           reports.invariant_records_csv(traj))
        log.info("wrote %s", os.path.join(outdir, "trajectory.csv"))
    if fmt in ("json", "both"):
        reports.write_json(os.path.join(outdir, "summary.json"),
                           reports.trajectory_summary(traj))
        log.info("wrote %s", os.path.join(outdir, "summary.json"))
    _write_verdict(outdir, "simulate", [
        _check("run_completed", 0.0, 1.0, passed=True),
    ])
    return EXIT_PASS


def _identity_sweep_point(task) -> tuple[float, float, float, float]:
    """Residual maxima at one random state (worker for --jobs > 1)."""
    params, seed, corrupt_m = task
    state = random_state(params, seed, min_gap=0.25, momentum_scale=1.0)
    laxset = build_lax(params, state)
    if corrupt_m:
        laxset = dc_replace(laxset, M=np.zeros_like(laxset.M))
    herm = max(hermiticity_residuals(laxset))
    i1 = float(np.trace(laxset.N).real)
    h = hamiltonian(params, state)
    rel_i1 = abs(i1 - 2.0 * h) / max(abs(2.0 * h), 1e-300)
    return (check_commutator_identity(laxset), check_N_identity(laxset), herm, rel_i1)


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    params = cfg.model
    if not params.lax_supported:
        raise UnsupportedModel()
    checks: list[dict] = []

    tasks = [(params, cfg.run.seed + 1000 + i, args.corrupt_m)
             for i in range(max(1, args.states))]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_identity_sweep_point, tasks, chunksize=8))
    else:
        results = [_identity_sweep_point(t) for t in tasks]
    worst = np.max(np.asarray(results), axis=0)
    checks.append(_check("commutator_identity_residual", worst[0], IDENTITY_TOL))
    checks.append(_check("n_identity_residual", worst[1], IDENTITY_TOL))
    checks.append(_check("hermiticity_residual", worst[2], HERMITICITY_TOL))
    checks.append(_check("i1_equals_2h_relative", worst[3], IDENTITY_TOL))

    state = random_state(params, cfg.run.seed + 7, min_gap=0.3, momentum_scale=1.0)
    res = {"flow_ltilde": [], "flow_n": [], "flow_n1": [], "flow_n2": []}
    for h in FLOW_H_LEVELS:
        r_lt, r_n = lax_flow_residual(params, state, h)
        r_n1, r_n2 = flow_residual_N1_N2(params, state, h)
        res["flow_ltilde"].append(r_lt)
        res["flow_n"].append(r_n)
        res["flow_n1"].append(r_n1)
        res["flow_n2"].append(r_n2)
    for name, values in res.items():
        ratios = [values[i] / values[i + 1] for i in range(len(values) - 1)]
        deviation = max(abs(r - 4.0) for r in ratios)
        checks.append(_check(f"{name}_convergence_order", deviation, ORDER_TOL))

    state0 = cfg.resolve_initial()
    t_end = 2.0 * math.pi / params.omega if params.omega > 0.0 else cfg.resolve_t_end()
    traj = integrate(params, state0, t_end, cfg.run.dt, scheme=cfg.run.scheme,
                     record_every=cfg.run.record_every, kmax=params.n)
    phase_omega = params.omega * args.phase_omega_factor
    checks.append(_check("phase_law_deviation",
                         phase_evolution_check(traj, phase_omega, params.n), PHASE_TOL))
    summary = reports.trajectory_summary(traj)
    checks.append(_check("absB_drift_rel", max(summary["absB_drift_rel"]), DRIFT_TOL))
    checks.append(_check("invariant_drift_rel", max(summary["I_drift_rel"]), DRIFT_TOL))
    checks.append(_check("energy_drift_rel", summary["H_drift_rel"], DRIFT_TOL))

    verdict = _write_verdict(cfg.output.dir, "verify", checks)
    return EXIT_PASS if verdict["pass"] else EXIT_FAIL


def cmd_brackets(args) -> int:
    cfg = _config_from_args(args)
    params = cfg.model
    if not params.lax_supported:
        raise UnsupportedModel()
    state = cfg.resolve_initial()
    kmax = min(cfg.resolve_kmax(), 2 * params.n)

    grads_b = [grad_B(params, state, k) for k in range(1, kmax + 1)]
    grads_i = [grad_I(params, state, k) for k in range(1, kmax + 1)]
    if args.corrupt_gradients:
        grads_b = [(dp, dq * (1.0 + 1e-3)) for dp, dq in grads_b]
        grads_i = [(dp, dq * (1.0 + 1e-3)) for dp, dq in grads_i]
    bmat = np.empty((kmax, kmax))
    imat = np.empty((kmax, kmax))
    for a in range(kmax):
        for b in range(kmax):
            bmat[a, b] = abs(poisson_bracket(grads_b[a], grads_b[b]))
            imat[a, b] = abs(poisson_bracket(grads_i[a], grads_i[b]))

    checks = [
        _check("bracket_B_max", float(bmat.max()), BRACKET_TOL),
        _check("bracket_I_max", float(imat.max()), BRACKET_TOL),
    ]
    reports.write_json(os.path.join(cfg.output.dir, "brackets.json"), {
        "kmax": kmax,
        "bracket_B_abs": bmat.tolist(),
        "bracket_I_abs": imat.tolist(),
    })
    verdict = _write_verdict(cfg.output.dir, "brackets", checks)
    return EXIT_PASS if verdict["pass"] else EXIT_FAIL


def cmd_exact(args) -> int:
    cfg = _config_from_args(args)
    params = cfg.model
    if not params.lax_supported:
        raise UnsupportedModel()
    state0 = cfg.resolve_initial()
    t_end = cfg.resolve_t_end()
    traj, times, disc = exact_numeric_discrepancy(
        params, state0, t_end, cfg.run.dt, scheme=cfg.run.scheme,
        record_every=cfg.run.record_every)
    spectral = exact_trajectory(spectral_solution(params, state0), times)

    outdir = cfg.output.dir
    if cfg.output.format in ("csv", "both"):
        reports.write_text(os.path.join(outdir, "exact_numeric.csv"),
                           reports.trajectory_csv(traj))
        reports.write_text(os.path.join(outdir, "exact_spectral.csv"),
                           reports.trajectory_csv(spectral))
        lines = ["t,discrepancy"]
        lines += [f"{reports.format_float(t)},{reports.format_float(d)}"
                  for t, d in zip(times, disc)]
        reports.write_text(os.path.join(outdir, "exact_discrepancy.csv"),
                           "\n".join(lines) + "\n")
    if cfg.output.format in ("json", "both"):
        reports.write_json(os.path.join(outdir, "exact_summary.json"), {
            "max_discrepancy": float(disc.max()),
            "numeric": reports.trajectory_summary(traj),
            "spectral": reports.trajectory_summary(spectral),
        })
    checks = [_check("exact_vs_numeric_max_discrepancy", float(disc.max()), EXACT_TOL)]
    verdict = _write_verdict(outdir, "exact", checks)
    return EXIT_PASS if verdict["pass"] else EXIT_FAIL


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _setup_logging()
        if getattr(args, "func", None) is None:
            raise ConfigError("missing subcommand "
                              "(expected simulate, verify, brackets or exact)")
        return args.func(args)
    except ConfigError as exc:
        print(f"laxflow: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedModel as exc:
        print(f"laxflow: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularConfiguration, NonFinite, EigenFailure, DegenerateSpectrum,
            SpanTooShort) as exc:
        print(f"laxflow: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except LaxflowError as exc:
        print(f"laxflow: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
