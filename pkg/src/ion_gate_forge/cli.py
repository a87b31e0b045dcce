"""Command-line front end: design, verify, trajectory, sweep and cz95 subcommands.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 verification mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import load_config
from .cz95 import COMPUTATIONAL, IDEAL_PHASES, CZ95Register, cz95_gate, truth_table
from .errors import DomainError, IllConditioned, NoConvergence, TruncationLeakage
from .fastgate import MODES, QUBIT_CONFIGS, coherent_trajectory, kick_scale, max_excursion, mode_frequency
from .fockspace import FockSpace
from .hamiltonians import IonTrapConfig
from .protocols import GateDesign, design_protocol_I, design_protocol_II
from .verify import MotionalState, SimulationPlan, extract_phases, thermal_gate_test

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_MISMATCH = 0, 2, 3, 4
PHASE_TOL = 1e-6
SWEEP_MIN_CONVERGED = 0.9
PERIOD = 2.0 * math.pi


def _emit(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fmt(x) -> str:
    return repr(float(x))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _load_design(path: str) -> GateDesign:
    with open(path, encoding="utf-8") if path != "-" else sys.stdin as fh:
        return GateDesign.from_json(fh.read())


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_design(args, cfg) -> int:
    if args.protocol == "I":
        design = design_protocol_I(cfg.eta, cfg.nu, cfg.target_theta)
    else:
        design = design_protocol_II(cfg.eta, cfg.nu, args.T * PERIOD / cfg.nu, cfg.target_theta)
    print(
        f"protocol {design.protocol}: nu*tau1 = {cfg.nu * design.tau1:.6g} ({cfg.nu * design.tau1 / PERIOD:.6g} periods), "
        f"T = {design.total_time_T * cfg.nu / PERIOD:.6g} periods, N = {design.scale_N}, Np = {design.pulse_pairs_Np}",
        file=sys.stderr,
    )
    _emit(design.to_json(indent=2) + "\n", cfg.output)
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    design = _load_design(args.design_file)
    if not design.accepted:
        return _fail(EXIT_MISMATCH, "design does not pass the closure residual check")
    trap = IonTrapConfig(eta=cfg.eta, nu=cfg.nu)
    seq = design.sequence()
    plan = SimulationPlan(seq, trap, cfg.dim_com, cfg.dim_str, MotionalState.number(0, 0))
    try:
        report = extract_phases(plan)
    except IllConditioned as exc:
        return _fail(EXIT_MISMATCH, str(exc))
    out = report.to_dict()
    ok = abs(report.theta_extracted - design.theta) <= PHASE_TOL and report.motional_dependence <= PHASE_TOL
    if args.nbar is not None:
        thermal = SimulationPlan(seq, trap, cfg.dim_com, cfg.dim_str, MotionalState.thermal(args.nbar, args.nbar))
        out["thermal_spread"] = thermal_gate_test(thermal, design)
        ok = ok and out["thermal_spread"] <= PHASE_TOL
    _emit(json.dumps(out, indent=2) + "\n", cfg.output)
    if not ok:
        return _fail(EXIT_MISMATCH, f"oracle phase {report.theta_extracted!r} vs design {design.theta!r}")
    return EXIT_OK


def cmd_trajectory(args, cfg) -> int:
    design = _load_design(args.design_file)
    seq = design.sequence()
    s1, s2 = QUBIT_CONFIGS[args.qubit_config]
    t_start = seq.t_first
    if args.duration is not None:
        t_end = t_start + args.duration * PERIOD / cfg.nu
    elif seq.events:
        t_end = seq.events[-1][1]
    else:
        t_end = t_start + PERIOD / cfg.nu
    rows = []
    for mode in MODES:
        samples = coherent_trajectory(
            seq, mode_frequency(mode, cfg.nu), kick_scale(mode, args.qubit_config, cfg.eta), args.alpha0,
            args.dt, t_start=t_start, t_end=t_end,
        )
        rows += [(_fmt(s.t), mode, s1, s2, _fmt(s.X), _fmt(s.P)) for s in samples]
    _emit(_csv_text(("t", "mode", "s1", "s2", "X", "P"), rows), cfg.output)
    return EXIT_OK


def _sweep_point(job):
    T, eta, nu, target = job
    try:
        design = design_protocol_II(eta, nu, T * PERIOD / nu, target)
    except NoConvergence:
        return None
    xr, pr = max_excursion(design.sequence(), eta, nu)
    return design.pulse_pairs_Np, xr, pr, abs(design.theta - target)


def cmd_sweep(args, cfg) -> int:
    if not 0 < args.tmin < args.tmax:
        return _fail(EXIT_USAGE, "need 0 < tmin < tmax")
    if args.points < 2:
        return _fail(EXIT_USAGE, "need at least two sweep points")
    grid = np.geomspace(args.tmin, args.tmax, args.points)
    jobs = [(float(T), cfg.eta, cfg.nu, cfg.target_theta) for T in grid]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(job) for job in jobs]
    rows, converged = [], 0
    for T, res in zip(grid, results):
        if res is None:
            rows.append((_fmt(T), "NA", "NA", "NA", "NA"))
        else:
            converged += 1
            np_pairs, xr, pr, resid = res
            rows.append((_fmt(T), str(np_pairs), _fmt(xr), _fmt(pr), _fmt(resid)))
    _emit(_csv_text(("T", "Np", "Xr", "Pr", "residual_theta"), rows), cfg.output)
    if converged < SWEEP_MIN_CONVERGED * len(grid):
        return _fail(EXIT_NUMERICAL, f"only {converged} of {len(grid)} sweep points converged")
    return EXIT_OK


def cmd_cz95(args, cfg) -> int:
    reg = CZ95Register(num_ions=2, phonon_space=FockSpace(args.phonon_dim), eta=cfg.eta)
    table = truth_table(reg, cz95_gate(reg, 0, 1))
    labels = list(COMPUTATIONAL) if args.input is None else [args.input]
    out = {
        "phases": {k: [table.phases[k].real, table.phases[k].imag] for k in labels},
        "leakage": table.leakage,
    }
    _emit(json.dumps(out, indent=2) + "\n", cfg.output)
    worst = max(abs(table.phases[k] - IDEAL_PHASES[k]) for k in labels)
    return EXIT_OK if worst <= 1e-9 else EXIT_MISMATCH


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _common(config_flag: str = "--config") -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(config_flag, dest="config", help="key=value run configuration file")
    common.add_argument("--eta", type=_positive, help="Lamb-Dicke parameter")
    common.add_argument("--target-theta", type=_positive, help="gate phase Theta")
    common.add_argument("-o", "--output", help="output path, '-' for stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()

    parser = argparse.ArgumentParser(prog="ion-gate-forge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="solve a Protocol I or II gate")
    p.add_argument("--protocol", choices=("I", "II"), required=True)
    p.add_argument("--T", type=_positive, help="gate time in trap periods (Protocol II)")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("verify", parents=[common], help="check a design against the Fock-space oracle")
    p.add_argument("design_file")
    p.add_argument("--nbar", type=float, help="also test a thermal input of this mean occupation")
    p.add_argument("--dims", type=int, nargs=2, metavar=("DIM_COM", "DIM_STR"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trajectory", parents=[_common("--run-config")], help="phase-space orbit as CSV")
    p.add_argument("design_file")
    p.add_argument("--config", dest="qubit_config", choices=tuple(QUBIT_CONFIGS), default="pp")
    p.add_argument("--alpha0", type=_complex, default=0j)
    p.add_argument("--dt", type=_positive, default=0.01)
    p.add_argument("--duration", type=_positive, help="orbit length in trap periods")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("sweep", parents=[common], help="Protocol II designs over log-spaced gate times")
    p.add_argument("--protocol", choices=("II",), default="II")
    p.add_argument("--tmin", type=float, default=0.01, help="shortest gate time in periods")
    p.add_argument("--tmax", type=float, default=1.0, help="longest gate time in periods")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cz95", parents=[common], help="phonon-bus phase gate truth table")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--input", choices=tuple(COMPUTATIONAL))
    group.add_argument("--truth-table", action="store_true")
    p.add_argument("--phonon-dim", type=int, default=8)
    p.set_defaults(func=cmd_cz95)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "design" and args.protocol == "II" and args.T is None:
        parser.error("design --protocol II requires --T")
    dims = getattr(args, "dims", None) or (None, None)
    try:
        cfg = load_config(args.config).updated(
            eta=args.eta, target_theta=args.target_theta, output=args.output, dim_com=dims[0], dim_str=dims[1]
        )
    except (OSError, ValueError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    try:
        return args.func(args, cfg)
    except TruncationLeakage as exc:
        step = "" if exc.step is None else f" (step {exc.step})"
        return _fail(EXIT_NUMERICAL, f"truncation leakage{step}: {exc}")
    except NoConvergence as exc:
        return _fail(EXIT_NUMERICAL, str(exc))
    except (DomainError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        return _fail(EXIT_USAGE, str(exc))


if __name__ == "__main__":
    sys.exit(main())
