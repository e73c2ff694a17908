"""Command-line interface wiring all modules together."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import channels, circuits, classicality, dynamics, measurements, serialize, states
from .errors import ComputationError, MicRepError, ValidationError
from .frames import build_sic_qubit, tensor
from .serialize import (
    dump_json,
    format_float,
    frame_from_obj,
    frame_to_obj,
    load_json,
    pairs_to_complex,
    resolve_frame,
    write_csv,
)
from .states import ProbVector

EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_COMPUTATION = 4


def _common(parser):
    parser.add_argument("--tol", type=float, default=1e-9,
                        help="absolute tolerance for validity checks")
    parser.add_argument("--seed", type=int, default=0, help="master RNG seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker budget for scans")
    parser.add_argument("--out", default=None, help="output file path")
    return parser


def _load_state(path, tol):
    obj = load_json(path)
    frame = resolve_frame(obj["frame"], tol=tol)
    if "p" in obj:
        return ProbVector(frame, np.asarray(obj["p"], dtype=float))
    if "rho" in obj:
        return states.to_prob(pairs_to_complex(obj["rho"]), frame, tol=tol)
    raise ValidationError("state file needs a 'p' or 'rho' field")


def _load_channel(path, tol):
    obj = load_json(path)
    if "kraus" in obj:
        in_frame = resolve_frame(obj["in_frame"], tol=tol) if "in_frame" in obj \
            else build_sic_qubit(tol)
        out_frame = resolve_frame(obj["out_frame"], tol=tol) if "out_frame" in obj \
            else in_frame
        kraus = channels.KrausChannel(tuple(pairs_to_complex(v) for v in obj["kraus"]))
        return channels.kraus_to_map(kraus, in_frame, out_frame)
    if "pstoch" in obj:
        in_frame = resolve_frame(obj["in_frame"], tol=tol)
        out_frame = resolve_frame(obj["out_frame"], tol=tol) if "out_frame" in obj \
            else in_frame
        return channels.PseudoStochasticMap(
            in_frame, out_frame, np.asarray(obj["pstoch"], dtype=float))
    raise ValidationError("channel file needs a 'kraus' or 'pstoch' field")


def _load_measurement(path, tol):
    obj = load_json(path)
    frame = resolve_frame(obj["frame"], tol=tol)
    labels = tuple(obj["labels"]) if "labels" in obj else None
    if "effects" in obj:
        effects = pairs_to_complex(obj["effects"])
        return measurements.povm_to_map(effects, frame, labels=labels, tol=tol)
    if "pstoch_rows" in obj:
        return measurements.MeasurementMap(
            frame, np.asarray(obj["pstoch_rows"], dtype=float), labels)
    raise ValidationError("measurement file needs 'effects' or 'pstoch_rows'")


def _load_generator(path, tol):
    obj = load_json(path)
    frame = resolve_frame(obj["frame"], tol=tol) if "frame" in obj \
        else build_sic_qubit(tol)
    if "hamiltonian" in obj or "noise_ops" in obj:
        h = pairs_to_complex(obj["hamiltonian"]) if "hamiltonian" in obj \
            else np.zeros((frame.dim, frame.dim))
        noise = [pairs_to_complex(v) for v in obj.get("noise_ops", [])]
        return dynamics.gksl_generator(h, noise, frame)
    if "matrix" in obj:
        return dynamics.GeneratorMatrix(
            frame, np.asarray(obj["matrix"], dtype=float), obj.get("kind", "gksl"))
    raise ValidationError("model file needs 'hamiltonian'/'noise_ops' or 'matrix'")


def _emit(obj, out):
    if out:
        dump_json(obj, out)
    else:
        import json
        print(json.dumps(obj, indent=1, sort_keys=True))


def _print_verdict(verdict, prefix=""):
    status = "physical" if verdict.is_physical else "not physical"
    if verdict.boundary and verdict.is_physical:
        status += " (boundary)"
    print(f"{prefix}{status}; effective degree {verdict.effective_degree}; "
          f"minors {[format_float(m) for m in verdict.minors]}")
    if verdict.failure_reason:
        print(f"{prefix}reason: {verdict.failure_reason}")


# ---------------------------------------------------------------------------
# frame commands
# ---------------------------------------------------------------------------

def cmd_frame_build_sic(args):
    if args.dim != 2:
        raise ValidationError("built-in SIC construction supports --dim 2 only")
    frame = build_sic_qubit(args.tol)
    _emit(frame_to_obj(frame), args.out)
    return 0


def cmd_frame_validate(args):
    frame = frame_from_obj(load_json(args.file), tol=args.tol)
    print(f"valid MIC-POVM frame: dim {frame.dim}, {frame.size} effects, "
          f"Gram condition number {format_float(frame.condition_number)}")
    return 0


def cmd_frame_tensor(args):
    a = frame_from_obj(load_json(args.a), tol=args.tol)
    b = frame_from_obj(load_json(args.b), tol=args.tol)
    _emit(frame_to_obj(tensor(a, b)), args.out)
    return 0


# ---------------------------------------------------------------------------
# state commands
# ---------------------------------------------------------------------------

def cmd_state_to_prob(args):
    pv = _load_state(args.file, args.tol)
    _emit(serialize.state_to_obj(pv), args.out)
    return 0


def cmd_state_from_prob(args):
    pv = _load_state(args.file, args.tol)
    rho = states.from_prob(pv)
    _emit(serialize.operator_to_obj(rho, pv.frame), args.out)
    return 0


def cmd_state_check(args):
    pv = _load_state(args.file, args.tol)
    _print_verdict(states.is_physical(pv, tol=args.tol))
    return 0


def cmd_state_purity(args):
    pv = _load_state(args.file, args.tol)
    purity = states.hs_inner(pv, pv)
    pure = states.is_pure(pv, tol=max(args.tol, 1e-8))
    print(f"purity {format_float(purity)}; {'pure' if pure else 'mixed'}")
    return 0


# ---------------------------------------------------------------------------
# channel commands
# ---------------------------------------------------------------------------

def cmd_channel_to_pstoch(args):
    smap = _load_channel(args.file, args.tol)
    _emit({"pstoch": serialize.matrix_to_obj(smap.matrix),
           "in_frame": frame_to_obj(smap.in_frame),
           "out_frame": frame_to_obj(smap.out_frame)}, args.out)
    return 0


def cmd_channel_apply(args):
    smap = _load_channel(args.file, args.tol)
    pv = _load_state(args.state, args.tol)
    _emit(serialize.state_to_obj(channels.map_apply(smap, pv)), args.out)
    return 0


def cmd_channel_check(args):
    smap = _load_channel(args.file, args.tol)
    verdict = channels.is_cptp(smap, tol=args.tol)
    _print_verdict(verdict, prefix="CPTP: " if verdict.is_physical else "not CPTP: ")
    return 0


def cmd_channel_choi(args):
    smap = _load_channel(args.file, args.tol)
    choi = channels.choi_prob(smap)
    _emit({"choi": choi.components.tolist(),
           "in_frame": frame_to_obj(choi.in_frame),
           "out_frame": frame_to_obj(choi.out_frame)}, args.out)
    return 0


# ---------------------------------------------------------------------------
# measurement commands
# ---------------------------------------------------------------------------

def cmd_measure_probs(args):
    mmap = _load_measurement(args.file, args.tol)
    pv = _load_state(args.state, args.tol)
    q = measurements.outcome_probs(mmap, pv)
    for label, value in zip(mmap.labels, q):
        print(f"{label},{format_float(value)}")
    return 0


def cmd_measure_check(args):
    mmap = _load_measurement(args.file, args.tol)
    verdicts = measurements.is_valid_measurement(mmap, tol=args.tol)
    for label, verdict in zip(mmap.labels, verdicts):
        _print_verdict(verdict, prefix=f"effect {label}: ")
    print("valid measurement" if all(v.is_physical for v in verdicts)
          else "invalid measurement")
    return 0


def cmd_measure_mean(args):
    obj = load_json(args.file)
    frame = resolve_frame(obj["frame"], tol=args.tol)
    if "operator" not in obj:
        raise ValidationError("observable file needs an 'operator' field")
    obs = measurements.observable_from_operator(
        pairs_to_complex(obj["operator"]), frame, tol=args.tol)
    pv = _load_state(args.state, args.tol)
    print(format_float(measurements.observable_mean(obs, pv)))
    return 0


# ---------------------------------------------------------------------------
# dynamics commands
# ---------------------------------------------------------------------------

def cmd_dyn_generator(args):
    gen = _load_generator(args.file, args.tol)
    _emit({"matrix": serialize.matrix_to_obj(gen.matrix), "kind": gen.kind,
           "frame": frame_to_obj(gen.frame)}, args.out)
    return 0


def cmd_dyn_evolve(args):
    gen = _load_generator(args.file, args.tol)
    pv = _load_state(args.state, args.tol)
    out = dynamics.evolve(gen, pv, args.t)
    _emit(serialize.state_to_obj(out), args.out)
    return 0


def cmd_dyn_check_generator(args):
    gen = _load_generator(args.file, args.tol)
    verdict = dynamics.is_gksl_generator(gen, tol=args.tol)
    print("valid GKSL generator" if verdict.is_physical
          else "not a GKSL generator")
    _print_verdict(verdict, prefix="  conditional positivity: ")
    return 0


def cmd_dyn_project_unitary(args):
    gen = _load_generator(args.file, args.tol)
    projected = dynamics.project_unitary(gen.matrix, gen.frame)
    _emit({"matrix": serialize.matrix_to_obj(projected.matrix),
           "kind": projected.kind, "frame": frame_to_obj(gen.frame)}, args.out)
    return 0


def cmd_dyn_table(args):
    names = dynamics.CHANNEL_NAMES if args.channel == "all" else (args.channel,)
    rows = []
    for name in names:
        matrix = dynamics.standard_channel_matrix(name, args.t, tau=args.tau,
                                                  omega=args.omega)
        for i, row in enumerate(matrix):
            rows.append([name, i] + [float(v) for v in row])
    header = ["channel", "row", "c0", "c1", "c2", "c3"]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(format_float(v) if isinstance(v, float) else str(v)
                           for v in row))
    return 0


# ---------------------------------------------------------------------------
# classicality commands
# ---------------------------------------------------------------------------

def _optimizer_config(args):
    kwargs = {}
    if args.restarts is not None:
        kwargs["restarts"] = args.restarts
    if args.max_iterations is not None:
        kwargs["max_iterations"] = args.max_iterations
    if args.tau_tol is not None:
        kwargs["tau_tol"] = args.tau_tol
    return classicality.OptimizerConfig(**kwargs)


def cmd_classicality_tau_crit(args):
    cfg = _optimizer_config(args)
    result = classicality.tau_crit(args.kind, args.theta, args.family, cfg,
                                   seed=args.seed)
    line = (f"{format_float(args.theta)},{format_float(result.tau_crit)},"
            f"{result.family},{result.kind},{args.seed},{result.evaluations}")
    print("theta,tau_crit,family,kind,seed,evaluations")
    print(line)
    if args.out:
        write_csv(args.out, ["theta", "tau_crit", "family", "kind", "seed",
                             "evaluations"],
                  [[args.theta, result.tau_crit, result.family, result.kind,
                    args.seed, result.evaluations]])
    return 0


def _parse_grid(spec):
    try:
        start, stop, count = spec.split(":")
        return np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ValidationError(f"grid must be start:stop:count, got {spec!r}") from exc


def cmd_classicality_scan(args):
    cfg = _optimizer_config(args)
    grid = _parse_grid(args.theta_grid)
    rows = classicality.scan(args.kind, grid, args.family, cfg, seed=args.seed)
    table = [[r["theta"], r["tau_crit"], r["family"], r["kind"], r["seed"],
              r["evaluations"]] for r in rows]
    header = ["theta", "tau_crit", "family", "kind", "seed", "evaluations"]
    if args.out:
        write_csv(args.out, header, table)
    else:
        print(",".join(header))
        for row in table:
            print(",".join(format_float(v) if isinstance(v, float) else str(v)
                           for v in row))
    return 0


# ---------------------------------------------------------------------------
# circuit commands
# ---------------------------------------------------------------------------

def cmd_circuit_run(args):
    program = serialize.program_from_obj(load_json(args.file))
    if args.emit_trace:
        final, record, trace = circuits.run(program, return_trace=True)
        rows = []
        for step, (label, vector) in enumerate(trace):
            rows.append([step, label] + [float(v) for v in vector])
        width = max(len(r) for r in rows) - 2
        header = ["step", "op"] + [f"p{i}" for i in range(width)]
        write_csv(args.emit_trace, header, rows)
    else:
        final, record = circuits.run(program)
    print("bitstring,probability")
    for bits, prob in record.as_dict().items():
        print(f"{bits},{format_float(prob)}")
    if args.shots:
        rng = np.random.default_rng(args.seed)
        counts = circuits.sample(record, args.shots, rng)
        print("bitstring,count")
        for bits in sorted(counts):
            print(f"{bits},{counts[bits]}")
        if args.out:
            write_csv(args.out, ["bitstring", "count"],
                      [[b, c] for b, c in sorted(counts.items())])
    elif args.out:
        write_csv(args.out, ["bitstring", "probability"],
                  [[b, float(p)] for b, p in record.as_dict().items()])
    return 0


def cmd_circuit_gate_table(args):
    smap = circuits.gate_map(args.gate)
    rows = [[i] + [float(v) for v in row] for i, row in enumerate(smap.matrix)]
    header = ["row"] + [f"c{i}" for i in range(smap.matrix.shape[1])]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(format_float(v) if isinstance(v, float) else str(v)
                           for v in row))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="micrep",
        description="Probability representation of quantum dynamics over "
                    "MIC-POVM frames")
    groups = parser.add_subparsers(dest="group", required=True)

    frame = groups.add_parser("frame").add_subparsers(dest="command", required=True)
    p = _common(frame.add_parser("build-sic"))
    p.add_argument("--dim", type=int, default=2)
    p.set_defaults(func=cmd_frame_build_sic)
    p = _common(frame.add_parser("validate"))
    p.add_argument("file")
    p.set_defaults(func=cmd_frame_validate)
    p = _common(frame.add_parser("tensor"))
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_frame_tensor)

    state = groups.add_parser("state").add_subparsers(dest="command", required=True)
    for name, func in [("to-prob", cmd_state_to_prob),
                       ("from-prob", cmd_state_from_prob),
                       ("check", cmd_state_check), ("purity", cmd_state_purity)]:
        p = _common(state.add_parser(name))
        p.add_argument("file")
        p.set_defaults(func=func)

    channel = groups.add_parser("channel").add_subparsers(dest="command",
                                                          required=True)
    p = _common(channel.add_parser("to-pstoch"))
    p.add_argument("file")
    p.set_defaults(func=cmd_channel_to_pstoch)
    p = _common(channel.add_parser("apply"))
    p.add_argument("file")
    p.add_argument("state")
    p.set_defaults(func=cmd_channel_apply)
    p = _common(channel.add_parser("check"))
    p.add_argument("file")
    p.set_defaults(func=cmd_channel_check)
    p = _common(channel.add_parser("choi"))
    p.add_argument("file")
    p.set_defaults(func=cmd_channel_choi)

    measure = groups.add_parser("measure").add_subparsers(dest="command",
                                                          required=True)
    p = _common(measure.add_parser("probs"))
    p.add_argument("file")
    p.add_argument("state")
    p.set_defaults(func=cmd_measure_probs)
    p = _common(measure.add_parser("check"))
    p.add_argument("file")
    p.set_defaults(func=cmd_measure_check)
    p = _common(measure.add_parser("mean"))
    p.add_argument("file")
    p.add_argument("state")
    p.set_defaults(func=cmd_measure_mean)

    dyn = groups.add_parser("dyn").add_subparsers(dest="command", required=True)
    p = _common(dyn.add_parser("generator"))
    p.add_argument("file")
    p.set_defaults(func=cmd_dyn_generator)
    p = _common(dyn.add_parser("evolve"))
    p.add_argument("file")
    p.add_argument("state")
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_dyn_evolve)
    p = _common(dyn.add_parser("check-generator"))
    p.add_argument("file")
    p.set_defaults(func=cmd_dyn_check_generator)
    p = _common(dyn.add_parser("project-unitary"))
    p.add_argument("file")
    p.set_defaults(func=cmd_dyn_project_unitary)
    p = _common(dyn.add_parser("table"))
    p.add_argument("--channel", default="all",
                   choices=("all",) + dynamics.CHANNEL_NAMES)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=cmd_dyn_table)

    cls = groups.add_parser("classicality").add_subparsers(dest="command",
                                                           required=True)
    for name, func in [("tau-crit", cmd_classicality_tau_crit),
                       ("scan", cmd_classicality_scan)]:
        p = _common(cls.add_parser(name))
        p.add_argument("--kind", required=True, choices=classicality.MODEL_KINDS)
        p.add_argument("--family", required=True, choices=("sic", "pmic", "mic"))
        p.add_argument("--restarts", type=int, default=None)
        p.add_argument("--max-iterations", type=int, default=None)
        p.add_argument("--tau-tol", type=float, default=None)
        if name == "tau-crit":
            p.add_argument("--theta", type=float, required=True)
        else:
            p.add_argument("--theta-grid", required=True,
                           help="grid as start:stop:count")
        p.set_defaults(func=func)

    circ = groups.add_parser("circuit").add_subparsers(dest="command",
                                                       required=True)
    p = _common(circ.add_parser("run"))
    p.add_argument("file")
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--emit-trace", default=None)
    p.set_defaults(func=cmd_circuit_run)
    p = _common(circ.add_parser("gate-table"))
    p.add_argument("--gate", required=True)
    p.set_defaults(func=cmd_circuit_gate_table)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MicRepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
