"""Command-line entry point.

Exit codes: 0 on success, 1 on invalid input, 2 on numerical failure.
Errors go to stderr, as JSON with ``--json-errors``.
"""

import argparse
import json
import os
import sys as _sys

import numpy as np

from . import io
from .analysis import rms_gain_bound, settle_time, simulate_interconnection, steady_state_row
from .bench import FSSConfig, run_benchmark_experiment, stage
from .errors import LSMMError, ValidationError
from .generator import build_generator, build_transform
from .moments import ls_index, moments
from .reduction import DOMINANCE, admissibility_residuals, check_admissible, dominant_parameters, ls_family


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for numerical failures here
    def error(self, message):
        self.print_usage(_sys.stderr)
        raise ValidationError(message, stage="cli")


def _floats(text):
    try:
        return np.array([float(x) for x in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ValidationError(f"expected a comma-separated list of numbers: {text!r}", stage="cli") from exc


def _require_files(*paths):
    for p in paths:
        if p is None:
            raise ValidationError("--model and --spec are required", stage="cli")
        if not os.path.isfile(p):
            raise ValidationError(f"no such file: {p}", stage="cli")


def _load_model(path, reduced=False):
    return io.model_from_dict(io.load_json(path), reduced=reduced)


def _load_spec(path):
    return io.spec_from_dict(io.load_json(path))


def _emit(obj, out):
    text = io.dumps(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def _cplx(v):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


def cmd_moments(args):
    _require_files(args.model, args.spec)
    sysm = _load_model(args.model)
    spec = _load_spec(args.spec)
    with stage("moments"):
        mv = moments(sysm, spec)
    lines = [f"{'point':>24}  {'order':>5}  {'re':>24}  {'im':>24}"]
    for (s, j), eta in zip(mv.layout, mv.entries):
        pt = f"{io.fmt(s.real)}{'+' if s.imag >= 0 else '-'}{io.fmt(abs(s.imag))}j"
        lines.append(f"{pt:>24}  {j:>5}  {io.fmt(eta.real):>24}  {io.fmt(eta.imag):>24}")
    _sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_reduce(args):
    if args.order < 1:
        raise ValidationError("order must be ≥ 1", stage="cli")
    _require_files(args.model, args.spec)
    sysm = _load_model(args.model)
    spec = _load_spec(args.spec)
    with stage("generator"):
        gen = build_generator(spec)
        xf = build_transform(gen, spec)
    with stage("parameters"):
        params, info = dominant_parameters(sysm, gen, xf, args.order, dominance=args.dominance)
    with stage("reduction"):
        model = ls_family(sysm, gen, xf, params, check=False)
        violations = check_admissible(params, gen)
    with stage("analysis"):
        index = ls_index(sysm, model, spec)
        R = steady_state_row(sysm, model, gen)
    report = {
        "ls_index": index,
        "bound": float(np.linalg.norm(R)),
        "spectrum_F": _cplx(np.linalg.eigvals(model.F)),
        "admissibility": admissibility_residuals(params, gen),
        "violations": [str(v) for v in violations],
        "placement_error": info["placement_error"],
        "placement_method": info["placement_method"],
    }
    _emit({**io.model_to_dict(model), "report": report}, args.out)
    return 0


def _omega0(args, gen):
    w0 = gen.L.ravel().copy() if args.omega0 is None else _floats(args.omega0)
    if w0.size != gen.nu:
        raise ValidationError(f"omega0 needs {gen.nu} entries, got {w0.size}", stage="cli")
    return w0


def cmd_analyze(args):
    _require_files(args.model, args.reduced, args.spec)
    sysm = _load_model(args.model)
    model = _load_model(args.reduced, reduced=True)
    spec = _load_spec(args.spec)
    gen = build_generator(spec)
    w0 = _omega0(args, gen)
    report = rms_gain_bound(sysm, model, gen, omega0=w0)
    if args.timeseries:
        _write_timeseries(args, sysm, model, gen, w0, report.R)
    _emit(report.as_dict(), args.out)
    return 0


def _write_timeseries(args, sysm, model, gen, w0, R):
    horizon = args.horizon if args.horizon else 2 * settle_time(sysm, model)
    if not np.isfinite(horizon):
        raise ValidationError("give --horizon when the error system is not stable", stage="cli")
    step = args.step if args.step else horizon / 2000
    with stage("simulation"):
        sim = simulate_interconnection(sysm, model, gen, w0, horizon, step)
    pred = sim.omega @ np.asarray(R).ravel()
    io.write_timeseries_csv(args.timeseries, sim.t, sim.e, pred)
    return sim, pred


def cmd_simulate(args):
    _require_files(args.model, args.reduced, args.spec)
    sysm = _load_model(args.model)
    model = _load_model(args.reduced, reduced=True)
    spec = _load_spec(args.spec)
    gen = build_generator(spec)
    w0 = _omega0(args, gen)
    if not args.timeseries:
        raise ValidationError("simulate needs --timeseries", stage="cli")
    R = steady_state_row(sysm, model, gen)
    sim, pred = _write_timeseries(args, sysm, model, gen, w0, R)
    tail = sim.t >= 0.5 * sim.t[-1]
    _emit({
        "samples": int(sim.t.size),
        "horizon": float(sim.t[-1]),
        "max_abs_e": float(np.max(np.abs(sim.e))),
        "max_tail_deviation": float(np.max(np.abs(sim.e[tail] - pred[tail]))),
        "error_system_stable": bool(np.isfinite(settle_time(sysm, model))),
        "timeseries": args.timeseries,
    }, args.out)
    return 0


def cmd_bench(args):
    if args.order < 1:
        raise ValidationError("order must be ≥ 1", stage="cli")
    if args.modes < 1:
        raise ValidationError("modes must be ≥ 1", stage="cli")
    cfg = FSSConfig(K=args.modes, seed=args.seed)
    res = run_benchmark_experiment(cfg, order=args.order, dominance=args.dominance, out_dir=args.out)
    _sys.stdout.write(io.dumps(res.as_dict()))
    return 0


def build_parser():
    p = _Parser(prog="lsmm", description="Least-squares moment matching model reduction.")
    p.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("moments", help="print moments of a model at the interpolation points")
    m.add_argument("--model", required=True, help="model JSON with keys A, B, C")
    m.add_argument("--spec", required=True, help="spec JSON: {\"points\": [{\"re\", \"im\", \"order\"}]}")
    m.set_defaults(func=cmd_moments)

    r = sub.add_parser("reduce", help="reduce a model by least-squares moment matching")
    r.add_argument("--model", help="model JSON with keys A, B, C")
    r.add_argument("--spec", help="interpolation spec JSON")
    r.add_argument("--order", type=int, required=True, help="reduced order r (>= 1)")
    r.add_argument("--dominance", choices=DOMINANCE, default="real",
                   help="eigenvalue ordering for preservation (default: real)")
    r.add_argument("--out", help="write JSON here instead of stdout")
    r.set_defaults(func=cmd_reduce)

    for name, helptext, func in (("analyze", "steady-state error report and r.m.s. bound", cmd_analyze),
                                 ("simulate", "simulate the error system and write a time series", cmd_simulate)):
        a = sub.add_parser(name, help=helptext)
        a.add_argument("--model", required=True, help="full model JSON (A, B, C)")
        a.add_argument("--reduced", required=True, help="reduced model JSON (F, G, H)")
        a.add_argument("--spec", required=True, help="interpolation spec JSON (defines S, L)")
        a.add_argument("--omega0", help="generator initial state, comma separated (default: L^T)")
        a.add_argument("--timeseries", help="CSV path for t,e,e_ss_pred")
        a.add_argument("--horizon", type=float, help="simulation horizon (default: 20 slowest time constants)")
        a.add_argument("--step", type=float, help="simulation step (default: horizon/2000)")
        a.add_argument("--out", help="write JSON here instead of stdout")
        a.set_defaults(func=func)

    b = sub.add_parser("bench", help="flexible-structure benchmark experiment")
    b.add_argument("--modes", type=int, default=30, help="number of modes K (default 30)")
    b.add_argument("--seed", type=int, default=1009, help="PRNG seed (default 1009)")
    b.add_argument("--order", type=int, default=10, help="reduced order (default 10)")
    b.add_argument("--dominance", choices=DOMINANCE, default="real")
    b.add_argument("--out", help="directory for JSON/CSV artefacts")
    b.set_defaults(func=cmd_bench)
    return p


def _report(exc, json_errors):
    if json_errors:
        payload = {"error": {"stage": exc.stage, "reason": exc.reason, "message": str(exc)}}
        _sys.stderr.write(json.dumps(payload) + "\n")
    else:
        _sys.stderr.write(f"lsmm: {exc.stage}: {exc.reason}: {exc}\n")


def main(argv=None):
    argv = list(_sys.argv[1:] if argv is None else argv)
    # accepted anywhere on the command line, before or after the subcommand
    json_errors = "--json-errors" in argv
    argv = [a for a in argv if a != "--json-errors"]
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        _report(exc, json_errors)
        return 1
    except LSMMError as exc:
        _report(exc, json_errors)
        return 2
    except (OSError, ValueError) as exc:
        _report(ValidationError(str(exc), stage="cli"), json_errors)
        return 1
    except np.linalg.LinAlgError as exc:
        _report(LSMMError(str(exc), stage="linalg"), json_errors)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
