"""``nhxy`` command line: point, sweep, phase-diagram, spectrum, winding, oracle."""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import sys

from . import runner
from .contractions import DEFAULT_N_EFF, Backend, Convention, contraction_table
from .correlation import correlator_x
from .entanglement import entanglement_entropy
from .model import ModelParams, ground_energy
from .oracle import MAX_SITES, build_hamiltonian, ed_ground_state, ed_observables
from .spectrum import band_extrema, critical_mode, full_bands
from .topology import winding_number

log = logging.getLogger("nhxy")

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2
OBSERVABLE_TOKENS = ("phase", "winding", "extrema")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _complex_pair(text):
    try:
        re, im = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}")
    return complex(re, im)


def _common(p):
    g = p.add_argument_group("model and output")
    g.add_argument("--config", help="JSON file whose keys mirror the long flags")
    g.add_argument("--gamma", type=float, default=1.0)
    g.add_argument("--lambda-mod", type=float)
    g.add_argument("--lambda-arg", type=float, help="radians")
    g.add_argument("--lambda-re", type=float)
    g.add_argument("--lambda-im", type=float)
    g.add_argument("--convention", choices=[c.value for c in Convention], default="biorthogonal")
    g.add_argument("--backend", choices=[b.value for b in Backend], default="finite-sum")
    g.add_argument("--n-eff", type=int, default=DEFAULT_N_EFF)
    g.add_argument("--out", default="-", help="output path, '-' for stdout")
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--no-timestamp", action="store_true", help="omit the generated-at header")
    g.add_argument("-v", "--verbose", action="store_true")


def _observable_flags(p, default="phase"):
    p.add_argument("--r", type=_int_list, default=(), help="correlator separations, e.g. 1,2,10")
    p.add_argument("--L", type=_int_list, default=(), help="entropy block sizes")
    p.add_argument("--observables", default=default,
                   help="comma list from phase,winding,extrema or 'all' (may be empty)")
    p.add_argument("--resolution", type=int, default=1024)
    p.add_argument("--winding-samples", type=int, default=1024)
    p.add_argument("--tol", type=float, default=1e-9, help="phase-boundary tolerance")


def build_parser():
    parser = _Parser(prog="nhxy", description="Non-Hermitian XY chain in a complex transverse field.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("point", help="observables at one (gamma, lambda)")
    _common(p)
    _observable_flags(p)
    p.add_argument("--n", type=int, help="finite chain length (default: thermodynamic limit)")

    p = sub.add_parser("sweep", help="observables along a ray or a segment in the lambda plane")
    _common(p)
    _observable_flags(p)
    p.add_argument("--ray-phi", type=float, help="ray angle in radians")
    p.add_argument("--lambda0-min", type=float)
    p.add_argument("--lambda0-max", type=float)
    p.add_argument("--segment-start", type=_complex_pair, help="RE,IM")
    p.add_argument("--segment-end", type=_complex_pair, help="RE,IM")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--derivatives", action="store_true", help="add d/dparam of the Re columns")
    p.add_argument("--gnuplot", help="write a companion gnuplot script here")

    p = sub.add_parser("phase-diagram", help="phase label per cell of a Re x Im lambda grid")
    _common(p)
    p.add_argument("--re-min", type=float, default=-2.0)
    p.add_argument("--re-max", type=float, default=2.0)
    p.add_argument("--im-min", type=float, default=-2.0)
    p.add_argument("--im-max", type=float, default=2.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--winding", action="store_true", help="also compute W per cell")
    p.add_argument("--winding-samples", type=int, default=1024)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("spectrum", help="complex band energies and their extrema")
    _common(p)
    p.add_argument("--resolution", type=int, default=512)

    p = sub.add_parser("winding", help="EP winding number at one point")
    _common(p)
    p.add_argument("--winding-samples", type=int, default=1024)

    p = sub.add_parser("oracle", help="free-fermion vs exact diagonalization on a small ring")
    _common(p)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--r-max", type=int, default=2)
    p.add_argument("--L-max", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-8)
    return parser


def _config_defaults(parser, argv):
    """Reparse with defaults taken from ``--config`` so explicit flags still win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config file must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest in ("command", "config"):
            continue
        if dest not in known:
            parser.error(f"unknown config key {key!r} for '{args.command}'")
        action = known[dest]
        if isinstance(value, list) and dest in ("r", "L"):
            value = tuple(int(v) for v in value)
        elif isinstance(value, list) and dest in ("segment_start", "segment_end"):
            value = complex(*value)
        elif isinstance(value, str) and action.type is not None and action.type not in (str,):
            value = action.type(value)
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _lambda(args, required=True):
    polar = args.lambda_mod is not None or args.lambda_arg is not None
    cart = args.lambda_re is not None or args.lambda_im is not None
    if polar and cart:
        raise ConfigError("give lambda either as --lambda-mod/--lambda-arg or --lambda-re/--lambda-im")
    if polar:
        mod = args.lambda_mod if args.lambda_mod is not None else 0.0
        arg = args.lambda_arg or 0.0
        if mod < 0:
            raise ConfigError("--lambda-mod must be non-negative")
        return complex(mod * math.cos(arg), mod * math.sin(arg))
    if cart:
        return complex(args.lambda_re or 0.0, args.lambda_im or 0.0)
    if required:
        raise ConfigError("lambda is required (--lambda-mod/--lambda-arg or --lambda-re/--lambda-im)")
    return None


def _observables(args):
    tokens = {t.strip() for t in args.observables.split(",") if t.strip()}
    if "all" in tokens:
        tokens = (tokens - {"all"}) | set(OBSERVABLE_TOKENS)
    bad = tokens - set(OBSERVABLE_TOKENS)
    if bad:
        raise ConfigError(f"unknown observables {sorted(bad)}; choose from {OBSERVABLE_TOKENS}")
    if any(r < 0 for r in args.r) or any(L < 1 for L in args.L):
        raise ConfigError("--r must be >= 0 and --L must be >= 1")
    return runner.ObservableSet(tuple(args.r), tuple(args.L), "winding" in tokens,
                                "extrema" in tokens, "phase" in tokens)


def _run_config(args, observables=runner.ObservableSet(), n=None):
    if args.n_eff < 2:
        raise ConfigError("--n-eff must be >= 2")
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    return runner.RunConfig(
        observables=observables,
        convention=Convention(args.convention),
        backend=Backend(args.backend),
        n_eff=args.n_eff,
        resolution=getattr(args, "resolution", 1024),
        workers=args.workers,
        tol=getattr(args, "tol", 1e-9),
        winding_samples=getattr(args, "winding_samples", 1024),
        n=n,
    )


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _meta(args):
    skip = {"config", "out", "verbose", "no_timestamp", "workers"}
    meta = {}
    for k, v in vars(args).items():
        if k in skip:
            continue
        meta[k] = [v.real, v.imag] if isinstance(v, complex) else (list(v) if isinstance(v, tuple) else v)
    return meta


def _emit_points(args, points, obs, derivatives=False, phase_grid=False):
    with _output(args.out) as fh:
        if args.format == "json":
            runner.write_json(fh, points, _meta(args), timestamp=not args.no_timestamp)
        elif phase_grid:
            runner.write_phase_csv(fh, points, timestamp=not args.no_timestamp)
        else:
            runner.write_points_csv(fh, points, obs, timestamp=not args.no_timestamp,
                                    derivatives=derivatives)
    for p in points:
        if p.error:
            log.error("row %d failed: %s", p.index, p.error)
    return EXIT_PARTIAL if runner.failed(points) else EXIT_OK


def cmd_point(args):
    lam = _lambda(args)
    obs = _observables(args)
    config = _run_config(args, obs, n=args.n)
    ModelParams(args.gamma, lam, args.n)
    point = runner.evaluate_tasks([(0, math.nan, args.gamma, lam, config)])[0]
    return _emit_points(args, [point], obs)


def cmd_sweep(args):
    obs = _observables(args)
    ray = args.ray_phi is not None
    seg = args.segment_start is not None or args.segment_end is not None
    if ray == seg:
        raise ConfigError("give exactly one path: --ray-phi with --lambda0-min/max, "
                          "or --segment-start with --segment-end")
    try:
        if ray:
            if args.lambda0_min is None or args.lambda0_max is None:
                raise ConfigError("a ray needs --lambda0-min and --lambda0-max")
            path = runner.Ray(args.ray_phi, args.lambda0_min, args.lambda0_max, args.steps)
        else:
            if args.segment_start is None or args.segment_end is None:
                raise ConfigError("a segment needs --segment-start and --segment-end")
            path = runner.Segment(args.segment_start, args.segment_end, args.steps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ModelParams(args.gamma, 0j)
    points = runner.run_sweep(path, args.gamma, _run_config(args, obs))
    code = _emit_points(args, points, obs, derivatives=args.derivatives)
    if args.gnuplot:
        if args.out in (None, "-") or args.format != "csv":
            raise ConfigError("--gnuplot needs a CSV --out file")
        with open(args.gnuplot, "w", encoding="utf-8") as fh:
            fh.write(runner.gnuplot_script(args.out, obs))
    return code


def cmd_phase_diagram(args):
    if args.step <= 0:
        raise ConfigError("--step must be positive")
    grid = runner.PhaseGrid(args.re_min, args.re_max, args.im_min, args.im_max, args.step)
    try:
        grid.axes()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ModelParams(args.gamma, 0j)
    obs = runner.ObservableSet(phase=True, winding=args.winding)
    points = runner.run_phase_diagram(grid, args.gamma, _run_config(args, obs))
    return _emit_points(args, points, obs, phase_grid=True)


def cmd_spectrum(args):
    params = ModelParams(args.gamma, _lambda(args))
    bands = full_bands(params, args.resolution)
    ext = band_extrema(params, max(args.resolution, 64))
    crit = critical_mode(params)
    with _output(args.out) as fh:
        if args.format == "json":
            doc = {"schema": runner.SCHEMA_VERSION, "meta": _meta(args),
                   "extrema": vars(ext), "critical_mode": vars(crit),
                   "im_sign_changes": list(bands.sign_changes),
                   "bands": [{"k": k, "re_energy": re, "im_energy": im} for k, re, im in bands.rows()]}
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        else:
            rows = [{"k": runner.format_value(k), "re_energy": runner.format_value(re), "im_energy": runner.format_value(im)}
                    for k, re, im in bands.rows()]
            runner.write_csv(fh, ["k", "re_energy", "im_energy"], rows, not args.no_timestamp)
    return EXIT_OK


def cmd_winding(args):
    params = ModelParams(args.gamma, _lambda(args))
    res = winding_number(params, args.winding_samples)
    row = {"re_lambda": params.lam.real, "im_lambda": params.lam.imag, "gamma": params.gamma,
           "w": res.value, "raw": res.raw, "min_radius": res.min_radius,
           "on_boundary": res.on_boundary, "samples": res.samples, "defined": res.defined}
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump({"schema": runner.SCHEMA_VERSION,
                       "winding": {k: runner.json_value(v) for k, v in row.items()}}, fh, indent=1)
            fh.write("\n")
        else:
            cols = list(row)
            runner.write_csv(fh, cols, [{k: runner.format_value(v) if not isinstance(v, bool) else str(v).lower()
                                         for k, v in row.items()}], not args.no_timestamp)
    return EXIT_OK


def oracle_comparison(params: ModelParams, r_max: int, L_max: int):
    """Rows ``(quantity, index, ed, free_fermion)`` for energy, ``C^x_r`` and ``S_L``."""
    state = ed_ground_state(build_hamiltonian(params))
    ed = ed_observables(state, r_max, L_max)
    table = contraction_table(params, max(r_max, L_max - 1, 1))
    rows = [("energy", 0, state.energy, ground_energy(params))]
    rows += [("cx", r, ed.cx[r], correlator_x(table, r).value) for r in sorted(ed.cx)]
    rows += [("entropy", L, ed.entropy[L].value, entanglement_entropy(table, L).value)
             for L in sorted(ed.entropy)]
    return rows


def cmd_oracle(args):
    if not 2 <= args.n <= MAX_SITES or args.n % 2:
        raise ConfigError(f"--n must be even and within [2, {MAX_SITES}]")
    params = ModelParams(args.gamma, _lambda(args), args.n)
    rows = oracle_comparison(params, args.r_max, args.L_max)
    worst = max(abs(e - f) for _, _, e, f in rows)
    out = [{"quantity": q, "index": str(i), "re_ed": runner.format_value(e.real), "im_ed": runner.format_value(e.imag),
            "re_ff": runner.format_value(f.real), "im_ff": runner.format_value(f.imag), "abs_diff": runner.format_value(abs(e - f))}
           for q, i, e, f in rows]
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump({"schema": runner.SCHEMA_VERSION, "meta": _meta(args), "max_abs_diff": worst,
                       "rows": out}, fh, indent=1)
            fh.write("\n")
        else:
            runner.write_csv(fh, list(out[0]), out, not args.no_timestamp)
    if worst > args.tol:
        log.error("oracle mismatch %.3e exceeds tolerance %.1e", worst, args.tol)
        return EXIT_PARTIAL
    return EXIT_OK


COMMANDS = {
    "point": cmd_point,
    "sweep": cmd_sweep,
    "phase-diagram": cmd_phase_diagram,
    "spectrum": cmd_spectrum,
    "winding": cmd_winding,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _config_defaults(parser, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"nhxy {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"nhxy {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
