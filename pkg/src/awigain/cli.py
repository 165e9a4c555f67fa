"""
Command-line front end.

Exit codes: 0 success, 1 audit failure, 2 usage or parse error,
3 no root / no optimum.
"""

import argparse
import itertools
import math
import os
import re
import sys

from . import __version__
from . import analysis
from .errors import (
    AWIError,
    InvalidArgument,
    MoleculeFileError,
    NoRootError,
)
from .gain import GainScenario, ProbeGeometry, gain_general, probe_moment
from .material import (
    FieldConditions,
    feasibility_report,
    field_from_power,
    load_molecules,
    p_from_physical,
    q_from_physical,
)
from .oracle import OracleConfig, dense_gain, mc_mean_cos2
from .orientation import AlignmentParams
from .output import contour_csv, fmt, svg_plot, sweep_csv

EXIT_OK = 0
EXIT_AUDIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NO_RESULT = 3

AUDIT_TOLERANCE = 1e-9
AUDIT_P = (0.01, 0.1, 1.0, 4.0, 10.0, 40.0)
AUDIT_Q = (-5.0, 0.0, 5.0)
AUDIT_PSI = (0.0, math.pi / 4, math.pi / 2)
AUDIT_RATIOS = (0.5, 0.8, 1.2)
AUDIT_MC_POINTS = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (4.0, 0.0, 0.0), (1.0, 2.0, math.pi / 2))

_FIELD_UNITS = {"V/cm": 1.0 / 299.792458, "kV/cm": 1e3 / 299.792458, "statvolt/cm": 1.0}


class UsageError(Exception):
    pass


def parse_geometry(text):
    if text == "parallel":
        return ProbeGeometry.parallel()
    if text == "perpendicular":
        return ProbeGeometry.perpendicular()
    if text.startswith("angle:"):
        try:
            degrees = float(text[len("angle:"):])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad angle in {text!r}") from None
        if not 0 <= degrees <= 90:
            raise argparse.ArgumentTypeError("angle must lie in [0, 90] degrees")
        return ProbeGeometry.from_degrees(degrees)
    raise argparse.ArgumentTypeError(
        f"geometry must be parallel, perpendicular or angle:<deg>, got {text!r}"
    )


def parse_field(text):
    """'300kV/cm' -> statvolt/cm.  A unit is mandatory."""
    m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*(V/cm|kV/cm|statvolt/cm)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(
            f"field needs a value and a unit (V/cm, kV/cm, statvolt/cm), got {text!r}"
        )
    try:
        value = float(m.group(1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number in {text!r}") from None
    return value * _FIELD_UNITS[m.group(2)]


def parse_coupling(text):
    target, sep, mult = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"coupling must look like p_m=4, got {text!r}")
    try:
        return target.strip(), float(mult)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad multiplier in {text!r}") from None


def _add_output_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--output", default=default, help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "svg", "both"),
                        default=argparse.SUPPRESS if suppress else "csv")
    parser.add_argument("--no-timestamp", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="omit the generation-time metadata line")


def _add_model_flags(parser, variable=True):
    if variable:
        parser.add_argument("--variable", choices=analysis.VARIABLES, default="p_g")
        parser.add_argument("--couple", action="append", type=parse_coupling, default=[],
                            metavar="TARGET=MULT", help="tie TARGET to MULT * variable")
        parser.add_argument("--figure", type=int, choices=(1, 3),
                            help="start from the parameters of figure 1 or 3")
    parser.add_argument("--pm", type=float, help="upper-level p")
    parser.add_argument("--pg", type=float, help="lower-level p")
    parser.add_argument("--qm", type=float, help="upper-level q")
    parser.add_argument("--qg", type=float, help="lower-level q")
    parser.add_argument("--pop-ratio", type=float, help="n_m / n_g")
    parser.add_argument("--geometry", type=parse_geometry, help="parallel | perpendicular | angle:<deg>")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    _add_output_flags(common, suppress=True)

    parser = argparse.ArgumentParser(prog="awi-gain", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"awi-gain {__version__}")
    _add_output_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gain", parents=[common], help="single-point gain")
    _add_model_flags(p, variable=False)
    p.add_argument("--n-m", type=float, help="upper-level density (with --n-g replaces --pop-ratio)")
    p.add_argument("--n-g", type=float, help="lower-level density")
    p.add_argument("--sigma0", type=float, help="cross-section in cm^2 for absolute alpha")

    p = sub.add_parser("sweep", parents=[common], help="alpha' along one variable")
    _add_model_flags(p)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=10.0)
    p.add_argument("--count", type=int, default=analysis.FIGURE_RANGE[2])
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("figure", parents=[common], help="reproduce figure 1-4 data")
    p.add_argument("figure_id", type=int, choices=(1, 2, 3, 4))

    for name, text in (("threshold", "zero crossing of alpha'"), ("optimum", "maximum of alpha'")):
        p = sub.add_parser(name, parents=[common], help=text)
        _add_model_flags(p)
        p.add_argument("--low", type=float, default=0.0)
        p.add_argument("--high", type=float, default=10.0)

    p = sub.add_parser("contour", parents=[common], help="iso-gain contour in (p, n_m/n_g)")
    p.add_argument("--level", type=float, action="append",
                   help="alpha' level; repeat for a family (default: the figure levels)")
    p.add_argument("--variable", choices=("p_g", "p_m", "q_g", "q_m"), default="p_g")
    p.add_argument("--couple", action="append", type=parse_coupling, default=[], metavar="TARGET=MULT")
    p.add_argument("--figure", type=int, choices=(2, 4),
                   help="start from the parameters of figure 2 or 4")
    p.add_argument("--qm", type=float)
    p.add_argument("--qg", type=float)
    p.add_argument("--geometry", type=parse_geometry)
    p.add_argument("--start", type=float, default=analysis.FIGURE_RANGE[0])
    p.add_argument("--stop", type=float, default=analysis.FIGURE_RANGE[1])
    p.add_argument("--count", type=int, default=analysis.FIGURE_RANGE[2])

    p = sub.add_parser("physical", parents=[common], help="p and q from physical data")
    p.add_argument("--mu-debye", type=float, required=True)
    p.add_argument("--delta-b-cm3", type=float, default=0.0)
    _add_field_flags(p)

    p = sub.add_parser("feasibility", parents=[common], help="screen molecules from a file")
    p.add_argument("molecule_file")
    _add_field_flags(p)
    p.add_argument("--breakdown", type=parse_field, help="breakdown field, e.g. 500kV/cm")

    p = sub.add_parser("audit", parents=[common], help="compare the library with the oracles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=OracleConfig.sample_count)
    p.add_argument("--shards", type=int, default=1)
    return parser


def _add_field_flags(parser):
    parser.add_argument("--e0", type=parse_field, help="control field, e.g. 300kV/cm")
    parser.add_argument("--temp-k", type=float, default=300.0)
    parser.add_argument("--ac", action="store_true", help="optical (ac) control field")
    parser.add_argument("--omega0", type=float, help="ac field angular frequency, rad/s")
    parser.add_argument("--power-w", type=float, help="ac: laser power, with --spot-radius-cm")
    parser.add_argument("--spot-radius-cm", type=float)


def _field_conditions(args, breakdown=None):
    if args.power_w is not None or args.spot_radius_cm is not None:
        if args.e0 is not None:
            raise UsageError("give either --e0 or --power-w/--spot-radius-cm, not both")
        if args.power_w is None or args.spot_radius_cm is None:
            raise UsageError("--power-w and --spot-radius-cm go together")
        e0 = field_from_power(args.power_w, args.spot_radius_cm)
    elif args.e0 is None:
        raise UsageError("a control field is required: --e0 <value><unit>")
    else:
        e0 = args.e0
    if args.ac and args.omega0 is None:
        raise UsageError("--ac needs --omega0")
    return FieldConditions(
        E0=e0,
        temperature=args.temp_k,
        kind="ac" if args.ac else "dc",
        omega0=args.omega0,
        breakdown_limit=breakdown,
    )


def _model_base(args):
    """(variable, couplings, fixed, geometry) from a figure preset plus overrides."""
    fixed = {}
    variable = getattr(args, "variable", "p_g")
    couplings = list(getattr(args, "couple", []))
    geometry = ProbeGeometry.parallel()
    figure = getattr(args, "figure", None)
    if figure in (1, 3):
        spec = analysis.figure_sweep_spec(figure)
        variable, geometry = spec.variable, spec.geometry
        couplings = list(spec.couplings) + couplings
        fixed.update(spec.fixed)
    elif figure in (2, 4):
        variable, preset, geometry = analysis.figure_contour_setup(figure)
        couplings = list(preset) + couplings
    for flag, key in (("pm", "p_m"), ("pg", "p_g"), ("qm", "q_m"), ("qg", "q_g"),
                      ("pop_ratio", "pop_ratio")):
        value = getattr(args, flag, None)
        if value is not None:
            fixed[key] = value
    if getattr(args, "geometry", None) is not None:
        geometry = args.geometry
    # a coupling given on the command line replaces a preset one for the same target
    merged = {}
    for target, mult in couplings:
        merged[target] = mult
    return variable, tuple(merged.items()), fixed, geometry


def _sweep_spec(args, start, stop, count):
    variable, couplings, fixed, geometry = _model_base(args)
    return analysis.SweepSpec(variable, start, stop, count, couplings=couplings,
                              fixed=fixed, geometry=geometry)


def _check_output(args):
    if args.output:
        directory = os.path.dirname(os.path.abspath(args.output)) or "."
        if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
            raise UsageError(f"cannot write to {args.output}")
    elif args.format == "both":
        raise UsageError("--format both needs --output")


def _emit(args, csv_text, svg_text_fn):
    if args.output:
        root, _ = os.path.splitext(args.output)
        if args.format in ("csv", "both"):
            path = args.output if args.format == "csv" else root + ".csv"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(csv_text)
        if args.format in ("svg", "both"):
            path = args.output if args.format == "svg" else root + ".svg"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(svg_text_fn())
    elif args.format == "svg":
        sys.stdout.write(svg_text_fn())
    else:
        sys.stdout.write(csv_text)


def cmd_gain(args):
    if args.pop_ratio is not None and (args.n_m is not None or args.n_g is not None):
        raise UsageError("use either --pop-ratio or --n-m/--n-g")
    if (args.n_m is None) != (args.n_g is None):
        raise UsageError("--n-m and --n-g go together")
    if args.pm is None or args.pg is None:
        raise UsageError("--pm and --pg are required")
    if args.pop_ratio is None and args.n_m is None:
        raise UsageError("--pop-ratio (or --n-m/--n-g) is required")
    if args.geometry is None:
        raise UsageError("--geometry is required")
    align_m = AlignmentParams(args.pm, args.qm or 0.0)
    align_g = AlignmentParams(args.pg, args.qg or 0.0)
    if args.n_m is not None:
        n_m, n_g = args.n_m, args.n_g
    else:
        n_m, n_g = args.pop_ratio, 1.0
    scenario = GainScenario(n_m, n_g, align_m, align_g, sigma0=args.sigma0)
    result = gain_general(scenario, args.geometry)
    if result.scaled_defined:
        print(f"alpha_scaled={fmt(result.alpha_scaled)}")
    else:
        print("alpha_scaled=undefined")
    if args.sigma0 is not None and args.n_m is not None:
        print(f"alpha_per_cm={fmt(result.alpha)}")
    return EXIT_OK


def _sweep_svg(result, spec):
    return lambda: svg_plot([("", result.points)], spec.variable, "alpha' = alpha / (n_g sigma0)",
                            spec.geometry.label)


def cmd_sweep(args):
    spec = _sweep_spec(args, args.start, args.stop, args.count)
    _check_output(args)
    result = analysis.run_sweep(spec, workers=max(1, args.workers))
    _emit(args, sweep_csv(result, timestamp=not args.no_timestamp), _sweep_svg(result, spec))
    return EXIT_OK


def cmd_figure(args):
    _check_output(args)
    fid = args.figure_id
    if fid in (1, 3):
        spec = analysis.figure_sweep_spec(fid)
        result = analysis.run_sweep(spec)
        result = analysis.SweepResult(result.points, analysis.sweep_metadata(spec, fid))
        svg = lambda: svg_plot([("", result.points)], spec.variable,
                               "alpha' = alpha / (n_g sigma0)", f"Figure {fid}")
        _emit(args, sweep_csv(result, timestamp=not args.no_timestamp), svg)
    else:
        variable, couplings, geometry = analysis.figure_contour_setup(fid)
        contours = analysis.figure_contours(fid)
        meta = analysis.contour_metadata(fid, variable, couplings, geometry)
        svg = lambda: svg_plot([(f"{c.level:g}", c.points) for c in contours], variable,
                               "n_m / n_g", f"Figure {fid}: iso-gain contours")
        _emit(args, contour_csv(contours, meta, timestamp=not args.no_timestamp), svg)
    return EXIT_OK


def cmd_threshold(args):
    spec = _sweep_spec(args, args.low, args.high, 2)
    x = analysis.find_transparency_threshold(spec, (args.low, args.high))
    print(f"x={fmt(x)} alpha={fmt(spec.alpha_scaled(x))}")
    return EXIT_OK


def cmd_optimum(args):
    spec = _sweep_spec(args, args.low, args.high, 2)
    opt = analysis.find_optimal_alignment(spec, (args.low, args.high))
    if not math.isfinite(opt.alpha):
        raise NoRootError("no finite optimum on the bracket")
    line = f"x={fmt(opt.x)} alpha={fmt(opt.alpha)}"
    if opt.boundary:
        line += " boundary=true"
    print(line)
    return EXIT_OK


def cmd_contour(args):
    variable, couplings, fixed, geometry = _model_base(args)
    levels = args.level or list(analysis.CONTOUR_LEVELS)
    p_range = (args.start, args.stop, args.count)
    if not args.start < args.stop or args.count < 2:
        raise UsageError("contour range needs start < stop and count >= 2")
    _check_output(args)
    contours = [
        analysis.iso_gain_contour(level, p_range, geometry, couplings, variable=variable, fixed=fixed)
        for level in levels
    ]
    meta = analysis.contour_metadata(None, variable, couplings, geometry, p_range, levels)
    svg = lambda: svg_plot([(f"{c.level:g}", c.points) for c in contours], variable, "n_m / n_g")
    _emit(args, contour_csv(contours, meta, timestamp=not args.no_timestamp), svg)
    if args.output:
        for c in contours:
            print(f"level={fmt(c.level)} points={len(c.points)} omitted={c.omitted}")
    return EXIT_OK


def cmd_physical(args):
    field = _field_conditions(args)
    p = 0.0 if field.kind == "ac" else p_from_physical(args.mu_debye, field)
    q = q_from_physical(args.delta_b_cm3, field)
    print(f"p={fmt(p)} q={fmt(q)}")
    return EXIT_OK


def cmd_feasibility(args):
    try:
        records = load_molecules(args.molecule_file)
    except OSError as exc:
        raise UsageError(f"cannot read {args.molecule_file}: {exc.strerror}") from None
    field = _field_conditions(args, breakdown=args.breakdown)
    for record in records:
        print(feasibility_report(record, field).render())
    print(f"{len(records)} molecules screened")
    return EXIT_OK


def cmd_audit(args):
    config = OracleConfig(sample_count=args.samples, seed=args.seed, shards=args.shards)
    worst = 0.0
    for pm, pg, qm, qg, psi, ratio in itertools.product(
        AUDIT_P, AUDIT_P, AUDIT_Q, AUDIT_Q, AUDIT_PSI, AUDIT_RATIOS
    ):
        scenario = GainScenario.scaled(ratio, AlignmentParams(pm, qm), AlignmentParams(pg, qg))
        geometry = ProbeGeometry(psi)
        library = gain_general(scenario, geometry).alpha_scaled
        oracle = dense_gain(scenario, geometry, config)
        worst = max(worst, abs(library - oracle) / abs(oracle))
    print("p q psi_deg closed_form mc_estimate mc_stderr within_3sigma")
    for p, q, psi in AUDIT_MC_POINTS:
        params = AlignmentParams(p, q)
        geometry = ProbeGeometry(psi)
        closed = probe_moment(params, geometry)
        est, err = mc_mean_cos2(params, geometry, config)
        inside = "yes" if abs(est - closed) <= 3 * err else "no"
        print(f"{fmt(p)} {fmt(q)} {fmt(math.degrees(psi))} {fmt(closed)} {fmt(est)} {fmt(err)} {inside}")
    print(f"max_rel_dev={worst:.3e}")
    return EXIT_OK if worst <= AUDIT_TOLERANCE else EXIT_AUDIT_FAILED


COMMANDS = {
    "gain": cmd_gain,
    "sweep": cmd_sweep,
    "figure": cmd_figure,
    "threshold": cmd_threshold,
    "optimum": cmd_optimum,
    "contour": cmd_contour,
    "physical": cmd_physical,
    "feasibility": cmd_feasibility,
    "audit": cmd_audit,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidArgument, MoleculeFileError) as exc:
        print(f"awi-gain {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoRootError as exc:
        print(f"awi-gain {args.command}: {exc}", file=sys.stderr)
        return EXIT_NO_RESULT
    except AWIError as exc:
        cause = exc.__cause__
        if isinstance(cause, InvalidArgument):
            print(f"awi-gain {args.command}: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"awi-gain {args.command}: {exc}", file=sys.stderr)
        return EXIT_NO_RESULT


if __name__ == "__main__":
    sys.exit(main())
