"""Command-line front end: ``soilmpt <command> [options]``.

Exit codes: 0 success, 1 validation failure, 2 numerical non-convergence
(partial output written), 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .forward import InsufficientSizes, Mode, Variant, scaling_rate_study, sweep
from .model import (ScenarioFormatError, load_scenario, logspace_frequencies, scenario_hash,
                    validate_scenario)
from .mpt import RangeError, SignatureError, decomposition_check, load_signature, save_signature, \
    sphere_signature
from .plot import PlotError, emit_plot
from .quadrature import QuadratureSettings

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2, 64
RECORD_COLUMNS = ["omega", "variant", "ReV", "ImV", "ReV_over_omega", "ImV_over_omega",
                  "nu", "epsilon", "status"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _variants(text: str) -> list[Variant]:
    try:
        return [Variant(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError:
        names = ",".join(v.value for v in Variant)
        raise argparse.ArgumentTypeError(f"variants must be drawn from {names}")


def _add_common(p, variants=True, svg=True):
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", required=True, help="output CSV path")
    if variants:
        p.add_argument("--variants", type=_variants, default=[Variant.VS, Variant.VS0, Variant.VFS],
                       help="comma-separated subset of Vs,Vs0,Vfs,V0_soil_only")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.INTEGRATED.value)
    p.add_argument("--rel-tol", type=float, default=QuadratureSettings.rel_tol)
    p.add_argument("--abs-tol", type=float, default=QuadratureSettings.abs_tol)
    p.add_argument("--parallel", type=int, default=1, help="worker threads")
    if svg:
        p.add_argument("--svg", nargs="?", const="", default=None,
                       help="also plot Re(V/omega); optional SVG path")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="soilmpt", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"soilmpt {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep-frequency", help="voltage variants over the scenario frequencies")
    _add_common(p)
    p.add_argument("--omin", type=float)
    p.add_argument("--omax", type=float)
    p.add_argument("--n", type=int, help="log-spaced frequency count (with --omin/--omax)")

    p = sub.add_parser("sweep-depth", help="voltage versus object depth")
    _add_common(p)
    p.add_argument("--depths", type=_floats, required=True, help="depths |z3| in m")

    p = sub.add_parser("sweep-size", help="voltage versus sphere radius")
    _add_common(p)
    p.add_argument("--alphas", type=_floats, required=True, help="radii in m")

    p = sub.add_parser("soil-response", help="soil-only voltage over sigma_s x mu_rs grids")
    _add_common(p, variants=False)
    p.add_argument("--sigmas", type=_floats, required=True)
    p.add_argument("--murs", type=_floats, required=True)

    p = sub.add_parser("mpt-sphere", help="write an analytic sphere signature file")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--mur", type=float, default=1.0)
    p.add_argument("--omin", type=float, required=True)
    p.add_argument("--omax", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="check a scenario and/or signature file")
    p.add_argument("--scenario")
    p.add_argument("--signature")

    p = sub.add_parser("rate-study", help="log-log slope of |dV_s| against sphere radius")
    _add_common(p, variants=False, svg=False)
    p.add_argument("--alphas", type=_floats, required=True)
    p.add_argument("--hold", choices=["fixed_nu", "fixed_omega"], default="fixed_nu")
    p.add_argument("--omega", type=float)
    return ap


# --- output -------------------------------------------------------------------

def _settings(args) -> QuadratureSettings:
    try:
        return QuadratureSettings(rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    except ValueError as exc:
        raise UsageError(str(exc))


def _record_cells(r) -> list[str]:
    d = r.diagnostics
    v, vo = r.value, r.value_over_omega
    return [repr(r.omega), r.variant.value, repr(v.real), repr(v.imag), repr(vo.real),
            repr(vo.imag), repr(d.nu) if d else "nan", repr(d.epsilon) if d else "nan", r.status]


def _write_csv(path, header_meta, columns, rows):
    lines = [f"# {m}" for m in header_meta]
    lines.append(",".join(columns))
    lines.extend(",".join(r) for r in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _meta(args, scenario):
    return [f"soilmpt {__version__}", f"command {args.command}",
            f"scenario {scenario_hash(scenario)}",
            f"rel_tol {args.rel_tol!r} abs_tol {args.abs_tol!r}", f"mode {args.mode}"]


def _load_valid(path):
    s = load_scenario(path)
    problems = validate_scenario(s)
    if problems:
        raise _Invalid(problems)
    return s


class _Invalid(Exception):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = problems


def _maybe_plot(args, csv_path, group="variant"):
    if args.svg is None:
        return
    out = args.svg or Path(csv_path).with_suffix(".svg")
    emit_plot(csv_path, "omega", "ReV_over_omega", out=out, logx=True, group=group)


def _status(records) -> int:
    return EXIT_NUMERICAL if any(r.status != "ok" for r in records) else EXIT_OK


def _cmd_sweep_frequency(args):
    s = _load_valid(args.scenario)
    if args.n is not None or args.omin is not None or args.omax is not None:
        if None in (args.n, args.omin, args.omax):
            raise UsageError("--omin, --omax and --n must be given together")
        s = replace(s, frequencies=logspace_frequencies(args.omin, args.omax, args.n))
    if not s.frequencies:
        raise UsageError("scenario has no frequencies; pass --omin/--omax/--n")
    recs = sweep(s, args.variants, args.mode, _settings(args), args.parallel)
    _write_csv(args.out, _meta(args, s), RECORD_COLUMNS, [_record_cells(r) for r in recs])
    _maybe_plot(args, args.out)
    return _status(recs)


def _param_sweep(args, name, values, make):
    base = _load_valid(args.scenario)
    rows, recs = [], []
    for val in values:
        s = make(base, val)
        problems = validate_scenario(s)
        if problems:
            raise _Invalid(problems)
        for r in sweep(s, args.variants, args.mode, _settings(args), args.parallel):
            recs.append(r)
            rows.append([repr(val)] + _record_cells(r))
    _write_csv(args.out, _meta(args, base), [name] + RECORD_COLUMNS, rows)
    _maybe_plot(args, args.out, group=(name, "variant"))
    return _status(recs)


def _cmd_sweep_depth(args):
    def make(s, d):
        x, y, _ = s.object.z
        return s.with_object(z=(x, y, -abs(d)))
    return _param_sweep(args, "depth", args.depths, make)


def _cmd_sweep_size(args):
    return _param_sweep(args, "alpha", args.alphas, lambda s, a: s.with_object(alpha=a))


def _cmd_soil_response(args):
    args.variants = [Variant.V0]
    base = _load_valid(args.scenario)
    rows, recs = [], []
    for sig in args.sigmas:
        for mur in args.murs:
            s = base.with_soil(sigma_s=sig, mu_rs=mur)
            problems = validate_scenario(s)
            if problems:
                raise _Invalid(problems)
            for r in sweep(s, args.variants, args.mode, _settings(args), args.parallel):
                recs.append(r)
                rows.append([repr(sig), repr(mur)] + _record_cells(r))
    _write_csv(args.out, _meta(args, base), ["sigma_s", "mu_rs"] + RECORD_COLUMNS, rows)
    if args.svg is not None:
        out = args.svg or Path(args.out).with_suffix(".svg")
        emit_plot(args.out, "omega", "ReV_over_omega", out=out, group="sigma_s")
    return _status(recs)


def _cmd_mpt_sphere(args):
    if not (args.n >= 2 and 0 < args.omin < args.omax):
        raise UsageError("need --n >= 2 and 0 < --omin < --omax")
    sig = sphere_signature(args.alpha, args.sigma, args.mur,
                           logspace_frequencies(args.omin, args.omax, args.n))
    save_signature(sig, args.out)
    return EXIT_OK


def _cmd_validate(args):
    if not (args.scenario or args.signature):
        raise UsageError("validate needs --scenario and/or --signature")
    problems = []
    if args.scenario:
        problems += validate_scenario(load_scenario(args.scenario))
    if args.signature:
        problems += decomposition_check(load_signature(args.signature)).violations
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


def _cmd_rate_study(args):
    s = _load_valid(args.scenario)
    res = scaling_rate_study(s, args.alphas, args.hold, args.omega, args.mode, _settings(args))
    meta = _meta(args, s) + [f"hold {res.hold}", f"slope {res.slope!r}",
                             f"residual {res.residual!r}"]
    _write_csv(args.out, meta, ["alpha", "absV"],
               [[repr(a), repr(m)] for a, m in zip(res.alphas, res.magnitudes)])
    print(f"slope {res.slope:.4f} (residual {res.residual:.2e})")
    return EXIT_OK


COMMANDS = {
    "sweep-frequency": _cmd_sweep_frequency,
    "sweep-depth": _cmd_sweep_depth,
    "sweep-size": _cmd_sweep_size,
    "soil-response": _cmd_soil_response,
    "mpt-sphere": _cmd_mpt_sphere,
    "validate": _cmd_validate,
    "rate-study": _cmd_rate_study,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "parallel", 1) < 1:
            raise UsageError("--parallel must be >= 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"soilmpt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _Invalid as exc:
        for p in exc.problems:
            print(p, file=sys.stderr)
        return EXIT_INVALID
    except (ScenarioFormatError, SignatureError, RangeError, InsufficientSizes, PlotError,
            OSError) as exc:
        print(f"soilmpt: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
