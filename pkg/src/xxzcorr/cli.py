"""Command-line front end.

Every subcommand computes its whole output before anything is written, so
a failure never leaves a partial file behind. Floats are printed in their
shortest round-trip form, which makes output byte-identical across runs.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, closedform, measures, verify
from .model import SpinParams, gibbs_state, ground_state, milburn_evolve
from .qmat import validate_density_matrix
from .sweep import ENGINES, FIGURES, SPIN_NAMES, Axis, SweepResult, SweepSpec, evaluate_point, run_figure, run_sweep

STATE_TOL = 1e-8


class CliError(Exception):
    """A problem with the request that is reported without a traceback."""


def read_state(path: str) -> np.ndarray:
    """Load a density matrix stored as ``{"dim": 4, "entries": [[re, im], ...]}``, row-major."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read state file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"state file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or "dim" not in data or "entries" not in data:
        raise CliError("state file must be an object with 'dim' and 'entries'")
    dim = data["dim"]
    if dim != 4:
        raise CliError(f"state dimension must be 4, got {dim!r}")
    try:
        pairs = np.asarray(data["entries"], dtype=float).reshape(-1, 2)
    except (TypeError, ValueError):
        raise CliError("entries must be a list of [re, im] pairs") from None
    if len(pairs) != dim * dim:
        raise CliError(f"expected {dim * dim} entries, got {len(pairs)}")
    rho = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)
    return validate_density_matrix(rho, tol=STATE_TOL, renormalize=True)


def state_json(rho: np.ndarray) -> str:
    entries = [[float(z.real), float(z.imag)] for z in np.asarray(rho).ravel()]
    return json.dumps({"dim": int(rho.shape[0]), "entries": entries}) + "\n"


def _add_model_flags(p: argparse.ArgumentParser, dynamics: bool) -> None:
    for name in SPIN_NAMES:
        p.add_argument(f"-{name}", type=float, default=None, metavar="X", help=f"coupling {name} (default 0)")
    if dynamics:
        p.add_argument("--gamma", type=float, default=None, help="intrinsic decoherence rate")
        p.add_argument("-t", type=float, default=None, help="evolution time")
        p.add_argument("--initial", default="psi1", help="psi1, psi2 or a state file (default psi1)")
    else:
        p.add_argument("-T", type=float, default=None, help="temperature (> 0)")
        p.add_argument("--ground-state", action="store_true", help="zero-temperature state instead of Gibbs")


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--engine", choices=ENGINES, default=None,
                   help="closed forms, numerical measures, or both with deltas "
                        "(default closedform, oracle where no closed form exists)")
    p.add_argument("--variant", choices=closedform.VARIANTS, default=None,
                   help="closed-form variant: formulas as printed or with misprints repaired")
    p.add_argument("--axis", action="append", default=[], metavar="NAME:MIN:MAX:COUNT",
                   help="swept parameter; repeat for a 2-D grid")


def _add_output_flags(p: argparse.ArgumentParser, formats=("csv", "json"), default="csv") -> None:
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("-o", "--output", default=None, metavar="PATH", help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xxzcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    m = sub.add_parser("measures", help="correlation measures of one density matrix")
    m.add_argument("--state-file", default=None, help="density matrix JSON; otherwise built from the model flags")
    _add_model_flags(m, dynamics=False)
    m.add_argument("--gamma", type=float, default=None, help="with -t: evolve --initial instead of a thermal state")
    m.add_argument("-t", type=float, default=None)
    m.add_argument("--initial", default="psi1")
    m.add_argument("--dump-state", default=None, metavar="PATH", help="also write the evaluated state as JSON")
    _add_output_flags(m)

    th = sub.add_parser("thermal", help="thermal state, one point or a sweep")
    _add_model_flags(th, dynamics=False)
    _add_sweep_flags(th)
    _add_output_flags(th)

    dy = sub.add_parser("dynamics", help="decohering Bell state, one point or a sweep")
    _add_model_flags(dy, dynamics=True)
    _add_sweep_flags(dy)
    _add_output_flags(dy)

    fg = sub.add_parser("figure", help="data behind a figure preset")
    fg.add_argument("name", choices=FIGURES)
    fg.add_argument("--resolution", type=int, default=201, help="points per axis (default 201)")
    fg.add_argument("--engine", choices=ENGINES, default="closedform")
    fg.add_argument("--variant", choices=closedform.VARIANTS, default=None)
    _add_output_flags(fg)

    vf = sub.add_parser("verify", help="closed forms against the numerical measures on fixed grids")
    vf.add_argument("--quick", action="store_true", help="small grids, for a fast check")
    _add_output_flags(vf, formats=("text", "json"), default="text")
    return parser


def _spin(args) -> dict:
    return {n: getattr(args, n) for n in SPIN_NAMES if getattr(args, n) is not None}


def _initial(text: str):
    return text if text in ("psi1", "psi2") else read_state(text)


def _sweep_spec(args, mode: str) -> SweepSpec:
    if len(args.axis) > 2:
        raise CliError("--axis may be given at most twice")
    try:
        axes = tuple(Axis.parse(a) for a in args.axis)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    fixed = {n: 0.0 for n in SPIN_NAMES}
    fixed.update(_spin(args))
    if mode == "thermal":
        if args.T is not None and not args.T > 0:
            raise CliError(f"-T must be positive, got {args.T}")
        if args.T is not None:
            fixed["T"] = args.T
        initial, ground = "psi1", args.ground_state
        no_closed = ground
    else:
        for n in ("gamma", "t"):
            if getattr(args, n) is not None:
                fixed[n] = getattr(args, n)
        initial, ground = _initial(args.initial), False
        no_closed = not isinstance(initial, str)
    for a in axes:
        fixed.pop(a.name, None)
    engine = args.engine or ("oracle" if no_closed else "closedform")
    spec = SweepSpec(mode, axes, fixed, engine=engine, initial=initial, ground_state=ground, variant=args.variant)
    try:
        spec.validate(allow_point=not axes)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return spec


def _measures_state(args) -> np.ndarray:
    if args.state_file is not None:
        return read_state(args.state_file)
    p = SpinParams(**_spin(args))
    if args.gamma is not None or args.t is not None:
        if args.gamma is None or args.t is None:
            raise CliError("an evolved state needs both --gamma and -t")
        return milburn_evolve(p, args.gamma, args.t, _initial(args.initial))
    if args.ground_state:
        return ground_state(p)
    if args.T is None:
        raise CliError("give --state-file, -T, --ground-state or --gamma with -t")
    return gibbs_state(p, args.T)


def _run_measures(args) -> tuple[str, dict[str, str]]:
    rho = _measures_state(args)
    cs = measures.correlation_set(rho)
    header = list(cs.QUANTITIES) + ["mutual_information"]
    row = [float(v) for v in cs.values().values()] + [float(measures.mutual_information(rho))]
    extra = {args.dump_state: state_json(rho)} if args.dump_state else {}
    return SweepResult(header, [row]).render(args.format), extra


def _run_verify(args) -> tuple[str, int]:
    report = verify.run_verify(quick=args.quick)
    if args.format == "json":
        text = json.dumps(verify.to_jsonable(report), indent=1, sort_keys=True) + "\n"
    else:
        text = verify.format_report(report)
    return text, 0 if report["passed"] else 1


def run(args) -> int:
    extra: dict[str, str] = {}
    status = 0
    if args.command == "measures":
        text, extra = _run_measures(args)
    elif args.command in ("thermal", "dynamics"):
        spec = _sweep_spec(args, args.command)
        result = run_sweep(spec) if spec.axes else evaluate_point(spec)
        if not spec.axes and result.rows[0][-1]:
            # a lone point that cannot be evaluated is a failure, not a data row
            raise CliError(result.rows[0][-1])
        text = result.render(args.format)
    elif args.command == "figure":
        if args.resolution < 2:
            raise CliError("--resolution must be at least 2")
        text = run_figure(args.name, args.resolution, args.engine, args.variant).render(args.format)
    else:
        text, status = _run_verify(args)
    # everything is computed; only now touch the filesystem
    for path, content in extra.items():
        Path(path).write_text(content)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (CliError, ValueError, ArithmeticError, OSError, np.linalg.LinAlgError) as exc:
        print(f"xxzcorr {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
