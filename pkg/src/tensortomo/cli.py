"""``tensortomo`` command line: gen, decompose, transform, verify.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import raytransforms as rt
from .decompose import MeanZeroError, decompose_elastic, decompose_sym2
from .grid import (DecayGateError, Grid2, GridField, KIND_COMPONENTS, gen_airy_field,
                   gen_elastic_potential, gen_gaussian, gen_hessian_field, gen_random_bandlimited,
                   gen_random_decaying, random_gausspoly)
from .io import FieldFormatError, load_field, save_field
from .verify import SCHEMA, SUITES, mexican_hat, run_suites, swirl

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

GEN_KINDS = ("gaussian-scalar", "gaussian-vector", "gaussian-sym2", "gaussian-elastic", "hessian", "airy",
             "elastic-potential", "random-bandlimited", "random-decaying", "zero")
DERIVED_KINDS = ("hessian", "airy", "elastic-potential")
TRANSFORMS = ("i0", "i1", "i2", "x1", "x2", "mixed")


class UsageError(Exception):
    pass


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--grid", type=int, default=128, metavar="N", help="samples per axis (power of two)")
    p.add_argument("--extent", type=float, default=6.0, metavar="L", help="half-width of the box [-L, L)^2")
    p.add_argument("--seed", type=int, default=1, metavar="S")
    p.add_argument("--out", type=Path, default=None, metavar="DIR")
    p.add_argument("--tol", type=float, default=None, metavar="T")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="tensortomo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a generated field directory")
    g.add_argument("--kind", choices=GEN_KINDS, required=True)
    g.add_argument("--field-kind", choices=tuple(KIND_COMPONENTS), default="sym2",
                   help="tensor kind for random-* generators")
    g.add_argument("--width", type=float, default=None,
                   help="Gaussian width (default 1.0; 0.8 for derivative-built kinds)")
    g.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0))
    g.add_argument("--weights", type=float, nargs="+", default=None)
    g.add_argument("--cutoff", type=float, default=0.25)
    g.add_argument("--mean-zero", action="store_true", help="zero the DC bin / subtract the mean")

    dcp = sub.add_parser("decompose", parents=[common], help="split a sym2 or elastic2 field")
    dcp.add_argument("input", type=Path)
    dcp.add_argument("--mean-tol", type=float, default=1e-10)

    t = sub.add_parser("transform", parents=[common], help="compute a sinogram CSV")
    t.add_argument("input", type=Path)
    t.add_argument("--transform", choices=TRANSFORMS, required=True)
    t.add_argument("--angles", type=int, default=64)
    t.add_argument("--offsets", type=int, default=129)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), required=True)
    v.add_argument("--parallel", action="store_true")
    return parser


def _grid(args):
    try:
        return Grid2(args.grid, args.extent)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _out(args, default):
    return args.out if args.out is not None else Path(default)


def _write_json(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


def generate(args, grid):
    kind = args.kind
    rng = np.random.default_rng(args.seed)
    center = tuple(args.center)
    width = args.width
    if width is None:
        width = 0.8 if kind in DERIVED_KINDS else 1.0
    if kind.startswith("gaussian-"):
        fk = {"gaussian-scalar": "scalar", "gaussian-vector": "vector", "gaussian-sym2": "sym2",
              "gaussian-elastic": "elastic2"}[kind]
        return gen_gaussian(grid, fk, center, width, args.weights, mean_subtract=args.mean_zero)
    if kind == "hessian":
        return gen_hessian_field(grid, random_gausspoly(rng, 1, width, 0.25))
    if kind == "airy":
        return gen_airy_field(grid, random_gausspoly(rng, 1, width, 0.25))
    if kind == "elastic-potential":
        v0 = (mexican_hat(width), random_gausspoly(rng, 1, width), mexican_hat(width, 0.7))
        return gen_elastic_potential(grid, v0, swirl(width))
    if kind == "random-bandlimited":
        return gen_random_bandlimited(grid, args.field_kind, args.seed, args.cutoff, args.mean_zero)
    if kind == "random-decaying":
        f = gen_random_decaying(grid, args.field_kind, args.seed, width=width)
        f.check_decay()
        return f
    return GridField.zeros(grid, args.field_kind)


def cmd_gen(args):
    f = generate(args, _grid(args))
    out = _out(args, "field")
    save_field(f, out)
    print(f"wrote {f.kind} field to {out}")
    return EXIT_OK


def cmd_decompose(args):
    f = load_field(args.input)
    out = _out(args, "split")
    tol = args.tol if args.tol is not None else 1e-9
    report = {"schema": SCHEMA, "input": str(args.input), "kind": f.kind,
              "tolerances": {"residual": tol, "mean": args.mean_tol}}
    try:
        if f.kind == "sym2":
            sp = decompose_sym2(f, args.mean_tol)
            parts = {"g": sp.g, "v": sp.v}
        elif f.kind == "elastic2":
            sp = decompose_elastic(f, args.mean_tol)
            parts = {"g": sp.g, "v": sp.v, "u": sp.u}
        else:
            raise UsageError(f"decompose needs a sym2 or elastic2 field, got {f.kind}")
    except MeanZeroError as exc:
        report.update({"means": exc.means.tolist(), "l1": exc.l1, "pass": False, "error": str(exc)})
        _write_json(out / "report.json", report)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for name, part in parts.items():
        save_field(part, out / name)
    fs = max(f.max_abs(), 1e-300)
    report.update({"means": sp.means.tolist(), "residuals": sp.residuals,
                   "g_over_f": sp.g.max_abs() / fs, "pass": sp.passes(tol)})
    _write_json(out / "report.json", report)
    print(json.dumps({"residuals": sp.residuals, "pass": report["pass"]}))
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_transform(args):
    f = load_field(args.input)
    lines = rt.LineGrid.for_grid(f.grid, args.angles, args.offsets)
    name = args.transform
    try:
        if name in ("i0", "i1", "i2"):
            sino = rt.momentum_I(f, int(name[1]), lines)
        elif name in ("x1", "x2"):
            sino = rt.elastic_X(f, int(name[1]), lines)
        else:
            sino = rt.mixed_M(f, lines)
    except ValueError as exc:
        if isinstance(exc, DecayGateError):
            raise
        raise UsageError(str(exc)) from exc
    out = _out(args, ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sinogram.csv"
    sino.to_csv(path)
    print(f"wrote {path} (channels: {', '.join(sino.channels)}; kernel: {rt.KERNEL_BACKEND})")
    return EXIT_OK


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = run_suites(names, _grid(args), args.seed, args.tol, args.parallel)
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(f"[{status}] {rep.suite} ({len(rep.checks)} checks, {rep.wall_time:.2f}s)")
        for c in rep.checks:
            if not c.passed:
                print(f"    failed {c.name}: {c.residual:.3g} {c.relation} {c.tolerance:g}")
        for note in rep.annotations:
            print(f"    note: {note}")
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"report-{rep.suite}.json").write_text(rep.to_json() + "\n")
    if args.out is None and len(reports) == 1:
        print(reports[0].to_json())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "decompose": cmd_decompose, "transform": cmd_transform, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DecayGateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, FieldFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
