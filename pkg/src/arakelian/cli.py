"""Command line entry point: ``arakelian <command> --scene FILE ...``.

Every command prints one JSON report (sorted keys, two-space indent) on
stdout and optionally writes it to ``--out-json``. Failures print a JSON
error object on stderr and exit with the code of the error class.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import ndimage

from . import analysis as an
from . import svg
from ._plain import plain
from .errors import ArakelianError, ConfigurationError, SchemaError
from .scenes import SceneFile, corpus_names, corpus_scene, load_scene
from .topology import (EIGHT, PolyPath, boundary_cells, circle_arcs, components, enclosing_curve,
                       filling, is_arakelian)
from .geometry import border_mask, closed_disk
from .witness import _choose_epsilon, witness_step1, witness_step2

REPORT_SCHEMA_VERSION = 1
TOL_ENV = "ARAKELIAN_TOL_ZERO"
PROBES = 20

COMMANDS = ("analyze", "holes", "fill", "curve", "winding", "log", "witness1", "witness2",
            "render")


# ---------------------------------------------------------------------------
# inputs


def _read_json(arg: str, what: str):
    """Inline JSON (starting with '{' or '[') or a path to a JSON file."""
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise SchemaError(f"cannot read {what} file {arg!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what} is not valid JSON: {exc}") from exc


def _scene(args) -> SceneFile:
    if args.scene is None:
        raise ConfigurationError(f"{args.command} needs --scene")
    if args.scene.startswith("corpus:"):
        name = args.scene.split(":", 1)[1]
        try:
            return corpus_scene(name)
        except KeyError as exc:
            raise ConfigurationError(exc.args[0]) from exc
    return load_scene(args.scene)


def _grid(args, sf: SceneFile):
    return sf.grid(args.h)


def _complex(text: str, what: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise ConfigurationError(f"{what} must be 're,im'") from exc
    if len(parts) != 2:
        raise ConfigurationError(f"{what} must be 're,im'")
    return complex(*parts)


def _function(args) -> an.AnalyticFn:
    if args.function is not None:
        return an.fn_from_dict(_read_json(args.function, "function spec"))
    if args.zeta is not None:
        return an.LinearFactor(_complex(args.zeta, "--zeta"))
    raise ConfigurationError(f"{args.command} needs --function or --zeta")


def _path(args) -> PolyPath:
    if args.path is None:
        raise ConfigurationError("winding needs --path")
    d = _read_json(args.path, "path")
    if isinstance(d, list):
        d = {"points": d, "closed": True}
    try:
        pts = np.array([complex(x, y) for x, y in d["points"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"path must hold points as [re, im] pairs: {exc}") from exc
    return PolyPath(pts, bool(d.get("closed", True)))


def _tol_zero(args) -> float:
    if args.tol_zero is not None:
        tol = args.tol_zero
    else:
        env = os.environ.get(TOL_ENV)
        try:
            tol = float(env) if env else an.TOL_ZERO
        except ValueError as exc:
            raise ConfigurationError(f"{TOL_ENV} must be a number, got {env!r}") from exc
    if not tol > 0:
        raise ConfigurationError("tolerances must be positive")
    return tol


def _hole_label(args, lab) -> int:
    if args.label is not None:
        return args.label
    if not lab.holes:
        raise ConfigurationError("the set has no holes; pass --label")
    return lab.holes[0].label


def _derivative_probes(f: an.AnalyticFn, pts: np.ndarray, seed: int) -> dict:
    """Central-difference check of f' at seeded random points drawn from ``pts``."""
    rng = np.random.default_rng(seed)
    z = pts[rng.choice(pts.size, size=min(PROBES, pts.size), replace=False)]
    step = 1e-6
    _, d = f.evaluate(z)
    fd = (f.value(z + step) - f.value(z - step)) / (2 * step)
    rel = np.abs(fd - d) / np.maximum(np.abs(d), 1e-300)
    return {"seed": seed, "probes": int(z.size), "maxRelativeError": float(rel.max())}


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args, sf, s):
    n_max = args.n_max if args.n_max is not None else sf.expected.get("nMax", 1)
    rep = is_arakelian(s, n_max)
    lab = components(s)
    return ({"nMax": n_max, "report": rep.to_dict()},
            {"labeling": lab, "holes": rep.holes, "holes_ref": "report.holes"})


def cmd_holes(args, sf, s):
    lab = components(s)
    return ({"components": [r.to_dict() for r in lab.regions],
             "holes": [r.to_dict() for r in lab.holes]}, {"labeling": lab})


def cmd_fill(args, sf, s):
    lab = components(s)
    label = _hole_label(args, lab)
    v = filling(lab, label)
    u = lab.mask_of(label)
    # V is a region: its complement is read with 8-connectivity
    outside, n_out = ndimage.label(~v.mask, structure=EIGHT)
    edge = np.unique(outside[border_mask(v.window)])
    extra = boundary_cells(v.mask) & ~boundary_cells(u)
    return ({"label": label, "regionCells": int(u.sum()), "fillingCells": v.count,
             "fillingArea": v.area, "complementComponents": int(n_out),
             "complementBorderComponents": int(np.count_nonzero(edge)),
             "outerBoundaryContained": not bool(extra.any())},
            {"regions": [("label", u), ("fillingCells", v.mask & ~u)]})


def cmd_curve(args, sf, s):
    lab = components(s)
    label = _hole_label(args, lab)
    v = filling(lab, label)
    zeta = _complex(args.zeta, "--zeta") if args.zeta else lab.region(label).representative
    eps = _choose_epsilon(v, zeta, args.epsilon)
    gamma = enclosing_curve(v, zeta, eps)
    winding = an.winding_number(an.LinearFactor(zeta), gamma, _tol_zero(args))
    return ({"label": label, "zeta": zeta, "epsilon": eps, "winding": winding,
             "gamma": {"points": gamma.to_list(), "closed": True, "length": gamma.length}},
            {"regions": [("label", lab.mask_of(label))], "curves": [("gamma", gamma)],
             "points": [("zeta", zeta)]})


def cmd_winding(args, sf, s):
    f = _function(args)
    gamma = _path(args)
    if not gamma.closed:
        raise ConfigurationError("winding needs a closed path")
    r = an.winding_details(f, gamma, _tol_zero(args))
    out = {"function": f.to_dict(), "winding": r.winding, "argumentTurns": r.arg_turns,
           "integralTurns": r.integral_turns, "integralityError": r.integrality_error,
           "samples": r.samples, "derivativeCheck": _derivative_probes(f, gamma.points, args.seed)}
    extras = {"curves": [("path", gamma)]}
    return out, extras


def cmd_log(args, sf, s):
    f = _function(args)
    tol = _tol_zero(args)
    res = an.log_on_set(f, s, tol_zero=tol)
    out = {"function": f.to_dict(), "derivativeCheck": _derivative_probes(f, s.points(),
                                                                          args.seed)}
    extras = {}
    if isinstance(res, an.Obstruction):
        out["result"] = "obstruction"
        out["obstruction"] = res.to_dict()
        out["obstruction"]["windingCheck"] = an.winding_number(f, res.cycle, tol)
        extras["curves"] = [("obstruction.cycle", res.cycle)]
    else:
        out["result"] = "logGrid"
        out["logGrid"] = res.to_dict()
    return out, extras


def cmd_witness1(args, sf, s):
    lab = components(s)
    label = _hole_label(args, lab)
    rep = witness_step1(s, label, args.epsilon, _tol_zero(args))
    return ({"witness": rep.to_dict()},
            {"regions": [("witness.holeLabel", lab.mask_of(label))],
             "curves": [("witness.gamma", rep.gamma)], "points": [("witness.zeta", rep.zeta)]})


def cmd_witness2(args, sf, s):
    n0 = args.n0 if args.n0 is not None else 1
    rep = witness_step2(s, n0, args.samples_per_unit, args.epsilon, _tol_zero(args))
    lab = components(s | closed_disk(s.window, n0))
    return ({"witness": rep.to_dict()},
            {"labeling": lab, "holes": rep.holes, "holes_ref": "witness.holes",
             "curves": [("witness.gamma", rep.gamma)], "arcs": rep.arcs, "arcs_ref": "witness.arcs",
             "points": [(f"witness.zetas[{k}]", z) for k, z in enumerate(rep.zetas)]})


def cmd_render(args, sf, s):
    lab = components(s)
    out = {"holes": [r.to_dict() for r in lab.holes]}
    extras = {"labeling": lab}
    if args.n0 is not None:
        lab_n = components(s | closed_disk(s.window, args.n0))
        spu = args.samples_per_unit or max(int(np.ceil(1 / s.window.h)),
                                           int(np.ceil(512 / (2 * np.pi * args.n0))))
        arcs = circle_arcs(s, lab_n, args.n0, spu)
        out["arcs"] = arcs.to_dict()
        extras["arcs"] = arcs
    return out, extras


HANDLERS = {"analyze": cmd_analyze, "holes": cmd_holes, "fill": cmd_fill, "curve": cmd_curve,
            "winding": cmd_winding, "log": cmd_log, "witness1": cmd_witness1,
            "witness2": cmd_witness2, "render": cmd_render}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="arakelian",
        description="Classify grid sets, build logarithm branches and certify winding "
                    "obstructions.",
        epilog="Scenes may be files or bundled names written corpus:NAME "
               f"({', '.join(corpus_names())}). Env {TOL_ENV} sets the default --tol-zero.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scene", help="scene JSON file or corpus:NAME")
    p.add_argument("--h", type=float, help="override the scene's cell size")
    p.add_argument("--function", help="function spec JSON (file or inline)")
    p.add_argument("--path", help="closed path JSON (file or inline) for winding")
    p.add_argument("--zeta", help="point 're,im'; alone it means f(z) = z - zeta")
    p.add_argument("--label", type=int, help="complement component label")
    p.add_argument("--n-max", type=int, help="largest disk radius for condition 2")
    p.add_argument("--n0", type=int, help="circle radius for arcs and witness2")
    p.add_argument("--epsilon", type=float, help="distance of the curve from the boundary")
    p.add_argument("--samples-per-unit", type=int, help="circle samples per unit length")
    p.add_argument("--tol-zero", type=float, help="relative zero threshold for |f|")
    p.add_argument("--seed", type=int, default=0, help="seed for random probe points")
    p.add_argument("--out-json", help="also write the report here")
    p.add_argument("--out-svg", help="write an SVG figure here")
    return p


def run(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.h is not None and not args.h > 0:
            raise ConfigurationError("--h must be positive")
        if args.epsilon is not None and not args.epsilon > 0:
            raise ConfigurationError("--epsilon must be positive")
        if args.out_svg and args.scene is None:
            raise ConfigurationError("--out-svg needs --scene")
        sf = s = None
        if args.command != "winding" or args.scene is not None:
            sf = _scene(args)
            s = _grid(args, sf)
        body, extras = HANDLERS[args.command](args, sf, s)
    except ArakelianError as exc:
        err = {"schemaVersion": REPORT_SCHEMA_VERSION, "command": args.command,
               "error": type(exc).__name__, "message": str(exc), "exitCode": exc.exit_code}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return exc.exit_code

    report = {"schemaVersion": REPORT_SCHEMA_VERSION, "command": args.command, **body}
    if sf is not None:
        report["scene"] = sf.name
        report["window"] = s.window.to_dict()
    text = json.dumps(plain(report), sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if args.out_json:
        Path(args.out_json).write_text(text)
    if args.out_svg:
        Path(args.out_svg).write_text(svg.render(s, **extras))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
