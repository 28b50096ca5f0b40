"""Command-line front end: one subcommand per pipeline stage.

Exit status 0 on success, 2 on usage errors, 1 on computation errors (a
JSON error object is printed on stderr).  Every JSON output echoes the
resolved configuration and contains no timestamps, so identical argv
gives identical bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import io
from .exceptions import JohnforgeError, ParameterError
from .geometry import Box, rasterize, whitney

# -- argument helpers --------------------------------------------------------


def _int_list(text):
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _point(text):
    if str(text).lower() in ("inf", "infinity"):
        return "inf"
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("a point is 'x,y' or 'inf'")
    return vals


def _add_source(p, level=9):
    p.add_argument("--shape", help="shape spec such as disk:0.5, segment:4, julia:0:1")
    p.add_argument("--in", dest="input", help="mask/whitney JSON produced by an earlier stage")
    p.add_argument("--level", type=int, default=level)
    p.add_argument("--half-side", type=float, default=None, help="box half side (default: fitted)")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON file with default values for this subcommand's options")
    p.add_argument("--out", help="JSON output path (default: stdout)")


def build_parser():
    ap = argparse.ArgumentParser(prog="johnforge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rasterize", help="shape -> pixel mask")
    _add_source(p)
    p.add_argument("--svg")
    _add_common(p)

    p = sub.add_parser("whitney", help="Whitney decomposition of the complement")
    _add_source(p)
    p.add_argument("--deepest-level", type=int, default=None)
    p.add_argument("--svg")
    _add_common(p)

    p = sub.add_parser("john-estimate", help="lower estimate of the John constant")
    _add_source(p)
    p.add_argument("--center", type=_point, default="inf")
    p.add_argument("--samples", type=int, default=64, help="boundary samples; 0 = all")
    _add_common(p)

    p = sub.add_parser("simplify", help="graph surgery producing a simply connected domain")
    _add_source(p)
    p.add_argument("--A", dest="A", type=float, default=8.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--svg")
    _add_common(p)

    p = sub.add_parser("verify", help="check a simplified domain")
    p.add_argument("--in", dest="input", required=False)
    p.add_argument("--samples", type=int, default=32)
    _add_common(p)

    p = sub.add_parser("capacity", help="logarithmic capacity")
    _add_source(p)
    p.add_argument("--method", choices=("energy", "fekete"), default="energy")
    p.add_argument("--points", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("harmonic", help="harmonic test function off K and its energy")
    _add_source(p)
    p.add_argument("--trace", default="fourier", choices=("constant", "coordinate", "fourier", "angular"))
    p.add_argument("--field", help="binary field output (sidecar written to <path>.json)")
    _add_common(p)

    p = sub.add_parser("measure", help="harmonic measure by walk on spheres")
    _add_source(p)
    p.add_argument("--start", type=_point, default=[0.0, 0.0])
    p.add_argument("--arc", type=_float_list, default=None,
                   help="target = K pixels with polar angle in [a,b] (radians); default all of K")
    p.add_argument("--walks", type=int, default=10000)
    p.add_argument("--shell", type=float, default=1.5)
    _add_common(p)

    p = sub.add_parser("removability", help="collar smoothing energies")
    _add_source(p, level=10)
    p.add_argument("--trace", default="fourier", choices=("constant", "coordinate", "fourier", "angular"))
    p.add_argument("--n-list", type=_int_list, default=[4, 8, 16, 32])
    p.add_argument("--csv")
    p.add_argument("--svg", help="heat map of |grad F~|^2 in the finest collar")
    _add_common(p)

    p = sub.add_parser("witness", help="positive-area non-removability witness")
    _add_source(p, level=10)
    p.add_argument("--n-list", type=_int_list, default=[4, 8, 16, 32])
    p.add_argument("--field", help="binary output of F_n at the largest n")
    _add_common(p)

    p = sub.add_parser("beurling", help="capacity distortion under explicit maps")
    p.add_argument("--map", default="koebe", choices=("identity", "koebe", "sqrt_slit"))
    p.add_argument("--lambdas", type=_float_list, default=[1.0, 2.0, 4.0, 8.0])
    p.add_argument("--theta-samples", type=int, default=2048)
    _add_common(p)
    return ap


_NON_CONFIG = {"command", "config", "out"}


def _apply_config(ap, argv):
    """Re-parse with defaults taken from --config; unknown keys are usage errors."""
    args = ap.parse_args(argv)
    if not args.config:
        return _check_source(ap, args)
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        ap.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        ap.error("config must be a JSON object")
    allowed = set(vars(args)) - _NON_CONFIG
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        ap.error(f"unknown config keys for {args.command}: {', '.join(unknown)}")
    sub = ap._subparsers._group_actions[0].choices[args.command]
    sub.set_defaults(**cfg)
    return _check_source(ap, ap.parse_args(argv))


def _check_source(ap, args):
    if hasattr(args, "shape") and not args.shape and not args.input:
        ap.error(f"{args.command} needs --shape or --in")
    if args.command == "verify" and not args.input:
        ap.error("verify needs --in <simplify output>")
    return args


# output destinations do not change the payload, so they are not echoed
_OUTPUTS = {"config", "out", "svg", "csv", "field"}


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _OUTPUTS}


# -- stage helpers -------------------------------------------------------------


def _mask(args):
    if getattr(args, "input", None):
        mask, _ = io.load_mask(args.input)
        return mask
    if not args.shape:
        raise ParameterError("give --shape or --in")
    box = None if args.half_side is None else Box((0.0, 0.0), args.half_side)
    return rasterize(args.shape, args.level, box)


def _emit(args, kind, payload):
    doc = io.document(kind, _config(args), payload)
    if args.out:
        io.write_json(args.out, doc)
    else:
        sys.stdout.write(io.dumps(doc))


def cmd_rasterize(args):
    m = _mask(args)
    if args.svg:
        io.atomic_write(args.svg, io.mask_svg(m))
    _emit(args, "mask", {"mask": io.mask_to_dict(m)})


def _whitney(args):
    if getattr(args, "input", None):
        doc = io.read_json(args.input)
        if doc.get("kind") == "whitney":
            return io.whitney_from_dict(doc["whitney"])
        return whitney(io.mask_from_dict(doc["mask"]), getattr(args, "deepest_level", None))
    return whitney(_mask(args), getattr(args, "deepest_level", None))


def cmd_whitney(args):
    w = _whitney(args)
    if args.svg:
        io.atomic_write(args.svg, io.whitney_svg(w))
    d = io.whitney_to_dict(w)
    _emit(args, "whitney", {"whitney": d, "mask": d["mask"]})


def cmd_john(args):
    from .john import estimate_john_constant

    w = _whitney(args)
    n = None if args.samples == 0 else args.samples
    est = estimate_john_constant(w, args.center, n, args.seed)
    _emit(args, "john", {"estimate": est.to_dict()})


def cmd_simplify(args):
    from .simplify import build_graph, certify_graph, cut_slits

    w = _whitney(args)
    g = build_graph(w, args.A, args.n_max)
    cert = certify_graph(w, g)
    s = cut_slits(w, g, args.delta)
    if args.svg:
        io.atomic_write(args.svg, io.whitney_svg(w, graph=g, slits=s.slits))
    d = io.simplified_to_dict(s)
    _emit(args, "simplified", {"simplified": d, "mask": d["whitney"]["mask"], "certificate": cert})


def cmd_verify(args):
    from .simplify import verify_simplified

    if not args.input:
        raise ParameterError("verify needs --in <simplify output>")
    doc = io.read_json(args.input, "simplified")
    s = io.simplified_from_dict(doc["simplified"])
    rep = verify_simplified(s, args.samples, args.seed)
    _emit(args, "verification", {"report": rep})
    if not rep["ok"]:
        raise _Failed(rep)


def cmd_capacity(args):
    from .potential.capacity import capacity_estimate

    m = _mask(args)
    est = capacity_estimate(m, args.method, args.points, args.seed)
    _emit(args, "capacity", {"estimate": est.to_dict()})


def cmd_harmonic(args):
    from .potential.harmonic import dirichlet_energy
    from .removability import build_test_function, edge_energy

    m = _mask(args)
    f = build_test_function(m, args.trace, args.seed)
    k = np.pad(m.bits, 1, constant_values=False)
    payload = {"nodes": int(f.harmonic_region.sum()), "residual": f.residual,
               "max_principle": f.max_principle_ok(),
               "offK_energy": edge_energy(f.values, exclude=k),
               "energy": dirichlet_energy(f), "frame_value": f.meta["frame_value"]}
    if args.field:
        io.write_field(args.field, f.values[1:-1, 1:-1], m.box, m.level,
                       extra={"quantity": "F", "trace": args.trace, "seed": args.seed})
    _emit(args, "harmonic", payload)


def cmd_measure(args):
    from .geometry import free_components
    from .potential.measure import harmonic_measure_wos

    m = _mask(args)
    r, c = m.box.pixel_of(args.start[0], args.start[1], m.level)
    if m.bits[r, c]:
        raise ParameterError("start point lies on K")
    lab, _ = free_components(m.bits)
    domain = lab == lab[r, c]
    target = m.bits.copy()
    if args.arc is not None:
        if len(args.arc) != 2:
            raise ParameterError("--arc takes two angles a,b")
        X, Y = m.box.pixel_centers(m.level)
        a, b = args.arc
        t = np.mod(np.arctan2(Y - m.box.center[1], X - m.box.center[0]) - a, 2 * math.pi)
        target &= t <= (b - a)
    est = harmonic_measure_wos(domain, target, args.start, m.box, m.level, args.walks,
                               args.shell, args.seed)
    _emit(args, "harmonic_measure", {"estimate": est.to_dict()})


def cmd_removability(args):
    from .removability import Collar, node_distance, removability_report, smooth_in_collar
    from .removability import build_test_function

    m = _mask(args)
    rep = removability_report(m, args.trace, args.n_list, args.seed)
    if args.csv:
        io.atomic_write(args.csv, io.gap_csv(rep))
    if args.svg:
        f = build_test_function(m, args.trace, args.seed)
        col = Collar.of(m, rep.deltas[-1], node_distance(m))
        fs = smooth_in_collar(f, col)
        v = fs.values
        gx = np.zeros_like(v)
        gx[:-1, :] += np.diff(v, axis=0) ** 2
        gx[:, :-1] += np.diff(v, axis=1) ** 2
        io.atomic_write(args.svg, io.heatmap_svg(gx[1:-1, 1:-1], m.box, m.level,
                                                 col.nodes[1:-1, 1:-1]))
    _emit(args, "removability", {"report": rep.to_dict()})


def cmd_witness(args):
    from .potential.cauchy import ComplexField, cauchy_transform
    from .removability import nonremovability_witness

    m = _mask(args)
    rep = nonremovability_witness(m, args.n_list)
    if args.field:
        X, Y = m.box.pixel_centers(m.level)
        n = rep.n_list[-1]
        F = cauchy_transform(ComplexField(np.where(m.bits, np.exp(1j * n * (X + Y)), 0), m.box, m.level))
        io.write_field(args.field, F.values, m.box, m.level, extra={"quantity": "F_n", "n": n})
    _emit(args, "witness", {"report": rep.to_dict()})


def cmd_beurling(args):
    from .potential.beurling import verify_beurling

    rep = verify_beurling(args.map, lambdas=args.lambdas, n_theta=args.theta_samples)
    _emit(args, "beurling", {"report": rep})


COMMANDS = {
    "rasterize": cmd_rasterize, "whitney": cmd_whitney, "john-estimate": cmd_john,
    "simplify": cmd_simplify, "verify": cmd_verify, "capacity": cmd_capacity,
    "harmonic": cmd_harmonic, "measure": cmd_measure, "removability": cmd_removability,
    "witness": cmd_witness, "beurling": cmd_beurling,
}


class _Failed(Exception):
    def __init__(self, report):
        super().__init__("verification failed")
        self.report = report


def main(argv=None):
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        COMMANDS[args.command](args)
    except _Failed as exc:
        failed = [k for k in ("connected", "simply_connected", "boundary_contained")
                  if not exc.report[k]["ok"]]
        sys.stderr.write(json.dumps({"error": "VerificationFailed", "failed": failed,
                                     "witnesses": {k: exc.report[k]["witness"] for k in failed}},
                                    sort_keys=True) + "\n")
        return 1
    except JohnforgeError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True) + "\n")
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                                    sort_keys=True) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
