"""Command-line front end.

Verbs: volume, theta-body, limit-body, proj-body, mfold, check, sweep, fuzz.
Bodies are given as named specs ("cube2", "neg-simplex3", "ball") or as JSON
spec files.  Outputs are flat CSV or structured JSON with '#' header lines
carrying the tool version, the resolved seed, grid sizes, and tolerances, so
a rerun with the same configuration is byte-identical.

Exit codes: 0 success, 1 a check failed, 2 usage or spec error, 3 numeric or
resource failure.
"""

import argparse
import json
import math
import os
import re
import sys

from dataclasses import dataclass, field

import numpy as np

from . import bodies as bd
from . import convolution as cv
from . import inequalities as iq
from . import oracles
from . import projbody as pb
from . import thetabody as tb

__version__ = "0.1.0"

OK, CHECK_FAILED, USAGE, NUMERIC = 0, 1, 2, 3

_NAMED = re.compile(r"(cube|simplex|ball|cross)([1-9]\d*)?$")


class SpecError(Exception):
    """A body spec that cannot be turned into a body."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class BodySpec:
    """Parsed description of one body, not yet validated into geometry."""

    kind: str
    payload: dict
    transform: object = None
    label: str = ""

    def build(self):
        try:
            body = self._raw_body()
            if self.transform is not None:
                body = bd.apply(self.transform, body)
            return body
        except bd.GeometryError as exc:
            raise SpecError("%s: %s" % (self.label or self.kind, exc)) from exc

    def _raw_body(self):
        p = self.payload
        if self.kind == "hpoly":
            return bd.HPolytope(np.asarray(p["normals"], dtype=float),
                                np.asarray(p["offsets"], dtype=float))
        if self.kind == "vpoly":
            return bd.VPolytope(np.asarray(p["points"], dtype=float))
        if self.kind == "ball":
            return bd.Ball(np.asarray(p["center"], dtype=float), p["radius"])
        if self.kind == "cube":
            return bd.cube(p["n"], p.get("half_width", 0.5))
        if self.kind == "simplex":
            return bd.standard_simplex(p["n"])
        if self.kind == "cross":
            return bd.cross_polytope(p["n"])
        raise SpecError("unknown body kind %r" % self.kind)


def _transform_from_json(doc):
    if doc is None:
        return None
    matrix = np.asarray(doc["matrix"], dtype=float)
    translation = np.asarray(doc.get("translation",
                                     [0.0] * matrix.shape[0]), dtype=float)
    return bd.AffineMap(matrix, translation)


def _spec_from_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecError("cannot read spec file %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise SpecError("%s: line %d: %s" % (path, exc.lineno, exc.msg)) from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpecError("%s: spec must be an object with a 'kind' field" % path)
    kind = doc["kind"]
    payload = {k: v for k, v in doc.items()
               if k not in ("kind", "transform", "label")}
    for need, kinds in [("points", ("vpoly",)), ("normals", ("hpoly",)),
                        ("offsets", ("hpoly",)), ("center", ("ball",)),
                        ("radius", ("ball",)), ("n", ("cube", "simplex", "cross"))]:
        if kind in kinds and need not in payload:
            raise SpecError("%s: kind %r needs field %r" % (path, kind, need))
    try:
        transform = _transform_from_json(doc.get("transform"))
    except (KeyError, ValueError, bd.GeometryError) as exc:
        raise SpecError("%s: bad transform: %s" % (path, exc)) from exc
    return BodySpec(kind, payload, transform, doc.get("label", path))


def parse_body_spec(arg, n=None, radius=None):
    """A named body ("cube2", "neg-ball3") or a JSON spec file path."""
    if arg.endswith(".json") or os.path.sep in arg or os.path.exists(arg):
        return _spec_from_file(arg)
    neg = arg.startswith("neg-")
    base = arg[4:] if neg else arg
    m = _NAMED.match(base)
    if m is None:
        raise SpecError("unknown body %r (named bodies: cube, simplex, ball,"
                        " cross, with optional dimension suffix)" % arg)
    kind, dim_s = m.groups()
    dim = int(dim_s) if dim_s else n
    if dim is None:
        raise SpecError("body %r needs a dimension suffix or --n" % arg)
    if kind == "ball":
        payload = {"center": [0.0] * dim, "radius": 1.0 if radius is None else radius}
    else:
        payload = {"n": dim}
    transform = bd.scaling(dim, -1.0) if neg else None
    return BodySpec(kind, payload, transform, arg)


@dataclass(frozen=True)
class RunConfig:
    """Resolved runtime knobs, echoed into every output header."""

    n: int
    thetas: tuple
    dirs: object
    seed: int
    rtol: float
    out: object = None

    def grid(self, dim=None):
        return tb.SphereGrid.make(self.n if dim is None else dim,
                                  self.dirs, self.seed)


def _resolve_seed(value):
    if value is not None:
        return int(value)
    env = os.environ.get("CONVBODY_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise _UsageError("CONVBODY_SEED must be an integer") from exc
    return 0


def _theta_list(args, default=(0.5,)):
    if getattr(args, "theta", None):
        out = tuple(float(t) for t in args.theta)
    elif getattr(args, "theta_grid", None):
        g = int(args.theta_grid)
        if g < 1:
            raise _UsageError("--theta-grid must be positive")
        out = tuple((i + 1.0) / (g + 1.0) for i in range(g))
    else:
        out = default
    for t in out:
        if not 0.0 <= t <= 1.0:
            raise _UsageError("theta must lie in [0, 1]")
    return out


def _config(args, dim):
    seed = _resolve_seed(getattr(args, "seed", None))
    dirs = getattr(args, "dirs", None)
    rtol = float(args.tol) if getattr(args, "tol", None) else 1e-8
    return RunConfig(dim, _theta_list(args), dirs and int(dirs), seed, rtol,
                     getattr(args, "out", None))


def _header(cfg, extra=()):
    lines = ["# convbody %s" % __version__,
             "# seed %d" % cfg.seed,
             "# dirs %s" % ("default" if cfg.dirs is None else cfg.dirs),
             "# rtol %g" % cfg.rtol]
    for k, v in extra:
        lines.append("# %s %s" % (k, v))
    return lines


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_pair(args, need_L=True):
    if not args.K or (need_L and not args.L):
        raise _UsageError("this command needs --K and --L")
    spec_k = parse_body_spec(args.K, args.n, getattr(args, "r", None))
    K = spec_k.build()
    if not need_L:
        return K
    L = parse_body_spec(args.L, args.n, getattr(args, "r", None)).build()
    return K, L


# -- verbs -------------------------------------------------------------------


def cmd_volume(args):
    spec = parse_body_spec(args.body, args.n, getattr(args, "r", None))
    v = bd.volume(spec.build())
    print("%.17g exact +-0" % v)
    return OK


def cmd_theta_body(args):
    K, L = _build_pair(args)
    cfg = _config(args, K.dim)
    theta = cfg.thetas[0]
    if not 0.0 <= theta < 1.0:
        raise _UsageError("theta-body needs theta in [0, 1)")
    pair = cv.normalize(K, L)
    grid = cfg.grid()
    rb = tb.theta_body(pair, theta, grid, cfg.rtol)
    v, err = tb.radial_volume_with_error(rb)
    meta = {"tool": "convbody " + __version__, "seed": cfg.seed,
            "dirs": grid.count, "rtol": cfg.rtol, "theta": theta,
            "volume": v, "volume_error": err,
            "max_overlap": pair.max_overlap}
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(tb.radial_body_to_json(rb, meta) + "\n")
    print("volume %.12g +- %.3g (theta=%g, %d directions)"
          % (v, err, theta, grid.count))
    return OK


def cmd_limit_body(args):
    K, L = _build_pair(args)
    cfg = _config(args, K.dim)
    pair = cv.normalize(K, L)
    grid = cfg.grid()
    rb = tb.limit_body(pair, grid)
    meta = {"tool": "convbody " + __version__, "seed": cfg.seed,
            "dirs": grid.count, "rtol": cfg.rtol,
            "max_overlap": pair.max_overlap}
    if rb.is_bounded():
        v, err = tb.radial_volume_with_error(rb)
        meta["volume"] = v
        meta["volume_error"] = err
        print("volume %.12g +- %.3g (%d directions)" % (v, err, grid.count))
    else:
        count = int(np.count_nonzero(rb.unbounded))
        print("unbounded in %d of %d directions" % (count, grid.count))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(tb.radial_body_to_json(rb, meta) + "\n")
    return OK


def cmd_proj_body(args):
    K = _build_pair(args, need_L=False)
    cfg = _config(args, K.dim)
    grid = cfg.grid()
    rb = pb.polar_projection_body(K, grid)
    v, err = tb.radial_volume_with_error(rb)
    functional = bd.volume(K) ** (K.dim - 1) * v
    if cfg.out:
        meta = {"tool": "convbody " + __version__, "seed": cfg.seed,
                "dirs": grid.count, "volume": v, "functional": functional}
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(tb.radial_body_to_json(rb, meta) + "\n")
    print("volume %.12g +- %.3g functional %.12g" % (v, err, functional))
    return OK


def _parse_bodies_list(args):
    if not args.bodies:
        raise _UsageError("this command needs --bodies a,b,c")
    names = [s for chunk in args.bodies for s in chunk.split(",") if s]
    if len(names) < 2:
        raise _UsageError("--bodies needs at least two entries")
    return [parse_body_spec(s, args.n, getattr(args, "r", None)).build()
            for s in names]


def cmd_mfold(args):
    bodies = _parse_bodies_list(args)
    cfg = _config(args, bodies[0].dim)
    theta = cfg.thetas[0]
    tup = cv.mfold_normalize(bodies)
    grid = cfg.grid()
    rb = tb.mfold_theta_body(tup, theta, grid, cfg.rtol)
    v, err = tb.radial_volume_with_error(rb)
    if cfg.out:
        meta = {"tool": "convbody " + __version__, "seed": cfg.seed,
                "dirs": grid.count, "rtol": cfg.rtol, "theta": theta,
                "volume": v, "volume_error": err,
                "max_overlap": tup.max_overlap, "m": tup.m}
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(tb.radial_body_to_json(rb, meta) + "\n")
    print("volume %.12g +- %.3g (m=%d, theta=%g, max overlap %.12g)"
          % (v, err, tup.m, theta, tup.max_overlap))
    return OK


_CHECK_NAMES = ("bm", "forms", "mono", "chain", "zhang", "rs", "mfold", "all")


def _run_checks(names, args):
    reports = []
    if args.fuzz:
        cfg = _config(args, args.n or 2)
        fuzz_checks = []
        remap = {"bm": "bm", "chain": "chain", "mono": "monotonicity",
                 "rs": "rogers-shephard", "zhang": "zhang"}
        for nm in names:
            if nm == "all":
                fuzz_checks = list(remap.values())
                break
            if nm in remap:
                fuzz_checks.append(remap[nm])
        if not fuzz_checks:
            raise _UsageError("none of the requested checks support --fuzz")
        grid = cfg.grid()
        thetas = cfg.thetas if len(cfg.thetas) >= 2 else (0.3, 0.7)
        return iq.fuzz(cfg.n, int(args.fuzz), cfg.seed, grid, thetas,
                       cfg.rtol, tuple(fuzz_checks)), cfg
    if "mfold" in names:
        bodies = _parse_bodies_list(args)
        cfg = _config(args, bodies[0].dim)
        grid = cfg.grid()
        for theta in cfg.thetas:
            reports.extend(iq.check_mfold(bodies, theta, grid, cfg.rtol,
                                          seed=cfg.seed))
        names = [nm for nm in names if nm != "mfold"]
        if names:
            raise _UsageError("mfold cannot be mixed with pair checks")
        return reports, cfg
    K, L = _build_pair(args)
    cfg = _config(args, K.dim)
    grid = cfg.grid()
    pair = cv.normalize(K, L)
    if "all" in names:
        names = ["bm", "forms", "mono", "chain", "zhang", "rs"]
    for nm in names:
        if nm == "bm":
            for theta in cfg.thetas:
                reports.append(iq.check_bm_theta(pair, theta, grid, cfg.rtol,
                                                 seed=cfg.seed))
        elif nm == "forms":
            for theta in cfg.thetas:
                reports.extend(iq.check_equivalent_forms(
                    K, L, theta, 0.5, grid, cfg.rtol, seed=cfg.seed))
        elif nm == "mono":
            for theta in cfg.thetas:
                reports.append(iq.check_monotonicity(
                    pair, 0.5 * theta, theta, grid, cfg.rtol, seed=cfg.seed))
        elif nm == "chain":
            for theta in cfg.thetas:
                reports.extend(iq.check_inclusion_chain(
                    pair, theta, grid, cfg.rtol, seed=cfg.seed))
        elif nm == "zhang":
            size = int(args.theta_grid) if args.theta_grid else 64
            reports.extend(iq.check_zhang_extension(pair, grid, size,
                                                    cfg.rtol, seed=cfg.seed))
        elif nm == "rs":
            reports.append(iq.check_rogers_shephard(pair, grid, cfg.rtol,
                                                    seed=cfg.seed))
    return reports, cfg


def cmd_check(args):
    names = list(dict.fromkeys(args.checks))
    for nm in names:
        if nm not in _CHECK_NAMES:
            raise _UsageError("unknown check %r (choose from %s)"
                              % (nm, ", ".join(_CHECK_NAMES)))
    reports, cfg = _run_checks(names, args)
    lines = _header(cfg, [("checks", " ".join(names)),
                          ("thetas", " ".join("%g" % t for t in cfg.thetas))])
    lines.extend(iq.reports_to_csv(reports).rstrip("\n").split("\n"))
    _emit(lines, cfg.out)
    return OK if iq.all_passed(reports) else CHECK_FAILED


def cmd_sweep(args):
    n = args.n or 2
    cfg = _config(args, n)
    thetas = cfg.thetas if (args.theta or args.theta_grid) else \
        tuple((i + 1.0) / 10.0 for i in range(9))
    grid = cfg.grid()
    simplex_dirs = None
    user = None
    if args.K and args.L:
        K = parse_body_spec(args.K, n, getattr(args, "r", None)).build()
        L = parse_body_spec(args.L, n, getattr(args, "r", None)).build()
        user = cv.normalize(K, L)

    def quotient_row(pair, grid_):
        R = tb.theta_radii_matrix(pair, thetas, grid_, cfg.rtol)
        vols = (grid_.weights @ R ** n) / n
        denom = bd.volume(pair.K) ** (1.0 / n) + bd.volume(pair.L) ** (1.0 / n)
        return vols ** (1.0 / n) / denom

    cube_pair = cv.normalize(bd.cube(n), bd.cube(n))
    ball_pair = cv.normalize(bd.Ball(np.zeros(n), 1.0), bd.Ball(np.zeros(n), 1.0))
    simplex = bd.standard_simplex(n)
    simplex_pair = cv.normalize(simplex, bd.reflect(simplex))
    grid_s = grid
    if n >= 3 and grid.count > 4096:
        # the simplex pair runs through the general polytope evaluator,
        # which is orders slower than the cube and ball fast paths
        simplex_dirs = 4096
        grid_s = tb.SphereGrid.make(n, simplex_dirs, cfg.seed)
    q_cube = quotient_row(cube_pair, grid)
    q_ball = quotient_row(ball_pair, grid)
    q_simplex = quotient_row(simplex_pair, grid_s)
    q_user = quotient_row(user, grid) if user is not None else None

    extra = [("n", n)]
    if simplex_dirs:
        extra.append(("simplex-dirs", simplex_dirs))
    lines = _header(cfg, extra)
    cols = ["theta", "cube", "cube_oracle", "ball", "ball_oracle",
            "simplex", "simplex_oracle"]
    if q_user is not None:
        cols.append("user")
    lines.append(",".join(cols))
    for i, t in enumerate(thetas):
        row = [repr(float(t)),
               repr(float(q_cube[i])), repr(oracles.cube_quotient(n, t)),
               repr(float(q_ball[i])), repr(oracles.ball_R(n, t)),
               repr(float(q_simplex[i])), repr(oracles.simplex_quotient(n, t))]
        if q_user is not None:
            row.append(repr(float(q_user[i])))
        lines.append(",".join(row))
    _emit(lines, cfg.out)
    return OK


def cmd_fuzz(args):
    n = args.n or 2
    cfg = _config(args, n)
    count = int(args.count)
    grid = cfg.grid()
    thetas = cfg.thetas if len(cfg.thetas) >= 2 else (0.3, 0.7)
    reports = iq.fuzz(n, count, cfg.seed, grid, thetas, cfg.rtol)
    lines = _header(cfg, [("count", count),
                          ("thetas", " ".join("%g" % t for t in thetas))])
    lines.extend(iq.reports_to_csv(reports).rstrip("\n").split("\n"))
    _emit(lines, cfg.out)
    failed = [r for r in reports if not r.passed]
    print("%d reports, %d failures" % (len(reports), len(failed)),
          file=sys.stderr)
    return OK if not failed else CHECK_FAILED


# -- argument plumbing -------------------------------------------------------


def _add_common(p, bodies=False):
    p.add_argument("--n", type=int, help="ambient dimension for named bodies")
    p.add_argument("--theta", action="append",
                   help="theta value (repeatable)")
    p.add_argument("--theta-grid", dest="theta_grid",
                   help="number of evenly spaced theta values")
    p.add_argument("--dirs", help="directions in the sphere grid")
    p.add_argument("--seed", help="random seed (default CONVBODY_SEED or 0)")
    p.add_argument("--tol", help="bisection tolerance (relative)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--r", type=float, help="radius for named balls")
    p.add_argument("--K", help="first body (named or spec file)")
    p.add_argument("--L", help="second body (named or spec file)")
    if bodies:
        p.add_argument("--bodies", action="append",
                       help="comma-separated bodies for m-fold commands")


def build_parser():
    parser = _Parser(prog="convbody",
                     description="overlap bodies, projection bodies, and"
                     " the inequalities that bind them")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("volume", help="exact volume of one body")
    p.add_argument("body")
    _add_common(p)
    p.set_defaults(fn=cmd_volume)

    p = sub.add_parser("theta-body", help="level set of the overlap at theta")
    _add_common(p)
    p.set_defaults(fn=cmd_theta_body)

    p = sub.add_parser("limit-body", help="scaled theta -> 1 limit body")
    _add_common(p)
    p.set_defaults(fn=cmd_limit_body)

    p = sub.add_parser("proj-body", help="polar projection body of --K")
    _add_common(p)
    p.set_defaults(fn=cmd_proj_body)

    p = sub.add_parser("mfold", help="m-fold overlap level set")
    _add_common(p, bodies=True)
    p.set_defaults(fn=cmd_mfold)

    p = sub.add_parser("check", help="verify inequalities, emit CSV reports")
    p.add_argument("checks", nargs="+",
                   help="checks to run: %s" % ", ".join(_CHECK_NAMES))
    p.add_argument("--fuzz", type=int,
                   help="run the battery over this many random pairs")
    _add_common(p, bodies=True)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("sweep", help="volume quotients of the model families")
    _add_common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("fuzz", help="randomized check battery")
    p.add_argument("--count", type=int, default=20)
    _add_common(p)
    p.set_defaults(fn=cmd_fuzz)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return USAGE
    except SpecError as exc:
        print("spec error: %s" % exc, file=sys.stderr)
        return USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, KeyError, TypeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return USAGE
    except bd.GeometryError as exc:
        print("numeric error: %s" % exc, file=sys.stderr)
        return NUMERIC
    except MemoryError:
        print("resource error: out of memory", file=sys.stderr)
        return NUMERIC


if __name__ == "__main__":
    sys.exit(main())
