"""Command-line entry point.

One subcommand group per subsystem, JSON in, canonical JSON report out.
Exit codes: 0 success with all assertions passing, 1 input or usage error,
2 assertion failure (the report is still emitted).

A plain key=value config file supplies defaults (seed, trials, grid,
budgets); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import acceptance, blocks, cube, dynsys, embed, simplicial
from .covers import Cover, join, mesh, order, order_at, refines
from .errors import InputError, MeandimError
from .rational import fmt, frac
from .report import Report


@dataclass
class RunConfig:
    seed: int = 0
    trials: int = 100
    grid: int = 16
    budget: int = 200
    verbosity: int = 1

    @staticmethod
    def load(path: str | None) -> "RunConfig":
        cfg = RunConfig()
        if path is None:
            return cfg
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if not hasattr(cfg, key):
                raise InputError(f"{path}:{lineno}: unknown config key {key!r}")
            setattr(cfg, key, int(value))
        if cfg.trials < 1 or cfg.grid < 1 or cfg.budget < 1:
            raise InputError(f"{path}: trials, grid, and budget must be positive")
        return cfg


def _read_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise InputError(f"file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _emit(report: Report, args) -> int:
    if getattr(args, "timing", False) is False:
        report.wall_time_ms = None
    text = report.render()
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.all_passed else 2


def _timed(fn):
    def wrapper(args, cfg):
        t0 = time.perf_counter()
        report = fn(args, cfg)
        report.wall_time_ms = round(1000 * (time.perf_counter() - t0), 3)
        return _emit(report, args)

    return wrapper


# -- cover group ---------------------------------------------------------------

@_timed
def cmd_cover_order(args, cfg):
    obj = _read_json(args.file)
    cov = Cover.from_json(obj)
    rep = Report("cover order", inputs=obj)
    rep.results["order"] = order(cov)
    if args.point is not None:
        rep.results["order_at"] = order_at(cov, args.point)
    return rep


@_timed
def cmd_cover_join(args, cfg):
    a_obj, b_obj = _read_json(args.alpha), _read_json(args.beta)
    a, b = Cover.from_json(a_obj), Cover.from_json(b_obj)
    out = join(a, b)
    rep = Report("cover join", inputs={"alpha": a_obj, "beta": b_obj})
    rep.results["join"] = out.to_json()
    rep.results["order"] = order(out)
    rep.check("join refines alpha", refines(out, a))
    rep.check("join refines beta", refines(out, b))
    return rep


@_timed
def cmd_cover_refines(args, cfg):
    b_obj, a_obj = _read_json(args.beta), _read_json(args.alpha)
    rep = Report("cover refines", inputs={"beta": b_obj, "alpha": a_obj})
    rep.results["refines"] = refines(Cover.from_json(b_obj), Cover.from_json(a_obj))
    return rep


@_timed
def cmd_cover_mesh(args, cfg):
    obj = _read_json(args.file)
    rep = Report("cover mesh", inputs=obj)
    rep.results["mesh"] = fmt(mesh(Cover.from_json(obj)))
    return rep


# -- complex group ---------------------------------------------------------------

@_timed
def cmd_complex_dim(args, cfg):
    obj = _read_json(args.file)
    cx = simplicial.AbstractComplex.from_json(obj)
    rep = Report("complex dim", inputs=obj)
    rep.results["combinatorial_dimension"] = simplicial.combinatorial_dimension(cx)
    return rep


@_timed
def cmd_complex_nerve(args, cfg):
    obj = _read_json(args.file)
    cov = Cover.from_json(obj)
    nv = simplicial.nerve(cov)
    rep = Report("complex nerve", inputs=obj)
    rep.results["nerve"] = nv.to_json()
    rep.results["combinatorial_dimension"] = simplicial.combinatorial_dimension(nv)
    rep.check("nerve dimension equals cover order",
              simplicial.combinatorial_dimension(nv) == order(cov))
    return rep


@_timed
def cmd_complex_stars(args, cfg):
    obj = _read_json(args.file)
    cx = simplicial.AbstractComplex.from_json(obj)
    cov = simplicial.star_cover(cx)
    rep = Report("complex stars", inputs=obj)
    rep.results["star_cover"] = cov.to_json()
    rep.results["order"] = order(cov)
    rep.check("star order equals combinatorial dimension",
              order(cov) == simplicial.combinatorial_dimension(cx))
    return rep


@_timed
def cmd_complex_subdivide(args, cfg):
    obj = _read_json(args.file)
    if obj.get("coords"):
        g = simplicial.geometric_from_json(obj)
    else:
        g = simplicial.realize(simplicial.AbstractComplex.from_json(obj))
    sub = simplicial.barycentric_subdivide(g)
    rep = Report("complex subdivide", inputs=obj)
    rep.results["subdivision"] = simplicial.geometric_to_json(sub)
    rep.results["mesh_sq_before"] = fmt(simplicial.mesh_sq(g))
    rep.results["mesh_sq_after"] = fmt(simplicial.mesh_sq(sub))
    m = simplicial.combinatorial_dimension(g.abstract)
    bound = Fraction(m, m + 1) ** 2 * simplicial.mesh_sq(g) if m else Fraction(0)
    rep.check("mesh contraction", simplicial.mesh_sq(sub) <= bound or m == 0)
    return rep


@_timed
def cmd_complex_mesh(args, cfg):
    obj = _read_json(args.file)
    g = simplicial.geometric_from_json(obj)
    rep = Report("complex mesh", inputs=obj)
    rep.results["mesh_sq"] = fmt(simplicial.mesh_sq(g))
    rep.results["mesh_float"] = simplicial.mesh_geometric(g)
    rep.tolerances["mesh_float"] = 1e-12
    return rep


# -- cube group -------------------------------------------------------------------

@_timed
def cmd_cube_order(args, cfg):
    obj = _read_json(args.file)
    cov = cube.BoxCover.from_json(obj)
    rep = Report("cube order", inputs=obj)
    rep.results["exact_order"] = cube.exact_order(cov)
    return rep


@_timed
def cmd_cube_face_check(args, cfg):
    obj = _read_json(args.file)
    rep = Report("cube face-check", inputs=obj)
    rep.results["face_condition"] = cube.face_condition(cube.BoxCover.from_json(obj))
    return rep


@_timed
def cmd_cube_brick(args, cfg):
    bc = cube.brick_cover(args.n, frac(args.eps))
    rep = Report("cube brick", inputs={"n": args.n, "eps": args.eps})
    rep.results["cover"] = bc.to_json()
    rep.results["exact_order"] = cube.exact_order(bc)
    rep.results["mesh"] = fmt(bc.mesh())
    rep.check("order equals n", cube.exact_order(bc) == args.n)
    rep.check("face condition", cube.face_condition(bc))
    rep.check("mesh within eps", bc.mesh() <= frac(args.eps))
    return rep


@_timed
def cmd_cube_witness(args, cfg):
    obj = _read_json(args.file)
    cov = cube.BoxCover.from_json(obj)
    out = cube.lebesgue_witness(cov, grid=args.grid or cfg.grid, seed=args.seed if args.seed is not None else cfg.seed)
    rep = Report("cube lebesgue-witness", inputs=obj, seed=out.seed)
    rep.results.update(out.to_json())
    rep.tolerances["min_displacement"] = 1e-12
    rep.check("strictly positive displacement", out.min_displacement > 0)
    return rep


@_timed
def cmd_cube_exhaustive(args, cfg):
    val = cube.exhaustive_min_order(args.n, args.grid, args.max_sets)
    rep = Report("cube exhaustive", inputs={"n": args.n, "grid": args.grid, "max_sets": args.max_sets})
    rep.results["min_order"] = val
    rep.check("at or above the dimension", val >= args.n)
    return rep


# -- blocksys group ----------------------------------------------------------------

@_timed
def cmd_blocksys_build(args, cfg):
    sys_obj = blocks.build(args.r, args.stages, args.alphabet)
    rep = Report(
        "blocksys build",
        inputs={"r": args.r, "stages": args.stages, "alphabet": args.alphabet},
        seed=args.seed if args.seed is not None else cfg.seed,
    )
    rep.results.update(blocks.system_report(sys_obj))
    lower = blocks.lower_bound_mdim(sys_obj)
    rep.check("lower bound equals target when expansion is exact",
              not sys_obj.expansion_exhausted() or lower == sys_obj.target_r)
    return rep


def _rebuild_from_report(obj: dict) -> blocks.BlockSystem:
    for key in ("target_r", "alphabet", "stages"):
        if key not in obj:
            raise InputError(f"system JSON lacks {key!r}")
    return blocks.build(obj["target_r"], len(obj["stages"]) - 1, int(obj["alphabet"]))


@_timed
def cmd_blocksys_bounds(args, cfg):
    obj = _read_json(args.file)
    sys_obj = _rebuild_from_report(obj.get("results", obj))
    rep = Report("blocksys bounds", inputs=obj)
    rep.results["lower_bound_mdim"] = fmt(blocks.lower_bound_mdim(sys_obj))
    n = sys_obj.built
    rep.results["free_dim_ratio"] = fmt(blocks.free_dim_ratio(sys_obj, n))
    rep.results["upper_bounds"] = {
        str(k): fmt(blocks.upper_bound_mdim(sys_obj, n, k)) for k in (1, 10, 100)
    }
    return rep


@_timed
def cmd_blocksys_probe(args, cfg):
    obj = _read_json(args.file)
    sys_obj = _rebuild_from_report(obj.get("results", obj))
    n = sys_obj.built - 1
    out = blocks.minimality_probe(sys_obj, n, trials=args.trials or cfg.trials,
                                  seed=args.seed if args.seed is not None else cfg.seed)
    rep = Report("blocksys probe", inputs=obj, seed=out.seed)
    rep.results.update(out.to_json())
    rep.check("every trial found a shift", out.successes == out.trials)
    return rep


# -- dynsys group -----------------------------------------------------------------

@_timed
def cmd_dynsys_marker(args, cfg):
    obj = _read_json(args.file)
    sys_obj = dynsys.FinitePermSystem.from_json(obj)
    marker = dynsys.find_marker(sys_obj, args.n)
    rep = Report("dynsys marker", inputs=obj)
    rep.results["marker"] = sorted(marker) if marker else None
    rep.check("marker found", marker is not None)
    if marker is not None:
        rep.check("marker verifies", dynsys.is_marker(sys_obj, marker, args.n))
    return rep


@_timed
def cmd_dynsys_rokhlin(args, cfg):
    obj = _read_json(args.file)
    sys_obj = dynsys.FinitePermSystem.from_json(obj)
    if args.marker:
        marker = frozenset(args.marker.split(","))
    else:
        found = dynsys.find_marker(sys_obj, args.n)
        if found is None:
            raise InputError("no marker exists for this n; pass --marker explicitly")
        marker = found
    u = frozenset(args.u.split(",")) if args.u else marker
    out = dynsys.rokhlin_property_check(sys_obj, args.n, marker, u)
    rep = Report("dynsys rokhlin", inputs=obj)
    rep.results.update(out.to_json())
    rep.check("defect inside the shifted support", out.defect_in_shifted_support)
    rep.check("defect n-separated", out.defect_n_separated)
    return rep


@_timed
def cmd_dynsys_perdim(args, cfg):
    obj = _read_json(args.file)
    descr = dynsys.SymbolicSystemDescriptor.from_json(obj)
    rep = Report("dynsys perdim", inputs=obj)
    rep.results["perdim"] = fmt(dynsys.perdim(descr, args.k_max))
    rep.results["argmax_k"] = dynsys.perdim_argmax(descr, args.k_max)
    if args.power:
        re_val, bound = dynsys.perdim_power_bound(descr, args.power, args.k_max)
        rep.results["power_reindexed"] = fmt(re_val)
        rep.results["power_bound"] = fmt(bound)
        rep.check("power bound", re_val <= bound)
    return rep


@_timed
def cmd_dynsys_indices(args, cfg):
    idx = dynsys.distinct_indices(args.period, args.offset, args.n)
    rep = Report("dynsys indices", inputs={"period": args.period, "offset": args.offset, "n": args.n})
    rep.results["indices"] = idx
    if args.period is not None and args.offset is not None:
        pts = {i % args.period for i in idx} | {(i + args.offset) % args.period for i in idx}
        rep.check("replay distinct on the cycle", len(pts) == 2 * len(idx))
    return rep


# -- embed group -------------------------------------------------------------------

@_timed
def cmd_embed_general_position(args, cfg):
    obj = _read_json(args.file)
    pts = [tuple(frac(c) for c in v) for v in obj["points"]]
    rep = Report("embed general-position", inputs=obj)
    rep.results["general_position"] = embed.is_general_position(pts)
    if args.perturb:
        seed = args.seed if args.seed is not None else cfg.seed
        out = embed.perturb_general_position(pts, frac(args.eps), seed)
        rep.seed = seed
        rep.results["perturbed"] = [[fmt(c) for c in p] for p in out]
        rep.check("perturbed family in general position", embed.is_general_position(out))
        disp = max(
            max(abs(a - b) for a, b in zip(p, q)) for p, q in zip(pts, out)
        ) if pts else Fraction(0)
        rep.results["max_displacement"] = fmt(disp)
        rep.check("displacement below eps", disp < frac(args.eps))
    return rep


@_timed
def cmd_embed_pattern_test(args, cfg):
    obj = _read_json(args.file)
    pat = embed.PatternMatrix.of(obj["rows"])
    seed = args.seed if args.seed is not None else cfg.seed
    trials = args.trials or cfg.trials
    if args.affine:
        out = embed.pattern_generic_affine(pat, trials, seed)
    else:
        out = embed.pattern_generic_invertibility(pat, trials, seed)
    rep = Report("embed pattern-test", inputs=obj, seed=seed)
    rep.results.update(out.to_json())
    rep.check("no exact degeneracies", out.all_passed)
    return rep


def _pou_side(obj: dict) -> tuple[embed.PartitionOfUnity, dict]:
    cov = Cover.from_json(obj["cover"])
    pou = embed.PartitionOfUnity.subordinate(cov, anchors=obj.get("anchors"))
    targets = {
        name: embed.CyclicVector.of(blocks_) for name, blocks_ in obj["targets"].items()
    }
    return pou, targets


@_timed
def cmd_embed_pou(args, cfg):
    obj = _read_json(args.file)
    lemma = obj.get("lemma")
    seed = args.seed if args.seed is not None else cfg.seed
    constraint = {k: obj[k] for k in ("lemma", "n", "l", "d", "n1", "n2", "N", "S") if k in obj}
    if lemma == "approx2":
        p1, t1 = _pou_side(obj["side1"])
        p2, t2 = _pou_side(obj["side2"])
        fmap, out = embed.pou_map_builder({"side1": p1, "side2": p2},
                                          {"side1": t1, "side2": t2},
                                          constraint, frac(obj["eps"]), seed)
    else:
        pou, targets = _pou_side(obj)
        fmap, out = embed.pou_map_builder({"main": pou}, {"main": targets},
                                          constraint, frac(obj["eps"]), seed)
    rep = Report("embed pou", inputs=obj, seed=seed)
    rep.results.update(out.to_json())
    rep.check("constraint satisfied on the verification set", True)
    rep.check("anchors within eps", out.anchor_deviation < frac(obj["eps"]))
    return rep


@_timed
def cmd_embed_n1_find(args, cfg):
    obj = _read_json(args.file)
    seq = embed.WindowSequence.of(int(obj["M"]), [frac(v) for v in obj["values"]])
    rep = Report("embed n1-find", inputs=obj)
    oracle = embed.window_index_oracle(seq)
    r = embed.find_window_index(seq)
    rep.results["r"] = r
    rep.results["oracle_feasible"] = oracle
    rep.check("all three conditions", all(embed.window_index_conditions(seq, r)))
    rep.check("oracle agreement", r in oracle)
    return rep


@_timed
def cmd_embed_sphere(args, cfg):
    seed = args.seed if args.seed is not None else cfg.seed
    out = embed.sphere_demo(args.samples, seed)
    rep = Report("embed sphere-demo", inputs={"samples": args.samples}, seed=seed)
    rep.results.update(out.to_json())
    rep.check("exact equivariance", out.equivariance_failures == 0)
    rep.check("injectivity over sampled pairs", out.injectivity_failures == 0)
    return rep


@_timed
def cmd_embed_menger(args, cfg):
    obj = _read_json(args.file)
    cloud = embed.PointCloud.of(
        {k: v for k, v in obj["cloud"].items()}, metric=obj.get("metric", "sup")
    )
    cov = Cover.from_json(obj["cover"])
    f = {k: tuple(frac(c) for c in v) for k, v in obj["f"].items()}
    seed = args.seed if args.seed is not None else cfg.seed
    g, out = embed.eps_injective_map(cloud, cov, f, frac(obj["eps"]), frac(obj["delta"]),
                                     int(obj["m"]), seed)
    rep = Report("embed menger", inputs=obj, seed=seed)
    rep.results.update(out)
    rep.results["g"] = {k: [fmt(c) for c in v] for k, v in sorted(g.items())}
    rep.check("eps-injective", not out["violations"])
    rep.check("within delta of f", out["deviation_within_delta"])
    return rep


# -- verify -------------------------------------------------------------------------

@_timed
def cmd_verify(args, cfg):
    rep = Report("verify", inputs={"only": args.only})
    echo = print if cfg.verbosity else None
    if args.only:
        records = [acceptance.run_one(args.only)]
    else:
        records = acceptance.run_all(echo=echo)
    rep.results["criteria"] = [
        {k: r[k] for k in ("id", "title", "passed", "elapsed_s", "budget_s")}
        for r in records
    ]
    for r in records:
        rep.check(f"criterion {r['id']}", r["passed"])
    return rep


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key=value defaults file")
    common.add_argument("--out", default=None, help="write the report to this path")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")

    top = argparse.ArgumentParser(prog="meandim")
    sub = top.add_subparsers(dest="group", required=True)

    def leaf(group, name, handler):
        p = group.add_parser(name, parents=[common])
        p.set_defaults(handler=handler)
        return p

    cover = sub.add_parser("cover").add_subparsers(dest="op", required=True)
    p = leaf(cover, "order", cmd_cover_order)
    p.add_argument("file")
    p.add_argument("--point", default=None)
    p = leaf(cover, "join", cmd_cover_join)
    p.add_argument("alpha")
    p.add_argument("beta")
    p = leaf(cover, "refines", cmd_cover_refines)
    p.add_argument("beta")
    p.add_argument("alpha")
    p = leaf(cover, "mesh", cmd_cover_mesh)
    p.add_argument("file")

    cplx = sub.add_parser("complex").add_subparsers(dest="op", required=True)
    for name, fn in [("dim", cmd_complex_dim), ("nerve", cmd_complex_nerve),
                     ("stars", cmd_complex_stars), ("subdivide", cmd_complex_subdivide),
                     ("mesh", cmd_complex_mesh)]:
        p = leaf(cplx, name, fn)
        p.add_argument("file")

    cb = sub.add_parser("cube").add_subparsers(dest="op", required=True)
    p = leaf(cb, "order", cmd_cube_order)
    p.add_argument("file")
    p = leaf(cb, "face-check", cmd_cube_face_check)
    p.add_argument("file")
    p = leaf(cb, "brick", cmd_cube_brick)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", required=True)
    p = leaf(cb, "lebesgue-witness", cmd_cube_witness)
    p.add_argument("file")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p = leaf(cb, "exhaustive", cmd_cube_exhaustive)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--max-sets", type=int, required=True, dest="max_sets")

    bs = sub.add_parser("blocksys").add_subparsers(dest="op", required=True)
    p = leaf(bs, "build", cmd_blocksys_build)
    p.add_argument("--r", required=True)
    p.add_argument("--stages", type=int, default=5)
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--seed", type=int, default=None)
    p = leaf(bs, "bounds", cmd_blocksys_bounds)
    p.add_argument("file")
    p = leaf(bs, "probe", cmd_blocksys_probe)
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    dy = sub.add_parser("dynsys").add_subparsers(dest="op", required=True)
    p = leaf(dy, "marker", cmd_dynsys_marker)
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p = leaf(dy, "rokhlin", cmd_dynsys_rokhlin)
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--marker", default=None)
    p.add_argument("--u", default=None)
    p = leaf(dy, "perdim", cmd_dynsys_perdim)
    p.add_argument("file")
    p.add_argument("--k-max", type=int, required=True, dest="k_max")
    p.add_argument("--power", type=int, default=None)
    p = leaf(dy, "indices", cmd_dynsys_indices)
    p.add_argument("--period", type=int, default=None)
    p.add_argument("--offset", type=int, default=None)
    p.add_argument("--n", type=int, required=True)

    em = sub.add_parser("embed").add_subparsers(dest="op", required=True)
    p = leaf(em, "general-position", cmd_embed_general_position)
    p.add_argument("file")
    p.add_argument("--perturb", action="store_true")
    p.add_argument("--eps", default="1/100")
    p.add_argument("--seed", type=int, default=None)
    p = leaf(em, "pattern-test", cmd_embed_pattern_test)
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--affine", action="store_true")
    p = leaf(em, "pou", cmd_embed_pou)
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=None)
    p = leaf(em, "n1-find", cmd_embed_n1_find)
    p.add_argument("file")
    p = leaf(em, "sphere-demo", cmd_embed_sphere)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p = leaf(em, "menger", cmd_embed_menger)
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=None)

    vf = sub.add_parser("verify", parents=[common])
    vf.add_argument("--only", default=None)
    vf.set_defaults(handler=cmd_verify)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        cfg = RunConfig.load(args.config)
        return args.handler(args, cfg)
    except MeandimError as exc:
        error = {
            "schema": "meandim/1",
            "error": {"kind": type(exc).__name__, "message": str(exc)},
        }
        sys.stdout.write(json.dumps(error, sort_keys=True, indent=2) + "\n")
        return 1
    except FileNotFoundError as exc:
        sys.stdout.write(json.dumps({
            "schema": "meandim/1",
            "error": {"kind": "InputError", "message": str(exc)},
        }, sort_keys=True, indent=2) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
