"""Command line interface.

Subcommands: mesh, geom, solve, oracle, rellich, verify, study.  A config
file of key=value lines can preset any long flag; explicit flags win.
Report-writing commands emit JSON plus a CSV twin and render figures next
to the output file.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

import numpy as np

from . import geometry, harness, mesh as meshmod, oracle, polyforms as pfm, problems, rellich
from .problems import ProblemSpec


def _parse_x0(text):
    if text is None:
        return None
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("x0 must be 'x,y'")
    return tuple(parts)


def _parse_krange(text: str):
    if ".." in text:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    return range(1, int(text) + 1)


def _parse_coeff_grid(text: str) -> pfm.Poly2:
    rows = [[float(v) for v in row.split(",")] for row in text.split(";")]
    width = max(len(r) for r in rows)
    grid = [r + [0.0] * (width - len(r)) for r in rows]
    return pfm.Poly2(grid)


def _load_config(path):
    out = {}
    for lineno, line in enumerate(pathlib.Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="formspect")
    ap._all_subparsers = []  # populated below so config defaults reach them
    ap.add_argument("--config", help="key=value file presetting any flag")
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mesh", help="generate and save a mesh")
    msub = m.add_subparsers(dest="mesh_command", required=True)
    g = msub.add_parser("gen")
    g.add_argument("--shape", required=True,
                   choices=["disk", "square", "polygon", "ellipse", "annulus"])
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--h", type=float, required=True)
    g.add_argument("--vertices", help="polygon vertices 'x1,y1;x2,y2;...'")
    g.add_argument("--axes", help="ellipse semi-axes 'a,b'")
    g.add_argument("--inner-radius", type=float, default=0.5)
    g.add_argument("--out", required=True)
    g.add_argument("--plot", action="store_true")

    ge = sub.add_parser("geom", help="geometric summary of a mesh")
    ge.add_argument("--mesh", required=True)
    ge.add_argument("--x0", type=_parse_x0, default=None)

    s = sub.add_parser("solve", help="solve one eigenvalue problem")
    s.add_argument("--problem", required=True, choices=problems.PROBLEM_IDS)
    s.add_argument("--p", type=int, default=0)
    s.add_argument("--k", type=int, default=5)
    s.add_argument("--mesh", required=True)
    s.add_argument("--order", type=int, default=1, choices=[1, 2])
    s.add_argument("--out")

    o = sub.add_parser("oracle", help="closed-form disk spectra")
    o.add_argument("--problem", required=True,
                   choices=["dirichlet", "neumann", "steklov", "bsd", "bsn"])
    o.add_argument("--p", type=int, default=0)
    o.add_argument("--radius", type=float, default=1.0)
    o.add_argument("--count", type=int, default=5)

    r = sub.add_parser("rellich", help="term-by-term identity ledger")
    r.add_argument("--mesh", required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--degree", type=int, default=3)
    r.add_argument("--p", type=int, default=1)
    r.add_argument("--field", default="position", choices=["position", "custom"])
    r.add_argument("--x0", type=_parse_x0, default=None)
    r.add_argument("--fx", help="custom field x-component coefficient grid")
    r.add_argument("--fy", help="custom field y-component coefficient grid")

    v = sub.add_parser("verify", help="evaluate an inequality with margins")
    v.add_argument("--theorem", required=True, choices=harness.THEOREM_IDS)
    v.add_argument("--mesh", required=True)
    v.add_argument("--p", type=int, default=0)
    v.add_argument("--k", type=_parse_krange, default=range(1, 2))
    v.add_argument("--x0", type=_parse_x0, default=None)
    v.add_argument("--order", type=int, default=2, choices=[1, 2])
    v.add_argument("--rel-error", type=float, default=harness.DEFAULT_REL_ERROR)
    v.add_argument("--out", required=True)

    st = sub.add_parser("study", help="mesh refinement convergence study")
    st.add_argument("--problem", required=True, choices=problems.PROBLEM_IDS)
    st.add_argument("--p", type=int, default=0)
    st.add_argument("--k", type=int, default=1)
    st.add_argument("--shape", default="disk", choices=["disk", "square", "ellipse"])
    st.add_argument("--h", required=True, help="comma separated sizes, e.g. 0.2,0.1,0.05")
    st.add_argument("--order", type=int, default=1, choices=[1, 2])
    st.add_argument("--radius", type=float, default=1.0)
    st.add_argument("--reference", type=float, default=None)
    st.add_argument("--out")
    ap._all_subparsers = [m, g, ge, s, o, r, v, st]
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    # first pass only to find --config; config values become new defaults
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        presets = _load_config(known.config)
        for parser in [ap, *ap._all_subparsers]:
            known_dests = {a.dest for a in parser._actions}
            parser.set_defaults(**{k: v for k, v in presets.items()
                                   if k in known_dests})
    args = ap.parse_args(argv)
    return _dispatch(args)


def _dispatch(args) -> int:
    if args.command == "mesh":
        return _cmd_mesh(args)
    if args.command == "geom":
        rep = geometry.geometric_summary(meshmod.load_mesh(args.mesh), _default_x0(args))
        print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
        return 0
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "oracle":
        vals = oracle.disk_form_spectrum(args.problem, args.p, args.radius, args.count) \
            if args.problem in ("dirichlet", "neumann", "steklov") \
            else oracle.disk_scalar_spectrum(args.problem, args.radius, args.count)
        print(json.dumps({"problem": args.problem, "p": args.p,
                          "radius": args.radius,
                          "values": [float(v) for v in vals]}, indent=2))
        return 0
    if args.command == "rellich":
        return _cmd_rellich(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "study":
        return _cmd_study(args)
    raise AssertionError("unhandled command")


def _default_x0(args):
    if getattr(args, "x0", None) is not None:
        return args.x0
    return meshmod.load_mesh(args.mesh).centroid()


def _cmd_mesh(args) -> int:
    if args.shape == "disk":
        m = meshmod.gen_disk(args.radius, args.h)
    elif args.shape == "square":
        m = meshmod.gen_square(args.radius, args.h)
    elif args.shape == "ellipse":
        a, b = (1.3, 0.8) if args.axes is None else map(float, args.axes.split(","))
        m = meshmod.gen_ellipse(a, b, args.h)
    elif args.shape == "annulus":
        m = meshmod.gen_annulus(args.inner_radius, args.radius, args.h)
    else:
        if not args.vertices:
            raise SystemExit("polygon shape needs --vertices")
        verts = [tuple(map(float, v.split(","))) for v in args.vertices.split(";")]
        m = meshmod.gen_polygon(verts, args.h)
    meshmod.save_mesh(m, args.out)
    if args.plot:
        from . import plots
        plots.plot_mesh(m, pathlib.Path(args.out).with_suffix(".png"))
    print(f"wrote {args.out}: {m.num_vertices} vertices, "
          f"{m.num_triangles} triangles")
    return 0


def _cmd_solve(args) -> int:
    m = meshmod.load_mesh(args.mesh)
    res = problems.solve(ProblemSpec(args.problem, args.p, args.k, m, args.order))
    doc = {"problem": args.problem, "p": args.p, "k": args.k,
           "order": args.order, "mesh": args.mesh,
           "values": [float(v) for v in res.values], "meta": res.meta}
    text = json.dumps(doc, indent=2, sort_keys=True, default=str)
    if args.out:
        pathlib.Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_rellich(args) -> int:
    m = meshmod.load_mesh(args.mesh)
    rng = np.random.default_rng(args.seed)
    omega = pfm.random_form(rng, args.p, args.degree)
    if args.field == "position":
        F = rellich.VectorFieldSpec.position(args.x0 or (0.0, 0.0))
    else:
        if not (args.fx and args.fy):
            raise SystemExit("custom field needs --fx and --fy coefficient grids")
        F = rellich.VectorFieldSpec.custom(_parse_coeff_grid(args.fx),
                                           _parse_coeff_grid(args.fy))
    ledger = rellich.rellich_ledger(m, F, omega)
    print(json.dumps(ledger.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_verify(args) -> int:
    m = meshmod.load_mesh(args.mesh)
    reports = harness.verify(args.theorem, m, x0=args.x0, p=args.p,
                             k_range=args.k, nodal_order=args.order,
                             rel_error=args.rel_error)
    out = pathlib.Path(args.out)
    harness.report_write(reports, out, "json")
    harness.report_write(reports, out.with_suffix(".csv"), "csv")
    from . import plots
    plots.plot_margins(reports, out.with_suffix(".png"))
    worst = min((r.margin for r in reports if r.status in ("pass", "fail")),
                default=float("nan"))
    for r in reports:
        print(f"{r.theorem_id} p={r.p} k={r.k}: {r.status} (margin {r.margin:.6g})")
    print(f"wrote {out}, {out.with_suffix('.csv')}, {out.with_suffix('.png')}; "
          f"worst margin {worst:.6g}")
    return 0 if all(r.status != "fail" for r in reports) else 1


def _cmd_study(args) -> int:
    hs = [float(v) for v in args.h.split(",")]
    study = harness.convergence_study(args.problem, args.p, args.shape, hs,
                                      k=args.k, nodal_order=args.order,
                                      radius=args.radius, reference=args.reference)
    text = json.dumps(study, indent=2, sort_keys=True)
    print(text)
    if args.out:
        out = pathlib.Path(args.out)
        out.write_text(text + "\n")
        from . import plots
        plots.plot_convergence(study, out.with_suffix(".png"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
