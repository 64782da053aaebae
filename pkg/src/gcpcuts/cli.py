"""Command line entry point: ``gcpcuts <verb> ...``.

Exit codes: 0 success, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import geometry as geo
from . import harness as h
from . import instances as ins
from .errors import InputError, IpUnavailable, NumericalFailure
from .reference import branch_and_bound

log = logging.getLogger("gcpcuts")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}") from exc


def _ints(text: str) -> list:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from exc


_DATA = {"int": "integer", "rat": "rational", "integer": "integer", "rational": "rational"}


def _load_dir(path: str) -> list:
    p = Path(path)
    if p.is_file():
        files = [p]
    elif p.is_dir():
        files = sorted(list(p.glob("*.json")) + list(p.glob("*.mps")))
    else:
        raise InputError(f"no such file or directory: {path}")
    if not files:
        raise InputError(f"no .json or .mps instances in {path}")
    out = []
    for f in files:
        fmt = "json" if f.suffix == ".json" else "free_mps"
        out.append(ins.parse_instance(f.read_text(), fmt, name=f.stem))
    return out


def _write(text: str, dest) -> None:
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ext = "json" if args.format == "json" else "mps"
    fmt = "json" if args.format == "json" else "free_mps"
    for idx in range(args.count):
        if args.kind == "dense":
            inst = ins.gen_random_dense(args.scale, _DATA[args.data], args.mix, args.seed, idx)
        else:
            inst = ins.gen_graph_instance(args.nv, args.p, args.mode, args.seed, idx)
        (out / f"{inst.name}.{ext}").write_text(ins.write_instance(inst, fmt))
    print(f"wrote {args.count} instances to {out}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = h.RunConfig(N=args.rows, k=args.cuts, ell=args.rounds, q=args.q, seed=args.seed,
                      node_limit=args.node_limit, solve_ip=args.ip, timing=args.timing)
    reports, failed = [], 0
    for inst in _load_dir(args.inp):
        try:
            reports.append(h.run_algorithm2(inst, cfg))
        except NumericalFailure as exc:
            failed += 1
            print(f"{inst.name}: numerical failure: {exc}", file=sys.stderr)
        except InputError as exc:
            print(f"{inst.name}: skipped: {exc}", file=sys.stderr)
    _write(h.csv_text(reports), args.csv)
    s = h.summarize(reports)
    print(f"instances={s['instances']} improved={s['frac_improved']:.4f} "
          f"mean_beta_improved={s['mean_beta_improved']:.6f}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_closure(args) -> int:
    cfg = h.RunConfig(N=args.rows, seed=args.seed, node_limit=args.node_limit)
    reports, failed = [], 0
    for inst in _load_dir(args.inp):
        try:
            reports.append(h.run_closure(inst, args.num_cuts, cfg))
        except NumericalFailure as exc:
            failed += 1
            print(f"{inst.name}: numerical failure: {exc}", file=sys.stderr)
        except (InputError, IpUnavailable) as exc:
            print(f"{inst.name}: skipped: {exc}", file=sys.stderr)
    _write(h.closure_csv_text(reports), args.csv)
    gg = [r.gap_gmi for r in reports if r.gap_gmi is not None]
    gf = [r.gap_family for r in reports if r.gap_family is not None]
    if gg:
        print(f"instances={len(gg)} mean_gap_gmi={np.mean(gg):.6f} "
              f"mean_gap_family={np.mean(gf):.6f}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_lift(args) -> int:
    g, b = h.load_gcp(Path(args.gcp).read_text())
    if args.b is not None:
        b = np.asarray(args.b, dtype=float)
    if b is None:
        raise InputError("no b given (use --b or a 'b' field in the GCP file)")
    p = np.asarray(args.point, dtype=float)
    fn = geo.normals(g, b)
    result = {
        "gauge": geo.gauge(fn, p),
        "trivial_lift": geo.trivial_lift(g, b, p, method=args.method),
        "method": args.method,
    }
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


def cmd_badlift(args) -> int:
    rows = h.run_badlift(args.i, args.nmax, p=args.p)
    print("i,trivial,pi_min,ratio,delta")
    for r in rows:
        print(",".join([str(r.i)] + [h.fmt_num(v) for v in (r.trivial, r.pi_min, r.ratio, r.delta)]))
    return EXIT_OK


def cmd_solve_ip(args) -> int:
    (inst,) = _load_dir(args.inp)
    res = branch_and_bound(inst, args.node_limit)
    print(json.dumps({"instance": inst.name, "status": res.status,
                      "objective": None if not math.isfinite(res.objective) else res.objective,
                      "nodes": res.nodes}, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gcpcuts", description="Cuts from generalized cross-polytopes.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="generate instances")
    g.add_argument("--kind", choices=["dense", "gnp"], default="dense")
    g.add_argument("--scale", type=int, default=1)
    g.add_argument("--data", choices=sorted(_DATA), default="int")
    g.add_argument("--mix", choices=["pure", "mixed"], default="mixed")
    g.add_argument("--nv", type=int, default=10)
    g.add_argument("--p", type=float, default=0.3)
    g.add_argument("--mode", choices=["stable_set", "vertex_cover"], default="stable_set")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=["json", "mps"], default="json")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="compare GMI, X- and GX-cuts")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--rows", type=int, default=2)
    r.add_argument("--cuts", type=int, default=5)
    r.add_argument("--rounds", type=int, default=5)
    r.add_argument("--q", type=int, default=1)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--ip", action="store_true", help="solve the IP for gap-closed columns")
    r.add_argument("--node-limit", type=int, default=2000)
    r.add_argument("--timing", action="store_true", help="fill time_ms (breaks byte-identical reruns)")
    r.add_argument("--csv", default="-")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("closure", help="gap closed by GMI vs GMI plus many random cuts")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--num-cuts", type=int, default=1000)
    c.add_argument("--rows", type=int, default=2)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--node-limit", type=int, default=5000)
    c.add_argument("--csv", default="-")
    c.set_defaults(func=cmd_closure)

    lf = sub.add_parser("lift", help="gauge and trivial lifting at a point")
    lf.add_argument("--gcp", required=True)
    lf.add_argument("--b", type=_floats)
    lf.add_argument("--point", type=_floats, required=True)
    lf.add_argument("--method", choices=["exact", "axis", "breakpoint"], default="exact")
    lf.set_defaults(func=cmd_lift)

    bl = sub.add_parser("badlift", help="trivial lifting against the minimal-lifting bound on T_i")
    bl.add_argument("--i", type=_ints, default=[1, 10, 100])
    bl.add_argument("--nmax", type=int, default=20)
    bl.add_argument("--p", type=_floats, default=list(h.BADLIFT_P))
    bl.set_defaults(func=cmd_badlift)

    s = sub.add_parser("solve-ip", help="branch and bound on one instance")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--node-limit", type=int, default=10_000)
    s.set_defaults(func=cmd_solve_ip)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
