"""Beta statistics of X/GX-cuts against GMI on seeded dense mixed instances.

    python3 scripts/run_beta_study.py --scales 1 2 --count 300 --rows 2 5 --csv beta.csv
"""

import argparse
import math
import sys
import time

import numpy as np

from gcpcuts import harness as h
from gcpcuts import instances as ins
from gcpcuts.errors import NotEnoughFractionalRows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scales", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--rows", type=int, nargs="+", default=[2, 5])
    ap.add_argument("--mix", choices=["pure", "mixed"], default="mixed")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    reports = []
    for idx in range(args.count):
        scale = args.scales[(idx // 2) % len(args.scales)]
        data = "integer" if idx % 2 == 0 else "rational"
        inst = ins.gen_random_dense(scale, data, args.mix, seed=args.seed, index=idx)
        for N in args.rows:
            try:
                reports.append(h.run_algorithm2(inst, h.RunConfig(N=N, seed=args.seed)))
            except NotEnoughFractionalRows:
                pass
    if args.csv:
        h.write_csv(reports, args.csv)

    per_inst = {}
    for r in reports:
        if math.isfinite(r.beta):
            per_inst[r.instance] = max(per_inst.get(r.instance, -math.inf), r.beta)
    betas = np.array(list(per_inst.values()))
    imp = betas[betas > 1e-6]
    print(f"instances {betas.size}  improved {imp.size / betas.size:.3f}  "
          f"mean beta {betas.mean():.4f}  conditional mean {imp.mean():.4f}  "
          f"median {np.median(imp):.4f}  share >= 0.10 {np.mean(betas >= 0.10):.3f}  "
          f"({time.perf_counter() - t0:.0f} s)")
    for N in args.rows:
        b = np.array([r.beta for r in reports if r.N == N and math.isfinite(r.beta)])
        i = b[b > 1e-6]
        print(f"  N={N}: runs {b.size}  improved {i.size / b.size:.3f}  conditional mean {i.mean():.4f}")


if __name__ == "__main__":
    sys.exit(main())
