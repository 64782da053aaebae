"""Trivial lifting against the minimal-lifting bound on the triangles T_i.

    python3 scripts/run_badlift.py --i 1 10 100 1000 --nmax 20
"""

import argparse

from gcpcuts import harness as h


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--i", type=int, nargs="+", default=[1, 10, 100])
    ap.add_argument("--nmax", type=int, default=20)
    ap.add_argument("--p", type=float, nargs=2, default=list(h.BADLIFT_P))
    args = ap.parse_args(argv)
    print(f"{'i':>6} {'trivial':>8} {'pi_min':>10} {'ratio':>9} {'delta':>9}")
    for r in h.run_badlift(args.i, args.nmax, p=args.p):
        print(f"{r.i:>6} {r.trivial:>8.4f} {r.pi_min:>10.6f} {r.ratio:>9.2f} {r.delta:>9.6f}")


if __name__ == "__main__":
    main()
