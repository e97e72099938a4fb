"""Print I_{c,d}(w), J_{c,d}(w) and the growth-model ratio on a radius ladder."""

import argparse

import numpy as np

from bergman_kit import bounds as bd
from bergman_kit.kernel import Params, g_at_one


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=-0.5)
    ap.add_argument("--c", type=float, default=0.0)
    ap.add_argument("--d", type=float, nargs="+", default=None)
    ap.add_argument("--radii", type=float, nargs="+", default=[0.0, 0.5, 0.9, 0.95, 0.99, 0.995])
    args = ap.parse_args()
    p = Params(args.alpha, args.beta).reduced()
    ds = args.d or [p.alpha + 2, p.alpha + 1, p.alpha, p.alpha - 1]
    g1 = g_at_one(p)
    print(f"alpha={p.alpha:g} beta={p.beta:g} c={args.c:g} G(1)={g1:.6g}")
    print(f"{'d':>6} {'class':>14} {'|w|':>7} {'I':>14} {'J/G(1)':>14} {'J':>14} {'ratio':>10}")
    for d in ds:
        cls = bd.classify_asymptotic(p.alpha, d)
        for r in args.radii:
            i_val = bd.icd_numeric(args.c, d, r, p)
            j_val = bd.jcd_closed(args.c, d, r, p)
            ratio = i_val / cls.predicted(r) if r > 0 else np.nan
            print(f"{d:6.3g} {str(cls):>14} {r:7.4g} {i_val:14.8g} {j_val / g1:14.8g} "
                  f"{j_val:14.8g} {ratio:10.4g}")


if __name__ == "__main__":
    main()
