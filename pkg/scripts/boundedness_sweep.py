"""Random sweep of the L^p boundedness region with empirical probes on a subsample."""

import argparse
import collections
import warnings

from bergman_kit import berezin as bz
from bergman_kit import bounds as bd
from bergman_kit import verify as vf
from bergman_kit.cli import encode
from bergman_kit.errors import QuadratureAccuracyWarning
from bergman_kit.kernel import Params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--probe", type=int, default=20, help="settings that also get a probe ratio")
    ap.add_argument("--out", default="boundedness_sweep.csv")
    args = ap.parse_args()
    settings = bd.random_settings(args.count, args.seed)
    contexts = {}

    def probe(s):
        key = (s.alpha, s.beta)
        if key not in contexts:
            contexts[key] = bz.make_context(Params(*key), 60, 64)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QuadratureAccuracyWarning)
            return bd.empirical_bound_probe(s, contexts[key], vf.probe_sample(s))

    rows = bd.sweep_rows(settings[:args.probe], probe) + bd.sweep_rows(settings[args.probe:])
    with open(args.out, "w") as fh:
        fh.write(encode(rows, "csv"))
    tally = collections.Counter((r["predicate"], r["schur"]) for r in rows)
    for (pred, schur), n in sorted(tally.items(), key=str):
        print(f"predicate={pred!s:5} schur={schur!s:5} count={n}")
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
