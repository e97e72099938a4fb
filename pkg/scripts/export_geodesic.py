"""Optimize a geodesic between two points and write its vertices as CSV."""

import argparse
import csv
import sys

from bergman_kit import metric as mt
from bergman_kit.cli import parse_point
from bergman_kit.kernel import Params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z", type=parse_point, required=True)
    ap.add_argument("--w", type=parse_point, required=True)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=-0.5)
    ap.add_argument("--max-segments", type=int, default=1024)
    ap.add_argument("--out", default=None, help="CSV file (default: stdout)")
    args = ap.parse_args()
    p = Params(args.alpha, args.beta)
    res = mt.geodesic_distance(p, args.z, args.w, max_segments=args.max_segments)
    chord = mt.path_length(p.reduced(), mt.PathPolyline.chord(args.z, args.w))
    print(f"distance={res.distance:.15g} chord={chord:.15g} segments="
          f"{res.path.segments if res.path else 0} converged={res.converged}", file=sys.stderr)
    rows = res.path.to_rows() if res.path else []
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(fh, fieldnames=["index", "re", "im"], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({"index": row["index"], "re": f"{row['re']:.15g}", "im": f"{row['im']:.15g}"})
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
