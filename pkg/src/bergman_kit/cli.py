"""Command-line entry point ``bergman-kit``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

from . import diskquad as dq
from . import verify as vf
from .bounds import LpSetting
from .diskquad import DEFAULT_ANGULAR_COUNT, DEFAULT_RADIAL_ORDER
from .errors import DomainError, IntegrabilityError, SingularArgument
from .kernel import Params

COMMANDS = ("verify-lemma1", "berezin-eval", "asymptotics", "boundedness", "metric",
            "lipschitz", "verify-all")
SIG_DIGITS = 15


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: Params
    a: float | None = None
    b: float | None = None
    p: float | None = None
    tol: float | None = None
    seed: int = 0
    radial_order: int = DEFAULT_RADIAL_ORDER
    angular_count: int = DEFAULT_ANGULAR_COUNT
    output_format: str = "json"
    output_path: str | None = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise DomainError("tolerance must be positive")
        if not 2 <= self.radial_order <= 2000:
            raise DomainError("radial order must lie in [2, 2000]")
        if not 4 <= self.angular_count <= 1 << 16:
            raise DomainError("angular count must lie in [4, 65536]")


# --- parsing helpers ------------------------------------------------------

def parse_function(spec: str) -> dq.TestFunction:
    """``one``, ``log``, ``monomial:n,m``, ``gap:N``, ``h:s,tau``, ``re:n``, ``im:n``."""
    name, _, rest = spec.partition(":")
    args = [float(x) for x in rest.split(",")] if rest else []
    makers = {
        "one": (dq.one, 0), "log": (dq.log_mod_sq, 0), "monomial": (dq.monomial, 2),
        "gap": (dq.one_minus_mod_sq_pow, 1), "h": (dq.h_family, 2),
        "re": (dq.harmonic_re, 1), "im": (dq.harmonic_im, 1),
    }
    if name not in makers:
        raise argparse.ArgumentTypeError(f"unknown function {name!r}")
    maker, arity = makers[name]
    if len(args) != arity:
        raise argparse.ArgumentTypeError(f"{name} takes {arity} argument(s)")
    if name in ("monomial", "re", "im"):
        args = [int(a) for a in args]
    return maker(*args)


def parse_point(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def parse_pair(text: str) -> tuple[complex, complex]:
    z, sep, w = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("pairs are written z:w")
    return parse_point(z), parse_point(w)


# --- serialization --------------------------------------------------------

def _fmt(x: float) -> float:
    out = float(f"{x:.{SIG_DIGITS}g}")
    # rounding the largest doubles up would overflow to inf
    return x if math.isinf(out) and math.isfinite(x) else out


def flatten_row(row: dict) -> dict:
    """Split complex values into ``_re``/``_im`` columns and round floats to 15 digits."""
    out = {}
    for k, v in row.items():
        if isinstance(v, bool) or v is None or isinstance(v, (str, int)):
            out[k] = v
        elif isinstance(v, complex):
            out[f"{k}_re"] = _fmt(v.real)
            out[f"{k}_im"] = _fmt(v.imag)
        else:
            out[k] = _fmt(float(v))
    return out


def non_finite(rows) -> list[str]:
    bad = []
    for i, row in enumerate(rows):
        for k, v in row.items():
            if isinstance(v, float) and not math.isfinite(v):
                bad.append(f"row {i}: {k} is not finite")
    return bad


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        text = f"{v:.{SIG_DIGITS}g}"
        return text if float(text) == v else repr(v)
    return str(v)


def encode(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1, allow_nan=False) + "\n"
    fields = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_value(row.get(k)) for k in fields})
    return buf.getvalue()


# --- commands -------------------------------------------------------------

def run(config: RunConfig, args: argparse.Namespace) -> list[vf.Report]:
    cmd = config.command
    p = config.params
    tol = config.tol
    orders = dict(radial_order=config.radial_order, angular_count=config.angular_count)
    reports = []
    if cmd in ("verify-lemma1", "verify-all"):
        kw = {} if tol is None else {"tol": tol}
        if cmd == "verify-lemma1" and args.grid == "single":
            reports.append(vf.verify_lemma1((p.alpha,), (p.beta,), **kw))
        else:
            reports.append(vf.verify_lemma1(**kw))
    if cmd in ("berezin-eval", "verify-all"):
        func = getattr(args, "function", None) if cmd == "berezin-eval" else None
        pts = getattr(args, "points", None) if cmd == "berezin-eval" else None
        reports.append(vf.berezin_eval(p, function=func, points=pts,
                                       **({} if tol is None else {"tol": tol}), **orders))
    if cmd in ("asymptotics", "verify-all"):
        c = getattr(args, "c", 0.0) if cmd == "asymptotics" else 0.0
        d = getattr(args, "d", None) if cmd == "asymptotics" else None
        ladder = getattr(args, "radii", None) if cmd == "asymptotics" else None
        reports.append(vf.asymptotics(p, c=c, ds=None if d is None else d,
                                      ladder=tuple(ladder) if ladder else vf.RADIUS_LADDER))
    if cmd in ("boundedness", "verify-all"):
        fixed = None
        if cmd == "boundedness" and None not in (config.a, config.b, config.p):
            fixed = [LpSetting(p.alpha, p.beta, config.a, config.b, config.p)]
        count = getattr(args, "sweep", 5000) if cmd == "boundedness" else 5000
        rep = vf.boundedness(count=count, seed=config.seed, fixed=fixed, **orders)
        if fixed is not None:
            # a user-supplied setting has no expected value to check against
            rep.failures = [f for f in rep.failures if not f.startswith("fixed setting")]
        reports.append(rep)
    if cmd in ("metric", "verify-all"):
        pairs = getattr(args, "pairs", None) if cmd == "metric" else None
        reports.append(vf.metric(p, pairs=pairs or vf.DEFAULT_PAIRS,
                                 **({} if tol is None else {"tol": tol})))
    if cmd in ("lipschitz", "verify-all"):
        func = getattr(args, "function", None) if cmd == "lipschitz" else None
        pairs = getattr(args, "pairs", None) if cmd == "lipschitz" else None
        reports.append(vf.lipschitz(p, func or dq.monomial(1, 1), pairs=pairs or vf.DEFAULT_LIP_PAIRS,
                                    **({} if tol is None else {"tol": tol}), **orders))
    return reports


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--beta", type=float, default=-0.5)
    common.add_argument("--a", type=float, default=None, help="target weight exponent on 1-|z|^2")
    common.add_argument("--b", type=float, default=None, help="target weight exponent on |z|^2")
    common.add_argument("--p", type=float, default=None, help="Lebesgue exponent")
    common.add_argument("--radial-order", type=int, default=DEFAULT_RADIAL_ORDER)
    common.add_argument("--angular-count", type=int, default=DEFAULT_ANGULAR_COUNT)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="bergman-kit",
                                     description="Verify kernel, Berezin transform and metric numerics.")
    sub = parser.add_subparsers(dest="command", required=True)
    lem = sub.add_parser("verify-lemma1", parents=[common], help="G-function identities on a grid")
    lem.add_argument("--grid", choices=("full", "single"), default="full",
                     help="full parameter grid or only --alpha/--beta")
    bz = sub.add_parser("berezin-eval", parents=[common], help="evaluate the Berezin transform")
    bz.add_argument("--function", type=parse_function, default=None)
    bz.add_argument("--points", type=parse_point, nargs="+", default=None)
    asy = sub.add_parser("asymptotics", parents=[common], help="growth of I_{c,d} near the circle")
    asy.add_argument("--c", type=float, default=0.0)
    asy.add_argument("--d", type=float, nargs="+", default=None)
    asy.add_argument("--radii", type=float, nargs="+", default=None)
    bnd = sub.add_parser("boundedness", parents=[common], help="boundedness region and Schur windows")
    bnd.add_argument("--sweep", type=int, default=5000, help="number of random settings")
    met = sub.add_parser("metric", parents=[common], help="geodesic distances")
    met.add_argument("--pairs", type=parse_pair, nargs="+", default=None)
    lip = sub.add_parser("lipschitz", parents=[common], help="Lipschitz estimate for the transform")
    lip.add_argument("--function", type=parse_function, default=None)
    lip.add_argument("--pairs", type=parse_pair, nargs="+", default=None)
    sub.add_parser("verify-all", parents=[common], help="run every suite with defaults")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(args.command, Params(args.alpha, args.beta), args.a, args.b, args.p,
                           args.tol, args.seed, args.radial_order, args.angular_count,
                           args.format, args.out)
    except DomainError as exc:
        parser.error(str(exc))
    try:
        reports = run(config, args)
    except (DomainError, IntegrabilityError, SingularArgument) as exc:
        parser.error(str(exc))

    rows = []
    failures = []
    for rep in reports:
        flat = [flatten_row(r) for r in rep.rows]
        bad = non_finite(flat)
        failures.extend(f"{rep.name}: {m}" for m in rep.failures + bad)
        if config.command == "verify-all":
            rows.append({"command": rep.name, "passed": rep.passed and not bad,
                         "failures": len(rep.failures) + len(bad), "seconds": _fmt(rep.seconds),
                         "seed": config.seed})
        else:
            for r in flat:
                rows.append({k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                             for k, v in r.items()})
    text = encode(rows, config.output_format)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for msg in failures:
        print(f"FAIL {msg}", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
