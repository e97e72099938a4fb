"""The ten acceptance criteria at their stated tolerances, one PASS/FAIL line each."""

import itertools
import json
import math
import subprocess
import sys
import time
import warnings

import mpmath
import numpy as np

from bergman_kit import berezin as bz
from bergman_kit import bounds as bd
from bergman_kit import diskquad as dq
from bergman_kit import metric as mt
from bergman_kit import verify as vf
from bergman_kit.errors import QuadratureAccuracyWarning
from bergman_kit.kernel import Params, g_at_one, kernel_eval

from conftest import ACCEPTANCE_LINES

P = Params(1.0, -0.5)


class Criterion:
    """Collects sub-check failures, then emits one line and asserts."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures = []
        self.start = time.perf_counter()

    def check(self, ok, message):
        if not ok:
            self.failures.append(message)

    def finish(self, limit=None):
        seconds = time.perf_counter() - self.start
        if limit is not None:
            self.check(seconds < limit, f"runtime {seconds:.1f}s exceeds {limit}s")
        status = "PASS" if not self.failures else "FAIL"
        detail = "" if not self.failures else " | " + "; ".join(self.failures[:3])
        line = f"criterion {self.number:2d} {status} {self.title} ({seconds:.2f}s){detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert not self.failures, "\n".join(self.failures)


def disk_points(rng, count, r_max):
    return r_max * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))


def test_criterion_01_g_function_grid():
    c = Criterion(1, "G-function identities and inequalities on the 6x4x20 grid")
    rep = vf.verify_lemma1()
    c.check(len(rep.rows) == 6 * 4 + 1, "grid is not 6 x 4")
    for msg in rep.failures:
        c.check(False, msg)
    worst = max(v for row in rep.rows[:-1] for k, v in row.items()
                if k not in ("alpha", "beta") and v is not None)
    c.check(worst < 1e-10, f"max residual {worst:.3g}")
    c.finish(limit=10)


def test_criterion_02_kernel_two_routes():
    c = Criterion(2, "kernel two-route agreement and beta = 0 closed form")
    rng = np.random.default_rng(2)
    xis = np.concatenate([disk_points(rng, 30, 0.9), [0.0, 0.9, -0.9, 0.9j]])
    for al, be in itertools.product(vf.ALPHA_GRID, vf.BETA_GRID):
        p = Params(al, be)
        vals = kernel_eval(p, xis)
        for xi, v in zip(xis, vals):
            # double-precision summation cancels badly near xi = -0.9, so sum at 40 digits
            with mpmath.workdps(40):
                ref = complex(mpmath.hyp2f1(1, al + be + 2, be + 1, complex(xi)))
            err = abs(v - ref) / abs(ref)
            c.check(err <= 1e-10, f"({al},{be}) xi={xi:.3g}: rel {err:.3g}")
        if be == 0:
            closed = (1 - xis) ** (-(al + 2))
            err = np.max(np.abs(vals - closed) / np.abs(closed))
            c.check(err <= 1e-12, f"beta=0 alpha={al}: rel {err:.3g}")
    c.finish()


def test_criterion_03_measure():
    c = Criterion(3, "probability measure mass and diagonal moments")
    for al, be in itertools.product(vf.ALPHA_GRID, vf.BETA_GRID):
        p = Params(al, be)
        rule = dq.build_rule(p)
        mass = dq.disk_integrate(dq.one(), rule).real
        c.check(abs(mass - 1) <= 1e-12, f"({al},{be}) mass {mass!r}")
        for n in range(13):
            ref = math.prod((be + 1 + k) / (al + be + 2 + k) for k in range(n))
            val = dq.moment(dq.one(), n, n, rule).real
            c.check(abs(val / ref - 1) <= 1e-10, f"({al},{be}) n={n}: rel {abs(val / ref - 1):.3g}")
    c.finish()


def test_criterion_04_normalization_and_harmonic():
    c = Criterion(4, "B1 = 1 for |z| <= 0.95 and harmonic fixed points")
    rng = np.random.default_rng(4)
    ring = np.concatenate([[0.0, 0.5, 0.95, -0.95j, 0.95 * np.exp(0.3j)], disk_points(rng, 10, 0.95)])
    for al, be in itertools.product(vf.ALPHA_GRID, vf.BETA_GRID):
        ctx = bz.make_context(Params(al, be))
        for z in ring:
            err = abs(bz.berezin_apply(ctx, dq.one(), z) - 1)
            c.check(err <= 1e-10, f"({al},{be}) z={z:.3g}: B1 error {err:.3g}")
    pts = disk_points(rng, 20, 0.9)
    for p in (Params(1.0, -0.5), Params(-0.5, -0.9), Params(3.7, 0.0)):
        ctx = bz.make_context(p)
        for n in range(1, 5):
            for f, u in ((dq.harmonic_re(n), lambda z: (z ** n).real),
                         (dq.harmonic_im(n), lambda z: (z ** n).imag)):
                for z in pts:
                    err = abs(bz.berezin_apply(ctx, f, z) - u(z))
                    c.check(err <= 1e-8, f"{p} {f.label()} z={z:.3g}: error {err:.3g}")
    c.finish(limit=60)


def test_criterion_05_log_counterexample():
    c = Criterion(5, "transform of log|w|^2 at alpha = 0 against the stated formula")
    for be in (-0.9, -0.5, -0.1):
        ctx = bz.make_context(Params(0.0, be))
        for z in (0.0, 0.3, 0.5j, 0.7):
            x = abs(z) ** 2
            stated = (1 - x) / (be + 1 - be * x)
            val = bz.berezin_apply(ctx, dq.log_mod_sq(), z)
            c.check(abs(val - stated) <= 1e-8,
                    f"beta={be} z={z}: got {val.real:.6f}, stated {stated:.6f}")
        dev = abs(bz.berezin_apply(ctx, dq.log_mod_sq(), 0.5) - math.log(0.25))
        c.check(dev > 0.1, f"beta={be}: deviation from log|z|^2 only {dev:.3g}")
    c.finish()


def jcd_tensor(c_, d, w, p, n=120, m=256):
    """``J`` by a tensor rule with pointwise kernel values."""
    t, wt = dq.gauss_jacobi(p.alpha + 2 + d, c_, n)
    phi = 2 * np.pi * np.arange(m) / m
    pts = np.sqrt(t)[:, None] * np.exp(1j * phi)[None, :]
    return float(wt @ (np.abs(kernel_eval(p, pts * np.conj(w))) ** 2).mean(axis=1))


def test_criterion_06_icd_asymptotics():
    c = Criterion(6, "sandwich, 4F3 closed form and regime ratios")
    for al, be in ((1.0, -0.5), (-0.5, -0.9), (2.0, -0.1), (1.3, 0.0)):
        p = Params(al, be)
        g1 = g_at_one(p)
        for c_, d in ((0.0, al), (-0.5, al + 1), (1.0, al - 1), (be, al)):
            for r in (0.0, 0.3, 0.6, 0.9, 0.99):
                i_val = bd.icd_numeric(c_, d, r, p)
                j_val = bd.jcd_closed(c_, d, r, p)
                c.check(j_val / g1 - 1e-9 <= i_val <= j_val + 1e-9,
                        f"{p} c={c_} d={d} |w|={r}: sandwich")
            for w in (0.2, 0.5, 0.8j):
                j_val = bd.jcd_closed(c_, d, w, p)
                ref = jcd_tensor(c_, d, w, p)
                c.check(abs(j_val / ref - 1) <= 1e-8, f"{p} c={c_} d={d} w={w}: 4F3 rel "
                        f"{abs(j_val / ref - 1):.3g}")
    for d in (P.alpha + 2, P.alpha, P.alpha - 1):
        cls = bd.classify_asymptotic(P.alpha, d)
        ratios = [bd.icd_numeric(0.0, d, r, P) / cls.predicted(r) for r in (0.9, 0.93, 0.96, 0.99)]
        spread = max(ratios) / min(ratios)
        c.check(spread <= 3, f"d={d} ({cls}): ratio spread {spread:.3g}")
    c.finish()


def test_criterion_07_boundedness_sweep():
    c = Criterion(7, "bounded_predicate equals Schur windows on 5000 settings")
    start = time.perf_counter()
    settings = bd.random_settings(5000, seed=0)
    rows = bd.sweep_rows(settings)
    seconds = time.perf_counter() - start
    bad = sum(r["predicate"] != r["schur"] for r in rows if r["schur"] is not None)
    c.check(len(rows) == 5000 and all(r["schur"] is not None for r in rows), "sweep has p = 1 rows")
    c.check(bad == 0, f"{bad} disagreements")
    c.check(seconds < 5, f"sweep took {seconds:.2f}s")
    c.finish()


def test_criterion_08_projection_identity():
    c = Criterion(8, "projection-norm identity and 3F2 closed form")
    rule = dq.build_rule(P)
    for g, v in itertools.product((0.3, 0.5j, -0.6 + 0.2j), (1.0, 0.5j, 0.3 - 0.4j)):
        chk = mt.projection_norm_identity_check(P, g, v, rule)
        rel = abs(chk.lhs / chk.rhs - 1)
        c.check(rel <= 1e-6, f"gamma={g} v={v}: lhs/rhs rel {rel:.3g}")
        rel = abs(chk.a_norm_sq / chk.a_norm_sq_closed - 1)
        c.check(rel <= 1e-8, f"gamma={g} v={v}: 3F2 rel {rel:.3g}")
    c.finish()


def test_criterion_09_metric():
    c = Criterion(9, "radial distance, symmetry and triangle inequality")
    for al in (0.0, 1.0, 2.5):
        for r in (0.3, 0.6, 0.9):
            d = mt.geodesic_distance(Params(al, 0.0), 0.0, r).distance
            ref = math.sqrt(al + 2) * math.atanh(r)
            c.check(abs(d / ref - 1) <= 1e-6, f"alpha={al} r={r}: rel {abs(d / ref - 1):.3g}")
    rng = np.random.default_rng(9)
    for _ in range(50):
        x, y, z = disk_points(rng, 3, 0.85)
        dxy = mt.geodesic_distance(P, x, y).distance
        dyx = mt.geodesic_distance(P, y, x).distance
        dyz = mt.geodesic_distance(P, y, z).distance
        dxz = mt.geodesic_distance(P, x, z).distance
        c.check(abs(dxy - dyx) <= 1e-6 * max(1.0, dxy), f"asymmetry {abs(dxy - dyx):.3g}")
        c.check(dxz <= dxy + dyz + 1e-6 * max(1.0, dxz), f"triangle gap {dxz - dxy - dyz:.3g}")
    c.finish()


def test_criterion_10_derivative_and_lipschitz():
    c = Criterion(10, "derivative bound, Lipschitz margins and verify-all runtime")
    ctx = bz.make_context(P)
    funcs = [dq.monomial(1, 1), dq.harmonic_re(2), dq.harmonic_im(1), dq.monomial(2, 1),
             dq.harmonic_re(3)]
    paths = [mt.PathPolyline.chord(0.0, 0.8, 4), mt.PathPolyline.chord(-0.5j, 0.6 + 0.2j, 4),
             mt.geodesic_distance(P, 0.3j, -0.5, max_segments=16).path,
             mt.geodesic_distance(P, 0.7, 0.7j, max_segments=16).path,
             mt.PathPolyline([0.0, 0.4, 0.4 + 0.4j, 0.5j])]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QuadratureAccuracyWarning)
        for f, path in zip(funcs, paths):
            for s in mt.derivative_bound_check(ctx, None, f, path):
                c.check(s.lhs <= s.rhs + 1e-8, f"{f.label()} s={s.s:.3f}: {s.lhs:.3g} > {s.rhs:.3g}")
    rng = np.random.default_rng(10)
    bmo = {f.label(): bz.bmo_norm(ctx, f) for f in funcs}
    for k in range(25):
        f = funcs[k % len(funcs)]
        z, w = disk_points(rng, 2, 0.8)
        rep = mt.lipschitz_check(ctx, None, f, z, w, bmo=bmo[f.label()])
        c.check(rep.margin >= -1e-8, f"{f.label()} ({z:.3g}, {w:.3g}): margin {rep.margin:.3g}")
        c.check(rep.certificate >= rep.lhs - 1e-8, f"{f.label()}: certificate below lhs")
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "bergman_kit.cli", "verify-all"],
                          capture_output=True, text=True, timeout=600)
    seconds = time.perf_counter() - start
    c.check(proc.returncode == 0, f"verify-all exit {proc.returncode}: {proc.stderr[:200]}")
    c.check(all(r["passed"] for r in json.loads(proc.stdout or "[]")), "verify-all reported failures")
    c.check(seconds < 300, f"verify-all took {seconds:.1f}s")
    c.finish()
