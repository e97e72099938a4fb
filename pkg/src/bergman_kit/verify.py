"""Check suites behind the command-line interface.

Each suite returns a :class:`Report`: table rows (plain dicts) plus the list
of failed checks.  Rows hold floats, ints, bools, strings or ``None``.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import berezin as bz
from . import bounds as bd
from . import diskquad as dq
from . import metric as mt
from .errors import QuadratureAccuracyWarning
from .kernel import Params, g_at_one, g_derivative, g_eval
from .specialfn import beta_fn

ALPHA_GRID = (-0.5, 0.0, 1.0, 1.3, 2.0, 3.7)
BETA_GRID = (-0.9, -0.5, -0.1, 0.0)
T_GRID = tuple(np.round(np.arange(20) * 0.05, 12))


@dataclass
class Report:
    name: str
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str) -> bool:
        if not ok:
            self.failures.append(message)
        return ok


def _timed(fn):
    def run(*args, **kwargs):
        start = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.seconds = time.perf_counter() - start
        return rep
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# --- G-function identities ------------------------------------------------

def lemma1_residuals(alpha: float, beta: float, t=T_GRID) -> dict:
    """Residuals of the G-function identities and inequalities on a t-grid.

    Inequalities report their largest violation (0 when they hold).
    """
    t = np.asarray(t, dtype=float)
    p = Params(alpha, beta)
    g = g_eval(p, t)
    gap = 1 - t
    g_a1 = g_eval(Params(alpha + 1, beta), t)
    g_b1 = g_eval(Params(alpha, beta + 1), t)
    out = {
        "derivative": np.max(np.abs(t * g_derivative(p, t) - beta * (gap ** (alpha + 1) - g))),
        "alpha_shift": np.max(np.abs((alpha + beta + 2) * g_a1 - (alpha + 2) * g
                                     - beta * gap ** (alpha + 2))),
        "beta_shift": np.max(np.abs(t * g_b1 - (beta + 1) / (alpha + beta + 2) * (g - gap ** (alpha + 2)))),
        "lower_bound": max(0.0, np.max(gap ** (alpha + 2) - g_b1)),
        "upper_bound": max(0.0, np.max(g_b1 - g)),
        "sharp_lower_bound": max(0.0, np.max(gap ** (alpha + 1) - g_b1)),
        "monotone": max(0.0, np.max(-np.diff(g))) if beta <= 0 else 0.0,
        "endpoint_zero": abs(float(g_eval(p, 0.0)) - 1),
        "endpoint_one": abs(float(g_eval(p, 1.0)) - g_at_one(p)),
    }
    if alpha == 0:
        h = g - g_b1
        out["h0_spot"] = np.max(np.abs(h - t / ((beta + 1) * (beta + 2))))
    else:
        out["h0_spot"] = None
    return {k: (None if v is None else float(v)) for k, v in out.items()}


@_timed
def verify_lemma1(alphas=ALPHA_GRID, betas=BETA_GRID, tol: float = 1e-10,
                  slack: float = 1e-12) -> Report:
    rep = Report("verify-lemma1")
    for al in alphas:
        for be in betas:
            res = lemma1_residuals(al, be)
            row = {"alpha": al, "beta": be, **res}
            rep.rows.append(row)
            for key, val in res.items():
                if val is None:
                    continue
                limit = slack if key in ("lower_bound", "upper_bound", "sharp_lower_bound",
                                         "monotone") else tol
                rep.check(val <= limit, f"alpha={al} beta={be}: {key} residual {val:.3g}")
    limit_errs = [float(np.max(np.abs(g_eval(Params(1.3, bb), np.asarray(T_GRID))
                                      - (1 - np.asarray(T_GRID)) ** 2.3)))
                  for bb in (10.0, 100.0, 1000.0)]
    rep.rows.append({"alpha": 1.3, "beta": "10,100,1000", "large_beta_errors":
                     ";".join(f"{e:.6g}" for e in limit_errs)})
    rep.check(limit_errs[0] > limit_errs[1] > limit_errs[2],
              "large-beta limit errors are not decreasing")
    return rep


# --- Berezin transform ----------------------------------------------------

def log_transform_reference(beta: float, z) -> float:
    """Transform of ``log|w|^2`` for ``alpha = 0``: ``-(1-|z|^2)/(beta+1-beta|z|^2)``."""
    x = abs(z) ** 2
    return -(1 - x) / (beta + 1 - beta * x)


@_timed
def berezin_eval(params: Params, radial_order: int, angular_count: int, tol: float = 1e-8,
                 function: dq.TestFunction | None = None, points=None) -> Report:
    rep = Report("berezin-eval")
    ctx = bz.make_context(params, radial_order, angular_count)
    if function is not None:
        for z in points or (0.0, 0.3, 0.5j, 0.7):
            v = bz.berezin_apply(ctx, function, z)
            rep.rows.append({"function": function.label(), "z": complex(z), "value": v,
                             "reference": None, "abs_error": None})
        return rep
    p = ctx.params
    cases = [(dq.one(), ctx, lambda z: 1.0),
             (dq.harmonic_re(2), ctx, lambda z: (z ** 2).real)]
    ctx0 = bz.make_context(Params(0.0, p.beta), radial_order, angular_count)
    cases.append((dq.log_mod_sq(), ctx0, lambda z: log_transform_reference(p.beta, z)))
    for f, c, ref in cases:
        for z in (0.0, 0.3, 0.5j, 0.7):
            v = bz.berezin_apply(c, f, z)
            r = ref(complex(z))
            err = abs(v - r)
            rep.rows.append({"function": f.label(), "alpha": c.params.alpha, "beta": c.params.beta,
                             "z": complex(z), "value": v, "reference": r, "abs_error": err})
            rep.check(err <= tol, f"{f.label()} at z={z}: error {err:.3g}")
    return rep


# --- I_{c,d} asymptotics --------------------------------------------------

RADIUS_LADDER = (0.0, 0.3, 0.6, 0.9, 0.93, 0.96, 0.99)


@_timed
def asymptotics(params: Params, c: float = 0.0, ds=None, ladder=RADIUS_LADDER,
                slack: float = 1e-9, spread: float = 3.0) -> Report:
    rep = Report("asymptotics")
    p = params.reduced()
    ds = ds if ds is not None else (p.alpha + 2, p.alpha, p.alpha - 1)
    g1 = g_at_one(p)
    for d in ds:
        cls = bd.classify_asymptotic(p.alpha, d)
        ratios = []
        for r in ladder:
            i_val = bd.icd_numeric(c, d, r, p)
            j_val = bd.jcd_closed(c, d, r, p)
            pred = cls.predicted(r) if r > 0 else None
            ratio = i_val / pred if pred else None
            if r >= 0.9:
                ratios.append(ratio)
            ok = j_val / g1 - slack <= i_val <= j_val + slack
            rep.rows.append({"alpha": p.alpha, "beta": p.beta, "c": c, "d": d, "class": str(cls),
                             "w": r, "I": i_val, "J": j_val, "J_over_G1": j_val / g1,
                             "predicted": pred, "ratio": ratio, "sandwich": ok})
            rep.check(ok, f"d={d} |w|={r}: sandwich violated")
            if r == 0:
                ref = beta_fn(c + 1, p.alpha + d + 3)
                rep.check(abs(j_val - ref) <= 1e-12 * ref, f"d={d}: J(0) differs from the Beta value")
        if ratios:
            var = max(ratios) / min(ratios)
            rep.check(var <= spread, f"d={d} ({cls}): ratio varies by {var:.3g} on |w| >= 0.9")
    return rep


# --- boundedness region -----------------------------------------------------

def probe_sample(setting: bd.LpSetting):
    """Functions used by the empirical probe: constants, a gap power and a Schur test function."""
    sample = [dq.one(), dq.g_n(1.0)]
    win = bd.schur_window(setting) if setting.p > 1 else None
    if win is not None:
        s, tau = win
        # keep h_{s,tau} inside L^p(mu_{a,b})
        s = min(s, 0.5 * (setting.b + 1) / setting.p)
        tau = min(tau, 0.5 * (setting.a + 1) / setting.p)
        sample.append(dq.h_family(s, tau))
    return sample


@_timed
def boundedness(count: int = 5000, seed: int = 0, fixed=None, radial_order: int = 80,
                angular_count: int = 1024, probe_order: int = 16) -> Report:
    rep = Report("boundedness")
    fixed = fixed if fixed is not None else [bd.LpSetting(0, 0, 0, 0, 2), bd.LpSetting(1, -0.5, 0.5, -0.6, 1),
                                             bd.LpSetting(1, -0.5, 1, -0.5, 1)]
    contexts = {}

    def probe(s):
        key = (s.alpha, s.beta)
        if key not in contexts:
            contexts[key] = bz.make_context(Params(s.alpha, s.beta), radial_order, angular_count)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QuadratureAccuracyWarning)
            return bd.empirical_bound_probe(s, contexts[key], probe_sample(s), radial_order=probe_order)

    for row in bd.sweep_rows(fixed, probe):
        row["source"] = "fixed"
        rep.rows.append(row)
    expected = [True, True, False]
    for row, want in zip(rep.rows, expected):
        rep.check(row["predicate"] == want, f"fixed setting {row}: predicate should be {want}")
    settings = bd.random_settings(count, seed)
    disagreements = 0
    for row in bd.sweep_rows(settings):
        row["source"] = f"sweep(seed={seed})"
        if row["schur"] is not None and row["schur"] != row["predicate"]:
            disagreements += 1
        rep.rows.append(row)
    rep.check(disagreements == 0, f"{disagreements} predicate/Schur disagreements in the sweep")
    return rep


# --- metric ---------------------------------------------------------------

DEFAULT_PAIRS = ((0.3 + 0.2j, 0.3 + 0.2j), (0.0, 0.3), (0.0, 0.6), (0.0, 0.9),
                 (0.5 + 0.3j, -0.6 + 0.2j), (-0.6 + 0.2j, 0.5 + 0.3j))


def radial_reference(params: Params, r: float) -> float:
    """Length of the ray ``[0, r]``; for ``beta = 0`` the closed form ``sqrt(alpha+2) atanh r``."""
    p = params.reduced()
    if p.beta == 0:
        return math.sqrt(p.alpha + 2) * math.atanh(r)
    return mt.path_length(p, mt.PathPolyline.chord(0.0, r))


@_timed
def metric(params: Params, pairs=DEFAULT_PAIRS, tol: float = 1e-6) -> Report:
    rep = Report("metric")
    p = params.reduced()
    seen = {}
    for z, w in pairs:
        z, w = complex(z), complex(w)
        res = mt.geodesic_distance(p, z, w)
        ref = None
        if z == 0 and w.imag == 0 and w.real > 0:
            ref = radial_reference(p, w.real)
        row = {"alpha": p.alpha, "beta": p.beta, "z": z, "w": w, "distance": res.distance,
               "segments": res.path.segments if res.path else 0, "converged": res.converged,
               "reference": ref}
        rep.rows.append(row)
        if z == w:
            rep.check(res.distance == 0, "distance from a point to itself is not 0")
        if ref is not None:
            rep.check(abs(res.distance / ref - 1) <= tol, f"radial pair {w}: {res.distance} vs {ref}")
        if (w, z) in seen:
            other = seen[(w, z)]
            rep.check(abs(other - res.distance) <= tol * max(1.0, res.distance),
                      f"asymmetric distance for {z}, {w}")
        seen[(z, w)] = res.distance
    return rep


# --- Lipschitz estimate ---------------------------------------------------

DEFAULT_LIP_PAIRS = ((0.0, 0.5), (0.3j, -0.4), (0.2 + 0.1j, 0.2 + 0.1j), (0.6, 0.6j))


@_timed
def lipschitz(params: Params, function: dq.TestFunction, pairs=DEFAULT_LIP_PAIRS,
              radial_order: int = 80, angular_count: int = 1024, tol: float = 1e-8) -> Report:
    rep = Report("lipschitz")
    ctx = bz.make_context(params, radial_order, angular_count)
    bmo = bz.bmo_norm(ctx, function)
    for z, w in pairs:
        r = mt.lipschitz_check(ctx, None, function, z, w, bmo=bmo)
        rep.rows.append({"function": function.label(), "alpha": ctx.params.alpha,
                         "beta": ctx.params.beta, "z": complex(z), "w": complex(w), "lhs": r.lhs,
                         "rhs": r.rhs, "margin": r.margin, "certificate": r.certificate,
                         "bmo": r.bmo, "distance": r.distance})
        rep.check(r.margin >= -tol, f"Lipschitz margin {r.margin:.3g} at ({z}, {w})")
        if complex(z) != complex(w):
            rep.check(r.certificate >= r.lhs - tol, f"pathwise certificate below lhs at ({z}, {w})")
    return rep
