"""The integrals I_{c,d} and J_{c,d}, their growth classes, and the L^p boundedness region."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .berezin import (ACCURACY_RADIUS, BerezinContext, berezin_adjoint_apply, berezin_apply,
                      ring_mean_square)
from .diskquad import RadialFactor, TestFunction, _factored_radial, gauss_jacobi
from .errors import DomainError, IntegrabilityError, QuadratureAccuracyWarning
from .kernel import Params, g_eval, kernel_coefficients
from .specialfn import beta_fn, hyp, log_beta

EQUALITY_TOL = 1e-12
ICD_RADIAL_ORDER = 200


@dataclass(frozen=True)
class LpSetting:
    """Transform parameters ``(alpha, beta)``, target weight ``(a, b)`` and exponent ``p``."""

    alpha: float
    beta: float
    a: float
    b: float
    p: float

    def __post_init__(self):
        for name in ("alpha", "a", "b"):
            if not getattr(self, name) > -1:
                raise DomainError(f"{name} must exceed -1")
        if not -1 < self.beta <= 0:
            raise DomainError("beta must lie in (-1, 0]")
        if not self.p >= 1:
            raise DomainError("p must be >= 1")

    @property
    def q(self) -> float:
        return math.inf if self.p == 1 else self.p / (self.p - 1)

    def as_row(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "a": self.a, "b": self.b, "p": self.p}


@dataclass(frozen=True)
class AsymptoticClass:
    """Growth of ``I_{c,d}(w)`` as ``|w| -> 1``: bounded, logarithmic or a power."""

    kind: str
    exponent: float = 0.0

    BOUNDED = "bounded"
    LOGARITHMIC = "logarithmic"
    POWER = "power"

    def predicted(self, w) -> float:
        """Model growth at ``w`` (1, ``log 1/(1-|w|^2)`` or ``(1-|w|^2)^-exponent``)."""
        gap = 1 - abs(w) ** 2
        if self.kind == self.BOUNDED:
            return 1.0
        if self.kind == self.LOGARITHMIC:
            return math.log(1 / gap)
        return gap ** (-self.exponent)

    def __str__(self):
        return f"power({self.exponent:g})" if self.kind == self.POWER else self.kind


def classify_asymptotic(alpha: float, d: float, tol: float = EQUALITY_TOL) -> AsymptoticClass:
    if abs(alpha - d) <= tol:
        return AsymptoticClass(AsymptoticClass.LOGARITHMIC)
    if alpha < d:
        return AsymptoticClass(AsymptoticClass.BOUNDED)
    return AsymptoticClass(AsymptoticClass.POWER, alpha - d)


def _check_cd(c, d, params):
    if not c > -1:
        raise IntegrabilityError(f"c must exceed -1, got {c}")
    if not params.alpha + d + 3 > 0:
        raise IntegrabilityError(f"d must exceed -alpha-3, got {d}")


def icd_numeric(c: float, d: float, w, params: Params, rule=None,
                radial_order: int | None = None) -> float:
    """``integral of |K(z conj w)|^2 / K(|z|^2) |z|^{2c} (1-|z|^2)^d dA(z)``.

    With ``1/K(t) = (1-t)^{alpha+2} / G(t)`` the radial weight is
    ``t^c (1-t)^{alpha+2+d}`` (Gauss-Jacobi) and the angular mean of
    ``|K|^2`` is summed exactly.  ``rule`` only supplies a default order.
    """
    params = params.reduced()
    _check_cd(c, d, params)
    w = complex(w)
    if abs(w) >= 1:
        raise DomainError("w must lie inside the unit disk")
    n = radial_order or (rule.radial_order if rule is not None else ICD_RADIAL_ORDER)
    t, wts = gauss_jacobi(params.alpha + 2 + d, c, n)
    rho = abs(w) * np.sqrt(t)
    ksq = ring_mean_square(kernel_coefficients(params, float(rho.max())), rho)
    return float(np.dot(wts, ksq / g_eval(params, t)))


def jcd_closed(c: float, d: float, w, params: Params) -> float:
    """``B(c+1, alpha+d+3) 4F3(1, A, A, c+1; beta+1, beta+1, alpha+c+d+4 | |w|^2)``, ``A = alpha+beta+2``."""
    params = params.reduced()
    _check_cd(c, d, params)
    x = abs(complex(w)) ** 2
    if x >= 1:
        raise DomainError("w must lie inside the unit disk")
    al, be = params.alpha, params.beta
    big = al + be + 2
    series = hyp([1, big, big, c + 1], [be + 1, be + 1, al + c + d + 4], x, tol=1e-16)
    return beta_fn(c + 1, al + d + 3) * series


def jcd_beta0_series(c: float, d: float, w, alpha: float, tol: float = 1e-16) -> float:
    """``sum_n ((alpha+2)_n / n!)^2 |w|^{2n} B(c+n+1, alpha+d+3)`` (the ``beta = 0`` case)."""
    x = abs(complex(w)) ** 2
    if x >= 1:
        raise DomainError("w must lie inside the unit disk")
    total, coef, n, small = 0.0, 1.0, 0, 0
    while True:
        term = coef ** 2 * x ** n * math.exp(log_beta(c + n + 1, alpha + d + 3)) if x or not n else 0.0
        total += term
        small = small + 1 if term < tol * total else 0
        if small >= 3 or (x == 0 and n > 0):
            return total
        coef *= (alpha + 2 + n) / (n + 1)
        n += 1


def bounded_predicate(setting: LpSetting) -> bool:
    """``p(alpha+1) > a+1`` and (``b <= beta`` if ``p = 1``, else ``b < p(beta+1) - 1``)."""
    s = setting
    first = s.p * (s.alpha + 1) > s.a + 1
    second = s.b <= s.beta if s.p == 1 else s.b < s.p * (s.beta + 1) - 1
    return bool(first and second)


def _open_overlap(lo1, hi1, lo2, hi2) -> bool:
    return max(lo1, lo2) < min(hi1, hi2)


def schur_intervals_nonempty(setting: LpSetting) -> bool:
    """Whether both Schur-test exponent windows for ``h_{s,tau}`` are non-empty.

    ``](b-beta)/p, (b+1)/p[ cap ]0, (beta+1)/q[`` for ``s`` and
    ``](a-alpha)/p, (a+alpha+3)/p[ cap ]-(alpha+2)/q, (alpha+1)/q[`` for ``tau``.
    """
    s = setting
    if not s.p > 1:
        raise DomainError("the Schur windows need p > 1")
    p, q = s.p, s.q
    first = _open_overlap((s.b - s.beta) / p, (s.b + 1) / p, 0.0, (s.beta + 1) / q)
    second = _open_overlap((s.a - s.alpha) / p, (s.a + s.alpha + 3) / p,
                           -(s.alpha + 2) / q, (s.alpha + 1) / q)
    return bool(first and second)


def schur_window(setting: LpSetting):
    """Midpoints ``(s, tau)`` of the two Schur windows, or ``None`` when one is empty."""
    if not schur_intervals_nonempty(setting):
        return None
    s, p, q = setting, setting.p, setting.q
    lo1, hi1 = max((s.b - s.beta) / p, 0.0), min((s.b + 1) / p, (s.beta + 1) / q)
    lo2 = max((s.a - s.alpha) / p, -(s.alpha + 2) / q)
    hi2 = min((s.a + s.alpha + 3) / p, (s.alpha + 1) / q)
    return (lo1 + hi1) / 2, (lo2 + hi2) / 2


def _lp_norm(values, weights, p):
    return float(np.dot(weights, np.abs(values) ** p)) ** (1 / p)


def empirical_bound_probe(setting: LpSetting, ctx: BerezinContext, sample: Sequence[TestFunction],
                          grid=None, radial_order: int = 16) -> float:
    """Largest ratio ``||Bf||_p / ||f||_p`` in ``L^p(mu_{a,b})`` over ``sample``.

    ``||f||_p`` folds the radial singular factor of ``f`` into the weight;
    ``||Bf||_p`` uses a Gauss-Jacobi rule for ``mu_{a,b}`` (radial
    functions) or, for non-radial ones, ``grid`` as ``(points, weights)``.
    Nodes beyond ``ACCURACY_RADIUS`` are dropped from ``||Bf||_p``; that only
    lowers the numerator, so the value stays a lower bound for the operator
    norm, never a certificate.
    """
    if (ctx.params.alpha, ctx.params.beta) != (setting.alpha, setting.beta):
        raise DomainError("context and setting disagree on (alpha, beta)")
    a, b, p = setting.a, setting.b, setting.p
    t, wts = _factored_radial(a, b, RadialFactor(), radial_order)
    r = np.sqrt(t)
    keep = r <= ACCURACY_RADIUS
    r, wts = r[keep], wts[keep]
    best = 0.0
    for f in sample:
        ft, fw = _factored_radial(a, b, RadialFactor(f.factor.t_power * p, f.factor.gap_power * p,
                                                    f.factor.log_power * p), radial_order)
        if f.radial:
            f_norm = _lp_norm(f.smooth(np.sqrt(ft).astype(complex)), np.abs(fw), p)
            bf = np.array([berezin_apply(ctx, f, ri) for ri in r])
            bf_norm = _lp_norm(bf, wts, p)
        else:
            if grid is None:
                raise DomainError("non-radial sample functions need an explicit grid")
            pts, gw = np.asarray(grid[0]), np.asarray(grid[1])
            f_norm = _lp_norm(f(pts), gw, p)
            inside = np.abs(pts) <= ACCURACY_RADIUS
            bf_norm = _lp_norm(np.array([berezin_apply(ctx, f, z) for z in pts[inside]]),
                               gw[inside], p)
        if f_norm > 0:
            best = max(best, bf_norm / f_norm)
    return best


@dataclass(frozen=True)
class GrowthFit:
    radii: tuple
    values: tuple
    log_slope: float

    @property
    def grows(self) -> bool:
        return self.values[-1] > self.values[0]


def adjoint_growth_probe(ctx: BerezinContext, g: TestFunction, a: float, b: float,
                         radii: Iterable[float] = (0.9, 0.99, 0.999),
                         radial_order: int = 200) -> GrowthFit:
    """Adjoint values on a radius ladder and the slope of ``log value`` against ``log log 1/(1-r^2)``.

    A slope near 1 reflects logarithmic growth, a bounded adjoint gives a
    slope near 0.
    """
    radii = tuple(radii)
    vals = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QuadratureAccuracyWarning)
        for r in radii:
            vals.append(berezin_adjoint_apply(ctx, g, r, a, b, radial_order).real)
    x = np.log(np.log(1 / (1 - np.asarray(radii) ** 2)))
    y = np.log(np.abs(vals))
    slope = float(np.polyfit(x, y, 1)[0]) if len(radii) > 1 else 0.0
    return GrowthFit(radii, tuple(vals), slope)


def random_settings(count: int, seed: int, p_range=(1.0, 5.0)):
    """Seeded uniform tuples over ``(-1,4] x (-1,0] x (-1,4] x (-1,4]`` and ``p`` in ``(p_lo, p_hi]``."""
    rng = np.random.default_rng(seed)

    def upper(lo, hi, size):
        # uniform on the half-open interval (lo, hi]
        return hi - (hi - lo) * rng.random(size)

    al = upper(-1, 4, count)
    be = upper(-1, 0, count)
    a = upper(-1, 4, count)
    b = upper(-1, 4, count)
    p = upper(p_range[0], p_range[1], count)
    return [LpSetting(*map(float, row)) for row in zip(al, be, a, b, p)]


def sweep_rows(settings: Iterable[LpSetting], probe=None) -> list[dict]:
    """CSV-ready rows ``alpha, beta, a, b, p, predicate, schur, probe_ratio``.

    ``probe`` maps a setting to a ratio or ``None``; the Schur column is
    ``None`` for ``p = 1`` where the windows are undefined.
    """
    rows = []
    for s in settings:
        row = s.as_row()
        row["predicate"] = bounded_predicate(s)
        row["schur"] = schur_intervals_nonempty(s) if s.p > 1 else None
        row["probe_ratio"] = probe(s) if probe is not None else None
        rows.append(row)
    return rows
