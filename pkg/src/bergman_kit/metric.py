"""Bergman-Poincare density, path lengths, geodesic distance and the Lipschitz estimate.

The density is ``rho(z)^2 = (log K)'(t) + t (log K)''(t)`` at ``t = |z|^2``.
Distances are upper bounds obtained by minimizing the length of polylines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize

from .berezin import BerezinContext, berezin_apply, bmo_norm, mean_oscillation
from .diskquad import QuadratureRule, TestFunction, build_rule
from .errors import BudgetExhausted, DomainError, QuadratureAccuracyWarning
from .kernel import (Params, _require_reduced, kernel_derivative_complex, kernel_derivatives,
                     kernel_eval, log_kernel_derivatives)
from .specialfn import hyp

RHO_SLACK = 1e-12


# --- density --------------------------------------------------------------

def rho_squared(params: Params, t):
    """``rho^2`` at ``t = |z|^2`` via the bounded factor G (stable up to the circle)."""
    _require_reduced(params, "rho")
    t = np.asarray(t, dtype=float)
    d1, d2 = log_kernel_derivatives(params, t)
    return d1 + t * d2


def rho_squared_series(params: Params, t):
    """``K'/K + t K''/K - t (K'/K)^2`` from the termwise differentiated kernel series."""
    k0, k1, k2 = kernel_derivatives(params, t)
    ratio = np.asarray(k1) / k0
    return ratio + np.asarray(t) * (np.asarray(k2) / k0 - ratio ** 2)


def rho(params: Params, z):
    """Density at ``z`` (scalar or array); tiny negative round-off is clamped."""
    z = np.asarray(z)
    if np.any(np.abs(z) >= 1):
        raise DomainError("rho needs |z| < 1")
    sq = rho_squared(params, np.abs(z) ** 2)
    if np.any(sq < -RHO_SLACK * np.maximum(1.0, np.abs(sq))):
        raise ArithmeticError("rho^2 is significantly negative")
    out = np.sqrt(np.maximum(sq, 0.0))
    return out if out.ndim else float(out)


class RhoTable:
    """Cubic spline of ``log rho`` against ``u = -log(1 - t)``, ``t = |z|^2``.

    Used only inside the optimizer objective; reported lengths use the exact
    density.  Beyond the table ``log rho`` is continued linearly, matching the
    ``(1-t)^-1`` growth of the density.
    """

    def __init__(self, params: Params, u_max: float = 10.0, count: int = 600):
        u = np.linspace(0.0, u_max, count)
        t = -np.expm1(-u)
        t[-1] = min(t[-1], 1 - 1e-15)
        self.u_max = u_max
        self.spline = CubicSpline(u, np.log(rho(params, np.sqrt(t))))
        self.deriv = self.spline.derivative()
        self.edge = (float(self.spline(u_max)), float(self.deriv(u_max)))

    def value_and_grad(self, z):
        """``rho(z)`` and its gradient as a complex number ``d/dx + i d/dy``."""
        t = np.abs(z) ** 2
        u = -np.log1p(-np.minimum(t, 1 - 1e-300))
        inside = u <= self.u_max
        s = np.where(inside, self.spline(np.minimum(u, self.u_max)),
                     self.edge[0] + self.edge[1] * (u - self.u_max))
        ds = np.where(inside, self.deriv(np.minimum(u, self.u_max)), self.edge[1])
        val = np.exp(s)
        # d rho / dt = rho * s'(u) / (1 - t); grad_z of f(|z|^2) = 2 f'(t) z
        grad = 2 * val * ds / (1 - t) * z
        return val, grad


@lru_cache(maxsize=32)
def rho_table(params: Params) -> RhoTable:
    return RhoTable(params)


# --- paths ----------------------------------------------------------------

@dataclass(frozen=True)
class PathPolyline:
    """Piecewise-linear curve through ``points`` (all inside the disk, consecutive distinct)."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size < 2:
            raise DomainError("a path needs at least two points")
        if np.any(np.abs(pts) >= 1):
            raise DomainError("path points must lie inside the unit disk")
        if np.any(pts[1:] == pts[:-1]):
            raise DomainError("consecutive path points must differ")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def chord(cls, z, w, segments: int = 1) -> "PathPolyline":
        s = np.linspace(0.0, 1.0, segments + 1)
        return cls(complex(z) + s * (complex(w) - complex(z)))

    @property
    def segments(self) -> int:
        return len(self.points) - 1

    def reversed(self) -> "PathPolyline":
        return PathPolyline(self.points[::-1].copy())

    def refined(self) -> "PathPolyline":
        """Insert the midpoint of every segment."""
        p = self.points
        out = np.empty(2 * len(p) - 1, dtype=complex)
        out[0::2] = p
        out[1::2] = (p[:-1] + p[1:]) / 2
        return PathPolyline(out)

    def at(self, s):
        """Point and velocity at parameter ``s`` in [0, 1], each segment taking equal time."""
        n = self.segments
        k = min(int(s * n), n - 1)
        local = s * n - k
        d = self.points[k + 1] - self.points[k]
        return self.points[k] + local * d, n * d

    def to_rows(self) -> list[dict]:
        return [{"index": i, "re": float(p.real), "im": float(p.imag)}
                for i, p in enumerate(self.points)]


_GL_CACHE: dict = {}


def _gauss_legendre01(n):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = ((x + 1) / 2, w / 2)
    return _GL_CACHE[n]


def _gl_pieces(params, a, b, order):
    s, w = _gauss_legendre01(order)
    d = b - a
    vals = rho(params, a[:, None] + s[None, :] * d[:, None])
    return np.abs(d) * (vals @ w)


def path_length(params: Params, path: PathPolyline, samples_per_segment: int = 16,
                tol: float = 1e-14, max_depth: int = 30) -> float:
    """``sum over segments of integral rho(gamma) |gamma'|`` with adaptive Gauss-Legendre.

    ``samples_per_segment`` is the Gauss-Legendre order; a piece is bisected
    until its one-level and two-level estimates agree to ``tol`` (relative).
    """
    if samples_per_segment < 1:
        raise DomainError("samples_per_segment must be positive")
    a, b = path.points[:-1], path.points[1:]
    total = 0.0
    for _ in range(max_depth):
        mid = (a + b) / 2
        whole = _gl_pieces(params, a, b, samples_per_segment)
        left = _gl_pieces(params, a, mid, samples_per_segment)
        right = _gl_pieces(params, mid, b, samples_per_segment)
        halves = left + right
        done = np.abs(whole - halves) <= tol * halves
        total += float(halves[done].sum())
        if done.all():
            return total
        a, b = np.concatenate((a[~done], mid[~done])), np.concatenate((mid[~done], b[~done]))
    return total + float(halves[~done].sum())


# --- geodesics ------------------------------------------------------------

class _GraphObjective:
    """Approximate polyline length (spline density) and its gradient.

    Vertex ``k`` sits at ``c_k + i e y_k`` where ``c_k`` divides the chord
    ``[z, w]`` evenly and ``e`` is the chord direction, so each vertex moves
    only across the chord.  This removes the near-flat directions in which
    vertices slide along the path.
    """

    def __init__(self, table: RhoTable, z, w, segments: int, order: int = 6):
        self.table = table
        self.z, self.w = complex(z), complex(w)
        frac = np.arange(1, segments) / segments
        self.base = self.z + frac * (self.w - self.z)
        self.normal = 1j * (self.w - self.z) / abs(self.w - self.z)
        self.s, self.wq = _gauss_legendre01(order)

    def bounds(self, margin: float = 1e-9):
        # |c + i e y| < 1  <=>  y^2 + 2 y Re(conj(n) c) + |c|^2 - 1 < 0
        half = np.real(np.conj(self.normal) * self.base)
        disc = np.sqrt(half ** 2 - (np.abs(self.base) ** 2 - 1))
        lo = -half - disc * (1 - margin)
        hi = -half + disc * (1 - margin)
        return list(zip(lo, hi))

    def offsets(self, path: "PathPolyline"):
        return np.real(np.conj(self.normal) * (path.points[1:-1] - self.base))

    def vertices(self, y):
        return np.concatenate(([self.z], self.base + self.normal * y, [self.w]))

    def __call__(self, y):
        v = self.vertices(y)
        d = np.diff(v)
        mod = np.abs(d)
        s, wq = self.s, self.wq
        pts = v[:-1, None] + s[None, :] * d[:, None]
        val, grad = self.table.value_and_grad(pts)
        seg = val @ wq
        total = float(mod @ seg)
        unit = d / mod
        g_left = -unit * seg + mod * ((grad * (1 - s)[None, :]) @ wq)
        g_right = unit * seg + mod * ((grad * s[None, :]) @ wq)
        gv = g_left[1:] + g_right[:-1]
        return total, np.real(np.conj(gv) * self.normal)


@dataclass(frozen=True)
class GeodesicResult:
    distance: float
    path: PathPolyline | None
    converged: bool
    iterations: int
    history: tuple = ()


def _resample(path: PathPolyline, obj: _GraphObjective) -> np.ndarray:
    """Offsets of ``path`` interpolated at the chord fractions of ``obj``."""
    e = obj.normal / 1j
    along = np.real(np.conj(e) * (path.points - obj.z))
    across = np.real(np.conj(obj.normal) * (path.points - obj.z))
    target = np.real(np.conj(e) * (obj.base - obj.z))
    return np.interp(target, along, across)


def geodesic_distance(params: Params, z, w, budget: int = 20000, rel_tol: float = 1e-8,
                      start_segments: int = 8, max_segments: int = 1024,
                      strict: bool = False) -> GeodesicResult:
    """Upper bound for the distance: the shortest polyline found by descent.

    Polylines are graphs over the chord ``[z, w]``; the transverse vertex
    offsets are optimized with L-BFGS-B, the segment count is doubled after
    each solve, and the loop stops once the exact length improves by less
    than ``rel_tol`` (relative).  Hitting ``budget`` optimizer iterations or
    ``max_segments`` first leaves ``converged`` false; with ``strict=True``
    that raises :class:`BudgetExhausted` carrying the result.
    """
    params = params.reduced()
    z, w = complex(z), complex(w)
    if abs(z) >= 1 or abs(w) >= 1:
        raise DomainError("endpoints must lie inside the unit disk")
    if z == w:
        return GeodesicResult(0.0, None, True, 0)
    table = rho_table(params)
    segments = start_segments
    path = PathPolyline.chord(z, w, segments)
    best = path_length(params, path)
    history = [best]
    used = 0
    converged = False
    while True:
        obj = _GraphObjective(table, z, w, segments)
        res = minimize(obj, _resample(path, obj), jac=True, method="L-BFGS-B",
                       bounds=obj.bounds(),
                       options={"maxiter": max(1, budget - used), "gtol": 1e-12, "ftol": 1e-16})
        used += int(res.nit)
        candidate = PathPolyline(obj.vertices(res.x))
        length = path_length(params, candidate)
        improvement = max(0.0, (best - length) / best)
        if length < best:
            best, path = length, candidate
        history.append(best)
        if len(history) > 2 and improvement < rel_tol:
            converged = True
            break
        if used >= budget or 2 * segments > max_segments:
            break
        segments *= 2
    result = GeodesicResult(best, path, converged, used, tuple(history))
    if strict and not converged:
        raise BudgetExhausted("geodesic descent stopped before reaching rel_tol", result)
    return result


# --- coherent states and the projection identity --------------------------

@dataclass(frozen=True)
class CoherentState:
    """Normalized kernel section ``K(z conj(center)) / sqrt(K(|center|^2))``."""

    center: complex
    params: Params

    def __post_init__(self):
        if abs(complex(self.center)) >= 1:
            raise DomainError("center must lie inside the unit disk")
        _require_reduced(self.params, "CoherentState")


def coherent_state_eval(state: CoherentState, z):
    xi = complex(state.center)
    return kernel_eval(state.params, np.asarray(z) * np.conj(xi)) / math.sqrt(
        float(kernel_eval(state.params, abs(xi) ** 2)))


def _grid(rule: QuadratureRule):
    r = np.sqrt(rule.radial_nodes)
    pts = r[:, None] * np.exp(1j * rule.angles)[None, :]
    wts = np.repeat(rule.radial_weights, rule.angular_count).reshape(pts.shape) / rule.angular_count
    return pts, wts


def l2_norm_sq(values, rule: QuadratureRule) -> float:
    _, wts = _grid(rule)
    return float(np.sum(wts * np.abs(values) ** 2))


def coherent_inner(state: CoherentState, f: TestFunction, rule: QuadratureRule) -> complex:
    """``<f, phi_xi>`` in ``L^2(mu)`` by quadrature."""
    pts, wts = _grid(rule)
    return complex(np.sum(wts * f(pts) * np.conj(coherent_state_eval(state, pts))))


def projection_apply(state: CoherentState, f: TestFunction, z, rule: QuadratureRule):
    """Rank-one projection ``phi_xi(z) <f, phi_xi>``."""
    return coherent_state_eval(state, z) * coherent_inner(state, f, rule)


def a_norm_closed(params: Params, gamma, velocity) -> float:
    """Closed-form squared metric speed of ``velocity`` at ``gamma``.

    ``|v|^2 / K(x) (A/(beta+1)) 3F2(2, 2, A+1; 1, beta+2 | x)`` with
    ``x = |gamma|^2`` and ``A = alpha+beta+2``.
    """
    x = abs(complex(gamma)) ** 2
    big = params.alpha + params.beta + 2
    series = hyp([2, 2, big + 1], [1, params.beta + 2], x, tol=1e-16)
    return abs(velocity) ** 2 / float(kernel_eval(params, x)) * big / (params.beta + 1) * series


@dataclass(frozen=True)
class ProjectionCheck:
    lhs: float
    rhs: float
    a_norm_sq: float
    d_norm_sq: float
    a_norm_sq_closed: float
    residual_direct: float


def projection_norm_identity_check(params: Params, gamma_point, gamma_velocity,
                                   rule: QuadratureRule | None = None) -> ProjectionCheck:
    """Both sides of ``||(I - P_gamma) d/dt phi_gamma|| = |gamma'| rho(gamma)``.

    ``A(z) = K'(z conj g) z conj(g') / sqrt(K)``, ``D(z) = K(z conj g) K'(|g|^2) g conj(g') / K^{3/2}``;
    the left side is ``sqrt(||A||^2 - ||D||^2)`` with both norms from the disk
    rule.  ``residual_direct`` is ``||A - D||`` integrated directly.
    """
    params = params.reduced()
    g, v = complex(gamma_point), complex(gamma_velocity)
    if v == 0:
        raise DomainError("gamma_velocity must be non-zero")
    if abs(g) >= 1:
        raise DomainError("gamma_point must lie inside the unit disk")
    if abs(g) > 0.95:
        warnings.warn("projection identity quadrature degrades for |gamma| > 0.95",
                      QuadratureAccuracyWarning, stacklevel=2)
    rule = rule or build_rule(params)
    pts, _ = _grid(rule)
    x = abs(g) ** 2
    k, k1, _ = kernel_derivatives(params, x)
    xi = pts * np.conj(g)
    a_vals = kernel_derivative_complex(params, xi) * pts * np.conj(v) / math.sqrt(k)
    d_vals = kernel_eval(params, xi) * k1 * g * np.conj(v) / k ** 1.5
    a2 = l2_norm_sq(a_vals, rule)
    d2 = l2_norm_sq(d_vals, rule)
    lhs = math.sqrt(max(a2 - d2, 0.0))
    rhs = abs(v) * rho(params, g)
    return ProjectionCheck(lhs, rhs, a2, d2, a_norm_closed(params, g, v),
                           math.sqrt(l2_norm_sq(a_vals - d_vals, rule)))


# --- Lipschitz estimate ---------------------------------------------------

@dataclass(frozen=True)
class LipschitzReport:
    lhs: float
    rhs: float
    margin: float
    bmo: float
    distance: float
    certificate: float
    path: PathPolyline | None


def pathwise_certificate(ctx: BerezinContext, f: TestFunction, path: PathPolyline,
                         order: int = 4, max_segments: int = 16) -> float:
    """``integral over the path of 2 MO(f) rho |gamma'|`` (Gauss-Legendre per segment).

    Long optimized paths are first coarsened to at most ``max_segments`` segments by
    keeping every k-th vertex; the bound holds for whichever path is integrated.
    """
    pts = path.points
    step = max(1, math.ceil((len(pts) - 1) / max_segments))
    keep = np.unique(np.r_[np.arange(0, len(pts), step), len(pts) - 1])
    pts = pts[keep]
    s, wq = _gauss_legendre01(order)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        nodes = a + s * d
        mo = np.array([mean_oscillation(ctx, f, q) for q in nodes])
        total += abs(d) * float(np.dot(wq, 2 * mo * rho(ctx.params, nodes)))
    return total


def lipschitz_check(ctx: BerezinContext, params: Params | None, f: TestFunction, z, w,
                    bmo: float | None = None, geodesic: GeodesicResult | None = None) -> LipschitzReport:
    """``|Bf(z) - Bf(w)|`` against ``2 ||f||_BMO d(z, w)``, plus the pathwise certificate.

    ``bmo`` defaults to the grid lower bound :func:`bmo_norm`; pass a cached
    value when checking many pairs for one ``f``.
    """
    params = ctx.params if params is None else params.reduced()
    if params != ctx.params:
        raise DomainError("params and context disagree")
    z, w = complex(z), complex(w)
    lhs = abs(berezin_apply(ctx, f, z) - berezin_apply(ctx, f, w))
    if z == w:
        return LipschitzReport(lhs, 0.0, 0.0 - lhs + 0.0, 0.0, 0.0, 0.0, None)
    bmo = bmo_norm(ctx, f) if bmo is None else bmo
    geo = geodesic or geodesic_distance(params, z, w)
    rhs = 2 * bmo * geo.distance
    cert = pathwise_certificate(ctx, f, geo.path) if bmo > 0 else 0.0
    return LipschitzReport(lhs, rhs, rhs - lhs, bmo, geo.distance, cert, geo.path)


@dataclass(frozen=True)
class DerivativeSample:
    s: float
    lhs: float
    rhs: float


def _bf(ctx, f, z):
    return berezin_apply(ctx, f, z)


def derivative_bound_check(ctx: BerezinContext, params: Params | None, f: TestFunction,
                           path: PathPolyline, per_segment: int = 3,
                           h: float = 1e-4) -> list[DerivativeSample]:
    """Samples ``(s, |d/ds Bf(gamma(s))|, 2 MO(f)(gamma(s)) |gamma'(s)| rho(gamma(s)))``.

    Samples sit strictly inside segments.  The derivative is a central
    difference with step ``h``; when halving the step changes it by more than
    ``1e-6`` (relative) the Richardson combination is used instead.
    """
    params = ctx.params if params is None else params.reduced()
    n = path.segments
    out = []
    for k in range(n):
        for j in range(per_segment):
            local = (j + 1) / (per_segment + 1)
            s = (k + local) / n
            z, vel = path.at(s)
            step = min(h, 0.5 * min(local, 1 - local) / n)

            def central(hh):
                za, _ = path.at(s - hh)
                zb, _ = path.at(s + hh)
                return (_bf(ctx, f, zb) - _bf(ctx, f, za)) / (2 * hh)

            d1 = central(step)
            d2 = central(step / 2)
            deriv = d2 if abs(d1 - d2) <= 1e-6 * (1 + abs(d2)) else (4 * d2 - d1) / 3
            rhs = 2 * mean_oscillation(ctx, f, z) * abs(vel) * rho(params, z)
            out.append(DerivativeSample(float(s), float(abs(deriv)), float(rhs)))
    return out
