"""Berezin transform, its adjoint, mean oscillation and the BMO seminorm.

Everything is evaluated with a rotated product rule: for a target point
``z = |z| e^{i theta}`` the angular nodes are placed at ``theta + phi_j`` so
that ``z * conj(w)`` lands on the rings ``|z| r_i e^{-i phi_j}``.  Kernel values
on a ring are then one FFT of the (folded) power-series coefficients.
"""

from __future__ import annotations

import math
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .diskquad import (DEFAULT_ANGULAR_COUNT, DEFAULT_RADIAL_ORDER, QuadratureRule,
                       RadialFactor, TestFunction, _factored_radial, build_rule)
from .errors import DomainError, QuadratureAccuracyWarning, SingularArgument
from .kernel import Params, g_eval, kernel_coefficients, kernel_eval
from .specialfn import log_beta, polyval

ACCURACY_RADIUS = 0.99
VARIANCE_SLACK = 1e-12


@dataclass(frozen=True)
class BerezinContext:
    """Reduced parameters, the disk rule built for them and a tolerance.

    The transform for ``beta > 0`` coincides with the one for ``beta0``, so
    the context always stores reduced parameters.  ``_cache`` keeps the kernel
    grids of the most recent evaluation points; it never changes results.
    """

    params: Params
    rule: QuadratureRule
    tolerance: float = 1e-10
    _cache: OrderedDict = field(default_factory=OrderedDict, compare=False, repr=False)

    def __post_init__(self):
        if self.params.s != 0:
            raise DomainError("BerezinContext needs reduced parameters")
        if self.rule.params != self.params:
            raise DomainError("quadrature rule was built for different parameters")
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")


def make_context(params: Params, radial_order: int = DEFAULT_RADIAL_ORDER,
                 angular_count: int = DEFAULT_ANGULAR_COUNT,
                 tolerance: float = 1e-10) -> BerezinContext:
    p = params.reduced()
    return BerezinContext(p, build_rule(p, radial_order, angular_count), tolerance)


def ring_values(coeffs: np.ndarray, rho: np.ndarray, count: int) -> np.ndarray:
    """``sum_n c_n (rho_i e^{-2 pi i j / count})^n`` for every ring ``i`` and node ``j``.

    Terms with equal ``n mod count`` share the angular factor, so the
    coefficients are folded before a length-``count`` FFT.
    """
    rho = np.asarray(rho, dtype=float)
    n_coef = len(coeffs)
    length = count * max(1, math.ceil(n_coef / count))
    padded = np.zeros(length)
    padded[:n_coef] = coeffs
    n = np.arange(length)
    with np.errstate(divide="ignore", under="ignore"):
        powers = np.where(rho[:, None] > 0, np.exp(n * np.log(np.where(rho > 0, rho, 1))[:, None]),
                          (n == 0).astype(float))
    folded = (padded * powers).reshape(len(rho), -1, count).sum(axis=1)
    return np.fft.fft(folded, axis=1)


def ring_mean_square(coeffs: np.ndarray, rho) -> np.ndarray:
    """Exact angular mean of ``|sum c_n (rho e^{i phi})^n|^2`` (Parseval)."""
    rho = np.asarray(rho, dtype=float)
    return polyval(np.asarray(coeffs) ** 2, rho ** 2)


def _check_point(z) -> complex:
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError(f"evaluation point {z} is not inside the unit disk")
    if abs(z) > ACCURACY_RADIUS:
        warnings.warn(f"|z| = {abs(z):.6g} > {ACCURACY_RADIUS}: the fixed rule loses accuracy",
                      QuadratureAccuracyWarning, stacklevel=3)
    return z


def _kernel_grid(ctx: BerezinContext, z: complex, factor: RadialFactor, radial: bool):
    """Nodes, weights and ``|K(z conj(w))|^2`` (ring matrix or angular mean)."""
    key = (z, factor, radial)
    hit = ctx._cache.get(key)
    if hit is not None:
        ctx._cache.move_to_end(key)
        return hit
    t, wts = ctx.rule.radial(factor)
    r = np.sqrt(t)
    rho = abs(z) * r
    coeffs = kernel_coefficients(ctx.params, float(rho.max()))
    if radial:
        ksq = ring_mean_square(coeffs, rho)
        pts = r.astype(complex)
    else:
        m = ctx.rule.angular_count
        ksq = np.abs(ring_values(coeffs, rho, m)) ** 2
        theta = math.atan2(z.imag, z.real)
        pts = r[:, None] * np.exp(1j * (theta + ctx.rule.angles))[None, :]
    out = (wts, pts, ksq, float(kernel_eval(ctx.params, abs(z) ** 2)))
    ctx._cache[key] = out
    if len(ctx._cache) > 64:
        ctx._cache.popitem(last=False)
    return out


def _apply(ctx, f: TestFunction, z: complex):
    wts, pts, ksq, norm = _kernel_grid(ctx, z, f.factor, f.radial)
    vals = f.smooth(pts)
    if f.radial:
        return np.dot(wts, ksq * vals) / norm
    return np.dot(wts, (ksq * vals).mean(axis=1)) / norm


def berezin_apply(ctx: BerezinContext, f: TestFunction, z) -> complex:
    """``integral of f(w) |K(z conj(w))|^2 / K(|z|^2) dmu(w)``.

    Complex-valued ``f`` is handled linearly.  Points with ``|z| > 0.99``
    are evaluated but flagged with :class:`QuadratureAccuracyWarning`.
    """
    z = _check_point(z)
    return complex(_apply(ctx, f, z))


def berezin_monomial_series(params: Params, j: int, k: int, z, tol: float = 1e-17) -> complex:
    """Transform of ``w^j conj(w)^k`` from the kernel and moment series.

    ``sum_n a_n a_{n+k-j} m_{n+k} z^n conj(z)^{n+k-j} / K(|z|^2)`` with
    ``a_n`` the kernel coefficients and ``m_p`` the diagonal moments.
    """
    p = params.reduced()
    z = complex(z)
    x = abs(z) ** 2
    a = kernel_coefficients(p, max(x, 1e-3), tol)
    shift = k - j
    n_max = len(a) - max(shift, 0) - 1
    n = np.arange(max(0, -shift), n_max + 1)
    if n.size == 0:
        return 0j
    mom = np.ones(n.max() + k + 2)
    for q in range(1, len(mom)):
        mom[q] = mom[q - 1] * (p.beta + q) / (p.alpha + p.beta + 1 + q)
    terms = a[n] * a[n + shift] * mom[n + k] * z ** n * np.conj(z) ** (n + shift)
    return complex(terms.sum() / kernel_eval(p, x))


def berezin_adjoint_apply(ctx: BerezinContext, g: TestFunction, w, a: float, b: float,
                          radial_order: int | None = None) -> complex:
    """Adjoint of the transform on ``L^2(mu_{a,b})``.

    ``B(a+1,b+1)/B(alpha+1,beta+1) |w|^{2(beta-b)} (1-|w|^2)^{alpha-a}
    * integral of g(z) |K(z conj(w))|^2 / K(|z|^2) dmu_{a,b}(z)``; the factor
    ``(1-|z|^2)^{alpha+2}`` of ``1/K`` is folded into the radial weight.
    """
    p = ctx.params
    alpha, beta = p.alpha, p.beta
    if not (a > -1 and b > -1):
        raise DomainError("weight parameters a, b must exceed -1")
    w = _check_point(w)
    if w == 0 and beta < b:
        raise SingularArgument("adjoint is unbounded at w = 0 when beta < b")
    n = radial_order or ctx.rule.radial_order
    factor = g.factor * RadialFactor(gap_power=alpha + 2)
    t, wts = _factored_radial(a, b, factor, n)
    r = np.sqrt(t)
    inv_g = 1.0 / g_eval(p, t)
    rho = abs(w) * r
    coeffs = kernel_coefficients(p, float(rho.max()))
    if g.radial:
        ksq = ring_mean_square(coeffs, rho)
        integral = np.dot(wts, ksq * inv_g * g.smooth(r.astype(complex)))
    else:
        m = ctx.rule.angular_count
        ksq = np.abs(ring_values(coeffs, rho, m)) ** 2
        theta = math.atan2(w.imag, w.real)
        pts = r[:, None] * np.exp(1j * (theta - ctx.rule.angles))[None, :]
        integral = np.dot(wts, inv_g * (ksq * g.smooth(pts)).mean(axis=1))
    if w == 0 and beta > b:
        return 0j
    x = abs(w) ** 2
    scale = math.exp(log_beta(a + 1, b + 1) - log_beta(alpha + 1, beta + 1))
    power = 1.0 if beta == b else x ** (beta - b)
    return complex(scale * power * (1 - x) ** (alpha - a) * integral)


def mean_oscillation(ctx: BerezinContext, f: TestFunction, z) -> float:
    """``sqrt(B(|f|^2)(z) - |Bf(z)|^2)``.

    Variances within ``VARIANCE_SLACK`` of ``B(|f|^2)`` are round-off and
    give 0; the square root would otherwise turn ``1e-16`` into ``1e-8``.
    """
    z = _check_point(z)
    second = _apply(ctx, f.abs_sq(), z).real
    first = abs(_apply(ctx, f, z))
    var = second - first ** 2
    slack = VARIANCE_SLACK * max(1.0, second)
    if var <= slack:
        if var < -slack:
            warnings.warn(f"negative variance {var:.3g} at z = {z}", QuadratureAccuracyWarning,
                          stacklevel=2)
        return 0.0
    return math.sqrt(var)


def mo_double_integral(params: Params, f: TestFunction, z, radial_order: int = 30,
                       angular_count: int = 64) -> float:
    """Mean oscillation from the symmetric double integral over a tensor rule.

    ``MO^2 = 1/(2 K^2) * double integral of |f(u)-f(v)|^2 |K(z conj u)|^2 |K(z conj v)|^2``,
    with kernel values taken pointwise (no FFT, no angular shift).
    """
    p = params.reduced()
    rule = build_rule(p, radial_order, angular_count)
    t, wts = rule.radial()
    r = np.sqrt(t)
    pts = (r[:, None] * np.exp(1j * rule.angles)[None, :]).ravel()
    wq = np.repeat(wts, angular_count) / angular_count
    z = complex(z)
    kw = np.abs(kernel_eval(p, z * np.conj(pts))) ** 2 * wq
    fv = f(pts)
    diff = np.abs(fv[:, None] - fv[None, :]) ** 2
    total = kw @ diff @ kw
    norm = float(kernel_eval(p, abs(z) ** 2))
    return math.sqrt(max(0.0, total / (2 * norm ** 2)))


def default_bmo_grid(radii=None, angles: int = 32) -> np.ndarray:
    """Polar grid ``r in {0.05, ..., 0.95}`` times ``angles`` equispaced directions."""
    if radii is None:
        radii = np.round(np.arange(1, 20) * 0.05, 12)
    phi = 2 * np.pi * np.arange(angles) / angles
    return (np.asarray(radii)[:, None] * np.exp(1j * phi)[None, :]).ravel()


def bmo_norm(ctx: BerezinContext, f: TestFunction, grid=None) -> float:
    """Largest mean oscillation over ``grid``; a lower bound for the supremum."""
    grid = default_bmo_grid() if grid is None else np.asarray(grid)
    if grid.size == 0:
        raise DomainError("grid must be non-empty")
    if f.radial:
        # mean oscillation of a radial function depends on |z| only
        grid = np.unique(np.abs(grid)).astype(complex)
    return max(mean_oscillation(ctx, f, z) for z in grid)


def boundary_limit_check(ctx: BerezinContext, f: TestFunction, xi, radii) -> list[float]:
    """``|Bf(r xi) - f(xi)|`` for each ``r`` in ``radii``."""
    xi = complex(xi)
    if not math.isclose(abs(xi), 1.0, rel_tol=0, abs_tol=1e-12):
        raise DomainError("xi must lie on the unit circle")
    target = complex(np.asarray(f(np.array([xi])))[0])
    return [abs(berezin_apply(ctx, f, r * xi) - target) for r in radii]
