"""The G-function and the reproducing kernel of the modified Bergman space.

For ``beta`` in (-1, 0] the kernel factors as ``K(xi) = G(xi) / (1 - xi)**(alpha + 2)``
with ``G`` bounded on the closed disk; for larger ``beta`` it picks up the
prefactor ``C * xi**(-s)`` where ``beta = beta0 + s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NonConvergent, SingularArgument
from .specialfn import (DEFAULT_MAX_TERMS, beta_fn, pochhammer, polyval,
                        series_coefficients)

SERIES_TOL = 1e-17
# arguments this close to the circle are summed as boundary values
CIRCLE_TOL = 1e-12


def reduce(beta: float) -> tuple[float, int]:
    """Split ``beta = beta0 + s`` with ``s`` the least natural number >= beta."""
    if not beta > -1:
        raise DomainError(f"beta must exceed -1, got {beta}")
    s = max(0, math.ceil(beta))
    if not beta - s > -1:
        raise DomainError(f"beta = {beta} is too close to 0 for a representable reduction")
    return beta - s, s


@dataclass(frozen=True)
class Params:
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")
        if not self.beta > -1:
            raise DomainError(f"beta must exceed -1, got {self.beta}")

    @property
    def beta0(self) -> float:
        return reduce(self.beta)[0]

    @property
    def s(self) -> int:
        return reduce(self.beta)[1]

    def reduced(self) -> "Params":
        return self if self.s == 0 else Params(self.alpha, self.beta0)

    @property
    def mass(self) -> float:
        """Normalizing constant B(alpha+1, beta+1) of the probability measure."""
        return beta_fn(self.alpha + 1, self.beta + 1)


def _require_reduced(params: Params, what: str) -> None:
    if params.s != 0:
        raise DomainError(f"{what} needs beta in (-1, 0]; reduce {params} first")


# --- G-function -----------------------------------------------------------

@dataclass(frozen=True)
class GSeries:
    """Coefficients ``c_n = beta/(n+beta) * (-alpha-1)_n / n!`` of G."""

    params: Params

    def coefficient(self, n: int) -> float:
        for k, c in enumerate(self):
            if k == n:
                return c

    def coefficients(self, x_max: float, tol: float = SERIES_TOL,
                     max_terms: int = DEFAULT_MAX_TERMS) -> np.ndarray:
        return _g_coeffs(self.params.alpha, self.params.beta, float(x_max), tol, max_terms)

    def __iter__(self):
        a, b = self.params.alpha, self.params.beta
        yield 1.0
        # p_n = (-alpha-1)_n / n!
        p, n = 1.0, 0
        while True:
            p *= (n - a - 1) / (n + 1)
            n += 1
            yield 0.0 if b == 0 else b / (n + b) * p


@lru_cache(maxsize=256)
def _g_coeffs(alpha, beta, x_max, tol, max_terms):
    if beta == 0:
        return np.array([1.0])

    def ratio(n):
        return (n + beta) / (n + 1 + beta) * (n - alpha - 1) / (n + 1)

    c = series_coefficients(1.0, ratio, x_max, tol, max_terms)
    c.setflags(write=False)
    return c


def g_at_one(params: Params) -> float:
    """Closed form ``G(1) = (alpha + 1) B(alpha + 1, beta + 1)``."""
    return (params.alpha + 1) * beta_fn(params.alpha + 1, params.beta + 1)


NEAR_ONE = 0.5
# the expansion about 1 carries G(1) t^-beta; keep that factor moderate
NEAR_ONE_MAX_GROWTH = 5.0


def _use_near_one(params: Params, t):
    with np.errstate(divide="ignore"):
        growth = params.beta * -np.log(np.where(t > 0, t, 1.0))
    return (t > NEAR_ONE) & (growth <= NEAR_ONE_MAX_GROWTH)


def g_eval(params: Params, xi, tol: float = SERIES_TOL):
    """Evaluate G at ``xi`` (scalar or array) with ``|xi| <= 1``.

    Real arguments above 1/2 go through the expansion about ``t = 1``
    (see :func:`g_near_one`); everything else sums the defining series.
    On the circle only ``xi = 1`` (closed form) and, for ``alpha > 0``, the
    absolutely summable series are accepted.
    """
    xi_arr = np.asarray(xi)
    r = np.abs(xi_arr)
    if np.any(r > 1):
        raise DomainError("g_eval needs |xi| <= 1")
    if params.beta == 0:
        out = np.ones(xi_arr.shape, dtype=np.result_type(xi_arr, float))
        return out if out.ndim else out[()]
    if not np.iscomplexobj(xi_arr):
        xi_arr = xi_arr.astype(float)
        near = _use_near_one(params, xi_arr)
        if np.any(near):
            out = np.empty(xi_arr.shape)
            out[near] = g_near_one(params, xi_arr[near])
            if np.any(~near):
                out[~near] = g_eval(params, xi_arr[~near], tol)
            return out if out.ndim else out[()]
    on_circle = r >= 1 - CIRCLE_TOL
    if np.any(on_circle):
        at_one = on_circle & (np.abs(xi_arr - 1) <= CIRCLE_TOL)
        if np.any(on_circle & ~at_one) and not params.alpha > 0:
            raise NonConvergent("G on |xi| = 1 away from 1 is only summed for alpha > 0")
        out = np.empty(xi_arr.shape, dtype=np.result_type(xi_arr, float))
        out[at_one] = g_at_one(params)
        rest = ~at_one
        if np.any(rest):
            out[rest] = _g_series_on_circle(params, xi_arr[rest], tol)
        return out if out.ndim else out[()]
    coeffs = GSeries(params).coefficients(float(r.max()) if r.size else 0.0, tol)
    out = polyval(coeffs, xi_arr)
    return out if out.ndim else out[()]


@lru_cache(maxsize=256)
def _near_one_coeffs(alpha, beta, x_max, tol):
    def ratio(n):
        return (n + alpha + beta + 2) / (n + alpha + 3)

    c = series_coefficients(1.0, ratio, x_max, tol)
    c.setflags(write=False)
    return c


def g_near_one(params: Params, t):
    """G on real ``t`` in (0, 1] through its expansion about 1.

    ``G(t) = G(1) t^-beta - beta/(alpha+2) (1-t)^(alpha+2) 2F1(1, alpha+beta+2; alpha+3; 1-t)``:
    the first term solves the homogeneous part of ``t G' = beta((1-t)^(alpha+1) - G)``,
    the second is the particular solution vanishing at 1.
    """
    a, b = params.alpha, params.beta
    t = np.asarray(t, dtype=float)
    x = 1 - t
    x_max = float(np.max(x)) if x.size else 0.0
    if x_max >= 1:
        raise DomainError("g_near_one needs t > 0")
    c = _near_one_coeffs(a, b, x_max, SERIES_TOL)
    out = g_at_one(params) * t ** (-b) - b / (a + 2) * x ** (a + 2) * polyval(c, x)
    return out if out.ndim else out[()]


def _g_series_on_circle(params, xi, tol):
    c = GSeries(params)
    total = np.zeros(xi.shape, dtype=complex)
    power = np.ones(xi.shape, dtype=complex)
    small = 0
    for n, cn in enumerate(c):
        term = cn * power
        total += term
        if np.max(np.abs(term)) < tol * (1 + np.max(np.abs(total))):
            small += 1
            if small >= 3:
                return total if np.iscomplexobj(xi) else total.real
        else:
            small = 0
        if n >= DEFAULT_MAX_TERMS:
            raise NonConvergent("G series on the circle did not converge")
        power = power * xi


def g_eval_with_derivatives(params: Params, t, tol: float = SERIES_TOL):
    """Return ``(G, G', G'')`` on real ``t`` in [0, 1).

    Termwise differentiated series up to ``t = 1/2``; above that the
    derivatives follow from ``t G' = beta((1-t)^(alpha+1) - G)`` and its
    derivative ``t G'' = -(1+beta) G' - beta (alpha+1) (1-t)^alpha``.
    """
    a, b = params.alpha, params.beta
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise DomainError("derivatives of G are only summed on [0, 1)")
    g = np.empty(t.shape)
    g1 = np.empty(t.shape)
    g2 = np.empty(t.shape)
    near = _use_near_one(params, t)
    lo = ~near
    if np.any(lo):
        tl = t[lo]
        c = GSeries(params).coefficients(float(np.max(tl)), tol)
        n = np.arange(len(c), dtype=float)
        g[lo] = polyval(c, tl)
        g1[lo] = polyval((n * c)[1:], tl) if len(c) > 1 else 0.0
        g2[lo] = polyval((n * (n - 1) * c)[2:], tl) if len(c) > 2 else 0.0
    if np.any(near):
        tn = t[near]
        gn = g_near_one(params, tn)
        d1 = b * ((1 - tn) ** (a + 1) - gn) / tn
        g[near] = gn
        g1[near] = d1
        g2[near] = (-(1 + b) * d1 - b * (a + 1) * (1 - tn) ** a) / tn
    return g, g1, g2


def g_derivative(params: Params, t):
    """G'(t) from the identity ``t G'(t) = beta ((1-t)^(alpha+1) - G(t))``.

    At ``t = 0`` the removable singularity is filled with the first series
    coefficient ``-beta (alpha+1) / (beta+1)``.
    """
    a, b = params.alpha, params.beta
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise DomainError("g_derivative needs t in [0, 1)")
    at0 = -b * (a + 1) / (b + 1)
    g = g_eval(params, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(t == 0, at0, b * ((1 - t) ** (a + 1) - g) / np.where(t == 0, 1, t))
    return out if out.ndim else float(out)


# --- kernel ---------------------------------------------------------------

def kernel_prefactor(params: Params) -> float:
    """``(beta0+1)_s / (alpha+beta0+2)_s``."""
    b0, s = reduce(params.beta)
    return pochhammer(b0 + 1, s) / pochhammer(params.alpha + b0 + 2, s)


def kernel_eval(params: Params, xi):
    """The reproducing kernel as a function of ``xi = z * conj(w)``, ``|xi| < 1``.

    Computed through the bounded factor G and ``(1 - xi)^-(alpha+2)``.
    """
    b0, s = reduce(params.beta)
    xi_arr = np.asarray(xi)
    if np.any(np.abs(xi_arr) >= 1):
        raise DomainError("kernel_eval needs |xi| < 1")
    if s and np.any(xi_arr == 0):
        raise SingularArgument(f"kernel has a pole of order {s} at xi = 0 for beta = {params.beta}")
    base = Params(params.alpha, b0)
    out = g_eval(base, xi_arr) / (1 - xi_arr) ** (params.alpha + 2)
    if s:
        out = kernel_prefactor(params) * out / xi_arr ** s
    return out if np.ndim(out) else out[()]


@lru_cache(maxsize=256)
def _kernel_coeffs(alpha, beta, x_max, tol, max_terms):
    def ratio(n):
        return (n + alpha + beta + 2) / (n + beta + 1)

    c = series_coefficients(1.0, ratio, x_max, tol, max_terms)
    c.setflags(write=False)
    return c


def kernel_coefficients(params: Params, x_max: float, tol: float = SERIES_TOL,
                        max_terms: int = DEFAULT_MAX_TERMS) -> np.ndarray:
    """Power-series coefficients ``(alpha+beta+2)_n / (beta+1)_n`` (reduced params)."""
    _require_reduced(params, "kernel_coefficients")
    return _kernel_coeffs(params.alpha, params.beta, float(x_max), tol, max_terms)


def kernel_derivatives(params: Params, t, tol: float = SERIES_TOL):
    """``(K, K', K'')`` at real ``t`` in [0, 1) by termwise differentiation."""
    _require_reduced(params, "kernel_derivatives")
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise DomainError("kernel_derivatives needs t in [0, 1)")
    t_max = float(np.max(t)) if t.size else 0.0
    a = kernel_coefficients(params, t_max, tol)
    n = np.arange(len(a), dtype=float)
    k0 = polyval(a, t)
    k1 = polyval((n * a)[1:], t)
    k2 = polyval((n * (n - 1) * a)[2:], t)
    if t.ndim == 0:
        return float(k0), float(k1), float(k2)
    return k0, k1, k2


def kernel_derivative_complex(params: Params, xi):
    """K'(xi) for complex ``xi`` in the open disk (reduced params)."""
    _require_reduced(params, "kernel_derivative_complex")
    xi = np.asarray(xi)
    r_max = float(np.max(np.abs(xi))) if xi.size else 0.0
    if r_max >= 1:
        raise DomainError("kernel_derivative_complex needs |xi| < 1")
    c = GSeries(params).coefficients(r_max)
    n = np.arange(len(c), dtype=float)
    g = polyval(c, xi)
    g1 = polyval((n * c)[1:], xi) if len(c) > 1 else np.zeros(xi.shape)
    one = 1 - xi
    return (g1 + (params.alpha + 2) * g / one) / one ** (params.alpha + 2)


def log_kernel_derivatives(params: Params, t):
    """``(log K)'`` and ``(log K)''`` through G, free of the boundary blow-up cancellation."""
    _require_reduced(params, "log_kernel_derivatives")
    a = params.alpha
    t = np.asarray(t, dtype=float)
    g, g1, g2 = g_eval_with_derivatives(params, t)
    one = 1 - t
    d1 = g1 / g + (a + 2) / one
    d2 = g2 / g - (g1 / g) ** 2 + (a + 2) / one ** 2
    return d1, d2
