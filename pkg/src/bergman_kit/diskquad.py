"""Quadrature against the probability measure mu_{alpha,beta} on the unit disk.

With ``t = |z|^2`` the measure becomes ``t^beta (1-t)^alpha dt / B(alpha+1, beta+1)``
times the uniform angular average, so a disk rule is a Gauss-Jacobi rule in
``t`` crossed with the uniform M-point rule in the angle.  Radial singular
factors of an integrand (``|z|^{2e}``, ``(1-|z|^2)^g``, ``log^L |z|^2``) are
folded into the radial weight instead of being sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import BuildError, DomainError, IntegrabilityError
from .kernel import Params
from .specialfn import log_beta

DEFAULT_RADIAL_ORDER = 80
DEFAULT_ANGULAR_COUNT = 1024


# --- 1-D rules on [0, 1] --------------------------------------------------

def _golub_welsch(diag, offdiag, mu0):
    try:
        nodes, vecs = eigh_tridiagonal(diag, offdiag)
    except Exception as exc:  # scipy raises LinAlgError or ValueError
        raise BuildError(f"tridiagonal eigenproblem failed: {exc}") from exc
    weights = mu0 * vecs[0, :] ** 2
    return nodes, weights


def jacobi_recurrence(a: float, b: float, n: int):
    """Monic recurrence coefficients on [-1, 1] for weight ``(1-x)^a (1+x)^b``."""
    k = np.arange(n, dtype=float)
    s = 2 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (s * (s + 2))
    diag[0] = (b - a) / (a + b + 2)
    kk = k[1:]
    s1 = s[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        off = 4 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s1 ** 2 * (s1 + 1) * (s1 - 1))
    if n > 1:
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
    return diag, off


@lru_cache(maxsize=128)
def gauss_jacobi(gap_exp: float, t_exp: float, n: int):
    """Gauss rule on (0, 1) for weight ``t^t_exp (1-t)^gap_exp``.

    Weights sum to ``B(t_exp+1, gap_exp+1)``.  Nodes come from the
    Golub-Welsch eigenproblem of the shifted Jacobi matrix.
    """
    if not (gap_exp > -1 and t_exp > -1):
        raise IntegrabilityError(f"Jacobi weight exponents must exceed -1: ({gap_exp}, {t_exp})")
    if n < 1:
        raise BuildError("need at least one node")
    diag, off = jacobi_recurrence(gap_exp, t_exp, n)
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off)) and np.all(off >= 0)):
        raise BuildError("ill-conditioned Jacobi recurrence")
    mu0 = math.exp(log_beta(t_exp + 1, gap_exp + 1))
    x, w = _golub_welsch(diag, np.sqrt(off), 1.0)
    nodes = (1 + x) / 2
    weights = w * mu0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _log_moments(gap_exp, t_exp, log_power, count):
    a, b = mpmath.mpf(gap_exp), mpmath.mpf(t_exp)
    out = []
    for k in range(count):
        p = b + k + 1
        base = mpmath.beta(p, a + 1)
        d = mpmath.digamma(p + a + 1) - mpmath.digamma(p)
        if log_power == 1:
            out.append(base * d)
        else:
            out.append(base * (d * d + mpmath.psi(1, p) - mpmath.psi(1, p + a + 1)))
    return out


def _chebyshev(moments, n):
    """Recurrence coefficients from ordinary moments (Chebyshev algorithm)."""
    sig_prev = [mpmath.mpf(0)] * (2 * n)
    sig = list(moments)
    diag = [moments[1] / moments[0]]
    off = [moments[0]]
    for k in range(1, n):
        new = [mpmath.mpf(0)] * (2 * n)
        for l in range(k, 2 * n - k):
            new[l] = sig[l + 1] - diag[k - 1] * sig[l] - off[k - 1] * sig_prev[l]
        diag.append(new[k + 1] / new[k] - sig[k] / sig[k - 1])
        off.append(new[k] / sig[k - 1])
        sig_prev, sig = sig, new
    return diag, off


@lru_cache(maxsize=64)
def gauss_log_jacobi(gap_exp: float, t_exp: float, log_power: int, n: int):
    """Gauss rule on (0, 1) for weight ``t^t_exp (1-t)^gap_exp |log t|^log_power``.

    The Jacobi matrix is built from closed-form moments (digamma/trigamma
    expressions) in extended precision, then diagonalized in double precision.
    """
    if log_power not in (1, 2):
        raise DomainError("log_power must be 1 or 2")
    if not (gap_exp > -1 and t_exp > -1):
        raise IntegrabilityError(f"weight exponents must exceed -1: ({gap_exp}, {t_exp})")
    with mpmath.workdps(40 + 2 * n):
        moments = _log_moments(gap_exp, t_exp, log_power, 2 * n)
        diag, off = _chebyshev(moments, n)
        if any(o <= 0 for o in off):
            raise BuildError("moment recurrence lost positivity")
        d = np.array([float(x) for x in diag])
        e = np.array([float(mpmath.sqrt(x)) for x in off[1:]])
        mu0 = float(off[0])
    nodes, weights = _golub_welsch(d, e, mu0)
    if nodes[0] <= 0 or nodes[-1] >= 1:
        raise BuildError("log-weighted nodes escaped (0, 1)")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


# --- integrands -----------------------------------------------------------

@dataclass(frozen=True)
class RadialFactor:
    """``t^t_power (1-t)^gap_power (log t)^log_power`` with ``t = |z|^2``."""

    t_power: float = 0.0
    gap_power: float = 0.0
    log_power: int = 0

    @property
    def trivial(self) -> bool:
        return self.t_power == 0 and self.gap_power == 0 and self.log_power == 0

    def __mul__(self, other: "RadialFactor") -> "RadialFactor":
        return RadialFactor(self.t_power + other.t_power, self.gap_power + other.gap_power,
                            self.log_power + other.log_power)

    def __pow__(self, k: int) -> "RadialFactor":
        return RadialFactor(k * self.t_power, k * self.gap_power, k * self.log_power)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** self.t_power * (1 - t) ** self.gap_power
        if self.log_power:
            out = out * np.log(t) ** self.log_power
        return out


def _one(w):
    return np.ones(np.shape(w))


@dataclass(frozen=True)
class TestFunction:
    """An integrand ``f(w) = smooth(w) * factor(|w|^2)``.

    Build instances with the module-level constructors (``monomial``,
    ``log_mod_sq``, ``h_family`` ...).  ``radial`` marks a smooth part that
    depends on ``|w|`` only; ``bounded`` marks members of the bounded test
    family used for BMO checks.
    """

    __test__ = False  # keep pytest from collecting this class

    kind: str
    args: tuple = ()
    smooth: Callable = field(default=_one, compare=False, repr=False)
    factor: RadialFactor = RadialFactor()
    radial: bool = True
    bounded: bool = True

    def __call__(self, w):
        w = np.asarray(w)
        val = self.smooth(w)
        if not self.factor.trivial:
            val = val * self.factor(np.abs(w) ** 2)
        return val

    def abs_sq(self) -> "TestFunction":
        f = self.smooth
        return replace(self, kind=f"|{self.kind}|^2", smooth=lambda w: np.abs(f(w)) ** 2,
                       factor=self.factor ** 2)

    def times(self, g: Callable, radial: bool = False, name: str = "g") -> "TestFunction":
        f = self.smooth
        return replace(self, kind=f"{self.kind}*{name}", smooth=lambda w: f(w) * g(w),
                       radial=self.radial and radial)

    def label(self) -> str:
        if not self.args:
            return self.kind
        return f"{self.kind}({','.join(format(a, 'g') for a in self.args)})"


def one() -> TestFunction:
    return TestFunction("one")


def monomial(n: int, m: int) -> TestFunction:
    """``w^n conj(w)^m``."""
    if n < 0 or m < 0:
        raise DomainError("monomial exponents must be non-negative")
    return TestFunction("monomial", (n, m), lambda w: w ** n * np.conj(w) ** m,
                        radial=(n == m))


def one_minus_mod_sq_pow(N: float) -> TestFunction:
    """``(1 - |w|^2)^N``, with the power folded into the radial weight."""
    if N < 0:
        raise DomainError("N must be non-negative")
    return TestFunction("gap_pow", (N,), factor=RadialFactor(gap_power=N))


def g_n(N: float) -> TestFunction:
    return replace(one_minus_mod_sq_pow(N), kind="g_N")


def log_mod_sq() -> TestFunction:
    """``log |w|^2``."""
    return TestFunction("log", factor=RadialFactor(log_power=1), bounded=False)


def h_family(s: float, tau: float) -> TestFunction:
    """``|w|^{-2s} (1 - |w|^2)^{-tau}``."""
    return TestFunction("h", (s, tau), factor=RadialFactor(-s, -tau),
                        bounded=(s <= 0 and tau <= 0))


def harmonic_re(n: int) -> TestFunction:
    return TestFunction("re", (n,), lambda w: np.real(w ** n), radial=(n == 0))


def harmonic_im(n: int) -> TestFunction:
    return TestFunction("im", (n,), lambda w: np.imag(w ** n), radial=(n == 0))


def from_callable(fn: Callable, radial: bool = False, bounded: bool = True,
                  name: str = "callable") -> TestFunction:
    """Wrap a vectorized callable on complex points."""
    return TestFunction(name, (), fn, radial=radial, bounded=bounded)


# --- disk rules -----------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Radial Gauss-Jacobi rule (normalized to total mass 1) times uniform angles."""

    params: Params
    radial_nodes: np.ndarray = field(repr=False)
    radial_weights: np.ndarray = field(repr=False)
    angular_count: int = DEFAULT_ANGULAR_COUNT

    @property
    def radial_order(self) -> int:
        return len(self.radial_nodes)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angular_count) / self.angular_count

    def radial(self, factor: RadialFactor = RadialFactor()):
        """Nodes and weights in ``t`` for ``integral of F(t) * factor(t) dmu(t)``."""
        if factor.trivial:
            return self.radial_nodes, self.radial_weights
        return _factored_radial(self.params.alpha, self.params.beta, factor, self.radial_order)

    def refined(self, factor: int = 2) -> "QuadratureRule":
        return build_rule(self.params, factor * self.radial_order, factor * self.angular_count)


def _factored_radial(alpha, beta, factor: RadialFactor, n):
    t_exp = beta + factor.t_power
    gap_exp = alpha + factor.gap_power
    if not (t_exp > -1 and gap_exp > -1):
        raise IntegrabilityError(
            f"|z|^(2*{factor.t_power}) (1-|z|^2)^{factor.gap_power} is not integrable "
            f"against mu_({alpha},{beta})")
    norm = math.exp(log_beta(alpha + 1, beta + 1))
    if factor.log_power == 0:
        nodes, w = gauss_jacobi(gap_exp, t_exp, n)
        return nodes, w / norm
    nodes, w = gauss_log_jacobi(gap_exp, t_exp, abs(factor.log_power), n)
    sign = -1.0 if factor.log_power % 2 else 1.0
    return nodes, sign * w / norm


def build_rule(params: Params, radial_order: int = DEFAULT_RADIAL_ORDER,
               angular_count: int = DEFAULT_ANGULAR_COUNT) -> QuadratureRule:
    if radial_order < 2:
        raise BuildError("radial_order must be >= 2")
    if angular_count < 4:
        raise BuildError("angular_count must be >= 4")
    nodes, w = gauss_jacobi(params.alpha, params.beta, radial_order)
    weights = w / w.sum()
    weights.setflags(write=False)
    if not (np.all(np.diff(nodes) > 0) and nodes[0] > 0 and nodes[-1] < 1):
        raise BuildError("radial nodes are not strictly increasing inside (0, 1)")
    return QuadratureRule(params, nodes, weights, angular_count)


def disk_integrate(f: TestFunction, rule: QuadratureRule, rotation: float = 0.0) -> complex:
    """Approximate ``integral of f dmu_{alpha,beta}`` with the product rule."""
    t, w = rule.radial(f.factor)
    r = np.sqrt(t)
    if f.radial:
        vals = f.smooth(r.astype(complex))
        return complex(np.dot(w, vals))
    pts = r[:, None] * np.exp(1j * (rotation + rule.angles))[None, :]
    vals = f.smooth(pts)
    return complex(np.dot(w, vals.mean(axis=1)))


def moment(f: TestFunction, n: int, k: int, rule: QuadratureRule) -> complex:
    """``integral of f(w) conj(w)^n w^k dmu(w)``."""
    g = f.times(lambda w: np.conj(w) ** n * w ** k, radial=(n == k), name=f"m{n},{k}")
    return disk_integrate(g, rule)


def diagonal_moment(params: Params, n: int) -> float:
    """``integral of |z|^{2n} dmu = (beta+1)_n / (alpha+beta+2)_n``."""
    out = 1.0
    for k in range(n):
        out *= (params.beta + 1 + k) / (params.alpha + params.beta + 2 + k)
    return out
