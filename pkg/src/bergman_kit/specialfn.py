"""Pochhammer symbols, Beta function and generalized hypergeometric series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, NonConvergent

DEFAULT_TOL = 1e-14
DEFAULT_MAX_TERMS = 100_000


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``a (a+1) ... (a+n-1)``; the empty product is 1."""
    if n < 0:
        raise DomainError(f"pochhammer needs n >= 0, got {n}")
    out = 1.0
    for k in range(n):
        out *= a + k
    return out


def log_beta(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError(f"beta function needs a, b > 0, got ({a}, {b})")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function, evaluated in log space."""
    return math.exp(log_beta(a, b))


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


@dataclass(frozen=True)
class HypergeometricSpec:
    numerator_params: Sequence[float]
    denominator_params: Sequence[float]
    argument: complex
    tolerance: float = DEFAULT_TOL
    max_terms: int = DEFAULT_MAX_TERMS
    consecutive: int = field(default=3, repr=False)

    def __post_init__(self):
        for b in self.denominator_params:
            if _is_nonpositive_int(b):
                raise DomainError(f"denominator parameter {b} is a non-positive integer")
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if abs(self.argument) > 1:
            raise DomainError(f"|argument| = {abs(self.argument)} > 1")

    @property
    def terminating(self) -> bool:
        return any(_is_nonpositive_int(a) for a in self.numerator_params)


def _check_convergent(spec: HypergeometricSpec) -> None:
    p, q = len(spec.numerator_params), len(spec.denominator_params)
    x = spec.argument
    if spec.terminating or x == 0:
        return
    if p > q + 1:
        raise NonConvergent(f"{p}F{q} diverges for every nonzero argument")
    if p == q + 1 and abs(x) == 1:
        # terms behave like n^(sum(a) - sum(b) - 1)
        excess = sum(spec.denominator_params) - sum(spec.numerator_params)
        if not excess > 0:
            raise NonConvergent(
                f"{p}F{q} on |x| = 1 needs sum(b) - sum(a) > 0, got {excess}")


def pfq(spec: HypergeometricSpec):
    """Sum the pFq series term by term.

    Stops once ``spec.consecutive`` successive terms fall below
    ``tolerance * (1 + |partial sum|)``.  The result is complex when the
    argument is complex and a float otherwise.
    """
    _check_convergent(spec)
    a = list(spec.numerator_params)
    b = list(spec.denominator_params)
    x = spec.argument
    term = 1.0 + 0j if isinstance(x, complex) else 1.0
    total = term
    small = 0
    for n in range(spec.max_terms):
        num = 1.0
        for ai in a:
            num *= ai + n
        den = float(n + 1)
        for bi in b:
            den *= bi + n
        term = term * num / den * x
        total += term
        if abs(term) < spec.tolerance * (1.0 + abs(total)):
            small += 1
            if small >= spec.consecutive:
                return total
        else:
            small = 0
    raise NonConvergent(f"pFq not converged after {spec.max_terms} terms (|x| = {abs(x)})")


def hyp(numerator, denominator, x, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS):
    """Shorthand for ``pfq(HypergeometricSpec(...))``."""
    return pfq(HypergeometricSpec(tuple(numerator), tuple(denominator), x, tol, max_terms))


def series_coefficients(first: float, ratio, x_max: float, tol: float = 1e-17,
                        max_terms: int = DEFAULT_MAX_TERMS, block: int = 512) -> np.ndarray:
    """Coefficients ``c_0 .. c_N`` of a power series with ``c_{n+1} = c_n * ratio(n)``.

    ``ratio`` is vectorized over an integer array.  N is chosen so that the
    geometric tail bound ``|c_n| x_max^n / (1 - x_max)`` of the three last terms
    falls below ``tol`` times the accumulated absolute sum.  Raises
    :class:`NonConvergent` when ``max_terms`` is hit first.
    """
    if x_max >= 1:
        raise NonConvergent("series_coefficients needs x_max < 1")
    tail = 1.0 / max(1.0 - x_max, 1e-300)
    chunks = [np.array([first], dtype=float)]
    last = float(first)
    scale = abs(first)
    lx = math.log(x_max) if x_max > 0 else -math.inf
    n0 = 0
    while True:
        n = np.arange(n0, n0 + block)
        c = last * np.cumprod(ratio(n))
        chunks.append(c)
        if x_max == 0:
            break
        k = np.arange(n0 + 1, n0 + block + 1)
        with np.errstate(divide="ignore", under="ignore"):
            mags = np.abs(c) * np.exp(k * lx)
        scale += float(mags.sum())
        below = mags * tail < tol * scale
        run = 0
        stop = None
        for i, flag in enumerate(below):
            run = run + 1 if flag else 0
            if run >= 3:
                stop = i
                break
        if stop is not None:
            chunks[-1] = c[: stop + 1]
            break
        last = float(c[-1])
        n0 += block
        if n0 >= max_terms:
            raise NonConvergent(f"power series not converged after {max_terms} terms at |x| = {x_max}")
        if last == 0.0:
            break
    return np.concatenate(chunks)


def polyval(coeffs: np.ndarray, x):
    """Horner evaluation of ``sum c_n x^n`` for array ``x`` (real or complex)."""
    x = np.asarray(x)
    out = np.zeros(x.shape, dtype=np.result_type(x, coeffs.dtype, float))
    for c in coeffs[::-1]:
        out = out * x + c
    return out
