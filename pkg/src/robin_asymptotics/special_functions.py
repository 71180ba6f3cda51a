"""Scalar kernels: the modified Bessel ratio and the transcendental roots
used by the exact model solvers."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

ROOT_RTOL = 1e-12
MAX_ITER = 200


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int


def _bracketed_root(g, dg, target, tol=ROOT_RTOL):
    """Root of the increasing function ``g(x) = target`` on ``x >= 0``.

    The bracket grows geometrically from ``[0, 1]``; bisection narrows it and
    Newton steps (kept inside the bracket) polish the result.
    """
    lo, hi = 0.0, 1.0
    it = 0
    while g(hi) < target:
        lo, hi = hi, 2.0 * hi
        it += 1
    while hi - lo > 1e-3 * max(1.0, hi) and it < MAX_ITER:
        mid = 0.5 * (lo + hi)
        if g(mid) < target:
            lo = mid
        else:
            hi = mid
        it += 1
    x = 0.5 * (lo + hi)
    while it < MAX_ITER:
        it += 1
        r = g(x) - target
        if r < 0:
            lo = x
        else:
            hi = x
        d = dg(x)
        step = r / d if d > 0 else math.inf
        x_new = x - step
        if not lo <= x_new <= hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(1.0, abs(x)):
            x = x_new
            break
        x = x_new
    return RootResult(x, g(x) - target, it)


def mu_tanh_root(c):
    """Non-negative root of ``mu * tanh(mu) = c``."""
    if c < 0 or not math.isfinite(c):
        raise DomainError(f"mu_tanh_root needs c >= 0, got {c}")
    if c == 0:
        return RootResult(0.0, 0.0, 0)

    def g(m):
        return m * math.tanh(m)

    def dg(m):
        t = math.tanh(m)
        return t + m * (1.0 - t * t)

    return _bracketed_root(g, dg, c)


def bessel_ratio(nu, x):
    """``I_nu(x) / I_{nu-1}(x)`` by the continued fraction

        r_nu = 1 / (2 nu / x + r_{nu+1}),

    evaluated with the modified Lentz algorithm. No Bessel value is ever
    formed, so the ratio is safe for arbitrarily large ``x``.
    """
    if not x > 0:
        raise DomainError(f"bessel_ratio needs x > 0, got {x}")
    if nu < 0.5:
        raise DomainError(f"bessel_ratio needs nu >= 1/2, got {nu}")
    tiny = 1e-300
    eps = 1e-16
    # r = 1/(b0 + 1/(b1 + 1/(b2 + ...))), b_k = 2 (nu + k) / x
    f = tiny
    c = f
    d = 0.0
    max_terms = 10000 + int(10 * x)
    for k in range(max_terms):
        b = 2.0 * (nu + k) / x
        d = b + d
        d = tiny if d == 0 else d
        c = b + 1.0 / c
        c = tiny if c == 0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < eps:
            break
    else:
        raise ArithmeticError(f"continued fraction did not converge for nu={nu}, x={x}")
    return f


def ball_lambda_root(m, gamma):
    """Principal Robin eigenvalue of the unit ball in R^m.

    Solves ``x I_{m/2}(x) / I_{m/2-1}(x) = gamma`` (``x tanh x = gamma`` for
    ``m = 1``) for ``x = sqrt(-Lambda)``.
    """
    if m < 1 or int(m) != m:
        raise DomainError(f"dimension must be a positive integer, got {m}")
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if m == 1:
        mu = mu_tanh_root(gamma).root
        return -mu * mu
    nu = 0.5 * m

    def g(x):
        return x * bessel_ratio(nu, x) if x > 0 else 0.0

    def dg(x):
        # d/dx [x r] with r' = 1 - r^2 - (2 nu - 1) r / x
        if x <= 0:
            return 1.0 / (2.0 * nu)
        r = bessel_ratio(nu, x)
        return r + x * (1.0 - r * r) - (2.0 * nu - 1.0) * r

    x = _bracketed_root(g, dg, gamma).root
    return -x * x
