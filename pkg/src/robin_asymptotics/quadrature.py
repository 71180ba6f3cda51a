"""Adaptive Gauss-Legendre quadrature, vectorised across panels.

Each panel is compared against the sum over its two halves; panels whose
difference exceeds an equal share of the remaining error budget are bisected.
All panels of one refinement round are evaluated with a single call to the
integrand, so the integrand must accept and return numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureFailure


@lru_cache(maxsize=None)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    tail: float = 0.0


def _panel_sums(f, lo, hi, order):
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return half * (vals @ w)


def integrate_panels(f, a, b, tol=1e-10, rtol=0.0, order=16, max_rounds=40,
                     strict=True):
    """Integrate ``f`` over each interval ``[a[k], b[k]]``.

    Returns ``(values, errors)`` with one entry per interval. The tolerance,
    ``max(tol, rtol * |I|)`` with ``I`` a first estimate of the total, is
    a global budget: panels are bisected until the summed error estimate
    (difference between one panel and its two halves) falls below it.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("interval endpoints must have equal shapes")
    n = a.size
    values = np.zeros(n)
    errors = np.zeros(n)
    total = float(np.sum(np.abs(b - a)))
    if n == 0 or total == 0.0:
        return values, errors

    lo, hi, owner = a.copy(), b.copy(), np.arange(n)
    whole = _panel_sums(f, lo, hi, order)
    tol = max(tol, rtol * float(np.sum(np.abs(whole))))
    spent = 0.0
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        left = _panel_sums(f, lo, mid, order)
        right = _panel_sums(f, mid, hi, order)
        halves = left + right
        err = np.abs(halves - whole)
        # roundoff floor so that huge-but-converged panels are accepted
        err = np.where(err <= 64 * np.finfo(float).eps * np.abs(halves), 0.0, err)
        if spent + err.sum() <= tol:
            done = np.ones(err.size, dtype=bool)
        else:
            # panels below an equal share of the remaining budget are frozen
            done = err <= (tol - spent) / err.size
        spent += float(err[done].sum())
        np.add.at(values, owner[done], halves[done])
        np.add.at(errors, owner[done], err[done])
        if done.all():
            return values, errors
        keep = ~done
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
        whole = np.concatenate([left[keep], right[keep]])
    if strict:
        raise QuadratureFailure(
            f"adaptive quadrature did not reach tol={tol:g} after {max_rounds} rounds")
    np.add.at(values, owner, whole)
    np.add.at(errors, owner, np.inf)
    return values, errors


def integrate(f, a, b, tol=1e-10, rtol=0.0, order=16, breakpoints=(), strict=True,
              max_rounds=40):
    """Adaptive integral of ``f`` over ``[a, b]`` (``a <= b``), split at ``breakpoints``."""
    pts = np.unique(np.clip(np.r_[a, list(breakpoints), b], a, b))
    vals, errs = integrate_panels(f, pts[:-1], pts[1:], tol=tol, rtol=rtol,
                                  order=order, strict=strict, max_rounds=max_rounds)
    return QuadResult(float(np.sum(vals)), float(np.sum(errs)))


def integrate_halfline(f, scale=1.0, tol=0.0, rtol=1e-13, rel_cut=1e-16, order=16):
    """Integrate a decaying integrand over ``(0, inf)``.

    The range is truncated at the first point past the peak where ``|f|``
    drops below ``rel_cut`` times its peak value; ``scale`` is the expected
    decay length and seeds the geometric search grid. The recorded tail is
    ``|f(X)| * X``, a bound for integrands decaying at least like ``1/x^2``
    beyond the cut ``X``.
    """
    grid = scale * np.geomspace(1e-8, 1e4, 481)
    vals = np.abs(np.asarray(f(grid), dtype=float))
    if not np.all(np.isfinite(vals)):
        raise QuadratureFailure("integrand is not finite on the search grid")
    peak_idx = int(np.argmax(vals))
    peak = vals[peak_idx]
    if peak == 0.0:
        return QuadResult(0.0, 0.0, 0.0)
    below = np.nonzero(vals[peak_idx:] < rel_cut * peak)[0]
    if below.size == 0:
        raise QuadratureFailure("integrand does not decay on the search grid")
    cut = grid[peak_idx + below[0]]
    # geometric breakpoints resolve power-law behaviour near the origin
    bps = grid[(grid > 0) & (grid < cut)][::20]
    res = integrate(f, 0.0, cut, tol=tol, rtol=rtol, order=order, breakpoints=bps)
    tail = float(np.abs(f(np.array([cut])))[0] * cut)
    return QuadResult(res.value, res.error, tail)
