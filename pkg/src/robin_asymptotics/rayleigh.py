"""Rayleigh quotients of explicit test functions.

    J(v; gamma, G) = (int |grad v|^2 - gamma int_boundary G v^2) / int v^2

Every quotient here is an upper bound for the bottom of the spectrum of the
domain it lives on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.special import gammaln

from .corner_constants import profile_integrals
from .errors import DomainError, NonNegativeQuotient
from .geometry import SectionProfile
from .quadrature import gauss_legendre, integrate_halfline

# ---------------------------------------------------------------------------
# cutoff: psi = 1 on [-1/2, 1/2], quintic smoothstep down to 0 at |s| = 1

_SMOOTHSTEP = Polynomial([0, 0, 0, 10, -15, 6])  # S(t), S(0)=0, S(1)=1


def psi(s):
    a = np.abs(np.asarray(s, dtype=float))
    t = np.clip(2.0 * a - 1.0, 0.0, 1.0)
    return np.where(a >= 1.0, 0.0, 1.0 - _SMOOTHSTEP(t))


def dpsi(s):
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    t = np.clip(2.0 * a - 1.0, 0.0, 1.0)
    inside = (a > 0.5) & (a < 1.0)
    return np.where(inside, -2.0 * _SMOOTHSTEP.deriv()(t) * np.sign(s), 0.0)


def _cutoff_moments():
    one_minus = 1 - _SMOOTHSTEP
    sq = (one_minus * one_minus).integ()
    dsq = (_SMOOTHSTEP.deriv() ** 2).integ()
    # transition occupies half a unit on each side; ds = dt / 2, psi' = -2 S'
    psi_sq = 1.0 + 2 * 0.5 * (sq(1) - sq(0))
    dpsi_sq = 2 * 0.5 * 4 * (dsq(1) - dsq(0))
    return float(psi_sq), float(dpsi_sq)


PSI_SQ, DPSI_SQ = _cutoff_moments()  # int_{-1}^{1} psi^2, int_{-1}^{1} psi'^2


@dataclass(frozen=True)
class TestFunction:
    """Parameters of one of the explicit test functions."""

    variant: str
    a: Optional[float] = None
    profile: Optional[SectionProfile] = None
    tau: Optional[float] = None
    p: Optional[float] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.variant not in ("cone-exp", "strip-chi", "cusp-exp", "halfline-exp"):
            raise DomainError(f"unknown test function {self.variant!r}")
        if self.a is not None and not self.a > 0:
            raise DomainError("decay rate must be positive")
        if self.tau is not None and not self.tau > 1:
            raise DomainError("tau must exceed 1")
        if self.p is not None and not self.p > 1:
            raise DomainError("cusp exponent must exceed 1")

    def quotient(self):
        if self.variant == "cone-exp":
            return closed_form_cone_quotient(self.a, self.profile)
        if self.variant == "strip-chi":
            return strip_chi_quotient(self.tau, self.gamma)
        if self.variant == "cusp-exp":
            return cusp_quotient(self.p, self.gamma)
        return halfline_exp_quotient(self.a if self.a is not None else self.gamma, self.gamma)


# ---------------------------------------------------------------------------
# closed forms

def closed_form_cone_quotient(a, profile, tol=1e-10):
    """Quotient of ``exp(-a xi)`` on the cone over ``profile`` at ``gamma = 1``."""
    if not a > 0:
        raise DomainError("decay rate must be positive")
    num, den = profile_integrals(profile, tol)
    return a * a - 2.0 * a * num / den


def halfline_exp_quotient(a, gamma):
    """``exp(-a x)`` on ``(0, inf)``: ``a^2 - 2 a gamma``."""
    return a * a - 2.0 * a * gamma


def angle_exp_quotient(a, alpha, gamma):
    """``exp(-a x)`` on ``{|y| < x tan(alpha)}``, ``alpha < pi/2``."""
    if not 0 < alpha < 0.5 * math.pi:
        raise DomainError("angle test function needs alpha in (0, pi/2)")
    return a * a - 2.0 * a * gamma / math.sin(alpha)


def _sinhc_parts(y):
    """``(sinh(y)/y, (sinh(y)/y - 1))`` without cancellation for small ``y``."""
    if abs(y) < 1e-3:
        y2 = y * y
        excess = y2 / 6 * (1 + y2 / 20 * (1 + y2 / 42))
        return 1.0 + excess, excess
    q = math.sinh(y) / y
    return q, q - 1.0


def interval_cosh_quotient(k, half_length, gamma):
    """``cosh(k x)`` on ``(-l, l)`` with Robin endpoints (``k = 0`` is the constant)."""
    l = half_length
    x = k * l
    # even function: integrate over (0, l), one endpoint
    q, excess = _sinhc_parts(2 * x)
    mass = 0.5 * l * (1.0 + q)
    grad = 0.5 * l * k * k * excess
    bnd = math.cosh(x) ** 2
    return (grad - gamma * bnd) / mass


def box_cosh_quotient(ks, half_sides, gamma):
    """Product of ``cosh(k_j x_j)``; the quotient of a product is the sum."""
    return sum(interval_cosh_quotient(k, l, gamma) for k, l in zip(ks, half_sides))


def ball_exp_quotient(a, m, gamma):
    """Radial ``exp(a (r - 1))`` on the unit ball in R^m (``a = 0``: constant)."""
    x, w = gauss_legendre(40)
    r = 0.5 * (x + 1.0)
    mass = 0.5 * np.dot(w, np.exp(2 * a * (r - 1)) * r ** (m - 1))
    return (a * a * mass - gamma) / mass


def strip_chi_quotient(tau, gamma):
    """Quotient of ``exp(-gamma y) chi_tau(gamma x - tau)`` near a straight boundary."""
    if not tau > 1:
        raise DomainError("tau must exceed 1")
    return gamma * gamma * (-1.0 + DPSI_SQ / (PSI_SQ + 2.0 * (tau - 1.0)))


def chi(tau, s):
    a = np.abs(np.asarray(s, dtype=float))
    return np.where(a < tau - 1.0, 1.0, psi(a - (tau - 1.0)))


def dchi(tau, s):
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    return np.where(a < tau - 1.0, 0.0, dpsi(a - (tau - 1.0)) * np.sign(s))


def _composite_nodes(breaks, order):
    x, w = gauss_legendre(order)
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = breaks[:-1], breaks[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * x
    weights = half[:, None] * w
    return nodes.ravel(), weights.ravel()


def strip_chi_quotient_quadrature(tau, gamma, y_panels=64, order=12):
    """Two-dimensional quadrature of the same quotient on the quarter plane
    ``x, y > 0`` with the Robin boundary ``y = 0``."""
    # chi is polynomial between these points
    s_breaks = [-tau, -tau + 0.5, tau - 0.5, tau]
    x_breaks = (np.array(s_breaks) + tau) / gamma
    xs, wx = _composite_nodes(x_breaks, order)
    y_max = 40.0 / gamma  # exp(-2 gamma y) < 1e-34 beyond
    ys, wy = _composite_nodes(np.linspace(0.0, y_max, y_panels + 1), order)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    W = np.outer(wx, wy)
    s = gamma * X - tau
    ey = np.exp(-gamma * Y)
    v = ey * chi(tau, s)
    vx = ey * gamma * dchi(tau, s)
    vy = -gamma * v
    grad = np.sum(W * (vx * vx + vy * vy))
    mass = np.sum(W * v * v)
    bnd = np.dot(wx, chi(tau, gamma * xs - tau) ** 2)
    return (grad - gamma * bnd) / mass


# ---------------------------------------------------------------------------
# cusps

def _cusp_integrals(p, gamma):
    """``(int |grad v|^2, int_boundary v^2, int v^2)`` for ``v = exp(-gamma x^q)``
    on ``{x > 0, |y| < x^p}``, ``q = 2 - p``, in the variable ``w = gamma x^q``."""
    q = 2.0 - p

    def x_of(w):
        return (w / gamma) ** (1.0 / q)

    def jac(w):
        return x_of(w) / (q * w)

    def mass(w):
        x = x_of(w)
        return 2.0 * x**p * np.exp(-2.0 * w) * jac(w)

    def grad(w):
        x = x_of(w)
        # |v'| = gamma q x^(q-1) v = q w v / x
        return 2.0 * x**p * (q * w / x) ** 2 * np.exp(-2.0 * w) * jac(w)

    def bnd(w):
        x = x_of(w)
        return 2.0 * np.exp(-2.0 * w) * np.sqrt(1.0 + p * p * x ** (2 * p - 2)) * jac(w)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = tuple(integrate_halfline(lambda w, f=f: np.nan_to_num(f(w), nan=0.0, posinf=0.0),
                                       scale=1.0)
                    for f in (grad, bnd, mass))
    return out


def cusp_mass_exact(p, gamma):
    """``int v^2`` in closed form: ``(2/q) Gamma((p+1)/q) (2 gamma)^(-(p+1)/q)``."""
    q = 2.0 - p
    s = (p + 1.0) / q
    return math.exp(math.log(2.0 / q) + gammaln(s) - s * math.log(2.0 * gamma))


def cusp_quotient(p, gamma):
    if not 1 < p < 2:
        raise DomainError("cusp quotient is implemented for 1 < p < 2")
    g, b, m = _cusp_integrals(p, gamma)
    return (g.value - gamma * b.value) / m.value


@dataclass(frozen=True)
class CuspScan:
    p: float
    gammas: np.ndarray
    J: np.ndarray
    slope: float
    intercept: float

    def rows(self):
        for g, j in zip(self.gammas, self.J):
            yield g, j, math.log(g), math.log(-j)


def cusp_scan(p, gammas):
    """Fit the slope of ``log(-J)`` against ``log(gamma)`` on the cusp."""
    gammas = np.asarray(gammas, dtype=float)
    if not 1 < p < 2:
        raise DomainError("cusp scan needs 1 < p < 2; for p >= 2 the growth order is unbounded")
    if gammas.size < 5 or np.any(gammas < 5) or np.any(np.diff(gammas) <= 0):
        raise DomainError("cusp scan needs at least 5 increasing gamma values >= 5")
    J = np.array([cusp_quotient(p, g) for g in gammas])
    bad = np.nonzero(J >= 0)[0]
    if bad.size:
        g = float(gammas[bad[0]])
        raise NonNegativeQuotient(f"quotient is non-negative at gamma={g}; gamma too small",
                                  gamma=g)
    slope, intercept = np.polyfit(np.log(gammas), np.log(-J), 1)
    return CuspScan(p=p, gammas=gammas, J=J, slope=float(slope), intercept=float(intercept))


# ---------------------------------------------------------------------------
# one-dimensional inequality

def halfline_margin(x, v, gamma, dv=None):
    """``int |v'|^2 - gamma v(0)^2 + gamma^2 int |v|^2`` on ``[x[0], x[-1]]``.

    ``v`` holds samples on the grid ``x`` (with ``x[0] = 0``) of a function
    vanishing at the right end; it is interpolated by a cubic spline, or by
    a Hermite cubic when derivative samples ``dv`` are given. Integrals are
    exact for the interpolant.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x[0] != 0.0:
        raise DomainError("grid must start at 0")
    if abs(v[-1]) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
        raise DomainError("function must vanish at the right end of the grid")
    spline = CubicSpline(x, v) if dv is None else CubicHermiteSpline(x, v, dv)
    deriv = spline.derivative()
    nodes, weights = _composite_nodes(x, 5)  # exact for degree <= 9
    grad = np.dot(weights, deriv(nodes) ** 2)
    mass = np.dot(weights, spline(nodes) ** 2)
    return float(grad - gamma * v[0] ** 2 + gamma * gamma * mass)


halfline_inequality_check = halfline_margin
