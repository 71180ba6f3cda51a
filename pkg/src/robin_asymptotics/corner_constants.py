"""Corner constants ``C_y = -Lambda(K_y; 1)`` and the domain constant.

For planar angles and wedges the constant is explicit. For polyhedral cones
of co-dimension three or more only two-sided bounds are available, both
built from the section profile ``b_theta``:

    lower = sup_theta ( int b^(j-1) Sigma / int b^(j-1) )^2,
    upper = inf_theta sup_phi Sigma^2,

where ``Sigma`` is the area-element factor of the cone boundary over the
section plane. The bounds coincide when the cross-section has an inscribed
ball centred at ``theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import (DomainError, InconsistentGradient, NoPositiveWeight,
                     NotInterior, QuadratureFailure, SingularZ, Unbounded,
                     ValidationError)
from .geometry import (CornerDescriptor, PolyhedralCone, SectionProfile,
                       _best, _candidate_starts, max_min_distance_direction,
                       multistart_nelder_mead, orthonormal_complement,
                       section_lines, section_profile, sphere_chart)
from .quadrature import gauss_legendre, integrate_panels

EXACT_RTOL = 1e-6


def c2d(alpha):
    """Corner constant of a planar angle (or co-dimension two wedge) of half-angle ``alpha``."""
    if not 0.0 < alpha < math.pi:
        raise DomainError(
            f"half-angle must lie in (0, pi), got {alpha}; a zero angle is an outward cusp")
    if alpha >= 0.5 * math.pi:
        return 1.0
    return 1.0 / math.sin(alpha) ** 2


def smooth_constant():
    return 1.0


# ---------------------------------------------------------------------------
# area-element factors

def sigma_from_b(b, db):
    """``sqrt(1 + b^-2 + b'^2 b^-4)`` for samples of ``b`` and ``b'``."""
    b = np.asarray(b, dtype=float)
    db = np.asarray(db, dtype=float)
    return np.sqrt(1.0 + 1.0 / b**2 + db**2 / b**4)


@dataclass(frozen=True)
class SigmaIntermediates:
    zeta: np.ndarray
    Z: np.ndarray
    Psi: np.ndarray
    Sigma: np.ndarray


def big_sigma(b, grad, full=False):
    """Area-element factor for a singularity of co-dimension ``j``.

    ``b`` has shape ``(n,)`` and ``grad`` shape ``(n, j-2)`` (gradient of
    ``b`` in an orthonormal tangent frame of the sphere). With
    ``zeta = b grad b``, ``Z = b^2 I + grad b (x) grad b`` and
    ``Psi = Z^-1 zeta``,

        Sigma = sqrt(1 + ((b - Psi . grad b)^2 + b^2 |Psi|^2)^-1).
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    g = np.asarray(grad, dtype=float)
    if g.ndim == 1:
        g = g[:, None]
    n, k = g.shape
    zeta = b[:, None] * g
    Z = (b**2)[:, None, None] * np.eye(k)[None] + g[:, :, None] * g[:, None, :]
    det = np.linalg.det(Z)
    bad = ~(np.isfinite(det) & (np.abs(det) > 1e-300))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularZ(f"Z is singular at sample {i} (b={b[i]:.3g})", sample=i)
    Psi = np.linalg.solve(Z, zeta[..., None])[..., 0]
    lead = b - np.einsum("ij,ij->i", Psi, g)
    Sigma = np.sqrt(1.0 + 1.0 / (lead**2 + b**2 * np.einsum("ij,ij->i", Psi, Psi)))
    if full:
        return SigmaIntermediates(zeta=zeta, Z=Z, Psi=Psi, Sigma=Sigma)
    return Sigma


@dataclass(frozen=True)
class SigmaProfile:
    """``sigma_theta`` on a section profile.

    On every straight-edge arc ``sigma`` is constant, ``sqrt(1 + 1/d^2)``;
    ``arc_sigma`` holds these values in arc order.
    """

    profile: SectionProfile
    arc_sigma: np.ndarray

    def __call__(self, phi):
        return sigma_from_b(self.profile.b(phi), self.profile.db(phi))

    @property
    def sup(self):
        return float(self.arc_sigma.max())


def sigma_codim3(profile):
    return SigmaProfile(profile=profile, arc_sigma=np.sqrt(1.0 + 1.0 / profile.d**2))


# ---------------------------------------------------------------------------
# co-dimension three

@dataclass(frozen=True)
class ConeBounds:
    lower: float
    upper: float
    exact: bool
    theta_lower: np.ndarray
    theta_upper: np.ndarray
    a_opt: Optional[float] = None

    @classmethod
    def build(cls, lower, upper, theta_lower, theta_upper, a_opt=None):
        if lower > upper + 1e-9:
            raise ArithmeticError(f"lower bound {lower} exceeds upper bound {upper}")
        return cls(lower=float(lower), upper=float(upper),
                   exact=bool(upper - lower <= EXACT_RTOL * upper),
                   theta_lower=np.asarray(theta_lower, dtype=float),
                   theta_upper=np.asarray(theta_upper, dtype=float),
                   a_opt=None if a_opt is None else float(a_opt))

    @property
    def midpoint(self):
        return 0.5 * (self.lower + self.upper)

    def to_json(self):
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact,
                "theta_lower": self.theta_lower.tolist(),
                "theta_upper": self.theta_upper.tolist(), "a_opt": self.a_opt}


def profile_integrals(profile, tol=1e-10):
    """``(int b^2 sigma dphi, int b^2 dphi)`` over the circle, arc by arc.

    ``sigma`` is evaluated pointwise from ``b`` and ``b'``; the arcs are
    integrated separately so that the kinks of ``b`` fall on panel ends.
    """
    def weighted(phi):
        b = profile.b(phi)
        return b * b * sigma_from_b(b, profile.db(phi))

    def plain(phi):
        b = profile.b(phi)
        return b * b

    num, _ = integrate_panels(weighted, profile.starts, profile.ends, tol=tol)
    den, _ = integrate_panels(plain, profile.starts, profile.ends, tol=tol)
    return float(num.sum()), float(den.sum())


def optimal_decay(profile, tol=1e-10):
    """Decay rate ``a`` minimising the quotient of ``exp(-a xi)``: ``int b^2 sigma / int b^2``."""
    num, den = profile_integrals(profile, tol)
    return num / den


def upper_bound_at(cone, theta):
    """``sup_phi sigma^2`` at a fixed axis: ``1 + 1 / min_i d_i^2``."""
    prof = section_profile(cone, theta)
    return sigma_codim3(prof).sup ** 2


def bounds_codim3(cone, n_starts=8, tol=1e-10):
    """Two-sided bounds on the corner constant of a cone in R^3.

    The upper bound is minimised by the axis maximising the smallest face
    distance. The lower bound maximises the optimal-decay ratio over the
    axis with the same multistart search, seeded at the upper-bound axis.
    """
    if cone.dim != 3:
        raise ValidationError("bounds_codim3 needs a cone in R^3")
    center = max_min_distance_direction(cone, n_starts=n_starts)
    upper = sigma_codim3(center.profile).sup ** 2

    def neg_ratio(theta):
        try:
            prof = section_profile(cone, theta)
        except (NotInterior, Unbounded):
            return math.inf
        return -optimal_decay(prof, tol)

    starts = [center.theta] + _candidate_starts(cone)
    to_sphere, from_sphere = sphere_chart(center.theta)
    results = [(neg_ratio(center.theta), center.theta)]
    results += multistart_nelder_mead(neg_ratio, starts, to_sphere, from_sphere, n_starts)
    best = _best(results)
    a = -best[0]
    return ConeBounds.build(lower=a * a, upper=upper, theta_lower=best[1],
                            theta_upper=center.theta, a_opt=a)


# ---------------------------------------------------------------------------
# co-dimension four

@dataclass(frozen=True)
class BField:
    """Section profile sampler on ``S^{j-2}`` for one axis ``theta``.

    ``evaluate(u)`` maps unit vectors ``u`` of shape ``(n, j-1)`` to
    ``(b, grad)``, with ``grad`` the ambient tangent gradient of shape
    ``(n, j-1)``.
    """

    theta: np.ndarray
    evaluate: Callable
    j: int


def cone_b_field(cone, theta):
    """Sampler of ``b_theta`` for a polyhedral cone in R^j."""
    frame, q, c = section_lines(cone, theta)

    def evaluate(u):
        u = np.atleast_2d(u)
        s = u @ q.T  # (n, k)
        with np.errstate(divide="ignore"):
            cand = np.where(s > 1e-300, c[None, :] / np.where(s > 0, s, 1.0), np.inf)
        k = np.argmin(cand, axis=1)
        b = cand[np.arange(len(u)), k]
        if not np.all(np.isfinite(b)):
            raise Unbounded("section plane meets the cone in an unbounded set")
        sk = s[np.arange(len(u)), k]
        qk = q[k]
        grad = -(c[k] / sk**2)[:, None] * (qk - sk[:, None] * u)
        return b, grad

    return BField(theta=np.asarray(theta, dtype=float), evaluate=evaluate, j=cone.dim)


def _s2_grid(n_t):
    """Product rule on S^2: Gauss-Legendre in the polar angle, trapezoid in azimuth."""
    x, w = gauss_legendre(n_t)
    t = np.arccos(-x)  # polar angle; dt sin t = dx
    n_p = 2 * n_t
    p = 2.0 * math.pi * np.arange(n_p) / n_p
    T, P = np.meshgrid(t, p, indexing="ij")
    W = np.outer(w, np.full(n_p, 2.0 * math.pi / n_p))
    st, ct, sp, cp = np.sin(T), np.cos(T), np.sin(P), np.cos(P)
    u = np.stack([st * cp, st * sp, ct], axis=-1).reshape(-1, 3)
    e_t = np.stack([ct * cp, ct * sp, -st], axis=-1).reshape(-1, 3)
    e_p = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1).reshape(-1, 3)
    return u, e_t, e_p, W.ravel()


def check_gradient(field, n_points=64, h=1e-5, tol=1e-6):
    """Compare the supplied gradient with central differences at two step sizes.

    Points where the two differences disagree (kinks of ``b``) are skipped.
    """
    u, e_t, e_p, _ = _s2_grid(8)
    idx = np.linspace(0, len(u) - 1, min(n_points, len(u))).astype(int)
    u, e_t, e_p = u[idx], e_t[idx], e_p[idx]
    b0, grad = field.evaluate(u)
    for e in (e_t, e_p):
        fd = []
        for step in (h, 0.5 * h):
            up = u + step * e
            um = u - step * e
            up /= np.linalg.norm(up, axis=1, keepdims=True)
            um /= np.linalg.norm(um, axis=1, keepdims=True)
            fd.append((field.evaluate(up)[0] - field.evaluate(um)[0]) / (2 * step))
        smooth = np.abs(fd[0] - fd[1]) <= tol * np.maximum(1.0, np.abs(fd[1]))
        given = np.einsum("ij,ij->i", grad, e)
        err = np.abs(given - fd[1])
        bad = smooth & (err > tol * np.maximum(1.0, np.abs(fd[1])))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise InconsistentGradient(
                f"gradient mismatch at sample {idx[i]}: given {given[i]:.6g}, "
                f"finite difference {fd[1][i]:.6g}")


def field_ratio(field, tol=1e-8, levels=(16, 32, 64, 128, 256)):
    """``(ratio, sup Sigma^2)`` for one sampler, refining the grid until the
    ratio ``int b^(j-1) Sigma / int b^(j-1)`` settles to ``tol``."""
    if field.j != 4:
        raise ValidationError("sphere quadrature is implemented for co-dimension 4")
    prev = None
    for n_t in levels:
        u, e_t, e_p, w = _s2_grid(n_t)
        b, grad = field.evaluate(u)
        if np.any(b <= 0):
            raise DomainError("b must be positive on the sphere")
        g2 = np.column_stack([np.einsum("ij,ij->i", grad, e_t),
                              np.einsum("ij,ij->i", grad, e_p)])
        S = big_sigma(b, g2)
        bj = b ** (field.j - 1)
        ratio = float(np.dot(w, bj * S) / np.dot(w, bj))
        sup2 = float(np.max(S) ** 2)
        if prev is not None and abs(ratio - prev) <= tol * abs(ratio):
            return ratio, sup2
        prev = ratio
    raise QuadratureFailure(f"sphere quadrature did not settle to {tol:g}")


def bounds_codim_j(fields, tol=1e-8, check=True):
    """Bounds from samplers at one or more axes (sup / inf over the axes supplied)."""
    fields = list(fields)
    if not fields:
        raise ValueError("need at least one sampler")
    lows, ups = [], []
    for f in fields:
        if check:
            check_gradient(f)
        ratio, sup2 = field_ratio(f, tol)
        lows.append(ratio * ratio)
        ups.append(sup2)
    il = int(np.argmax(lows))
    iu = int(np.argmin(ups))
    return ConeBounds.build(lower=lows[il], upper=ups[iu], theta_lower=fields[il].theta,
                            theta_upper=fields[iu].theta, a_opt=math.sqrt(lows[il]))


def chebyshev_axis(cone):
    """Unit axis maximising ``min_i theta . n_i`` (any dimension)."""
    n = cone.normals
    x0, *_ = np.linalg.lstsq(n, np.ones(len(n)), rcond=None)
    res = minimize(lambda x: x @ x, x0, jac=lambda x: 2 * x, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": lambda x: n @ x - 1.0,
                                 "jac": lambda x: n}],
                   options={"ftol": 1e-15, "maxiter": 500})
    x = res.x
    return x / np.linalg.norm(x)


# ---------------------------------------------------------------------------
# dispatch and the domain constant

@dataclass(frozen=True)
class CornerValue:
    value: float
    lower: float
    upper: float

    @property
    def exact(self):
        return self.upper - self.lower <= EXACT_RTOL * self.upper


def _planar_half_angle(normals2d):
    ang = np.sort(np.mod(np.arctan2(normals2d[:, 1], normals2d[:, 0]), 2 * math.pi))
    gaps = np.diff(np.r_[ang, ang[0] + 2 * math.pi])
    spread = 2 * math.pi - gaps.max()
    return 0.5 * (math.pi - spread)


def cone_constant(cone, n_starts=8):
    """Corner constant of a polyhedral model cone, exact or as a bracket.

    The rank of the normals is the co-dimension of the singularity: rank 1
    is a half-space, rank 2 a wedge, higher ranks use the section bounds in
    the span of the normals.
    """
    n = cone.normals
    _, s, vt = np.linalg.svd(n)
    r = int(np.sum(s > 1e-10 * s[0]))
    if r == 1:
        return CornerValue(1.0, 1.0, 1.0)
    span = vt[:r]
    proj = n @ span.T
    proj /= np.linalg.norm(proj, axis=1, keepdims=True)
    if r == 2:
        v = c2d(_planar_half_angle(proj))
        return CornerValue(v, v, v)
    reduced = PolyhedralCone(r, proj)
    if r == 3:
        bnd = bounds_codim3(reduced, n_starts=n_starts)
    else:
        bnd = bounds_codim_j([cone_b_field(reduced, chebyshev_axis(reduced))])
    return CornerValue(bnd.midpoint, bnd.lower, bnd.upper)


def corner_value(desc):
    kind = desc.kind
    if kind in ("smooth-point", "half-space-containing"):
        return CornerValue(1.0, 1.0, 1.0)
    if kind in ("planar-angle", "wedge"):
        v = c2d(desc.alpha)
        return CornerValue(v, v, v)
    return cone_constant(desc.cone)


@dataclass(frozen=True)
class CornerContribution:
    label: str
    kind: str
    weight: float
    corner: CornerValue
    value: float  # weight^2 * C_y (headline)


@dataclass(frozen=True)
class DomainConstant:
    value: float
    index: int
    contributions: list = field(repr=False)

    @property
    def attained_by(self):
        return self.contributions[self.index]

    @property
    def bracket(self):
        c = self.attained_by
        w2 = c.weight ** 2
        return w2 * c.corner.lower, w2 * c.corner.upper


def domain_constant(corners):
    """``sup G(y)^2 C_y`` over corners with positive weight and the index attaining it.

    Cones without an exact constant enter through the midpoint of their
    bracket. Ties go to the first corner within a relative 1e-12.
    """
    corners = list(corners)
    if not any(c.weight > 0 for c in corners):
        raise NoPositiveWeight("no corner carries a positive boundary weight")
    contribs = []
    for c in corners:
        if c.weight > 0:
            cv = corner_value(c)
            contribs.append(CornerContribution(c.label, c.kind, c.weight, cv,
                                               c.weight ** 2 * cv.value))
        else:
            contribs.append(CornerContribution(c.label, c.kind, c.weight,
                                               CornerValue(math.nan, math.nan, math.nan),
                                               -math.inf))
    vals = np.array([c.value for c in contribs])
    best = float(vals.max())
    index = int(np.nonzero(vals >= best * (1 - 1e-12))[0][0])
    return DomainConstant(value=best, index=index, contributions=contribs)


def polygon_constant(polygon):
    return domain_constant(polygon.corners())
