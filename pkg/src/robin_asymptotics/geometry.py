"""Domains, model cones and the section profile ``b_theta(phi)``.

A polyhedral cone ``{z : n_i . z >= 0}`` is cut by the plane through the unit
axis ``theta`` orthogonal to it. In polar coordinates ``(rho, phi)`` centred
at ``theta`` the section is the star-shaped polygon ``rho < b(phi)``; on the
arc where face ``i`` is active,

    b(phi) = d_i / cos(phi - phi_i),

with ``d_i`` the in-plane distance from ``theta`` to that face and ``phi_i``
the direction of the foot of the perpendicular.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, QhullError

from .errors import (NoPositiveWeight, NotInterior, OptimizationFailed,
                     Unbounded, ValidationError)

ADMISSIBLE_TOL = 1e-9
TWO_PI = 2.0 * math.pi

CORNER_KINDS = ("smooth-point", "planar-angle", "wedge", "polyhedral-cone",
                "half-space-containing")


# ---------------------------------------------------------------------------
# planar polygons

def _segments_intersect(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_segment(a, b, c):
        return (min(a[0], b[0]) - 1e-14 <= c[0] <= max(a[0], b[0]) + 1e-14
                and min(a[1], b[1]) - 1e-14 <= c[1] <= max(a[1], b[1]) + 1e-14)

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True
    return ((d1 == 0 and on_segment(q1, q2, p1)) or (d2 == 0 and on_segment(q1, q2, p2))
            or (d3 == 0 and on_segment(p1, p2, q1)) or (d4 == 0 and on_segment(p1, p2, q2)))


def signed_area(vertices):
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class PlanarPolygon:
    """Counterclockwise simple polygon with a boundary weight ``G``.

    ``weight[k]`` holds samples of ``G`` on edge ``k`` (from vertex ``k`` to
    ``k+1``), equally spaced and including both endpoints; ``G`` is linear
    between samples. A single sample means ``G`` is constant on that edge.
    """

    vertices: np.ndarray
    weight: tuple = None

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValidationError("vertices must be an (n, 2) array")
        n = len(v)
        if n < 3:
            raise ValidationError("a polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValidationError("vertex coordinates must be finite")
        for k in range(n):
            if np.allclose(v[k], v[(k + 1) % n], rtol=0, atol=1e-14):
                raise ValidationError(f"consecutive vertices {k} and {(k + 1) % n} coincide",
                                      vertex=k)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                    raise ValidationError(f"edges {i} and {j} intersect; polygon is not simple",
                                          vertex=j)
        if signed_area(v) <= 0:
            raise ValidationError("vertices must be ordered counterclockwise")
        w = self.weight
        if w is None:
            w = [1.0] * n
        if len(w) != n:
            raise ValidationError(f"expected {n} edge weights, got {len(w)}")
        samples = []
        for k, g in enumerate(w):
            arr = np.atleast_1d(np.asarray(g, dtype=float))
            if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
                raise ValidationError(f"weight samples on edge {k} are invalid")
            arr.setflags(write=False)
            samples.append(arr)
        if max(float(s.max()) for s in samples) <= 0:
            raise NoPositiveWeight("the boundary weight must be positive somewhere")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "weight", tuple(samples))

    @classmethod
    def from_points(cls, vertices, weight=None):
        """Build a polygon, reversing the vertex order if it is clockwise."""
        v = np.asarray(vertices, dtype=float)
        if len(v) >= 3 and signed_area(v) < 0:
            # reversing the loop maps edge k to edge n-2-k (mod n), read backwards
            n = len(v)
            v = v[::-1]
            if weight is not None:
                weight = [np.atleast_1d(np.asarray(weight[(n - 2 - k) % n], dtype=float))[::-1]
                          for k in range(n)]
        return cls(v, weight)

    @property
    def n(self):
        return len(self.vertices)

    def edge(self, k):
        return self.vertices[k], self.vertices[(k + 1) % self.n]

    @property
    def area(self):
        return signed_area(self.vertices)

    @property
    def perimeter(self):
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    def half_angles(self):
        """Inner half-angles at each vertex (radians, in ``(0, pi)``)."""
        v = self.vertices
        prev = np.roll(v, 1, axis=0) - v
        nxt = np.roll(v, -1, axis=0) - v
        # interior angle measured counterclockwise from the outgoing edge to the incoming one
        ang = np.arctan2(nxt[:, 0] * prev[:, 1] - nxt[:, 1] * prev[:, 0],
                         np.einsum("ij,ij->i", nxt, prev))
        ang = np.mod(ang, TWO_PI)
        return 0.5 * ang

    def weight_on_edge(self, k, t):
        """``G`` at fraction ``t`` in ``[0, 1]`` along edge ``k``."""
        s = self.weight[k]
        if s.size == 1:
            return np.full_like(np.asarray(t, dtype=float), s[0])
        return np.interp(t, np.linspace(0.0, 1.0, s.size), s)

    def vertex_weight(self, k):
        """``G`` at vertex ``k``; the larger one-sided value if ``G`` jumps there."""
        incoming = self.weight[(k - 1) % self.n][-1]
        outgoing = self.weight[k][0]
        return float(max(incoming, outgoing))

    def edge_sup_weight(self, k):
        return float(self.weight[k].max())

    def weight_knots(self, k):
        """Interior sample positions (fractions) on edge ``k``."""
        s = self.weight[k]
        if s.size <= 2:
            return np.empty(0)
        return np.linspace(0.0, 1.0, s.size)[1:-1]

    def corners(self):
        """Corner descriptors: one per vertex, then one smooth point per edge."""
        out = []
        for k, alpha in enumerate(self.half_angles()):
            w = self.vertex_weight(k)
            if abs(alpha - 0.5 * math.pi) < 1e-12:
                out.append(CornerDescriptor("smooth-point", weight=w, label=f"vertex {k}"))
            else:
                out.append(CornerDescriptor("planar-angle", alpha=float(alpha), weight=w,
                                            label=f"vertex {k}"))
        for k in range(self.n):
            out.append(CornerDescriptor("smooth-point", weight=self.edge_sup_weight(k),
                                        label=f"edge {k}"))
        return out

    def to_json(self):
        return {"polygon": {"vertices": self.vertices.tolist(),
                            "weight": [float(s[0]) if s.size == 1 else s.tolist()
                                       for s in self.weight]}}

    # standard shapes -------------------------------------------------------

    @classmethod
    def rectangle(cls, width=1.0, height=1.0, weight=None):
        return cls([[0, 0], [width, 0], [width, height], [0, height]], weight)

    @classmethod
    def unit_square(cls, weight=None):
        return cls.rectangle(1.0, 1.0, weight)

    @classmethod
    def regular(cls, n, radius=1.0):
        t = TWO_PI * np.arange(n) / n
        return cls(radius * np.column_stack([np.cos(t), np.sin(t)]))

    @classmethod
    def equilateral_triangle(cls, side=1.0):
        return cls([[0, 0], [side, 0], [0.5 * side, 0.5 * math.sqrt(3) * side]])

    @classmethod
    def l_shape(cls):
        """``[0,2]^2`` minus ``[1,2]^2``: five right corners, one reentrant."""
        return cls([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])


@dataclass(frozen=True)
class CornerDescriptor:
    """Local model of the boundary at a point.

    ``alpha`` is the half-angle for ``planar-angle`` and ``wedge``; ``cone``
    is the model cone for ``polyhedral-cone``; ``dim`` is the ambient
    dimension of a wedge.
    """

    kind: str
    alpha: Optional[float] = None
    dim: Optional[int] = None
    cone: Optional["PolyhedralCone"] = None
    weight: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in CORNER_KINDS:
            raise ValidationError(f"unknown corner kind {self.kind!r}")
        if not math.isfinite(self.weight):
            raise ValidationError("corner weight must be finite")
        if self.kind in ("planar-angle", "wedge"):
            if self.alpha is None:
                raise ValidationError(f"{self.kind} needs a half-angle alpha")
        if self.kind == "polyhedral-cone" and self.cone is None:
            raise ValidationError("polyhedral-cone descriptor needs a cone")


# ---------------------------------------------------------------------------
# cones

def orthonormal_complement(theta):
    """Deterministic orthonormal basis (rows) of the hyperplane orthogonal to ``theta``."""
    theta = np.asarray(theta, dtype=float)
    j = theta.size
    if j == 3:
        return _complement3(theta)
    basis = []
    # seed with coordinate axes, least aligned with theta first
    order = np.lexsort((np.arange(j), np.abs(theta)))
    for k in order:
        e = np.zeros(j)
        e[k] = 1.0
        v = e - np.dot(e, theta) * theta
        for b in basis:
            v -= np.dot(v, b) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == j - 1:
            break
    return np.array(basis)


def _complement3(theta):
    # right-handed (e1, e2, theta); e1 from the axis least aligned with theta
    x, y, z = (float(t) for t in theta)
    a = (abs(x), abs(y), abs(z))
    k = a.index(min(a))
    e = [0.0, 0.0, 0.0]
    e[k] = 1.0
    t = (x, y, z)[k]
    v0, v1, v2 = e[0] - t * x, e[1] - t * y, e[2] - t * z
    nv = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
    v0, v1, v2 = v0 / nv, v1 / nv, v2 / nv
    return np.array([[v0, v1, v2],
                     [y * v2 - z * v1, z * v0 - x * v2, x * v1 - y * v0]])


@dataclass(frozen=True)
class PolyhedralCone:
    """Convex cone ``{z in R^dim : n_i . z >= 0}`` given by inward unit normals."""

    dim: int
    normals: np.ndarray

    def __post_init__(self):
        n = np.array(self.normals, dtype=float)
        if n.ndim != 2 or n.shape[1] != self.dim:
            raise ValidationError(f"normals must have shape (k, {self.dim})")
        if self.dim < 2 or len(n) == 0:
            raise ValidationError("a cone needs dim >= 2 and at least one face")
        norms = np.linalg.norm(n, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValidationError("face normals must have unit length (tol 1e-12)")
        # non-empty interior: some z with n_i . z > 0 for every face
        k = len(n)
        res = linprog(c=np.r_[np.zeros(self.dim), -1.0],
                      A_ub=np.hstack([-n, np.ones((k, 1))]), b_ub=np.zeros(k),
                      bounds=[(-1, 1)] * self.dim + [(None, 1)], method="highs")
        if res.status != 0 or -res.fun <= 1e-12:
            raise ValidationError("cone has empty interior")
        n.setflags(write=False)
        object.__setattr__(self, "normals", n)

    @classmethod
    def from_normals(cls, normals):
        """Build from not-necessarily-normalised normals."""
        n = np.asarray(normals, dtype=float)
        n = n / np.linalg.norm(n, axis=1, keepdims=True)
        return cls(n.shape[1], n)

    @classmethod
    def orthant(cls, dim=3):
        return cls(dim, np.eye(dim))

    @classmethod
    def circular_surrogate(cls, half_angle, faces=256):
        """Cone around ``e_3`` whose faces are tangent to the circular cone of
        the given half-angle; its section is a regular polygon with incircle
        radius ``tan(half_angle)``."""
        t = TWO_PI * np.arange(faces) / faces
        c, s = math.cos(half_angle), math.sin(half_angle)
        normals = np.column_stack([-c * np.cos(t), -c * np.sin(t), np.full(faces, s)])
        return cls(3, normals)

    @property
    def is_pointed(self):
        """True when the closure of the cross-section lies in an open hemisphere."""
        return np.linalg.matrix_rank(self.normals, tol=1e-10) == self.dim

    def is_admissible(self, theta):
        return bool(np.all(self.normals @ theta >= ADMISSIBLE_TOL))

    def rotated(self, q):
        return PolyhedralCone(self.dim, self.normals @ np.asarray(q).T)

    def to_json(self):
        return {"cone": {"dim": self.dim, "normals": self.normals.tolist()}}


@dataclass(frozen=True)
class SectionProfile:
    """Piecewise description of ``b_theta`` on ``[0, 2 pi)``.

    Arc ``k`` covers ``[starts[k], ends[k])``, belongs to face
    ``faces[k]`` and carries ``b = d[k] / cos(phi - phi_foot[k])``.
    ``frame`` rows are ``e1, e2``; ``phi`` is measured from ``e1`` to ``e2``.
    """

    theta: np.ndarray
    frame: np.ndarray
    starts: np.ndarray
    ends: np.ndarray
    d: np.ndarray
    phi_foot: np.ndarray
    faces: np.ndarray

    def _arc_index(self, phi):
        phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
        idx = np.searchsorted(self.starts, phi, side="right") - 1
        return phi, np.clip(idx, 0, len(self.starts) - 1)

    def b(self, phi):
        phi, k = self._arc_index(phi)
        return self.d[k] / np.cos(phi - self.phi_foot[k])

    def db(self, phi):
        phi, k = self._arc_index(phi)
        c = np.cos(phi - self.phi_foot[k])
        return self.d[k] * np.sin(phi - self.phi_foot[k]) / (c * c)

    @property
    def face_distances(self):
        """``{face index: d}`` for every face touching the section."""
        return {int(f): float(dd) for f, dd in zip(self.faces, self.d)}

    def point(self, phi):
        """Boundary point of the section (in R^3) at angle ``phi``, with ``xi = 1``."""
        phi = np.asarray(phi, dtype=float)
        u = np.cos(phi)[..., None] * self.frame[0] + np.sin(phi)[..., None] * self.frame[1]
        return self.theta + self.b(phi)[..., None] * u


def section_lines(cone, theta, frame=None):
    """In-plane half-plane data ``q_i . eta <= c_i`` for every face.

    Returns ``(frame, q, c)`` with ``q`` of shape ``(k, dim - 1)``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (cone.dim,):
        raise ValidationError(f"theta must be a vector in R^{cone.dim}")
    nt = np.linalg.norm(theta)
    if abs(nt - 1.0) > 1e-9:
        raise ValidationError("theta must be a unit vector")
    c = cone.normals @ theta
    if np.any(c < ADMISSIBLE_TOL):
        bad = int(np.argmin(c))
        raise NotInterior(f"theta is not strictly inside the cone (face {bad}: theta.n = {c[bad]:.3g})")
    if frame is None:
        frame = orthonormal_complement(theta)
    q = -(cone.normals @ frame.T)
    return frame, q, c


def section_profile(cone, theta):
    """Section profile of a 3-dimensional cone about the axis ``theta``."""
    if cone.dim != 3:
        raise ValidationError("section_profile is defined for cones in R^3")
    theta = np.asarray(theta, dtype=float)
    frame, q, c = section_lines(cone, theta)
    qn = np.linalg.norm(q, axis=1)
    live = qn > 1e-14
    idx = np.nonzero(live)[0]
    if idx.size < 3:
        raise Unbounded("fewer than three faces cut the section plane")
    # the section is the polar dual of conv{q_i / c_i}
    pts = q[idx] / c[idx, None]
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise Unbounded(f"section is unbounded ({exc.__class__.__name__})") from None
    # origin strictly inside the dual hull <=> bounded section
    if np.any(hull.equations[:, 2] >= -1e-12 * np.max(np.abs(pts))):
        raise Unbounded("section plane meets the cone in an unbounded set")
    active = idx[hull.vertices]  # counterclockwise
    m = len(active)
    # polygon corners: q_i . eta = c_i and q_k . eta = c_k for consecutive faces
    i, k = active, np.roll(active, -1)
    det = q[i, 0] * q[k, 1] - q[i, 1] * q[k, 0]
    corners = np.column_stack([(c[i] * q[k, 1] - c[k] * q[i, 1]) / det,
                               (q[i, 0] * c[k] - q[k, 0] * c[i]) / det])
    corner_ang = np.mod(np.arctan2(corners[:, 1], corners[:, 0]), TWO_PI)
    starts, ends, faces = [], [], []
    for a in range(m):
        s = corner_ang[a - 1]
        e = corner_ang[a]
        if e <= s:
            e += TWO_PI
        starts.append(s)
        ends.append(e)
        faces.append(active[a])
    # split the arc that wraps through phi = 0
    arcs = []
    for s, e, f in zip(starts, ends, faces):
        if e > TWO_PI:
            arcs.append((0.0, e - TWO_PI, f))
            arcs.append((s, TWO_PI, f))
        else:
            arcs.append((s, e, f))
    arcs = [a for a in arcs if a[1] - a[0] > 0]
    arcs.sort(key=lambda a: a[0])
    starts = np.array([a[0] for a in arcs])
    ends = np.array([a[1] for a in arcs])
    faces = np.array([a[2] for a in arcs], dtype=int)
    d = c[faces] / qn[faces]
    phi_foot = np.mod(np.arctan2(q[faces, 1], q[faces, 0]), TWO_PI)
    for arr in (starts, ends, d, phi_foot, faces, frame):
        arr.setflags(write=False)
    return SectionProfile(theta=theta, frame=frame, starts=starts, ends=ends, d=d,
                          phi_foot=phi_foot, faces=faces)


# ---------------------------------------------------------------------------
# direction maximising the smallest face distance

@dataclass(frozen=True)
class CenterDirection:
    theta: np.ndarray
    d: float
    inscribed: bool
    profile: SectionProfile = field(repr=False, default=None)


def _min_distance(cone, theta):
    """Smallest face distance, or ``-inf`` if ``theta`` is inadmissible."""
    c = cone.normals @ theta
    if np.any(c < ADMISSIBLE_TOL):
        return -math.inf
    q = -(cone.normals @ orthonormal_complement(theta).T)
    qn = np.hypot(q[:, 0], q[:, 1])
    live = qn > 1e-14
    # bounded section <=> face directions leave no angular gap of pi or more
    ang = np.sort(np.arctan2(q[live, 1], q[live, 0]))
    if ang.size < 3:
        return -math.inf
    gaps = np.diff(np.r_[ang, ang[0] + TWO_PI])
    if gaps.max() >= math.pi - 1e-12:
        return -math.inf
    return float(np.min(c[live] / qn[live]))


def _candidate_starts(cone):
    n = cone.normals
    cands = []
    x, *_ = np.linalg.lstsq(n, np.ones(len(n)), rcond=None)
    cands.append(x)
    cands.append(n.sum(axis=0))
    for k in range(cone.dim):
        e = np.zeros(cone.dim)
        e[k] = 1.0
        cands.extend([e, -e])
    out = []
    for v in cands:
        nv = np.linalg.norm(v)
        if nv > 1e-12:
            v = v / nv
            if cone.is_admissible(v):
                out.append(v)
    return out


def sphere_chart(center):
    """Gnomonic chart ``(u, v) -> unit vector`` centred at ``center``."""
    center = np.asarray(center, dtype=float)
    f = orthonormal_complement(center)

    def to_sphere(uv):
        w = center + uv[0] * f[0] + uv[1] * f[1]
        return w / np.linalg.norm(w)

    def from_sphere(theta):
        t = np.dot(theta, center)
        return np.array([np.dot(theta, f[0]), np.dot(theta, f[1])]) / t

    return to_sphere, from_sphere


def multistart_nelder_mead(objective, starts, to_sphere, from_sphere, n_starts=8,
                           spread=0.05, xatol=1e-10, fatol=1e-14, maxfev=3000):
    """Minimise ``objective(theta)`` over a sphere chart from deterministic starts.

    Returns the list of ``(value, theta)`` for each start, in start order.
    """
    seeds = [from_sphere(s) for s in starts]
    base = seeds[0]
    k = 0
    while len(seeds) < n_starts:
        ang = TWO_PI * k / n_starts
        seeds.append(base + 0.25 * np.array([math.cos(ang), math.sin(ang)]))
        k += 1
    seeds = seeds[:n_starts]

    def f(uv):
        return objective(to_sphere(uv))

    results = []
    for s in seeds:
        if not math.isfinite(f(s)):
            continue
        simplex = np.array([s, s + [spread, 0.0], s + [0.0, spread]])
        res = minimize(f, s, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": xatol,
                                "fatol": fatol, "maxiter": maxfev, "maxfev": maxfev})
        results.append((float(res.fun), to_sphere(res.x)))
    return results


def _best(results):
    """Smallest value; near-ties broken by lexicographic theta."""
    finite = [r for r in results if math.isfinite(r[0])]
    if not finite:
        return None
    best = min(r[0] for r in finite)
    close = [r for r in finite if r[0] <= best + 1e-12 * max(1.0, abs(best))]
    return min(close, key=lambda r: tuple(np.round(r[1], 9)))


def _polish(cone, theta, value):
    """Refine a near-optimal direction by solving the active constraints exactly.

    Maximising ``min_i theta . n_i`` on the sphere is the convex problem
    ``min |x|^2  s.t.  N x >= 1`` with ``theta = x / |x|``; given a guess of
    the active faces its solution is the least-norm solution of ``N_A x = 1``.
    """
    t = cone.normals @ theta
    best_theta, best_val = theta, value
    for rel in (1e-2, 1e-4, 1e-6, 1e-8):
        active = t <= t.min() + rel * max(t.min(), 1e-12)
        x, *_ = np.linalg.lstsq(cone.normals[active], np.ones(int(active.sum())), rcond=None)
        if not np.all(cone.normals @ x >= 1.0 - 1e-12):
            continue
        cand = x / np.linalg.norm(x)
        val = _min_distance(cone, cand)
        if val >= best_val - 1e-14 * max(1.0, best_val):
            best_theta, best_val = cand, val
    return best_theta, best_val


def max_min_distance_direction(cone, n_starts=8):
    """Axis ``theta`` maximising the smallest face distance ``min_i d_i(theta)``.

    The smallest distance controls the upper bound on the corner constant.
    The search runs Nelder-Mead on a gnomonic chart from ``n_starts``
    deterministic starting points and then snaps to the exact optimum of the
    active faces. ``inscribed`` is set when every face of the section sits
    at the same distance (within 1e-8), i.e. the section has an incircle
    centred at ``theta``.
    """
    if cone.dim != 3:
        raise ValidationError("max_min_distance_direction needs a cone in R^3")
    starts = _candidate_starts(cone)
    if not starts:
        raise OptimizationFailed("no admissible starting direction found")
    if not any(math.isfinite(_min_distance(cone, s)) for s in starts):
        # every admissible direction we tried gives an unbounded section
        section_profile(cone, starts[0])
    to_sphere, from_sphere = sphere_chart(starts[0])
    results = multistart_nelder_mead(lambda th: -_min_distance(cone, th),
                                     starts, to_sphere, from_sphere, n_starts)
    best = _best(results)
    if best is None:
        raise OptimizationFailed("no start produced a bounded section")
    theta, val = _polish(cone, best[1], -best[0])
    prof = section_profile(cone, theta)
    inscribed = bool(np.ptp(prof.d) <= 1e-8)
    return CenterDirection(theta=theta, d=float(prof.d.min()), inscribed=inscribed,
                           profile=prof)


# ---------------------------------------------------------------------------
# JSON domain files

def load_domain(source):
    """Read a polygon, cone or corner list from a JSON file path or dict."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            data = json.load(fh)
    else:
        data = source
    if "polygon" in data:
        p = data["polygon"]
        return PlanarPolygon.from_points(p["vertices"], p.get("weight"))
    if "cone" in data:
        c = data["cone"]
        normals = np.asarray(c["normals"], dtype=float)
        if normals.ndim != 2 or normals.shape[1] != int(c["dim"]):
            raise ValidationError("cone normals do not match the stated dimension")
        return PolyhedralCone(int(c["dim"]), normals)
    if "corners" in data:
        return [corner_from_json(c) for c in data["corners"]]
    raise ValidationError("domain file needs a 'polygon', 'cone' or 'corners' entry")


def corner_from_json(entry):
    kind = entry["kind"]
    if kind == "cusp":
        raise ValidationError(
            "outward-pointing cusps have no corner constant: Lambda grows faster than gamma^2")
    cone = None
    if "cone" in entry:
        c = entry["cone"]
        cone = PolyhedralCone(int(c["dim"]), np.asarray(c["normals"], dtype=float))
    return CornerDescriptor(kind=kind, alpha=entry.get("alpha"), dim=entry.get("dim"),
                            cone=cone, weight=float(entry.get("weight", 1.0)),
                            label=entry.get("label", ""))


def save_domain(domain, path):
    with open(path, "w") as fh:
        json.dump(domain.to_json(), fh, indent=2)
