"""Linear finite elements for the principal Robin eigenvalue on polygons.

The discrete problem is ``(A - gamma B) u = lambda M u`` with ``A`` the
stiffness matrix, ``M`` the mass matrix and ``B`` the boundary mass matrix
weighted by ``G``. The lowest eigenvalue is found by shift-and-invert
subspace iteration around a shift certified (by the inertia of a symmetric
factorisation) to lie below the whole spectrum.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import triangle

from .corner_constants import polygon_constant
from .errors import (FactorizationFailure, MeshFailure, NoConvergence,
                     ValidationError)
from .geometry import PlanarPolygon

LAYER_FACTOR = 0.2  # boundary element size times gamma
LAYER_DEPTH = 3.0   # graded zone depth times 1/gamma


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_weight: np.ndarray
    boundary_parent: np.ndarray
    h_max: float
    h_boundary: float
    c_omega: Optional[float] = None

    @property
    def dof(self):
        return len(self.nodes)

    def edge_lengths(self):
        p = self.nodes[self.triangles]
        return np.linalg.norm(p[:, [1, 2, 0]] - p, axis=2)

    def areas(self):
        p = self.nodes[self.triangles]
        a, b = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])

    def min_angle(self):
        """Smallest interior angle over all triangles, in degrees."""
        L = self.edge_lengths()
        a, b, c = L[:, 1], L[:, 2], L[:, 0]  # a opposite vertex 0, etc.
        cosines = np.stack([(b**2 + c**2 - a**2) / (2 * b * c),
                            (c**2 + a**2 - b**2) / (2 * c * a),
                            (a**2 + b**2 - c**2) / (2 * a * b)])
        return float(np.degrees(np.arccos(np.clip(cosines, -1, 1))).min())


def check_mesh(mesh):
    """Raise ``MeshFailure`` if the mesh is not a conforming, positively
    oriented triangulation whose boundary edges are exactly its free edges."""
    if np.any(mesh.areas() <= 0):
        raise MeshFailure("mesh has degenerate or clockwise triangles")
    t = mesh.triangles
    edges = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshFailure("an edge is shared by more than two triangles")
    free = {tuple(e) for e in uniq[counts == 1]}
    bnd = {tuple(e) for e in np.sort(mesh.boundary_edges, axis=1)}
    if free != bnd:
        raise MeshFailure("boundary edges do not match the free edges of the mesh "
                          "(hanging nodes or missing boundary)")


def _point_segment_distance(pts, a, b):
    ab = b - a
    t = np.clip(((pts - a) @ ab) / (ab @ ab), 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.linalg.norm(pts - proj, axis=1)


def boundary_distance(polygon, pts):
    pts = np.atleast_2d(pts)
    return np.min([_point_segment_distance(pts, *polygon.edge(k)) for k in range(polygon.n)],
                  axis=0)


def _as_polygon(polygon):
    if isinstance(polygon, PlanarPolygon):
        return polygon
    try:
        return PlanarPolygon.from_points(polygon)
    except ValidationError as exc:
        raise MeshFailure(f"invalid polygon: {exc}", vertex=getattr(exc, "vertex", None)) from exc


def _pslg(polygon, edge_h):
    """Polygon boundary split into segments no longer than ``edge_h``,
    with a vertex at every weight sample."""
    pts, segs, marks, params = [], [], [], []
    for k in range(polygon.n):
        a, b = polygon.edge(k)
        length = float(np.linalg.norm(b - a))
        n_sub = max(1, int(math.ceil(length / edge_h - 1e-9)))
        ts = np.unique(np.r_[np.linspace(0.0, 1.0, n_sub + 1), polygon.weight_knots(k)])
        for t in ts[:-1]:
            pts.append(a + t * (b - a))
            params.append((k, t))
    n = len(pts)
    for i in range(n):
        segs.append((i, (i + 1) % n))
        marks.append(params[i][0] + 1)
    return np.array(pts), np.array(segs), np.array(marks)


def mesh_polygon(polygon, h, boundary_layer=None, min_angle=20.0, max_passes=30):
    """Quality triangulation of a polygon.

    Interior triangles have edges up to ``h``. With ``boundary_layer = gamma``
    the zone within ``3 / gamma`` of the boundary is refined until every
    triangle touching it has edges no longer than ``min(h, 0.2 / gamma)``.
    """
    polygon = _as_polygon(polygon)
    if not h > 0:
        raise ValueError("mesh size must be positive")
    h_b = h if not boundary_layer else min(h, LAYER_FACTOR / boundary_layer)
    depth = 0.0 if not boundary_layer else LAYER_DEPTH / boundary_layer
    verts, segs, marks = _pslg(polygon, h_b)
    area = math.sqrt(3) / 4 * h * h
    try:
        tri = triangle.triangulate({"vertices": verts, "segments": segs,
                                    "segment_markers": marks[:, None]},
                                   f"pq{min_angle}a{area:.17g}")
        for _ in range(max_passes):
            nodes, cells = tri["vertices"], tri["triangles"]
            p = nodes[cells]
            longest = np.linalg.norm(p[:, [1, 2, 0]] - p, axis=2).max(axis=1)
            dist = boundary_distance(polygon, nodes)[cells].min(axis=1)
            target = np.where(dist <= depth, h_b, h)
            bad = longest > target * (1 + 1e-12)
            if not bad.any():
                break
            e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
            areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
            max_area = np.where(bad, np.sqrt(3) / 4 * target**2 * 0.8, -1.0)
            max_area = np.where(bad, np.minimum(max_area, 0.5 * areas), max_area)
            tri = triangle.triangulate({**tri, "triangle_max_area": max_area},
                                       f"rpq{min_angle}a")
        else:
            raise MeshFailure("boundary-layer refinement did not converge")
    except (RuntimeError, ValueError) as exc:
        raise MeshFailure(f"triangulation failed: {exc}") from exc

    nodes = np.asarray(tri["vertices"], dtype=float)
    cells = np.asarray(tri["triangles"], dtype=np.int64)
    seg = np.asarray(tri["segments"], dtype=np.int64)
    parent = np.asarray(tri["segment_markers"], dtype=np.int64).ravel() - 1
    if np.any(parent < 0):
        raise MeshFailure("a boundary segment lost its parent edge marker")
    weights = np.empty(len(seg))
    for i, (e, k) in enumerate(zip(seg, parent)):
        a, b = polygon.edge(k)
        mid = 0.5 * (nodes[e[0]] + nodes[e[1]])
        t = float(np.dot(mid - a, b - a) / np.dot(b - a, b - a))
        weights[i] = polygon.weight_on_edge(k, t)
    p = nodes[cells]
    lengths = np.linalg.norm(p[:, [1, 2, 0]] - p, axis=2).max(axis=1)
    if depth > 0:
        near = boundary_distance(polygon, nodes)[cells].min(axis=1) <= depth
    else:
        near = np.zeros(len(cells), dtype=bool)
        near[np.unique(np.nonzero(np.isin(cells, seg))[0])] = True
    mesh = Mesh(nodes=nodes, triangles=cells, boundary_edges=seg, boundary_weight=weights,
                boundary_parent=parent, h_max=float(lengths.max()),
                h_boundary=float(lengths[near].max()),
                c_omega=polygon_constant(polygon).value)
    check_mesh(mesh)
    return mesh


def refine_uniform(mesh):
    """Split every triangle into four through its edge midpoints (nested mesh).

    Boundary child edges inherit the weight of their parent edge, so the
    discrete spaces are nested and the boundary form is unchanged.
    """
    t = mesh.triangles
    edges = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    inv = inv.ravel()
    n0 = len(mesh.nodes)
    mids = 0.5 * (mesh.nodes[uniq[:, 0]] + mesh.nodes[uniq[:, 1]])
    nodes = np.vstack([mesh.nodes, mids])
    nt = len(t)
    m01, m12, m20 = (n0 + inv[:nt], n0 + inv[nt:2 * nt], n0 + inv[2 * nt:])
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    cells = np.concatenate([np.column_stack([a, m01, m20]), np.column_stack([m01, b, m12]),
                            np.column_stack([m20, m12, c]), np.column_stack([m01, m12, m20])])
    lookup = {tuple(e): n0 + i for i, e in enumerate(uniq)}
    new_edges, new_w, new_p = [], [], []
    for (i, j), g, par in zip(mesh.boundary_edges, mesh.boundary_weight, mesh.boundary_parent):
        m = lookup[(min(i, j), max(i, j))]
        new_edges += [(i, m), (m, j)]
        new_w += [g, g]
        new_p += [par, par]
    refined = Mesh(nodes=nodes, triangles=cells, boundary_edges=np.array(new_edges),
                   boundary_weight=np.array(new_w), boundary_parent=np.array(new_p),
                   h_max=0.5 * mesh.h_max, h_boundary=0.5 * mesh.h_boundary,
                   c_omega=mesh.c_omega)
    check_mesh(refined)
    return refined


# ---------------------------------------------------------------------------
# assembly

def assemble(mesh):
    """Return ``(A, M, B)`` as CSR matrices."""
    n = mesh.dof
    t = mesh.triangles
    p = mesh.nodes[t]
    area = mesh.areas()
    # gradients of the barycentric coordinates
    e = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    grads = np.stack([-e[..., 1], e[..., 0]], axis=-1) / (2 * area)[:, None, None]
    Ke = np.einsum("tid,tjd->tij", grads, grads) * area[:, None, None]
    Me = (np.ones((3, 3)) + np.eye(3))[None] * (area / 12.0)[:, None, None]
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    A = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((Me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    be = mesh.boundary_edges
    L = np.linalg.norm(mesh.nodes[be[:, 1]] - mesh.nodes[be[:, 0]], axis=1)
    Be = (np.ones((2, 2)) + np.eye(2))[None] * (mesh.boundary_weight * L / 6.0)[:, None, None]
    brow = np.repeat(be, 2, axis=1).ravel()
    bcol = np.tile(be, (1, 2)).ravel()
    B = sp.coo_matrix((Be.ravel(), (brow, bcol)), shape=(n, n)).tocsr()
    return A, M, B


# ---------------------------------------------------------------------------
# eigensolver

@dataclass(frozen=True)
class EigResult:
    lam: float
    residual: float
    iterations: int
    dof: int
    shift: float = math.nan
    vector: np.ndarray = field(default=None, repr=False)


def _symmetric_factor(K):
    """Sparse LU without off-diagonal pivoting; returns ``(factor, negative pivots)``."""
    try:
        lu = spla.splu(K.tocsc(), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                       options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise FactorizationFailure(str(exc)) from exc
    pivots = lu.U.diagonal()
    if not np.all(np.isfinite(pivots)) or np.any(pivots == 0):
        raise FactorizationFailure("zero or non-finite pivot")
    return lu, int(np.sum(pivots < 0))


def _start_block(nodes, k):
    x, y = nodes[:, 0], nodes[:, 1]
    x = (x - x.mean()) / (np.ptp(x) or 1.0)
    y = (y - y.mean()) / (np.ptp(y) or 1.0)
    cols = [np.ones_like(x), x, y, x * y, x * x, y * y, x * x * y, x * y * y,
            x**3, y**3, x * x * y * y, x**4, y**4]
    return np.column_stack(cols[:k])


def principal_eigenvalue(mesh, gamma, c_upper=None, block=8, tol=1e-10, res_tol=1e-8,
                         maxiter=200):
    """Lowest eigenvalue of ``(A - gamma B, M)`` by shift-and-invert subspace iteration.

    The shift starts at ``-c_upper gamma^2 - 1`` and is lowered until the
    factorisation of ``K - shift M`` has no negative pivots, which certifies
    that every eigenvalue lies above it.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    A, M, B = assemble(mesh)
    K = (A - gamma * B).tocsr()
    if c_upper is None:
        c_upper = mesh.c_omega if mesh.c_omega is not None else 1.0
    shift = -c_upper * gamma * gamma - 1.0
    for _ in range(60):
        lu, neg = _symmetric_factor(K - shift * M)
        if neg == 0:
            break
        shift -= max(1.0, abs(shift))
    else:
        raise FactorizationFailure("could not find a shift below the spectrum")

    X = _start_block(mesh.nodes, min(block, mesh.dof))
    lam_old = math.inf
    for it in range(1, maxiter + 1):
        Y = lu.solve(M @ X)
        Kr = Y.T @ (K @ Y)
        Mr = Y.T @ (M @ Y)
        Kr = 0.5 * (Kr + Kr.T)
        Mr = 0.5 * (Mr + Mr.T)
        try:
            w, V = la.eigh(Kr, Mr)
        except la.LinAlgError:
            # rank loss in the block: re-orthonormalise and retry
            Q, _ = np.linalg.qr(Y)
            Kr, Mr = Q.T @ (K @ Q), Q.T @ (M @ Q)
            w, V = la.eigh(0.5 * (Kr + Kr.T), 0.5 * (Mr + Mr.T))
            Y = Q
        X = Y @ V
        X /= np.sqrt(np.einsum("ij,ij->j", X, M @ X))
        lam = float(w[0])
        x = X[:, 0]
        Kx, Mx = K @ x, M @ x
        res = float(np.linalg.norm(Kx - lam * Mx) /
                    (np.linalg.norm(Kx) + max(abs(lam), 1.0) * np.linalg.norm(Mx)))
        if abs(lam - lam_old) <= tol * max(1.0, abs(lam)) and res <= res_tol:
            return EigResult(lam=lam, residual=res, iterations=it, dof=mesh.dof,
                             shift=shift, vector=x)
        lam_old = lam
    raise NoConvergence(f"subspace iteration did not converge in {maxiter} iterations",
                        iterations=maxiter)


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepResult:
    gammas: np.ndarray
    lambdas: np.ndarray
    dofs: np.ndarray
    residuals: np.ndarray
    c_omega: Optional[float] = None

    @property
    def ratios(self):
        return self.lambdas / self.gammas**2

    @property
    def c_est(self):
        """Richardson extrapolation of ``-Lambda/gamma^2`` under ``-C + c1/gamma``,
        from the two largest ``gamma``."""
        if len(self.gammas) < 2:
            return float(-self.ratios[-1])
        g1, g2 = self.gammas[-2:]
        r1, r2 = self.ratios[-2:]
        return float(-(g2 * r2 - g1 * r1) / (g2 - g1))

    def rows(self):
        for g, lam, r, d, res in zip(self.gammas, self.lambdas, self.ratios, self.dofs,
                                     self.residuals):
            yield float(g), float(lam), float(r), int(d), float(res)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gamma", "lambda", "ratio", "dof", "residual"])
            for row in self.rows():
                w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def solve_at(polygon, gamma, h=0.1, layer=True):
    mesh = mesh_polygon(polygon, h, boundary_layer=gamma if layer else None)
    return principal_eigenvalue(mesh, gamma)


def gamma_sweep(polygon, gammas, h=0.1, layer=True, workers=1):
    """Remesh (boundary layer graded to each ``gamma``) and solve for every ``gamma``."""
    polygon = _as_polygon(polygon)
    gammas = np.asarray(gammas, dtype=float)
    if gammas.size == 0:
        raise ValueError("empty gamma grid")
    if np.any(gammas <= 0) or np.any(np.diff(gammas) <= 0):
        raise ValueError("gamma values must be positive and increasing")

    def one(g):
        return solve_at(polygon, float(g), h=h, layer=layer)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, gammas))
    else:
        results = [one(g) for g in gammas]
    return SweepResult(gammas=gammas, lambdas=np.array([r.lam for r in results]),
                       dofs=np.array([r.dof for r in results]),
                       residuals=np.array([r.residual for r in results]),
                       c_omega=polygon_constant(polygon).value)


# ---------------------------------------------------------------------------
# mesh interchange

def write_mesh(mesh, path):
    with open(path, "w") as fh:
        fh.write(f"{len(mesh.nodes)}\n")
        for x, y in mesh.nodes:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
        fh.write(f"{len(mesh.triangles)}\n")
        for i, j, k in mesh.triangles:
            fh.write(f"{i} {j} {k}\n")
        fh.write(f"{len(mesh.boundary_edges)}\n")
        for (i, j), g in zip(mesh.boundary_edges, mesh.boundary_weight):
            fh.write(f"{i} {j} {float(g)!r}\n")


def read_mesh(path):
    with open(path) as fh:
        tokens = fh.read().split()
    pos = 0

    def take(count, width, conv):
        nonlocal pos
        block = tokens[pos:pos + count * width]
        pos += count * width
        return np.array([conv(t) for t in block]).reshape(count, width)

    n = int(tokens[pos]); pos += 1
    nodes = take(n, 2, float)
    t = int(tokens[pos]); pos += 1
    cells = take(t, 3, int)
    e = int(tokens[pos]); pos += 1
    edge_block = take(e, 3, str)
    edges = edge_block[:, :2].astype(np.int64)
    weights = edge_block[:, 2].astype(float)
    p = nodes[cells]
    longest = np.linalg.norm(p[:, [1, 2, 0]] - p, axis=2).max(axis=1)
    on_bnd = np.isin(cells, edges).any(axis=1)
    mesh = Mesh(nodes=nodes, triangles=cells, boundary_edges=edges, boundary_weight=weights,
                boundary_parent=np.full(e, -1), h_max=float(longest.max()),
                h_boundary=float(longest[on_bnd].max()))
    check_mesh(mesh)
    return mesh
