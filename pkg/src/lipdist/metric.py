"""Curves, curve integrals and weighted distances.

Curves are polylines. A polyline's length is exactly the supremum of
partition sums, so nothing is lost by not supporting general rectifiable
curves; smooth curves are represented by fine polylines.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ._validation import as_real, check_finite, check_point, check_points
from .exceptions import (
    ConvergenceError,
    EvaluationError,
    InvalidInputError,
    NearBoundaryError,
    NoPathError,
)

__all__ = [
    "norm",
    "distance",
    "Space",
    "PolylineCurve",
    "CurveFamily",
    "DistanceEstimate",
    "GridGraph",
    "curve_length",
    "curve_integral",
    "subcurve",
    "weighted_distance",
    "quasi_hyperbolic_distance",
    "segment_family",
]

NORM_KINDS = ("euclidean", "l1", "max")

#: point-on-curve tolerance relative to the curve length
ON_CURVE_RTOL = 1e-9


def norm(X, kind="euclidean"):
    """Norm along the last axis. Complex entries contribute their modulus."""
    A = np.abs(np.asarray(X))
    if kind == "euclidean":
        return np.sqrt(np.sum(A * A, axis=-1))
    if kind == "l1":
        return np.sum(A, axis=-1)
    if kind == "max":
        return np.max(A, axis=-1)
    raise InvalidInputError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")


def distance(x, y, kind="euclidean"):
    return norm(np.asarray(x) - np.asarray(y), kind)


@dataclass(frozen=True)
class Space:
    """A finite-dimensional normed coordinate space over R or C."""

    dim: int
    field: str = "real"
    norm_kind: str = "euclidean"

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError("dim must be >= 1")
        if self.field not in ("real", "complex"):
            raise InvalidInputError("field must be 'real' or 'complex'")
        if self.norm_kind not in NORM_KINDS:
            raise InvalidInputError(f"unknown norm kind {self.norm_kind!r}")

    def point(self, coords):
        x = check_point(coords, dim=self.dim)
        if self.field == "complex":
            return x.astype(complex)
        if np.iscomplexobj(x):
            raise InvalidInputError("complex coordinates given for a real space")
        return x

    def norm(self, x):
        return norm(x, self.norm_kind)

    def distance(self, x, y):
        return distance(x, y, self.norm_kind)


class PolylineCurve:
    """A curve given by an ordered list of vertices.

    Repeated consecutive vertices are dropped. If every vertex coincides the
    result is the trivial (constant) curve with a single vertex and length 0.
    """

    def __init__(self, vertices, norm_kind="euclidean"):
        V = np.asarray(vertices)
        if V.ndim != 2 or V.shape[0] < 2:
            raise InvalidInputError("a curve needs at least 2 vertices given as an (n, dim) array")
        V = check_points(V, name="vertices")
        keep = np.ones(len(V), dtype=bool)
        keep[1:] = np.any(V[1:] != V[:-1], axis=1)
        V = V[keep]
        V.setflags(write=False)
        self.vertices = V
        self.norm_kind = norm_kind
        seg = norm(np.diff(V, axis=0), norm_kind) if len(V) > 1 else np.zeros(0)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        cum.setflags(write=False)
        self.segment_lengths = seg
        self.cumulative_lengths = cum

    @classmethod
    def segment(cls, x, y, pieces=1):
        """Straight segment from x to y split into ``pieces`` equal parts."""
        x = np.asarray(x)
        y = np.asarray(y)
        t = np.linspace(0.0, 1.0, int(pieces) + 1)[:, None]
        return cls(x[None, :] * (1 - t) + y[None, :] * t)

    @classmethod
    def trivial(cls, x):
        x = np.asarray(x)
        return cls(np.stack([x, x]))

    @property
    def length(self):
        return float(self.cumulative_lengths[-1])

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    @property
    def dim(self):
        return self.vertices.shape[1]

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"PolylineCurve(n_vertices={len(self)}, length={self.length:.6g})"

    def reversed(self):
        return PolylineCurve(self.vertices[::-1].copy(), self.norm_kind)

    def point_at(self, s):
        """Point at arc length ``s`` from the start (clipped to [0, length])."""
        V, cum = self.vertices, self.cumulative_lengths
        if len(V) == 1:
            return V[0].copy()
        s = min(max(float(s), 0.0), self.length)
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(max(i, 0), len(V) - 2)
        t = (s - cum[i]) / self.segment_lengths[i]
        return V[i] + t * (V[i + 1] - V[i])

    def locate(self, z, tol=None):
        """Arc-length parameter of the point ``z`` on the curve.

        Raises InvalidInputError when ``z`` is farther than ``tol`` from the
        curve (default: 1e-9 times the curve length).
        """
        z = np.asarray(z)
        if tol is None:
            tol = ON_CURVE_RTOL * max(self.length, 1.0)
        if len(self.vertices) == 1:
            if distance(z, self.vertices[0], self.norm_kind) <= tol:
                return 0.0
            raise InvalidInputError("point is not on the curve")
        A = as_real(self.vertices[:-1])
        B = as_real(self.vertices[1:])
        p = as_real(z)
        D = B - A
        t = np.einsum("ij,ij->i", p - A, D) / np.einsum("ij,ij->i", D, D)
        t = np.clip(t, 0.0, 1.0)
        gaps = np.linalg.norm(A + t[:, None] * D - p, axis=1)
        i = int(np.argmin(gaps))
        if gaps[i] > tol:
            raise InvalidInputError(
                f"point is {gaps[i]:.3g} away from the curve (tolerance {tol:.3g})"
            )
        return float(self.cumulative_lengths[i] + t[i] * self.segment_lengths[i])

    def between(self, s0, s1):
        """Sub-polyline between arc lengths s0 and s1, oriented from s0 to s1."""
        if s0 > s1:
            return self.between(s1, s0).reversed()
        cum = self.cumulative_lengths
        inner = self.vertices[(cum > s0) & (cum < s1)]
        pts = [self.point_at(s0)[None, :], inner, self.point_at(s1)[None, :]]
        return PolylineCurve(np.concatenate(pts, axis=0), self.norm_kind)

    def subdivide(self, pieces):
        """Split every segment into ``pieces`` equal parts (length unchanged)."""
        V = self.vertices
        if len(V) == 1 or pieces <= 1:
            return self
        t = (np.arange(pieces) / pieces)[None, :, None]
        P = V[:-1, None, :] + t * (V[1:] - V[:-1])[:, None, :]
        pts = np.concatenate([P.reshape(-1, V.shape[1]), V[-1:]], axis=0)
        return PolylineCurve(pts, self.norm_kind)

    def to_dict(self):
        V = self.vertices
        if np.iscomplexobj(V):
            coords = [[[float(c.real), float(c.imag)] for c in row] for row in V]
            return {"field": "complex", "norm": self.norm_kind, "vertices": coords}
        return {"field": "real", "norm": self.norm_kind, "vertices": V.tolist()}

    @classmethod
    def from_dict(cls, data):
        V = np.asarray(data["vertices"], dtype=float)
        if data.get("field", "real") == "complex":
            if V.ndim != 3 or V.shape[-1] != 2:
                raise InvalidInputError("complex vertices must be [re, im] pairs")
            V = V[..., 0] + 1j * V[..., 1]
        return cls(V, data.get("norm", "euclidean"))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def curve_length(curve):
    if not isinstance(curve, PolylineCurve):
        curve = PolylineCurve(curve)
    return curve.length


def _evaluate_scalar(f, P):
    vals = np.asarray(f(P))
    if np.iscomplexobj(vals):
        raise EvaluationError("integrand must be real-valued")
    vals = vals.astype(float).reshape(-1)
    if vals.shape[0] != P.shape[0]:
        raise EvaluationError(f"integrand returned {vals.shape[0]} values for {P.shape[0]} points")
    return check_finite(vals, "integrand value")


def curve_integral(f, curve, rtol=1e-8, max_doublings=20, min_doublings=3, atol=1e-300):
    """Integral of ``f`` along ``curve`` with respect to arc length.

    ``f`` takes an (n, dim) array and returns n real values. The composite
    trapezoid rule is applied on every segment and the step is halved until
    two successive estimates agree to ``rtol`` (relative).
    """
    if not isinstance(curve, PolylineCurve):
        curve = PolylineCurve(curve)
    V = curve.vertices
    if len(V) == 1:
        return 0.0
    seg = curve.segment_lengths
    fv = _evaluate_scalar(f, V)
    total = float(np.sum(seg * 0.5 * (fv[:-1] + fv[1:])))
    start, delta = V[:-1], V[1:] - V[:-1]
    n = 1
    for level in range(1, max_doublings + 1):
        t = (2.0 * np.arange(n) + 1.0) / (2.0 * n)
        P = start[:, None, :] + t[None, :, None] * delta[:, None, :]
        fm = _evaluate_scalar(f, P.reshape(-1, V.shape[1])).reshape(len(seg), n)
        new = 0.5 * total + float(np.sum(seg / (2.0 * n) * fm.sum(axis=1)))
        n *= 2
        if level >= min_doublings and abs(new - total) <= rtol * abs(new) + atol:
            return new
        previous, total = total, new
    raise ConvergenceError(
        f"curve integral did not converge after {max_doublings} doublings",
        previous=previous,
        last=total,
    )


def subcurve(curve, z, w, tol=None):
    """The part gamma[z, w] of ``curve`` from z to w."""
    return curve.between(curve.locate(z, tol), curve.locate(w, tol))


class CurveFamily:
    """A rule producing finitely many curves joining x to y.

    ``generator(x, y)`` returns a PolylineCurve or a list of them.
    """

    def __init__(self, generator: Callable, name: str = "custom"):
        self.generator = generator
        self.name = name

    def __call__(self, x, y):
        out = self.generator(np.asarray(x), np.asarray(y))
        curves = [out] if isinstance(out, PolylineCurve) else list(out)
        if not curves:
            raise InvalidInputError(f"curve family {self.name!r} produced no curves")
        for c in curves:
            if distance(c.start, x) > 1e-12 * max(1.0, c.length) or distance(c.end, y) > 1e-12 * max(1.0, c.length):
                raise InvalidInputError(f"curve family {self.name!r} produced a curve with wrong endpoints")
        return curves

    def __repr__(self):
        return f"CurveFamily({self.name!r})"


def segment_family(pieces=64):
    """Straight segments, subdivided so that the integrand is sampled densely."""
    return CurveFamily(lambda x, y: PolylineCurve.segment(x, y, pieces), name="segment")


@dataclass(frozen=True)
class DistanceEstimate:
    """A weighted distance together with what kind of estimate it is.

    Both strategies evaluate the weight along actual curves, so the value is
    an upper bound for the infimum (exactly so for weights that are convex
    along segments; otherwise up to the trapezoid error).
    """

    value: float
    bound: str
    strategy: str
    curve_count: int = 0

    def __float__(self):
        return float(self.value)


class GridGraph:
    """8-connected lattice graph on the interior of a planar domain.

    Edge cost is the Euclidean edge length times the mean of the endpoint
    weights. The graph is built once and never mutated; queries attach their
    endpoints as extra nodes in a private copy of the edge list.
    """

    OFFSETS = ((1, 0), (0, 1), (1, 1), (1, -1))

    def __init__(self, domain, weight, spacing=None, margin=None):
        if domain.dim != 2:
            raise InvalidInputError("grid graphs are only built for planar domains")
        self.domain = domain
        self.weight = weight
        self.spacing = float(spacing if spacing is not None else domain.grid_spacing)
        self.margin = float(margin if margin is not None else 4.0 * self.spacing)
        h = self.spacing
        lo, hi = domain.bounding_box()
        ii = np.arange(int(np.floor(lo[0] / h)), int(np.ceil(hi[0] / h)) + 1)
        jj = np.arange(int(np.floor(lo[1] / h)), int(np.ceil(hi[1] / h)) + 1)
        I, J = np.meshgrid(ii, jj, indexing="ij")
        P = np.stack([I.ravel() * h, J.ravel() * h], axis=1)
        inside = domain.contains(P)
        bd = np.zeros(len(P))
        bd[inside] = domain.boundary_distance(P[inside])
        ok = inside & (bd >= self.margin)
        index = np.full(I.shape, -1, dtype=np.int64)
        index.ravel()[ok] = np.arange(int(ok.sum()))
        self.index = index
        self.i0, self.j0 = int(ii[0]), int(jj[0])
        self.nodes = P[ok]
        self.node_boundary_distance = bd[ok]
        self.node_weight = weight(self.nodes) if len(self.nodes) else np.zeros(0)
        rows, cols, costs = [], [], []
        padded = np.pad(index, 1, constant_values=-1)
        for di, dj in self.OFFSETS:
            a = index
            b = padded[1 + di: 1 + di + index.shape[0], 1 + dj: 1 + dj + index.shape[1]]
            m = (a >= 0) & (b >= 0)
            ua, ub = a[m], b[m]
            rows.append(ua)
            cols.append(ub)
            costs.append(np.hypot(di, dj) * h * 0.5 * (self.node_weight[ua] + self.node_weight[ub]))
        self._rows = np.concatenate(rows)
        self._cols = np.concatenate(cols)
        self._costs = np.concatenate(costs)

    @property
    def n_nodes(self):
        return len(self.nodes)

    def _neighbours(self, p):
        """Grid nodes within 1.5 cells of ``p``."""
        h = self.spacing
        ci, cj = int(round(p[0] / h)) - self.i0, int(round(p[1] / h)) - self.j0
        found = []
        for di in range(-2, 3):
            for dj in range(-2, 3):
                i, j = ci + di, cj + dj
                if 0 <= i < self.index.shape[0] and 0 <= j < self.index.shape[1]:
                    k = self.index[i, j]
                    if k >= 0 and np.linalg.norm(self.nodes[k] - p) <= 1.5 * h:
                        found.append(k)
        return np.asarray(found, dtype=np.int64)

    def _attach(self, points):
        """Edges joining each query point to its nearby grid nodes."""
        n = self.n_nodes
        wq = self.weight(points)
        rows, cols, costs = [], [], []
        for q, p in enumerate(points):
            nb = self._neighbours(p)
            if nb.size == 0:
                raise InvalidInputError(f"point {p.tolist()} is outside the interior grid")
            rows.append(np.full(nb.size, n + q))
            cols.append(nb)
            costs.append(np.linalg.norm(self.nodes[nb] - p, axis=1) * 0.5 * (wq[q] + self.node_weight[nb]))
        # query points that are close to each other are joined directly
        for a in range(len(points)):
            for b in range(a + 1, len(points)):
                gap = np.linalg.norm(points[a] - points[b])
                if 0 < gap <= 1.5 * self.spacing:
                    rows.append(np.array([n + a]))
                    cols.append(np.array([n + b]))
                    costs.append(np.array([gap * 0.5 * (wq[a] + wq[b])]))
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(costs)

    def distances(self, source, targets):
        """Shortest-path costs from ``source`` to each target point."""
        source = np.asarray(source, dtype=float).reshape(-1)
        T = check_points(targets, dim=2, name="targets").astype(float)
        pts = np.concatenate([source[None, :], T], axis=0)
        self._check_points(pts)
        ar, ac, aw = self._attach(pts)
        n = self.n_nodes + len(pts)
        r = np.concatenate([self._rows, ar])
        c = np.concatenate([self._cols, ac])
        w = np.concatenate([self._costs, aw])
        graph = coo_matrix((w, (r, c)), shape=(n, n)).tocsr()
        dist = dijkstra(graph, directed=False, indices=self.n_nodes)
        out = dist[self.n_nodes + 1:]
        same = np.all(T == source[None, :], axis=1)
        out = np.where(same, 0.0, out)
        if np.any(~np.isfinite(out)):
            raise NoPathError("no grid path between the query points")
        return out

    def node_distances(self, source_node):
        """All-node distances from a grid node (used for metric property checks)."""
        graph = coo_matrix((self._costs, (self._rows, self._cols)), shape=(self.n_nodes,) * 2).tocsr()
        return dijkstra(graph, directed=False, indices=int(source_node))

    def _check_points(self, pts):
        if not np.all(self.domain.contains(pts)):
            raise InvalidInputError("query point outside the domain")


def weighted_distance(domain, weight, x, y, strategy="grid_graph", grid=None):
    """Estimate d_w(x, y) from above.

    ``strategy`` is either ``"grid_graph"`` or a :class:`CurveFamily`, in
    which case the minimum of the curve integrals over the generated curves
    is returned. A prebuilt :class:`GridGraph` may be passed as ``grid``.
    """
    x = check_point(x)
    y = check_point(y)
    if not np.all(domain.contains(np.stack([x, y]))):
        raise InvalidInputError("x and y must lie in the domain")
    if isinstance(strategy, CurveFamily):
        if np.array_equal(x, y):
            return DistanceEstimate(0.0, "upper", strategy.name, 0)
        curves = strategy(x, y)
        vals = [curve_integral(weight, c) for c in curves]
        return DistanceEstimate(float(min(vals)), "upper", strategy.name, len(curves))
    if strategy != "grid_graph":
        raise InvalidInputError(f"unknown strategy {strategy!r}")
    if np.array_equal(x, y):
        return DistanceEstimate(0.0, "upper", "grid_graph", 0)
    if grid is None:
        grid = GridGraph(domain, weight)
    a, b = as_real(x), as_real(y)
    # fixed endpoint order so that d(x, y) and d(y, x) agree to the last bit
    if tuple(b) < tuple(a):
        a, b = b, a
    d = grid.distances(a, b[None, :])[0]
    return DistanceEstimate(float(d), "upper", "grid_graph", 0)


def quasi_hyperbolic_distance(domain, x, y, strategy="grid_graph", grid=None):
    """Weighted distance with weight 1/d(z, boundary).

    Points within one grid cell of the boundary are rejected, since the
    weight blows up there.
    """
    from .functions import WeightField

    x = check_point(x)
    y = check_point(y)
    pts = np.stack([x, y])
    if not np.all(domain.contains(pts)):
        raise InvalidInputError("x and y must lie in the domain")
    spacing = grid.spacing if grid is not None else domain.grid_spacing
    if np.any(domain.boundary_distance(pts) < spacing):
        raise NearBoundaryError("point within one grid cell of the boundary")
    weight = grid.weight if grid is not None else WeightField.quasi_hyperbolic(domain)
    return weighted_distance(domain, weight, x, y, strategy=strategy, grid=grid)
