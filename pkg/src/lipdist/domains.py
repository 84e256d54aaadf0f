"""Domains with a boundary-distance oracle, uniform arcs and integral conditions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_real, check_points, check_random_state
from .exceptions import InvalidInputError
from .functions import Majorant, WeightField
from .metric import CurveFamily, PolylineCurve, curve_integral, distance

__all__ = [
    "DiscretizedDomain",
    "UniformityCertificate",
    "IntegralConditionReport",
    "cone_arc",
    "cone_arc_family",
    "uniform_arc_check",
    "required_uniform_constant",
    "uniform_domain_certificate",
    "integral_condition_check",
    "uniform_integral_check",
    "lappalainen_condition_check",
]

SHAPES = ("unit_disk", "unit_ball", "polygon", "annulus")


class DiscretizedDomain:
    """A bounded domain of R^dim (C^n is handled through its real embedding).

    Points may be passed as real arrays of length ``dim`` or as complex arrays
    of length ``dim / 2``.
    """

    def __init__(self, shape, dim=2, grid_spacing=1.0 / 128, interior_margin=None,
                 radius=1.0, vertices=None, r_in=None, r_out=None):
        if shape not in SHAPES:
            raise InvalidInputError(f"unknown shape {shape!r}; expected one of {SHAPES}")
        if not grid_spacing > 0:
            raise InvalidInputError("grid_spacing must be positive")
        self.shape = shape
        self.dim = int(dim)
        self.grid_spacing = float(grid_spacing)
        self.interior_margin = float(interior_margin if interior_margin is not None else 4 * grid_spacing)
        if self.interior_margin <= 0:
            raise InvalidInputError("interior_margin must be positive")
        self.radius = float(radius)
        self.vertices = None
        self.r_in = self.r_out = None
        if shape == "unit_disk" and self.dim != 2:
            raise InvalidInputError("unit_disk is two-dimensional")
        if shape == "polygon":
            V = np.asarray(vertices, dtype=float)
            if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
                raise InvalidInputError("polygon needs at least 3 planar vertices")
            self.vertices = V
            self.dim = 2
        if shape == "annulus":
            if r_in is None or r_out is None or not 0 < r_in < r_out:
                raise InvalidInputError("annulus needs 0 < r_in < r_out")
            self.r_in, self.r_out = float(r_in), float(r_out)
            self.dim = 2

    # constructors -------------------------------------------------------
    @classmethod
    def unit_disk(cls, grid_spacing=1.0 / 128, **kw):
        return cls("unit_disk", 2, grid_spacing, **kw)

    @classmethod
    def unit_ball(cls, dim, grid_spacing=1.0 / 16, radius=1.0, **kw):
        return cls("unit_ball", dim, grid_spacing, radius=radius, **kw)

    @classmethod
    def complex_ball(cls, n, grid_spacing=1.0 / 16, **kw):
        """Unit ball of C^n, seen as the ball of R^(2n)."""
        if n == 1:
            return cls.unit_disk(grid_spacing, **kw)
        return cls.unit_ball(2 * n, grid_spacing, **kw)

    @classmethod
    def polygon(cls, vertices, grid_spacing=1.0 / 128, **kw):
        return cls("polygon", 2, grid_spacing, vertices=vertices, **kw)

    @classmethod
    def annulus(cls, r_in, r_out, grid_spacing=1.0 / 128, **kw):
        return cls("annulus", 2, grid_spacing, r_in=r_in, r_out=r_out, **kw)

    @property
    def is_ball(self):
        return self.shape in ("unit_disk", "unit_ball")

    def __repr__(self):
        return f"DiscretizedDomain({self.describe()})"

    def describe(self):
        d = {"shape": self.shape, "dim": self.dim, "grid_spacing": self.grid_spacing,
             "interior_margin": self.interior_margin}
        if self.is_ball:
            d["radius"] = self.radius
        if self.shape == "polygon":
            d["vertices"] = self.vertices.tolist()
        if self.shape == "annulus":
            d["r_in"], d["r_out"] = self.r_in, self.r_out
        return d

    # geometry -----------------------------------------------------------
    def _real(self, X):
        P = as_real(check_points(X))
        if P.shape[1] != self.dim:
            raise InvalidInputError(f"points have real dimension {P.shape[1]}, domain has {self.dim}")
        return P

    def _signed_distance(self, P):
        """Positive inside, negative outside."""
        if self.is_ball:
            return self.radius - np.linalg.norm(P, axis=1)
        if self.shape == "annulus":
            r = np.linalg.norm(P, axis=1)
            return np.minimum(r - self.r_in, self.r_out - r)
        dist = self._polygon_edge_distance(P)
        return np.where(self._polygon_contains(P), dist, -dist)

    def _polygon_edge_distance(self, P):
        A = self.vertices
        B = np.roll(A, -1, axis=0)
        D = B - A
        rel = P[:, None, :] - A[None, :, :]
        t = np.clip(np.einsum("nkj,kj->nk", rel, D) / np.einsum("kj,kj->k", D, D), 0.0, 1.0)
        gap = rel - t[..., None] * D[None, :, :]
        return np.min(np.linalg.norm(gap, axis=2), axis=1)

    def _polygon_contains(self, P):
        A = self.vertices
        B = np.roll(A, -1, axis=0)
        x, y = P[:, :1], P[:, 1:]
        crosses = (A[None, :, 1] > y) != (B[None, :, 1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = A[None, :, 0] + (y - A[None, :, 1]) * (B[None, :, 0] - A[None, :, 0]) / (B[None, :, 1] - A[None, :, 1])
        return (np.sum(crosses & (x < xint), axis=1) % 2) == 1

    def contains(self, X):
        """Membership in the open domain."""
        return self._signed_distance(self._real(X)) > 0

    def boundary_distance(self, X):
        """d(x, boundary). A single point gives a float, a batch an array."""
        X = np.asarray(X)
        single = X.ndim == 1
        P = self._real(X[None, :] if single else X)
        d = self._signed_distance(P)
        if np.any(d < 0):
            bad = P[np.argmin(d)]
            raise InvalidInputError(f"point {bad.tolist()} lies outside the domain")
        return float(d[0]) if single else d

    def bounding_box(self):
        if self.is_ball:
            return -self.radius * np.ones(self.dim), self.radius * np.ones(self.dim)
        if self.shape == "annulus":
            return -self.r_out * np.ones(2), self.r_out * np.ones(2)
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    # sampling -----------------------------------------------------------
    def sample(self, n, random_state=None, margin=0.0, boundary_layer=0.0):
        """``n`` random interior points (real coordinates) with d(x, boundary) > margin.

        A fraction ``boundary_layer`` of the points (ball-shaped domains only)
        is pushed towards the boundary with log-uniform boundary distance,
        where Hölder quotients of functions with boundary singularities peak.
        """
        rng = check_random_state(random_state)
        n = int(n)
        if self.is_ball:
            g = rng.standard_normal((n, self.dim))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            inner = self.radius - margin
            if inner <= 0:
                raise InvalidInputError("margin leaves no interior")
            r = inner * rng.random(n) ** (1.0 / self.dim)
            n_layer = int(round(boundary_layer * n))
            if n_layer:
                lo = np.log(max(margin, 1e-6 * self.radius) + 1e-300)
                depth = np.exp(rng.uniform(lo, np.log(0.5 * self.radius), n_layer))
                r[:n_layer] = self.radius - np.maximum(depth, margin * (1 + 1e-9))
            P = g * r[:, None]
            return P
        lo, hi = self.bounding_box()
        out = []
        need = n
        while need > 0:
            cand = lo + (hi - lo) * rng.random((max(2 * need, 64), self.dim))
            keep = cand[self._signed_distance(cand) > margin]
            out.append(keep[:need])
            need -= len(out[-1])
        return np.concatenate(out, axis=0)

    def sample_pairs(self, n, random_state=None, short_range=0.05, margin=0.0, boundary_layer=0.25):
        """Pairs (X, Y) for seminorm estimation.

        Half are independent uniform pairs; the rest are short-range pairs with
        log-uniform separation below ``short_range``.
        """
        rng = check_random_state(random_state)
        n_long = n // 2
        n_short = n - n_long
        X1 = self.sample(n_long, rng, margin)
        Y1 = self.sample(n_long, rng, margin)
        Xs, Ys = [], []
        need = n_short
        while need > 0:
            X = self.sample(need, rng, margin, boundary_layer=boundary_layer)
            u = rng.standard_normal((need, self.dim))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            rho = np.exp(rng.uniform(np.log(short_range * 1e-3), np.log(short_range), need))
            Y = X + rho[:, None] * u
            ok = self._signed_distance(Y) > margin
            Xs.append(X[ok])
            Ys.append(Y[ok])
            need -= int(ok.sum())
        return np.concatenate([X1] + Xs), np.concatenate([Y1] + Ys)

    def grid_points(self, spacing=None, margin=None):
        """Lattice points of the interior at distance >= margin from the boundary."""
        h = float(spacing if spacing is not None else self.grid_spacing)
        margin = self.interior_margin if margin is None else float(margin)
        lo, hi = self.bounding_box()
        axes = [np.arange(np.floor(a / h), np.ceil(b / h) + 1) * h for a, b in zip(lo, hi)]
        if np.prod([len(a) for a in axes]) > 5e6:
            raise InvalidInputError("grid too large; increase the spacing")
        P = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        return P[self._signed_distance(P) >= margin]


def _to_field(P, like):
    """Real points back to the coordinate field of ``like``."""
    if np.iscomplexobj(like):
        return P[..., 0::2] + 1j * P[..., 1::2]
    return P


def cone_arc(domain, x, y, pieces=64):
    """Two-leg arc x -> m -> y inside a ball.

    The corner m = (1 - |x - y| / (2R)) (x + y) / 2 is the midpoint pulled
    towards the centre in proportion to the separation of the endpoints.
    """
    if not domain.is_ball:
        raise InvalidInputError("cone arcs are defined for ball-shaped domains")
    x = np.asarray(x)
    y = np.asarray(y)
    if np.array_equal(x, y):
        return PolylineCurve.trivial(x)
    sep = float(distance(x, y))
    m = (1.0 - sep / (2.0 * domain.radius)) * 0.5 * (x + y)
    t1 = _graded(domain.boundary_distance(x), float(distance(x, m)), pieces)
    t2 = _graded(domain.boundary_distance(y), float(distance(y, m)), pieces)
    leg1 = x[None, :] + t1[:, None] * (m - x)[None, :]
    leg2 = y[None, :] + t2[::-1, None] * (m - y)[None, :]
    return PolylineCurve(np.concatenate([leg1, leg2[1:]], axis=0))


def _graded(d, length, pieces):
    """Parameters in [0, 1] for a leg starting at boundary distance d.

    Uniform steps plus a geometric cluster at the start, so that weights
    blowing up at the boundary are resolved near endpoints close to it.
    """
    t = np.linspace(0.0, 1.0, pieces + 1)
    if length > 0 and d < length / pieces:
        t = np.union1d(t, np.geomspace(0.1 * d / length, 1.0, 48))
    return t


def cone_arc_family(domain, pieces=64):
    return CurveFamily(lambda x, y: cone_arc(domain, x, y, pieces), name="cone_arc")


@dataclass
class UniformityCertificate:
    c: float
    pair_count: int
    worst_margin_i: float
    worst_margin_ii: float
    witness: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.worst_margin_i >= 0 and self.worst_margin_ii >= 0

    def to_dict(self):
        return {"c": self.c, "pair_count": self.pair_count, "worst_margin_i": self.worst_margin_i,
                "worst_margin_ii": self.worst_margin_ii, "witness": self.witness, "passed": self.passed}


def _check_inside(domain, curve):
    inside = domain.contains(curve.vertices)
    if not np.all(inside):
        k = int(np.argmin(inside))
        raise InvalidInputError(f"curve leaves the domain at vertex {k}: {as_real(curve.vertices[k]).tolist()}")


def uniform_arc_check(domain, curve, x, y, c):
    """Slack in both uniform-domain conditions for one arc joining x and y.

    margin_i = c|x - y| - l(curve); margin_ii is the minimum over vertices and
    segment midpoints z of c d(z, boundary) - min(l(curve[x, z]), l(curve[z, y])).
    """
    _check_inside(domain, curve)
    sep = float(distance(x, y))
    L = curve.length
    margin_i = c * sep - L
    if len(curve) == 1:
        return UniformityCertificate(c, 1, margin_i, 0.0 if margin_i >= 0 else margin_i, {})
    cum = curve.cumulative_lengths
    mids = 0.5 * (curve.vertices[:-1] + curve.vertices[1:])
    Z = np.concatenate([curve.vertices, mids])
    s = np.concatenate([cum, 0.5 * (cum[:-1] + cum[1:])])
    bd = domain.boundary_distance(Z)
    slack = c * bd - np.minimum(s, L - s)
    k = int(np.argmin(slack))
    witness = {"x": as_real(x).tolist(), "y": as_real(y).tolist(), "z": as_real(Z[k]).tolist()}
    return UniformityCertificate(float(c), 1, float(margin_i), float(slack[k]), witness)


def required_uniform_constant(domain, curve, x, y):
    """Smallest c for which ``curve`` satisfies conditions (i) and (ii), returned as (c_i, c_ii)."""
    _check_inside(domain, curve)
    sep = float(distance(x, y))
    L = curve.length
    if sep == 0.0:
        return 0.0, 0.0
    if len(curve) == 1:
        return np.inf, 0.0
    cum = curve.cumulative_lengths
    mids = 0.5 * (curve.vertices[:-1] + curve.vertices[1:])
    Z = np.concatenate([curve.vertices, mids])
    s = np.concatenate([cum, 0.5 * (cum[:-1] + cum[1:])])
    return L / sep, float(np.max(np.minimum(s, L - s) / domain.boundary_distance(Z)))


def uniform_domain_certificate(domain, family, c, X, Y):
    """Worst-case uniformity slack of ``family`` over the pairs (X[k], Y[k])."""
    worst_i, worst_ii = np.inf, np.inf
    wit_i, wit_ii = {}, {}
    for x, y in zip(X, Y):
        curve = family(x, y)[0]
        cert = uniform_arc_check(domain, curve, x, y, c)
        if cert.worst_margin_i < worst_i:
            worst_i, wit_i = cert.worst_margin_i, {"x": as_real(x).tolist(), "y": as_real(y).tolist()}
        if cert.worst_margin_ii < worst_ii:
            worst_ii, wit_ii = cert.worst_margin_ii, cert.witness
    return UniformityCertificate(float(c), len(X), float(worst_i), float(worst_ii),
                                 {"condition_i": wit_i, "condition_ii": wit_ii})


@dataclass
class IntegralConditionReport:
    """Worst ratio of a curve integral of the weight to M*phi(|x - y|)."""

    M: float
    worst_ratio: float
    pair_count: int
    divergent_pairs: int
    tolerance: float
    witness: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.divergent_pairs == 0 and self.worst_ratio <= 1.0 + self.tolerance

    def to_dict(self):
        return {"M": self.M, "worst_ratio": self.worst_ratio, "pair_count": self.pair_count,
                "divergent_pairs": self.divergent_pairs, "tolerance": self.tolerance,
                "witness": self.witness, "passed": self.passed}


def integral_condition_check(domain, weight, phi, family, M, X, Y, tolerance=1e-9,
                             shell=1e-9, rtol=1e-8):
    """Check  int_gamma w <= M phi(|x - y|)  on sampled pairs.

    Curves that come within ``shell`` of the boundary are counted as divergent
    (the weights of interest blow up there) and make the report fail.
    """
    worst, witness, divergent = 0.0, {}, 0
    for x, y in zip(X, Y):
        sep = float(distance(x, y))
        if sep == 0.0:
            continue
        ratios = []
        for curve in family(x, y):
            _check_inside(domain, curve)
            if np.min(domain.boundary_distance(curve.vertices)) < shell:
                divergent += 1
                continue
            I = curve_integral(weight, curve, rtol=rtol)
            ratios.append(I / (M * float(phi(np.array([sep]))[0])))
        if ratios and min(ratios) > worst:
            worst = float(min(ratios))
            witness = {"x": as_real(x).tolist(), "y": as_real(y).tolist()}
    return IntegralConditionReport(float(M), worst, len(X), divergent, tolerance, witness)


def uniform_integral_check(domain, family, alpha, c, X, Y, tolerance=1e-9, rtol=1e-8):
    """int_gamma d(z, boundary)^(alpha - 1) |dz| <= (2c/alpha) |x - y|^alpha."""
    if not 0 < alpha < 1:
        raise InvalidInputError("alpha must lie in (0, 1)")
    weight = WeightField.power(domain, alpha - 1.0)
    return integral_condition_check(domain, weight, Majorant.standard(alpha), family,
                                    2.0 * c / alpha, X, Y, tolerance=tolerance, rtol=rtol)


def lappalainen_condition_check(domain, phi, family, M, X, Y, tolerance=1e-9, rtol=1e-8):
    """int_gamma phi(d(z))/d(z) |dz| <= M phi(|x - y|)."""
    def func(P):
        d = domain.boundary_distance(P)
        return phi.value(d) / d

    return integral_condition_check(domain, WeightField.custom(func), phi, family, M, X, Y,
                                    tolerance=tolerance, rtol=rtol)
