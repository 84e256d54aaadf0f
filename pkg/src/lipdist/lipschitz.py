"""Sampling estimators for Lipschitz-type seminorms and dilatations.

Every estimator here maximises a quotient over finitely many samples and
therefore returns a *lower* bound for the supremum it targets. The sphere
searches used for limsup and oscillation proxies refine their best
directions locally, so the bias is small, but it is never claimed to be
zero.

Maps are vectorised callables: an (n, dim) array of points goes in, an
(n, m) or (n,) array of values comes out. Complex coordinates are allowed
on both sides.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import as_real, check_finite, check_point, check_points, check_random_state, from_real
from .exceptions import InvalidInputError, MajorantDegeneracyError
from .functions import Majorant, WeightField

__all__ = [
    "DEFAULT_RADII",
    "SampledMap",
    "TabulatedMap",
    "TargetSet",
    "Estimate",
    "DilatationEstimate",
    "RegularityEstimate",
    "as_sampled_map",
    "sphere_max",
    "holder_seminorm",
    "local_holder_seminorm",
    "upper_dilatation",
    "bloch_norm",
    "regular_oscillation_constant",
    "p_regular_constant",
    "distance_to_set",
    "modulus_power_function",
    "HolderSeminorm",
    "LocalHolderSeminorm",
    "UpperDilatation",
    "RegularityConstant",
]

#: r_k = 10**(-1 - k/2), k = 0..6
DEFAULT_RADII = tuple(10.0 ** (-1.0 - k / 2.0) for k in range(7))


def _euclidean(A, B):
    D = np.abs(np.asarray(A) - np.asarray(B))
    return np.sqrt(np.sum(D * D, axis=-1))


class SampledMap:
    """A map f: X -> Y evaluated on batches, with a metric on the range."""

    def __init__(self, func, range_metric=None, name="map"):
        self.func = func
        self.range_metric = range_metric or _euclidean
        self.name = name

    def __call__(self, X):
        X = np.asarray(X)
        single = X.ndim == 1
        P = X[None, :] if single else X
        V = np.asarray(self.func(P))
        if V.ndim == 1:
            V = V[:, None]
        if V.shape[0] != P.shape[0]:
            raise InvalidInputError(f"{self.name} returned {V.shape[0]} values for {P.shape[0]} points")
        check_finite(V, f"value of {self.name}")
        return V[0] if single else V

    def distance(self, A, B):
        return np.asarray(self.range_metric(A, B), dtype=float)

    def __repr__(self):
        return f"SampledMap({self.name!r})"


def as_sampled_map(f):
    if isinstance(f, SampledMap):
        return f
    if hasattr(f, "evaluate"):
        return SampledMap(f.evaluate, name=getattr(f, "name", type(f).__name__))
    if callable(f):
        return SampledMap(f, name=getattr(f, "__name__", "map"))
    raise InvalidInputError(f"{f!r} is not a map")


class TargetSet:
    """A nonempty subset A of the range: the origin, a sphere, or finitely many points."""

    def __init__(self, kind, radius=None, points=None):
        if kind not in ("origin", "sphere", "finite"):
            raise InvalidInputError(f"unknown set kind {kind!r}")
        if kind == "sphere" and (radius is None or radius < 0):
            raise InvalidInputError("sphere needs a nonnegative radius")
        if kind == "finite":
            P = np.asarray(points)
            if P.size == 0:
                raise InvalidInputError("the set A must be nonempty")
            points = check_points(P if P.ndim == 2 else P.reshape(1, -1), name="A")
        self.kind = kind
        self.radius = radius
        self.points = points

    @classmethod
    def origin(cls):
        return cls("origin")

    @classmethod
    def sphere(cls, r):
        return cls("sphere", radius=float(r))

    @classmethod
    def finite(cls, points):
        return cls("finite", points=points)

    def distance(self, Y):
        """d(y, A) for a batch (n, m) or a single point (m,)."""
        Y = np.asarray(Y)
        single = Y.ndim == 1
        Y2 = Y[None, :] if single else Y
        if self.kind == "origin":
            d = _euclidean(Y2, 0.0)
        elif self.kind == "sphere":
            d = np.abs(_euclidean(Y2, 0.0) - self.radius)
        else:
            d = np.min(_euclidean(Y2[:, None, :], self.points[None, :, :]), axis=1)
        return float(d[0]) if single else d

    def describe(self):
        if self.kind == "finite":
            return {"kind": "finite", "size": len(self.points)}
        if self.kind == "sphere":
            return {"kind": "sphere", "radius": self.radius}
        return {"kind": "origin"}


def distance_to_set(y, A):
    """Distance from y (or each row of a batch) to the set A."""
    if not isinstance(A, TargetSet):
        if A is None or (hasattr(A, "__len__") and len(A) == 0):
            raise InvalidInputError("the set A must be nonempty")
        A = TargetSet.finite(A)
    return A.distance(y)


def modulus_power_function(f, A, p):
    """g(z) = d(f(z), A)**p as a real-valued map."""
    f = as_sampled_map(f)
    if not isinstance(A, TargetSet):
        A = TargetSet.finite(A)
    p = float(p)

    def g(X):
        return A.distance(f(X)) ** p

    return SampledMap(g, name=f"dist({f.name}, A)^{p:g}")


@dataclass
class Estimate:
    """A sampled lower bound for a supremum."""

    value: float
    count: int
    witness: dict = field(default_factory=dict)
    bound: str = "lower"

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        return {"value": self.value, "count": self.count, "witness": self.witness, "bound": self.bound}


@dataclass
class DilatationEstimate(Estimate):
    radii: list = field(default_factory=list)
    profile: list = field(default_factory=list)


@dataclass
class RegularityEstimate(Estimate):
    infinite: bool = False


def _majorant(phi, alpha):
    if phi is not None:
        return phi
    return Majorant.standard(alpha)


def _direction_basis(D, rng, n):
    if D == 1:
        return np.array([[1.0], [-1.0]])
    if D == 2:
        theta = rng.uniform(0, 2 * np.pi) + np.linspace(0, 2 * np.pi, n, endpoint=False)
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    U = rng.standard_normal((n, D))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def sphere_max(objective, x, r, random_state=None, n_directions=256, rounds=16, keep=4, per_round=16):
    """Maximise ``objective`` over the sphere of radius r around x.

    Directions are drawn on the unit sphere of the real embedding of x's
    space (evenly spaced on circles), then the best ``keep`` are perturbed
    with a step that halves every round. Returns (max value, maximiser).
    """
    rng = check_random_state(random_state)
    x = np.asarray(x)
    D = as_real(x).shape[-1]
    U = _direction_basis(D, rng, n_directions)
    vals = np.asarray(objective(x[None, :] + r * from_real(U, x)), dtype=float)
    if D > 1:
        sigma = 2 * np.pi / n_directions if D == 2 else 0.5
        order = np.argsort(vals)[::-1][:keep]
        U, vals = U[order], vals[order]
        for _ in range(rounds):
            C = U[:, None, :] + sigma * rng.standard_normal((len(U), per_round, D))
            C = C.reshape(-1, D)
            C /= np.linalg.norm(C, axis=1, keepdims=True)
            cv = np.asarray(objective(x[None, :] + r * from_real(C, x)), dtype=float)
            U = np.concatenate([U, C])
            vals = np.concatenate([vals, cv])
            order = np.argsort(vals)[::-1][:keep]
            U, vals = U[order], vals[order]
            sigma *= 0.5
    k = int(np.argmax(vals))
    return float(vals[k]), x + r * from_real(U[k], x)


def holder_seminorm(f, X, Y, phi=None, alpha=1.0):
    """max over pairs of d_Y(f(x), f(y)) / phi(|x - y|); pairs with x == y are skipped."""
    f = as_sampled_map(f)
    phi = _majorant(phi, alpha)
    X = check_points(X, name="X")
    Y = check_points(Y, dim=X.shape[1], name="Y")
    if len(X) != len(Y):
        raise InvalidInputError("X and Y must have the same number of points")
    sep = _euclidean(X, Y)
    keep = sep > 0
    X, Y, sep = X[keep], Y[keep], sep[keep]
    if len(X) == 0:
        return Estimate(0.0, 0)
    den = np.asarray(phi.value(sep), dtype=float)
    if np.any(den <= 0):
        raise MajorantDegeneracyError("majorant vanished at a positive distance")
    q = f.distance(f(X), f(Y)) / den
    k = int(np.argmax(q))
    return Estimate(float(q[k]), len(q), {"x": as_real(X[k]).tolist(), "y": as_real(Y[k]).tolist()})


def _ball_samples(centers, radii, per_center, rng, short_fraction=0.5):
    """Points y with |y - x| < radius(x) for every center x, as flat arrays."""
    C = np.repeat(centers, per_center, axis=0)
    R = np.repeat(radii, per_center)
    D = as_real(C[:1]).shape[1]
    n = len(C)
    U = rng.standard_normal((n, D))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    rho = rng.random(n) ** (1.0 / D)
    short = rng.random(n) < short_fraction
    rho[short] = np.exp(rng.uniform(np.log(1e-4), 0.0, int(short.sum())))
    rho = np.minimum(rho, 1.0 - 1e-12)
    return C, C + (rho * R)[:, None] * from_real(U, C)


def local_holder_seminorm(f, w, centers=None, per_center_samples=64, phi=None, alpha=1.0,
                          random_state=None, pairs=None, domain=None):
    """Hölder quotient maximised over y in the ball B(x, w(x)).

    Either sample ``per_center_samples`` points in each ball around
    ``centers``, or restrict given ``pairs`` to those satisfying the ball
    condition.
    """
    f = as_sampled_map(f)
    phi = _majorant(phi, alpha)
    if pairs is not None:
        X = check_points(pairs[0], name="X")
        Y = check_points(pairs[1], dim=X.shape[1], name="Y")
        inside = _euclidean(X, Y) < w(X)
        X, Y = X[inside], Y[inside]
    else:
        C = check_points(centers, name="centers")
        rng = check_random_state(random_state)
        X, Y = _ball_samples(C, w(C), int(per_center_samples), rng)
        if domain is not None:
            ok = domain.contains(Y)
            X, Y = X[ok], Y[ok]
    if len(X) == 0:
        return Estimate(0.0, 0)
    return holder_seminorm(f, X, Y, phi)


def upper_dilatation(f, x, radii=DEFAULT_RADII, domain=None, scale=1.0, random_state=None,
                     n_directions=256, rounds=16, isolated=False):
    """limsup_{y -> x} d_Y(f(x), f(y)) / |x - y|, approximated on shrinking spheres.

    For every radius r the quotient is maximised over the sphere of radius
    r; the estimate is the larger of the values at the two smallest radii.
    Radii are multiplied by ``scale`` and, when a domain is given, radii that
    do not fit inside the domain around x are dropped.
    """
    if isolated:
        return DilatationEstimate(0.0, 0, radii=[], profile=[])
    f = as_sampled_map(f)
    x = check_point(x)
    R = np.sort(np.asarray(radii, dtype=float) * float(scale))[::-1]
    if np.any(R <= 0):
        raise InvalidInputError("radii must be positive")
    if domain is not None:
        R = R[R < domain.boundary_distance(x)]
    if R.size == 0:
        raise InvalidInputError("every radius leaves the domain around x")
    rng = check_random_state(random_state)
    fx = f(x)

    Q = []
    best_point = None
    for r in R:
        val, y = sphere_max(lambda P: f.distance(f(P), fx[None, :]), x, r, rng,
                            n_directions=n_directions, rounds=rounds)
        Q.append(val / r)
        best_point = y
    tail = Q[-2:]
    return DilatationEstimate(float(max(tail)), len(Q), {"x": as_real(x).tolist(), "y": as_real(best_point).tolist()},
                              radii=R.tolist(), profile=[float(q) for q in Q])


def bloch_norm(f, w, points, radii=DEFAULT_RADII, domain=None, relative=False, random_state=None,
               n_directions=256, rounds=16):
    """max over points of d*f(x) / w(x).

    With ``relative=True`` the dilatation radii at x are scaled by
    d(x, boundary), so that the limsup proxy stays local near the boundary.
    """
    f = as_sampled_map(f)
    P = check_points(points, name="points")
    W = w(P)
    rng = check_random_state(random_state)
    best, wit = -np.inf, {}
    for x, wx in zip(P, W):
        scale = domain.boundary_distance(x) if (relative and domain is not None) else 1.0
        est = upper_dilatation(f, x, radii, domain=domain, scale=scale, random_state=rng,
                               n_directions=n_directions, rounds=rounds)
        q = est.value / wx
        if q > best:
            best, wit = q, {"x": as_real(x).tolist(), "dilatation": est.value, "weight": float(wx)}
    return Estimate(float(best), len(P), wit)


RADIUS_FRACTIONS = (0.02, 0.1, 0.3, 0.5, 0.7, 0.9)

# oscillations below this (relative to the size of the values) are rounding noise
_NOISE = 64 * np.finfo(float).eps


def _regularity(f, w, centers, oscillation, shells, radius_fractions, dilatation_radii,
                random_state, n_directions, rounds):
    f = as_sampled_map(f)
    C = check_points(centers, name="centers")
    W = w(C)
    rng = check_random_state(random_state)
    worst, wit, infinite, count = 0.0, {}, False, 0
    per_center = []
    for x, wx in zip(C, W):
        dil = upper_dilatation(f, x, dilatation_radii, scale=wx, random_state=rng,
                               n_directions=n_directions, rounds=rounds).value
        obj, floor = oscillation(f, x)
        k_center = 0.0
        for frac in radius_fractions:
            r = frac * wx
            sup = max(sphere_max(obj, x, s * r, rng, n_directions=n_directions, rounds=rounds)[0]
                      for s in shells)
            count += 1
            if sup <= floor:
                if dil > 0:
                    infinite = True
                    k = np.inf
                else:
                    k = 0.0
            else:
                k = dil * r / sup
            if k > k_center:
                k_center = k
            if k > worst:
                worst = k
                wit = {"x": as_real(x).tolist(), "r": float(r), "dilatation": float(dil),
                       "oscillation": float(sup)}
        per_center.append(k_center)
    est = RegularityEstimate(float(worst), count, wit, bound="sampled", infinite=infinite)
    est.per_center = per_center
    return est


def regular_oscillation_constant(f, w, centers, radius_fractions=RADIUS_FRACTIONS,
                                 dilatation_radii=DEFAULT_RADII[-2:], random_state=None,
                                 n_directions=256, rounds=16):
    """Smallest K with d*f(x) <= (K/r) sup_{B(x,r)} d_Y(f(x), f(y)) over the samples.

    Radii are ``radius_fractions`` times w(x). For maps whose oscillation sup
    sits on the sphere (analytic maps, by the maximum principle) sampling the
    sphere is enough; an inner shell is checked as well.
    """
    def oscillation(f, x):
        fx = f(x)
        floor = _NOISE * max(1.0, float(np.max(np.abs(fx))))
        return (lambda P: f.distance(f(P), fx[None, :])), floor

    return _regularity(f, w, centers, oscillation, (0.5, 1.0), radius_fractions,
                       dilatation_radii, random_state, n_directions, rounds)


def p_regular_constant(f, w, A, p, centers, radius_fractions=RADIUS_FRACTIONS,
                       dilatation_radii=DEFAULT_RADII[-2:], random_state=None,
                       n_directions=256, rounds=16):
    """Smallest sampled K with
    d*f(x) <= (K/r) sup_{B(x,r)} |d(f(x),A)^p - d(f(y),A)^p|^(1/p).
    """
    if p < 1:
        raise InvalidInputError("p must be >= 1")
    if not isinstance(A, TargetSet):
        A = TargetSet.finite(A)
    g = modulus_power_function(f, A, p)

    def oscillation(f, x):
        gx = g(x)[0]
        floor = (_NOISE * max(1.0, abs(float(gx)))) ** (1.0 / p)
        return (lambda P: np.abs(g(P)[:, 0] - gx) ** (1.0 / p)), floor

    return _regularity(f, w, centers, oscillation, (0.25, 0.5, 0.75, 1.0), radius_fractions,
                       dilatation_radii, random_state, n_directions, rounds)


# scikit-learn style estimators --------------------------------------------


def _index_pairs(X, n_pairs, rng, k_neighbours=4):
    """All pairs for small X; otherwise random pairs plus nearest-neighbour pairs."""
    n = len(X)
    if n_pairs is None:
        i, j = np.triu_indices(n, 1)
        return i, j
    half = n_pairs // 2
    i = rng.integers(0, n, half)
    j = rng.integers(0, n, half)
    tree = cKDTree(as_real(X))
    k = min(k_neighbours + 1, n)
    _, nb = tree.query(as_real(X), k=k)
    nb = np.atleast_2d(nb)
    ii = np.repeat(np.arange(n), k - 1)
    jj = nb[:, 1:].ravel()
    take = rng.permutation(len(ii))[: n_pairs - half]
    return np.concatenate([i, ii[take]]), np.concatenate([j, jj[take]])


class HolderSeminorm(BaseEstimator):
    """Hölder seminorm of sampled data (X[k], y[k] = f(X[k])).

    Parameters
    ----------
    alpha : float
        Exponent of the standard majorant t**alpha. Ignored if ``majorant`` is given.
    majorant : Majorant, optional
    n_pairs : int or None
        None uses every pair of rows; otherwise half random pairs and half
        nearest-neighbour pairs.
    random_state : int, Generator or None

    Attributes
    ----------
    seminorm_ : float
        Largest quotient found (a lower bound for the true seminorm).
    witness_ : dict
    n_pairs_ : int
    """

    def __init__(self, alpha=1.0, majorant=None, n_pairs=None, random_state=None):
        self.alpha = alpha
        self.majorant = majorant
        self.n_pairs = n_pairs
        self.random_state = random_state

    def fit(self, X, y):
        X = check_points(X)
        V = np.asarray(y)
        V = V.reshape(len(V), -1)
        if len(V) != len(X):
            raise InvalidInputError("X and y have different lengths")
        rng = check_random_state(self.random_state)
        i, j = _index_pairs(X, self.n_pairs, rng)
        est = holder_seminorm(TabulatedMap(X, V), X[i], X[j], _majorant(self.majorant, self.alpha))
        self.seminorm_ = est.value
        self.witness_ = est.witness
        self.n_pairs_ = est.count
        return self


class LocalHolderSeminorm(BaseEstimator):
    """Hölder seminorm restricted to pairs with |x - y| < w(x), from sampled data."""

    def __init__(self, weight=None, alpha=1.0, majorant=None):
        self.weight = weight
        self.alpha = alpha
        self.majorant = majorant

    def fit(self, X, y):
        X = check_points(X)
        V = np.asarray(y).reshape(len(X), -1)
        w = self.weight if self.weight is not None else WeightField.constant(1.0)
        W = w(X)
        tree = cKDTree(as_real(X))
        I, J = [], []
        for a, nb in enumerate(tree.query_ball_point(as_real(X), W * (1 - 1e-12))):
            nb = [b for b in nb if b != a]
            I.extend([a] * len(nb))
            J.extend(nb)
        I, J = np.asarray(I, dtype=int), np.asarray(J, dtype=int)
        if len(I):
            est = holder_seminorm(TabulatedMap(X, V), X[I], X[J], _majorant(self.majorant, self.alpha))
        else:
            est = Estimate(0.0, 0)
        self.seminorm_ = est.value
        self.witness_ = est.witness
        self.n_pairs_ = est.count
        return self


class TabulatedMap(SampledMap):
    """A map known only on finitely many points, looked up by exact coordinates.

    Nothing about continuity is assumed, so arbitrary (even discontinuous)
    assignments of values can be tested.
    """

    def __init__(self, points, values, name="table"):
        X = check_points(points, name="points")
        V = np.asarray(values)
        V = V.reshape(len(X), -1)
        self._X, self._V = X, V
        self._table = dict(zip(map(tuple, as_real(X)), range(len(X))))
        super().__init__(self._lookup, name=name)

    def _lookup(self, P):
        try:
            idx = [self._table[tuple(p)] for p in as_real(P)]
        except KeyError as exc:
            raise InvalidInputError(f"point {list(exc.args[0])} is not in the table") from None
        return self._V[idx]


class UpperDilatation(TransformerMixin, BaseEstimator):
    """Transformer mapping each point x to the estimate of d*f(x).

    Stateless: ``fit`` only validates its input, so the transformer can sit
    in a scikit-learn Pipeline.
    """

    def __init__(self, func=None, radii=DEFAULT_RADII, domain=None, relative=False,
                 n_directions=256, random_state=None):
        self.func = func
        self.radii = radii
        self.domain = domain
        self.relative = relative
        self.n_directions = n_directions
        self.random_state = random_state

    def fit(self, X, y=None):
        check_points(X)
        if self.func is None:
            raise InvalidInputError("func is required")
        return self

    def transform(self, X):
        X = check_points(X)
        rng = check_random_state(self.random_state)
        out = np.empty((len(X), 1))
        for k, x in enumerate(X):
            scale = self.domain.boundary_distance(x) if (self.relative and self.domain is not None) else 1.0
            out[k, 0] = upper_dilatation(self.func, x, self.radii, domain=self.domain, scale=scale,
                                         random_state=rng, n_directions=self.n_directions).value
        return out


class RegularityConstant(TransformerMixin, BaseEstimator):
    """Per-center regularity constants.

    With ``p=None`` this is the regular-oscillation constant, otherwise the
    p-regularity constant with respect to ``target`` (default: the origin).
    ``fit`` stores the overall constant in ``constant_``.
    """

    def __init__(self, func=None, weight=None, p=None, target=None,
                 radius_fractions=RADIUS_FRACTIONS, random_state=None):
        self.func = func
        self.weight = weight
        self.p = p
        self.target = target
        self.radius_fractions = radius_fractions
        self.random_state = random_state

    def _estimate(self, X):
        if self.func is None or self.weight is None:
            raise InvalidInputError("func and weight are required")
        X = check_points(X)
        if self.p is None:
            return regular_oscillation_constant(self.func, self.weight, X, self.radius_fractions,
                                                random_state=self.random_state)
        return p_regular_constant(self.func, self.weight, self.target or TargetSet.origin(), self.p, X,
                                  self.radius_fractions, random_state=self.random_state)

    def fit(self, X, y=None):
        est = self._estimate(X)
        self.constant_ = est.value
        self.witness_ = est.witness
        self.infinite_ = est.infinite
        return self

    def transform(self, X):
        return np.asarray(self._estimate(X).per_center, dtype=float)[:, None]
