"""Analytic test maps with exact differentials.

PolynomialMap covers multivariate complex polynomials C^n -> C^m; the
differential is obtained by differentiating the coefficient table, never
by differencing. ClosedFormMap holds a few scalar functions with known
derivatives, chiefly the principal branch of (1 - z)**alpha.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from ._validation import check_point, check_points, check_random_state
from .exceptions import InvalidInputError
from .functions import WeightField
from .lipschitz import DEFAULT_RADII, RADIUS_FRACTIONS, TargetSet, p_regular_constant, upper_dilatation
from .moebius import ball_sup_norm, operator_norm

__all__ = [
    "MAX_DEGREE",
    "MAX_DIM",
    "PolynomialMap",
    "ClosedFormMap",
    "evaluate",
    "frechet_differential",
    "numerical_differential",
    "multi_indices",
    "random_polynomial_map",
    "normalize_on_ball",
    "load_corpus",
    "BridgeReport",
    "differential_norm_dilatation_bridge",
    "RegularityReport",
    "bounded_regularity_check",
]

MAX_DEGREE = 6
MAX_DIM = 5


def _field_points(z, n):
    """Points of C^n as a complex array; real input with 2n columns is read as (re, im) pairs."""
    z = np.asarray(z)
    if not np.iscomplexobj(z) and z.shape[-1] == 2 * n:
        return z[..., 0::2] + 1j * z[..., 1::2]
    return z.astype(complex)


def multi_indices(n, degree):
    """Exponent vectors of total degree <= degree, graded then lexicographic."""
    out = []
    for d in range(degree + 1):
        for e in itertools.product(range(d + 1), repeat=n):
            if sum(e) == d:
                out.append(e)
    return np.asarray(out, dtype=np.int64).reshape(-1, n)


class PolynomialMap:
    """f(z)_i = sum_t coefficients[i, t] * prod_j z_j ** exponents[t, j]."""

    def __init__(self, exponents, coefficients, name="polynomial"):
        E = np.asarray(exponents, dtype=np.int64)
        C = np.asarray(coefficients, dtype=complex)
        if E.ndim != 2 or np.any(E < 0):
            raise InvalidInputError("exponents must be an (n_terms, n) array of nonnegative integers")
        if C.ndim == 1:
            C = C[None, :]
        if C.ndim != 2 or C.shape[1] != E.shape[0]:
            raise InvalidInputError("coefficients must have shape (m, n_terms)")
        if not np.all(np.isfinite(C)):
            raise InvalidInputError("coefficients must be finite")
        self.exponents = E
        self.coefficients = C
        self.n = E.shape[1]
        self.m = C.shape[0]
        self.name = name

    def __repr__(self):
        return f"PolynomialMap({self.name!r}, n={self.n}, m={self.m}, degree={self.degree})"

    @property
    def degree(self):
        return int(self.exponents.sum(axis=1).max()) if len(self.exponents) else 0

    # constructors ---------------------------------------------------------
    @classmethod
    def linear(cls, L, name="linear"):
        L = np.atleast_2d(np.asarray(L, dtype=complex))
        return cls(np.eye(L.shape[1], dtype=np.int64), L, name=name)

    @classmethod
    def identity(cls, n):
        return cls.linear(np.eye(n), name="identity")

    @classmethod
    def constant(cls, c, n=1):
        c = np.atleast_1d(np.asarray(c, dtype=complex))
        return cls(np.zeros((1, n), dtype=np.int64), c[:, None], name="constant")

    @classmethod
    def monomial(cls, power, coefficient=1.0):
        """Scalar z -> coefficient * z**power."""
        return cls([[power]], [[coefficient]], name=f"z^{power}")

    # evaluation -----------------------------------------------------------
    def _powers(self, Z):
        deg = max(self.degree, 1)
        Pw = np.ones((deg + 1,) + Z.shape, dtype=complex)
        for k in range(1, deg + 1):
            Pw[k] = Pw[k - 1] * Z
        return Pw

    def _monomials(self, Z, E):
        Pw = self._powers(Z)
        M = np.ones((Z.shape[0], len(E)), dtype=complex)
        for j in range(self.n):
            M *= Pw[E[:, j], :, j].T
        return M

    def evaluate(self, z):
        z = _field_points(z, self.n)
        single = z.ndim == 1
        Z = z[None, :] if single else z
        if Z.shape[1] != self.n:
            raise InvalidInputError(f"expected points in C^{self.n}")
        out = self._monomials(Z, self.exponents) @ self.coefficients.T
        return out[0] if single else out

    __call__ = evaluate

    def differential(self, z):
        """Exact complex Jacobian (m x n) at a single point."""
        z = check_point(_field_points(z, self.n), dim=self.n, name="z")
        return self.differential_batch(z[None, :])[0]

    def differential_batch(self, Z):
        Z = check_points(_field_points(Z, self.n), dim=self.n, name="Z")
        J = np.empty((len(Z), self.m, self.n), dtype=complex)
        for j in range(self.n):
            E = self.exponents.copy()
            factor = E[:, j].astype(float)
            E[:, j] = np.maximum(E[:, j] - 1, 0)
            J[:, :, j] = self._monomials(Z, E) @ (self.coefficients * factor[None, :]).T
        return J

    def scaled(self, c, name=None):
        return PolynomialMap(self.exponents, self.coefficients * c, name=name or self.name)

    # serialisation ----------------------------------------------------------
    def to_dict(self):
        return {
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "exponents": self.exponents.tolist(),
            "coefficients": [[[float(c.real), float(c.imag)] for c in row] for row in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data):
        C = np.asarray(data["coefficients"], dtype=float)
        E = np.asarray(data["exponents"], dtype=np.int64).reshape(-1, int(data["n"]))
        return cls(E, C[..., 0] + 1j * C[..., 1], name=data.get("name", "polynomial"))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


class ClosedFormMap:
    """A scalar analytic function on the disk with a stored derivative."""

    def __init__(self, value, derivative, name="closed_form", params=None):
        self._value = value
        self._derivative = derivative
        self.name = name
        self.params = params or {}
        self.n = 1
        self.m = 1

    @classmethod
    def power_branch(cls, alpha):
        """z -> (1 - z)**alpha = exp(alpha * Log(1 - z)), principal branch.

        Re(1 - z) > 0 on the unit disk, so the cut of Log is never crossed.
        """
        alpha = float(alpha)

        def value(z):
            return np.exp(alpha * np.log(1.0 - z))

        def derivative(z):
            return -alpha * np.exp((alpha - 1.0) * np.log(1.0 - z))

        return cls(value, derivative, name=f"power_branch({alpha:g})", params={"alpha": alpha})

    def evaluate(self, z):
        z = _field_points(z, 1)
        single = z.ndim == 1
        Z = z[None, :] if single else z
        if Z.shape[1] != 1:
            raise InvalidInputError("expected points in C^1")
        out = self._value(Z)
        return out[0] if single else out

    __call__ = evaluate

    def differential(self, z):
        z = _field_points(z, 1).reshape(-1)
        if z.size != 1:
            raise InvalidInputError("expected a point of C^1")
        return np.array([[self._derivative(z[0])]], dtype=complex)

    def differential_batch(self, Z):
        Z = _field_points(Z, 1)
        if Z.ndim != 2 or Z.shape[1] != 1:
            raise InvalidInputError("expected an (N, 1) batch of points of C^1")
        return self._derivative(Z[:, 0])[:, None, None]


def evaluate(f, z):
    return f.evaluate(z)


def frechet_differential(f, z):
    return f.differential(z)


def numerical_differential(f, z, h=1e-3):
    """Fourth-order central differences along each complex coordinate axis.

    For an analytic map the derivative along the real direction e_j equals
    the complex partial derivative, so this is an independent check on
    exact Jacobians.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    cols = []
    for j in range(len(z)):
        e = np.zeros(len(z), dtype=complex)
        e[j] = h
        F = np.asarray(f(np.stack([z + 2 * e, z + e, z - e, z - 2 * e])))
        F = F.reshape(4, -1)
        cols.append((-F[0] + 8 * F[1] - 8 * F[2] + F[3]) / (12 * h))
    return np.stack(cols, axis=1)


def normalize_on_ball(f, grid_size=4096, random_state=0, factor=1.0 + 1e-9):
    """Scale f so that sup ||f|| on the unit ball is 1/factor. Returns (map, measured sup)."""
    sup = ball_sup_norm(f.evaluate, f.n, grid_size=grid_size, random_state=random_state)
    if sup == 0:
        return f, 0.0
    return f.scaled(1.0 / (sup * factor), name=f.name), sup


def random_polynomial_map(n, m, degree, random_state=None, decay=1.0, normalize=True, name=None):
    """Random polynomial C^n -> C^m with coefficients uniform in the box [-1, 1] + i[-1, 1].

    ``decay`` < 1 damps the degree-k coefficients by decay**k, which makes
    the result look like a truncated power series. With ``normalize`` the
    map is divided by its measured sup on the ball (times 1 + 1e-9).
    """
    if not (1 <= n <= MAX_DIM and 1 <= m <= MAX_DIM):
        raise InvalidInputError(f"dimensions are capped at {MAX_DIM}")
    if not 0 <= degree <= MAX_DEGREE:
        raise InvalidInputError(f"degree is capped at {MAX_DEGREE}")
    rng = check_random_state(random_state)
    E = multi_indices(n, degree)
    C = rng.uniform(-1, 1, (m, len(E))) + 1j * rng.uniform(-1, 1, (m, len(E)))
    C *= decay ** E.sum(axis=1)[None, :]
    f = PolynomialMap(E, C, name=name or f"random_poly(n={n},m={m},deg={degree})")
    if normalize:
        f, _ = normalize_on_ball(f, random_state=rng.integers(2**31))
    return f


def load_corpus():
    """The fixed polynomial corpus shipped with the package, keyed by id."""
    text = resources.files("lipdist").joinpath("data/polynomials.json").read_text()
    return {k: PolynomialMap.from_dict(v) for k, v in json.loads(text).items()}


@dataclass
class BridgeReport:
    differential_norm: float
    dilatation: float
    gap: float
    tolerance: float
    profile: list = field(default_factory=list)

    @property
    def passed(self):
        return self.gap <= self.tolerance

    def to_dict(self):
        return {"differential_norm": self.differential_norm, "dilatation": self.dilatation,
                "gap": self.gap, "tolerance": self.tolerance, "passed": self.passed}


def differential_norm_dilatation_bridge(f, z, radii=DEFAULT_RADII[-2:], tolerance=1e-3, random_state=0):
    """|‖df(z)‖ - d*f(z)|, with d*f estimated on spheres down to radius 1e-4."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    exact = operator_norm(f.differential(z))
    est = upper_dilatation(f.evaluate, z, radii, random_state=random_state)
    return BridgeReport(exact, est.value, abs(exact - est.value), tolerance, est.profile)


@dataclass
class RegularityReport:
    p: int
    constant: float
    infinite: bool
    tolerance: float
    witness: dict = field(default_factory=dict)

    @property
    def passed(self):
        return (not self.infinite) and self.constant <= 1.0 + self.tolerance

    def to_dict(self):
        return {"p": self.p, "constant": self.constant, "infinite": self.infinite,
                "tolerance": self.tolerance, "witness": self.witness, "passed": self.passed}


def bounded_regularity_check(f, domain, target_dim, centers, radius_fractions=RADIUS_FRACTIONS,
                             tolerance=1e-3, random_state=0):
    """Measured p-regularity constant with A = {0} and weight d(., boundary).

    p = 1 for scalar maps and p = 2 otherwise; the measured constant is
    compared with 1.
    """
    p = 1 if target_dim == 1 else 2
    w = WeightField.boundary_distance(domain)
    est = p_regular_constant(f.evaluate, w, TargetSet.origin(), p, centers, radius_fractions,
                             random_state=random_state)
    return RegularityReport(p, est.value, est.infinite, tolerance, est.witness)
