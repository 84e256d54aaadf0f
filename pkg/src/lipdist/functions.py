"""Majorants and weight functions.

Both are thin wrappers around vectorised callables. A majorant maps
distances t >= 0 to phi(t); a weight maps a batch of points of shape
(n, dim) to strictly positive values of shape (n,).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._validation import check_finite, check_points
from .exceptions import EvaluationError, InvalidInputError

__all__ = ["Majorant", "MajorantDiagnostics", "WeightField", "majorant_validate"]


@dataclass(frozen=True)
class Majorant:
    """A modulus of continuity phi together with its derivative."""

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"
    alpha: float | None = None

    @classmethod
    def standard(cls, alpha):
        """phi(t) = t**alpha."""
        alpha = float(alpha)
        if not alpha > 0:
            raise InvalidInputError(f"alpha must be positive, got {alpha}")

        def value(t):
            return np.power(np.asarray(t, dtype=float), alpha)

        def derivative(t):
            return alpha * np.power(np.asarray(t, dtype=float), alpha - 1.0)

        return cls(value, derivative, kind="standard_alpha", alpha=alpha)

    @classmethod
    def custom(cls, value, derivative):
        return cls(value, derivative, kind="custom")

    def __call__(self, t):
        return self.value(t)

    def describe(self):
        if self.kind == "standard_alpha":
            return {"kind": self.kind, "alpha": self.alpha}
        return {"kind": self.kind}


@dataclass(frozen=True)
class MajorantDiagnostics:
    vanishes_at_zero: bool
    positive: bool
    increasing: bool
    derivative_decreasing: bool
    best_A: float
    valid: bool


def majorant_validate(phi, grid, slack=1e-9):
    """Check the majorant axioms on a grid of positive distances.

    ``best_A`` is the smallest A with phi(t)/t <= A*phi'(t) on the grid; the
    strict inequality of the definition is relaxed by ``slack`` because
    strictness is not observable in floating point.
    """
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise InvalidInputError("grid must be strictly increasing and positive")
    v = np.asarray(phi.value(t), dtype=float)
    dv = np.asarray(phi.derivative(t), dtype=float)
    v0 = float(np.asarray(phi.value(np.array([0.0])), dtype=float)[0])
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(dv)) and np.isfinite(v0)):
        raise EvaluationError("majorant produced non-finite values on the grid")
    vanishes = abs(v0) <= slack
    positive = bool(np.all(v > 0))
    increasing = bool(np.all(np.diff(v) >= -slack * np.maximum(1.0, np.abs(v[1:]))))
    decreasing = bool(np.all(np.diff(dv) <= slack * np.maximum(1.0, np.abs(dv[1:]))))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (v / t) / dv
    best_A = float(np.max(ratio)) if np.all(dv > 0) else float("inf")
    return MajorantDiagnostics(
        vanishes_at_zero=vanishes,
        positive=positive,
        increasing=increasing,
        derivative_decreasing=decreasing,
        best_A=best_A,
        valid=vanishes and positive and increasing and decreasing,
    )


@dataclass(frozen=True)
class WeightField:
    """A strictly positive function on a domain."""

    func: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, X):
        X = check_points(X)
        w = np.asarray(self.func(X), dtype=float).reshape(-1)
        if w.shape[0] != X.shape[0]:
            raise EvaluationError(f"weight returned {w.shape[0]} values for {X.shape[0]} points")
        check_finite(w, "weight value")
        if np.any(w <= 0):
            raise EvaluationError("weight must be strictly positive")
        return w

    @classmethod
    def constant(cls, c=1.0):
        c = float(c)
        if not c > 0:
            raise InvalidInputError("constant weight must be positive")
        return cls(lambda X: np.full(len(X), c), kind="constant", params={"c": c})

    @classmethod
    def boundary_distance(cls, domain, scale=1.0):
        """w(x) = scale * d(x, boundary)."""
        return cls.power(domain, 1.0, scale=scale)

    @classmethod
    def half_boundary_distance(cls, domain):
        w = cls.power(domain, 1.0, scale=0.5)
        return cls(w.func, kind="half_boundary_distance", params={"scale": 0.5})

    @classmethod
    def power(cls, domain, exponent, scale=1.0):
        """w(x) = (scale * d(x, boundary)) ** exponent."""
        exponent = float(exponent)
        scale = float(scale)

        def func(X):
            return np.power(scale * domain.boundary_distance(X), exponent)

        kind = "boundary_distance" if exponent == 1.0 and scale == 1.0 else "power"
        return cls(func, kind=kind, params={"exponent": exponent, "scale": scale})

    @classmethod
    def quasi_hyperbolic(cls, domain):
        w = cls.power(domain, -1.0)
        return cls(w.func, kind="quasi_hyperbolic", params={"exponent": -1.0, "scale": 1.0})

    @classmethod
    def custom(cls, func):
        return cls(func, kind="custom")

    def compose_majorant_derivative(self, phi):
        """The weight phi'(w(x))."""
        return WeightField(
            lambda X: phi.derivative(self(X)),
            kind="majorant_derivative",
            params={"inner": self.kind, **phi.describe()},
        )
