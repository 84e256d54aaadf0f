"""Numerical checks of the Lipschitz-class inequalities on sampled instances.

Each verify_* function measures the two sides of one inequality with the
estimators of :mod:`lipdist.lipschitz` and returns a :class:`TheoremCheck`.

Bias policy. Sampled seminorms and dilatation maxima are lower bounds. A
left-hand side that is a lower bound errs on the safe side and gets no
slack. A right-hand side built from lower bounds can be too small, so it is
multiplied by (1 + slack) unless the check carries an explicit annotation
explaining why no slack is needed. :func:`bias_policy_ok` enforces this.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_real, check_points
from .exceptions import InvalidInputError, PreconditionError
from .functions import Majorant, WeightField, majorant_validate
from .lipschitz import (
    DEFAULT_RADII,
    TargetSet,
    as_sampled_map,
    bloch_norm,
    holder_seminorm,
    local_holder_seminorm,
    modulus_power_function,
    p_regular_constant,
    regular_oscillation_constant,
)
from .metric import GridGraph
from .moebius import operator_norms

__all__ = [
    "DEFAULT_SLACK",
    "TheoremCheck",
    "bias_policy_ok",
    "uniform_weight_constant",
    "half_weight_constant",
    "dyakonov_constant",
    "grid_differential_constant",
    "weighted_distance_certificate",
    "verify_pr1",
    "verify_pr2",
    "verify_hardy_littlewood_uniform",
    "verify_main_theorem",
    "verify_dyakonov_dim1",
    "verify_dyakonov_higher",
    "triangle_remark_check",
]

DEFAULT_SLACK = 0.05
SAFE_LHS = ("lower", "exact")
SAFE_RHS = ("upper", "exact")


@dataclass
class TheoremCheck:
    """Measured sides of one inequality LHS <= RHS.

    ``bias`` records the sampling bias of each side ("lower", "upper" or
    "exact"), the slack factor applied to the right-hand side and an
    optional annotation.
    """

    name: str
    inputs: dict
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tolerance: float
    witness: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    bias: dict = field(default_factory=dict)

    @classmethod
    def make(cls, name, inputs, lhs, rhs, tolerance=1e-9, witness=None, constants=None,
             lhs_bias="lower", rhs_bias="lower", slack=0.0, annotation=""):
        lhs, rhs = float(lhs), float(rhs)
        if not (np.isfinite(lhs) and np.isfinite(rhs)):
            raise InvalidInputError(f"{name}: non-finite side (lhs={lhs}, rhs={rhs})")
        margin = rhs - lhs
        bias = {"lhs": lhs_bias, "rhs": rhs_bias, "slack": float(slack), "annotation": annotation}
        return cls(name, dict(inputs), lhs, rhs, margin, bool(margin >= -tolerance), float(tolerance),
                   witness or {}, constants or {}, bias)

    def to_dict(self):
        return {"name": self.name, "inputs": self.inputs, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "passed": self.passed, "tolerance": self.tolerance,
                "witness": self.witness, "constants": self.constants, "bias": self.bias}


def bias_policy_ok(check):
    """True if the inequality cannot fail just because sampling was too sparse."""
    b = check.bias
    if b.get("lhs") not in SAFE_LHS:
        return bool(b.get("annotation"))
    if b.get("rhs") in SAFE_RHS:
        return True
    return b.get("slack", 0.0) > 0 or bool(b.get("annotation"))


# constants ---------------------------------------------------------------


def uniform_weight_constant(c, beta):
    """M with  int d^(beta-1) <= M |x - y|^beta  on a c-uniform domain: 2c/beta."""
    return 2.0 * c / beta


def half_weight_constant(c, beta):
    """The same bound for the weight (d/2)^(beta-1); 2^(1-beta) <= 2 is used."""
    return 2.0 * uniform_weight_constant(c, beta)


def dyakonov_constant(c, alpha, p):
    """M_beta * K with beta = alpha/p, the half weight and K = 1."""
    return half_weight_constant(c, alpha / p) * 1.0


def _complex_points(P):
    P = np.asarray(P, dtype=float)
    return P[:, 0::2] + 1j * P[:, 1::2]


def grid_differential_constant(f, domain, alpha, spacing=1.0 / 256, margin=None):
    """max over a lattice of ||df(z)|| d(z, boundary)^(1 - alpha), with the exact differential."""
    P = domain.grid_points(spacing, margin=spacing if margin is None else margin)
    Z = _complex_points(P)
    J = f.differential_batch(Z)
    norms = operator_norms(J)
    vals = norms * domain.boundary_distance(P) ** (1.0 - alpha)
    k = int(np.argmax(vals))
    return float(vals[k]), {"z": P[k].tolist(), "grid_points": len(P)}


def weighted_distance_certificate(domain, weight, beta, X, Y, spacing=None):
    """max over pairs of d_w(x, y) / |x - y|^beta, with d_w bounded above on a grid graph."""
    grid = GridGraph(domain, weight, spacing=spacing)
    X = as_real(check_points(X))
    Y = as_real(check_points(Y, dim=X.shape[1]))
    worst, wit = 0.0, {}
    for x, y in zip(X, Y):
        sep = float(np.linalg.norm(x - y))
        if sep == 0:
            continue
        q = grid.distances(x, y[None, :])[0] / sep**beta
        if q > worst:
            worst, wit = float(q), {"x": x.tolist(), "y": y.tolist()}
    return worst, wit


# checks ------------------------------------------------------------------


def verify_pr1(f, domain, w, phi, M, certificate, pairs, bloch_points, radii=DEFAULT_RADII,
               slack=DEFAULT_SLACK, random_state=0, inputs=None):
    """Hölder seminorm against M times the Bloch norm.

    ``certificate`` is the report of the integral condition for the weight
    phi(d)/d with the same M; without a passing certificate the hypothesis
    is not established and PreconditionError is raised.
    """
    if certificate is None or not certificate.passed:
        raise PreconditionError("integral condition is not certified")
    if certificate.M > M * (1 + 1e-12):
        raise PreconditionError("certificate was issued for a larger constant")
    lhs = holder_seminorm(f, pairs[0], pairs[1], phi)
    b = bloch_norm(f, w, bloch_points, radii, domain=domain, relative=True, random_state=random_state)
    rhs = M * b.value * (1 + slack)
    return TheoremCheck.make("pr1", inputs or {}, lhs.value, rhs, witness={"lhs": lhs.witness, "rhs": b.witness},
                             constants={"M": M, "bloch": b.value, "certificate_ratio": certificate.worst_ratio},
                             slack=slack)


def verify_pr2(f, alpha, w, pairs, bloch_points, centers, domain=None, radii=DEFAULT_RADII,
               slack=DEFAULT_SLACK, random_state=0, inputs=None):
    """Bloch norm for the weight phi'(w) against A K times the Hölder seminorm."""
    phi = Majorant.standard(alpha)
    A = (1.0 + 1e-6) / alpha
    diag = majorant_validate(phi, np.geomspace(1e-6, 10.0, 200))
    if diag.best_A > A:
        raise PreconditionError(f"majorant needs A = {diag.best_A}, more than {A}")
    K = regular_oscillation_constant(f, w, centers, random_state=random_state)
    if K.infinite:
        raise PreconditionError("regular-oscillation constant is infinite")
    lhs = bloch_norm(f, w.compose_majorant_derivative(phi), bloch_points, radii, domain=domain,
                     relative=domain is not None, random_state=random_state)
    C = holder_seminorm(f, pairs[0], pairs[1], phi)
    rhs = A * K.value * C.value * (1 + slack)
    return TheoremCheck.make("pr2", inputs or {}, lhs.value, rhs,
                             witness={"lhs": lhs.witness, "rhs": C.witness, "K": K.witness},
                             constants={"A": A, "K": K.value, "holder": C.value}, slack=slack,
                             lhs_bias="lower",
                             annotation="" if slack > 0 else "no slack requested")


def verify_hardy_littlewood_uniform(f, domain, c, alpha, pairs, spacing=1.0 / 256,
                                    slack=DEFAULT_SLACK, upper_slack=0.0, inputs=None):
    """Both directions between C_f (differential growth) and C'_f (Hölder seminorm).

    Returns (upper, lower) checks: C'_f <= (2c/alpha) C_f and C_f <= C'_f.
    The upper direction is run without slack by default; the structural
    constant 2c/alpha is far from sharp, which the annotation records.
    """
    Cf, wit_f = grid_differential_constant(f, domain, alpha, spacing)
    Cp = holder_seminorm(f, pairs[0], pairs[1], Majorant.standard(alpha))
    const = 2.0 * c / alpha
    consts = {"C_f": Cf, "C_prime_f": Cp.value, "2c/alpha": const}
    upper = TheoremCheck.make("hardy_littlewood_upper", inputs or {}, Cp.value, const * Cf * (1 + upper_slack),
                              witness={"lhs": Cp.witness, "rhs": wit_f}, constants=consts,
                              slack=upper_slack,
                              annotation="" if upper_slack > 0 else "constant 2c/alpha dominates the grid bias")
    lower = TheoremCheck.make("hardy_littlewood_lower", inputs or {}, Cf, Cp.value * (1 + slack),
                              witness={"lhs": wit_f, "rhs": Cp.witness}, constants=consts, slack=slack)
    return upper, lower


def verify_main_theorem(f, domain, A, p, alpha, w, M_beta, pairs, centers, certificate_pairs,
                        local_centers=None, per_center_samples=64, spacing=None,
                        slack=DEFAULT_SLACK, random_state=0, inputs=None):
    """Hölder seminorm of order alpha/p against M_beta K L^(1/p).

    K is the measured p-regularity constant and L the local Hölder seminorm
    of d(f, A)^p for the weight w. The hypothesis on d_{w^(beta-1)} is
    certified on ``certificate_pairs`` with grid-graph upper bounds.
    """
    if not isinstance(A, TargetSet):
        A = TargetSet.finite(A)
    beta = alpha / p
    wb = WeightField(lambda X: w(X) ** (beta - 1.0), kind="power_of_weight", params={"exponent": beta - 1.0})
    ratio, cert_wit = weighted_distance_certificate(domain, wb, beta, *certificate_pairs, spacing=spacing)
    if ratio > M_beta:
        raise PreconditionError(f"weighted-distance condition fails: ratio {ratio} > {M_beta}")
    K = p_regular_constant(f, w, A, p, centers, random_state=random_state)
    if K.infinite:
        raise PreconditionError("p-regularity constant is infinite")
    g = modulus_power_function(f, A, p)
    L = local_holder_seminorm(g, w, local_centers if local_centers is not None else centers,
                              per_center_samples, alpha=alpha, random_state=random_state, domain=domain)
    lhs = holder_seminorm(f, pairs[0], pairs[1], Majorant.standard(beta))
    rhs = M_beta * K.value * L.value ** (1.0 / p) * (1 + slack)
    return TheoremCheck.make("main_theorem", inputs or {}, lhs.value, rhs,
                             witness={"lhs": lhs.witness, "rhs": L.witness, "K": K.witness, "certificate": cert_wit},
                             constants={"M_beta": M_beta, "K": K.value, "L": L.value, "beta": beta,
                                        "certificate_ratio": ratio},
                             slack=slack)


def verify_dyakonov_dim1(f, domain, c, alpha, pairs, centers, per_center_samples=64,
                         slack=DEFAULT_SLACK, random_state=0, inputs=None):
    """Hölder seminorm of a bounded scalar analytic map against that of |f| locally."""
    const = dyakonov_constant(c, alpha, 1)
    if abs(const - 4.0 * c / alpha) > 1e-12 * const:
        raise AssertionError("constant chain disagrees with 4c/alpha")
    w = WeightField.half_boundary_distance(domain)
    g = modulus_power_function(f, TargetSet.origin(), 1)
    L = local_holder_seminorm(g, w, centers, per_center_samples, alpha=alpha,
                              random_state=random_state, domain=domain)
    lhs = holder_seminorm(f, pairs[0], pairs[1], Majorant.standard(alpha))
    rhs = const * L.value * (1 + slack)
    return TheoremCheck.make("dyakonov_dim1", inputs or {}, lhs.value, rhs,
                             witness={"lhs": lhs.witness, "rhs": L.witness},
                             constants={"constant": const, "local": L.value}, slack=slack)


def verify_dyakonov_higher(f, domain, c, alpha, pairs, centers, per_center_samples=64,
                           slack=DEFAULT_SLACK, random_state=0, inputs=None):
    """Order alpha/2 seminorm of f against the local seminorm of ||f||^2."""
    const = dyakonov_constant(c, alpha, 2)
    if abs(const - 8.0 * c / alpha) > 1e-12 * const:
        raise AssertionError("constant chain disagrees with 8c/alpha")
    w = WeightField.half_boundary_distance(domain)
    g = modulus_power_function(f, TargetSet.origin(), 2)
    L = local_holder_seminorm(g, w, centers, per_center_samples, alpha=alpha,
                              random_state=random_state, domain=domain)
    lhs = holder_seminorm(f, pairs[0], pairs[1], Majorant.standard(alpha / 2.0))
    rhs = const * np.sqrt(L.value) * (1 + slack)
    return TheoremCheck.make("dyakonov_higher", inputs or {}, lhs.value, rhs,
                             witness={"lhs": lhs.witness, "rhs": L.witness},
                             constants={"constant": const, "local": L.value}, slack=slack)


def triangle_remark_check(f, A, X, Y, tolerance=1e-12, inputs=None):
    """max over pairs of |d(f(x), A) - d(f(y), A)| - d(f(x), f(y)), which must be <= 0."""
    f = as_sampled_map(f)
    if not isinstance(A, TargetSet):
        A = TargetSet.finite(A)
    FX, FY = f(X), f(Y)
    excess = np.abs(A.distance(FX) - A.distance(FY)) - f.distance(FX, FY)
    k = int(np.argmax(excess)) if len(excess) else 0
    lhs = float(excess[k]) if len(excess) else 0.0
    wit = {"x": as_real(np.asarray(X)[k]).tolist(), "y": as_real(np.asarray(Y)[k]).tolist()} if len(excess) else {}
    return TheoremCheck.make("triangle_remark", inputs or {}, lhs, 0.0, tolerance=tolerance, witness=wit,
                             constants={"pairs": len(excess)}, lhs_bias="exact", rhs_bias="exact")
