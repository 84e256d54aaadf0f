"""The registry of suite checks and the orchestrator that runs them.

A check is a function (config, rng) -> list of TheoremCheck. Each check gets
its own generator seeded from (master seed, crc32 of the check name), so
selecting a subset of checks never changes the numbers of the others.
"""
from __future__ import annotations

import time
import traceback
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytic import (
    ClosedFormMap,
    bounded_regularity_check,
    differential_norm_dilatation_bridge,
    normalize_on_ball,
    random_polynomial_map,
)
from .domains import (
    DiscretizedDomain,
    cone_arc_family,
    lappalainen_condition_check,
    required_uniform_constant,
    uniform_integral_check,
)
from .exceptions import EvaluationError
from .functions import Majorant, WeightField
from .harness import (
    TheoremCheck,
    half_weight_constant,
    triangle_remark_check,
    uniform_weight_constant,
    verify_dyakonov_dim1,
    verify_dyakonov_higher,
    verify_hardy_littlewood_uniform,
    verify_main_theorem,
    verify_pr1,
    verify_pr2,
)
from .lipschitz import TabulatedMap, TargetSet
from .metric import GridGraph
from .moebius import MoebiusTransform, operator_norm, schwarz_pick_check

__all__ = ["CHECKS", "CheckSpec", "VerificationReport", "check_rng", "run_check", "run_suite"]

NORMALIZE_FACTOR = 1.0 + 1e-9


@dataclass(frozen=True)
class CheckSpec:
    name: str
    description: str
    func: object


CHECKS = {}


def register(name, description):
    def deco(func):
        CHECKS[name] = CheckSpec(name, description, func)
        return func

    return deco


def check_rng(seed, name):
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def _label(check, group, label, **inputs):
    check.name = f"{group}/{label}"
    check.inputs = {**inputs, **check.inputs}
    return check


def _ball_points(rng, count, n, radius=1.0):
    """Uniform points of the ball of radius ``radius`` in C^n."""
    g = rng.standard_normal((count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / (2 * n))
    g *= r[:, None]
    return g[:, :n] + 1j * g[:, n:]


def _seed(rng):
    return int(rng.integers(2**31))


# Möbius transforms ---------------------------------------------------------


@register("moebius_involution", "phi_a(phi_a(z)) = z and phi_a(0) = a on the unit ball of C^n")
def _moebius_involution(cfg, rng):
    c = cfg["moebius"]
    out = []
    for n in c["involution_dims"]:
        A = _ball_points(rng, c["samples"], n)
        Z = _ball_points(rng, c["samples"], n)
        inv, cen = 0.0, 0.0
        for a, z in zip(A, Z):
            T = MoebiusTransform(a)
            inv = max(inv, float(np.linalg.norm(T(T(z)) - z)))
            cen = max(cen, float(np.linalg.norm(T(np.zeros(n, dtype=complex)) - a)))
        inputs = {"n": n, "samples": c["samples"]}
        out.append(_label(TheoremCheck.make("involution", inputs, inv, c["involution_tolerance"], tolerance=0.0,
                                            lhs_bias="exact", rhs_bias="exact"),
                          "moebius_involution", f"n={n},involution"))
        out.append(_label(TheoremCheck.make("centre", inputs, cen, c["centre_tolerance"], tolerance=0.0,
                                            lhs_bias="exact", rhs_bias="exact"),
                          "moebius_involution", f"n={n},centre"))
    return out


@register("moebius_differential_norm", "norm of the differential of phi_a at 0 against its closed form")
def _moebius_differential_norm(cfg, rng):
    c = cfg["moebius"]
    radii = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95]
    out = []
    for n in c["norm_dims"]:
        worst, wit = 0.0, {}
        for r in radii:
            u = _ball_points(rng, 1, n)[0]
            a = r * u / np.linalg.norm(u)
            T = MoebiusTransform(a)
            err = abs(operator_norm(T.differential_at_zero(), random_state=rng) - T.expected_differential_norm())
            if err >= worst:
                worst, wit = err, {"norm_a": r}
        chk = TheoremCheck.make("differential_norm", {"n": n, "radii": radii}, worst, c["norm_tolerance"],
                                tolerance=0.0, witness=wit, lhs_bias="exact", rhs_bias="exact")
        out.append(_label(chk, "moebius_differential_norm", f"n={n}"))
    return out


@register("schwarz_pick_battery", "||df(0)|| against the Schwarz-Pick bound for normalized polynomial maps")
def _schwarz_pick_battery(cfg, rng):
    c = cfg["schwarz_pick"]
    out = []
    for n in c["source_dims"]:
        for m in c["target_dims"]:
            worst, wit, chain_ok = -np.inf, {}, True
            for k in range(c["maps"]):
                degree = int(rng.integers(1, c["max_degree"] + 1))
                raw = random_polynomial_map(n, m, degree, rng, normalize=False)
                f, sup = normalize_on_ball(raw, random_state=_seed(rng), factor=NORMALIZE_FACTOR)
                measured = 1.0 / NORMALIZE_FACTOR if sup > 0 else 0.0
                rep = schwarz_pick_check(f, n, m, sup_norm=measured, tolerance=c["tolerance"])
                chain_ok &= rep.chain_passed
                excess = rep.differential_norm - rep.bound
                if excess > worst:
                    worst, wit = excess, {"map": k, "degree": degree, "value_norm": rep.value_norm,
                                          "differential_norm": rep.differential_norm, "bound": rep.bound}
            chk = TheoremCheck.make("schwarz_pick", {"n": n, "m": m, "maps": c["maps"]}, worst, 0.0,
                                    tolerance=c["tolerance"], witness=wit,
                                    constants={"chain_rule_consistent": bool(chain_ok)},
                                    lhs_bias="exact", rhs_bias="exact")
            out.append(_label(chk, "schwarz_pick_battery", f"n={n},m={m}"))
    return out


# metric geometry -------------------------------------------------------------


@register("quasi_hyperbolic_disk", "grid quasi-hyperbolic distance from 0 against log(1/(1-r))")
def _quasi_hyperbolic_disk(cfg, rng):
    c = cfg["quasi_hyperbolic"]
    D = DiscretizedDomain.unit_disk(grid_spacing=c["spacing"])
    grid = GridGraph(D, WeightField.quasi_hyperbolic(D))
    R = np.asarray(c["radii"], dtype=float)
    got = grid.distances(np.zeros(2), np.stack([R, np.zeros_like(R)], axis=1))
    exact = np.log(1.0 / (1.0 - R))
    rel = np.abs(got - exact) / exact
    k = int(np.argmax(rel))
    chk = TheoremCheck.make("quasi_hyperbolic", {"spacing": c["spacing"], "radii": c["radii"]}, float(rel[k]),
                            c["relative_tolerance"], tolerance=0.0,
                            witness={"r": float(R[k]), "grid": float(got[k]), "exact": float(exact[k])},
                            constants={"grid_values": got.tolist()}, lhs_bias="exact", rhs_bias="exact")
    return [_label(chk, "quasi_hyperbolic_disk", "radial")]


@register("uniform_domain_lemma", "cone arcs on the disk: uniformity constant and the integral bound")
def _uniform_domain_lemma(cfg, rng):
    c = cfg["uniform"]
    D = DiscretizedDomain.unit_disk()
    family = cone_arc_family(D)
    X, Y = D.sample_pairs(c["pairs"], rng, margin=1e-6)
    ci, cii, wit = 0.0, 0.0, {}
    for x, y in zip(X, Y):
        a, b = required_uniform_constant(D, family(x, y)[0], x, y)
        if max(a, b) > max(ci, cii):
            wit = {"x": x.tolist(), "y": y.tolist()}
        ci, cii = max(ci, a), max(cii, b)
    out = [_label(TheoremCheck.make("uniformity", {"pairs": c["pairs"]}, max(ci, cii), c["c"], tolerance=0.0,
                                    witness=wit, constants={"c_i": ci, "c_ii": cii},
                                    rhs_bias="exact"),
                  "uniform_domain_lemma", "cone_arcs")]
    for alpha in c["alphas"]:
        rep = uniform_integral_check(D, family, alpha, c["integral_c"], X, Y)
        if rep.divergent_pairs:
            raise EvaluationError(f"{rep.divergent_pairs} arcs touch the boundary")
        chk = TheoremCheck.make("integral_bound", {"pairs": c["pairs"], "alpha": alpha, "c": c["integral_c"]},
                                rep.worst_ratio, 1.0, tolerance=rep.tolerance, witness=rep.witness,
                                constants={"M": uniform_weight_constant(c["integral_c"], alpha)},
                                rhs_bias="exact")
        out.append(_label(chk, "uniform_domain_lemma", f"alpha={alpha!r}"))
    return out


# analytic maps ------------------------------------------------------------------


@register("hardy_littlewood_disk", "growth of the differential against the Hölder seminorm for (1-z)^alpha")
def _hardy_littlewood_disk(cfg, rng):
    c = cfg["hardy_littlewood"]
    D = DiscretizedDomain.unit_disk()
    out = []
    for alpha in c["alphas"]:
        f = ClosedFormMap.power_branch(alpha)
        pairs = D.sample_pairs(c["pairs"], rng)
        inputs = {"map": f.name, "alpha": alpha, "c": c["c"], "pairs": c["pairs"], "grid_spacing": c["grid_spacing"]}
        up, lo = verify_hardy_littlewood_uniform(f, D, c["c"], alpha, pairs, spacing=c["grid_spacing"],
                                                 slack=cfg["tolerance"]["slack"], inputs=inputs)
        out.append(_label(up, "hardy_littlewood_disk", f"alpha={alpha!r},upper"))
        out.append(_label(lo, "hardy_littlewood_disk", f"alpha={alpha!r},lower"))
    return out


def _regularity_cases(rng, count, degree):
    """Normalized random maps with their domains, scalar first then vector valued."""
    disk = DiscretizedDomain.unit_disk()
    ball2 = DiscretizedDomain.complex_ball(2)
    scalar = [(random_polynomial_map(1, 1, degree, rng), disk) for _ in range(count)]
    vector = []
    for k in range(count):
        if k % 2 == 0:
            vector.append((random_polynomial_map(1, 2, degree, rng), disk))
        else:
            vector.append((random_polynomial_map(2, 3, min(degree, 3), rng), ball2))
    return scalar, vector


@register("regularity_constants", "measured p-regularity constant of bounded polynomial maps against K = 1")
def _regularity_constants(cfg, rng):
    c = cfg["regularity"]
    scalar, vector = _regularity_cases(rng, c["maps"], c["degree"])
    out = []
    for p, cases in ((1, scalar), (2, vector)):
        worst, wit = 0.0, {}
        for k, (f, D) in enumerate(cases):
            centers = D.sample(c["centers"], rng, margin=1e-3)
            rep = bounded_regularity_check(f, D, f.m, centers, tolerance=c["tolerance"], random_state=_seed(rng))
            if rep.infinite:
                raise EvaluationError(f"infinite regularity constant for map {k}")
            if rep.constant > worst:
                worst, wit = rep.constant, {"map": k, "n": f.n, "m": f.m, **rep.witness}
        chk = TheoremCheck.make("regularity", {"p": p, "maps": c["maps"], "centers": c["centers"],
                                               "degree": c["degree"], "weight": "d"},
                                worst, 1.0, tolerance=c["tolerance"], witness=wit, constants={"K": worst},
                                lhs_bias="upper", rhs_bias="exact",
                                annotation="explicit tolerance on the claimed constant")
        out.append(_label(chk, "regularity_constants", f"p={p}"))
    return out


def _worst(checks):
    """The check with the smallest relative margin."""
    return min(checks, key=lambda ch: ch.margin / max(abs(ch.rhs), 1e-300))


@register("dyakonov_corollaries", "Hölder seminorm of f against the local seminorm of |f| or ||f||^2")
def _dyakonov_corollaries(cfg, rng):
    c = cfg["dyakonov"]
    slack = cfg["tolerance"]["slack"]
    disk = DiscretizedDomain.unit_disk()
    ball2 = DiscretizedDomain.complex_ball(2)
    scalar = [random_polynomial_map(1, 1, 4, rng) for _ in range(c["maps"])]
    vector = [random_polynomial_map(1, 2, 2, rng) if k % 2 == 0 else random_polynomial_map(2, 3, 2, rng)
              for k in range(c["maps"])]
    out = []
    for alpha in c["alphas"]:
        for case, maps, verify in (("dim1", scalar, verify_dyakonov_dim1), ("higher", vector, verify_dyakonov_higher)):
            checks = []
            for k, f in enumerate(maps):
                D = disk if f.n == 1 else ball2
                pairs = D.sample_pairs(c["pairs"], rng, margin=1e-6)
                centers = D.sample(c["centers"], rng, margin=1e-3)
                inputs = {"map": k, "n": f.n, "m": f.m, "alpha": alpha, "c": c["c"], "pairs": c["pairs"],
                          "centers": c["centers"]}
                checks.append(verify(f, D, c["c"], alpha, pairs, centers, slack=slack,
                                     random_state=_seed(rng), inputs=inputs))
            chk = _worst(checks)
            chk.constants["maps"] = len(checks)
            chk.constants["failed_maps"] = sum(not ch.passed for ch in checks)
            chk.passed = all(ch.passed for ch in checks)
            out.append(_label(chk, "dyakonov_corollaries", f"{case},alpha={alpha!r}"))
    return out


@register("triangle_remark", "|d(f(x),A) - d(f(y),A)| <= d(f(x),f(y)) for arbitrary tabulated maps")
def _triangle_remark(cfg, rng):
    n = cfg["triangle"]["pairs"]
    P = rng.uniform(-1, 1, (2 * n, 2))
    V = rng.standard_normal((2 * n, 3)) + 1j * rng.standard_normal((2 * n, 3))
    f = TabulatedMap(P, V, name="random_table")
    i = rng.permutation(2 * n)
    X, Y = P[i[:n]], P[i[n:]]
    sets = {"finite": TargetSet.finite(rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))),
            "sphere": TargetSet.sphere(0.7), "origin": TargetSet.origin()}
    out = []
    for label, A in sets.items():
        chk = triangle_remark_check(f, A, X, Y, inputs={"pairs": n, "set": A.describe()})
        out.append(_label(chk, "triangle_remark", label))
    return out


@register("frechet_bridge", "operator norm of the exact differential against the sampled upper dilatation")
def _frechet_bridge(cfg, rng):
    c = cfg["frechet"]
    shapes = [(1, 1, 4), (1, 2, 3), (2, 1, 3), (2, 3, 3), (3, 2, 2)]
    per_map = int(np.ceil(c["points"] / c["maps"]))
    worst, wit, count = 0.0, {}, 0
    for k in range(c["maps"]):
        n, m, degree = shapes[k % len(shapes)]
        f = random_polynomial_map(n, m, degree, rng)
        for z in _ball_points(rng, min(per_map, c["points"] - count), n, radius=0.9):
            rep = differential_norm_dilatation_bridge(f, z, tolerance=c["tolerance"], random_state=_seed(rng))
            count += 1
            if rep.gap >= worst:
                worst, wit = rep.gap, {"map": k, "n": n, "m": m, "z": np.concatenate([z.real, z.imag]).tolist(),
                                       "differential_norm": rep.differential_norm, "dilatation": rep.dilatation}
    chk = TheoremCheck.make("frechet", {"maps": c["maps"], "points": count, "smallest_radius": 1e-4},
                            worst, c["tolerance"], tolerance=0.0, witness=wit, lhs_bias="exact", rhs_bias="exact")
    return [_label(chk, "frechet_bridge", "gap")]


# weighted Lipschitz classes ---------------------------------------------------


@register("pr1", "Hölder seminorm against M times the Bloch norm under the integral condition")
def _pr1(cfg, rng):
    c = cfg["propositions"]
    D = DiscretizedDomain.unit_disk()
    family = cone_arc_family(D)
    out = []
    for alpha in c["alphas"]:
        f = ClosedFormMap.power_branch(alpha)
        phi = Majorant.standard(alpha)
        M = uniform_weight_constant(c["c"], alpha)
        Xc, Yc = D.sample_pairs(c["certificate_pairs"], rng, margin=1e-3)
        cert = lappalainen_condition_check(D, phi, family, M, Xc, Yc)
        pairs = D.sample_pairs(c["pairs"], rng, margin=1e-6)
        points = D.sample(c["bloch_points"], rng, margin=1e-4, boundary_layer=0.5)
        inputs = {"map": f.name, "alpha": alpha, "c": c["c"], "pairs": c["pairs"], "bloch_points": c["bloch_points"],
                  "weight": "d^(alpha-1)"}
        chk = verify_pr1(f, D, WeightField.power(D, alpha - 1.0), phi, M, cert, pairs, points,
                         slack=cfg["tolerance"]["slack"], random_state=_seed(rng), inputs=inputs)
        out.append(_label(chk, "pr1", f"alpha={alpha!r}"))
    return out


@register("pr2", "Bloch norm for the weight phi'(d) against A K times the Hölder seminorm")
def _pr2(cfg, rng):
    c = cfg["propositions"]
    D = DiscretizedDomain.unit_disk()
    out = []
    for alpha in c["alphas"]:
        f = ClosedFormMap.power_branch(alpha)
        pairs = D.sample_pairs(c["pairs"], rng, margin=1e-6)
        points = D.sample(c["bloch_points"], rng, margin=1e-4, boundary_layer=0.5)
        centers = D.sample(c["centers"], rng, margin=1e-3)
        inputs = {"map": f.name, "alpha": alpha, "pairs": c["pairs"], "bloch_points": c["bloch_points"],
                  "centers": c["centers"], "weight": "d"}
        chk = verify_pr2(f, alpha, WeightField.boundary_distance(D), pairs, points, centers, domain=D,
                         slack=cfg["tolerance"]["slack"], random_state=_seed(rng), inputs=inputs)
        out.append(_label(chk, "pr2", f"alpha={alpha!r}"))
    return out


@register("main_theorem", "Hölder seminorm of order alpha/p against M K L^(1/p) for p-regular maps")
def _main_theorem(cfg, rng):
    c = cfg["main_theorem"]
    D = DiscretizedDomain.unit_disk()
    w = WeightField.half_boundary_distance(D)
    cases = [(1, 0.5, random_polynomial_map(1, 1, 4, rng)), (2, 0.6, random_polynomial_map(1, 2, 2, rng))]
    out = []
    for p, alpha, f in cases:
        beta = alpha / p
        M = half_weight_constant(c["c"], beta)
        pairs = D.sample_pairs(c["pairs"], rng, margin=1e-6)
        centers = D.sample(c["centers"], rng, margin=1e-3)
        cert_pairs = D.sample_pairs(c["certificate_pairs"], rng, margin=0.05)
        inputs = {"map": f.name, "p": p, "alpha": alpha, "c": c["c"], "pairs": c["pairs"], "centers": c["centers"],
                  "set": "origin", "weight": "d/2"}
        chk = verify_main_theorem(f, D, TargetSet.origin(), p, alpha, w, M, pairs, centers, cert_pairs,
                                  slack=cfg["tolerance"]["slack"], random_state=_seed(rng), inputs=inputs)
        out.append(_label(chk, "main_theorem", f"p={p}"))
    return out


# orchestration ----------------------------------------------------------------


@dataclass
class VerificationReport:
    tool_version: str
    config: dict
    config_digest: str
    records: list
    timings: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r["status"] == "passed" for r in self.records)

    @property
    def errored(self):
        return any(r["status"] == "errored" for r in self.records)

    def to_dict(self):
        """Everything except wall-clock timings, which are not reproducible."""
        return {"tool_version": self.tool_version, "config": self.config, "config_digest": self.config_digest,
                "records": self.records, "passed": self.passed}


def run_check(name, cfg):
    """Run one registered check; returns (records, seconds)."""
    spec = CHECKS[name]
    rng = check_rng(cfg.seed, name)
    start = time.perf_counter()
    try:
        checks = spec.func(cfg, rng)
        records = []
        for ch in checks:
            rec = ch.to_dict()
            rec["check"] = name
            rec["status"] = "passed" if ch.passed else "failed"
            records.append(rec)
    except Exception as exc:  # a crashing check is reported, not propagated
        records = [{"check": name, "name": f"{name}/error", "status": "errored",
                    "error": f"{type(exc).__name__}: {exc}",
                    "traceback": traceback.format_exception_only(type(exc), exc)[-1].strip()}]
    return records, time.perf_counter() - start


def run_suite(cfg, progress=None):
    """Run the selected checks in sorted order and assemble the report."""
    names = cfg.selected(CHECKS)
    records, timings = [], {}
    for name in names:
        recs, seconds = run_check(name, cfg)
        records.extend(recs)
        timings[name] = seconds
        if progress is not None:
            progress(name, recs, seconds)
    config = cfg.to_dict()
    config["suite"].pop("out_dir", None)
    return VerificationReport(__version__, config, cfg.digest(), records, timings)
