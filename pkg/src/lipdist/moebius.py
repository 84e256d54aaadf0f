"""Möbius transforms of the unit ball of C^m and the Schwarz-Pick inequality."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_point, check_points, check_random_state
from .exceptions import ConvergenceError, InvalidInputError, PreconditionError

__all__ = [
    "MoebiusTransform",
    "moebius_apply",
    "moebius_differential_at_zero",
    "operator_norm",
    "operator_norms",
    "ball_sup_norm",
    "SchwarzPickReport",
    "schwarz_pick_check",
]


def _inner(z, a):
    """<z, a> = sum z_i conj(a_i), linear in z."""
    return np.asarray(z) @ np.conj(a)


class MoebiusTransform:
    """phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>) on the unit ball of C^m."""

    def __init__(self, a):
        a = check_point(a, name="a").astype(complex)
        na2 = float(np.real(_inner(a, a)))
        if not na2 < 1.0:
            raise InvalidInputError("the centre a must lie in the open unit ball")
        m = len(a)
        self.a = a
        self.m = m
        self.s = float(np.sqrt(1.0 - na2))
        if na2 == 0.0:
            self.P = np.zeros((m, m), dtype=complex)
        else:
            self.P = np.outer(a, np.conj(a)) / na2
        self.Q = np.eye(m, dtype=complex) - self.P

    def __repr__(self):
        return f"MoebiusTransform(|a|={np.linalg.norm(self.a):.6g}, m={self.m})"

    def __call__(self, z):
        return self.apply(z)

    def apply(self, z):
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        Z = z[None, :] if single else z
        if Z.shape[-1] != self.m:
            raise InvalidInputError(f"expected points of dimension {self.m}")
        if np.any(np.linalg.norm(Z, axis=1) >= 1.0):
            raise InvalidInputError("phi_a is only defined on the open unit ball")
        num = self.a[None, :] - Z @ self.P.T - self.s * (Z @ self.Q.T)
        out = num / (1.0 - _inner(Z, self.a))[:, None]
        return out[0] if single else out

    def differential(self, z):
        """Complex Jacobian of phi_a at z."""
        z = check_point(z, dim=self.m, name="z").astype(complex)
        L = self.P + self.s * self.Q
        D = 1.0 - _inner(z, self.a)
        N = self.a - L @ z
        return -L / D + np.outer(N, np.conj(self.a)) / D**2

    def differential_at_zero(self):
        """-s_a^2 P_a - s_a Q_a."""
        return -(self.s**2) * self.P - self.s * self.Q

    def expected_differential_norm(self):
        """Closed form of ||d phi_a(0)||: 1 - |a|^2 in dimension 1, sqrt(1 - |a|^2) otherwise."""
        return self.s**2 if self.m == 1 else self.s


def moebius_apply(T, z):
    return T.apply(z)


def moebius_differential_at_zero(T):
    return T.differential_at_zero()


def operator_norm(L, tol=1e-12, max_iter=10_000, restarts=2, random_state=0):
    """Largest singular value of L by power iteration on L^H L.

    Each restart begins at a fresh random complex vector; the Rayleigh
    quotient is iterated until its relative change drops below ``tol``. A
    start that L maps to zero is replaced, which guards against starts
    orthogonal to the top singular space.
    """
    L = np.atleast_2d(np.asarray(L, dtype=complex))
    if not np.all(np.isfinite(L)):
        raise InvalidInputError("operator has non-finite entries")
    if not np.any(L):
        return 0.0
    rng = check_random_state(random_state)
    n = L.shape[1]
    best = 0.0
    for _ in range(restarts):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        lam_old = -1.0
        for _ in range(max_iter):
            w = L.conj().T @ (L @ v)
            lam = float(np.real(np.vdot(v, w)))
            nw = np.linalg.norm(w)
            if nw == 0.0:
                v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                v /= np.linalg.norm(v)
                continue
            v = w / nw
            if abs(lam - lam_old) <= tol * max(lam, 1e-300):
                break
            lam_old = lam
        else:
            raise ConvergenceError("power iteration did not converge", previous=np.sqrt(max(lam_old, 0)),
                                   last=np.sqrt(max(lam, 0)))
        best = max(best, float(np.sqrt(max(lam, 0.0))))
    return best


def operator_norms(stack, tol=1e-12, max_iter=10_000, random_state=0):
    """Vectorised :func:`operator_norm` for an (N, m, n) stack, one restart."""
    S = np.asarray(stack, dtype=complex)
    if S.ndim != 3:
        raise InvalidInputError("expected an (N, m, n) stack")
    rng = check_random_state(random_state)
    N, _, n = S.shape
    v = rng.standard_normal((N, n)) + 1j * rng.standard_normal((N, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    lam = np.zeros(N)
    lam_old = np.full(N, -1.0)
    active = np.ones(N, dtype=bool)
    SH = np.conj(np.transpose(S, (0, 2, 1)))
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        w = np.einsum("kij,kj->ki", SH[idx], np.einsum("kij,kj->ki", S[idx], v[idx]))
        lam[idx] = np.real(np.einsum("ki,ki->k", np.conj(v[idx]), w))
        nw = np.linalg.norm(w, axis=1)
        zero = nw == 0.0
        v[idx[~zero]] = w[~zero] / nw[~zero, None]
        done = zero | (np.abs(lam[idx] - lam_old[idx]) <= tol * np.maximum(lam[idx], 1e-300))
        lam_old[idx] = lam[idx]
        active[idx[done]] = False
    else:
        raise ConvergenceError("batched power iteration did not converge")
    return np.sqrt(np.maximum(lam, 0.0))


def _sphere_grid(n, rng, size):
    """Points on the unit sphere of C^n used as starting candidates."""
    if n == 1:
        t = np.linspace(0, 2 * np.pi, size, endpoint=False)
        return np.exp(1j * t)[:, None]
    if n == 2:
        k = max(8, int(round((size / 4) ** (1 / 3))))
        th = (np.arange(k) + 0.5) * (np.pi / 2) / k
        ph = np.linspace(0, 2 * np.pi, 2 * k, endpoint=False)
        T, P1, P2 = np.meshgrid(th, ph, ph, indexing="ij")
        return np.stack([np.cos(T) * np.exp(1j * P1), np.sin(T) * np.exp(1j * P2)], axis=-1).reshape(-1, 2)
    g = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball_sup_norm(f, n, radius=1.0, grid_size=4096, refine=8, rounds=48, per_round=64, random_state=0):
    """sup of ||f|| over the ball of radius ``radius`` in C^n.

    ||f|| is subharmonic for analytic f, so the sup is taken on the sphere:
    first over a dense grid, then the best ``refine`` points are perturbed
    on the sphere with a step that halves every round, keeping the best
    points found so far. All candidates of a round are evaluated as one batch.
    """
    rng = check_random_state(random_state)
    U = _sphere_grid(n, rng, grid_size)

    def norms(Z):
        return np.linalg.norm(np.asarray(f(Z)).reshape(len(Z), -1), axis=1)

    vals = norms(radius * U)
    V = np.concatenate([U.real, U.imag], axis=1)
    order = np.argsort(vals)[::-1][:refine]
    V, vals = V[order], vals[order]
    # start at roughly the grid spacing on the (2n - 1)-sphere
    sigma = 2.0 * np.pi / len(U) ** (1.0 / max(2 * n - 1, 1))
    for _ in range(rounds):
        C = V[:, None, :] + sigma * rng.standard_normal((len(V), per_round, 2 * n))
        C = C.reshape(-1, 2 * n)
        C /= np.linalg.norm(C, axis=1, keepdims=True)
        cv = norms(radius * (C[:, :n] + 1j * C[:, n:]))
        V = np.concatenate([V, C])
        vals = np.concatenate([vals, cv])
        order = np.argsort(vals)[::-1][:refine]
        V, vals = V[order], vals[order]
        sigma *= 0.5
    return float(vals[0])


@dataclass
class SchwarzPickReport:
    n: int
    m: int
    sup_norm: float
    value_norm: float
    differential_norm: float
    bound: float
    slack: float
    chain_bound: float
    composed_norm: float
    tolerance: float = 1e-9
    extras: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.slack >= -self.tolerance

    @property
    def chain_passed(self):
        return (self.differential_norm <= self.chain_bound + self.tolerance
                and self.composed_norm <= 1.0 + self.tolerance)

    def to_dict(self):
        d = {k: getattr(self, k) for k in ("n", "m", "sup_norm", "value_norm", "differential_norm",
                                            "bound", "slack", "chain_bound", "composed_norm", "tolerance")}
        d.update(passed=self.passed, chain_passed=self.chain_passed)
        return d


def schwarz_pick_check(f, n, m, sup_norm=None, tolerance=1e-9, random_state=0):
    """Compare ||df(0)|| with the Schwarz-Pick bound for a map bounded by 1.

    ``f`` must provide ``evaluate`` and ``differential``. The sup of ||f||
    on the ball is measured unless given; a value above 1 violates the
    hypothesis and raises PreconditionError.
    """
    if sup_norm is None:
        sup_norm = ball_sup_norm(f.evaluate, n, random_state=random_state)
    # a sup on the sphere of exactly 1 (identity, rotations) is allowed up to rounding
    if sup_norm > 1.0 + 1e-12:
        raise PreconditionError(f"map is not bounded by 1 on the ball (sup {sup_norm!r})")
    zero = np.zeros(n, dtype=complex)
    a = np.asarray(f.evaluate(zero), dtype=complex).reshape(m)
    df0 = np.asarray(f.differential(zero), dtype=complex).reshape(m, n)
    na = float(np.linalg.norm(a))
    lhs = operator_norm(df0)
    bound = 1.0 - na**2 if m == 1 else float(np.sqrt(max(1.0 - na**2, 0.0)))
    T = MoebiusTransform(a)
    dg0 = T.differential(a) @ df0
    chain = operator_norm(T.differential_at_zero()) * operator_norm(dg0)
    return SchwarzPickReport(n, m, float(sup_norm), na, lhs, bound, bound - lhs, chain,
                             operator_norm(dg0), tolerance)
