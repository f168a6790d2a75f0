"""Numerical Toda flows in Lax variables and conservation diagnostics.

Coordinates: ``x`` (n sites) and ``q`` (n-1 bonds open, n bonds periodic) with

    x_i' = q_i - q_{i-1},      q_i' = q_i (x_i - x_{i+1}),

which is the Lax equation ``L' = [L, M]`` for ``M`` the strictly upper part
of ``L`` (plus the ``Q_n/z`` corner in the periodic case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .laxdet import Variant, conserved

__all__ = [
    "FlowError",
    "FlowState",
    "Trajectory",
    "DriftReport",
    "check_state",
    "vector_field",
    "rk4_step",
    "integrate",
    "conserved_values",
    "numeric_conserved",
    "lax_pair",
    "lax_residual",
    "random_state",
]


class FlowError(ValueError):
    pass


@dataclass(frozen=True)
class FlowState:
    t: float
    x: np.ndarray
    q: np.ndarray

    @property
    def n(self) -> int:
        return len(self.x)


def _nbonds(n: int, variant: Variant) -> int:
    return n if variant is Variant.PERIODIC else n - 1


def check_state(s: FlowState, variant: Variant, tol: float = 1e-9) -> None:
    """Raise FlowError unless ``s`` satisfies the lattice constraints."""
    variant = Variant(variant)
    n = s.n
    if variant is Variant.PERIODIC and n < 3:
        raise FlowError("periodic lattice needs n >= 3")
    if n < 1:
        raise FlowError("empty lattice")
    if len(s.q) != _nbonds(n, variant):
        raise FlowError(f"{variant.value} lattice with n={n} needs {_nbonds(n, variant)} q values, got {len(s.q)}")
    if abs(float(np.sum(s.x))) > tol:
        raise FlowError(f"x must sum to zero, got {float(np.sum(s.x))!r}")
    if np.any(np.asarray(s.q) >= 0):
        raise FlowError("all q must be negative")


def vector_field(s: FlowState, variant: Variant) -> tuple[np.ndarray, np.ndarray]:
    """(x', q') at state ``s``."""
    return _field(np.asarray(s.x, float), np.asarray(s.q, float), Variant(variant))


def _field(x: np.ndarray, q: np.ndarray, variant: Variant):
    if variant is Variant.PERIODIC:
        dx = q - np.roll(q, 1)
        dq = q * (x - np.roll(x, -1))
    else:
        qpad = np.concatenate(([0.0], q, [0.0]))
        dx = qpad[1:] - qpad[:-1]
        dq = q * (x[:-1] - x[1:])
    return dx, dq


def _increment(x, q, h, variant):
    k1x, k1q = _field(x, q, variant)
    k2x, k2q = _field(x + 0.5 * h * k1x, q + 0.5 * h * k1q, variant)
    k3x, k3q = _field(x + 0.5 * h * k2x, q + 0.5 * h * k2q, variant)
    k4x, k4q = _field(x + h * k3x, q + h * k3q, variant)
    return (
        (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
    )


def _rk4(x, q, h, variant):
    dx, dq = _increment(x, q, h, variant)
    return x + dx, q + dq


def _kahan(v, c, incr):
    # compensated v += incr; v - c tracks the exact running sum
    y = incr - c
    t = v + y
    return t, (t - v) - y


def rk4_step(s: FlowState, h: float, variant: Variant) -> FlowState:
    if not h > 0:
        raise FlowError(f"step must be positive, got {h!r}")
    x, q = _rk4(np.asarray(s.x, float), np.asarray(s.q, float), h, Variant(variant))
    return FlowState(s.t + h, x, q)


@dataclass(frozen=True)
class Trajectory:
    """Sampled states.  ``x_lo``/``q_lo`` hold the compensated-summation
    residue, so ``x - x_lo`` is the integrator state to beyond double
    precision."""

    t: np.ndarray  # (N+1,)
    x: np.ndarray  # (N+1, n)
    q: np.ndarray  # (N+1, bonds)
    x_lo: np.ndarray | None = None
    q_lo: np.ndarray | None = None

    def extended(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.x.astype(np.longdouble)
        q = self.q.astype(np.longdouble)
        if self.x_lo is not None:
            x -= self.x_lo
            q -= self.q_lo
        return x, q

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> FlowState:
        return FlowState(float(self.t[i]), self.x[i], self.q[i])


@dataclass(frozen=True)
class DriftReport:
    n: int
    variant: Variant
    dt: float
    t_end: float
    drift: dict[str, float]
    sumx_max: float
    prodq_drift: float | None = None
    order: int = 4
    steps: int = 0

    @property
    def max_drift(self) -> float:
        return max(self.drift.values(), default=0.0)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "variant": self.variant.value,
            "dt": self.dt,
            "t_end": self.t_end,
            "drift": dict(self.drift),
            "sumx_max": self.sumx_max,
            "prodq_drift": self.prodq_drift,
            "order": self.order,
            "steps": self.steps,
        }


def conserved_values(traj: Trajectory, variant: Variant) -> dict[str, np.ndarray]:
    """O^k / P^k (k < n) along ``traj`` by evaluating the exact polynomials.

    Evaluation runs in extended precision so that drift measurements resolve
    the integrator error rather than evaluation roundoff.
    """
    variant = Variant(variant)
    n = traj.x.shape[1]
    cs = conserved(n, variant)
    U = cs.coefficients[0].universe
    x, q = traj.extended()
    assignment = {U.x_id(i + 1): x[:, i] for i in range(n)}
    assignment.update({U.q_id(i + 1): q[:, i] for i in range(q.shape[1])})
    prefix = "O" if variant is Variant.OPEN else "P"
    out = {}
    for k in range(n):
        v = np.asarray(cs.coefficients[k].eval(assignment), dtype=np.longdouble)
        out[f"{prefix}{k}"] = np.broadcast_to(v, traj.t.shape).copy()
    return out


def lax_pair(x, q, variant: Variant, z: complex = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Numeric L (or the periodic L(z)) and the companion M at one state."""
    variant = Variant(variant)
    n = len(x)
    L = np.zeros((n, n), dtype=complex)
    M = np.zeros((n, n), dtype=complex)
    L[np.arange(n), np.arange(n)] = x
    for i in range(n - 1):
        L[i, i + 1] = M[i, i + 1] = q[i]
        L[i + 1, i] = -1.0
    if variant is Variant.PERIODIC:
        L[0, n - 1] += -z
        L[n - 1, 0] += q[n - 1] / z
        M[n - 1, 0] += q[n - 1] / z
    return L, M


def numeric_conserved(traj: Trajectory, variant: Variant) -> dict[str, np.ndarray]:
    """Same quantities as :func:`conserved_values`, from numeric
    characteristic polynomials of the instantiated Lax matrices.

    Periodic: averaging det(L(z) + mu I) over z = 1 and z = -1 cancels the
    A/z + B z part.
    """
    variant = Variant(variant)
    n = traj.x.shape[1]
    prefix = "O" if variant is Variant.OPEN else "P"
    zs = (1.0, -1.0) if variant is Variant.PERIODIC else (1.0,)
    vals = np.zeros((len(traj), n + 1))
    for j in range(len(traj)):
        acc = np.zeros(n + 1, dtype=complex)
        for z in zs:
            L, _ = lax_pair(traj.x[j], traj.q[j], variant, z)
            # np.poly(-L) gives det(mu I + L), highest power first
            acc += np.poly(-L)
        vals[j] = (acc / len(zs)).real[::-1]
    return {f"{prefix}{k}": vals[:, k] for k in range(n)}


def _relative_drift(v: np.ndarray) -> float:
    return float(np.max(np.abs(v - v[0])) / max(1.0, abs(v[0])))


def integrate(
    s0: FlowState, t_end: float, h: float, variant: Variant
) -> tuple[Trajectory, DriftReport]:
    """Fixed-step RK4 from ``s0`` to ``s0.t + t_end``, every step sampled."""
    variant = Variant(variant)
    check_state(s0, variant)
    if t_end < 0 or not h > 0:
        raise FlowError("need t_end >= 0 and h > 0")
    nsteps = math.ceil(t_end / h - 1e-9) if t_end > 0 else 0
    x = np.asarray(s0.x, float)
    q = np.asarray(s0.q, float)
    ts = np.empty(nsteps + 1)
    xs = np.empty((nsteps + 1, len(x)))
    qs = np.empty((nsteps + 1, len(q)))
    xlo = np.zeros_like(xs)
    qlo = np.zeros_like(qs)
    cx = np.zeros_like(x)
    cq = np.zeros_like(q)
    ts[0], xs[0], qs[0] = s0.t, x, q
    t = 0.0
    for i in range(1, nsteps + 1):
        step = t_end - t if i == nsteps else h
        # blow-up is reported below, not as numpy warnings
        with np.errstate(over="ignore", invalid="ignore"):
            dx, dq = _increment(x, q, step, variant)
            x, cx = _kahan(x, cx, dx)
            q, cq = _kahan(q, cq, dq)
        t = t_end if i == nsteps else i * h
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(q))):
            raise FlowError(f"non-finite state at step {i} (t={s0.t + t!r})")
        ts[i], xs[i], qs[i], xlo[i], qlo[i] = s0.t + t, x, q, cx, cq
    traj = Trajectory(ts, xs, qs, xlo, qlo)

    drift = {k: _relative_drift(v) for k, v in conserved_values(traj, variant).items()}
    prodq = None
    if variant is Variant.PERIODIC:
        p = np.prod(traj.extended()[1], axis=1)
        prodq = float(np.max(np.abs(p - p[0])) / abs(p[0]))
    report = DriftReport(
        n=len(x),
        variant=variant,
        dt=h,
        t_end=t_end,
        drift=drift,
        sumx_max=float(np.max(np.abs(xs.sum(axis=1)))),
        prodq_drift=prodq,
        steps=nsteps,
    )
    return traj, report


def lax_residual(
    s: FlowState,
    variant: Variant,
    z_samples: Sequence[complex] = (),
    eps: float = 1e-2,
    pair: Callable = lax_pair,
) -> float:
    """max over z of ||(L(t+eps) - L(t-eps)) / 2eps - [L, M]||_F.

    The neighbouring states come from RK4 steps of +-eps along the flow.
    ``pair`` builds (L, M) and can be swapped to test other choices of M.
    """
    variant = Variant(variant)
    x0 = np.asarray(s.x, float)
    q0 = np.asarray(s.q, float)
    if variant is Variant.PERIODIC:
        if not len(z_samples):
            raise FlowError("periodic residual needs z samples")
        for z in z_samples:
            if not math.isclose(abs(z), 1.0, rel_tol=1e-12):
                raise FlowError(f"z sample {z!r} is not on the unit circle")
        zs = list(z_samples)
    else:
        zs = [1.0]
    xp, qp = _rk4(x0, q0, eps, variant)
    xm, qm = _rk4(x0, q0, -eps, variant)
    worst = 0.0
    for z in zs:
        L, M = pair(x0, q0, variant, z)
        Lp, _ = pair(xp, qp, variant, z)
        Lm, _ = pair(xm, qm, variant, z)
        fd = (Lp - Lm) / (2 * eps)
        worst = max(worst, float(np.linalg.norm(fd - (L @ M - M @ L))))
    return worst


def random_state(n: int, variant: Variant, rng: np.random.Generator) -> FlowState:
    """x uniform in (-1, 1) then centred; q uniform in (-2, -0.5)."""
    variant = Variant(variant)
    x = rng.uniform(-1.0, 1.0, n)
    x -= x.mean()
    q = rng.uniform(-2.0, -0.5, _nbonds(n, variant))
    return FlowState(0.0, x, q)
