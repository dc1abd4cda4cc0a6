"""Classical limit flow on phase-space points (x, xi, y, v).

The limit dynamics is the Hamiltonian system of
H0 = xi^2/2 + v^2/2 + V(x, y):

    x' = xi,   xi' = -dV/dx(x, y),   y' = v,   v' = -dV/dy(x, y).

It splits into exactly solvable kinetic (free flight) and potential
(frozen-position kick) parts whose symmetric composition is the
Stoermer--Verlet integrator -- the classical shadow of the quantum
split-step scheme.  All maps accept scalar or array-valued coordinates,
so whole ensembles of points propagate in one vectorized call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potentials import Potential

#: substep length of the fine-Verlet stand-in for the exact flow
REFERENCE_FLOW_DT = 1e-5


@dataclass(frozen=True, eq=False)
class ClassicalPoint:
    """Full phase-space point; fields may be floats or numpy arrays."""

    x: object
    xi: object
    y: object
    v: object


def classical_hamiltonian(p: ClassicalPoint, V: Potential):
    """Total energy xi^2/2 + v^2/2 + V(x, y); conserved by the exact flow."""
    return 0.5 * p.xi * p.xi + 0.5 * p.v * p.v + V.value(p.x, p.y)


def flow_T(p: ClassicalPoint, dt: float) -> ClassicalPoint:
    """Kinetic sub-flow (exact free flight)."""
    return ClassicalPoint(p.x + dt * p.xi, p.xi, p.y + dt * p.v, p.v)


def flow_V(p: ClassicalPoint, dt: float, V: Potential) -> ClassicalPoint:
    """Potential sub-flow (positions frozen, exact momentum kick)."""
    gx, gy = V.gradients(p.x, p.y)
    return ClassicalPoint(p.x, p.xi - dt * gx, p.y, p.v - dt * gy)


def stormer_verlet_step(p: ClassicalPoint, dt: float, V: Potential) -> ClassicalPoint:
    """One kick-drift-kick step: flow_V(dt/2) o flow_T(dt) o flow_V(dt/2)."""
    return flow_V(flow_T(flow_V(p, 0.5 * dt, V), dt), 0.5 * dt, V)


def stormer_verlet_run(p: ClassicalPoint, dt: float, n: int, V: Potential) -> ClassicalPoint:
    """n Verlet steps, vectorized in place over array-valued points.

    Produces the same floating-point result as composing
    stormer_verlet_step n times.
    """
    x = np.array(p.x, dtype=float)
    xi = np.array(p.xi, dtype=float)
    y = np.array(p.y, dtype=float)
    v = np.array(p.v, dtype=float)
    half = 0.5 * dt
    for _ in range(n):
        gx, gy = V.gradients(x, y)
        xi -= half * gx
        v -= half * gy
        x += dt * xi
        y += dt * v
        gx, gy = V.gradients(x, y)
        xi -= half * gx
        v -= half * gy
    if np.ndim(p.x) == 0:
        return ClassicalPoint(float(x), float(xi), float(y), float(v))
    return ClassicalPoint(x, xi, y, v)


def reference_flow(p: ClassicalPoint, t: float, V: Potential,
                   n_fine: int | None = None) -> ClassicalPoint:
    """Stand-in for the exact flow: very fine Verlet with n_fine substeps.

    The default resolves t / n_fine <= 1e-5, giving O(1e-10) accuracy;
    callers with looser accuracy budgets may pass a smaller n_fine.
    """
    if t == 0.0:
        return p
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if n_fine is None:
        n_fine = max(1, int(np.ceil(t / REFERENCE_FLOW_DT)))
    return stormer_verlet_run(p, t / n_fine, n_fine, V)


def jacobian_of_flow(p: ClassicalPoint, dt: float, n: int, V: Potential,
                     fd_step: float = 1e-6) -> np.ndarray:
    """Finite-difference Jacobian of the n-fold Verlet map at p.

    Central differences with the given step; all eight perturbed points
    propagate in one vectorized run.
    """
    base = np.array([p.x, p.xi, p.y, p.v], dtype=float)
    pts = np.repeat(base[:, None], 8, axis=1)
    for i in range(4):
        pts[i, 2 * i] += fd_step
        pts[i, 2 * i + 1] -= fd_step
    out = stormer_verlet_run(ClassicalPoint(*pts), dt, n, V)
    arr = np.stack([out.x, out.xi, out.y, out.v])
    jac = np.empty((4, 4))
    for i in range(4):
        jac[:, i] = (arr[:, 2 * i] - arr[:, 2 * i + 1]) / (2.0 * fd_step)
    return jac
