"""Split-step propagation of the coupled Schroedinger--Newton system.

The electron state psi obeys  i*h dpsi/dt = -(h^2/2) lap psi + V(x, y) psi
while the nucleus obeys  y'' = -d/dy integral V(x, y) |psi|^2 dx.

The evolution is split into two exactly solvable parts:

  kinetic:    psi advances by the free propagator (diagonal in Fourier
              space, mode k picks up the phase exp(-i h dt k^2 / 2)),
              y drifts with constant v;
  potential:  psi picks up the local phase exp(-i dt V(x, y) / h),
              which leaves |psi| untouched, so the mean force is
              constant during the step and v receives an exact kick.

Both parts are unitary, so the composed schemes conserve the discrete
mass to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Grid, WaveFunction, fourier_modes, quadrature
from .potentials import Potential


@dataclass(frozen=True)
class NuclearState:
    """Classical nuclear position/velocity pair."""

    y: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.y) and math.isfinite(self.v)):
            raise ValueError(f"non-finite nuclear state ({self.y}, {self.v})")


@dataclass(frozen=True, eq=False)
class QCMDState:
    """Joint state (psi, y, v) at a given time."""

    psi: WaveFunction
    nuclear: NuclearState
    time: float = 0.0


@lru_cache(maxsize=128)
def _kinetic_multiplier(grid: Grid, h: float, dt: float) -> np.ndarray:
    k = fourier_modes(grid)
    mult = np.exp(-0.5j * h * dt * k * k)
    mult.flags.writeable = False
    return mult


def kinetic_step(state: QCMDState, dt: float) -> QCMDState:
    """Free flight: exact kinetic sub-flow for time dt."""
    if dt == 0.0:
        return state
    psi = state.psi
    mult = _kinetic_multiplier(psi.grid, psi.h, dt)
    values = np.fft.ifft(np.fft.fft(psi.values) * mult)
    nuc = NuclearState(state.nuclear.y + state.nuclear.v * dt, state.nuclear.v)
    return QCMDState(WaveFunction(psi.grid, values, psi.h), nuc, state.time)


def potential_step(state: QCMDState, dt: float, V: Potential) -> QCMDState:
    """Potential sub-flow for time dt: local phase on psi, exact kick on v.

    |psi|^2 is invariant under this flow, so the force may be evaluated
    before or after the phase multiplication indifferently.
    """
    if dt == 0.0:
        return state
    psi = state.psi
    x = psi.grid.nodes
    y = state.nuclear.y
    vvals, gy = V.value_and_grad_y(x, y)
    dens = psi.values.real**2 + psi.values.imag**2
    force = float(quadrature(gy * dens, psi.grid))
    values = psi.values * np.exp((-1j * dt / psi.h) * vvals)
    nuc = NuclearState(y, state.nuclear.v - dt * force)
    return QCMDState(WaveFunction(psi.grid, values, psi.h), nuc, state.time)


def strang_step(state: QCMDState, dt: float, V: Potential) -> QCMDState:
    """Second-order step: half potential kick, full kinetic drift, half kick.

    The second half-kick sees the drifted nuclear position and the freely
    propagated density.
    """
    s = potential_step(state, 0.5 * dt, V)
    s = kinetic_step(s, dt)
    s = potential_step(s, 0.5 * dt, V)
    return QCMDState(s.psi, s.nuclear, state.time + dt)


def lie_step(state: QCMDState, dt: float, V: Potential) -> QCMDState:
    """First-order step: full kinetic drift then full potential kick."""
    s = kinetic_step(state, dt)
    s = potential_step(s, dt, V)
    return QCMDState(s.psi, s.nuclear, state.time + dt)


def evolve(state0: QCMDState, dt: float, t_final: float, V: Potential,
           store_trajectory: bool = False, stepper=strang_step) -> list[QCMDState]:
    """March state0 forward to t_final in steps of dt.

    t_final must be an integer multiple of dt; the actual step used is
    t_final / n so no drift accumulates from an inexact dt.  Returns
    [initial, final] by default, the full list of states when
    store_trajectory is set.
    """
    if t_final < 0.0 or dt <= 0.0:
        raise ValueError(f"need dt > 0 and t_final >= 0, got dt={dt}, t_final={t_final}")
    if t_final == 0.0:
        return [state0]
    n = round(t_final / dt)
    if n == 0 or abs(n * dt - t_final) > 1e-9 * max(dt, t_final):
        raise ValueError(
            f"dt={dt} does not divide t_final={t_final}: "
            f"{t_final}/{dt} = {t_final / dt} is not an integer")
    step = t_final / n
    states = [state0]
    s = state0
    for _ in range(n):
        s = stepper(s, step, V)
        if store_trajectory:
            states.append(s)
    if not store_trajectory:
        states.append(s)
    return states


def n_steps(dt: float, t_final: float) -> int:
    """Step count for a commensurate (dt, t_final) pair (validates)."""
    if t_final == 0.0:
        return 0
    n = round(t_final / dt)
    if n == 0 or abs(n * dt - t_final) > 1e-9 * max(dt, t_final):
        raise ValueError(f"dt={dt} does not divide t_final={t_final}")
    return n
