"""Periodic 1-D spatial grid and discrete wavefunction storage.

Everything in this package lives on a uniform grid over a periodic
interval (default [-pi, pi)), with derivatives taken spectrally through
the discrete Fourier transform and integrals through the rectangle rule,
which on periodic data coincides with the trapezoid rule and is
spectrally accurate for smooth integrands.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

#: default spatial resolution: at least this many points per unit of h
DEFAULT_POINTS_PER_H = 32

#: refuse to build grids beyond this size (runaway-resolution guard)
MAX_GRID_POINTS = 2**22


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [x_min, x_max) with the right endpoint
    identified with the left one.

    Nodes are x_j = x_min + j * spacing for j = 0 .. n_points-1.
    """

    x_min: float = -np.pi
    x_max: float = np.pi
    n_points: int = 64

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"empty domain: [{self.x_min}, {self.x_max}]")
        if not _is_power_of_two(self.n_points) or self.n_points < 2:
            raise ValueError(f"n_points must be a power of two >= 2, got {self.n_points}")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @cached_property
    def nodes(self) -> np.ndarray:
        x = self.x_min + self.spacing * np.arange(self.n_points)
        x.flags.writeable = False
        return x


def make_grid(h: float, min_points_per_h: int = DEFAULT_POINTS_PER_H,
              max_points: int = MAX_GRID_POINTS) -> Grid:
    """Grid on [-pi, pi) fine enough to resolve oscillations of scale h.

    Picks the smallest power of two >= min_points_per_h / h, so the
    spacing never exceeds 2*pi*h / min_points_per_h.
    """
    if not 0.0 < h <= 1.0:
        raise ValueError(f"h must lie in (0, 1], got {h}")
    if min_points_per_h < 8:
        raise ValueError(f"min_points_per_h must be >= 8, got {min_points_per_h}")
    target = min_points_per_h / h
    n = 8
    while n < target:
        n *= 2
    if n > max_points:
        raise ValueError(
            f"h={h} with {min_points_per_h} points per h needs {n} grid points, "
            f"above the cap of {max_points}")
    return Grid(-np.pi, np.pi, n)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex electron state sampled on a periodic grid.

    h is the semiclassical (rescaled Planck) parameter; states with small
    h oscillate on spatial scales of order h and must be carried on grids
    from make_grid(h).
    """

    grid: Grid
    values: np.ndarray
    h: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"values has shape {vals.shape}, expected ({self.grid.n_points},)")
        if not 0.0 < self.h <= 1.0:
            raise ValueError(f"h must lie in (0, 1], got {self.h}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def normalized(self) -> bool:
        return abs(mass(self) - 1.0) <= 1e-12


def mass(psi: WaveFunction) -> float:
    """Discrete L2 mass, spacing * sum |psi_j|^2."""
    v = psi.values
    return float(psi.grid.spacing * np.dot(v.real, v.real) + psi.grid.spacing * np.dot(v.imag, v.imag))


def normalize(psi: WaveFunction) -> WaveFunction:
    m = mass(psi)
    if m == 0.0:
        raise ValueError("cannot normalize the zero wavefunction")
    return WaveFunction(psi.grid, psi.values / np.sqrt(m), psi.h)


def quadrature(f: np.ndarray, grid: Grid):
    """Integral of grid-sampled data by the periodic rectangle rule."""
    f = np.asarray(f)
    if f.shape != (grid.n_points,):
        raise ValueError(f"data has shape {f.shape}, expected ({grid.n_points},)")
    return grid.spacing * f.sum()


@lru_cache(maxsize=None)
def fourier_modes(grid: Grid) -> np.ndarray:
    """Spectral wavenumbers in DFT order: {0, 1, .., n/2-1, -n/2, .., -1}
    scaled by 2*pi / (x_max - x_min)."""
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.spacing)
    k.flags.writeable = False
    return k


def spectral_weights(psi: WaveFunction) -> np.ndarray:
    """Mode occupation probabilities P_m with sum_m P_m = mass(psi).

    P_m is the squared modulus of the L2-orthonormal Fourier coefficient
    of mode k_m, computed from the DFT; the momentum observable -i*h*d/dx
    has eigenvalue h*k_m on mode m.
    """
    coeff = np.fft.fft(psi.values)
    return (psi.grid.spacing / psi.grid.n_points) * (coeff.real**2 + coeff.imag**2)
