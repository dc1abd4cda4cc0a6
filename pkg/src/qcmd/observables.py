"""Observables as phase-space symbols a(x, xi) and their expectations.

Three representable kinds:

  position_multiplier   a = f(x):  <A> = integral f(x) |psi(x)|^2 dx
  fourier_multiplier    a = g(xi): <A> = sum_m g(h k_m) P_m over the
                        mode occupations P_m, which realizes g(-i h d/dx)
                        exactly on the periodic grid
  separable_schwartz    a = f(x) g(xi): expectation through the Wigner
                        quadrature  integral a w[psi] dx dxi

Position and momentum themselves are not Schwartz symbols; they are kept
as multiplier kinds, whose quadratures are exact, and excluded from the
phase-space integral paths that need decay.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import WaveFunction, fourier_modes, mass, quadrature, spectral_weights
from .classical import ClassicalPoint, reference_flow, stormer_verlet_run
from .phase_space import wigner_transform
from .potentials import Potential

#: finite-difference step of the fallback Laplacian for user symbols
FD_LAPLACIAN_STEP = 1e-4

KINDS = ("position_multiplier", "fourier_multiplier", "separable_schwartz")


@dataclass(frozen=True)
class Observable:
    """Real symbol a(x, xi) with its phase-space Laplacian.

    position_factor / fourier_factor hold the one-variable factors for
    the multiplier kinds (f for position, g for fourier, both for
    separable).  laplacian is analytic where available; None falls back
    to a 5-point finite-difference stencil.
    """

    name: str
    kind: str
    symbol: Callable
    laplacian: Callable | None = None
    position_factor: Callable | None = None
    fourier_factor: Callable | None = None
    is_schwartz: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown observable kind {self.kind!r}")

    def symbol_laplacian(self, x, xi):
        """lap a = d2a/dx2 + d2a/dxi2 at (x, xi)."""
        if self.laplacian is not None:
            return self.laplacian(x, xi)
        d = FD_LAPLACIAN_STEP
        a = self.symbol
        return (a(x + d, xi) + a(x - d, xi) + a(x, xi + d) + a(x, xi - d)
                - 4.0 * a(x, xi)) / (d * d)


def position_observable(name: str, f: Callable, fxx: Callable | None = None,
                        schwartz: bool = False) -> Observable:
    lap = None if fxx is None else (lambda x, xi: fxx(x) + 0.0 * xi)
    return Observable(name, "position_multiplier",
                      symbol=lambda x, xi: f(x) + 0.0 * xi,
                      laplacian=lap, position_factor=f, is_schwartz=schwartz)


def fourier_observable(name: str, g: Callable, gxixi: Callable | None = None,
                       schwartz: bool = False) -> Observable:
    lap = None if gxixi is None else (lambda x, xi: gxixi(xi) + 0.0 * x)
    return Observable(name, "fourier_multiplier",
                      symbol=lambda x, xi: g(xi) + 0.0 * x,
                      laplacian=lap, fourier_factor=g, is_schwartz=schwartz)


def separable_observable(name: str, f: Callable, g: Callable,
                         fxx: Callable | None = None,
                         gxixi: Callable | None = None,
                         schwartz: bool = True) -> Observable:
    lap = None
    if fxx is not None and gxixi is not None:
        lap = lambda x, xi: fxx(x) * g(xi) + f(x) * gxixi(xi)
    return Observable(name, "separable_schwartz",
                      symbol=lambda x, xi: f(x) * g(xi),
                      laplacian=lap, position_factor=f, fourier_factor=g,
                      is_schwartz=schwartz)


def builtin_observables() -> dict[str, Observable]:
    """The measured set: position, momentum, gaussian, xgaussian, kinetic."""

    def gauss(x):
        return np.exp(-4.0 * x * x)

    def gauss_xx(x):
        return (64.0 * x * x - 8.0) * np.exp(-4.0 * x * x)

    def xgauss(x):
        return x * np.exp(-4.0 * x * x)

    def xgauss_xx(x):
        return (64.0 * x**3 - 24.0 * x) * np.exp(-4.0 * x * x)

    return {
        "position": position_observable("position", lambda x: x, lambda x: 0.0 * x),
        "momentum": fourier_observable("momentum", lambda xi: xi, lambda xi: 0.0 * xi),
        "gaussian": position_observable("gaussian", gauss, gauss_xx, schwartz=True),
        "xgaussian": position_observable("xgaussian", xgauss, xgauss_xx, schwartz=True),
        "kinetic": fourier_observable("kinetic", lambda xi: 0.5 * xi * xi,
                                      lambda xi: 1.0 + 0.0 * xi),
    }


def get_observable(name: str) -> Observable:
    obs = builtin_observables()
    try:
        return obs[name]
    except KeyError:
        raise KeyError(f"unknown observable {name!r}; available: {sorted(obs)}") from None


def expectation(A: Observable, psi: WaveFunction) -> float:
    """<psi| op(a) |psi> for a normalized state."""
    m = mass(psi)
    if abs(m - 1.0) > 1e-8:
        raise ValueError(f"psi must be normalized, mass deviates by {abs(m - 1.0):.2e}")
    if A.kind == "position_multiplier":
        dens = psi.values.real**2 + psi.values.imag**2
        return float(quadrature(A.position_factor(psi.grid.nodes) * dens, psi.grid))
    if A.kind == "fourier_multiplier":
        p = spectral_weights(psi)
        xi = psi.h * fourier_modes(psi.grid)
        return float(np.dot(A.fourier_factor(xi), p))
    # separable Schwartz symbol: Wigner-grid quadrature of f(x) g(xi) w
    field = wigner_transform(psi, boundary_tol=None)
    fx = A.position_factor(field.x_nodes)
    gxi = A.fourier_factor(field.xi_nodes)
    return float(fx @ field.values @ gxi * field.dx * field.dxi)


class PullbackObservable:
    """Symbol transported by a classical flow: (x, xi, y, v) -> a(x(t), xi(t)).

    Only the electronic pair feeds the symbol; the nuclear pair rides
    along through the coupled flow.  laplacian() transports lap a the
    same way (composition after the flow, not differentiation of it).
    """

    def __init__(self, observable: Observable, flow: Callable):
        self._obs = observable
        self._flow = flow

    def _transport(self, x, xi, y, v) -> ClassicalPoint:
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(np.shape(x), np.shape(xi))
        p = ClassicalPoint(np.broadcast_to(x, shape),
                           np.broadcast_to(np.asarray(xi, dtype=float), shape),
                           np.broadcast_to(np.asarray(y, dtype=float), shape),
                           np.broadcast_to(np.asarray(v, dtype=float), shape))
        return self._flow(p)

    def __call__(self, x, xi, y, v):
        q = self._transport(x, xi, y, v)
        return self._obs.symbol(q.x, q.xi)

    def laplacian(self, x, xi, y, v):
        q = self._transport(x, xi, y, v)
        return self._obs.symbol_laplacian(q.x, q.xi)


def classical_pullback(A: Observable, t: float, V: Potential,
                       scheme: str = "exact", dt: float | None = None,
                       n_fine: int | None = None) -> PullbackObservable:
    """Evaluable a o Phi^t on classical points.

    scheme "exact" transports with the fine-Verlet reference flow
    (optionally overriding its substep count through n_fine); scheme
    "verlet" iterates the coarse Verlet map with the given dt, which must
    divide t.
    """
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        flow = lambda p: p
    elif scheme == "exact":
        flow = lambda p: reference_flow(p, t, V, n_fine)
    elif scheme == "verlet":
        if dt is None:
            raise ValueError("scheme 'verlet' needs dt")
        n = round(t / dt)
        if n == 0 or abs(n * dt - t) > 1e-9 * max(dt, t):
            raise ValueError(f"dt={dt} does not divide t={t}")
        flow = lambda p: stormer_verlet_run(p, t / n, n, V)
    else:
        raise ValueError(f"unknown scheme {scheme!r}; use 'exact' or 'verlet'")
    return PullbackObservable(A, flow)
