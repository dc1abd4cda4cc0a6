"""Interaction potentials V(x, y) with analytic gradients.

x is the electronic coordinate (sampled on the grid), y the nuclear one.
All callables broadcast over numpy arrays in either argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import WaveFunction, quadrature


@dataclass(frozen=True)
class Potential:
    """Evaluable triple (value, grad_x, grad_y).

    derivatives_bounded declares whether all derivatives of order >= 2
    are bounded on the whole plane (the smoothness class the error
    theory asks for); it is informational only.
    """

    name: str
    value: Callable
    grad_x: Callable
    grad_y: Callable
    derivatives_bounded: bool = True
    # optional fused evaluations so hot loops can share transcendentals
    _gradients: Callable | None = None
    _value_and_grad_y: Callable | None = None

    def gradients(self, x, y):
        """(grad_x, grad_y) at (x, y), sharing work when possible."""
        if self._gradients is not None:
            return self._gradients(x, y)
        return self.grad_x(x, y), self.grad_y(x, y)

    def value_and_grad_y(self, x, y):
        if self._value_and_grad_y is not None:
            return self._value_and_grad_y(x, y)
        return self.value(x, y), self.grad_y(x, y)


def builtin_sin_quadratic() -> Potential:
    """V(x, y) = sin(x^2 + y^2).

    Second and higher derivatives grow with |x|, |y| (polynomial factors),
    so the global boundedness declaration is False; on the periodic box
    actually used, every derivative is of course bounded.
    """

    def value(x, y):
        return np.sin(x * x + y * y)

    def grad_x(x, y):
        return 2.0 * x * np.cos(x * x + y * y)

    def grad_y(x, y):
        return 2.0 * y * np.cos(x * x + y * y)

    def gradients(x, y):
        c = np.cos(x * x + y * y)
        return 2.0 * x * c, 2.0 * y * c

    def value_and_grad_y(x, y):
        # one complex exponential yields sin and cos in a single pass
        e = np.exp(1j * (x * x + y * y))
        return e.imag, 2.0 * y * e.real

    return Potential("sin_x2_y2", value, grad_x, grad_y,
                     derivatives_bounded=False,
                     _gradients=gradients, _value_and_grad_y=value_and_grad_y)


def builtin_harmonic() -> Potential:
    """V(x, y) = x^2/2 + y^2/2."""
    return Potential(
        "harmonic",
        value=lambda x, y: 0.5 * x * x + 0.5 * y * y,
        grad_x=lambda x, y: x + 0.0 * y,
        grad_y=lambda x, y: y + 0.0 * x,
    )


def builtin_zero() -> Potential:
    """V = 0."""
    return Potential(
        "zero",
        value=lambda x, y: 0.0 * x + 0.0 * y,
        grad_x=lambda x, y: 0.0 * x + 0.0 * y,
        grad_y=lambda x, y: 0.0 * x + 0.0 * y,
    )


REGISTRY: dict[str, Callable[[], Potential]] = {
    "sin_x2_y2": builtin_sin_quadratic,
    "harmonic": builtin_harmonic,
    "zero": builtin_zero,
}


def get_potential(name: str) -> Potential:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise KeyError(
            f"unknown potential {name!r}; available: {sorted(REGISTRY)}") from None


def ehrenfest_potential_gradient(V: Potential, psi: WaveFunction, y: float) -> float:
    """Mean force on the nucleus, integral of grad_y V(x, y) |psi(x)|^2 dx."""
    x = psi.grid.nodes
    dens = psi.values.real**2 + psi.values.imag**2
    return float(quadrature(V.grad_y(x, y) * dens, psi.grid))
