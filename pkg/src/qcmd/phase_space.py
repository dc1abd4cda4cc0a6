"""Phase-space representations: Wigner transform and Husimi function.

The h-scaled Wigner transform of psi is

    w[psi](x, xi) = (2 pi)^-1 integral psi(x - h y / 2) conj(psi)(x + h y / 2)
                    exp(i xi y) dy.

On the grid it is discretized with correlation offsets that land exactly
on grid nodes, y_m = 2 m dx / h, so no interpolation enters; the induced
momentum nodes are xi_k = k * dxi with dxi = pi h / (n dx).  With this
pairing the xi-sum of each row telescopes exactly to |psi(x_j)|^2 and
the total phase-space quadrature equals the mass of psi.

Offsets beyond a quarter of the domain are zeroed: on a periodic domain
the correlation at offsets near n/2 folds an interior packet onto the
midpoint antipodal to it, producing a spurious oscillatory mirror blob
of full amplitude (and inflating the L2 norm by exactly sqrt(2)).  For
states whose correlations decay inside a quarter domain -- every
localized packet used here -- the discarded offsets carry only
round-off-level weight, while the exact marginal and mass identities are
unaffected (they hook only the zero offset).

The Husimi function is the squared overlap with coherent states,

    sigma[psi](x, xi) = |<g_(x,xi), psi>|^2 / (2 pi h),

a non-negative density; it equals the Wigner field smoothed by the
Gaussian (pi h)^-1 exp(-(x^2 + xi^2)/h), which is kept here only as a
test oracle -- the direct inner products compound fewer quadrature
errors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Grid, WaveFunction, mass, spectral_weights, fourier_modes

#: relative |psi|^2 allowed at the domain edge before periodic wrap-around
#: in the Wigner correlation stops being physically meaningful
BOUNDARY_DENSITY_TOL = 1e-8

#: drop transported phase-space nodes whose weight is below this fraction
#: of the field maximum (tail contribution provably negligible)
NEGLIGIBLE_WEIGHT = 1e-14


@dataclass(frozen=True, eq=False)
class PhaseSpaceField:
    """Real field sampled on a tensor (x, xi) grid."""

    x_nodes: np.ndarray
    xi_nodes: np.ndarray
    values: np.ndarray  # shape (n_x, n_xi)
    kind: str           # "wigner" | "husimi"
    h: float

    def __post_init__(self):
        if self.kind not in ("wigner", "husimi"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.values.shape != (len(self.x_nodes), len(self.xi_nodes)):
            raise ValueError(f"values shape {self.values.shape} does not match nodes")

    @property
    def dx(self) -> float:
        return float(self.x_nodes[1] - self.x_nodes[0])

    @property
    def dxi(self) -> float:
        return float(self.xi_nodes[1] - self.xi_nodes[0])

    def total(self) -> float:
        """Full phase-space quadrature; equals mass(psi) up to truncation."""
        return float(self.values.sum() * self.dx * self.dxi)


def boundary_density(psi: WaveFunction) -> float:
    """|psi|^2 at the domain edges relative to its maximum."""
    dens = psi.values.real**2 + psi.values.imag**2
    peak = dens.max()
    if peak == 0.0:
        return 0.0
    return float(max(dens[0], dens[-1]) / peak)


def wigner_transform(psi: WaveFunction, boundary_tol: float | None = BOUNDARY_DENSITY_TOL,
                     _row_block: int = 1 << 21) -> PhaseSpaceField:
    """Discrete Wigner field of psi on the full n x n phase-space grid.

    boundary_tol guards the periodic wrap-around of the correlation
    product: states with edge density above it are rejected.  Pass None
    to disable (legitimate for intrinsically periodic data, where the
    wrap is exact).
    """
    grid = psi.grid
    n = grid.n_points
    if n * psi.h < 32.0 - 1e-12:
        raise ValueError(
            f"grid too coarse for h={psi.h}: n={n} < 32/h={32.0 / psi.h:.1f} (aliasing)")
    if boundary_tol is not None:
        bd = boundary_density(psi)
        if bd >= boundary_tol:
            raise ValueError(
                f"relative boundary density {bd:.2e} >= {boundary_tol:.0e}: "
                "wavepacket touches the domain edge, periodic Wigner wrap invalid")
    dx = grid.spacing
    dxi = np.pi * psi.h / (n * dx)
    xi_nodes = dxi * (np.arange(n) - n // 2)

    v = psi.values
    scale = dx / (np.pi * psi.h)
    out = np.empty((n, n))
    rows_per_block = max(1, _row_block // n)
    idx = np.arange(n)
    # quarter-domain offset window (symmetric in m <-> n-m, keeps w real)
    offset = np.minimum(idx, n - idx)
    keep = offset <= n // 4
    for start in range(0, n, rows_per_block):
        rows = np.arange(start, min(start + rows_per_block, n))
        corr = v[(rows[:, None] - idx) % n] * np.conj(v[(rows[:, None] + idx) % n])
        corr[:, ~keep] = 0.0
        # sum_m corr_m exp(+2 pi i k m / n) = n * ifft(corr); hermitian in m,
        # so the imaginary residue is pure round-off
        block = n * np.fft.ifft(corr, axis=1)
        out[rows] = np.fft.fftshift(block.real, axes=1)
    out *= scale
    return PhaseSpaceField(grid.nodes, xi_nodes, out, "wigner", psi.h)


@dataclass(frozen=True)
class CoherentState:
    """Minimal-uncertainty Gaussian packet centered at (center_x, center_xi)."""

    center_x: float
    center_xi: float
    h: float

    def __post_init__(self):
        if not 0.0 < self.h <= 0.25:
            raise ValueError(f"coherent states require h in (0, 0.25], got {self.h}")

    def sample(self, grid: Grid) -> WaveFunction:
        d = grid.nodes - self.center_x
        vals = (np.pi * self.h) ** -0.25 * np.exp(
            -d * d / (2.0 * self.h) + 1j * self.center_xi * d / self.h)
        return WaveFunction(grid, vals, self.h)


def husimi_function(psi: WaveFunction, x_nodes: np.ndarray,
                    xi_nodes: np.ndarray) -> PhaseSpaceField:
    """Husimi field of psi at the requested phase-space nodes.

    Each node is the center of a coherent state of width sqrt(h); centers
    closer than 5 sqrt(h) to the domain edge only trigger a warning, since
    the Gaussian tail wraps with exponentially small weight.
    """
    m = mass(psi)
    if abs(m - 1.0) > 1e-8:
        raise ValueError(f"psi must be normalized for the Husimi transform, mass={m}")
    h = psi.h
    grid = psi.grid
    margin = 5.0 * np.sqrt(h)
    if (x_nodes.min() - grid.x_min < margin) or (grid.x_max - x_nodes.max() < margin):
        warnings.warn(
            f"Husimi centers within {margin:.3f} of the domain edge; "
            "coherent-state tails wrap around", stacklevel=2)

    nodes = grid.nodes
    pref = grid.spacing * (np.pi * h) ** -0.25
    vals = np.empty((len(x_nodes), len(xi_nodes)))
    for i, xc in enumerate(x_nodes):
        d = nodes - xc
        windowed = pref * np.exp(-d * d / (2.0 * h)) * psi.values
        phases = np.exp((-1j / h) * np.outer(xi_nodes, d))
        overlap = phases @ windowed
        vals[i] = (overlap.real**2 + overlap.imag**2) / (2.0 * np.pi * h)
    return PhaseSpaceField(np.asarray(x_nodes, dtype=float),
                           np.asarray(xi_nodes, dtype=float), vals, "husimi", h)


def husimi_box(psi: WaveFunction, n_nodes: int = 128,
               n_widths: float = 6.0) -> tuple[np.ndarray, np.ndarray]:
    """Phase-space window covering the Husimi mass of a localized packet.

    Centered at the packet's position/momentum means, with half-widths
    n_widths standard deviations of the Husimi marginals (packet variance
    plus the h/2 coherent-state smoothing).
    """
    x = psi.grid.nodes
    dens = (psi.values.real**2 + psi.values.imag**2) * psi.grid.spacing
    dens = dens / dens.sum()
    mean_x = float(np.dot(x, dens))
    var_x = float(np.dot((x - mean_x) ** 2, dens))
    p = spectral_weights(psi)
    p = p / p.sum()
    xi = psi.h * fourier_modes(psi.grid)
    mean_xi = float(np.dot(xi, p))
    var_xi = float(np.dot((xi - mean_xi) ** 2, p))
    wx = n_widths * np.sqrt(var_x + 0.5 * psi.h)
    wxi = n_widths * np.sqrt(var_xi + 0.5 * psi.h)
    return (np.linspace(mean_x - wx, mean_x + wx, n_nodes),
            np.linspace(mean_xi - wxi, mean_xi + wxi, n_nodes))


def wigner_expectation(a_flow, field: PhaseSpaceField, y0: float, v0: float,
                       threshold: float = NEGLIGIBLE_WEIGHT) -> float:
    """Phase-space expectation sum_jk a_flow(x_j, xi_k, y0, v0) w_jk dx dxi.

    a_flow is an evaluable transported symbol (x, xi, y, v) -> value;
    nodes whose |w| falls below threshold * max|w| are dropped before
    transport, which bounds the discarded tail by threshold times the
    field's l1 weight.
    """
    if field.kind != "wigner":
        raise ValueError(f"expected a wigner field, got {field.kind!r}")
    w = field.values
    cut = threshold * np.abs(w).max()
    sel = np.abs(w) >= cut
    xg, xig = np.meshgrid(field.x_nodes, field.xi_nodes, indexing="ij")
    vals = a_flow(xg[sel], xig[sel], y0, v0)
    return float(np.dot(vals, w[sel]) * field.dx * field.dxi)


def husimi_expectation(a_flow, lap_flow, field: PhaseSpaceField, h: float,
                       y0: float, v0: float) -> float:
    """Quadrature of (a - h/4 lap a) o flow against a Husimi field."""
    if field.kind != "husimi":
        raise ValueError(f"expected a husimi field, got {field.kind!r}")
    xg, xig = np.meshgrid(field.x_nodes, field.xi_nodes, indexing="ij")
    x = xg.ravel()
    xi = xig.ravel()
    integrand = a_flow(x, xi, y0, v0) - 0.25 * h * lap_flow(x, xi, y0, v0)
    return float(np.dot(integrand, field.values.ravel()) * field.dx * field.dxi)


def smooth_wigner_to_husimi(field: PhaseSpaceField, x: float, xi: float) -> float:
    """Husimi value at one probe by Gaussian-smoothing a Wigner field.

    Test oracle for the convolution identity sigma = w[g_(0,0)] * w[psi];
    production code uses the direct coherent-state overlaps instead.
    """
    if field.kind != "wigner":
        raise ValueError("smoothing applies to wigner fields")
    h = field.h
    kern_x = np.exp(-((x - field.x_nodes) ** 2) / h)
    kern_xi = np.exp(-((xi - field.xi_nodes) ** 2) / h)
    acc = kern_x @ field.values @ kern_xi
    return float(acc * field.dx * field.dxi / (np.pi * h))


def save_field(field: PhaseSpaceField, path) -> None:
    """Plain-text dump: header lines (kind, h, node vectors), row-major body."""
    with open(path, "w") as f:
        f.write(f"# kind: {field.kind}\n")
        f.write(f"# h: {field.h!r}\n")
        f.write("# x_nodes: " + " ".join(repr(float(v)) for v in field.x_nodes) + "\n")
        f.write("# xi_nodes: " + " ".join(repr(float(v)) for v in field.xi_nodes) + "\n")
        for row in field.values:
            f.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_field(path) -> PhaseSpaceField:
    with open(path) as f:
        kind = f.readline().split(":", 1)[1].strip()
        h = float(f.readline().split(":", 1)[1])
        x_nodes = np.array([float(t) for t in f.readline().split(":", 1)[1].split()])
        xi_nodes = np.array([float(t) for t in f.readline().split(":", 1)[1].split()])
        values = np.loadtxt(f, ndmin=2)
    return PhaseSpaceField(x_nodes, xi_nodes, values, kind, h)
