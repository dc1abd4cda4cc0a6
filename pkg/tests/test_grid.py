import numpy as np
import pytest

from qcmd import Grid, WaveFunction, fourier_modes, make_grid, mass, normalize, quadrature
from qcmd.grid import spectral_weights

from conftest import random_normalized_wavefunction


class TestMakeGrid:
    def test_paper_resolution(self):
        # 32 / 0.04 = 800, next power of two is 1024
        assert make_grid(0.04, 32).n_points == 1024

    def test_h_one(self):
        assert make_grid(1.0, 32).n_points == 32

    def test_exact_power(self):
        # 32 * 2^10 is itself a power of two, no extra doubling
        assert make_grid(2.0**-10, 32).n_points == 32768

    def test_spacing_bound(self):
        for h in (0.04, 0.3, 2.0**-7):
            g = make_grid(h, 32)
            assert g.spacing <= 2.0 * np.pi * h / 32 + 1e-15

    def test_monotone_in_h(self):
        hs = [1.0, 0.5, 0.3, 0.11, 0.04, 2.0**-7, 2.0**-9]
        ns = [make_grid(h).n_points for h in hs]
        assert all(a <= b for a, b in zip(ns, ns[1:]))

    def test_cap(self):
        with pytest.raises(ValueError, match="cap"):
            make_grid(2.0**-20, 32, max_points=2**10)

    def test_domain_and_validation(self):
        g = make_grid(0.5)
        assert g.x_min == -np.pi and g.x_max == np.pi
        assert g.spacing * g.n_points == pytest.approx(2 * np.pi, abs=1e-15)
        with pytest.raises(ValueError):
            make_grid(0.0)
        with pytest.raises(ValueError):
            make_grid(1.5)
        with pytest.raises(ValueError):
            make_grid(0.1, min_points_per_h=4)

    def test_grid_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            Grid(-np.pi, np.pi, 100)
        with pytest.raises(ValueError):
            Grid(0.0, 0.0, 64)


class TestMass:
    def test_uniform_state(self):
        g = Grid(n_points=64)
        psi = WaveFunction(g, np.full(64, (2 * np.pi) ** -0.5, dtype=complex), 1.0)
        assert mass(psi) == pytest.approx(1.0, abs=1e-14)

    def test_zero_state(self):
        g = Grid(n_points=32)
        assert mass(WaveFunction(g, np.zeros(32), 1.0)) == 0.0

    def test_normalize_paper_packet(self, paper_state):
        assert abs(mass(paper_state.psi) - 1.0) <= 1e-12
        assert paper_state.psi.normalized

    def test_normalize_zero_raises(self):
        g = Grid(n_points=32)
        with pytest.raises(ValueError):
            normalize(WaveFunction(g, np.zeros(32), 1.0))


class TestFourierModes:
    def test_standard_ordering_n8(self):
        k = fourier_modes(Grid(-np.pi, np.pi, 8))
        assert np.array_equal(k, [0, 1, 2, 3, -4, -3, -2, -1])

    def test_other_domain(self):
        k = fourier_modes(Grid(0.0, 2 * np.pi, 4))
        assert np.array_equal(k, [0, 1, -2, -1])

    def test_mode_512_of_1024(self):
        k = fourier_modes(Grid(-np.pi, np.pi, 1024))
        assert k[512] == -512


class TestQuadrature:
    def test_constant(self):
        g = Grid(n_points=16)
        assert quadrature(np.ones(16), g) == pytest.approx(2 * np.pi, abs=1e-13)

    def test_odd_function(self):
        g = Grid(n_points=32)
        assert abs(quadrature(np.sin(g.nodes), g)) <= 1e-14

    def test_cos_squared(self):
        g = Grid(n_points=16)
        assert quadrature(np.cos(g.nodes) ** 2, g) == pytest.approx(np.pi, abs=1e-13)

    def test_trig_polynomial_spectral_accuracy(self, rng):
        # degree < n/2 integrates exactly under the periodic trapezoid rule
        g = Grid(n_points=32)
        coeffs = rng.normal(size=7)
        f = sum(c * np.cos((i + 1) * g.nodes) for i, c in enumerate(coeffs))
        f = f + 0.7 + 0.3 * np.sin(5 * g.nodes)
        assert quadrature(f, g) == pytest.approx(0.7 * 2 * np.pi, abs=1e-12)


class TestSpectralRoundTrip:
    def test_fft_identity(self, rng):
        for n in (8, 64, 512):
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            back = np.fft.ifft(np.fft.fft(v))
            assert np.abs(back - v).max() <= 1e-12 * np.abs(v).max()

    def test_spectral_weights_sum_to_mass(self, rng):
        g = Grid(n_points=128)
        psi = random_normalized_wavefunction(g, 0.5, rng)
        assert spectral_weights(psi).sum() == pytest.approx(mass(psi), abs=1e-12)


class TestWaveFunctionValidation:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            WaveFunction(Grid(n_points=16), np.zeros(8), 0.5)

    def test_h_range(self):
        with pytest.raises(ValueError):
            WaveFunction(Grid(n_points=16), np.zeros(16), 1.5)

    def test_values_read_only(self):
        psi = WaveFunction(Grid(n_points=16), np.ones(16), 0.5)
        with pytest.raises(ValueError):
            psi.values[0] = 2.0
