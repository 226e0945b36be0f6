import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splashwave import spectral as sp
from splashwave.errors import GridError
from splashwave.spectral import Grid


def test_grid_layout():
    g = Grid(64)
    assert g.alpha[0] == -np.pi
    assert g.h == pytest.approx(2 * np.pi / 64, abs=0)
    assert np.allclose(np.diff(g.alpha), g.h)


def test_grid_rejects_odd_and_tiny():
    with pytest.raises(GridError):
        Grid(63)
    with pytest.raises(GridError):
        Grid(4)


class TestTransform:
    def test_cos_single_mode(self, grid64):
        modes = sp.to_spectral(np.cos(grid64.alpha))
        m = sp.mode_numbers(64)
        assert abs(modes[m == 1][0] - 0.5) <= 1e-14
        assert abs(modes[m == -1][0] - 0.5) <= 1e-14
        others = np.abs(modes[(m != 1) & (m != -1)])
        assert others.max() <= 1e-14

    def test_constant(self, grid64):
        modes = sp.to_spectral(np.ones(64))
        m = sp.mode_numbers(64)
        assert abs(modes[m == 0][0] - 1.0) <= 1e-14
        assert np.abs(modes[m != 0]).max() <= 1e-15

    def test_sin3(self, grid64):
        modes = sp.to_spectral(np.sin(3 * grid64.alpha))
        m = sp.mode_numbers(64)
        assert abs(modes[m == 3][0] - (-0.5j)) <= 1e-14
        assert abs(modes[m == -3][0] - 0.5j) <= 1e-14

    def test_round_trip(self, grid64):
        rng = np.random.default_rng(3)
        f = rng.standard_normal(64)
        back = sp.from_spectral(sp.to_spectral(f))
        assert np.max(np.abs(back - f)) <= 1e-13 * max(1.0, np.max(np.abs(f)))

    def test_rejects_odd_length(self):
        with pytest.raises(GridError):
            sp.to_spectral(np.ones(63))


class TestDerivative:
    def test_sin_first(self, grid64):
        out = sp.derivative(np.sin(grid64.alpha))
        assert np.max(np.abs(out - np.cos(grid64.alpha))) <= 1e-12

    def test_cos2_third(self, grid64):
        out = sp.derivative(np.cos(2 * grid64.alpha), order=3)
        assert np.max(np.abs(out - 8 * np.sin(2 * grid64.alpha))) <= 1e-11

    def test_constant_any_order(self, grid64):
        for order in (1, 2, 5):
            assert np.max(np.abs(sp.derivative(np.full(64, 2.5), order))) == 0.0

    def test_composition(self, grid64):
        rng = np.random.default_rng(5)
        # band-limited random field
        f = sum(rng.standard_normal() * np.cos(k * grid64.alpha)
                + rng.standard_normal() * np.sin(k * grid64.alpha)
                for k in range(1, 12))
        twice = sp.derivative(sp.derivative(f))
        second = sp.derivative(f, order=2)
        assert np.max(np.abs(twice - second)) <= 1e-11 * np.max(np.abs(f))


class TestSobolev:
    def test_cos3_half(self, grid64):
        value = sp.sobolev_norm(np.cos(3 * grid64.alpha), 0.5)
        assert value == pytest.approx(np.sqrt(np.sqrt(10.0) / 2.0), abs=1e-12)

    def test_zero(self, grid64):
        assert sp.sobolev_norm(np.zeros(64), 1.7) == 0.0

    def test_cos_l2(self, grid64):
        assert sp.sobolev_norm(np.cos(grid64.alpha), 0.0) == pytest.approx(
            np.sqrt(0.5), abs=1e-13)

    def test_l2_matches_parseval(self, grid64):
        rng = np.random.default_rng(11)
        f = sum(rng.standard_normal() * np.cos(k * grid64.alpha) for k in range(1, 20))
        lhs = sp.sobolev_norm(f, 0.0) ** 2
        rhs = np.mean(f ** 2)  # (1/2pi) int f^2
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestKrasnyFilter:
    def test_zero_threshold_identity(self, grid64):
        rng = np.random.default_rng(2)
        f = rng.standard_normal(64)
        assert np.array_equal(sp.krasny_filter(f, 0.0), f)

    def test_removes_tiny_mode(self, grid64):
        f = np.cos(grid64.alpha) + 1e-15 * np.cos(20 * grid64.alpha)
        out = sp.krasny_filter(f, 1e-13)
        assert np.max(np.abs(out - np.cos(grid64.alpha))) <= 1e-15

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        f = rng.standard_normal(64)
        once = sp.krasny_filter(f, 1e-6)
        twice = sp.krasny_filter(once, 1e-6)
        assert np.max(np.abs(twice - once)) <= 1e-15 * max(1.0, np.max(np.abs(f)))


def test_antiderivative_inverts_derivative(grid64):
    f = np.cos(3 * grid64.alpha) - 0.4 * np.sin(7 * grid64.alpha)
    assert np.max(np.abs(sp.derivative(sp.antiderivative(f)) - f)) <= 1e-12


def test_integral_exact_for_trig(grid64):
    f = 2.0 + np.cos(grid64.alpha)
    assert sp.integral(f) == pytest.approx(4 * np.pi, rel=1e-14)


def test_resize_round_trip(grid64):
    f = np.exp(np.cos(grid64.alpha))
    up = sp.resize(f, 256)
    assert np.max(np.abs(sp.resize(up, 64) - f)) <= 1e-13


def test_interpolate_matches_function(grid64):
    f = np.cos(3 * grid64.alpha) + 0.2 * np.sin(5 * grid64.alpha)
    theta = np.array([0.1, -2.3, 1.234567])
    exact = np.cos(3 * theta) + 0.2 * np.sin(5 * theta)
    assert np.max(np.abs(sp.interpolate(f, theta) - exact)) <= 1e-13
