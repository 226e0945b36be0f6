import numpy as np
import pytest

from splashwave import conformal as cf
from splashwave.errors import SingularPointError


def test_q_points_values():
    pts = cf.q_points()
    s = 1 / np.sqrt(2)
    assert pts[0] == (0.0, 0.0)
    assert pts[1] == pytest.approx((s, s))
    assert pts[3] == pytest.approx((-s, -s))
    assert len(pts) == 5


class TestInverse:
    def test_origin(self):
        assert cf.map_p_inverse(0j) == 0j

    def test_real_axis(self):
        assert cf.map_p_inverse(1.0 + 0j) == pytest.approx(np.pi / 2)

    def test_round_trip(self):
        z = 0.3 - 0.7j
        w = cf.map_p(z)
        assert abs(cf.map_p_inverse(w) - z) <= 1e-12

    def test_singular_guard(self):
        with pytest.raises(SingularPointError):
            cf.map_p_inverse(np.exp(1j * np.pi / 4))


class TestForward:
    def test_origin_is_fixed_point(self):
        # tan(0)/2 = 0, and both square roots coincide there
        assert abs(cf._principal_root(0j)) == 0.0

    def test_deep_water_limit(self):
        for x in (-2.0, 0.7, 3.0):
            w = cf.map_p(complex(x, -50.0))
            assert abs(w - cf.DEEP_WATER_IMAGE) <= 1e-10

    def test_quarter_period_by_continuation(self):
        # continuation up the vertical segment from the deep normalization
        # lands on the negative root of tan(pi/4)
        w = cf.map_p(complex(np.pi / 2, 0.0))
        assert abs(w - (-1.0)) <= 1e-10

    def test_curve_continuation_consistency(self):
        alpha = np.linspace(-np.pi, np.pi, 257)[:-1]
        z = alpha + 1j * (-0.8 + 0.1 * np.cos(alpha))
        w = cf.map_curve_points(z)
        back = cf.map_p_inverse(w)
        assert np.max(np.abs(back - z)) <= 1e-11


class TestMetric:
    def test_values(self):
        assert cf.q_squared(1 + 0j) == pytest.approx(0.25, abs=1e-15)
        assert cf.q_squared(2 + 0j) == pytest.approx(4.515625, abs=1e-12)

    def test_zero_at_marked_point(self):
        assert cf.q_squared(np.exp(1j * np.pi / 4)) <= 1e-30

    def test_matches_finite_difference_of_map(self):
        z0 = 0.3 - 0.7j
        w0 = cf.map_p(z0)
        h = 1e-6
        num = (cf.map_p(z0 + h, prev=w0) - cf.map_p(z0 - h, prev=w0)) / (2 * h)
        assert abs(abs(num) ** 2 - cf.q_squared(w0)) <= 1e-6

    def test_grad_q_by_finite_difference(self):
        w0 = 0.4 - 0.9j
        h = 1e-6
        g = cf.grad_q(w0)
        fd_x = (np.sqrt(cf.q_squared(w0 + h)) - np.sqrt(cf.q_squared(w0 - h))) / (2 * h)
        fd_y = (np.sqrt(cf.q_squared(w0 + 1j * h)) - np.sqrt(cf.q_squared(w0 - 1j * h))) / (2 * h)
        assert abs(np.real(g) - fd_x) <= 1e-8
        assert abs(np.imag(g) - fd_y) <= 1e-8

    def test_guards(self):
        with pytest.raises(SingularPointError):
            cf.q_squared(0j)
        with pytest.raises(SingularPointError):
            cf.grad_q(np.exp(1j * np.pi / 4) * (1 + 1e-14))


class TestHeight:
    def test_values(self):
        assert cf.p2_inverse(1 + 0j) == pytest.approx(0.0, abs=1e-15)
        assert cf.p2_inverse(0j) == pytest.approx(0.0, abs=1e-15)

    def test_recovers_physical_height(self):
        z = 0.4 - 1.3j
        assert cf.p2_inverse(cf.map_p(z)) == pytest.approx(-1.3, abs=1e-12)

    def test_grad_by_finite_difference(self):
        w0 = 0.4 - 0.9j
        h = 1e-6
        g = cf.grad_p2_inverse(w0)
        fd_x = (cf.p2_inverse(w0 + h) - cf.p2_inverse(w0 - h)) / (2 * h)
        fd_y = (cf.p2_inverse(w0 + 1j * h) - cf.p2_inverse(w0 - 1j * h)) / (2 * h)
        assert abs(np.real(g) - fd_x) <= 1e-8
        assert abs(np.imag(g) - fd_y) <= 1e-8


class TestVelocityTransforms:
    def test_zero(self):
        assert cf.velocity_pullback(0j, 0.5 - 0.5j) == 0j

    def test_norm_identity(self):
        rng = np.random.default_rng(8)
        w = 0.5 - 0.6j
        for _ in range(5):
            ut = complex(rng.standard_normal(), rng.standard_normal())
            u = cf.velocity_pullback(ut, w)
            assert abs(abs(u) ** 2 - cf.q_squared(w) * abs(ut) ** 2) <= 1e-12 * abs(ut) ** 2

    def test_pullback_pushforward_identity(self):
        rng = np.random.default_rng(9)
        w = -0.4 + 0.8j
        for _ in range(5):
            ut = complex(rng.standard_normal(), rng.standard_normal())
            back = cf.velocity_pushforward(cf.velocity_pullback(ut, w), w)
            assert abs(back - ut) <= 1e-12 * max(1.0, abs(ut))


class TestMarkedPointDistances:
    def test_circle_radius_two(self):
        theta = np.linspace(-np.pi, np.pi, 720)
        m = cf.min_distance_to_q(2.0 * np.exp(1j * theta))
        assert m[0] == pytest.approx(2.0, abs=1e-4)
        assert np.allclose(m[1:], 1.0, atol=1e-4)

    def test_unit_circle_touches(self):
        theta = np.linspace(-np.pi, np.pi, 1441)   # includes pi/4 exactly? no:
        theta = np.concatenate([theta, [np.pi / 4]])
        m = cf.min_distance_to_q(np.exp(1j * theta))
        assert m[1] <= 1e-15    # q^1 lies on the curve: flags invalid data

    def test_half_circle(self):
        theta = np.linspace(-np.pi, np.pi, 720)
        m = cf.min_distance_to_q(0.5 * np.exp(1j * theta))
        assert m[0] == pytest.approx(0.5, abs=1e-4)
        assert np.allclose(m[1:], 0.5, atol=1e-3)


def test_round_trip_grid_lower_strip():
    xs = np.linspace(-np.pi * 0.95, np.pi * 0.95, 20)
    ys = np.linspace(-3.0, -0.05, 20)
    worst = 0.0
    for x in xs:
        prev = None
        for y in ys[::-1]:
            z = complex(x, y)
            w = cf.map_p(z, prev=prev)
            prev = w
            worst = max(worst, abs(cf.map_p_inverse(w) - z))
    assert worst <= 1e-12
