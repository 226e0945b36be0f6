import numpy as np
import pytest

from conftest import perturbed_sheet, poisson_strength
from oracles import br_refined_oracle
from splashwave import birkhoff_rott as br
from splashwave import curve as cv
from splashwave.curve import InterfaceCurve
from splashwave.errors import ArcChordError, TooCloseToBoundaryError
from splashwave.spectral import Grid


def circle(n, radius=1.5, orientation=+1):
    g = Grid(n)
    return InterfaceCurve(g, radius * np.cos(orientation * g.alpha),
                          radius * np.sin(orientation * g.alpha), "tilde")


class TestBoundary:
    def test_flat_uniform_strength(self, flat_curve):
        out = br.br_boundary(br.VortexSheet(flat_curve, np.ones(flat_curve.n)))
        assert np.max(np.abs(out)) <= 1e-13

    def test_circle_closed_form(self):
        R, w0 = 1.5, 0.7
        c = circle(128, R)
        out = br.br_boundary(br.VortexSheet(c, np.full(128, w0)))
        target = (w0 / (2 * R)) * 1j * np.exp(1j * c.grid.alpha)
        assert np.max(np.abs(out - target)) <= 1e-10

    def test_perturbed_sheet_vs_refined_oracle(self):
        c = perturbed_sheet(256)
        omega = 1 + 0.3 * np.cos(c.grid.alpha)
        prod = br.br_boundary(br.VortexSheet(c, omega))
        oracle = br_refined_oracle(c, omega)
        assert np.max(np.abs(prod - oracle)) <= 1e-8

    def test_linearity(self):
        c = circle(128)
        g = c.grid
        w1, w2 = np.cos(g.alpha), np.sin(3 * g.alpha)
        b1 = br.br_boundary(br.VortexSheet(c, w1))
        b2 = br.br_boundary(br.VortexSheet(c, w2))
        b12 = br.br_boundary(br.VortexSheet(c, 2 * w1 - 3 * w2))
        assert np.max(np.abs(b12 - 2 * b1 + 3 * b2)) <= 1e-12

    def test_translation_invariance(self):
        c = circle(128)
        omega = np.exp(np.cos(c.grid.alpha))
        base = br.br_boundary(br.VortexSheet(c, omega))
        shifted = InterfaceCurve(c.grid, c.z1 + 0.5, c.z2 - 0.3, "tilde")
        out = br.br_boundary(br.VortexSheet(shifted, omega))
        assert np.max(np.abs(out - base)) <= 1e-12

    def test_arc_chord_guard(self):
        c = cv.make_splash_family(0.0, n=256)   # physical touching curve
        with pytest.raises(ArcChordError):
            br.br_boundary(br.VortexSheet(c, np.ones(256)))

    def test_spectral_convergence(self):
        """Error vs the refined oracle drops >= 3 decades per doubling on
        a fixture with geometric coefficient decay, until roundoff."""
        errors = {}
        for n in (32, 64, 128):
            g = Grid(n)
            c = InterfaceCurve(g, g.alpha + 0.1 * np.sin(g.alpha),
                               0.1 * np.cos(g.alpha))
            omega = poisson_strength(g, q=0.6)
            prod = br.br_boundary(br.VortexSheet(c, omega))
            oracle = br_refined_oracle(c, omega, refine=32)
            errors[n] = np.max(np.abs(prod - oracle))
        drop_1 = errors[32] / max(errors[64], 1e-300)
        drop_2 = errors[64] / max(errors[128], 1e-300)
        assert drop_1 >= 1e3 or errors[64] <= 1e-13
        assert drop_2 >= 1e3 or errors[128] <= 1e-13


class TestInterior:
    def test_center_of_uniform_circle(self):
        c = circle(128)
        v = br.br_interior(0j, br.VortexSheet(c, np.full(128, 0.7)))
        assert abs(v) <= 1e-13

    def test_far_field_circulation(self):
        R, w0 = 1.5, 0.7
        c = circle(128, R)
        r = 10.0
        v = br.br_interior(r + 0j, br.VortexSheet(c, np.full(128, w0)))
        # total circulation 2 pi w0: speed w0 / r, purely tangential
        assert abs(abs(v) - w0 / r) <= 1e-6
        assert abs(np.real(np.conj(v) * (1.0 + 0j))) <= 1e-6   # no radial part

    def test_zero_strength(self):
        c = circle(64)
        v = br.br_interior(np.array([0j, 3.0 + 1j]), br.VortexSheet(c, np.zeros(64)))
        assert np.max(np.abs(v)) == 0.0

    def test_proximity_guard(self):
        c = circle(64)
        with pytest.raises(TooCloseToBoundaryError):
            br.br_interior(1.45 + 0j, br.VortexSheet(c, np.ones(64)))

    def test_jump_relation(self):
        """Water-side limit equals BR + omega z_alpha / (2 |z_alpha|^2).

        For the counterclockwise circle the normal points inward, so the
        water side is the exterior; approach along the outward radius and
        extrapolate polynomially to distance zero.
        """
        n = 1024
        R, w0 = 1.5, 0.7
        c = circle(n, R)
        sheet = br.VortexSheet(c, np.full(n, w0))
        td = cv.tangent_data(c)
        i = 37
        alpha_i = c.grid.alpha[i]
        boundary = br.br_boundary(sheet)[i] + 0.5 * w0 * td.z_alpha[i] / td.speed[i] ** 2
        dists = np.array([0.20, 0.175, 0.15, 0.125, 0.10])
        vals = np.array([br.br_interior((R + d) * np.exp(1j * alpha_i), sheet)
                         for d in dists])
        fit_re = np.polyfit(dists, np.real(vals), 3)
        fit_im = np.polyfit(dists, np.imag(vals), 3)
        approached = fit_re[-1] + 1j * fit_im[-1]
        assert abs(approached - boundary) <= 1e-4


class TestTimeKernel:
    def test_zero_motion(self):
        c = perturbed_sheet(128)
        out = br.br_time_explicit(br.VortexSheet(c, np.cos(c.grid.alpha)),
                                  np.zeros(128, dtype=complex))
        assert np.max(np.abs(out)) == 0.0

    def test_rigid_translation_matches_fd(self):
        n = 128
        c = circle(n)
        omega = np.exp(np.cos(c.grid.alpha))
        c0 = 0.3 - 0.4j
        dt = 1e-5

        def shifted(eps):
            cc = InterfaceCurve(c.grid, c.z1 + eps * c0.real, c.z2 + eps * c0.imag, "tilde")
            return br.br_boundary(br.VortexSheet(cc, omega))

        fd = (shifted(dt) - shifted(-dt)) / (2 * dt)
        out = br.br_time_explicit(br.VortexSheet(c, omega), np.full(n, c0))
        assert np.max(np.abs(out - fd)) <= 1e-6

    def test_general_motion_matches_fd(self):
        c = perturbed_sheet(256)
        g = c.grid
        omega = 1 + 0.3 * np.cos(g.alpha)
        z_t = np.sin(g.alpha) + 1j * np.cos(2 * g.alpha)
        dt = 1e-5
        p1, p2 = c.periodic_parts()

        def moved(eps):
            cc = InterfaceCurve.from_periodic_parts(
                g, p1 + eps * np.real(z_t), p2 + eps * np.imag(z_t))
            return br.br_boundary(br.VortexSheet(cc, omega))

        fd = (moved(dt) - moved(-dt)) / (2 * dt)
        out = br.br_time_explicit(br.VortexSheet(c, omega), z_t)
        assert np.max(np.abs(out - fd)) <= 1e-6
