import numpy as np
import pytest

from conftest import perturbed_sheet
from oracles import assemble_operator_from_impulses
from splashwave import amplitude as am
from splashwave import birkhoff_rott as br
from splashwave import curve as cv
from splashwave.curve import InterfaceCurve
from splashwave.errors import CompatibilityError, SolverError
from splashwave.spectral import Grid


def band_limited(rng, n, kmax=20):
    g = Grid(n)
    return sum(rng.standard_normal() * np.cos(k * g.alpha)
               + rng.standard_normal() * np.sin(k * g.alpha)
               for k in range(1, kmax))


class TestApply:
    def test_flat_identity(self, flat_curve):
        omega = np.cos(flat_curve.grid.alpha)
        out = am.apply_i_plus_j(flat_curve, omega)
        assert np.max(np.abs(out - omega)) <= 1e-13

    def test_zero(self, circle_cw):
        out = am.apply_i_plus_j(circle_cw, np.zeros(circle_cw.n))
        assert np.max(np.abs(out)) == 0.0

    def test_matches_impulse_assembly(self, circle_cw):
        n = circle_cw.n
        dense = assemble_operator_from_impulses(
            lambda e: am.apply_i_plus_j(circle_cw, e), n)
        direct = am.ipj_matrix(circle_cw)
        assert np.max(np.abs(dense - direct)) <= 1e-12
        omega = np.cos(3 * circle_cw.grid.alpha)
        assert np.max(np.abs(dense @ omega - am.apply_i_plus_j(circle_cw, omega))) <= 1e-12


class TestSolveFromPhi:
    def test_flat_doubles(self, flat_curve):
        phi_alpha = np.cos(flat_curve.grid.alpha)
        omega = am.solve_omega_from_phi(flat_curve, phi_alpha)
        assert np.max(np.abs(omega - 2 * phi_alpha)) <= 1e-12

    def test_zero(self, flat_curve):
        omega = am.solve_omega_from_phi(flat_curve, np.zeros(flat_curve.n))
        assert np.max(np.abs(omega)) <= 1e-13

    def test_mean_violation_rejected(self, flat_curve):
        with pytest.raises(CompatibilityError):
            am.solve_omega_from_phi(flat_curve, 1.0 + np.cos(flat_curve.grid.alpha))

    def test_matches_dense_direct_at_64(self):
        c = perturbed_sheet(64)
        phi_alpha = np.sin(2 * c.grid.alpha)
        iterative = am.solve_omega_from_phi(
            c, phi_alpha, am.IntegralEquationSettings(method="iterative",
                                                      residual_tol=1e-13))
        dense = am.solve_omega_from_phi(
            c, phi_alpha, am.IntegralEquationSettings(method="dense_direct"))
        assert np.max(np.abs(iterative - dense)) <= 1e-8

    def test_round_trip_random(self):
        c = perturbed_sheet(128)
        rng = np.random.default_rng(21)
        for _ in range(3):
            omega = band_limited(rng, 128)
            phi_alpha = 0.5 * am.apply_i_plus_j(c, omega)
            back = am.solve_omega_from_phi(c, phi_alpha - np.mean(phi_alpha))
            # mean adjustment only affects the mean-compatible part
            assert np.max(np.abs(back - omega)) <= 1e-10 * max(1.0, np.max(np.abs(omega)))

    def test_closed_contour_gauged_round_trip(self, circle_cw):
        omega = np.cos(circle_cw.grid.alpha) + 0.3 * np.sin(2 * circle_cw.grid.alpha)
        phi_alpha = 0.5 * am.apply_i_plus_j(circle_cw, omega)
        back = am.solve_omega_from_phi(circle_cw, phi_alpha,
                                       mean_omega=float(np.mean(omega)))
        assert np.max(np.abs(back - omega)) <= 1e-10


class TestSolveRate:
    def test_zero(self, flat_curve):
        out = am.solve_omega_t(flat_curve, np.zeros(flat_curve.n))
        assert np.max(np.abs(out)) <= 1e-13

    def test_manufactured_recovery(self):
        c = perturbed_sheet(128)
        target = np.sin(2 * c.grid.alpha) + 0.2 * np.cos(5 * c.grid.alpha)
        rhs = am.apply_i_plus_j(c, target)
        got = am.solve_omega_t(c, rhs)
        assert np.max(np.abs(got - target)) <= 1e-9


class TestSolveFromNormalVelocity:
    def test_zero_on_circle(self, circle_cw):
        omega = am.solve_omega_from_normal_velocity(circle_cw, np.zeros(circle_cw.n))
        assert np.max(np.abs(omega)) <= 1e-9

    def test_constant_violates_compatibility(self, circle_cw):
        with pytest.raises(CompatibilityError):
            am.solve_omega_from_normal_velocity(circle_cw, np.full(circle_cw.n, 0.3))

    def test_manufactured_recovery_up_to_mean(self):
        c = perturbed_sheet(256)
        g = c.grid
        target = np.sin(2 * g.alpha) + 0.2 * np.cos(5 * g.alpha) + 0.4
        td = cv.tangent_data(c)
        induced = br.br_boundary(br.VortexSheet(c, target))
        u_n = np.real(np.conj(induced) * (1j * td.z_alpha)) / td.speed
        got = am.solve_omega_from_normal_velocity(c, u_n,
                                                  mean_omega=float(np.mean(target)))
        assert np.max(np.abs(got - target)) <= 1e-8

    def test_gauge_moves_mean_only(self, circle_cw):
        g = circle_cw.grid
        target = np.cos(2 * g.alpha)
        td = cv.tangent_data(circle_cw)
        induced = br.br_boundary(br.VortexSheet(circle_cw, target))
        u_n = np.real(np.conj(induced) * (1j * td.z_alpha)) / td.speed
        a = am.solve_omega_from_normal_velocity(circle_cw, u_n, mean_omega=0.0)
        b = am.solve_omega_from_normal_velocity(circle_cw, u_n, mean_omega=1.0)
        assert abs(np.mean(a) - 0.0) <= 1e-10
        assert abs(np.mean(b) - 1.0) <= 1e-10
        # both reproduce the data on the mean-zero complement
        for cand in (a, b):
            got = br.br_boundary(br.VortexSheet(circle_cw, cand))
            resid = np.real(np.conj(got) * (1j * td.z_alpha)) / td.speed - u_n
            resid -= np.mean(resid)
            assert np.max(np.abs(resid)) <= 1e-9


class TestSettings:
    def test_tolerance_floor(self):
        with pytest.raises(ValueError):
            am.IntegralEquationSettings(residual_tol=1e-17)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            am.IntegralEquationSettings(method="magic")


class TestDeflation:
    def test_closed_contour_detected(self, circle_cw):
        solver = am.TangentialSolver(am.ipj_matrix(circle_cw))
        assert solver.deflated

    def test_open_curve_not_deflected(self, flat_curve):
        solver = am.TangentialSolver(am.ipj_matrix(flat_curve))
        assert not solver.deflated

    def test_null_vector_annihilated(self, circle_cw):
        solver = am.TangentialSolver(am.ipj_matrix(circle_cw))
        a = am.ipj_matrix(circle_cw)
        assert np.max(np.abs(a @ solver.v0)) <= 1e-9
