"""Second-kind solves linking the boundary potential, normal velocity and
sheet strength.

The tangential projection of the boundary velocity gives

    Phi_alpha = omega/2 + BR(z, omega) . z_alpha  =  (1/2) (I + J) omega,

with (I + J) x = x + 2 BR(z, x) . z_alpha.  The same operator governs the
implicit part of the omega_t equation.  The normal projection gives

    BR(z, omega) . z_alpha^perp = u_normal |z_alpha|,

solvable up to a one-dimensional gauge fixed by prescribing mean(omega).

All operators are dense N x N matrices built from the shared kernel
matrix; direct factorization is the default at desk scale (N <= 512), with
a GMRES path above that falling back to dense on stagnation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from . import birkhoff_rott as br
from . import spectral
from .curve import InterfaceCurve, tangent_data
from .errors import CompatibilityError, SolverError


@dataclass
class IntegralEquationSettings:
    residual_tol: float = 1e-12
    max_iterations: int = 200
    method: str = "auto"          # dense_direct | iterative | auto
    dense_cutoff: int = 512

    def __post_init__(self):
        if self.residual_tol < np.finfo(float).eps * 100:
            raise ValueError("residual_tol below 100*machine epsilon")
        if self.method not in ("auto", "dense_direct", "iterative"):
            raise ValueError(f"unknown method {self.method!r}")

    def use_dense(self, n: int) -> bool:
        if self.method == "dense_direct":
            return True
        if self.method == "iterative":
            return False
        return n <= self.dense_cutoff


DEFAULT_SETTINGS = IntegralEquationSettings()


def tangential_coupling_matrix(curve: InterfaceCurve,
                               m: np.ndarray | None = None) -> np.ndarray:
    """Real matrix T with (BR(z, x) . z_alpha)_i = (T x)_i."""
    if m is None:
        m = br.kernel_matrix(curve)
    z_alpha = tangent_data(curve).z_alpha
    # BR . z_alpha = Re(conj(BR) * z_alpha) and conj(BR) = M x with x real
    return np.real(z_alpha[:, None] * m)


def normal_coupling_matrix(curve: InterfaceCurve,
                           m: np.ndarray | None = None) -> np.ndarray:
    """Real matrix A with (BR(z, x) . z_alpha^perp)_i = (A x)_i."""
    if m is None:
        m = br.kernel_matrix(curve)
    z_alpha = tangent_data(curve).z_alpha
    return np.real((1j * z_alpha)[:, None] * m)


def ipj_matrix(curve: InterfaceCurve, m: np.ndarray | None = None) -> np.ndarray:
    """(I + J) as a dense real matrix."""
    t = tangential_coupling_matrix(curve, m)
    return np.eye(curve.n) + 2.0 * t


def apply_i_plus_j(curve: InterfaceCurve, omega: np.ndarray,
                   m: np.ndarray | None = None) -> np.ndarray:
    """(I + J) omega = omega + 2 BR(z, omega) . z_alpha."""
    omega = np.asarray(omega, dtype=float)
    sheet = br.VortexSheet(curve, omega)
    field = br.br_boundary(sheet, m=m)
    z_alpha = tangent_data(curve).z_alpha
    return omega + 2.0 * np.real(np.conj(field) * z_alpha)


class TangentialSolver:
    """Factorization of (I + J) with deflation of the closed-contour null.

    On a closed contour the continuum operator annihilates the equilibrium
    density (the sheet strength whose induced interior velocity vanishes),
    so it is invertible only on a complement; the discrete matrix inherits
    this as a single tiny singular value that would otherwise amplify
    roundoff catastrophically.  When near-singularity is detected the null
    pair is extracted by inverse iteration, a rank-one correction restores
    conditioning, and solutions are gauged to a prescribed mean -- the
    natural choice, since the total circulation is conserved and the
    equilibrium component is pure gauge for the water-side velocity.
    """

    DEFLATION_TRIGGER = 1e7

    def __init__(self, a: np.ndarray):
        self.a = a
        n = a.shape[0]
        lu = sla.lu_factor(a)
        seed = np.ones(n) / np.sqrt(n)
        probe = sla.lu_solve(lu, seed)
        self.deflated = bool(np.linalg.norm(probe) > self.DEFLATION_TRIGGER)
        if not self.deflated:
            self.lu = lu
            self.v0 = self.u0 = None
            return
        v = probe / np.linalg.norm(probe)
        v = sla.lu_solve(lu, v)
        self.v0 = v / np.linalg.norm(v)
        u = sla.lu_solve(lu, seed, trans=1)
        u = sla.lu_solve(lu, u / np.linalg.norm(u), trans=1)
        self.u0 = u / np.linalg.norm(u)
        self.lu = sla.lu_factor(a + np.outer(self.u0, self.v0))

    def solve(self, rhs: np.ndarray, mean_gauge: float | None = None) -> np.ndarray:
        x = sla.lu_solve(self.lu, rhs)
        mat = self.a if not self.deflated else self.a + np.outer(self.u0, self.v0)
        x += sla.lu_solve(self.lu, rhs - mat @ x)
        if self.deflated and mean_gauge is not None:
            v_mean = float(np.mean(self.v0))
            if abs(v_mean) > 1e-8:
                x = x + (mean_gauge - float(np.mean(x))) / v_mean * self.v0
        return x

    def residual(self, x: np.ndarray, rhs: np.ndarray) -> float:
        """Defect of the original system, on the solvable complement when
        deflated (the null-direction component is the discrete solvability
        defect, reported separately)."""
        r = self.a @ x - rhs
        if self.deflated:
            r = r - (self.u0 @ r) * self.u0
        return float(np.max(np.abs(r)))

    def solvability_defect(self, x: np.ndarray, rhs: np.ndarray) -> float:
        if not self.deflated:
            return 0.0
        return float(abs(self.u0 @ (self.a @ x - rhs)))


def _solve_linear(a: np.ndarray, rhs: np.ndarray,
                  settings: IntegralEquationSettings,
                  mean_gauge: float | None = None,
                  solver: TangentialSolver | None = None) -> tuple[np.ndarray, TangentialSolver]:
    """Solve A x = rhs, preferring GMRES above the dense cutoff but always
    falling back to the (deflated) factorization when it stagnates."""
    if solver is None and not settings.use_dense(a.shape[0]):
        x, info = spla.gmres(a, rhs, rtol=settings.residual_tol / 10.0,
                             maxiter=settings.max_iterations)
        if info == 0:
            solver = TangentialSolver(a)
            if not solver.deflated:
                return x, solver
            return solver.solve(rhs, mean_gauge), solver
    if solver is None:
        solver = TangentialSolver(a)
    return solver.solve(rhs, mean_gauge), solver


def _check_residual(solver, x, rhs, settings, what):
    residual = solver.residual(x, rhs)
    scale = max(1.0, float(np.max(np.abs(rhs))))
    # factorization roundoff grows with n and conditioning; don't flag
    # below that floor
    tol = max(settings.residual_tol, 1000.0 * len(rhs) * np.finfo(float).eps)
    if residual > tol * scale:
        raise SolverError(f"{what}: residual {residual:.3g} above "
                          f"{tol:g} * {scale:.3g}", residual=residual)
    return residual


def solve_omega_from_phi(curve: InterfaceCurve, phi_alpha: np.ndarray,
                         settings: IntegralEquationSettings = DEFAULT_SETTINGS,
                         ipj: np.ndarray | None = None,
                         solver: TangentialSolver | None = None,
                         mean_omega: float = 0.0) -> np.ndarray:
    """Invert (1/2)(I + J) omega = Phi_alpha for the sheet strength.

    ``phi_alpha`` must have zero mean (it is the derivative of a periodic
    function).  On open (physical) curves the discrete operator fixes the
    solution outright and the resulting mean is simply reported through
    the solution; on closed contours the equilibrium-density gauge is
    pinned to ``mean_omega``.
    """
    phi_alpha = np.asarray(phi_alpha, dtype=float)
    mean = abs(float(np.mean(phi_alpha)))
    if mean > 1e-10:
        raise CompatibilityError(f"phi_alpha has mean {mean:.3g}, expected 0")
    if solver is None:
        solver = TangentialSolver(ipj_matrix(curve) if ipj is None else ipj)
    omega = solver.solve(2.0 * phi_alpha, mean_gauge=mean_omega)
    _check_residual(solver, omega, 2.0 * phi_alpha, settings, "omega from phi_alpha")
    return omega


def solve_omega_t(curve: InterfaceCurve, explicit_rhs: np.ndarray,
                  settings: IntegralEquationSettings = DEFAULT_SETTINGS,
                  ipj: np.ndarray | None = None,
                  solver: TangentialSolver | None = None) -> np.ndarray:
    """Resolve the implicit sheet-strength rate: (I + J) omega_t = rhs.

    ``explicit_rhs`` carries every term of the omega_t equation except the
    BR(z, omega_t) . z_alpha part hidden in the time derivative of BR.
    On closed contours the gauge is mean(omega_t) = 0: total circulation
    is a conserved quantity.
    """
    explicit_rhs = np.asarray(explicit_rhs, dtype=float)
    if solver is None:
        solver = TangentialSolver(ipj_matrix(curve) if ipj is None else ipj)
    omega_t = solver.solve(explicit_rhs, mean_gauge=0.0)
    _check_residual(solver, omega_t, explicit_rhs, settings, "omega_t solve")
    return omega_t


def _smoothest_combination(basis: np.ndarray) -> np.ndarray:
    """Unit-norm combination of the rows of ``basis`` minimizing the
    (1 + m^2)-weighted spectral energy."""
    if basis.shape[0] == 1:
        return basis[0]
    n = basis.shape[1]
    m = np.fft.fftfreq(n, d=1.0 / n)
    weight = 1.0 + m ** 2
    hats = np.fft.fft(basis, axis=1) / n
    q = np.real(hats.conj() @ (weight[:, None] * hats.T))
    vals, vecs = np.linalg.eigh(q)
    combo = basis.T @ vecs[:, 0]
    return combo / np.linalg.norm(combo)


def solve_omega_from_normal_velocity(curve: InterfaceCurve, u_normal: np.ndarray,
                                     settings: IntegralEquationSettings = DEFAULT_SETTINGS,
                                     mean_omega: float = 0.0,
                                     null_threshold: float = 1e-4,
                                     residual_tol: float | None = None) -> np.ndarray:
    """Sheet strength reproducing a prescribed normal boundary velocity.

    Solves BR(z, omega) . z_alpha^perp = u_normal |z_alpha| with the
    one-dimensional gauge fixed by mean(omega) = ``mean_omega``.  The data
    must satisfy the zero-flux compatibility int u_normal |z_alpha| = 0.

    ``residual_tol`` bounds the accepted defect on the mean-zero
    complement; by default it follows the settings, with a floor of 1e-9.
    Near-singular geometry may only support a larger defect (the truncated
    directions of the operator carry part of generic data); callers opting
    into that pass the bound explicitly and report the achieved residual.
    """
    u_normal = np.asarray(u_normal, dtype=float)
    speed = tangent_data(curve).speed
    flux = spectral.integral(u_normal * speed)
    scale = max(1.0, float(np.max(np.abs(u_normal * speed))))
    if abs(flux) > 1e-10 * scale:
        raise CompatibilityError(
            f"normal-velocity flux {flux:.3g} violates the zero-mean constraint")
    a = normal_coupling_matrix(curve)
    rhs = u_normal * speed
    # The continuum operator has a one-dimensional null space (the
    # circulation density inducing a purely tangential field).  Solve by
    # SVD: directions below the null threshold are excluded from the
    # solve and the best-characterized one carries the mean gauge.  At
    # marginal resolution the discrete operator can come out invertible;
    # the gauge is then reported through the solution's own mean rather
    # than enforced, which would inject a spurious uniform flux.
    u_mat, sv, vt = np.linalg.svd(a)
    null_mask = sv < null_threshold * sv[0]
    null_dim = int(np.sum(null_mask))
    if null_dim > 2:
        raise SolverError(
            f"normal-velocity operator has {null_dim}-dimensional "
            "near-null space (expected 1, tolerating the alternating-rule "
            "parity copy)", residual=float(sv[-1]))
    inv = np.where(null_mask, 0.0, 1.0 / np.where(null_mask, 1.0, sv))
    omega = vt.T @ (inv * (u_mat.T @ rhs))
    if null_dim >= 1:
        # The alternating quadrature decouples even and odd nodes, which can
        # split the circulation mode into two grid copies.  Only the smooth
        # combination is physical: pick the null combination with the least
        # high-frequency energy and carry the mean gauge on it alone.
        basis = vt[len(sv) - null_dim:]
        smooth = _smoothest_combination(basis)
        smooth_mean = float(np.mean(smooth))
        if abs(smooth_mean) > 1e-8:
            omega = omega + (mean_omega - float(np.mean(omega))) / smooth_mean * smooth
    resid = a @ omega - rhs
    resid -= np.mean(resid)   # residual judged on the mean-zero complement
    residual = float(np.max(np.abs(resid)))
    bound = residual_tol if residual_tol is not None else max(
        settings.residual_tol, 1e-9)
    if residual > bound * scale:
        raise SolverError(
            f"normal-velocity solve residual {residual:.3g}", residual=residual)
    return omega
