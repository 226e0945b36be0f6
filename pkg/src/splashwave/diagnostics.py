"""Computable observables: the interface stability function, conserved and
Sobolev energies, marked-point margins and blowup-rate fits.

The stability function is the normal pressure gradient at the interface,

    sigma = -grad p . z_alpha^perp,

assembled from boundary data alone:

    sigma = (dBR/dt + (phi/|z_a|) BR_a) . z_a^perp
          + (omega / 2|z_a|^2) (z_at + (phi/|z_a|) z_aa) . z_a^perp
          + Q |BR + omega z_a/(2|z_a|^2)|^2 (grad Q) . z_a^perp
          + g (grad height) . z_a^perp,

where phi is the tangential gauge function and dBR/dt includes the
implicit BR(z, omega_t) part.  In the physical domain the metric terms
drop and the gravity term reduces to g z1_alpha.  Its value is invariant
between corresponding parametrizations of the two domains.

The conserved energy splits into a boundary integral and a line integral,

    E_S = (1/2) int Phi u . z_alpha^perp  +  (1/2) g int z2^2 z1_alpha,

both over one period in the physical domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import amplitude, birkhoff_rott as br, conformal, spectral
from .curve import InterfaceCurve, PHYSICAL, TILDE, arc_chord, map_curve, tangent_data
from .errors import SolverError, SplashwaveError
from .evolution import (OMEGA, PHI, EvalFrame, SheetState, StepperConfig,
                        evaluate_frame, _cderiv, _dot)


@dataclass
class DiagnosticsRecord:
    time: float
    e_total: float
    e_kinetic: float
    e_potential: float
    arc_chord_sup: float
    max_abs_omega: float
    min_sigma: float
    min_q2_sigma: float
    m_q: np.ndarray                # 5 margins, nan for physical-only states
    sobolev_e: float
    dt_used: float

    CSV_COLUMNS = ("t", "E_S", "E_k", "E_p", "arc_chord_sup", "max_abs_omega",
                   "min_sigma", "min_Q2_sigma", "m_q0", "m_q1", "m_q2", "m_q3",
                   "m_q4", "sobolev_E", "dt_used")

    def as_row(self) -> list[float]:
        return [self.time, self.e_total, self.e_kinetic, self.e_potential,
                self.arc_chord_sup, self.max_abs_omega, self.min_sigma,
                self.min_q2_sigma, *[float(v) for v in self.m_q],
                self.sobolev_e, self.dt_used]


def rayleigh_taylor_sigma(state: SheetState, config: StepperConfig | None = None,
                          frame: EvalFrame | None = None) -> np.ndarray:
    """The stability function on the grid; positive means stably stratified.

    Potential states first recover the sheet strength and its rate through
    the implicit solves; the formula itself never differentiates BR in
    time numerically.
    """
    config = config or StepperConfig()
    if frame is None or frame.omega_t is None:
        frame = evaluate_frame(state, config, need_omega_t=True)
    td = frame.td
    curve = state.curve
    speed = td.speed
    perp = 1j * td.z_alpha

    br_t = np.conj(br.time_kernel_matrix(curve, frame.z_t) @ frame.omega)
    br_t = br_t + br.br_from_matrix(frame.kernel, frame.omega_t)
    br_a = _cderiv(frame.br_field)
    z_at = _cderiv(frame.z_t)
    z_aa = _cderiv(td.z_alpha)
    phi = frame.phi_gauge

    sigma = _dot(br_t + (phi / speed) * br_a, perp)
    sigma += (frame.omega / (2.0 * speed ** 2)) * _dot(z_at + (phi / speed) * z_aa, perp)
    if curve.domain == TILDE:
        w = curve.zc
        v_sq = np.abs(frame.br_field + frame.omega * td.z_alpha / (2.0 * speed ** 2)) ** 2
        sigma += np.sqrt(frame.q2) * v_sq * _dot(conformal.grad_q(w), perp)
        sigma += config.gravity * _dot(conformal.grad_p2_inverse(w), perp)
    else:
        sigma += config.gravity * np.real(td.z_alpha)
    return sigma


def _physical_quantities(state: SheetState, config: StepperConfig,
                         frame: EvalFrame):
    """(curve, Phi, u, warning) in the physical domain, mapping back if needed."""
    warning = None
    if state.domain == PHYSICAL:
        curve = state.curve
        u = frame.u
        if state.variable == PHI:
            phi_b = state.values
        else:
            phi_alpha = _dot(frame.u, frame.td.z_alpha)
            drift = abs(float(np.mean(phi_alpha)))
            if drift > 1e-10:
                warning = f"potential reconstruction residual {drift:.3g}"
            phi_b = spectral.antiderivative(phi_alpha)
        return curve, phi_b, u, warning
    curve = map_curve(state.curve, "to_physical")
    u = conformal.velocity_pullback(frame.u, state.curve.zc)
    if state.variable == PHI:
        phi_b = state.values
    else:
        phi_alpha = _dot(frame.u, frame.td.z_alpha)  # invariant between domains
        drift = abs(float(np.mean(phi_alpha)))
        if drift > 1e-10:
            warning = f"potential reconstruction residual {drift:.3g}"
        phi_b = spectral.antiderivative(phi_alpha)
    return curve, phi_b, u, warning


def energy_es(state: SheetState, config: StepperConfig | None = None,
              frame: EvalFrame | None = None, warn_sink=None) -> tuple[float, float, float]:
    """(total, kinetic, potential) conserved energy over one period.

    Tilde states are mapped back first; strength states reconstruct the
    boundary potential spectrally in the mean-zero gauge, which leaves the
    kinetic integral unchanged because the normal flux has zero mean.
    """
    config = config or StepperConfig()
    if frame is None:
        frame = evaluate_frame(state, config)
    curve, phi_b, u, warning = _physical_quantities(state, config, frame)
    if warning and warn_sink is not None:
        warn_sink(warning)
    td = tangent_data(curve)
    flux = _dot(u, 1j * td.z_alpha)
    e_k = 0.5 * spectral.integral(phi_b * flux)
    e_p = 0.5 * config.gravity * spectral.integral(curve.z2 ** 2 * np.real(td.z_alpha))
    return e_k + e_p, e_k, e_p


@dataclass
class SobolevEnergyBreakdown:
    constant: float
    curve_h3: float
    weighted_top_derivative: float
    arc_chord_sq: float
    omega_h2: float
    phi_h_3_5: float
    speed_over_min_q2_sigma: float
    q_margins: float
    flagged: bool = False          # min Q^2 sigma nonpositive: reciprocal undefined
    uniform: bool = True

    @property
    def total(self) -> float:
        if self.flagged:
            return math.inf
        return (self.constant + self.curve_h3 + self.weighted_top_derivative
                + self.arc_chord_sq + self.omega_h2 + self.phi_h_3_5
                + self.speed_over_min_q2_sigma + self.q_margins)

    @property
    def finite_part(self) -> float:
        return (self.constant + self.curve_h3 + self.weighted_top_derivative
                + self.arc_chord_sq + self.omega_h2 + self.phi_h_3_5
                + self.q_margins
                + (0.0 if self.flagged else self.speed_over_min_q2_sigma))


def sobolev_energy(state: SheetState, config: StepperConfig | None = None,
                   frame: EvalFrame | None = None, k: int = 4) -> SobolevEnergyBreakdown:
    """The Sobolev energy functional of a tilde state at order k = 4.

    Sum of 1, ||z||_{H^{k-1}}^2, the sigma-weighted top-derivative
    integral, ||F||_inf^2, ||omega||_{H^{k-2}}^2, ||phi||_{H^{k-1/2}}^2,
    |z_alpha|^2 / min(Q^2 sigma) and the reciprocal margins to the marked
    points.  |z_alpha|^2 enters through its mean; non-uniformity is
    flagged, not silently averaged away.
    """
    if state.domain != TILDE:
        raise ValueError("the Sobolev energy functional is defined for tilde states")
    config = config or StepperConfig()
    if frame is None or frame.omega_t is None:
        frame = evaluate_frame(state, config, need_omega_t=True)
    sigma = rayleigh_taylor_sigma(state, config, frame)
    td = frame.td
    z1, z2 = state.curve.z1, state.curve.z2
    d4z1 = spectral.derivative(z1, k)
    d4z2 = spectral.derivative(z2, k)
    q2s = frame.q2 * sigma
    min_q2s = float(np.min(q2s))
    weighted = spectral.integral(q2s / td.speed ** 2 * (d4z1 ** 2 + d4z2 ** 2))
    rep = arc_chord(state.curve)
    mq = conformal.min_distance_to_q(state.curve.zc)
    speed_sq = float(np.mean(td.speed)) ** 2
    spread = float(np.std(td.speed) / np.mean(td.speed))
    flagged = min_q2s <= 0.0
    return SobolevEnergyBreakdown(
        constant=1.0,
        curve_h3=spectral.sobolev_norm(z1, k - 1) ** 2 + spectral.sobolev_norm(z2, k - 1) ** 2,
        weighted_top_derivative=weighted,
        arc_chord_sq=rep.sup_f ** 2,
        omega_h2=spectral.sobolev_norm(frame.omega, k - 2) ** 2,
        phi_h_3_5=spectral.sobolev_norm(frame.phi_gauge, k - 0.5) ** 2,
        speed_over_min_q2_sigma=(speed_sq / min_q2s) if not flagged else math.inf,
        q_margins=float(np.sum(1.0 / mq)),
        flagged=flagged,
        uniform=spread <= 1e-8,
    )


def _physical_omega_max(state: SheetState, config: StepperConfig,
                        frame: EvalFrame) -> float:
    """max |omega| in the physical domain; for tilde states the strength is
    re-solved on the mapped-back curve from the (domain-invariant) Phi_alpha.
    Returns nan when the mapped curve is too close to self-touching."""
    if state.domain == PHYSICAL:
        return float(np.max(np.abs(frame.omega)))
    try:
        curve = map_curve(state.curve, "to_physical")
        phi_alpha = _dot(frame.u, frame.td.z_alpha)
        omega = amplitude.solve_omega_from_phi(curve, phi_alpha - np.mean(phi_alpha),
                                               config.settings)
        return float(np.max(np.abs(omega)))
    except SplashwaveError:
        return float("nan")


def compute_record(state: SheetState, config: StepperConfig | None = None,
                   dt_used: float = float("nan"), warn_sink=None) -> DiagnosticsRecord:
    """Assemble the full per-time observable record for one state.

    Quantities whose domain view is unavailable (mapping failures near a
    touch, etc.) are recorded as nan rather than aborting the run.
    """
    config = config or StepperConfig()
    frame = evaluate_frame(state, config, need_omega_t=True)

    e_total, e_k, e_p = float("nan"), float("nan"), float("nan")
    arc_sup = float("nan")
    try:
        e_total, e_k, e_p = energy_es(state, config, frame, warn_sink=warn_sink)
    except SplashwaveError:
        pass
    try:
        phys = state.curve if state.domain == PHYSICAL else map_curve(state.curve, "to_physical")
        arc_sup = arc_chord(phys).sup_f
    except SplashwaveError:
        pass

    sigma = rayleigh_taylor_sigma(state, config, frame)
    min_sigma = float(np.min(sigma))

    if state.domain == TILDE:
        w = state.curve.zc
        m_q = conformal.min_distance_to_q(w)
        min_q2_sigma = float(np.min(frame.q2 * sigma))
        try:
            sob = sobolev_energy(state, config, frame).total
        except SplashwaveError:
            sob = float("nan")
    else:
        try:
            w = conformal.map_curve_points(state.curve.zc)
            m_q = conformal.min_distance_to_q(w)
            min_q2_sigma = float(np.min(conformal.q_squared(w) * sigma))
        except SplashwaveError:
            m_q = np.full(5, float("nan"))
            min_q2_sigma = float("nan")
        sob = float("nan")

    return DiagnosticsRecord(
        time=state.time, e_total=e_total, e_kinetic=e_k, e_potential=e_p,
        arc_chord_sup=arc_sup,
        max_abs_omega=_physical_omega_max(state, config, frame),
        min_sigma=min_sigma, min_q2_sigma=min_q2_sigma, m_q=np.asarray(m_q),
        sobolev_e=sob, dt_used=dt_used)


# ----------------------------------------------------------------------------
# blowup-rate machinery
# ----------------------------------------------------------------------------

@dataclass
class PowerLawFit:
    amplitude: float
    exponent: float
    offset: float
    residual_rms: float
    fixed_exponent: bool = False

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return self.amplitude * np.power(np.asarray(t, dtype=float), self.exponent) + self.offset


def _linear_fit(times, values, b):
    design = np.column_stack([np.power(times, b), np.ones_like(times)])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    resid = design @ coef - values
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid ** 2)))


def fit_power_law(times, values, fix_exponent: float | None = None) -> PowerLawFit:
    """Least-squares fit of a * t**b + c to a time series.

    With ``fix_exponent`` the problem is linear in (a, c); otherwise a
    damped Gauss-Newton iteration refines (a, b, c) starting from the
    fixed-exponent fit at b = 1.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.size < 4:
        raise ValueError("need >= 4 samples with matching shapes")
    if np.any(times <= 0.0) or not np.all(np.isfinite(values)):
        raise ValueError("times must be positive and values finite")

    if fix_exponent is not None:
        a, c, rms = _linear_fit(times, values, fix_exponent)
        return PowerLawFit(a, float(fix_exponent), c, rms, fixed_exponent=True)

    a0, c0, _ = _linear_fit(times, values, 1.0)

    def resid(p):
        a, b, c = p
        return a * np.power(times, b) + c - values

    sol = scipy.optimize.least_squares(resid, x0=[a0, 1.0, c0], method="lm",
                                       xtol=1e-15, ftol=1e-15, max_nfev=2000)
    rms = float(np.sqrt(np.mean(sol.fun ** 2)))
    fit = PowerLawFit(float(sol.x[0]), float(sol.x[1]), float(sol.x[2]), rms)
    if not sol.success:
        err = SolverError(f"power-law fit did not converge: {sol.message}",
                          residual=rms)
        err.best_fit = fit
        raise err
    return fit


def blowup_observables(records: list[DiagnosticsRecord]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(times, 1/max|omega|, 1/sup F) with the time axis re-zeroed so the
    first record sits at t = 0 (the touching configuration when the run
    starts there)."""
    if not records:
        raise ValueError("empty trajectory")
    t0 = records[0].time
    times = np.array([r.time - t0 for r in records])
    with np.errstate(divide="ignore"):
        inv_omega = np.array([1.0 / r.max_abs_omega for r in records])
        inv_arc = np.array([1.0 / r.arc_chord_sup for r in records])
    return times, inv_omega, inv_arc
