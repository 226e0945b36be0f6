"""Time integration of the free-surface system in both domains and both
formulations.

Complex vector convention throughout: a 2-vector (a, b) is the complex
number a + i b, perp is multiplication by i, and x . y = Re(conj(x) y).

The kinematics in the mapped (tilde) domain read

    z_t   = Q^2 u + c z_alpha,           u = BR + omega z_alpha / (2 |z_alpha|^2)
    Phi_t = (1/2) Q^2 |u|^2 + c u . z_alpha - g height(z)

with Q == 1 and height == z2 recovering the physical domain.  The sheet
strength form replaces Phi by omega and uses ctilde = c + Q^2 omega /
(2 |z_alpha|^2), under which z_t = Q^2 BR + ctilde z_alpha and

    omega_t = -2 dBR/dt . z_alpha - |BR|^2 (Q^2)_alpha
              - ((Q^2/4) omega^2 / |z_alpha|^2)_alpha
              + 2 ctilde BR_alpha . z_alpha + (ctilde omega)_alpha
              - 2 g height_alpha.

dBR/dt contains BR(z, omega_t), so omega_t is found by the second-kind
(I + J) solve.  The arclength-preserving tangential choice

    ctilde(alpha) = H(-pi) - H(alpha),   H' = (Q^2 BR)_beta . z_beta/|z_beta|^2 - B(t)

keeps |z_alpha| independent of alpha (B(t) is the mean of the integrand);
with it the omega_t assembly can equivalently be written in terms of the
gauge function phi = Q^2 omega/(2|z_alpha|) - ctilde |z_alpha|, and that
expanded form is what the arclength-preserving path assembles.

The stepper is classical RK4 with a CFL reject/halve rule, post-step
Fourier filtering of the periodic components, and verification that the
parametrization stayed uniform.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import amplitude, birkhoff_rott as br, conformal, spectral
from .amplitude import IntegralEquationSettings
from .curve import (InterfaceCurve, PHYSICAL, TILDE, TangentData, arc_chord,
                    map_curve, tangent_data)
from .errors import SplashwaveError

OMEGA = "omega"
PHI = "phi"

UNIFORM = "uniform"
NONE = "none"


@dataclass
class SheetState:
    """Interface curve plus its dynamic variable at one instant."""

    curve: InterfaceCurve
    variable: str                 # "omega" | "phi"
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.variable not in (OMEGA, PHI):
            raise ValueError(f"unknown dynamic variable {self.variable!r}")
        self.values = np.asarray(self.values, dtype=float)
        if not self.curve.grid.matches(self.values):
            raise ValueError("dynamic variable does not match the curve grid")

    @property
    def domain(self) -> str:
        return self.curve.domain

    def copy(self) -> "SheetState":
        return replace(self, curve=self.curve.copy(), values=self.values.copy())


def time_reverse(state: SheetState) -> SheetState:
    """Negate the dynamic variable; forward evolution then retraces the past."""
    out = state.copy()
    out.values = -out.values
    return out


def reuniformize_state(state: SheetState) -> SheetState:
    """Reset the parametrization to uniform |z_alpha| (a gauge operation).

    The boundary potential is a point function and is simply re-evaluated;
    the sheet strength is a parameter density and picks up the Jacobian
    d(old)/d(new) = mean|z_alpha| / |z_alpha|(a(theta)).
    """
    from .curve import enforce_uniform_speed, uniform_reparametrization
    a, speed_at = uniform_reparametrization(state.curve)
    grid = state.curve.grid
    p1, p2 = state.curve.periodic_parts()
    new_p1 = spectral.interpolate(p1, a)
    new_p2 = spectral.interpolate(p2, a)
    if state.curve.domain == PHYSICAL:
        new_p1 = new_p1 + (a - grid.alpha)
    curve = InterfaceCurve.from_periodic_parts(grid, new_p1, new_p2,
                                               state.curve.domain)
    curve = enforce_uniform_speed(curve)
    values = spectral.interpolate(state.values, a)
    if state.variable == OMEGA:
        mean_speed = float(np.mean(tangent_data(state.curve).speed))
        values = values * mean_speed / speed_at
    return SheetState(curve=curve, variable=state.variable, values=values,
                      time=state.time)


@dataclass
class StopConditions:
    splash_gap: float = 1e-4         # min separated physical chord distance
    gap_exclusion: float = 0.2       # parameter exclusion for the gap
    q_margin: float = 1e-2           # min over l of m(q^l)
    sigma_min_warn: float = 0.0
    sigma_min_stop: float = -1e-3    # hard stop on min Q^2 sigma
    arc_chord_max: float = 1e6


@dataclass
class StepperConfig:
    dt: float = 1e-3
    t_end: float = 1.0
    scheme: str = "rk4"
    filter_threshold: float = 1e-13
    gravity: float = 1.0
    tangential: str = UNIFORM        # "uniform" | "none"
    cfl_safety: float = 0.5
    uniformity_tol: float = 1e-8
    reuniformize: bool = True
    record_every: int = 1
    snapshot_every: int = 50
    stop: StopConditions = field(default_factory=StopConditions)
    settings: IntegralEquationSettings = field(default_factory=IntegralEquationSettings)

    def __post_init__(self):
        if self.scheme != "rk4":
            raise ValueError("only the classical rk4 scheme is implemented")
        if self.tangential not in (UNIFORM, NONE):
            raise ValueError(f"unknown tangential mode {self.tangential!r}")


class StepRejected(SplashwaveError):
    """Raised internally when a step fails CFL or uniformity checks."""

    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason


# ----------------------------------------------------------------------------
# frame: everything derivable from one state, shared by RHS and diagnostics
# ----------------------------------------------------------------------------

@dataclass
class EvalFrame:
    state: SheetState
    td: TangentData
    kernel: np.ndarray             # complex BR kernel matrix
    omega: np.ndarray
    br_field: np.ndarray           # complex BR values on nodes
    u: np.ndarray                  # complex water-side boundary velocity
    q2: np.ndarray                 # metric factor on nodes (ones if physical)
    height: np.ndarray             # gravity height (z2 or mapped height)
    integrand: np.ndarray          # (Q^2 BR)_beta . z_beta / |z_beta|^2
    b_t: float                     # mean of the integrand
    c_tilde: np.ndarray            # tangential term of the strength form
    c_phi: np.ndarray              # tangential term of the potential form
    z_t: np.ndarray                # complex node velocities
    phi_gauge: np.ndarray
    solver: object = None          # shared factorization of (I + J)
    omega_t: np.ndarray | None = None
    phi_t: np.ndarray | None = None


def _dot(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.real(np.conj(x) * y)


def _cderiv(x: np.ndarray) -> np.ndarray:
    """Spectral alpha-derivative of a complex field."""
    return spectral.derivative(np.real(x)) + 1j * spectral.derivative(np.imag(x))


def evaluate_frame(state: SheetState, config: StepperConfig,
                   need_omega_t: bool = False) -> EvalFrame:
    """Compute the full right-hand side data for one state.

    For potential states the sheet strength comes from the tangential
    second-kind solve; the frame keeps the factor-ready (I + J) matrix so
    diagnostics can reuse it.
    """
    curve = state.curve
    td = tangent_data(curve)
    m = br.kernel_matrix(curve)
    solver = amplitude.TangentialSolver(amplitude.ipj_matrix(curve, m))

    if state.variable == PHI:
        phi_alpha = spectral.derivative(state.values)
        omega = amplitude.solve_omega_from_phi(curve, phi_alpha, config.settings,
                                               solver=solver)
    else:
        omega = state.values

    br.check_arc_chord(curve)
    br_field = br.br_from_matrix(m, omega)
    speed2 = td.speed ** 2
    u = br_field + omega * td.z_alpha / (2.0 * speed2)

    if curve.domain == TILDE:
        w = curve.zc
        q2 = conformal.q_squared(w)
        height = conformal.p2_inverse(w)
    else:
        q2 = np.ones(curve.n)
        height = curve.z2.copy()

    g_field = q2 * br_field
    integrand = _dot(_cderiv(g_field), td.z_alpha) / speed2
    b_t = float(np.mean(integrand))

    half_metric = q2 * omega / (2.0 * speed2)
    if config.tangential == UNIFORM:
        prim = spectral.antiderivative(integrand - b_t)
        c_tilde = prim[0] - prim        # vanishes at alpha = -pi by construction
        c_phi = c_tilde - half_metric
    else:
        c_phi = np.zeros(curve.n)
        c_tilde = half_metric

    z_t = q2 * u + c_phi * td.z_alpha
    phi_gauge = q2 * omega / (2.0 * td.speed) - c_tilde * td.speed

    frame = EvalFrame(state=state, td=td, kernel=m, omega=omega, br_field=br_field,
                      u=u, q2=q2, height=height, integrand=integrand, b_t=b_t,
                      c_tilde=c_tilde, c_phi=c_phi, z_t=z_t, phi_gauge=phi_gauge,
                      solver=solver)

    if state.variable == PHI:
        frame.phi_t = (0.5 * q2 * np.abs(u) ** 2 + c_phi * _dot(u, td.z_alpha)
                       - config.gravity * height)
    if need_omega_t or state.variable == OMEGA:
        frame.omega_t = _solve_omega_t(frame, config)
    return frame


def _omega_t_rhs(frame: EvalFrame, config: StepperConfig) -> np.ndarray:
    """Explicit part of the sheet-strength rate equation.

    The arclength-preserving mode assembles the expanded form written in
    the gauge function phi; the free mode assembles the direct form valid
    for any tangential term.  The two agree identically when the
    tangential term is the arclength-preserving one.
    """
    td = frame.td
    curve = frame.state.curve
    g = config.gravity
    mt = br.time_kernel_matrix(curve, frame.z_t)
    dbr_explicit = np.conj(mt @ frame.omega)
    t_kernel = -2.0 * _dot(dbr_explicit, td.z_alpha)
    height_term = -2.0 * g * spectral.derivative(frame.height)
    speed2 = td.speed ** 2

    if config.tangential == UNIFORM:
        q = np.sqrt(frame.q2)
        q_alpha = (spectral.derivative(q) if curve.domain == TILDE
                   else np.zeros(curve.n))
        br_dot_za = _dot(frame.br_field, td.z_alpha)
        return (t_kernel
                - 2.0 * q * q_alpha * np.abs(frame.br_field) ** 2
                - spectral.derivative(frame.phi_gauge ** 2 / frame.q2)
                + 2.0 * frame.c_tilde * speed2 * frame.b_t / frame.q2
                - 4.0 * frame.c_tilde * q_alpha * br_dot_za / q
                - 2.0 * frame.c_tilde ** 2 * speed2 * q_alpha / q ** 3
                + height_term)

    q2_alpha = (spectral.derivative(frame.q2) if curve.domain == TILDE
                else np.zeros(curve.n))
    br_alpha = _cderiv(frame.br_field)
    return (t_kernel
            - np.abs(frame.br_field) ** 2 * q2_alpha
            - spectral.derivative(0.25 * frame.q2 * frame.omega ** 2 / speed2)
            + 2.0 * frame.c_tilde * _dot(br_alpha, td.z_alpha)
            + spectral.derivative(frame.c_tilde * frame.omega)
            + height_term)


def _solve_omega_t(frame: EvalFrame, config: StepperConfig) -> np.ndarray:
    rhs = _omega_t_rhs(frame, config)
    return amplitude.solve_omega_t(frame.state.curve, rhs, config.settings,
                                   solver=frame.solver)


def tangential_c(state: SheetState, config: StepperConfig | None = None) -> np.ndarray:
    """The arclength-preserving tangential term of the strength form."""
    config = config or StepperConfig()
    frame = evaluate_frame(state, replace(config, tangential=UNIFORM))
    return frame.c_tilde


def b_of_t(state: SheetState, config: StepperConfig | None = None) -> float:
    """Mean of the stretching integrand; d|z_alpha|^2/dt = 2 |z_alpha|^2 B."""
    config = config or StepperConfig()
    frame = evaluate_frame(state, config)
    return frame.b_t


def phi_gauge(state: SheetState, config: StepperConfig | None = None) -> np.ndarray:
    """Gauge function Q^2 omega/(2|z_alpha|) - ctilde |z_alpha|."""
    config = config or StepperConfig()
    frame = evaluate_frame(state, config)
    return frame.phi_gauge


def rhs_phi_formulation(state: SheetState, config: StepperConfig) -> tuple[np.ndarray, np.ndarray]:
    """(z_t, Phi_t) for a potential state."""
    if state.variable != PHI:
        raise ValueError("state does not carry the boundary potential")
    frame = evaluate_frame(state, config)
    return frame.z_t, frame.phi_t


def rhs_omega_formulation(state: SheetState, config: StepperConfig) -> tuple[np.ndarray, np.ndarray]:
    """(z_t, omega_t) for a sheet-strength state."""
    if state.variable != OMEGA:
        raise ValueError("state does not carry the sheet strength")
    frame = evaluate_frame(state, config, need_omega_t=True)
    return frame.z_t, frame.omega_t


# ----------------------------------------------------------------------------
# stepping
# ----------------------------------------------------------------------------

def _pack(state: SheetState) -> np.ndarray:
    p1, p2 = state.curve.periodic_parts()
    return np.concatenate([p1, p2, state.values])


def _unpack(state: SheetState, vec: np.ndarray, t: float) -> SheetState:
    n = state.curve.n
    curve = InterfaceCurve.from_periodic_parts(
        state.curve.grid, vec[:n], vec[n:2 * n], state.curve.domain)
    return SheetState(curve=curve, variable=state.variable, values=vec[2 * n:], time=t)


def _rhs_vector(state: SheetState, config: StepperConfig) -> tuple[np.ndarray, float]:
    if state.variable == PHI:
        z_t, v_t = rhs_phi_formulation(state, config)
    else:
        z_t, v_t = rhs_omega_formulation(state, config)
    vec = np.concatenate([np.real(z_t), np.imag(z_t), v_t])
    return vec, float(np.max(np.abs(z_t)))


def uniformity_spread(curve: InterfaceCurve) -> float:
    speed = tangent_data(curve).speed
    return float(np.std(speed) / np.mean(speed))


def rk4_step(state: SheetState, dt: float, config: StepperConfig) -> SheetState:
    """One classical RK4 step with CFL guard, filtering and uniformity check.

    Raises :class:`StepRejected` (callers halve dt) when the CFL bound
    0.5 h / max|z_t| is violated at the first stage or the parametrization
    lost uniformity beyond the configured tolerance.
    """
    h = state.curve.grid.h
    y0 = _pack(state)
    k1, max_speed = _rhs_vector(state, config)
    if max_speed * dt > config.cfl_safety * h:
        raise StepRejected(
            f"dt {dt:g} violates CFL bound {config.cfl_safety * h / max_speed:.3g}",
            reason="cfl")
    k2, _ = _rhs_vector(_unpack(state, y0 + 0.5 * dt * k1, state.time + 0.5 * dt), config)
    k3, _ = _rhs_vector(_unpack(state, y0 + 0.5 * dt * k2, state.time + 0.5 * dt), config)
    k4, _ = _rhs_vector(_unpack(state, y0 + dt * k3, state.time + dt), config)
    y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    new = _unpack(state, y1, state.time + dt)

    if config.filter_threshold > 0.0:
        p1, p2 = new.curve.periodic_parts()
        p1 = spectral.krasny_filter(p1, config.filter_threshold)
        p2 = spectral.krasny_filter(p2, config.filter_threshold)
        vals = spectral.krasny_filter(new.values, config.filter_threshold)
        new = SheetState(
            curve=InterfaceCurve.from_periodic_parts(new.curve.grid, p1, p2,
                                                     new.curve.domain),
            variable=new.variable, values=vals, time=new.time)

    if config.tangential == UNIFORM:
        spread = uniformity_spread(new.curve)
        if spread > config.uniformity_tol:
            raise StepRejected(
                f"|z_alpha| spread {spread:.3g} exceeds {config.uniformity_tol:g}",
                reason="uniformity")
    return new


# ----------------------------------------------------------------------------
# run loop
# ----------------------------------------------------------------------------

@dataclass
class RunResult:
    final_state: SheetState
    reason: str                      # t_end | splash_gap | q_margin | sigma_min
    #                                  | arc_chord_max | aborted
    records: list                    # DiagnosticsRecord per cadence
    steps_accepted: int
    steps_rejected: int
    dt_final: float
    reparametrizations: int = 0
    detail: str = ""


def _physical_view(state: SheetState) -> InterfaceCurve | None:
    if state.domain == PHYSICAL:
        return state.curve
    try:
        return map_curve(state.curve, "to_physical")
    except SplashwaveError:
        return None


def _check_stops(state: SheetState, record, stop: StopConditions) -> str | None:
    phys = _physical_view(state)
    if phys is not None:
        rep = arc_chord(phys)
        if rep.sup_f > stop.arc_chord_max:
            return "arc_chord_max"
        gap = rep.min_separated_distance(stop.gap_exclusion)
        if gap < stop.splash_gap:
            return "splash_gap"
    if state.domain == TILDE:
        mq = conformal.min_distance_to_q(state.curve.zc)
        if float(np.min(mq)) < stop.q_margin:
            return "q_margin"
    if record is not None and np.isfinite(record.min_q2_sigma):
        if record.min_q2_sigma < stop.sigma_min_stop:
            return "sigma_min"
    return None


def run(initial: SheetState, config: StepperConfig,
        record_sink=None, snapshot_sink=None, warn_sink=None) -> RunResult:
    """Integrate until t_end or a stop condition fires.

    ``record_sink(record)`` and ``snapshot_sink(state)`` are called at their
    configured cadence; ``warn_sink(str)`` receives soft warnings (e.g. the
    stability function dipping below its warn threshold).  Stop conditions
    are normal terminations; solver failures abort with the exception text
    in ``detail``.
    """
    from . import diagnostics  # local import: diagnostics builds on this module

    state = initial.copy()
    dt = config.dt
    records: list = []
    accepted = rejected = reparam = 0
    reason, detail = "t_end", ""

    def emit(step_index: int, dt_used: float) -> object | None:
        record = None
        if step_index % config.record_every == 0:
            record = diagnostics.compute_record(state, config, dt_used=dt_used)
            records.append(record)
            if record_sink is not None:
                record_sink(record)
            if (warn_sink is not None and np.isfinite(record.min_q2_sigma)
                    and record.min_q2_sigma < config.stop.sigma_min_warn):
                warn_sink(f"t={state.time:.6g}: min Q^2 sigma = "
                          f"{record.min_q2_sigma:.3g} below warn threshold")
        if snapshot_sink is not None and step_index % config.snapshot_every == 0:
            snapshot_sink(state)
        return record

    record = emit(0, dt)
    stop_now = _check_stops(state, record, config.stop)
    if stop_now is not None:
        return RunResult(state, stop_now, records, 0, 0, dt,
                         detail="stop condition held at the initial state")

    step_index = 0
    retried_uniformity = False
    while state.time < config.t_end - 1e-14:
        dt_step = min(dt, config.t_end - state.time)
        try:
            new_state = rk4_step(state, dt_step, config)
        except StepRejected as exc:
            if (exc.reason == "uniformity" and config.reuniformize
                    and not retried_uniformity):
                # drift of |z_alpha| is a gauge defect, not a stability
                # problem: reset the parametrization and retry once
                state = reuniformize_state(state)
                reparam += 1
                retried_uniformity = True
                continue
            rejected += 1
            dt *= 0.5
            if dt < 1e-12:
                return RunResult(state, "aborted", records, accepted, rejected, dt,
                                 reparam, detail=f"dt underflow after rejection: {exc}")
            continue
        except SplashwaveError as exc:
            return RunResult(state, "aborted", records, accepted, rejected, dt,
                             reparam, detail=f"{type(exc).__name__}: {exc}")
        retried_uniformity = False
        state = new_state
        accepted += 1
        step_index += 1
        try:
            record = emit(step_index, dt_step)
        except SplashwaveError as exc:
            return RunResult(state, "aborted", records, accepted, rejected, dt,
                             reparam, detail=f"diagnostics failed: {exc}")
        stop_now = _check_stops(state, record, config.stop)
        if stop_now is not None:
            return RunResult(state, stop_now, records, accepted, rejected, dt, reparam)
    return RunResult(state, reason, records, accepted, rejected, dt, reparam,
                     detail=detail)
