"""Interface-curve geometry: tangents, arc-chord functional, splash/splat
validation and construction of pinched initial-data families.

A curve is a sampled map alpha -> (z1, z2) on the standard grid, tagged

    physical : z1(alpha) - alpha and z2(alpha) are 2pi-periodic; chord
               distances wrap the horizontal coordinate onto [-pi, pi];
    tilde    : both components are 2pi-periodic (a closed contour).

The perp convention is (u1, u2)^perp = (-u2, u1), i.e. multiplication by i
in complex form, so the unit normal z_alpha^perp/|z_alpha| points to the
vacuum side for a correctly oriented curve (validated, never assumed).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import conformal, spectral
from .errors import ConstructionError, DegenerateTangentError, GridError
from .spectral import Grid

PHYSICAL = "physical"
TILDE = "tilde"

#: absolute chord distance under which a grid pair counts as touching
TOUCH_TOL = 1e-10

#: default parameter-space exclusion radius for the separated arc-chord check
EXCLUSION_RADIUS = 0.2


@dataclass
class InterfaceCurve:
    """Sampled interface with its domain tag.

    ``z1`` and ``z2`` store actual coordinates; for physical curves the
    periodic part z1 - alpha is what the spectral operators act on.
    """

    grid: Grid
    z1: np.ndarray
    z2: np.ndarray
    domain: str = PHYSICAL

    def __post_init__(self):
        self.z1 = np.asarray(self.z1, dtype=float)
        self.z2 = np.asarray(self.z2, dtype=float)
        if not (self.grid.matches(self.z1) and self.grid.matches(self.z2)):
            raise GridError("curve components do not match the grid")
        if self.domain not in (PHYSICAL, TILDE):
            raise ValueError(f"unknown domain tag {self.domain!r}")

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def zc(self) -> np.ndarray:
        """Samples as complex numbers z1 + i z2."""
        return self.z1 + 1j * self.z2

    def periodic_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """The two 2pi-periodic scalar fields carrying the curve."""
        if self.domain == PHYSICAL:
            return self.z1 - self.grid.alpha, self.z2
        return self.z1, self.z2

    @classmethod
    def from_periodic_parts(cls, grid: Grid, p1: np.ndarray, p2: np.ndarray,
                            domain: str = PHYSICAL) -> "InterfaceCurve":
        z1 = p1 + grid.alpha if domain == PHYSICAL else np.asarray(p1, dtype=float)
        return cls(grid, np.asarray(z1, dtype=float), np.asarray(p2, dtype=float), domain)

    def copy(self) -> "InterfaceCurve":
        return replace(self, z1=self.z1.copy(), z2=self.z2.copy())


@dataclass
class TangentData:
    z_alpha: np.ndarray        # complex, dz/dalpha
    speed: np.ndarray          # |z_alpha|
    normal: np.ndarray         # complex unit normal i*z_alpha/|z_alpha|


def tangent_data(curve: InterfaceCurve) -> TangentData:
    """Spectral tangent, speed and unit normal along the curve."""
    p1, p2 = curve.periodic_parts()
    d1 = spectral.derivative(p1)
    d2 = spectral.derivative(p2)
    if curve.domain == PHYSICAL:
        d1 = d1 + 1.0
    z_alpha = d1 + 1j * d2
    speed = np.abs(z_alpha)
    if np.min(speed) < 1e-10:
        raise DegenerateTangentError(f"min |z_alpha| = {np.min(speed):.3g}")
    return TangentData(z_alpha=z_alpha, speed=speed, normal=1j * z_alpha / speed)


def chord_matrix(curve: InterfaceCurve) -> np.ndarray:
    """Pairwise chord distances; horizontal coordinate wrapped for physical curves."""
    dx = curve.z1[:, None] - curve.z1[None, :]
    if curve.domain == PHYSICAL:
        dx = (dx + np.pi) % (2.0 * np.pi) - np.pi
    dy = curve.z2[:, None] - curve.z2[None, :]
    return np.hypot(dx, dy)


@dataclass
class ArcChordReport:
    sup_f: float
    argmax: tuple[float, float]              # (alpha, beta) attaining the sup
    touching: bool                            # some chord underflowed 1e-300
    _beta_abs: np.ndarray = field(repr=False, default=None)
    _chords: np.ndarray = field(repr=False, default=None)

    def min_separated_distance(self, delta: float) -> float:
        """Smallest chord among pairs with parameter separation |beta| >= delta."""
        mask = self._beta_abs >= delta
        if not np.any(mask):
            return float("inf")
        return float(np.min(self._chords[mask]))


def arc_chord(curve: InterfaceCurve) -> ArcChordReport:
    """The functional F = |beta| / |z(alpha) - z(alpha - beta)| over grid pairs.

    beta is the wrapped parameter difference in [-pi, pi]; the report keeps
    the pair table so separated minima can be queried at any exclusion
    radius.
    """
    n = curve.n
    chords = chord_matrix(curve)
    dalpha = curve.grid.alpha[:, None] - curve.grid.alpha[None, :]
    beta = np.abs((dalpha + np.pi) % (2.0 * np.pi) - np.pi)
    # the wrapped difference of alpha_i, alpha_j = i-j = n/2 lands on -pi; use |.|
    offdiag = ~np.eye(n, dtype=bool)
    beta_off = beta[offdiag]
    chords_off = chords[offdiag]
    touching = bool(np.any(chords_off < 1e-300))
    with np.errstate(divide="ignore"):
        f = np.where(chords_off > 0.0, beta_off / np.maximum(chords_off, 1e-300),
                     np.inf)
    k = int(np.argmax(f))
    rows, cols = np.nonzero(offdiag)
    i, j = rows[k], cols[k]
    return ArcChordReport(
        sup_f=float(f[k]),
        argmax=(float(curve.grid.alpha[i]), float(curve.grid.alpha[j])),
        touching=touching,
        _beta_abs=beta_off,
        _chords=chords_off,
    )


def touch_clusters(curve: InterfaceCurve, tol: float = TOUCH_TOL,
                   min_beta: float = EXCLUSION_RADIUS) -> list[tuple[int, int]]:
    """Grid pairs (i, j), i < j, with chord < tol and parameter separation
    >= min_beta, merged into clusters of adjacent pairs.

    Returns one representative (closest) pair per cluster.
    """
    chords = chord_matrix(curve)
    dalpha = curve.grid.alpha[:, None] - curve.grid.alpha[None, :]
    beta = np.abs((dalpha + np.pi) % (2.0 * np.pi) - np.pi)
    close = (chords < tol) & (beta >= min_beta)
    pairs = [(i, j) for i, j in zip(*np.nonzero(close)) if i < j]
    clusters: list[list[tuple[int, int]]] = []
    for p in sorted(pairs):
        placed = False
        for c in clusters:
            if any(abs(p[0] - q[0]) <= 2 and abs(p[1] - q[1]) <= 2 for q in c):
                c.append(p)
                placed = True
                break
        if not placed:
            clusters.append([p])
    reps = []
    for c in clusters:
        i, j = min(c, key=lambda q: chords[q[0], q[1]])
        reps.append((int(i), int(j)))
    return reps


def _crossings_at_x(curve: InterfaceCurve, x: float) -> list[tuple[float, float]]:
    """All (alpha, y) where the physical curve crosses the vertical line
    x (mod 2pi), located by root-refinement on the spectral interpolant."""
    p1, _ = curve.periodic_parts()
    alpha = curve.grid.alpha
    n = curve.n

    def g(a):
        val = spectral.interpolate(p1, np.array([a]))[0] + a - x
        return (val + np.pi) % (2.0 * np.pi) - np.pi

    vals = (curve.z1 - x + np.pi) % (2.0 * np.pi) - np.pi
    out = []
    for j in range(n):
        a0, a1 = alpha[j], alpha[j] + curve.grid.h
        v0, v1 = vals[j], vals[(j + 1) % n]
        if v0 == 0.0:
            out.append((a0, curve.z2[j]))
        elif v0 * v1 < 0.0 and abs(v0 - v1) < np.pi:  # skip spurious wrap jumps
            a = brentq(g, a0, a1, xtol=1e-13)
            _, p2 = curve.periodic_parts()
            y = spectral.interpolate(p2, np.array([a]))[0]
            out.append((a, float(y)))
    return out


def point_in_water(curve: InterfaceCurve, point: tuple[float, float]) -> bool:
    """Classify a physical-plane point by ray parity against the deep region.

    Casts the downward vertical ray toward (x, -inf), which is water;
    an even number of crossings below the point means water.
    """
    x, y = point
    below = [c for c in _crossings_at_x(curve, x) if c[1] < y - 1e-12]
    return len(below) % 2 == 0


def orientation_ok(curve: InterfaceCurve) -> bool:
    """Check that the normal z_alpha^perp points to the vacuum side.

    Physical curves: at the lowest crossing of a probe vertical line the
    normal must have positive vertical component (deep water below).
    Tilde curves: water is the interior, so the signed area must be
    negative (clockwise) for i*z_alpha to point outward.
    """
    if curve.domain == TILDE:
        z = curve.zc
        zp = np.roll(z, -1)
        area = 0.5 * np.sum(np.real(z) * np.imag(zp) - np.real(zp) * np.imag(z))
        return area < 0.0
    td = tangent_data(curve)
    for x in (0.31, 1.7, -2.3):
        crossings = _crossings_at_x(curve, x)
        if not crossings:
            continue
        a_low, _ = min(crossings, key=lambda c: c[1])
        p1, p2 = curve.periodic_parts()
        d1 = spectral.interpolate(spectral.derivative(p1), np.array([a_low]))[0] + 1.0
        d2 = spectral.interpolate(spectral.derivative(p2), np.array([a_low]))[0]
        normal_y = d1  # (-d2, d1) . (0, 1)
        if abs(normal_y) < 1e-10:
            continue
        return normal_y > 0.0
    # no usable probe line: fall back to the mean tangent direction
    return float(np.mean(np.real(td.z_alpha))) > 0.0


@dataclass
class ConditionReport:
    name: str
    passed: bool
    detail: str
    margin: float | None = None


@dataclass
class ValidationReport:
    curve_kind: str                     # "splash" | "splat" | "none"
    conditions: list[ConditionReport]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failed(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]

    def __str__(self) -> str:
        lines = [f"classification: {self.curve_kind}"]
        for c in self.conditions:
            status = "pass" if c.passed else "FAIL"
            extra = f" (margin {c.margin:.3g})" if c.margin is not None else ""
            lines.append(f"  [{status}] {c.name}: {c.detail}{extra}")
        return "\n".join(lines)


def _common_conditions(curve: InterfaceCurve, touch_tol: float,
                       exclusion: float) -> tuple[list[ConditionReport], list[tuple[int, int]]]:
    conds = []
    finite = bool(np.all(np.isfinite(curve.z1)) and np.all(np.isfinite(curve.z2)))
    conds.append(ConditionReport(
        "periodic_representation", finite,
        "components finite on the canonical grid" if finite else "non-finite samples"))

    try:
        td = tangent_data(curve)
        min_speed = float(np.min(td.speed))
        conds.append(ConditionReport(
            "nondegenerate_tangent", min_speed > 1e-8,
            f"min |z_alpha| = {min_speed:.3g}", margin=min_speed))
    except DegenerateTangentError as exc:
        conds.append(ConditionReport("nondegenerate_tangent", False, str(exc)))
        return conds, []

    clusters = touch_clusters(curve, touch_tol, exclusion)
    return conds, clusters


def _separated_arc_chord(curve: InterfaceCurve, touch_indices: list[int],
                         exclusion: float) -> float:
    """sup F over pairs with both endpoints outside parameter neighborhoods
    of the touch indices (condition: arc-chord holds after removing a
    neighborhood of either touch parameter)."""
    report = arc_chord(curve)
    n = curve.n
    chords = chord_matrix(curve)
    dalpha = curve.grid.alpha[:, None] - curve.grid.alpha[None, :]
    beta = np.abs((dalpha + np.pi) % (2.0 * np.pi) - np.pi)
    keep = np.ones(n, dtype=bool)
    for idx in touch_indices:
        dist = np.abs((curve.grid.alpha - curve.grid.alpha[idx] + np.pi) % (2 * np.pi) - np.pi)
        keep &= dist > exclusion
    mask = np.outer(keep, keep) & ~np.eye(n, dtype=bool)
    if not np.any(mask):
        return report.sup_f
    with np.errstate(divide="ignore"):
        f = beta[mask] / np.maximum(chords[mask], 1e-300)
    return float(np.max(f))


def _tilde_conditions(curve: InterfaceCurve, q_margin: float = 1e-3) -> list[ConditionReport]:
    conds = []
    try:
        tilde = map_curve(curve, "to_tilde")
    except Exception as exc:  # branch or singularity failures are reportable
        conds.append(ConditionReport("tilde_image", False, f"mapping failed: {exc}"))
        return conds
    # branch closure: continuing past the last sample must return to the start
    w = tilde.zc
    try:
        w_wrap = conformal.map_p(complex(curve.zc[0]), prev=complex(w[-1]))
        gap = abs(w_wrap - w[0])
        closed = gap <= 1e-8 * max(1.0, float(np.max(np.abs(w))))
        conds.append(ConditionReport(
            "tilde_closed_contour", closed,
            f"wrap-around branch gap {gap:.3g}", margin=gap))
    except Exception as exc:
        conds.append(ConditionReport("tilde_closed_contour", False, str(exc)))
        return conds
    rep = arc_chord(tilde)
    conds.append(ConditionReport(
        "tilde_arc_chord", np.isfinite(rep.sup_f) and rep.sup_f < 1e6,
        f"sup F(tilde) = {rep.sup_f:.6g}", margin=rep.sup_f))
    mq = conformal.min_distance_to_q(w)
    conds.append(ConditionReport(
        "avoids_q_points", bool(np.all(mq > q_margin)),
        "m(q^l) = " + ", ".join(f"{v:.3g}" for v in mq), margin=float(np.min(mq))))
    return conds


def validate_splash_curve(curve: InterfaceCurve, touch_tol: float = TOUCH_TOL,
                          exclusion: float = EXCLUSION_RADIUS) -> ValidationReport:
    """Check the defining conditions of a splash curve; never raises.

    A splash curve is 2pi-periodic, touches itself at exactly one point
    with nondegenerate tangents, is oriented with the normal into vacuum,
    keeps (0,0) and (+-pi,0) in the vacuum region, and maps to a closed
    non-self-intersecting contour away from the marked points q^l.
    """
    if curve.domain != PHYSICAL:
        return ValidationReport("none", [ConditionReport(
            "domain", False, "splash validation expects a physical curve")])
    conds, clusters = _common_conditions(curve, touch_tol, exclusion)
    kind = "none"

    one_touch = len(clusters) == 1
    detail = f"{len(clusters)} touching cluster(s) at tol {touch_tol:g}"
    if one_touch:
        i, j = clusters[0]
        arc_run = _touch_run_length(curve, clusters[0], touch_tol)
        if arc_run >= 3:
            one_touch = False
            detail += f"; touching set is an arc ({arc_run} consecutive pairs)"
            kind = "splat-like"
        else:
            detail += f" at alpha = ({curve.grid.alpha[i]:.4f}, {curve.grid.alpha[j]:.4f})"
            kind = "splash"
    conds.append(ConditionReport("single_touch_pair", one_touch, detail))

    touch_idx = list(clusters[0]) if clusters else []
    sup_sep = _separated_arc_chord(curve, touch_idx, exclusion)
    conds.append(ConditionReport(
        "separated_arc_chord", np.isfinite(sup_sep) and sup_sep < 1e6,
        f"sup F outside {exclusion:g}-neighborhoods = {sup_sep:.6g}", margin=sup_sep))

    oriented = orientation_ok(curve)
    conds.append(ConditionReport(
        "orientation", oriented, "normal points to vacuum" if oriented
        else "normal points into the water"))

    for name, pt in (("origin_in_vacuum", (0.0, 0.0)),
                     ("pi_points_in_vacuum", (np.pi, 0.0))):
        try:
            in_vac = not point_in_water(curve, pt)
            conds.append(ConditionReport(name, in_vac,
                                         f"point {pt} {'vacuum' if in_vac else 'water'}"))
        except Exception as exc:
            conds.append(ConditionReport(name, False, f"classification failed: {exc}"))

    conds.extend(_tilde_conditions(curve))
    if kind == "splash" and not all(c.passed for c in conds):
        kind = "splash" if one_touch else "none"
    if not one_touch and kind != "splat-like":
        kind = "none"
    return ValidationReport(kind, conds)


def _touch_run_length(curve: InterfaceCurve, rep_pair: tuple[int, int],
                      tol: float) -> int:
    """Longest run of consecutive i-offsets around rep_pair with chord < tol."""
    chords = chord_matrix(curve)
    i0, j0 = rep_pair
    n = curve.n
    run = 0
    for s in range(-n // 2, n // 2):
        i, j = (i0 + s) % n, (j0 - s) % n
        if chords[i, j] < tol:
            run += 1
        elif s > 0:
            break
    return run


def validate_splat_curve(curve: InterfaceCurve, touch_tol: float = TOUCH_TOL,
                         exclusion: float = EXCLUSION_RADIUS) -> ValidationReport:
    """Like splash validation, but the touching set must be an arc:
    a maximal run of >= 3 consecutive grid pairs below the tolerance."""
    if curve.domain != PHYSICAL:
        return ValidationReport("none", [ConditionReport(
            "domain", False, "splat validation expects a physical curve")])
    conds, clusters = _common_conditions(curve, touch_tol, exclusion)
    kind = "none"
    if len(clusters) == 1:
        run = _touch_run_length(curve, clusters[0], touch_tol)
        is_arc = run >= 3
        kind = "splat" if is_arc else "splash"
        conds.append(ConditionReport(
            "touching_arc", is_arc,
            f"touching run of {run} consecutive pairs", margin=float(run)))
    else:
        conds.append(ConditionReport(
            "touching_arc", False, f"{len(clusters)} touching clusters"))
    # widest exclusion covering the arc
    touch_idx = list(clusters[0]) if clusters else []
    sup_sep = _separated_arc_chord(curve, touch_idx,
                                   max(exclusion, 0.5))
    conds.append(ConditionReport(
        "separated_arc_chord", np.isfinite(sup_sep) and sup_sep < 1e6,
        f"sup F outside excluded intervals = {sup_sep:.6g}", margin=sup_sep))
    oriented = orientation_ok(curve)
    conds.append(ConditionReport(
        "orientation", oriented, "normal points to vacuum" if oriented
        else "normal points into the water"))
    conds.extend(_tilde_conditions(curve))
    return ValidationReport(kind, conds)


def map_curve(curve: InterfaceCurve, direction: str) -> InterfaceCurve:
    """Map the whole curve between domains with branch continuation.

    ``to_tilde`` applies the forward root map samplewise; ``to_physical``
    applies 2 arctan(w^2) and unwraps the horizontal coordinate so that
    z1 - alpha comes out periodic.
    """
    if direction == "to_tilde":
        if curve.domain != PHYSICAL:
            raise ValueError("curve is already in the tilde domain")
        w = conformal.map_curve_points(curve.zc)
        return InterfaceCurve(curve.grid, np.real(w), np.imag(w), TILDE)
    if direction == "to_physical":
        if curve.domain != TILDE:
            raise ValueError("curve is already in the physical domain")
        z = conformal.map_p_inverse(curve.zc)
        x = np.real(z)
        # unwrap along the curve, then pin the mean offset so z1 - alpha is periodic
        x = np.unwrap(x, period=2.0 * np.pi)
        alpha = curve.grid.alpha
        shift = 2.0 * np.pi * np.round(np.mean(x - alpha) / (2.0 * np.pi))
        return InterfaceCurve(curve.grid, x - shift, np.imag(z), PHYSICAL)
    raise ValueError(f"unknown direction {direction!r}")


def uniform_reparametrization(curve: InterfaceCurve, refine: int = 8,
                              newton_steps: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Nodes a(theta_j) of the arclength-uniform reparametrization and the
    speed |z_alpha| evaluated there.

    Inverts the (monotone) spectral cumulative arclength on a refined grid
    and polishes with Newton.
    """
    td = tangent_data(curve)
    speed = td.speed
    mean_speed = float(np.mean(speed))
    # s(alpha) = mean*(alpha + pi) + periodic part
    per = spectral.antiderivative(speed - mean_speed)
    per0 = spectral.interpolate(per, np.array([-np.pi]))[0]

    def s_of(a):
        return mean_speed * (a + np.pi) + spectral.interpolate(per, np.atleast_1d(a)) - per0

    def speed_of(a):
        return spectral.interpolate(speed, np.atleast_1d(a))

    grid = curve.grid
    targets = mean_speed * (grid.alpha + np.pi)
    # monotone inversion on a refined grid, then Newton polish
    fine = np.linspace(-np.pi, np.pi, refine * grid.n + 1)
    s_fine = s_of(fine)
    a = np.interp(targets, s_fine, fine)
    for _ in range(newton_steps):
        res = s_of(a) - targets
        step = res / np.maximum(speed_of(a), 1e-14)
        a = a - np.clip(step, -0.45 * grid.h * refine, 0.45 * grid.h * refine)
        if np.max(np.abs(res)) < 1e-13 * max(mean_speed, 1.0):
            break
    return a, speed_of(a)


def resample_uniform_speed(curve: InterfaceCurve, refine: int = 8,
                           newton_steps: int = 8) -> InterfaceCurve:
    """Reparametrize so |z_alpha| is constant, preserving the curve as a set.

    Physical curves keep z1 - alpha periodic because the cumulative
    arclength minus its linear part is periodic.
    """
    a, _ = uniform_reparametrization(curve, refine, newton_steps)
    grid = curve.grid
    p1, p2 = curve.periodic_parts()
    new_p1 = spectral.interpolate(p1, a)
    new_p2 = spectral.interpolate(p2, a)
    if curve.domain == PHYSICAL:
        new_p1 = new_p1 + (a - grid.alpha)  # full z1 shift folded into periodic part
    return InterfaceCurve.from_periodic_parts(grid, new_p1, new_p2, curve.domain)


# ----------------------------------------------------------------------------
# pinched initial-data family
# ----------------------------------------------------------------------------

#: documented parameter ranges for the pinched family
SPLASH_SHAPE_DEFAULTS = dict(s_touch=1.5, fold_speed=0.5, touch_height=0.3,
                             tip_depth=-0.6, end_depth=-0.6, touch_slope=0.8)


def _family_fold_coeffs(s: float, v0: float) -> tuple[float, float, float]:
    """Coefficients making z1 = a - lam sin a + a2 sin 2a + a3 sin 3a have
    a double root at alpha = s (the tangential-touch configuration) with
    prescribed fold-tip speed z1'(0) = v0 (sets the pocket width)."""
    a = np.array([[np.sin(s), -np.sin(2 * s), -np.sin(3 * s)],
                  [np.cos(s), -2.0 * np.cos(2 * s), -3.0 * np.cos(3 * s)],
                  [1.0, -2.0, -3.0]])
    b = np.array([s, 1.0, 1.0 - v0])
    lam, a2, a3 = np.linalg.solve(a, b)
    return float(lam), float(a2), float(a3)


def _family_height_coeffs(s: float, touch_height: float, tip_depth: float,
                          end_depth: float, touch_slope: float) -> tuple[float, float, float, float]:
    """(y0, b1, b2, b3) with z2(0) = tip_depth, z2(s) = touch_height,
    z2(pi) = end_depth and z2'(s) = touch_slope (a healthy crossing speed
    keeps the touch tangent well away from degeneracy)."""
    a = np.array([[1.0, 1.0, 1.0, 1.0],
                  [1.0, np.cos(s), np.cos(2 * s), np.cos(3 * s)],
                  [1.0, -1.0, 1.0, -1.0],
                  [0.0, -np.sin(s), -2.0 * np.sin(2 * s), -3.0 * np.sin(3 * s)]])
    y0, b1, b2, b3 = np.linalg.solve(
        a, [tip_depth, touch_height, end_depth, touch_slope])
    return float(y0), float(b1), float(b2), float(b3)


def _family_curve(grid: Grid, lam: float, a2: float, a3: float, y0: float,
                  b1: float, b2: float, b3: float) -> InterfaceCurve:
    alpha = grid.alpha
    z1 = (alpha - lam * np.sin(alpha) + a2 * np.sin(2.0 * alpha)
          + a3 * np.sin(3.0 * alpha))
    z2 = (y0 + b1 * np.cos(alpha) + b2 * np.cos(2.0 * alpha)
          + b3 * np.cos(3.0 * alpha))
    return InterfaceCurve(grid, z1, z2, PHYSICAL)


#: parameter exclusion isolating the fold-to-mirror distances of the family
#: (the touch pair sits at separation 2 s_touch ~ 2)
FAMILY_GAP_EXCLUSION = 1.0


def _measured_gap(c: InterfaceCurve, exclusion: float = FAMILY_GAP_EXCLUSION) -> float:
    return arc_chord(c).min_separated_distance(exclusion)


def make_splash_family(pinch: float, n: int = 512, s_touch: float = 1.5,
                       fold_speed: float = 0.5, touch_height: float = 0.3,
                       tip_depth: float = -0.6, end_depth: float = -0.6,
                       touch_slope: float = 0.8) -> InterfaceCurve:
    """Overturning trigonometric-polynomial curve with a tunable pinch.

    z1 is odd with a fold about alpha = 0; at the critical amplitude the
    fold's two mirror branches touch tangentially on the axis x = 0 at
    parameters +-s_touch, at height ``touch_height`` above the origin.
    The enclosed pocket is a vacuum cavity reaching down to ``tip_depth``,
    so it contains (0, 0); that placement is what makes the touch points
    land on opposite branches of the root map, giving an embedded closed
    tilde image.  ``fold_speed`` sets the pocket width (larger = fatter
    pocket, milder tip curvature, wider origin clearance).  The ends sit
    at depth ``end_depth``, keeping (+-pi, 0) in the vacuum above.

    The amplitude is root-found so the minimum separated chord distance,
    measured at the fold-scale parameter exclusion FAMILY_GAP_EXCLUSION,
    equals ``pinch`` (exactly zero gives the touching member).

    Ranges: pinch in [0, 0.3], s_touch in (1.2, 1.6), fold_speed in
    (0.3, 0.6), touch_height in (0.1, 0.4), tip_depth < -0.4,
    end_depth < -0.3, touch_slope in (0.5, 1.2).
    """
    if pinch < 0:
        raise ConstructionError("pinch must be nonnegative")
    if not (tip_depth < 0.0 < touch_height):
        raise ConstructionError("pocket must contain the origin: "
                                "tip_depth < 0 < touch_height")
    if end_depth >= -0.3:
        raise ConstructionError("curve ends must sit below y = -0.3")
    grid = Grid(n)
    lam_star, a2, a3 = _family_fold_coeffs(s_touch, fold_speed)
    y0, b1, b2, b3 = _family_height_coeffs(s_touch, touch_height, tip_depth,
                                           end_depth, touch_slope)

    if pinch == 0.0:
        # locate the touching amplitude by root-finding on the signed fold
        # depth (min of z1 over the fold window), which crosses zero there
        window = (np.abs(grid.alpha) > 0.25) & (np.abs(grid.alpha) < np.pi - 0.25)

        def fold_min(lam):
            c = _family_curve(grid, lam, a2, a3, y0, b1, b2, b3)
            return float(np.min(c.z1[window & (grid.alpha > 0)]))

        lo, hi = 0.9 * lam_star, 1.1 * lam_star
        if fold_min(lo) * fold_min(hi) > 0:
            raise ConstructionError("failed to bracket the touching amplitude")
        lam = brentq(fold_min, lo, hi, xtol=1e-15)
        return _family_curve(grid, lam, a2, a3, y0, b1, b2, b3)

    def gap_mismatch(lam):
        c = _family_curve(grid, lam, a2, a3, y0, b1, b2, b3)
        return _measured_gap(c) - pinch

    lo, hi = 0.05, lam_star
    if gap_mismatch(lo) * gap_mismatch(hi) > 0:
        raise ConstructionError(
            f"failed to bracket a configuration with separated gap {pinch:g}")
    lam = brentq(gap_mismatch, lo, hi, xtol=1e-13)
    return _family_curve(grid, lam, a2, a3, y0, b1, b2, b3)


def make_splat_curve(n: int = 512, arc_half_width: float = 0.25,
                     s_touch: float = 1.5, fold_speed: float = 0.5,
                     touch_height: float = 0.3, tip_depth: float = -0.6,
                     end_depth: float = -0.6, touch_slope: float = 0.8) -> InterfaceCurve:
    """Curve whose touching set is an arc: the splash family with the fold
    flattened onto the axis over parameter intervals of length
    2*arc_half_width around +-s_touch.

    Such curves cannot be trigonometric polynomials (an analytic z1 cannot
    vanish on an interval), so a smooth compactly supported bump multiplies
    z1 near the touch parameters.
    """
    grid = Grid(n)
    lam, a2, a3 = _family_fold_coeffs(s_touch, fold_speed)
    y0, b1, b2, b3 = _family_height_coeffs(s_touch, touch_height, tip_depth,
                                           end_depth, touch_slope)
    base = _family_curve(grid, lam, a2, a3, y0, b1, b2, b3)
    alpha = grid.alpha

    def _f(t):
        out = np.zeros_like(t)
        pos = t > 0.0
        out[pos] = np.exp(-1.0 / t[pos])
        return out

    def bump(u):
        # C-infinity plateau: == 1 for |u| <= 1, == 0 for |u| >= 2
        t = np.clip(np.abs(u) - 1.0, 0.0, 1.0)
        fa, fb = _f(1.0 - t), _f(t)
        return fa / (fa + fb)

    suppress = np.maximum(bump((alpha - s_touch) / arc_half_width),
                          bump((alpha + s_touch) / arc_half_width))
    z1 = base.z1 * (1.0 - suppress)
    return InterfaceCurve(grid, z1, base.z2, PHYSICAL)


def enforce_uniform_speed(curve: InterfaceCurve, tol: float = 1e-11,
                          max_iter: int = 12) -> InterfaceCurve:
    """Minimal-norm sample perturbation making the discrete speed uniform.

    Reparametrization can only reach the truncation floor of the curve's
    own spectrum; this Gauss-Newton polish removes the remaining spread at
    the sampled-representation level (perturbations stay at that floor).
    """
    n = curve.n
    # spectral differentiation matrix
    eye = np.eye(n)
    d = np.array([spectral.derivative(eye[j]) for j in range(n)]).T
    p1, p2 = (x.copy() for x in curve.periodic_parts())
    shift = 1.0 if curve.domain == PHYSICAL else 0.0
    for _ in range(max_iter):
        d1 = d @ p1 + shift
        d2 = d @ p2
        speed = np.hypot(d1, d2)
        res = speed - np.mean(speed)
        if np.max(np.abs(res)) < tol * np.mean(speed):
            break
        jac = np.hstack([(d1 / speed)[:, None] * d, (d2 / speed)[:, None] * d])
        jac -= np.mean(jac, axis=0, keepdims=True)
        step, *_ = np.linalg.lstsq(jac, res, rcond=None)
        p1 -= step[:n]
        p2 -= step[n:]
    return InterfaceCurve.from_periodic_parts(curve.grid, p1, p2, curve.domain)


def resize_curve(curve: InterfaceCurve, n_target: int) -> InterfaceCurve:
    """Spectrally truncate or pad the curve onto a different grid size."""
    p1, p2 = curve.periodic_parts()
    return InterfaceCurve.from_periodic_parts(
        Grid(n_target), spectral.resize(p1, n_target), spectral.resize(p2, n_target),
        curve.domain)


def curve_set_distance(a: InterfaceCurve, b: InterfaceCurve,
                       refine: int = 8) -> float:
    """Symmetric sup of node-to-polyline distances between two curves.

    Both curves are spectrally upsampled first so the polyline sagitta
    does not dominate; used to compare trajectories whose parametrizations
    differ by a tangential gauge.
    """
    if a.domain != b.domain:
        raise ValueError("curves must live in the same domain")
    a = resize_curve(a, refine * a.n)
    b = resize_curve(b, refine * b.n)

    def one_sided(p: InterfaceCurve, q: InterfaceCurve) -> float:
        qz = q.zc
        seg_a = qz
        seg_b = np.roll(qz, -1)
        worst = 0.0
        for z in p.zc:
            d = _point_segment_distance(z, seg_a, seg_b, q.domain)
            worst = max(worst, d)
        return worst

    return max(one_sided(a, b), one_sided(b, a))


def _point_segment_distance(z: complex, seg_a: np.ndarray, seg_b: np.ndarray,
                            domain: str) -> float:
    if domain == PHYSICAL:
        # compare at the horizontal wrap minimizing the distance to each segment
        shift = 2.0 * np.pi * np.round((np.real(seg_a) - np.real(z)) / (2.0 * np.pi))
        seg_a = seg_a - shift
        seg_b = seg_b - shift
    d = seg_b - seg_a
    t = np.clip(np.real(np.conj(d) * (z - seg_a)) / np.maximum(np.abs(d) ** 2, 1e-300),
                0.0, 1.0)
    proj = seg_a + t * d
    return float(np.min(np.abs(z - proj)))
