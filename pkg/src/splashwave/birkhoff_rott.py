"""Principal-value evaluation of the sheet-induced velocity.

In complex form (vectors u = u1 + i u2, perp = multiplication by i) the
mean velocity induced by a sheet of strength omega on itself is

    conj(BR)(alpha) = (1/4 pi i) PV int omega(b) cot((z(a) - z(b))/2) db     (physical)
    conj(BR)(alpha) = (1/2 pi i) PV int omega(b) / (z(a) - z(b)) db          (tilde)

The physical kernel is the exact one-period collapse of the line integral
over all horizontal images.  PV integrals are discretized with the
alternating-point trapezoidal rule: the value at even nodes sums the
integrand over odd nodes with weight 2h and vice versa, which is
spectrally accurate for analytic periodic data.

Everything is expressed through an explicit N x N kernel matrix M with
conj(BR) = M @ omega, so boundary evaluation, the second-kind operators
built on it, and the kernel time derivative share one assembly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import InterfaceCurve, PHYSICAL, arc_chord, tangent_data
from .errors import ArcChordError, TooCloseToBoundaryError

#: default arc-chord guard: quadrature refused above this sup F
F_MAX = 1e6


@dataclass
class VortexSheet:
    curve: InterfaceCurve
    omega: np.ndarray

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        if not self.curve.grid.matches(self.omega):
            raise ValueError("omega does not match the curve grid")


def _parity_mask(n: int) -> np.ndarray:
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % 2 == 1


def check_arc_chord(curve: InterfaceCurve, f_max: float = F_MAX) -> None:
    rep = arc_chord(curve)
    if not np.isfinite(rep.sup_f) or rep.sup_f > f_max:
        raise ArcChordError(
            f"arc-chord functional {rep.sup_f:.3g} exceeds {f_max:.3g}; "
            "quadrature unreliable", sup_f=rep.sup_f)


def kernel_matrix(curve: InterfaceCurve) -> np.ndarray:
    """Complex matrix M with conj(BR)(alpha_i) = sum_j M[i, j] omega_j."""
    z = curve.zc
    n = curve.n
    dz = z[:, None] - z[None, :]
    mask = _parity_mask(n)
    m = np.zeros((n, n), dtype=complex)
    if curve.domain == PHYSICAL:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = 1.0 / np.tan(dz / 2.0)
        m[mask] = vals[mask]
        m *= 2.0 * curve.grid.h / (4.0j * np.pi)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = 1.0 / dz
        m[mask] = vals[mask]
        m *= 2.0 * curve.grid.h / (2.0j * np.pi)
    return m


def br_from_matrix(m: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """BR field (complex velocities) from a prebuilt kernel matrix."""
    return np.conj(m @ omega)


def br_boundary(sheet: VortexSheet, f_max: float = F_MAX,
                m: np.ndarray | None = None) -> np.ndarray:
    """Sheet-induced mean velocity on the sheet itself, one value per node.

    Raises :class:`ArcChordError` when the curve is too close to
    self-intersection for the quadrature to be trusted.
    """
    check_arc_chord(sheet.curve, f_max)
    if m is None:
        m = kernel_matrix(sheet.curve)
    return br_from_matrix(m, sheet.omega)


def time_kernel_matrix(curve: InterfaceCurve, z_t: np.ndarray) -> np.ndarray:
    """Kernel-derivative matrix: conj(dBR/dt at frozen omega) = Mt @ omega.

    Differentiating the kernels in t with the node motion z_t gives

        physical:  -(1/8 pi i) (zt(a) - zt(b)) / sin^2((z(a) - z(b))/2)
        tilde:     -(1/2 pi i) (zt(a) - zt(b)) / (z(a) - z(b))^2

    both PV kernels with the same simple-pole strength as the original, so
    the alternating rule applies unchanged.
    """
    z = curve.zc
    zt = np.asarray(z_t, dtype=complex)
    n = curve.n
    dz = z[:, None] - z[None, :]
    dzt = zt[:, None] - zt[None, :]
    mask = _parity_mask(n)
    m = np.zeros((n, n), dtype=complex)
    if curve.domain == PHYSICAL:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = dzt / np.sin(dz / 2.0) ** 2
        m[mask] = vals[mask]
        m *= -2.0 * curve.grid.h / (8.0j * np.pi)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = dzt / dz ** 2
        m[mask] = vals[mask]
        m *= -2.0 * curve.grid.h / (2.0j * np.pi)
    return m


def br_time_explicit(sheet: VortexSheet, z_t: np.ndarray, f_max: float = F_MAX,
                     mt: np.ndarray | None = None) -> np.ndarray:
    """The z_t-driven part of d(BR)/dt, omega held fixed.

    The remaining part of the full time derivative is BR(z, omega_t) and is
    produced by the implicit sheet-strength solve, not here.
    """
    check_arc_chord(sheet.curve, f_max)
    if mt is None:
        mt = time_kernel_matrix(sheet.curve, z_t)
    return np.conj(mt @ sheet.omega)


def br_interior(points, sheet: VortexSheet) -> np.ndarray:
    """Induced velocity at points strictly off the sheet (plain trapezoid).

    Points closer than 10 grid spacings (in arclength) are rejected: the
    quadrature there needs the PV machinery.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    z = sheet.curve.zc
    td = tangent_data(sheet.curve)
    min_allowed = 10.0 * sheet.curve.grid.h * float(np.max(td.speed))
    if sheet.curve.domain == PHYSICAL:
        dx = (np.real(pts)[:, None] - np.real(z)[None, :] + np.pi) % (2 * np.pi) - np.pi
        dy = np.imag(pts)[:, None] - np.imag(z)[None, :]
        dist = np.hypot(dx, dy)
    else:
        dist = np.abs(pts[:, None] - z[None, :])
    if np.any(dist.min(axis=1) < min_allowed):
        raise TooCloseToBoundaryError(
            f"evaluation point within {min_allowed:.3g} of the sheet")
    h = sheet.curve.grid.h
    if sheet.curve.domain == PHYSICAL:
        kern = 1.0 / np.tan((pts[:, None] - z[None, :]) / 2.0)
        conj_v = (h / (4.0j * np.pi)) * kern @ sheet.omega
    else:
        kern = 1.0 / (pts[:, None] - z[None, :])
        conj_v = (h / (2.0j * np.pi)) * kern @ sheet.omega
    out = np.conj(conj_v)
    return out[0] if np.isscalar(points) or np.asarray(points).ndim == 0 else out
