"""The square-root half-tangent map between the periodic strip and the plane.

Points are handled as complex numbers z = x + i y.  The forward map

    W(z) = (tan(z/2))**(1/2)

sends the 2pi-periodic water region to the interior of a closed contour;
its inverse is W^{-1}(w) = 2 arctan(w^2).  The square root is two-valued,
so the forward map is evaluated by continuation: each new point takes the
root closer to the previous image, seeded by the deep-water normalization
W(x - i*inf) = -exp(-i pi/4).

Derived quantities, all with explicit complex derivatives:

    dW/dz            = (1 + w^4) / (4 w)          evaluated at w = W(z)
    Q^2(w)           = |(1 + w^4) / (4 w)|^2      metric factor
    height(w)        = log |(i + w^2) / (i - w^2)|   physical y-coordinate

The five marked points q^0..q^4 (origin and the four eighth-roots
(+-1 +- i)/sqrt(2)) are the singularities of this machinery; evaluations
inside a guard radius raise :class:`SingularPointError`.
"""

from __future__ import annotations

import numpy as np

from .errors import BranchCutError, SingularPointError

#: guard radius around the singular points q^0..q^4
SINGULAR_GUARD = 1e-12

#: branch normalization: image of the deep-water limit y -> -inf
DEEP_WATER_IMAGE = -np.exp(-1j * np.pi / 4.0)

_S = 1.0 / np.sqrt(2.0)


def q_points() -> list[tuple[float, float]]:
    """The five singular points q^0..q^4 as (x, y) pairs, in order."""
    return [(0.0, 0.0), (_S, _S), (-_S, _S), (-_S, -_S), (_S, -_S)]


def q_points_complex() -> np.ndarray:
    return np.array([complex(x, y) for x, y in q_points()])


def _guard_q(w: np.ndarray, which: tuple[int, ...] = (1, 2, 3, 4)) -> None:
    w = np.atleast_1d(w)
    qs = q_points_complex()
    for l in which:
        d = np.abs(w - qs[l])
        if np.any(d < SINGULAR_GUARD):
            raise SingularPointError(
                f"evaluation within {SINGULAR_GUARD:g} of singular point q^{l}",
                point=w[np.argmin(d)], which=l)


def map_p_inverse(w):
    """Inverse map W^{-1}(w) = 2 arctan(w^2); real part reported in (-pi, pi].

    Raises near q^1..q^4 where 1 -+ i w^2 vanishes.
    """
    w = np.asarray(w, dtype=complex)
    _guard_q(w)
    return 2.0 * np.arctan(w * w)


def _principal_root(z):
    """Principal branch of (tan(z/2))**(1/2); the other root is its negative."""
    return np.sqrt(np.tan(np.asarray(z, dtype=complex) / 2.0))


def _dW_dz(w):
    """Complex derivative dW/dz expressed through the image point w."""
    return (1.0 + w ** 4) / (4.0 * w)


def seed_branch(z: complex, depth: float = 50.0, steps: int = 2000) -> complex:
    """Image of ``z`` on the branch continued up from the deep-water limit.

    Walks a vertical segment from z - i*depth (where the image is pinned
    near -exp(-i pi/4)) up to z, flipping the principal root whenever
    continuity demands it.
    """
    z = complex(z)
    ys = np.linspace(z.imag - depth, z.imag, steps)
    path = z.real + 1j * ys
    roots = _principal_root(path)
    w = roots[0] if abs(roots[0] - DEEP_WATER_IMAGE) <= abs(-roots[0] - DEEP_WATER_IMAGE) else -roots[0]
    for r in roots[1:]:
        w = r if abs(r - w) <= abs(-r - w) else -r
    return w


def map_p(z, prev: complex | None = None):
    """Forward map W(z) on the branch continued from ``prev``.

    With ``prev`` None the branch is seeded from the deep-water
    normalization below ``z``.  Returns the image point; thread the result
    back in as ``prev`` when mapping successive samples of a curve.
    """
    z = complex(z)
    if prev is None:
        return seed_branch(z)
    r = complex(_principal_root(z))
    dplus, dminus = abs(r - prev), abs(-r - prev)
    sep = abs(2.0 * r)
    if min(dplus, dminus) > 0.45 * sep and sep > 1e-8:
        raise BranchCutError(
            f"both square roots far from previous image (d+={dplus:.3g}, d-={dminus:.3g})")
    return r if dplus <= dminus else -r


def map_curve_points(z: np.ndarray, w0: complex | None = None) -> np.ndarray:
    """Map an ordered array of physical points by samplewise continuation.

    The first sample is seeded from the deep-water limit unless ``w0`` is
    given.  Raises :class:`BranchCutError` if consecutive samples are too
    coarse to disambiguate the root.
    """
    z = np.asarray(z, dtype=complex)
    roots = _principal_root(z)
    out = np.empty_like(roots)
    w = seed_branch(z[0]) if w0 is None else complex(w0)
    if w0 is None:
        out[0] = w
        start = 1
    else:
        start = 0
    for j in range(start, z.shape[0]):
        r = roots[j]
        dplus, dminus = abs(r - w), abs(-r - w)
        sep = abs(2.0 * r)
        if min(dplus, dminus) > 0.45 * sep and sep > 1e-8:
            raise BranchCutError(
                f"branch ambiguity at sample {j}: d+={dplus:.3g} d-={dminus:.3g} sep={sep:.3g}")
        w = r if dplus <= dminus else -r
        out[j] = w
    return out


def q_squared(w):
    """Metric factor Q^2 = |dW/dz|^2 = |(1 + w^4)/(4 w)|^2 at tilde points."""
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) < SINGULAR_GUARD):
        raise SingularPointError("Q^2 diverges at the origin", point=0j, which=0)
    return np.abs(_dW_dz(w)) ** 2


def grad_q(w):
    """Gradient of Q at tilde points, as a complex number gx + i gy.

    For holomorphic f, grad |f| = |f| * (Re(f'/f), -Im(f'/f)); here
    f = (1 + w^4)/(4 w), so f'/f = 4 w^3/(1 + w^4) - 1/w.
    """
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) < SINGULAR_GUARD):
        raise SingularPointError("grad Q diverges at the origin", point=0j, which=0)
    one_p = 1.0 + w ** 4
    if np.any(np.abs(one_p) < SINGULAR_GUARD):
        raise SingularPointError("grad Q diverges where Q = 0 (points q^1..q^4)")
    q = np.abs(_dW_dz(w))
    log_deriv = 4.0 * w ** 3 / one_p - 1.0 / w
    return q * (np.real(log_deriv) - 1j * np.imag(log_deriv))


def p2_inverse(w):
    """Physical height y recovered from a tilde point: log |(i + w^2)/(i - w^2)|."""
    w = np.asarray(w, dtype=complex)
    _guard_q(w)
    w2 = w * w
    return np.log(np.abs((1j + w2) / (1j - w2)))


def grad_p2_inverse(w):
    """Gradient of the height function, as gx + i gy.

    d/dw log((i + w^2)/(i - w^2)) = -4 i w / (1 + w^4).
    """
    w = np.asarray(w, dtype=complex)
    _guard_q(w)
    log_deriv = -4j * w / (1.0 + w ** 4)
    return np.real(log_deriv) - 1j * np.imag(log_deriv)


def velocity_pullback(u_tilde, w):
    """Physical velocity grad(W)^T u-tilde, given the tilde image point w.

    The Jacobian of a holomorphic map acts on vectors as complex
    multiplication by dW/dz; its transpose multiplies by the conjugate.
    Velocities are complex numbers u1 + i u2.
    """
    u_tilde = np.asarray(u_tilde, dtype=complex)
    return np.conj(_dW_dz(np.asarray(w, dtype=complex))) * u_tilde


def velocity_pushforward(u_physical, w):
    """Inverse of :func:`velocity_pullback`: u-tilde = grad(W) u / Q^2."""
    u_physical = np.asarray(u_physical, dtype=complex)
    d = _dW_dz(np.asarray(w, dtype=complex))
    return d * u_physical / np.abs(d) ** 2


def min_distance_to_q(w: np.ndarray) -> np.ndarray:
    """m(q^l) = min over samples of |w - q^l| for l = 0..4."""
    w = np.asarray(w, dtype=complex)
    qs = q_points_complex()
    return np.array([float(np.min(np.abs(w - q))) for q in qs])
