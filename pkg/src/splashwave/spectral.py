"""Periodic grid and Fourier machinery shared by every other module.

All fields live on the uniform grid alpha_j = -pi + 2*pi*j/N, j = 0..N-1,
with N even.  Coefficients follow the analyst's convention

    fhat_m = (1/2pi) int f(alpha) exp(-i m alpha) d(alpha),

so a real field satisfies fhat_{-m} = conj(fhat_m) and Parseval reads
sum |fhat_m|^2 = (1/2pi) int |f|^2.  Sobolev norms are

    ||f||_{H^s}^2 = sum_m (1 + m^2)^s |fhat_m|^2.

Derivatives multiply by (i m)^order in coefficient space; the unpaired
Nyquist mode m = -N/2 is zeroed in every derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic parameter grid on [-pi, pi)."""

    n: int
    alpha: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.n % 2 != 0 or self.n < 8:
            raise GridError(f"grid size must be even and >= 8, got {self.n}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", -np.pi + 2.0 * np.pi * np.arange(self.n) / self.n)

    @property
    def h(self) -> float:
        return 2.0 * np.pi / self.n

    def matches(self, values: np.ndarray) -> bool:
        return values.shape == (self.n,)


def mode_numbers(n: int) -> np.ndarray:
    """Centered mode numbers m = -N/2 .. N/2-1."""
    return np.arange(-(n // 2), n // 2)


def _check(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim != 1 or values.shape[0] % 2 != 0:
        raise GridError(f"expected 1-D even-length array, got shape {values.shape}")
    return values


def to_spectral(values: np.ndarray) -> np.ndarray:
    """Coefficients fhat_m for m = -N/2..N/2-1 under the (1/2pi)-integral convention.

    The grid starts at alpha_0 = -pi, so the raw FFT picks up a phase
    (-1)^m relative to the convention; it is removed here.
    """
    values = _check(values)
    n = values.shape[0]
    raw = np.fft.fft(values) / n
    shifted = np.fft.fftshift(raw)
    m = mode_numbers(n)
    return shifted * ((-1.0) ** m)


def from_spectral(modes: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_spectral`; returns real samples."""
    modes = np.asarray(modes)
    n = modes.shape[0]
    if n % 2 != 0:
        raise GridError("mode array must have even length")
    m = mode_numbers(n)
    raw = np.fft.ifftshift(modes * ((-1.0) ** m))
    return np.real(np.fft.ifft(raw) * n)


def derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """order-th derivative by multiplication with (i m)^order; Nyquist zeroed."""
    values = _check(values)
    if order < 1:
        raise ValueError("order must be a positive integer")
    n = values.shape[0]
    raw = np.fft.fft(values)
    m = np.fft.fftfreq(n, d=1.0 / n)  # 0, 1, ..., N/2-1, -N/2, ..., -1
    mult = (1j * m) ** order
    mult[n // 2] = 0.0
    return np.real(np.fft.ifft(raw * mult))


def antiderivative(values: np.ndarray) -> np.ndarray:
    """Zero-mean periodic primitive of the zero-mean part of ``values``.

    The m = 0 coefficient of the input is dropped; a nonzero mean has no
    periodic primitive and is handled explicitly by callers.
    """
    values = _check(values)
    n = values.shape[0]
    raw = np.fft.fft(values)
    m = np.fft.fftfreq(n, d=1.0 / n)
    mult = np.zeros(n, dtype=complex)
    nonzero = m != 0
    mult[nonzero] = 1.0 / (1j * m[nonzero])
    mult[n // 2] = 0.0
    return np.real(np.fft.ifft(raw * mult))


def integral(values: np.ndarray) -> float:
    """int_{-pi}^{pi} f d(alpha) by the (spectrally exact) trapezoidal rule."""
    values = _check(values)
    return 2.0 * np.pi * float(np.mean(values))


def sobolev_norm(values: np.ndarray, s: float) -> float:
    """H^s norm under the module convention; s may be fractional."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    modes = to_spectral(values)
    m = mode_numbers(modes.shape[0])
    weight = (1.0 + m.astype(float) ** 2) ** s
    return float(np.sqrt(np.sum(weight * np.abs(modes) ** 2)))


def krasny_filter(values: np.ndarray, threshold: float) -> np.ndarray:
    """Zero Fourier modes below ``threshold`` relative to the largest one.

    The standard stabilizer for sheet-strength roundoff growth; idempotent,
    and the identity for threshold 0.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    values = _check(values)
    if threshold == 0.0:
        return values.copy()
    raw = np.fft.fft(values)
    peak = np.max(np.abs(raw))
    if peak == 0.0:
        return values.copy()
    raw[np.abs(raw) < threshold * peak] = 0.0
    return np.real(np.fft.ifft(raw))


def resize(values: np.ndarray, n_target: int) -> np.ndarray:
    """Resample onto a grid of different size by padding or truncating the
    spectrum (exact for band-limited fields)."""
    values = _check(values)
    n = values.shape[0]
    if n_target == n:
        return values.copy()
    if n_target % 2 != 0:
        raise GridError("target size must be even")
    modes = to_spectral(values)
    m_src = mode_numbers(n)
    out = np.zeros(n_target, dtype=complex)
    m_dst = mode_numbers(n_target)
    keep = min(n, n_target) // 2
    for m in range(-keep, keep):
        out[np.searchsorted(m_dst, m)] = modes[np.searchsorted(m_src, m)]
    return from_spectral(out)


def interpolate(values: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant at arbitrary points ``theta``.

    Direct mode summation, O(N * len(theta)); used for reparametrization,
    not in inner loops.  The Nyquist mode is split symmetrically so the
    interpolant is real.
    """
    values = _check(values)
    n = values.shape[0]
    modes = to_spectral(values)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m = mode_numbers(n)
    out = np.zeros(theta.shape, dtype=complex)
    for k, c in zip(m, modes):
        if k == -n // 2:
            # unpaired mode: evaluate as a real cosine of the Nyquist frequency
            out += np.real(c) * np.cos(k * theta)
        else:
            out += c * np.exp(1j * k * theta)
    return np.real(out)
