"""Right-hand side of the simulated equation.

The deterministic part is the graph curve-shortening drift
``d/dx arctan(u_x) = u_xx / (1 + u_x^2)``, evaluated pseudo-spectrally on a
``4N`` grid.  Jumps below the threshold ``delta`` are not simulated; their
mean effect is a diagonal Fourier multiplier ``D_k`` applied exactly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .levy import LevyMeasureSpec, small_moments, validate
from .spectral import SpectralField, _analyze, _synthesize, dealias_grid

__all__ = [
    "BlowUpError",
    "QuadratureError",
    "CompensatorMultiplier",
    "csf_drift",
    "dissipation",
    "arctan_power",
    "compensator",
    "apply_multiplier_exact",
    "marcus_kernel",
]

TWO_PI = 2.0 * np.pi
ABS_TOL = 1e-10
REL_TOL = 1e-13


class BlowUpError(FloatingPointError):
    """Non-finite values appeared in the state."""


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CompensatorMultiplier:
    d: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=np.complex128).reshape(-1)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n_modes(self) -> int:
        return self.d.size

    @property
    def is_zero(self) -> bool:
        return not np.any(self.d)

    @classmethod
    def zeros(cls, n_modes: int) -> "CompensatorMultiplier":
        return cls(np.zeros(n_modes, dtype=np.complex128))


def _grid_derivatives(c: np.ndarray, M: int):
    k = np.arange(1, c.size + 1)
    ik = 2j * np.pi * k
    ux = _synthesize(ik * c, M)
    uxx = _synthesize(ik * ik * c, M)
    return ux, uxx


def csf_drift(f: SpectralField) -> SpectralField:
    c = f.coeffs
    if not np.all(np.isfinite(c)):
        raise BlowUpError("non-finite amplitudes in drift evaluation")
    M = dealias_grid(c.size)
    k = np.arange(1, c.size + 1)
    ux = _synthesize(2j * np.pi * k * c, M)
    flux = _analyze(np.arctan(ux), c.size)
    out = 2j * np.pi * k * flux
    if not np.all(np.isfinite(out)):
        raise BlowUpError("drift evaluation produced non-finite values")
    return SpectralField(out)


def dissipation(f: SpectralField, M: int | None = None) -> float:
    """``int u_xx^2 / (1 + u_x^2) dx`` by the periodic trapezoid rule."""
    if M is None:
        M = dealias_grid(f.n_modes)
    ux, uxx = _grid_derivatives(f.coeffs, M)
    return float(np.mean(uxx * uxx / (1.0 + ux * ux)))


def arctan_power(f: SpectralField, M: int | None = None) -> float:
    """``int arctan(u_x) u_x dx``, the H-norm dissipation rate (halved)."""
    if M is None:
        M = dealias_grid(f.n_modes)
    k = np.arange(1, f.n_modes + 1)
    ux = _synthesize(2j * np.pi * k * f.coeffs, M)
    return float(np.mean(np.arctan(ux) * ux))


def marcus_kernel(x):
    """``exp(i x) - 1 - i x`` without cancellation for small ``|x|``."""
    x = np.asarray(x, dtype=np.float64)
    shape = x.shape
    x = np.atleast_1d(x)
    re = -2.0 * np.sin(0.5 * x) ** 2
    im = np.sin(x) - x
    small = np.abs(x) < 1e-2
    if np.any(small):
        im[small] = _sin_minus_x_series(x[small])
    return (re + 1j * im).reshape(shape)


def _sin_minus_x_series(x):
    x2 = x * x
    return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))


def _kernel_re(x: float) -> float:
    s = math.sin(0.5 * x)
    return -2.0 * s * s


def _kernel_im(x: float) -> float:
    if abs(x) < 1e-2:
        return _sin_minus_x_series(x)
    return math.sin(x) - x


def _density_integral(density, omega: float, hi: float) -> complex:
    """``sum_sides int_0^hi kernel(sign*omega*z) c z^(-1-alpha) dz``."""
    hi = min(hi, density.z_max)
    if hi <= 0.0 or omega == 0.0:
        return 0.0j
    c, a = density.c, density.alpha

    # kernel/z^2 is smooth at 0; the algebraic weight z^(1-alpha) carries the singularity
    def re(z):
        return c * _kernel_re(omega * z) / (z * z) if z > 0 else -0.5 * c * omega * omega

    def im(z):
        return c * _kernel_im(omega * z) / (z * z) if z > 0 else 0.0

    # first half-oscillation: algebraic weight; beyond it the kernel splits into
    # an oscillatory QAWO part and closed-form power integrals
    e1 = min(hi, np.pi / omega)
    opts = dict(epsabs=1e-12, epsrel=1e-14, limit=200)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        total_re, err_re = integrate.quad(re, 0.0, e1, weight="alg", wvar=(1.0 - a, 0.0), **opts)
        total_im, err_im = integrate.quad(im, 0.0, e1, weight="alg", wvar=(1.0 - a, 0.0), **opts)
        total_err = err_re + err_im
        if hi > e1:

            def power(z):
                return c * z ** (-1.0 - a)

            cos_part, err_c = integrate.quad(power, e1, hi, weight="cos", wvar=omega, **opts)
            sin_part, err_s = integrate.quad(power, e1, hi, weight="sin", wvar=omega, **opts)
            mass = c * (e1**-a - hi**-a) / a
            total_re += cos_part - mass
            total_im += sin_part - omega * density.first_moment(e1, hi)
            total_err += err_c + err_s
    scale = abs(total_re) + abs(total_im)
    if not np.isfinite(scale) or total_err > max(ABS_TOL, REL_TOL * scale):
        raise QuadratureError(f"compensator quadrature did not converge (error estimate {total_err:.2e})")
    out = 0.0j
    for sign in density.signs:
        # real part is even in the sign, imaginary part odd
        out += total_re + 1j * sign * total_im
    return out


def compensator(m: LevyMeasureSpec, epsilon: float, delta: float, n_modes: int) -> CompensatorMultiplier:
    """Per-mode drift of the unsimulated and compensated jumps.

    ``D_k = -i w b(delta) + int_{|z|<=delta} (exp(i w z) - 1 - i w z) nu(dz)``
    with ``w = 2 pi k epsilon``.
    """
    validate(m)
    if delta > 1.0:
        raise ValueError("delta must not exceed 1")
    b, _ = small_moments(m, delta)
    k = np.arange(1, n_modes + 1)
    omega = TWO_PI * k * epsilon
    d = -1j * omega * b
    for z, rate in m.atoms:
        if abs(z) <= delta:
            d = d + rate * marcus_kernel(omega * z)
    if m.density is not None:
        d = d + np.array([_density_integral(m.density, w, delta) for w in omega])
    return CompensatorMultiplier(d)


def apply_multiplier_exact(f: SpectralField, D: CompensatorMultiplier, dt: float) -> SpectralField:
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if D.is_zero or dt == 0:
        return f
    return SpectralField(np.exp(D.d * dt) * f.coeffs)
