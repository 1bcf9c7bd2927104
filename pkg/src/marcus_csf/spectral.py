"""Zero-mean periodic fields on the unit torus.

A field is stored by its Fourier amplitudes ``c_k`` for ``k = 1..N``; the
negative modes are the complex conjugates and the mean ``c_0`` is absent, so
every field is real and mean-zero by construction.  Physical samples live on
the grid ``x_j = j/M`` with ``M`` a power of two and ``M >= 2N + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "ResolutionError",
    "SpectralField",
    "PhysicalField",
    "dealias_grid",
    "l1_grid",
    "to_physical",
    "to_spectral",
    "derivative",
    "shift",
    "norm_H2",
    "norm_V2",
    "norm_L1_dx",
    "norm_L1_dxx",
    "project",
    "write_snapshot",
]

TWO_PI = 2.0 * np.pi

# L1 quadrature has kinks wherever the derivative changes sign, so the
# trapezoid rule is only O(M^-2); keep a floor on the grid size.
L1_MIN_POINTS = 4096


class ResolutionError(ValueError):
    """Raised when a physical grid cannot represent the requested modes."""


@dataclass(frozen=True, eq=False)
class SpectralField:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if c.size < 1:
            raise ValueError("a field needs at least one mode")
        if not np.all(np.isfinite(c)):
            raise ValueError("field amplitudes must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(1, self.n_modes + 1)

    @classmethod
    def zeros(cls, n_modes: int) -> "SpectralField":
        return cls(np.zeros(n_modes, dtype=np.complex128))

    @classmethod
    def from_modes(cls, n_modes: int, modes: dict[int, complex]) -> "SpectralField":
        c = np.zeros(n_modes, dtype=np.complex128)
        for k, amp in modes.items():
            if not 1 <= k <= n_modes:
                raise ValueError(f"mode {k} outside 1..{n_modes}")
            c[k - 1] = amp
        return cls(c)

    @classmethod
    def sine(cls, n_modes: int, k: int = 1, amplitude: float = 1.0) -> "SpectralField":
        """``amplitude * sin(2 pi k x)``."""
        return cls.from_modes(n_modes, {k: -0.5j * amplitude})

    @classmethod
    def cosine(cls, n_modes: int, k: int = 1, amplitude: float = 1.0) -> "SpectralField":
        return cls.from_modes(n_modes, {k: 0.5 * amplitude})

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.coeffs * scalar)

    __rmul__ = __mul__

    def allclose(self, other: "SpectralField", rtol: float = 1e-12) -> bool:
        """Compare relative to the H-norm of ``self`` with a 1e-14 floor."""
        scale = max(np.sqrt(norm_H2(self)), 1e-14)
        return bool(np.sqrt(norm_H2(self - other)) <= rtol * scale)


@dataclass(frozen=True, eq=False)
class PhysicalField:
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.float64).reshape(-1)
        m = s.size
        if m < 2 or m & (m - 1):
            raise ResolutionError(f"grid size {m} is not a power of two")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def M(self) -> int:
        return self.samples.size

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.M) / self.M


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def dealias_grid(n_modes: int) -> int:
    """Analysis grid for pointwise nonlinearities: ``4N`` rounded up to a power of two."""
    return _next_pow2(4 * n_modes)


def l1_grid(n_modes: int) -> int:
    return max(dealias_grid(n_modes), L1_MIN_POINTS)


def _synthesize(coeffs: np.ndarray, M: int) -> np.ndarray:
    n = coeffs.size
    if M < 2 * n + 1:
        raise ResolutionError(f"grid of {M} points cannot resolve {n} modes (need M >= {2 * n + 1})")
    if M & (M - 1):
        raise ResolutionError(f"grid size {M} is not a power of two")
    spec = np.zeros(M // 2 + 1, dtype=np.complex128)
    spec[1 : n + 1] = coeffs
    return np.fft.irfft(spec, n=M) * M


def _analyze(samples: np.ndarray, n_modes: int) -> np.ndarray:
    M = samples.size
    if M < 2 * n_modes + 1:
        raise ResolutionError(f"grid of {M} points cannot resolve {n_modes} modes")
    return np.fft.rfft(samples)[1 : n_modes + 1] / M


def to_physical(f: SpectralField, M: int | None = None) -> PhysicalField:
    if M is None:
        M = dealias_grid(f.n_modes)
    return PhysicalField(_synthesize(f.coeffs, M))


def to_spectral(p: PhysicalField, n_modes: int) -> SpectralField:
    """Discrete Fourier analysis; the mean and modes above ``n_modes`` are discarded."""
    return SpectralField(_analyze(p.samples, n_modes))


def derivative(f: SpectralField) -> SpectralField:
    return SpectralField(2j * np.pi * f.wavenumbers * f.coeffs)


def shift(f: SpectralField, a: float) -> SpectralField:
    """Exact translation ``u(x) -> u(x + a)``."""
    # reduce first so the phase is accurate for large displacements
    a = float(a) % 1.0
    return SpectralField(np.exp(2j * np.pi * f.wavenumbers * a) * f.coeffs)


def norm_H2(f: SpectralField) -> float:
    return float(2.0 * np.sum(np.abs(f.coeffs) ** 2))


def norm_V2(f: SpectralField) -> float:
    return float(2.0 * np.sum((TWO_PI * f.wavenumbers) ** 2 * np.abs(f.coeffs) ** 2))


def _l1(coeffs: np.ndarray, M: int | None) -> float:
    if M is None:
        M = l1_grid(coeffs.size)
    # periodic trapezoid rule reduces to the sample mean
    return float(np.mean(np.abs(_synthesize(coeffs, M))))


def norm_L1_dx(f: SpectralField, M: int | None = None) -> float:
    return _l1(derivative(f).coeffs, M)


def norm_L1_dxx(f: SpectralField, M: int | None = None) -> float:
    return _l1(derivative(derivative(f)).coeffs, M)


def project(f: SpectralField, n: int) -> SpectralField:
    """Orthogonal projection onto modes ``0 < |k| <= n`` (length is kept)."""
    if not 1 <= n <= f.n_modes:
        raise ValueError(f"projection order {n} outside 1..{f.n_modes}")
    c = np.array(f.coeffs)
    c[n:] = 0.0
    return SpectralField(c)


def write_snapshot(path: str | Path, f: SpectralField, t: float, M: int | None = None) -> None:
    p = to_physical(f, M)
    with open(path, "w") as fh:
        fh.write(f"# t={float(t)!r}\n")
        for x, u in zip(p.x.tolist(), p.samples.tolist()):
            fh.write(f"{x!r} {u!r}\n")
