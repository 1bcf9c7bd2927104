"""Jump intensity measures and sampling of super-threshold jumps.

A measure is a finite set of atoms ``(z_i, rate_i)`` plus an optional
truncated power-law density ``c |z|^(-1-alpha)`` on ``0 < |z| <= z_max``.
Jumps with ``|z| > delta`` are realized as a compound Poisson stream; the rest
is left to the compensator in :mod:`marcus_csf.dynamics`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MeasureError",
    "PowerLawDensity",
    "LevyMeasureSpec",
    "JumpEvent",
    "validate",
    "total_rate",
    "sample_jumps",
    "small_moments",
    "jump_streams",
]

SIDES = ("both", "positive", "negative")


class MeasureError(ValueError):
    """The measure violates ``nu({0}) = 0`` or the ``min(z^2, 1)`` integrability condition."""


@dataclass(frozen=True)
class PowerLawDensity:
    c: float
    alpha: float
    z_max: float = 1.0
    sides: str = "both"

    @property
    def signs(self) -> tuple[float, ...]:
        return {"both": (1.0, -1.0), "positive": (1.0,), "negative": (-1.0,)}[self.sides]

    def mass_above(self, delta: float) -> float:
        """Mass of one side on ``(delta, z_max]``."""
        if delta >= self.z_max:
            return 0.0
        return self.c * (delta ** -self.alpha - self.z_max ** -self.alpha) / self.alpha

    def first_moment(self, lo: float, hi: float) -> float:
        """``int_lo^hi z * c z^(-1-alpha) dz`` for one side, clipped to ``z_max``."""
        hi = min(hi, self.z_max)
        if hi <= lo:
            return 0.0
        p = 1.0 - self.alpha
        if abs(p) < 1e-14:
            return self.c * np.log(hi / lo)
        return self.c * (hi**p - lo**p) / p

    def second_moment(self, hi: float) -> float:
        """``int_0^hi z^2 * c z^(-1-alpha) dz`` for one side."""
        hi = min(hi, self.z_max)
        if hi <= 0:
            return 0.0
        return self.c * hi ** (2.0 - self.alpha) / (2.0 - self.alpha)

    def inverse_cdf(self, u: np.ndarray, delta: float) -> np.ndarray:
        """Magnitudes on ``(delta, z_max]`` from uniforms ``u`` in ``(0, 1]``."""
        a = self.alpha
        lo, hi = delta**-a, self.z_max**-a
        z = (lo - u * (lo - hi)) ** (-1.0 / a)
        return np.maximum(z, np.nextafter(delta, np.inf))


@dataclass(frozen=True)
class LevyMeasureSpec:
    atoms: tuple[tuple[float, float], ...] = ()
    density: PowerLawDensity | None = None

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((float(z), float(r)) for z, r in self.atoms))

    @property
    def is_symmetric(self) -> bool:
        atoms = sorted(self.atoms)
        mirrored = sorted((-z, r) for z, r in self.atoms)
        return atoms == mirrored and (self.density is None or self.density.sides == "both")


@dataclass(frozen=True, order=True)
class JumpEvent:
    t: float
    z: float = field(compare=False)


def validate(m: LevyMeasureSpec) -> None:
    """Raise :class:`MeasureError` naming the first violated condition."""
    for z, rate in m.atoms:
        if not (np.isfinite(z) and np.isfinite(rate)):
            raise MeasureError(f"atom ({z}, {rate}) is not finite")
        if z == 0.0:
            raise MeasureError("atom at zero: the measure must not charge {0}")
        if rate <= 0.0:
            raise MeasureError(f"nonpositive rate {rate} for atom at z={z}")
    d = m.density
    if d is not None:
        if d.sides not in SIDES:
            raise MeasureError(f"density sides must be one of {SIDES}, got {d.sides!r}")
        if not d.c > 0:
            raise MeasureError(f"density scale c must be positive, got {d.c}")
        if not 0.0 < d.alpha < 2.0:
            raise MeasureError(
                f"second-moment condition fails: int min(z^2, 1) nu(dz) diverges unless 0 < alpha < 2 (got alpha={d.alpha})"
            )
        if not d.z_max > 0:
            raise MeasureError(f"density z_max must be positive, got {d.z_max}")


def total_rate(m: LevyMeasureSpec, delta: float) -> float:
    """Intensity of jumps with ``|z| > delta``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    rate = sum(r for z, r in m.atoms if abs(z) > delta)
    if m.density is not None:
        if delta == 0.0:
            raise ValueError("infinite rate: the density has infinite activity at delta = 0")
        rate += len(m.density.signs) * m.density.mass_above(delta)
    return float(rate)


def small_moments(m: LevyMeasureSpec, delta: float) -> tuple[float, float]:
    """Return ``(b, s2)``: ``int_{delta<|z|<=1} z nu(dz)`` and ``int_{|z|<=delta} z^2 nu(dz)``."""
    if delta > 1.0:
        raise ValueError("delta must not exceed 1")
    b = sum(z * r for z, r in m.atoms if delta < abs(z) <= 1.0)
    s2 = sum(z * z * r for z, r in m.atoms if abs(z) <= delta)
    d = m.density
    if d is not None:
        for sign in d.signs:
            b += sign * d.first_moment(delta, 1.0)
            s2 += d.second_moment(delta)
    return float(b), float(s2)


def jump_streams(seed) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent generators for inter-arrival times and for jump sizes."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    times, sizes = ss.spawn(2)
    return np.random.default_rng(times), np.random.default_rng(sizes)


def _components(m: LevyMeasureSpec, delta: float):
    comps = [(r, ("atom", z)) for z, r in m.atoms if abs(z) > delta]
    if m.density is not None:
        mass = m.density.mass_above(delta)
        if mass > 0:
            comps += [(mass, ("density", s)) for s in m.density.signs]
    return comps


def sample_jumps(m: LevyMeasureSpec, delta: float, T: float, seed) -> list[JumpEvent]:
    """Time-sorted super-threshold jumps on ``[0, T]``.

    Arrival times and sizes come from separate substreams of ``seed`` so that
    a longer horizon extends the event list of a shorter one.
    """
    rate = total_rate(m, delta)
    if rate == 0.0 or T <= 0:
        return []
    t_rng, z_rng = jump_streams(seed)
    chunk = max(16, int(rate * T * 1.2) + 16)
    times: list[np.ndarray] = []
    t_last = 0.0
    while True:
        gaps = t_rng.exponential(1.0 / rate, size=chunk)
        # same summation order as one long cumsum, so prefixes are bit-identical
        gaps[0] += t_last
        arrivals = np.cumsum(gaps)
        keep = arrivals[arrivals <= T]
        times.append(keep)
        if keep.size < chunk:
            break
        t_last = arrivals[-1]
    t = np.concatenate(times)
    n = t.size
    if n == 0:
        return []

    comps = _components(m, delta)
    weights = np.array([w for w, _ in comps])
    cum = np.cumsum(weights) / weights.sum()
    cum[-1] = 1.0
    u = z_rng.random((n, 2))
    which = np.searchsorted(cum, u[:, 0], side="right")
    z = np.empty(n)
    for i, (_, (kind, val)) in enumerate(comps):
        sel = which == i
        if kind == "atom":
            z[sel] = val
        else:
            z[sel] = val * m.density.inverse_cdf(1.0 - u[sel, 1], delta)
    return [JumpEvent(float(ti), float(zi)) for ti, zi in zip(t, z)]
