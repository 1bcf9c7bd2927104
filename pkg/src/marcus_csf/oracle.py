"""Low-tech reference computations for cross-checking the spectral solver.

Nothing here touches FFTs or the spectral module: the flow is stepped with
central finite differences, transport with first-order upwinding, and the
compensator is rebuilt from its Taylor-remainder form with Gauss-Legendre
quadrature in both the flow parameter and the jump size.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .levy import LevyMeasureSpec

__all__ = [
    "CFLError",
    "GridField",
    "fd_csf_step",
    "fd_csf_run",
    "transport_upwind",
    "compensator_quadrature_check",
]


class CFLError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GridField:
    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64).reshape(-1)
        u = u - u.mean()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def M(self) -> int:
        return self.u.size

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.M) * self.h

    @classmethod
    def sample(cls, fn, M: int) -> "GridField":
        return cls(fn(np.arange(M) / M))


def fd_csf_step(g: GridField, dt: float) -> GridField:
    """One explicit Euler step of ``u_t = u_xx / (1 + u_x^2)``."""
    h = g.h
    if dt > 0.4 * h * h:
        raise CFLError(f"dt={dt:.3e} exceeds 0.4 h^2 = {0.4 * h * h:.3e}")
    u = g.u
    up, um = np.roll(u, -1), np.roll(u, 1)
    uxx = (up - 2.0 * u + um) / (h * h)
    ux = (up - um) / (2.0 * h)
    return GridField(u + dt * uxx / (1.0 + ux * ux))


def fd_csf_run(g: GridField, T: float, dt: float | None = None) -> GridField:
    """Integrate to ``T`` with a uniform step no larger than ``dt`` (default ``0.4 h^2``)."""
    if dt is None:
        dt = 0.4 * g.h**2
    n = int(np.ceil(T / dt - 1e-12))
    step = T / n
    h = g.h
    u = np.array(g.u)
    # inlined loop: the public step re-validates and copies every call
    for _ in range(n):
        up, um = np.roll(u, -1), np.roll(u, 1)
        u = u + step * ((up - 2.0 * u + um) / (h * h)) / (1.0 + ((up - um) / (2.0 * h)) ** 2)
        u -= u.mean()
    return GridField(u)


def transport_upwind(g: GridField, a: float, n_steps: int) -> GridField:
    """Solve ``dPhi/dtheta = a dPhi/dx`` on ``theta in [0, 1]``; approximates ``u(x + a)``."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    dth = 1.0 / n_steps
    h = g.h
    if abs(a) * dth > h * (1.0 + 1e-12):
        raise CFLError(f"|a| dtheta = {abs(a) * dth:.3e} exceeds h = {h:.3e}")
    nu = a * dth / h
    u = np.array(g.u)
    for _ in range(n_steps):
        # information travels toward -x when a > 0, so difference forward
        if a >= 0:
            u = u + nu * (np.roll(u, -1) - u)
        else:
            u = u + nu * (u - np.roll(u, 1))
    return GridField(u)


@functools.lru_cache(maxsize=None)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gauss(n: int, lo: float, hi: float):
    x, w = _legendre(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _eta_nodes(max_phase: float) -> int:
    # Gauss-Legendre resolves exp(i p eta) on [0, 1] to roundoff once n exceeds ~p/2 + 30
    # rounded up to a multiple of 32 so the node table cache stays small
    return 32 * (int(max_phase / 2.0 + 40) // 32 + 1)


def _remainder_multiplier(z: np.ndarray, epsilon: float, k: int) -> np.ndarray:
    """``eps^2 z^2 int_0^1 (1-eta) (2 pi i k)^2 exp(2 pi i k eps z eta) d eta``."""
    z = np.asarray(z, dtype=np.float64)
    return z * z * _remainder_over_z2(z, epsilon, k)


def _remainder_over_z2(z: np.ndarray, epsilon: float, k: int, n_eta: int | None = None) -> np.ndarray:
    if n_eta is None:
        n_eta = _eta_nodes(2.0 * np.pi * abs(k) * epsilon * np.max(np.abs(z), initial=0.0))
    eta, w = _gauss(n_eta, 0.0, 1.0)
    lam = 2j * np.pi * k
    phase = np.exp(np.outer(lam * epsilon * z, eta))
    inner = phase @ ((1.0 - eta) * w)
    return epsilon**2 * lam**2 * inner


def _density_panels(alpha: float, hi: float, omega: float, per_panel: int = 24):
    """Panels of nodes and weights for ``int_0^hi h(z) z^(1-alpha) dz``.

    Substituting ``z = s^q`` with ``q = 1/(2 - alpha)`` gives
    ``z^(1-alpha) dz = q ds``; panels are graded toward ``s = 0`` and refined
    to resolve the oscillation in ``z``.
    """
    q = 1.0 / (2.0 - alpha)
    n_osc = max(4, int(np.ceil(omega * hi / np.pi)))
    # uniform in z, mapped to s, then a geometric cascade below the first panel
    s_edges = np.linspace(0.0, hi, n_osc + 1)[1:] ** (1.0 / q)
    cascade = s_edges[0] * 0.5 ** np.arange(20, 0, -1)
    s_edges = np.concatenate([[0.0], cascade, s_edges])
    for lo, up in zip(s_edges[:-1], s_edges[1:]):
        s, w = _gauss(per_panel, lo, up)
        yield s**q, w * q


def _drift_moment(m: LevyMeasureSpec, delta: float) -> float:
    """``int_{delta < |z| <= 1} z nu(dz)`` by log-graded Gauss-Legendre."""
    b = sum(z * r for z, r in m.atoms if delta < abs(z) <= 1.0)
    d = m.density
    if d is not None:
        hi = min(1.0, d.z_max)
        if hi > delta:
            edges = np.geomspace(delta, hi, 33)
            side = 0.0
            for lo, up in zip(edges[:-1], edges[1:]):
                z, w = _gauss(30, lo, up)
                side += np.sum(w * d.c * z ** (-d.alpha))
            b += sum(d.signs) * side
    return float(b)


def compensator_quadrature_check(
    m: LevyMeasureSpec, epsilon: float, delta: float, k: int
) -> complex:
    """Mode-``k`` compensator multiplier rebuilt from the Taylor-remainder form.

    Transport part ``-2 pi i k eps b(delta)`` plus the remainder integrated
    against ``nu`` over ``|z| <= delta``.
    """
    if k == 0:
        return 0.0j
    total = -2j * np.pi * k * epsilon * _drift_moment(m, delta)
    small = np.array([z for z, _ in m.atoms if abs(z) <= delta])
    if small.size:
        rates = np.array([r for z, r in m.atoms if abs(z) <= delta])
        total += np.sum(rates * _remainder_multiplier(small, epsilon, k))
    d = m.density
    if d is not None:
        hi = min(delta, d.z_max)
        if hi > 0:
            omega = 2.0 * np.pi * abs(k) * epsilon
            for z, w in _density_panels(d.alpha, hi, omega):
                for sign in d.signs:
                    total += d.c * np.sum(w * _remainder_over_z2(sign * z, epsilon, k))
    return complex(total)
