"""Trajectory post-processing: identity residuals, decay bounds and rate fits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "C1_DEFAULT",
    "DiagnosticsSeries",
    "DecayFit",
    "BoundCheck",
    "FitError",
    "energy_residual",
    "k1_rate",
    "h_decay_bound",
    "fit_decay",
    "w21_budget",
    "v_monotone",
]

# a zero-mean periodic v vanishes somewhere, so |v(x)| <= (1/2) ||v'||_L1
# along the shorter arc, and ||v||_L2 <= ||v||_Linf <= (1/2) ||v'||_L1
C1_DEFAULT = 0.5

BOUND_SLACK = 1e-6
BUDGET_SLACK = 1e-3

COLUMNS = ("t", "H2", "V2", "cum_diss", "cum_trunc", "n_jumps")
L1_COLUMNS = ("L1dx", "L1dxx")


class FitError(ValueError):
    """The tail window cannot support a log-linear fit."""


@dataclass
class DiagnosticsSeries:
    t: np.ndarray
    H2: np.ndarray
    V2: np.ndarray
    cum_diss: np.ndarray
    cum_trunc: np.ndarray
    n_jumps: np.ndarray
    L1dx: np.ndarray | None = None
    L1dxx: np.ndarray | None = None

    def __post_init__(self):
        for name in COLUMNS + L1_COLUMNS:
            val = getattr(self, name)
            if val is not None:
                dtype = np.int64 if name == "n_jumps" else np.float64
                setattr(self, name, np.asarray(val, dtype=dtype))
        n = self.t.size
        if any(getattr(self, c).size != n for c in COLUMNS):
            raise ValueError("all columns must have the same length")

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def has_l1(self) -> bool:
        return self.L1dx is not None and self.L1dxx is not None

    @property
    def columns(self) -> tuple[str, ...]:
        return COLUMNS + (L1_COLUMNS if self.has_l1 else ())

    def rows(self):
        cols = [getattr(self, c) for c in self.columns]
        for i in range(len(self)):
            yield tuple(c[i] for c in cols)

    def take(self, idx) -> "DiagnosticsSeries":
        """Sub-series at the given row indices (e.g. for decimation)."""
        kw = {c: getattr(self, c)[idx] for c in self.columns}
        return DiagnosticsSeries(**kw)


class SeriesRecorder:
    """Append-only row buffer used while a trajectory is running."""

    def __init__(self, with_l1: bool):
        self.with_l1 = with_l1
        self._rows: list[tuple] = []

    def append(self, *row) -> None:
        self._rows.append(row)

    def __len__(self) -> int:
        return len(self._rows)

    def finish(self) -> DiagnosticsSeries:
        cols = list(zip(*self._rows)) if self._rows else [()] * (8 if self.with_l1 else 6)
        kw = dict(zip(COLUMNS, cols[:6]))
        if self.with_l1:
            kw.update(L1dx=cols[6], L1dxx=cols[7])
        return DiagnosticsSeries(**kw)


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    first_violation: float | None = None
    lhs: float | None = None
    rhs: float | None = None

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class DecayFit:
    k0_hat: float
    window: tuple[float, float]
    r2: float
    k1_bound: float
    n_points: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def k0_sufficient(self) -> float:
        """The guaranteed (not sharp) V-norm rate ``k1 / 4``."""
        return self.k1_bound / 4.0


def energy_residual(s: DiagnosticsSeries) -> float:
    """``max_t |V2(t) + cum_diss(t) + cum_trunc(t) - V2(0)|``."""
    if len(s) == 0:
        raise ValueError("empty series")
    r = s.V2 + s.cum_diss + s.cum_trunc - s.V2[0]
    return float(np.max(np.abs(r)))


def k1_rate(V0sq: float, C1: float = C1_DEFAULT) -> float:
    return 1.0 / (C1**2 * (1.0 + V0sq))


def h_decay_bound(s: DiagnosticsSeries, V0sq: float, C1: float = C1_DEFAULT) -> BoundCheck:
    """Check ``H2(t) <= H2(0) exp(-k1 t)`` (relative slack 1e-6) at every row."""
    if len(s) == 0:
        return BoundCheck(True)
    k1 = k1_rate(V0sq, C1)
    bound = s.H2[0] * np.exp(-k1 * (s.t - s.t[0])) * (1.0 + BOUND_SLACK)
    bad = np.nonzero(s.H2 > bound)[0]
    if bad.size:
        i = bad[0]
        return BoundCheck(False, float(s.t[i]), float(s.H2[i]), float(bound[i]))
    return BoundCheck(True)


def v_monotone(s: DiagnosticsSeries, rel_tol: float = 1e-8) -> BoundCheck:
    """``V2(t_{j+1}) <= V2(t_j) + rel_tol * V2(0)`` for consecutive rows."""
    if len(s) < 2:
        return BoundCheck(True)
    inc = np.diff(s.V2) - rel_tol * s.V2[0]
    bad = np.nonzero(inc > 0)[0]
    if bad.size:
        i = bad[0] + 1
        return BoundCheck(False, float(s.t[i]), float(s.V2[i]), float(s.V2[i - 1]))
    return BoundCheck(True)


def fit_decay(
    s: DiagnosticsSeries,
    fraction: float = 0.5,
    C1: float = C1_DEFAULT,
    require_positive: bool = False,
    min_points: int = 10,
) -> DecayFit:
    """Least-squares slope of ``log V2`` against ``t`` over the last ``fraction`` of the horizon."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    t0, t1 = float(s.t[0]), float(s.t[-1])
    lo = t1 - fraction * (t1 - t0)
    sel = s.t >= lo
    t, v = s.t[sel], s.V2[sel]
    if t.size < min_points:
        raise FitError(f"only {t.size} rows in the tail window (need {min_points})")
    if not np.all(v > 0) or not np.all(np.isfinite(np.log(v))):
        raise FitError("V2 vanished or underflowed in the tail window")
    y = np.log(v)
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    fit = DecayFit(
        k0_hat=float(-slope),
        window=(float(t[0]), float(t[-1])),
        r2=r2,
        k1_bound=k1_rate(float(s.V2[0]), C1),
        n_points=int(t.size),
    )
    if require_positive and not fit.k0_hat > 0:
        raise FitError(f"fitted decay rate {fit.k0_hat:.3e} is not positive")
    return fit


def w21_budget(s: DiagnosticsSeries, V0sq: float) -> BoundCheck:
    """``int_0^T ||u_xx||_L1^2 dt <= (1 + V0sq) V0sq`` (relative slack 1e-3)."""
    if not s.has_l1:
        raise ValueError("series has no recorded L1 norms of u_xx")
    lhs = float(np.trapezoid(s.L1dxx**2, s.t)) if len(s) > 1 else 0.0
    rhs = (1.0 + V0sq) * V0sq
    return BoundCheck(lhs <= rhs * (1.0 + BUDGET_SLACK), None, lhs, rhs)
