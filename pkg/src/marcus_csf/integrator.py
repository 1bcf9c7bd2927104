"""Jump-adapted time stepping of the Galerkin system.

Between jumps the state follows the curve-shortening drift plus the exact
compensator multiplier (Strang split, SSP-RK3 for the nonlinear part); each
realized jump acts as the exact shift ``u(x) -> u(x + eps z)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import dynamics as dyn
from .diagnostics import DiagnosticsSeries, SeriesRecorder
from .dynamics import BlowUpError, CompensatorMultiplier
from .levy import JumpEvent, LevyMeasureSpec, sample_jumps, small_moments, validate
from .spectral import SpectralField, norm_H2, norm_L1_dx, norm_L1_dxx, norm_V2, shift

__all__ = [
    "ConfigError",
    "InitSpec",
    "SimConfig",
    "TrajectoryState",
    "RunResult",
    "initial_field",
    "stable_dt",
    "step_flow",
    "apply_jump",
    "run",
    "path_seed",
]

log = logging.getLogger(__name__)

C_STAB = 0.4
PRESETS = ("single_mode", "two_mode", "random_smooth")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InitSpec:
    """Named initial-condition preset; every preset is mean-zero."""

    preset: str = "single_mode"
    k: int = 1
    amplitude: float = 1e-3
    k2: int = 2
    amplitude2: float = 0.5e-3
    decay: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown initial-condition preset {self.preset!r}; choose from {PRESETS}")
        if self.k < 1 or self.k2 < 1:
            raise ConfigError("initial-condition wavenumbers must be >= 1")


def initial_field(spec: InitSpec, n_modes: int) -> SpectralField:
    if spec.preset == "single_mode":
        if spec.k > n_modes:
            raise ConfigError(f"init_k={spec.k} exceeds n_modes={n_modes}")
        return SpectralField.sine(n_modes, spec.k, spec.amplitude)
    if spec.preset == "two_mode":
        if max(spec.k, spec.k2) > n_modes:
            raise ConfigError("two_mode wavenumbers exceed n_modes")
        if spec.k == spec.k2:
            raise ConfigError("two_mode needs distinct wavenumbers")
        return SpectralField.sine(n_modes, spec.k, spec.amplitude) + SpectralField.sine(
            n_modes, spec.k2, spec.amplitude2
        )
    # random_smooth: phases drawn in mode order, so a larger n_modes extends the same field
    rng = np.random.default_rng(spec.seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_modes)
    k = np.arange(1, n_modes + 1, dtype=np.float64)
    return SpectralField(0.5 * spec.amplitude * k ** (-spec.decay) * np.exp(1j * phases))


@dataclass(frozen=True)
class SimConfig:
    measure: LevyMeasureSpec = field(default_factory=LevyMeasureSpec)
    init: InitSpec = field(default_factory=InitSpec)
    n_modes: int = 64
    T: float = 0.05
    dt_max: float = 1e-3
    epsilon: float = 1.0
    delta: float = 0.1
    seed: int = 0
    record_every: int = 10
    c_stab: float = C_STAB
    drift: bool = True
    record_l1: bool = False
    snapshot_every: int = 0
    C1: float = 0.5
    tail_fraction: float = 0.5

    def __post_init__(self):
        if not (isinstance(self.n_modes, (int, np.integer)) and self.n_modes >= 1):
            raise ConfigError("n_modes must be an integer >= 1")
        if not self.T > 0:
            raise ConfigError("T must be positive")
        if not self.dt_max > 0:
            raise ConfigError("dt_max must be positive")
        # epsilon = 0 is the deterministic limit and is allowed
        if not self.epsilon >= 0:
            raise ConfigError("epsilon must be positive")
        if not 0.0 < self.delta <= 1.0:
            raise ConfigError("delta must lie in (0, 1]")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")
        if not self.c_stab > 0:
            raise ConfigError("c_stab must be positive")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be >= 0")
        if not self.C1 > 0:
            raise ConfigError("C1 must be positive")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise ConfigError("tail_fraction must lie in (0, 1]")
        try:
            validate(self.measure)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    u: SpectralField
    cum_diss: float = 0.0
    cum_trunc: float = 0.0
    n_jumps: int = 0


@dataclass
class RunResult:
    config: SimConfig
    series: DiagnosticsSeries
    final: SpectralField
    jumps: list[JumpEvent]
    snapshots: list[tuple[float, SpectralField]]
    compensator: CompensatorMultiplier
    s2: float
    n_steps: int
    dt: float

    @property
    def V0sq(self) -> float:
        return float(self.series.V2[0])


def stable_dt(n_modes: int, dt_max: float, c_stab: float = C_STAB) -> float:
    return min(dt_max, c_stab / (2.0 * np.pi * n_modes) ** 2)


def _v2(c: np.ndarray, k2: np.ndarray) -> float:
    return float(2.0 * np.sum(k2 * (c.real**2 + c.imag**2)))


def step_flow(
    s: TrajectoryState, dt: float, D: CompensatorMultiplier, drift: bool = True
) -> TrajectoryState:
    """Advance ``dt`` without jumps: half multiplier, SSP-RK3 drift, half multiplier.

    ``cum_trunc`` collects the exact V-norm loss of the two multiplier
    half-steps; ``cum_diss`` adds ``2 dt`` times the trapezoid average of the
    dissipation at the ends of the drift substep.
    """
    c = s.u.coeffs
    k = s.u.wavenumbers
    k2 = (2.0 * np.pi * k) ** 2
    trunc = 0.0
    # a purely imaginary multiplier is a translation: no V-norm loss to account
    damped = bool(np.any(D.d.real))
    if not D.is_zero:
        half = np.exp(0.5 * dt * D.d)
        v_before = _v2(c, k2) if damped else 0.0
        c = half * c
        if damped:
            trunc += v_before - _v2(c, k2)
    diss = 0.0
    if drift and np.any(c):
        u0 = SpectralField(c)
        d0 = dyn.dissipation(u0)
        u1 = u0 + dt * dyn.csf_drift(u0)
        u2 = 0.75 * u0 + 0.25 * (u1 + dt * dyn.csf_drift(u1))
        u3 = (1.0 / 3.0) * u0 + (2.0 / 3.0) * (u2 + dt * dyn.csf_drift(u2))
        c = u3.coeffs
        diss = dt * (d0 + dyn.dissipation(u3))
    if not D.is_zero:
        v_before = _v2(c, k2) if damped else 0.0
        c = half * c
        if damped:
            trunc += v_before - _v2(c, k2)
    if not np.all(np.isfinite(c)):
        raise BlowUpError(f"non-finite state at t={s.t + dt:.6g}")
    return TrajectoryState(
        t=s.t + dt,
        u=SpectralField(c),
        cum_diss=s.cum_diss + diss,
        # multiplier losses are >= 0 mathematically; clip roundoff
        cum_trunc=s.cum_trunc + max(trunc, 0.0),
        n_jumps=s.n_jumps,
    )


def apply_jump(s: TrajectoryState, e: JumpEvent, epsilon: float) -> TrajectoryState:
    return replace(s, t=e.t, u=shift(s.u, epsilon * e.z), n_jumps=s.n_jumps + 1)


def path_seed(seed: int, path: int) -> int:
    """Independent 64-bit seed for ensemble member ``path``."""
    return int(np.random.SeedSequence([int(seed), int(path)]).generate_state(1, np.uint64)[0])


def run(config: SimConfig) -> RunResult:
    """Simulate one trajectory on ``[0, T]``; fully determined by ``config.seed``."""
    N = config.n_modes
    m = config.measure
    D = dyn.compensator(m, config.epsilon, config.delta, N) if config.epsilon > 0 else CompensatorMultiplier.zeros(N)
    if np.any(D.d.real > 0):
        raise AssertionError("compensator has a growing mode")
    _, s2 = small_moments(m, config.delta)
    jumps = sample_jumps(m, config.delta, config.T, int(config.seed))
    dt = stable_dt(N, config.dt_max, config.c_stab)
    log.debug("run: N=%d dt=%.3e jumps=%d", N, dt, len(jumps))

    state = TrajectoryState(0.0, initial_field(config.init, N))
    rec = SeriesRecorder(config.record_l1)
    snapshots: list[tuple[float, SpectralField]] = []

    def record(st: TrajectoryState):
        u = st.u
        row = [st.t, norm_H2(u), norm_V2(u), st.cum_diss, st.cum_trunc, st.n_jumps]
        if config.record_l1:
            row += [norm_L1_dx(u), norm_L1_dxx(u)]
        rec.append(*row)
        if config.snapshot_every and (len(rec) - 1) % config.snapshot_every == 0:
            snapshots.append((st.t, u))

    record(state)
    T = config.T
    i_jump = 0
    n_steps = 0
    since_record = 0
    while state.t < T:
        target = jumps[i_jump].t if i_jump < len(jumps) else T
        h = target - state.t
        landing = h <= dt
        state = step_flow(state, h if landing else dt, D, config.drift)
        n_steps += 1
        since_record += 1
        if not landing:
            # never creep up to a target by roundoff
            if target - state.t <= 1e-12 * dt:
                landing = True
            else:
                if since_record >= config.record_every:
                    record(state)
                    since_record = 0
                continue
        state = replace(state, t=target)
        hit = False
        while i_jump < len(jumps) and jumps[i_jump].t <= target:
            state = apply_jump(state, jumps[i_jump], config.epsilon)
            i_jump += 1
            hit = True
        if hit or target >= T or since_record >= config.record_every:
            record(state)
            since_record = 0
    if config.snapshot_every and (not snapshots or snapshots[-1][0] != state.t):
        snapshots.append((state.t, state.u))

    return RunResult(
        config=config,
        series=rec.finish(),
        final=state.u,
        jumps=jumps,
        snapshots=snapshots,
        compensator=D,
        s2=s2,
        n_steps=n_steps,
        dt=dt,
    )
