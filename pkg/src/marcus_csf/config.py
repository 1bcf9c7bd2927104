"""Flat TOML run configuration.

Every key is top level and typed; unknown keys are rejected.  Defaults::

    n_modes = 64          dt_max = 1e-3        delta = 0.1
    record_every = 10     T = 0.05             epsilon = 1.0
    seed = 0              c_stab = 0.4         drift = true
    record_l1 = false     snapshot_every = 0   C1 = 0.5
    tail_fraction = 0.5

Measure keys: ``atoms = [[z, rate], ...]`` and, for the truncated power-law
density, ``density_c``, ``density_alpha``, ``density_zmax`` (default 1.0) and
``density_sides`` (``"both"``, ``"positive"`` or ``"negative"``).

Initial condition: ``init`` names a preset (``single_mode``, ``two_mode``,
``random_smooth``) with parameters ``init_k``, ``init_amplitude``,
``init_k2``, ``init_amplitude2``, ``init_decay``, ``init_seed``.
"""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

from .integrator import ConfigError, InitSpec, SimConfig
from .levy import LevyMeasureSpec, MeasureError, PowerLawDensity, validate

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["parse_config", "config_from_mapping", "config_to_mapping", "SCHEMA"]

# key -> expected TOML value type
SCHEMA: dict[str, type] = {
    "n_modes": int,
    "T": float,
    "dt_max": float,
    "epsilon": float,
    "delta": float,
    "seed": int,
    "record_every": int,
    "c_stab": float,
    "drift": bool,
    "record_l1": bool,
    "snapshot_every": int,
    "C1": float,
    "tail_fraction": float,
    "atoms": list,
    "density_c": float,
    "density_alpha": float,
    "density_zmax": float,
    "density_sides": str,
    "init": str,
    "init_k": int,
    "init_amplitude": float,
    "init_k2": int,
    "init_amplitude2": float,
    "init_decay": float,
    "init_seed": int,
}

_INIT_KEYS = {
    "init": "preset",
    "init_k": "k",
    "init_amplitude": "amplitude",
    "init_k2": "k2",
    "init_amplitude2": "amplitude2",
    "init_decay": "decay",
    "init_seed": "seed",
}
_DENSITY_KEYS = {"density_c": "c", "density_alpha": "alpha", "density_zmax": "z_max", "density_sides": "sides"}


def _check_type(key: str, value: Any) -> Any:
    want = SCHEMA[key]
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, want):
        raise ConfigError(f"{key}: expected {want.__name__}, got {value!r}")
    return value


def _atoms(value: list) -> tuple[tuple[float, float], ...]:
    out = []
    for item in value:
        if (
            not isinstance(item, list)
            or len(item) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in item)
        ):
            raise ConfigError(f"atoms: each entry must be [z, rate], got {item!r}")
        out.append((float(item[0]), float(item[1])))
    return tuple(out)


def config_from_mapping(data: dict[str, Any]) -> SimConfig:
    unknown = sorted(set(data) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    vals = {k: _check_type(k, v) for k, v in data.items()}

    density = None
    dkeys = {k: vals.pop(k) for k in list(vals) if k in _DENSITY_KEYS}
    if dkeys:
        if "density_c" not in dkeys or "density_alpha" not in dkeys:
            raise ConfigError("density_c and density_alpha are both required for a density")
        density = PowerLawDensity(**{_DENSITY_KEYS[k]: v for k, v in dkeys.items()})
    measure = LevyMeasureSpec(atoms=_atoms(vals.pop("atoms", [])), density=density)
    try:
        validate(measure)
    except MeasureError as exc:
        key = "atoms" if density is None or "atom" in str(exc) else "density"
        raise ConfigError(f"{key}: {exc}") from exc

    ikeys = {_INIT_KEYS[k]: vals.pop(k) for k in list(vals) if k in _INIT_KEYS}
    init = InitSpec(**ikeys)

    return SimConfig(measure=measure, init=init, **vals)


def parse_config(path: str | Path) -> SimConfig:
    """Read and validate a TOML config file; raises :class:`ConfigError`."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: not valid TOML ({exc})") from exc
    return config_from_mapping(data)


def config_to_mapping(cfg: SimConfig) -> dict[str, Any]:
    """Inverse of :func:`config_from_mapping` (round-trips through TOML)."""
    out: dict[str, Any] = {
        "n_modes": cfg.n_modes,
        "T": cfg.T,
        "dt_max": cfg.dt_max,
        "epsilon": cfg.epsilon,
        "delta": cfg.delta,
        "seed": int(cfg.seed),
        "record_every": cfg.record_every,
        "c_stab": cfg.c_stab,
        "drift": cfg.drift,
        "record_l1": cfg.record_l1,
        "snapshot_every": cfg.snapshot_every,
        "C1": cfg.C1,
        "tail_fraction": cfg.tail_fraction,
        "atoms": [[z, r] for z, r in cfg.measure.atoms],
    }
    d = cfg.measure.density
    if d is not None:
        out.update(density_c=d.c, density_alpha=d.alpha, density_zmax=d.z_max, density_sides=d.sides)
    for key, attr in _INIT_KEYS.items():
        out[key] = getattr(cfg.init, attr)
    return out
