"""Trajectory files: CSV series, jump logs, key-value reports and SVG plots."""
from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .diagnostics import COLUMNS, L1_COLUMNS, DiagnosticsSeries
from .levy import JumpEvent

__all__ = [
    "CSV_HEADER",
    "write_series_csv",
    "read_series_csv",
    "write_jumps",
    "read_jumps",
    "write_kv",
    "read_kv",
    "sha256_file",
    "plot_decay_svg",
]

CSV_HEADER = ",".join(COLUMNS)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    # repr of a Python float is the shortest string that round-trips
    return repr(float(x))


def write_series_csv(path: str | Path, s: DiagnosticsSeries) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(s.columns) + "\n")
        for row in s.rows():
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_series_csv(path: str | Path) -> DiagnosticsSeries:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header[:6]) != COLUMNS or tuple(header[6:]) not in ((), L1_COLUMNS):
            raise ValueError(f"{path}: unexpected header {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        data = np.zeros((0, len(header)))
    return DiagnosticsSeries(**{name: data[:, i] for i, name in enumerate(header)})


def write_jumps(path: str | Path, jumps: Iterable[JumpEvent]) -> None:
    with open(path, "w", newline="\n") as fh:
        for e in jumps:
            fh.write(f"{e.t!r} {e.z!r}\n")


def read_jumps(path: str | Path) -> list[JumpEvent]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                t, z = line.split()
                out.append(JumpEvent(float(t), float(z)))
    return out


def _kv_value(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_kv_value(x) for x in v) + "]"
    return str(v)


def write_kv(path: str | Path, items: Iterable[tuple[str, Any]]) -> None:
    """One ``key = value`` per line, in the given order."""
    with open(path, "w", newline="\n") as fh:
        for k, v in items:
            fh.write(f"{k} = {_kv_value(v)}\n")


def read_kv(path: str | Path) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for line in fh:
            if " = " in line:
                k, v = line.rstrip("\n").split(" = ", 1)
                out[k] = v
    return out


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def plot_decay_svg(path: str | Path, s: DiagnosticsSeries, k1: float, title: str = "") -> None:
    """Log-scale H2 and V2 against time with the ``H2(0) exp(-k1 t)`` bound."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "marcus-csf"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        tiny = np.finfo(float).tiny
        ax.semilogy(s.t, np.maximum(s.H2, tiny), label=r"$\|u\|_H^2$")
        ax.semilogy(s.t, np.maximum(s.V2, tiny), label=r"$\|u\|_V^2$")
        ax.semilogy(s.t, s.H2[0] * np.exp(-k1 * s.t), "k--", lw=1, label=r"$\|u_0\|_H^2 e^{-k_1 t}$")
        ax.set_xlabel("t")
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
