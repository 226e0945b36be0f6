"""On-disk formats: flat key-value config, snapshot and time-series CSV,
run manifest and checkpoints.

All floats are written with 17 significant digits, which round-trips
float64 exactly; resuming a checkpoint therefore reproduces the
uninterrupted run bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curve import InterfaceCurve, PHYSICAL, TILDE
from .diagnostics import DiagnosticsRecord
from .errors import ConfigError, GridError
from .evolution import OMEGA, PHI, SheetState, StepperConfig, StopConditions
from .spectral import Grid

FLOAT_FMT = "{:.17g}"


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


# ----------------------------------------------------------------------------
# run configuration
# ----------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Everything a simulation needs, round-trippable through the flat
    key-value config format."""

    formulation: str = "phi"            # phi | omega
    domain: str = PHYSICAL              # physical | tilde
    n_points: int = 128
    dt: float = 1e-3
    t_end: float = 1.0
    gravity: float = 1.0
    filter_threshold: float = 1e-13
    tangential: str = "uniform"         # uniform | none
    preset: str = "flat_rest"
    preset_params: dict = field(default_factory=dict)
    output_dir: str = "run_output"
    record_every: int = 1
    snapshot_every: int = 50
    checkpoint_every: int = 200
    stop_splash_gap: float = 1e-4
    stop_q_margin: float = 1e-2
    stop_sigma_min: float = -1e-3
    stop_arc_chord_max: float = 1e6

    def stepper(self) -> StepperConfig:
        return StepperConfig(
            dt=self.dt, t_end=self.t_end, filter_threshold=self.filter_threshold,
            gravity=self.gravity, tangential=self.tangential,
            record_every=self.record_every, snapshot_every=self.snapshot_every,
            stop=StopConditions(splash_gap=self.stop_splash_gap,
                                q_margin=self.stop_q_margin,
                                sigma_min_stop=self.stop_sigma_min,
                                arc_chord_max=self.stop_arc_chord_max))

    def to_text(self) -> str:
        lines = ["# splashwave run configuration"]
        for key in ("formulation", "domain", "preset", "output_dir", "tangential"):
            lines.append(f"{key} = {getattr(self, key)}")
        for key in ("n_points", "record_every", "snapshot_every", "checkpoint_every"):
            lines.append(f"{key} = {getattr(self, key)}")
        for key in ("dt", "t_end", "gravity", "filter_threshold", "stop_splash_gap",
                    "stop_q_margin", "stop_sigma_min", "stop_arc_chord_max"):
            lines.append(f"{key} = {_fmt(getattr(self, key))}")
        for pkey, pval in sorted(self.preset_params.items()):
            lines.append(f"preset.{pkey} = {_fmt(pval)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        ints = {"n_points", "record_every", "snapshot_every", "checkpoint_every"}
        floats = {"dt", "t_end", "gravity", "filter_threshold", "stop_splash_gap",
                  "stop_q_margin", "stop_sigma_min", "stop_arc_chord_max"}
        strings = {"formulation", "domain", "preset", "output_dir", "tangential"}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                if key.startswith("preset."):
                    cfg.preset_params[key[len("preset."):]] = float(value)
                elif key in ints:
                    setattr(cfg, key, int(value))
                elif key in floats:
                    setattr(cfg, key, float(value))
                elif key in strings:
                    setattr(cfg, key, value)
                else:
                    raise ConfigError(f"line {lineno}: unknown key {key!r}")
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
        if cfg.formulation not in ("phi", "omega"):
            raise ConfigError(f"formulation must be phi or omega, got {cfg.formulation!r}")
        if cfg.domain not in (PHYSICAL, TILDE):
            raise ConfigError(f"domain must be physical or tilde, got {cfg.domain!r}")
        return cfg

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def read_config(path) -> RunConfig:
    return RunConfig.from_text(Path(path).read_text())


def write_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(cfg.to_text())


# ----------------------------------------------------------------------------
# snapshots
# ----------------------------------------------------------------------------

def write_snapshot(state: SheetState, path) -> None:
    """Snapshot CSV: alpha,z1,z2,omega[,phi] with a tagged header."""
    var_col = "omega" if state.variable == OMEGA else "phi"
    lines = [f"# domain={state.domain} variable={state.variable} "
             f"time={_fmt(state.time)} n={state.curve.n}",
             f"alpha,z1,z2,{var_col}"]
    for a, x, y, v in zip(state.curve.grid.alpha, state.curve.z1, state.curve.z2,
                          state.values):
        lines.append(",".join(_fmt(t) for t in (a, x, y, v)))
    Path(path).write_text("\n".join(lines) + "\n")


def read_snapshot(path) -> SheetState:
    text = Path(path).read_text().strip().splitlines()
    if len(text) < 3 or not text[0].startswith("#"):
        raise ConfigError(f"{path}: not a snapshot file")
    meta = dict(item.split("=", 1) for item in text[0][1:].split())
    header = text[1].split(",")
    if header[:3] != ["alpha", "z1", "z2"] or header[3] not in ("omega", "phi"):
        raise ConfigError(f"{path}: unexpected snapshot columns {header}")
    rows = []
    for lineno, line in enumerate(text[2:], start=3):
        parts = line.split(",")
        if len(parts) != len(header):
            raise ConfigError(f"{path}:{lineno}: expected {len(header)} columns")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    data = np.array(rows)
    n = data.shape[0]
    try:
        grid = Grid(n)
    except GridError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if np.max(np.abs(data[:, 0] - grid.alpha)) > 1e-12:
        raise ConfigError(f"{path}: alpha column is not the canonical grid")
    curve = InterfaceCurve(grid, data[:, 1], data[:, 2], meta.get("domain", PHYSICAL))
    variable = OMEGA if header[3] == "omega" else PHI
    return SheetState(curve=curve, variable=variable, values=data[:, 3],
                      time=float(meta.get("time", 0.0)))


# ----------------------------------------------------------------------------
# time series
# ----------------------------------------------------------------------------

class TimeSeriesWriter:
    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w")
        self._fh.write(",".join(DiagnosticsRecord.CSV_COLUMNS) + "\n")

    def append(self, record: DiagnosticsRecord) -> None:
        self._fh.write(",".join(_fmt(v) for v in record.as_row()) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def read_time_series(path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(p) for p in line.split(",")] for line in lines[1:]])
    if data.ndim == 1:
        data = data.reshape(1, -1)
    return {name: data[:, j] for j, name in enumerate(header)}


# ----------------------------------------------------------------------------
# checkpoints and manifest
# ----------------------------------------------------------------------------

def write_checkpoint(path, state: SheetState, cfg: RunConfig, step: int,
                     dt_current: float, records_tail: list[DiagnosticsRecord]) -> None:
    payload = {
        "step": step,
        "dt_current": dt_current,
        "time": state.time,
        "domain": state.domain,
        "variable": state.variable,
        "n": state.curve.n,
        "z1": [_fmt(v) for v in state.curve.z1],
        "z2": [_fmt(v) for v in state.curve.z2],
        "values": [_fmt(v) for v in state.values],
        "config": cfg.to_text(),
        "records_tail": [[_fmt(v) for v in r.as_row()] for r in records_tail[-10:]],
    }
    Path(path).write_text(json.dumps(payload, indent=1))


def read_checkpoint(path) -> tuple[SheetState, RunConfig, int, float]:
    payload = json.loads(Path(path).read_text())
    grid = Grid(payload["n"])
    curve = InterfaceCurve(grid, np.array([float(v) for v in payload["z1"]]),
                           np.array([float(v) for v in payload["z2"]]),
                           payload["domain"])
    state = SheetState(curve=curve, variable=payload["variable"],
                       values=np.array([float(v) for v in payload["values"]]),
                       time=float(payload["time"]))
    cfg = RunConfig.from_text(payload["config"])
    return state, cfg, int(payload["step"]), float(payload["dt_current"])


def write_manifest(path, cfg: RunConfig, result, wall_time: float,
                   artifacts: dict[str, str]) -> None:
    payload = {
        "config_hash": cfg.digest(),
        "config": cfg.to_text(),
        "termination_reason": result.reason,
        "detail": result.detail,
        "final_time": result.final_state.time,
        "steps_accepted": result.steps_accepted,
        "steps_rejected": result.steps_rejected,
        "dt_final": result.dt_final,
        "wall_time_seconds": wall_time,
        "artifacts": artifacts,
    }
    Path(path).write_text(json.dumps(payload, indent=1))
