"""INI-style run configuration.

Example::

    [metric]
    lambda1 = 2
    lambda2 = 0.5          # or: arnold_lambda = 0.6931471805599453

    [grid]
    n_p = 16
    n_q = 16
    n_z = 64
    fd_order = 2           # z stencil accuracy: 2, 4 or 6

    [flow]
    v = 1
    eta = 0

    [time]
    dt = 0.0078125         # default 0.5 * h_z
    t_end = 2              # default 1
    sample_stride = 1

    [initial]
    # component k_p k_q k_z amplitude [phase]
    mode = p 0 1 0 1.0
    mode = q 1 0 0 1.0 0.25
    divergence_free = true

    [output]
    timeseries = timeseries.csv
    summary = summary.json
    snapshots = false

    [curvature]
    alpha = 0.5
    z = 0

Keys are case-sensitive; ``mode`` is the only key that may repeat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .frame_ops import FD_WEIGHTS, GridSpec
from .induction import InitialCondition, Mode, SimConfig, stable_dt
from .metric import CFlowMetric, from_arnold, new_cflow

SCHEMA = {
    "metric": {"lambda1": "float", "lambda2": "float", "arnold_lambda": "float"},
    "grid": {"n_p": "int", "n_q": "int", "n_z": "int", "fd_order": "int"},
    "flow": {"v": "float", "eta": "float"},
    "time": {"dt": "float", "t_end": "float", "sample_stride": "int"},
    "initial": {"mode": "mode", "divergence_free": "bool"},
    "output": {"timeseries": "str", "summary": "str", "snapshots": "bool", "snapshot_file": "str"},
    "curvature": {"alpha": "float", "z": "float"},
}
REPEATABLE = {("initial", "mode")}
DEFAULT_GRID = (16, 16, 64)


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key:
            where.append(f"key '{key}'")
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


@dataclass
class Entry:
    value: object
    line: int


@dataclass
class RunConfig:
    path: Path | None
    sections: dict[str, dict[str, list[Entry]]] = field(default_factory=dict)

    def _get(self, section, key, default=None):
        entries = self.sections.get(section, {}).get(key)
        return entries[0].value if entries else default

    def _line(self, section, key=None):
        if key and self.sections.get(section, {}).get(key):
            return self.sections[section][key][0].line
        return self.sections.get(section, {}).get("__header__", [Entry(None, None)])[0].line

    def metric(self) -> CFlowMetric:
        if "metric" not in self.sections:
            raise ConfigError("missing [metric] section", key="metric")
        l1 = self._get("metric", "lambda1")
        l2 = self._get("metric", "lambda2")
        arn = self._get("metric", "arnold_lambda")
        if arn is not None and (l1 is not None or l2 is not None):
            key = "lambda1" if l1 is not None else "lambda2"
            raise ConfigError("arnold_lambda and lambda1/lambda2 are mutually exclusive",
                              key=key, line=self._line("metric", key))
        try:
            if arn is not None:
                return from_arnold(arn)
            if l1 is None or l2 is None:
                key = "lambda1" if l1 is None else "lambda2"
                raise ConfigError("metric needs lambda1 and lambda2, or arnold_lambda",
                                  key=key, line=self._line("metric"))
            return new_cflow(l1, l2)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            key = "lambda1" if "lambda1" in str(exc) else "lambda2" if "lambda2" in str(exc) else "arnold_lambda"
            raise ConfigError(str(exc), key=key, line=self._line("metric", key)) from None

    def grid(self) -> GridSpec:
        n = [self._get("grid", k, d) for k, d in zip(("n_p", "n_q", "n_z"), DEFAULT_GRID)]
        try:
            return GridSpec(*n)
        except ValueError as exc:
            key = str(exc).split()[0]
            raise ConfigError(str(exc), key=key, line=self._line("grid", key)) from None

    def fd_order(self) -> int:
        order = self._get("grid", "fd_order", 2)
        if order not in FD_WEIGHTS:
            raise ConfigError(f"fd_order must be one of {sorted(FD_WEIGHTS)}", key="fd_order",
                              line=self._line("grid", "fd_order"))
        return order

    def alpha(self) -> float:
        return self._get("curvature", "alpha", 0.0)

    def curvature_z(self) -> float:
        return self._get("curvature", "z", 0.0)

    def output_names(self) -> dict[str, object]:
        return {
            "timeseries": self._get("output", "timeseries", "timeseries.csv"),
            "summary": self._get("output", "summary", "summary.json"),
            "snapshots": self._get("output", "snapshots", False),
            "snapshot_file": self._get("output", "snapshot_file", "snapshots.npz"),
        }

    def initial(self) -> InitialCondition:
        entries = self.sections.get("initial", {}).get("mode", [])
        ic = InitialCondition(tuple(e.value for e in entries),
                              bool(self._get("initial", "divergence_free", False)))
        if ic.is_empty:
            line = entries[0].line if entries else self._line("initial")
            raise ConfigError("empty initial condition", key="mode", line=line)
        return ic

    def sim_config(self) -> SimConfig:
        m = self.metric()
        grid = self.grid()
        ic = self.initial()
        v = self._get("flow", "v", 1.0)
        eta = self._get("flow", "eta", 0.0)
        if eta < 0:
            raise ConfigError("eta must be >= 0", key="eta", line=self._line("flow", "eta"))
        dt = self._get("time", "dt")
        if dt is None:
            dt = min(0.5 * grid.h_z, stable_dt(grid, v, eta))
        t_end = self._get("time", "t_end", 1.0)
        stride = self._get("time", "sample_stride", 1)
        try:
            return SimConfig(
                metric=m, grid=grid, initial=ic, dt=dt, t_end=t_end, eta=eta, v=v,
                sample_stride=stride, fd_order=self.fd_order(),
                snapshots=bool(self.output_names()["snapshots"]),
            )
        except ValueError as exc:
            msg = str(exc)
            key = next((k for k in ("t_end", "dt", "sample_stride", "eta") if msg.startswith(k)), "dt")
            section = "flow" if key == "eta" else "time"
            raise ConfigError(msg, key=key, line=self._line(section, key)) from None


def _parse_value(kind: str, raw: str, key: str, line: int):
    try:
        if kind == "float":
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError
        if kind == "str":
            if not raw:
                raise ValueError
            return raw
        if kind == "mode":
            parts = raw.split()
            if len(parts) not in (5, 6):
                raise ValueError
            phase = float(parts[5]) if len(parts) == 6 else 0.0
            return Mode(parts[0], tuple(int(x) for x in parts[1:4]), float(parts[4]), phase)
    except ValueError:
        expected = {"mode": "'component k_p k_q k_z amplitude [phase]'"}.get(kind, f"a finite {kind}")
        raise ConfigError(f"cannot parse {raw!r} as {expected}", key=key, line=line) from None
    raise AssertionError(kind)


def parse_config_text(text: str, path: Path | None = None) -> RunConfig:
    cfg = RunConfig(path)
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", line=lineno)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", key=section, line=lineno)
            if section in cfg.sections:
                raise ConfigError(f"duplicate section [{section}]", key=section, line=lineno)
            cfg.sections[section] = {"__header__": [Entry(None, lineno)]}
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if section is None:
            raise ConfigError("key outside of any section", key=key, line=lineno)
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key in [{section}]", key=key, line=lineno)
        entries = cfg.sections[section].setdefault(key, [])
        if entries and (section, key) not in REPEATABLE:
            raise ConfigError("duplicate key", key=key, line=lineno)
        entries.append(Entry(_parse_value(SCHEMA[section][key], value, key, lineno), lineno))
    return cfg


def load_config(path) -> RunConfig:
    """Read and parse a config file; I/O errors propagate as ``OSError``."""
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), path)
