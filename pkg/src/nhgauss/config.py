"""Run configuration: a flat ``key = value`` text format plus ``--set`` overrides.

Example::

    # noisy binary trace at J/Gamma = 2.3
    topology = binary
    J = 2.3
    K = 1
    gamma = 1e-3
    n_th = 10
    r = 1
    t_end = 1.2
    measure = EN

Keys
----
topology           binary | ternary
J, K, gamma, n_th, r
                   system parameters in units of Gamma
noise              on | off (off zeroes diffusion and gamma)
squeezed_modes     1-based pair carrying the initial TMSV (default 1,2 / 1,3)
squeeze_sign       -1 | 1, sign of <q_i q_j> in the initial TMSV
t_end, dt, stride  integration horizon, RK4 step, output decimation
t                  sampling time for sweeps (when Gamma_t is not an axis) and wigner
measure            comma list of EN, EN_prime, S
mode               1-based mode for EN_prime
h, g               comma lists of three inseparability weights
include_covariance on | off, append V entries to evolve output
axis1, axis2       ``name:start:stop:count[:lin|log]`` with name in J, t, n_th
plane              two of q1, p1, q2, p2, ... for wigner slices (default q1,q2)
x_grid, y_grid     ``start:stop:count`` grids for the wigner plane axes
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from nhgauss.measures import CoefficientSet
from nhgauss.model import SystemSpec, Topology

COMMANDS = ("spectrum", "ep", "evolve", "sweep", "wigner")
SWEEP_AXES = ("J", "t", "n_th")
MEASURES = ("EN", "EN_prime", "S")


class ConfigError(ValueError):
    def __init__(self, detail: str, field_name: str | None = None, source: str | None = None):
        parts = [p for p in (source, f"field '{field_name}'" if field_name else None) if p]
        super().__init__(": ".join(parts + [detail]))
        self.detail = detail
        self.field_name = field_name
        self.source = source


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int
    linear: bool = True

    def values(self) -> np.ndarray:
        if self.linear:
            return np.linspace(self.start, self.stop, self.count)
        return np.geomspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class Measure:
    kind: str
    mode: int = 0
    coeffs: CoefficientSet = field(default_factory=CoefficientSet.standard)

    @property
    def column(self) -> str:
        if self.kind == "EN":
            return "E_N"
        if self.kind == "EN_prime":
            return f"E_N_prime_mode{self.mode + 1}"
        return "S"


@dataclass(frozen=True)
class RunConfig:
    command: str = "evolve"
    topology: Topology = Topology.BINARY
    J: float = 1.118
    K: float = 1.0
    gamma: float = 1e-3
    n_th: float = 10.0
    r: float = 1.0
    noise: bool = True
    squeezed_modes: Optional[tuple[int, int]] = None  # 0-based
    squeeze_sign: int = -1
    t_end: float = 1.0
    dt: float = 1e-4
    stride: int = 1
    t: float = 0.5
    measures: tuple[Measure, ...] = (Measure("EN"),)
    include_covariance: bool = False
    axis1: Optional[Axis] = None
    axis2: Optional[Axis] = None
    plane: tuple[int, int] = (0, 2)
    x_grid: Axis = Axis("x", -6.0, 6.0, 121)
    y_grid: Axis = Axis("y", -6.0, 6.0, 121)

    @property
    def spec(self) -> SystemSpec:
        return SystemSpec(self.topology, self.J, self.K, self.gamma, self.n_th, self.r)


# ---------------------------------------------------------------------------
# parsing

def _float(key, text):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", key) from None
    if not math.isfinite(value):
        raise ConfigError("must be finite", key)
    return value


def _int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", key) from None


def _bool(key, text):
    low = text.lower()
    if low in ("on", "true", "yes", "1"):
        return True
    if low in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"expected on/off, got {text!r}", key)


def _list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _range(key, text, name=None):
    parts = text.split(":")
    if name is None:
        if len(parts) < 4:
            raise ConfigError(f"expected name:start:stop:count, got {text!r}", key)
        name, parts = parts[0].strip(), parts[1:]
    if len(parts) not in (3, 4):
        raise ConfigError(f"malformed grid {text!r}", key)
    start, stop = _float(key, parts[0]), _float(key, parts[1])
    count = _int(key, parts[2])
    linear = True
    if len(parts) == 4:
        mode = parts[3].strip().lower()
        if mode not in ("lin", "linear", "log"):
            raise ConfigError(f"grid spacing must be lin or log, got {mode!r}", key)
        linear = mode != "log"
        if not linear and (start <= 0 or stop <= 0):
            raise ConfigError("log grids need positive bounds", key)
    if count < 2:
        raise ConfigError("grid count must be >= 2", key)
    return Axis(name, start, stop, count, linear)


def _quadrature_index(key, label):
    label = label.strip().lower()
    if len(label) < 2 or label[0] not in "qp" or not label[1:].isdigit():
        raise ConfigError(f"unknown quadrature {label!r}", key)
    mode = int(label[1:]) - 1
    if mode < 0:
        raise ConfigError(f"unknown quadrature {label!r}", key)
    return 2 * mode + (label[0] == "p")


def parse_lines(lines: Iterable[str], source: str = "<config>") -> dict[str, tuple[str, str]]:
    """Return ``{key: (value, location)}``; later keys override earlier ones."""
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}", source=source)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key", source=source)
        out[key] = (value, f"{source}:{lineno}")
    return out


_SCALARS = {"J", "K", "gamma", "n_th", "r", "t_end", "dt", "t"}


def build_config(command: str, entries: dict[str, tuple[str, str]]) -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    kw: dict = {"command": command}
    entries = dict(entries)
    loc = {k: v[1] for k, v in entries.items()}
    values = {k: v[0] for k, v in entries.items()}

    def fail(key, msg):
        raise ConfigError(msg, key, loc.get(key))

    known = ({f.name for f in fields(RunConfig)} - {"command", "measures"}) | {"measure", "mode", "h", "g"}
    for key in values:
        if key not in known:
            fail(key, "unknown key")

    try:
        for key in _SCALARS & values.keys():
            kw[key] = _float(key, values[key])
        if "topology" in values:
            try:
                kw["topology"] = Topology(values["topology"].lower())
            except ValueError:
                fail("topology", f"expected binary or ternary, got {values['topology']!r}")
        for key in ("noise", "include_covariance"):
            if key in values:
                kw[key] = _bool(key, values[key])
        if "stride" in values:
            kw["stride"] = _int("stride", values["stride"])
        if "squeeze_sign" in values:
            kw["squeeze_sign"] = _int("squeeze_sign", values["squeeze_sign"])
        if "squeezed_modes" in values:
            pair = [_int("squeezed_modes", v) - 1 for v in _list(values["squeezed_modes"])]
            if len(pair) != 2:
                fail("squeezed_modes", "expected two mode labels")
            kw["squeezed_modes"] = tuple(pair)
        for key in ("axis1", "axis2"):
            if key in values:
                kw[key] = _range(key, values[key])
        for key in ("x_grid", "y_grid"):
            if key in values:
                kw[key] = _range(key, values[key], name=key[0])
        if "plane" in values:
            labels = _list(values["plane"])
            if len(labels) != 2:
                fail("plane", "expected two quadrature labels")
            kw["plane"] = tuple(_quadrature_index("plane", lab) for lab in labels)

        mode = _int("mode", values["mode"]) - 1 if "mode" in values else 0
        coeffs = CoefficientSet.standard()
        if "h" in values or "g" in values:
            h = [_float("h", v) for v in _list(values["h"])] if "h" in values else list(coeffs.h)
            g = [_float("g", v) for v in _list(values["g"])] if "g" in values else list(coeffs.g)
            try:
                coeffs = CoefficientSet(tuple(h), tuple(g))
            except ValueError as exc:
                fail("h" if "h" in values else "g", str(exc))
        if "measure" in values:
            kinds = _list(values["measure"])
            for kind in kinds:
                if kind not in MEASURES:
                    fail("measure", f"unknown measure {kind!r}; expected {', '.join(MEASURES)}")
            kw["measures"] = tuple(Measure(kind, mode, coeffs) for kind in kinds)
        else:
            ternary = kw.get("topology", Topology.BINARY) is Topology.TERNARY
            kw["measures"] = (Measure("EN_prime" if ternary else "EN", mode, coeffs),)
    except ConfigError as exc:
        if exc.source is None and exc.field_name in loc:
            raise ConfigError(exc.detail, exc.field_name, loc[exc.field_name]) from None
        raise

    cfg = RunConfig(**kw)
    validate(cfg, loc)
    return cfg


def validate(cfg: RunConfig, loc: dict[str, str] | None = None) -> None:
    loc = loc or {}

    def fail(key, msg):
        raise ConfigError(msg, key, loc.get(key))

    for key in ("J", "K", "gamma", "n_th", "r"):
        if getattr(cfg, key) < 0:
            fail(key, "must be >= 0")
    if not cfg.dt > 0:
        fail("dt", "must be > 0")
    if cfg.stride < 1:
        fail("stride", "must be >= 1")
    if cfg.t_end < 0:
        fail("t_end", "must be >= 0")
    if cfg.t < 0:
        fail("t", "must be >= 0")
    if cfg.squeeze_sign not in (-1, 1):
        fail("squeeze_sign", "must be -1 or 1")
    n = cfg.topology.n_modes
    if cfg.squeezed_modes is not None:
        a, b = cfg.squeezed_modes
        if a == b or not (0 <= a < n and 0 <= b < n):
            fail("squeezed_modes", f"need two distinct modes in 1..{n}")
    for m in cfg.measures if cfg.command in ("evolve", "sweep") else ():
        if m.kind == "EN" and cfg.topology is not Topology.BINARY:
            fail("measure", "EN is the two-mode negativity; use EN_prime or S for ternary")
        if m.kind == "S" and cfg.topology is not Topology.TERNARY:
            fail("measure", "S needs the ternary topology")
        if m.kind == "EN_prime" and not 0 <= m.mode < n:
            fail("mode", f"mode must be in 1..{n}")
    for i in cfg.plane:
        if i >= 2 * n:
            fail("plane", f"quadrature outside the {n}-mode phase space")
    if cfg.plane[0] == cfg.plane[1]:
        fail("plane", "plane coordinates must differ")

    if cfg.command == "spectrum":
        if cfg.axis1 is None or cfg.axis1.name != "J":
            fail("axis1", "spectrum needs axis1 = J:start:stop:count")
    if cfg.command == "sweep":
        if cfg.axis1 is None or cfg.axis2 is None:
            fail("axis1" if cfg.axis1 is None else "axis2", "sweep needs axis1 and axis2")
        for key, ax in (("axis1", cfg.axis1), ("axis2", cfg.axis2)):
            if ax.name not in SWEEP_AXES:
                fail(key, f"sweep axis must be one of {', '.join(SWEEP_AXES)}")
            if min(ax.start, ax.stop) < 0:
                fail(key, "axis values must be >= 0")
        if cfg.axis1.name == cfg.axis2.name:
            fail("axis2", "sweep axes must differ")


def load_config(command: str, path: str | Path | None = None, overrides: Iterable[str] = ()) -> RunConfig:
    entries: dict[str, tuple[str, str]] = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", source=str(path)) from None
        entries.update(parse_lines(text.splitlines(), str(path)))
    for i, item in enumerate(overrides, start=1):
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}", source=f"--set #{i}")
        entries.update(parse_lines([item], f"--set #{i}"))
    return build_config(command, entries)


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    new = replace(cfg, **changes)
    validate(new)
    return new
