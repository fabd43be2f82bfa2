"""Run configuration and deterministic JSON / CSV output."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__

__all__ = ["RunConfig", "ConfigError", "load_config", "parse_config", "write_json", "write_csv", "COMMANDS"]

COMMANDS = ("wave", "sweep", "spectrum", "bands", "simulate", "limits")
SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, message, line=None, col=None):
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)
        self.line, self.col = line, col


@dataclass(frozen=True)
class RunConfig:
    command: str | None = None
    potential: dict = field(default_factory=lambda: {"kind": "fpu_alpha", "a": 1.0, "b": 1.0})
    k2: float = 0.6
    k2_list: list | None = None
    L: float | None = None
    eps_list: list = field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])
    grid: int = 256
    tol: float = 1e-12
    eps0: float = 0.5
    max_iters: int = 20
    speed_form: str = "quadratic"
    output_dir: str = "out"
    # spectrum
    count: int = 6
    # bands
    n_lame: int = 3
    hill_modes: int = 64
    # simulate
    q_periods: int = 3
    periods: float = 50.0
    dt: float = 1e-3
    samples: int = 50
    stride: int = 0
    seed: str = "solved"

    def __post_init__(self):
        if self.command is not None and self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {list(COMMANDS)}, got {self.command!r}")
        if not 0.0 < self.k2 < 1.0:
            raise ConfigError(f"k2 must lie in (0, 1), got {self.k2}")
        if self.grid < 64 or self.grid & (self.grid - 1):
            raise ConfigError(f"grid must be a power of two >= 64, got {self.grid}")
        if self.seed not in ("solved", "cnoidal"):
            raise ConfigError(f"seed must be 'solved' or 'cnoidal', got {self.seed!r}")
        if self.speed_form not in ("quadratic", "linear"):
            raise ConfigError(f"speed_form must be 'quadratic' or 'linear', got {self.speed_form!r}")
        if self.n_lame not in (2, 3):
            raise ConfigError(f"n_lame must be 2 or 3, got {self.n_lame}")

    def canonical(self):
        """Key-sorted compact JSON; identical configs give identical strings.

        ``output_dir`` is left out: where results go is not part of what they are.
        """
        d = asdict(self)
        del d["output_dir"]
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    @property
    def hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


_FLOATS = {"k2", "L", "tol", "eps0", "periods", "dt"}
_INTS = {"grid", "max_iters", "count", "n_lame", "hill_modes", "q_periods", "samples", "stride"}


def _locate(text, key):
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return None, None
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def parse_config(text, command=None):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object", 1, 1)
    known = {f.name for f in fields(RunConfig)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", *_locate(text, key))
    values = {}
    for key, val in raw.items():
        try:
            if key in _FLOATS and val is not None:
                if isinstance(val, bool) or not isinstance(val, (int, float)):
                    raise TypeError
                val = float(val)
            elif key in _INTS:
                if isinstance(val, bool) or not isinstance(val, int):
                    raise TypeError
            elif key in ("eps_list", "k2_list") and val is not None:
                val = [float(v) for v in val]
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key!r}: {val!r}", *_locate(text, key)) from None
        values[key] = val
    if command is not None:
        if values.get("command") not in (None, command):
            raise ConfigError(f"config is for command {values['command']!r}, not {command!r}", *_locate(text, "command"))
        values["command"] = command
    try:
        return RunConfig(**values)
    except ConfigError as exc:
        bad = re.search(r"^(\w+)", str(exc))
        line, col = _locate(text, bad.group(1)) if bad else (None, None)
        raise ConfigError(str(exc), line, col) from None


def load_config(path, command=None):
    return parse_config(Path(path).read_text(encoding="utf-8"), command)


def _clean(obj):
    # JSON has no NaN/inf; encode them as strings so the output stays standard
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def write_json(path, payload, cfg):
    doc = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "config_hash": cfg.hash,
        "config": json.loads(cfg.canonical()),
        "result": _clean(payload),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    return path


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float) or hasattr(v, "dtype"):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows, cfg):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# cnoidal {__version__} config={cfg.hash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path
