"""Run configuration: JSON-compatible text with per-command defaults."""

from __future__ import annotations

import copy
import json
import re
from dataclasses import asdict, dataclass, field, fields
from typing import Any

COMMANDS = (
    "verify-norm",
    "verify-remainder",
    "verify-clt",
    "verify-bias",
    "verify-risk",
    "recover",
    "estimate",
    "decompose",
)

_SPIKED_50 = {"kind": "spiked", "s": [2.0], "sigma": 1.0, "p": 50}

# Every field not listed for a command falls back to the dataclass default.
COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "verify-norm": {
        "model": {"kind": "identity"},
        "n": 500,
        "R": 200,
        "p_values": [10, 20, 50, 100],
    },
    "verify-remainder": {
        "model": {"kind": "spiked", "s": [2.0], "sigma": 1.0, "p": 20},
        "n_values": [500, 1000, 2000],
        "R": 2000,
        "directions": [
            {"name": "theta,e2", "u": "theta", "v": "e2"},
            {"name": "theta,theta", "u": "theta", "v": "theta"},
        ],
    },
    "verify-clt": {
        "model": _SPIKED_50,
        "n": 2000,
        "R": 2000,
        "directions": [
            {"name": "theta,e2", "u": "theta", "v": "e2"},
            {"name": "theta,theta", "u": "theta", "v": "theta"},
        ],
    },
    "verify-bias": {
        "model": _SPIKED_50,
        "n": 200,
        "R": 5000,
        "p_values": [50, 100],
        "n_values": [500, 2000],
        "estimator_R": 500,
        "oracle_R": 5000,
        "max_nonseparated": 1.0,
    },
    "verify-risk": {
        "model": _SPIKED_50,
        "n_values": [4000],
        "R": 500,
    },
    "recover": {
        "model": {"kind": "spiked", "s": [2.0], "sigma": 1.0, "p": 200, "sparse_k": 5},
        "n": 1000,
        "R": 400,
        "n_values": [1000, 2000, 4000],
        "sweep_R": 200,
        "calibration_R": 200,
    },
    "estimate": {"c_gamma": 1.0},
    "decompose": {},
}


@dataclass
class RunConfig:
    """Validated configuration for one CLI run.

    ``model`` is a model description as produced by ``CovarianceModel.to_dict``
    (plus ``{"kind": "identity"}`` for sweeps over ``p``).  Directions are
    ``{"name", "u", "v"}`` with vectors given as ``"theta"``, ``"theta<j>"``
    (eigenvector of cluster ``j``), ``"e<k>"`` (coordinate vector, 1-based) or
    ``{"file": path}``.  ``c_gamma = null`` asks ``recover`` to calibrate.
    """

    command: str
    model: dict[str, Any] | None = None
    n: int | None = None
    R: int = 200
    seed: int = 0
    r: int = 1
    directions: list[dict[str, Any]] = field(default_factory=list)
    cluster_tol: float = 1e-8
    nodes: int = 64
    c_gamma: float | None = None
    t: float = 3.0
    p_values: list[int] = field(default_factory=list)
    n_values: list[int] = field(default_factory=list)
    oracle_R: int = 5000
    estimator_R: int = 500
    calibration_R: int = 200
    calibration_seed: int | None = None
    sweep_R: int = 200
    max_nonseparated: float = 0.01
    input: str | None = None
    out: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def echo(self) -> dict[str, Any]:
        """Configuration as recorded in reports; the output location is not part of it."""
        d = self.to_dict()
        d.pop("out")
        return d


_TYPES: dict[str, tuple[type, ...]] = {
    "command": (str,),
    "model": (dict, type(None)),
    "n": (int, type(None)),
    "R": (int,),
    "seed": (int,),
    "r": (int,),
    "directions": (list,),
    "cluster_tol": (float, int),
    "nodes": (int,),
    "c_gamma": (float, int, type(None)),
    "t": (float, int),
    "p_values": (list,),
    "n_values": (list,),
    "oracle_R": (int,),
    "estimator_R": (int,),
    "calibration_R": (int,),
    "calibration_seed": (int, type(None)),
    "sweep_R": (int,),
    "max_nonseparated": (float, int),
    "input": (str, type(None)),
    "out": (str, type(None)),
}

_POSITIVE_INT = {"R", "r", "oracle_R", "estimator_R", "calibration_R", "sweep_R"}


class ConfigError(ValueError):
    pass


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _where(text: str, key: str) -> str:
    line = _line_of(text, key)
    return f"line {line}, field {key!r}" if line else f"field {key!r}"


def parse_config(text: str, command: str | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Parse JSON text into a ``RunConfig`` with per-command defaults filled in.

    ``command`` (from the CLI subcommand) is used when the text has none and
    must agree with it otherwise.  ``overrides`` (e.g. ``--seed``) win over
    the text.
    """
    text = text if text.strip() else "{}"
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{_where(text, key)}: unknown key {key!r}")
    if command is not None:
        if "command" in raw and raw["command"] != command:
            raise ConfigError(f"{_where(text, 'command')}: config is for {raw['command']!r}, not {command!r}")
        raw["command"] = command
    if "command" not in raw:
        raise ConfigError("missing required field 'command'")
    if raw["command"] not in COMMANDS:
        raise ConfigError(f"{_where(text, 'command')}: unknown command {raw['command']!r}")
    values = copy.deepcopy(COMMAND_DEFAULTS[raw["command"]])
    values.update(raw)
    values.update(overrides or {})
    for key, value in values.items():
        allowed = _TYPES[key]
        if isinstance(value, bool) or not isinstance(value, allowed):
            names = "/".join(t.__name__ for t in allowed)
            raise ConfigError(f"{_where(text, key)}: expected {names}, got {type(value).__name__}")
    cfg = RunConfig(**values)
    _validate(cfg, text)
    return cfg


def _validate(cfg: RunConfig, text: str) -> None:
    def fail(key: str, msg: str):
        raise ConfigError(f"{_where(text, key)}: {msg}")

    if cfg.n is not None and cfg.n < 1:
        fail("n", f"sample size must be >= 1, got {cfg.n}")
    for key in _POSITIVE_INT:
        if getattr(cfg, key) < 1:
            fail(key, "must be >= 1")
    if cfg.seed < 0 or cfg.seed >= 2**64:
        fail("seed", "must be an unsigned 64-bit integer")
    if cfg.nodes < 8:
        fail("nodes", "quadrature needs at least 8 nodes")
    if cfg.cluster_tol <= 0:
        fail("cluster_tol", "must be > 0")
    if cfg.t <= 0:
        fail("t", "must be > 0")
    if cfg.c_gamma is not None and cfg.c_gamma < 0:
        fail("c_gamma", "must be >= 0")
    if not 0 <= cfg.max_nonseparated <= 1:
        fail("max_nonseparated", "must lie in [0, 1]")
    for key in ("p_values", "n_values"):
        vals = getattr(cfg, key)
        if any(isinstance(v, bool) or not isinstance(v, int) or v < 1 for v in vals):
            fail(key, "entries must be positive integers")
    for d in cfg.directions:
        if not isinstance(d, dict) or set(d) - {"name", "u", "v"} or not {"u", "v"} <= set(d):
            fail("directions", "each direction needs 'u' and 'v' (and optionally 'name')")
    if cfg.command in ("estimate", "decompose") and cfg.input is None:
        fail("input", f"{cfg.command} needs an input CSV file")
    if cfg.command not in ("estimate", "decompose"):
        if cfg.model is None:
            fail("model", "a model description is required")
        if "kind" not in cfg.model:
            fail("model", "model needs a 'kind'")
        if cfg.n is None and not cfg.n_values:
            fail("n", "a sample size is required")


def emit_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n"
