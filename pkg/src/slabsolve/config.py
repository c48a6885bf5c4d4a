"""
Experiment configuration files.

A config is an INI file with one section named after the experiment::

    [bratu-solve]
    n = 2
    lam = 1.0
    resolution = 2000

Every key has a typed default, so an empty section (or no file at all)
runs the reference case.  Unknown keys and unparsable values are errors.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field

from .errors import ConfigError

__all__ = ["ExperimentConfig", "SCHEMAS", "EXPERIMENTS", "parse_config", "load_config", "dump_config"]

_SQRT8 = 2.0 * math.sqrt(2.0)


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text):
    return None if text.strip().lower() in ("", "auto", "none") else float(text)


_PARSERS = {"float": float, "int": int, "str": str.strip, "bool": _bool,
            "floats": _floats, "ints": _ints, "opt_float": _opt_float}


def _format(kind, value):
    if value is None:
        return "auto"
    if kind in ("floats", "ints"):
        return ", ".join(repr(v) for v in value)
    if kind == "bool":
        return "true" if value else "false"
    return repr(value) if kind in ("float", "opt_float") else str(value)


# key -> (type, default)
SCHEMAS: dict[str, dict[str, tuple[str, object]]] = {
    "bratu-threshold": {
        "dims": ("ints", (1, 2, 3)),
        "thetas": ("floats", (0.1, 0.25, 0.5, 0.75, 0.9)),
        "n": ("int", 2),
        "theta": ("float", 0.5),
        "audit_theta": ("float", 0.412962),
    },
    "conformal": {
        "d": ("float", _SQRT8),
        "lam": ("float", 0.14),
        "m_max": ("int", 6),
        "resolution": ("float", 16.0),
        "theta": ("opt_float", None),
        "tol": ("float", 1e-8),
    },
    "bratu-solve": {
        "n": ("int", 2),
        "radius": ("float", 1.0),
        "lam": ("float", 1.0),
        "theta": ("float", 0.5),
        "resolution": ("float", 2000.0),
        "tol": ("float", 1e-8),
        "max_iter": ("int", 1000),
    },
    "sublinear-scaling": {
        "p": ("float", 0.5),
        "dims": ("ints", (2, 3, 4, 5, 6, 8, 10, 12, 16)),
        "resolution": ("float", 400.0),
        "tol": ("float", 1e-8),
        "band": ("float", 4.0),
    },
    "lane-emden": {
        "p": ("float", 0.5),
        "q": ("float", 0.5),
        "n": ("int", 2),
        "resolution": ("float", 400.0),
        "slab": ("bool", True),
        "d": ("float", _SQRT8),
        "m_max": ("int", 6),
        "slab_resolution": ("float", 10.0),
        "eta": ("float", 0.1),
        "eta_prime": ("float", 0.1),
        "tol": ("float", 1e-8),
    },
    "staircase": {
        "n": ("int", 2),
        "p": ("float", 0.3),
        "lam": ("float", 1.0),
        "h": ("float", 1.0),
        "resolution": ("float", 400.0),
        "compare_dim": ("int", 18),
        "tol": ("float", 1e-8),
    },
    "slab": {
        "nonlinearity": ("str", "staircase"),
        "p": ("float", 1.0),
        "scheme": ("str", "monotone"),
        "seed": ("str", "zero"),
        "d": ("float", _SQRT8),
        "lam": ("float", 0.05),
        "h": ("float", 0.5),
        "m_max": ("int", 6),
        "resolution": ("float", 10.0),
        "theta": ("opt_float", None),
        "tol": ("float", 1e-8),
    },
    "verify": {
        "quick": ("bool", False),
        "samples": ("int", 25),
        "seed": ("int", 0),
    },
}

EXPERIMENTS = tuple(SCHEMAS)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully defaulted parameters of one experiment run."""

    experiment: str
    params: dict = field(default_factory=dict)
    force: bool = False

    def __getitem__(self, key):
        return self.params[key]

    def digest(self) -> str:
        """SHA-256 of the canonical config text (force flag included)."""
        text = dump_config(self) + f"# force = {self.force}\n"
        return hashlib.sha256(text.encode()).hexdigest()


def _validate(experiment: str, raw: dict, force: bool) -> ExperimentConfig:
    if experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}")
    schema = SCHEMAS[experiment]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"[{experiment}] unknown key(s): {', '.join(unknown)}")
    params = {}
    for key, (kind, default) in schema.items():
        if key not in raw:
            params[key] = default
            continue
        try:
            params[key] = _PARSERS[kind](raw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{experiment}] {key} = {raw[key]!r}: expected {kind} ({exc})") from None
    _check_ranges(experiment, params)
    return ExperimentConfig(experiment, params, force)


def _check_ranges(experiment, params):
    def need(cond, msg):
        if not cond:
            raise ConfigError(f"[{experiment}] {msg}")

    for key in ("resolution", "slab_resolution", "d", "radius", "tol", "band"):
        if key in params:
            need(params[key] > 0, f"{key} must be positive")
    for key in ("m_max", "max_iter", "n", "samples", "compare_dim"):
        if key in params:
            need(params[key] >= (0 if key == "m_max" else 1), f"{key} out of range")
    for key in ("theta", "audit_theta"):
        if params.get(key) is not None:
            need(0 < params[key] < 1, f"{key} must lie in (0, 1)")
    if "thetas" in params:
        need(all(0 < t < 1 for t in params["thetas"]), "thetas must lie in (0, 1)")
    for key in ("dims",):
        if key in params:
            need(len(params[key]) > 0 and min(params[key]) >= 1, "dims must be positive integers")
    if experiment == "slab":
        need(params["scheme"] in ("linear", "contraction", "monotone", "system"), "unknown scheme")
        need(params["seed"] in ("zero", "glued"), "seed must be zero or glued")
        need(params["nonlinearity"] in ("exp", "exp2", "power", "staircase"), "unknown nonlinearity")
    if experiment in ("sublinear-scaling",):
        need(0 < params["p"] <= 0.5, "p must lie in (0, 1/2]")
    if experiment == "lane-emden":
        need(0 < params["p"] <= 0.5 and 0 < params["q"] <= 0.5, "p and q must lie in (0, 1/2]")


def parse_config(text: str, experiment: str, force: bool = False) -> ExperimentConfig:
    """Parse INI text; only the section named ``experiment`` is read."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    others = [s for s in parser.sections() if s != experiment]
    if parser.sections() and experiment not in parser.sections():
        raise ConfigError(f"config has no [{experiment}] section (found: {', '.join(others)})")
    raw = dict(parser[experiment]) if experiment in parser else {}
    return _validate(experiment, raw, force)


def load_config(path, experiment: str, force: bool = False) -> ExperimentConfig:
    """Read ``path``; ``None`` gives the defaults."""
    if path is None:
        return _validate(experiment, {}, force)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, experiment, force)


def dump_config(config: ExperimentConfig) -> str:
    """Canonical INI text; ``parse_config(dump_config(c), c.experiment) == c``."""
    schema = SCHEMAS[config.experiment]
    lines = [f"[{config.experiment}]"]
    lines += [f"{key} = {_format(kind, config.params[key])}" for key, (kind, _) in schema.items()]
    return "\n".join(lines) + "\n"
