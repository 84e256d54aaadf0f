"""Suite configuration: an INI file whose keys are typed by the defaults below.

Every key has a default; a file only needs the values it changes. Unknown
sections or keys are rejected with :class:`ConfigError`, which names the
offending ``section.key``. Lists are comma separated.
"""
from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

from .exceptions import ConfigError

__all__ = ["DEFAULTS", "SuiteConfig", "load_config", "default_config_text"]

DEFAULTS = {
    "suite": {"checks": "all", "seed": 20240601, "out_dir": "lipdist-report"},
    "moebius": {"samples": 1000, "involution_dims": [1, 2, 5], "norm_dims": [1, 2, 3, 5],
                "involution_tolerance": 1e-10, "centre_tolerance": 1e-12, "norm_tolerance": 1e-8},
    "schwarz_pick": {"maps": 200, "source_dims": [1, 2], "target_dims": [1, 2, 3], "max_degree": 3,
                     "tolerance": 1e-9},
    "quasi_hyperbolic": {"spacing": 1.0 / 512, "radii": [0.3, 0.6, 0.9], "relative_tolerance": 0.02},
    "uniform": {"pairs": 1000, "c": 2.05, "alphas": [0.25, 0.5, 0.75], "integral_c": 2.0},
    "hardy_littlewood": {"alphas": [0.25, 0.5, 0.75], "pairs": 10000, "grid_spacing": 1.0 / 256, "c": 2.0},
    "regularity": {"maps": 10, "centers": 20, "degree": 4, "tolerance": 1e-3},
    "dyakonov": {"maps": 20, "alphas": [0.4, 0.6], "pairs": 2000, "centers": 20, "c": 2.0},
    "triangle": {"pairs": 1000},
    "frechet": {"maps": 5, "points": 50, "tolerance": 1e-3},
    "propositions": {"alphas": [0.25, 0.5, 0.75], "pairs": 4000, "bloch_points": 40, "centers": 20,
                     "certificate_pairs": 100, "c": 2.0},
    "main_theorem": {"pairs": 4000, "centers": 20, "certificate_pairs": 60, "c": 2.0},
    "tolerance": {"slack": 0.05},
}

# keys that must be strictly positive (counts, spacings, constants)
_NONNEGATIVE = {("suite", "seed")}


def _parse(section, key, text):
    default = DEFAULTS[section][key]
    try:
        if isinstance(default, list):
            kind = type(default[0])
            items = [t.strip() for t in text.split(",") if t.strip()]
            value = [kind(t) for t in items]
            if not value:
                raise ValueError("empty list")
        elif isinstance(default, bool):
            value = text.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(default, (int, float)):
            value = type(default)(text.strip())
        else:
            value = text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {section}.{key}: {text!r} ({exc})", key=f"{section}.{key}") from None
    nums = value if isinstance(value, list) else [value]
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in nums):
        bound_ok = all(v >= 0 for v in nums) if (section, key) in _NONNEGATIVE else all(v > 0 for v in nums)
        if not bound_ok:
            raise ConfigError(f"{section}.{key} must be positive", key=f"{section}.{key}")
    return value


def _format(value):
    if isinstance(value, list):
        return ", ".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


@dataclass
class SuiteConfig:
    """Resolved configuration: every section with every key, typed."""

    values: dict = field(default_factory=lambda: json.loads(json.dumps(DEFAULTS)))

    def __getitem__(self, section):
        return self.values[section]

    @property
    def seed(self):
        return int(self.values["suite"]["seed"])

    @property
    def out_dir(self):
        return self.values["suite"]["out_dir"]

    def selected(self, available):
        """Names of the selected checks, validated against ``available``, in sorted order."""
        text = self.values["suite"]["checks"].strip()
        if text == "all":
            return sorted(available)
        names = [t.strip() for t in text.split(",") if t.strip()]
        unknown = [n for n in names if n not in available]
        if unknown:
            raise ConfigError(f"unknown check {unknown[0]!r}", key="suite.checks")
        return sorted(set(names))

    def with_overrides(self, seed=None, out_dir=None):
        values = json.loads(json.dumps(self.values))
        if seed is not None:
            if int(seed) < 0:
                raise ConfigError("seed must be nonnegative", key="suite.seed")
            values["suite"]["seed"] = int(seed)
        if out_dir is not None:
            values["suite"]["out_dir"] = str(out_dir)
        return SuiteConfig(values)

    def to_dict(self):
        return json.loads(json.dumps(self.values))

    def digest(self):
        """SHA-256 of the canonical JSON of the configuration, output directory excluded."""
        values = self.to_dict()
        values["suite"].pop("out_dir", None)
        text = json.dumps(values, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def to_ini(self):
        lines = []
        for section, keys in self.values.items():
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {_format(value)}" for key, value in keys.items())
            lines.append("")
        return "\n".join(lines)


def load_config(path=None, text=None):
    """Read an INI file (or INI text) over the defaults."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        if text is not None:
            parser.read_string(text)
        elif path is not None:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from None
    cfg = SuiteConfig()
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]", key=section)
        for key, raw in parser.items(section):
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown key {section}.{key}", key=f"{section}.{key}")
            cfg.values[section][key] = _parse(section, key, raw)
    return cfg


def default_config_text():
    """The packaged default.ini."""
    return resources.files("lipdist").joinpath("data/default.ini").read_text()
