"""Run configuration: ``key = value`` text files and the experiment presets.

A configuration is a flat list of ``key = value`` lines (``#`` and ``;`` start
comments).  A ``preset = experimentN`` line loads one of the built-in parameter
sets; every other line overrides it.  Example::

    preset = experiment1
    p = 0
    n = 128
"""

from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .expressions import ExpressionError, initial_datum
from .fluxes import FluxSpec, Numerical, rusanov_alpha
from .kernels import PROFILES, KernelError, KernelSpec, PowerLaw, custom_profile
from .operators import BC, Discretization, Grid1D, SchemeKind, StateField, initial_average
from .reconstruction import get_limiter
from .stepping import CFLMode, Integrator, StepControl
from .weights import WeightTable, build_first_order, build_second_order, local_table

_SECTION = "config"
RANGE_SAMPLES = 8193


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key, self.line = key, line


# {{{ presets

_EXP1 = {
    "domain": "0, 1", "n": "64", "bc": "periodic", "kernel": "power", "p": "1",
    "delta": "0.125", "flux": "godunov", "scheme": "second", "limiter": "minmod",
    "lambda": "0.8", "t_end": "0.3", "integrator": "ssprk2", "initial": "u01",
    "n_list": "8, 16, 32, 64, 128, 256, 512", "reference_n": "1024",
}

PRESETS: Dict[str, Dict[str, str]] = {
    "experiment1": _EXP1,
    "experiment2": {**_EXP1, "p": "-0.5", "t_end": "0.5"},
    "experiment3": {**_EXP1, "domain": "-1, 1", "n": "64", "lambda": "0.25",
                    "initial": "u03", "t_end": "1.5", "snapshots": "0.5, 1.5"},
    "experiment4": {**_EXP1, "domain": "-1, 1", "n": "128", "bc": "outflow", "p": "0",
                    "t_end": "1", "initial": "u04",
                    "snapshots": "0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1"},
    "experiment5": {**{k: v for k, v in _EXP1.items() if k != "delta"},
                    "delta_cells": "3", "p": "0", "t_end": "0.5", "reference": "local"},
}

# }}}


# {{{ value parsers

def parse_range(text: str) -> Tuple[float, float]:
    """Parse ``"m,M"``, ``"m:M"`` or ``"[m, M]"`` into a float pair."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    parts = re.split(r"[,:]", body)
    if len(parts) != 2:
        raise ValueError(f"expected a range like 'm,M', got {text!r}")
    lo, hi = (float(s) for s in parts)
    if not lo <= hi:
        raise ValueError(f"range lower end exceeds upper end in {text!r}")
    return lo, hi


def _float_list(text: str):
    return tuple(float(s) for s in re.split(r"[,\s]+", text.strip()) if s)


def _int_list(text: str):
    return tuple(int(s) for s in re.split(r"[,\s]+", text.strip()) if s)


def _enum(cls):
    def parse(text):
        try:
            return cls(text.strip().lower().replace("_", "-"))
        except ValueError:
            known = ", ".join(m.value for m in cls)
            raise ValueError(f"expected one of {known}, got {text!r}") from None
    return parse


def _choice(*names):
    def parse(text):
        text = text.strip().lower()
        if text not in names:
            raise ValueError(f"expected one of {', '.join(names)}, got {text!r}")
        return text
    return parse


def _alpha(text):
    text = text.strip().lower()
    if text in ("auto", "grid"):
        return text
    value = float(text)
    if value < 0:
        raise ValueError("alpha must be nonnegative")
    return value


def _initial(text):
    text = text.strip()
    initial_datum(text)  # validate early
    return text


def _profile(text):
    text = text.strip()
    if text not in PROFILES:
        raise ValueError(f"unknown profile {text!r}; known: {', '.join(sorted(PROFILES))}")
    return text


def _limiter(text):
    get_limiter(text.strip())
    return text.strip()


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise ValueError(f"must be positive, got {text.strip()}")
        return value
    return parse


def _nonnegative_float(text):
    value = float(text)
    if value < 0:
        raise ValueError(f"must be nonnegative, got {text.strip()}")
    return value


def _grid_size(text):
    n = int(text)
    if n < 4:
        raise ValueError(f"need at least 4 cells, got {n}")
    return n


def _p(text):
    p = float(text)
    if not p > -1:
        raise ValueError(f"power-law kernel needs p > -1, got {p}")
    return p


# config key -> (dataclass field, parser)
KEYS = {
    "preset": ("preset", _choice(*PRESETS)),
    "domain": ("domain", parse_range),
    "n": ("n", _grid_size),
    "bc": ("bc", _enum(BC)),
    "kernel": ("kernel", _choice("power", "custom")),
    "p": ("p", _p),
    "delta": ("delta", _positive(float)),
    "delta_cells": ("delta_cells", _positive(float)),
    "profile": ("profile", _profile),
    "flux": ("flux", _enum(Numerical)),
    "alpha": ("alpha", _alpha),
    "scheme": ("scheme", _enum(SchemeKind)),
    "limiter": ("limiter", _limiter),
    "lambda": ("lam", _positive(float)),
    "t_end": ("t_end", _nonnegative_float),
    "integrator": ("integrator", _enum(Integrator)),
    "cfl": ("cfl", _enum(CFLMode)),
    "initial": ("initial", _initial),
    "snapshots": ("snapshots", _float_list),
    "n_list": ("n_list", _int_list),
    "reference_n": ("reference_n", _grid_size),
    "reference": ("reference", _choice("same", "local")),
    "workers": ("workers", _positive(int)),
}

REQUIRED = ("n", "lambda", "t_end", "initial")

# }}}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved run parameters."""

    n: int
    lam: float
    t_end: float
    initial: str
    domain: Tuple[float, float] = (0.0, 1.0)
    bc: BC = BC.PERIODIC
    kernel: str = "power"
    p: float = 0.0
    delta: Optional[float] = None
    delta_cells: Optional[float] = None
    profile: Optional[str] = None
    flux: Numerical = Numerical.GODUNOV
    alpha: object = "auto"
    scheme: SchemeKind = SchemeKind.SECOND
    limiter: str = "minmod"
    integrator: Integrator = Integrator.SSPRK2
    cfl: CFLMode = CFLMode.WARN
    snapshots: Tuple[float, ...] = ()
    n_list: Tuple[int, ...] = (8, 16, 32, 64, 128, 256, 512)
    reference_n: int = 1024
    reference: str = "same"
    workers: int = 1
    preset: Optional[str] = None

    def __post_init__(self):
        if self.scheme is not SchemeKind.LOCAL_SECOND:
            if self.delta is None and self.delta_cells is None:
                raise ConfigError("nonlocal schemes need a horizon", key="delta")
            if self.delta is not None and self.delta_cells is not None:
                raise ConfigError("give either delta or delta_cells, not both", key="delta_cells")
        if self.kernel == "custom" and self.profile is None:
            raise ConfigError("custom kernels need a profile name", key="profile")
        a, b = self.domain
        if not b > a:
            raise ConfigError(f"empty domain [{a}, {b}]", key="domain")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    # {{{ builders

    def grid(self, n: Optional[int] = None) -> Grid1D:
        return Grid1D(self.domain[0], self.domain[1], n or self.n, self.bc)

    def horizon(self, n: Optional[int] = None) -> float:
        if self.delta_cells is not None:
            return self.delta_cells * self.grid(n).dx
        return self.delta

    def kernel_spec(self, n: Optional[int] = None) -> KernelSpec:
        delta = self.horizon(n)
        if self.kernel == "custom":
            return custom_profile(self.profile, delta)
        return PowerLaw(self.p, delta)

    def weights(self, n: Optional[int] = None) -> WeightTable:
        dx = self.grid(n).dx
        if self.scheme is SchemeKind.LOCAL_SECOND:
            return local_table(dx)
        k = self.kernel_spec(n)
        if self.scheme is SchemeKind.FIRST:
            return build_first_order(k, dx)
        return build_second_order(k, dx)

    def initial_function(self):
        return initial_datum(self.initial)

    def data_range(self) -> Tuple[float, float]:
        """Range of the initial datum sampled on a fine point grid."""
        x = np.linspace(self.domain[0], self.domain[1], RANGE_SAMPLES)
        v = self.initial_function()(x)
        return float(v.min()), float(v.max())

    def flux_spec(self) -> FluxSpec:
        if self.flux is not Numerical.LAX_FRIEDRICHS:
            return FluxSpec(self.flux)
        if self.alpha == "grid":
            alpha = 1.0 / self.lam
        elif self.alpha == "auto":
            alpha = rusanov_alpha(FluxSpec(Numerical.GODUNOV), self.data_range())
        else:
            alpha = float(self.alpha)
        return FluxSpec(self.flux, alpha=alpha)

    def discretization(self, n: Optional[int] = None) -> Discretization:
        weights = None if self.scheme is SchemeKind.LOCAL_SECOND else self.weights(n)
        return Discretization(self.scheme, self.grid(n), self.flux_spec(), weights,
                              get_limiter(self.limiter))

    def initial_state(self, n: Optional[int] = None) -> StateField:
        return initial_average(self.initial_function(), self.grid(n))

    def step_control(self, audit: bool = False) -> StepControl:
        return StepControl(lam=self.lam, t_end=self.t_end, cfl_mode=self.cfl,
                           integrator=self.integrator, output_times=self.snapshots,
                           audit=audit)

    # }}}


def resolve(values: Mapping[str, str], line_of: Optional[Mapping[str, int]] = None) -> ExperimentConfig:
    """Build a config from raw ``key -> text`` pairs, applying any preset first."""
    line_of = line_of or {}
    for key in values:
        if key not in KEYS:
            raise ConfigError(f"unknown key (known: {', '.join(sorted(KEYS))})",
                              key=key, line=line_of.get(key))
    raw = {}
    preset = values.get("preset")
    if preset is not None:
        preset = preset.strip()
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; known: {', '.join(PRESETS)}",
                              key="preset", line=line_of.get("preset"))
        raw.update(PRESETS[preset])
    raw.update(values)
    # an explicit horizon in one form replaces a preset horizon in the other
    if "delta" in values and "delta_cells" not in values:
        raw.pop("delta_cells", None)
    if "delta_cells" in values and "delta" not in values:
        raw.pop("delta", None)

    for key in REQUIRED:
        if key not in raw:
            raise ConfigError("required key is missing", key=key)

    fields = {}
    for key, text in raw.items():
        name, parser = KEYS[key]
        try:
            fields[name] = parser(text)
        except (ValueError, ExpressionError, KernelError) as exc:
            raise ConfigError(str(exc), key=key, line=line_of.get(key)) from None
    return ExperimentConfig(**fields)


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
        delimiters=("=",), strict=True, empty_lines_in_values=False)
    parser.optionxform = str.lower
    # no continuation lines: every line stands on its own
    body = "\n".join([f"[{_SECTION}]"] + [line.lstrip() for line in text.splitlines()])
    try:
        parser.read_string(body)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0]
        line = text.splitlines()[lineno - 2]
        raise ConfigError(f"expected 'key = value', got {line.strip()!r}",
                          line=lineno - 1) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("key given twice", key=exc.option, line=exc.lineno - 1) from None
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        message = getattr(exc, "message", str(exc)).splitlines()[0]
        raise ConfigError(message, line=None if lineno is None else lineno - 1) from None
    if parser.sections() != [_SECTION]:
        raise ConfigError("sections are not supported; use plain 'key = value' lines")

    line_of = {}
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*([A-Za-z_][\w]*)\s*=", line)
        if m:
            line_of.setdefault(m.group(1).lower(), i)
    return resolve(dict(parser[_SECTION]), line_of)


def from_preset(name: str, overrides: Optional[Mapping[str, str]] = None) -> ExperimentConfig:
    values = {"preset": name}
    values.update(overrides or {})
    return resolve(values)


def parse_overrides(items) -> Dict[str, str]:
    """Turn ``["p=1", "n = 32"]`` into a dict, rejecting malformed entries."""
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {item!r} is not of the form key=value")
        out[key.strip().lower()] = value.strip()
    return out
