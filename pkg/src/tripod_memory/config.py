"""Run configuration: a line-oriented ``key = value`` format with ``[section]`` headers.

Every key lives in exactly one section and may also be given before the
first header. Frequencies ending in ``_mhz`` are cyclic (the code multiplies
by 2 pi); phases ending in ``_pi`` are in units of pi. Omitted keys take the
defaults below, which reproduce the reference experiment.

configparser is not used because it cannot report the line of a bad entry.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable

from .analytic import TWO_PI, MagneticEnvironment
from .errors import ConfigError, InvalidParameterError
from .experiments import ENGINES, ExperimentParams

OUT_DIR_ENV = "TRIPOD_MEMORY_OUT"
SCENARIOS = ("fig2", "fig3", "fig4", "fig5", "isolation", "fringe", "oracle-check")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _finite(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise ValueError(f"expected a finite number, got {text!r}")
    return x


def _nonneg(text: str) -> float:
    x = _finite(text)
    if x < 0:
        raise ValueError(f"must be >= 0 (durations, fields and rates are non-negative), got {text}")
    return x


def _positive(text: str) -> float:
    x = _finite(text)
    if x <= 0:
        raise ValueError(f"must be > 0, got {text}")
    return x


def _int_min(lo: int) -> Callable[[str], int]:
    def conv(text: str) -> int:
        x = int(text)
        if x < lo:
            raise ValueError(f"must be >= {lo}, got {text}")
        return x

    return conv


def _choice(options) -> Callable[[str], str]:
    def conv(text: str) -> str:
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}, got {text!r}")
        return text

    return conv


def _fraction(text: str) -> float:
    x = _finite(text)
    if not 0 <= x <= 0.5:
        raise ValueError(f"must lie in [0, 0.5], got {text}")
    return x


# section -> key -> (converter, default). A default of None means "not set".
SCHEMA: dict[str, dict[str, tuple[Callable[[str], Any], Any]]] = {
    "run": {
        "scenario": (_choice(SCENARIOS + ("",)), ""),
        "engine": (_choice(ENGINES), "analytic"),
        "seed": (_int_min(0), 0),
        "out_dir": (str, ""),
        "points": (_int_min(0), 0),
    },
    "magnetic": {
        "field_mg": (_nonneg, None),
        "larmor_mhz": (_nonneg, None),
        "g_factor": (_finite, 0.5),
    },
    "phases": {
        "delta_w_pi": (_finite, 0.5),
        "delta_r_pi": (_finite, 0.2),
    },
    "timing": {
        "tau_ns": (_nonneg, 380.0),
        "tau2_ns": (_nonneg, 3400.0),
        "t0_us": (_positive, 90.0),
        "probe_fwhm_ns": (_positive, 4.0),
        "fig5_t_min_us": (_nonneg, 0.38),
        "fig5_t_max_us": (_nonneg, 100.0),
    },
    "efficiency": {
        "a_baseline": (_fraction, 0.05),
    },
    "numeric": {
        "gn_mhz": (_positive, 6000.0),
        "gamma_e_mhz": (_positive, 5.746),
        "length": (_positive, 1.0),
        "nz": (_int_min(1), 1),
        "dt_ps": (_positive, 2.5),
        "write_rabi_mhz": (_nonneg, 350.0),
        "read_rabi_mhz": (_nonneg, 260.0),
        "write_ramp_ns": (_positive, 2.0),
        "read_ramp_ns": (_positive, 2.0),
        "read_duration_ns": (_positive, 30.0),
        "write_offset_ns": (_finite, 2.0),
        "closed_system": (_bool, False),
        "oracle_cases": (_int_min(1), 20),
        "oracle_tolerance": (_positive, 0.02),
    },
}

DEFAULT_LARMOR_MHZ = 0.21
_SECTION_OF = {k: sec for sec, keys in SCHEMA.items() for k in keys}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    ``values`` holds every key after defaults were applied, in the units of
    the file format; ``params`` is the same information in SI units.
    """

    values: dict[str, Any] = field(default_factory=dict)
    params: ExperimentParams = ExperimentParams()

    @property
    def scenario(self) -> str:
        return self.values["scenario"]

    @property
    def engine(self) -> str:
        return self.values["engine"]

    @property
    def seed(self) -> int:
        return self.values["seed"]

    @property
    def points(self) -> int:
        return self.values["points"]

    @property
    def out_dir(self) -> str:
        return self.values["out_dir"] or os.environ.get(OUT_DIR_ENV, "") or "out"

    @property
    def oracle_cases(self) -> int:
        return self.values["oracle_cases"]

    @property
    def oracle_tolerance(self) -> float:
        return self.values["oracle_tolerance"]

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with run-section keys replaced (used for command-line flags)."""
        vals = dict(self.values)
        for k, v in overrides.items():
            if v is None:
                continue
            if _SECTION_OF.get(k) != "run":
                raise ConfigError("only [run] keys can be overridden", key=k)
            conv = SCHEMA["run"][k][0]
            try:
                vals[k] = conv(str(v))
            except ValueError as e:
                raise ConfigError(str(e), key=k) from None
        return RunConfig(vals, self.params)

    def resolved(self) -> dict[str, str]:
        """Every key as ``section.key -> text``, plus derived quantities."""
        out = {}
        for sec, keys in SCHEMA.items():
            for k in keys:
                v = self.values[k]
                if v is None:
                    continue
                out[f"{sec}.{k}"] = v if isinstance(v, str) else _fmt(v)
        env = self.params.env
        out["derived.larmor_mhz"] = repr(env.larmor_hz / 1e6)
        out["derived.field_mg"] = repr(env.b_field * 1e3)
        out["derived.optical_depth"] = repr(self.params.numeric_setup().atoms.optical_depth)
        return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v)


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raise :class:`ConfigError` naming the line and key on any problem."""
    values: dict[str, Any] = {}
    lines_of: dict[str, int] = {}
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", line=lineno)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _SECTION_OF:
            raise ConfigError("unknown key", line=lineno, key=key)
        if section is not None and _SECTION_OF[key] != section:
            raise ConfigError(f"key belongs in [{_SECTION_OF[key]}], not [{section}]", line=lineno, key=key)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines_of[key]})", line=lineno, key=key)
        conv = SCHEMA[_SECTION_OF[key]][key][0]
        try:
            values[key] = conv(val)
        except ValueError as e:
            raise ConfigError(f"invalid value: {e}", line=lineno, key=key) from None
        lines_of[key] = lineno

    for sec, keys in SCHEMA.items():
        for k, (_, default) in keys.items():
            values.setdefault(k, default)

    if values["field_mg"] is not None and values["larmor_mhz"] is not None:
        raise ConfigError("set either field_mg or larmor_mhz, not both", line=lines_of["larmor_mhz"], key="larmor_mhz")
    if values["field_mg"] is None and values["larmor_mhz"] is None:
        values["larmor_mhz"] = DEFAULT_LARMOR_MHZ
    if values["fig5_t_max_us"] < values["fig5_t_min_us"]:
        raise ConfigError("fig5_t_max_us must be >= fig5_t_min_us", line=lines_of.get("fig5_t_max_us"), key="fig5_t_max_us")

    try:
        params = build_params(values)
    except InvalidParameterError as e:
        raise ConfigError(str(e)) from None
    return RunConfig(values, params)


def build_params(v: dict[str, Any]) -> ExperimentParams:
    g = v["g_factor"]
    if v["field_mg"] is not None:
        env = MagneticEnvironment(v["field_mg"] * 1e-3, g)
    else:
        env = MagneticEnvironment.from_larmor(TWO_PI * v["larmor_mhz"] * 1e6, g)
    return ExperimentParams(
        env=env,
        delta_w=v["delta_w_pi"] * math.pi,
        delta_r=v["delta_r_pi"] * math.pi,
        tau=v["tau_ns"] * 1e-9,
        tau2=v["tau2_ns"] * 1e-9,
        t0=v["t0_us"] * 1e-6,
        probe_fwhm=v["probe_fwhm_ns"] * 1e-9,
        a_baseline=v["a_baseline"],
        fig5_t_min=v["fig5_t_min_us"] * 1e-6,
        fig5_t_max=v["fig5_t_max_us"] * 1e-6,
        gN=TWO_PI * v["gn_mhz"] * 1e6,
        gamma_e=TWO_PI * v["gamma_e_mhz"] * 1e6,
        length=v["length"],
        nz=v["nz"],
        dt=v["dt_ps"] * 1e-12,
        write_rabi=TWO_PI * v["write_rabi_mhz"] * 1e6,
        read_rabi=TWO_PI * v["read_rabi_mhz"] * 1e6,
        write_ramp=v["write_ramp_ns"] * 1e-9,
        read_ramp=v["read_ramp_ns"] * 1e-9,
        read_duration=v["read_duration_ns"] * 1e-9,
        write_offset=v["write_offset_ns"] * 1e-9,
        closed_system=v["closed_system"],
    )


def default_config() -> RunConfig:
    return parse_config("")
