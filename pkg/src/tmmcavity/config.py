"""Configuration files: flat key-value INI with sections, SI units.

One format serves both the run configuration and standalone chain
description files.  Values are SI; lengths and powers also accept explicit
unit suffixes (``1064nm``, ``6.7cm``, ``1W``, ``250mW``).  Unknown sections
or keys are hard errors: a typo must never be silently ignored.

Run configuration sections and keys (see ``tmmcavity --help`` for the same
list with units):

    [run]      schema_version (int, required, currently 1)
    [pump]     wavelength (length), power (power), side (left|right)
    [mim]      cavity_length (length), membrane_zeta (real),
               mirror_zeta (real), membrane_x (length),
               cavity_detuning (length)
    [chain]    path (chain file, alternative to [mim] for point/elements)
    [grid]     x_start, x_stop (length), x_count (int),
               dlc_start, dlc_stop (length), dlc_count (int)
    [output]   path (file), format (csv|json), workers (int)

Chain description files list elements in order:

    [chain]    schema_version = 1, wavelength (length)
    [element.N] kind = scatterer|segment; for scatterers
               zeta = RE IM (two reals) and optional mobile = true;
               for segments length (length).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .elements import Chain, Scatterer, Segment
from .errors import ConfigError
from .mim import MimConfig, ScanGrid

__all__ = [
    "SCHEMA_VERSION",
    "parse_length",
    "parse_power",
    "RunConfig",
    "load_run_config",
    "load_chain_file",
    "validate_report",
]

SCHEMA_VERSION = 1

_LENGTH_UNITS = {
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "nm": 1e-9,
    "pm": 1e-12,
}
_POWER_UNITS = {
    "W": 1.0,
    "kW": 1e3,
    "mW": 1e-3,
    "uW": 1e-6,
    "µW": 1e-6,
    "nW": 1e-9,
}


def _parse_with_units(text: str, units: dict, kind: str) -> float:
    s = text.strip()
    for suffix in sorted(units, key=len, reverse=True):
        if s.endswith(suffix):
            body = s[: -len(suffix)].strip()
            try:
                return float(body) * units[suffix]
            except ValueError:
                raise ConfigError(f"cannot parse {kind} value {text!r}") from None
    try:
        return float(s)  # bare numbers are SI
    except ValueError:
        raise ConfigError(
            f"cannot parse {kind} value {text!r}; use a bare SI number or a "
            f"suffix from {sorted(units)}"
        ) from None


def parse_length(text: str) -> float:
    """Length in metres; accepts m, cm, mm, um, nm, pm suffixes."""
    return _parse_with_units(text, _LENGTH_UNITS, "length")


def parse_power(text: str) -> float:
    """Power in watts; accepts W, kW, mW, uW, nW suffixes."""
    return _parse_with_units(text, _POWER_UNITS, "power")


def _parse_float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse number for {key}: {text!r}") from None


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"cannot parse integer for {key}: {text!r}") from None


def _parse_bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"cannot parse boolean for {key}: {text!r}")


_RUN_SCHEMA = {
    "run": {"schema_version"},
    "pump": {"wavelength", "power", "side"},
    "mim": {
        "cavity_length",
        "membrane_zeta",
        "mirror_zeta",
        "membrane_x",
        "cavity_detuning",
    },
    "chain": {"path"},
    "grid": {"x_start", "x_stop", "x_count", "dlc_start", "dlc_stop", "dlc_count"},
    "output": {"path", "format", "workers"},
}

_CHAIN_SCHEMA_TOP = {"schema_version", "wavelength"}
_ELEMENT_KEYS = {"kind", "zeta", "length", "mobile"}


def _read_ini(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from None
    return cp


def _check_unknown(cp: configparser.ConfigParser, schema: dict, path: str) -> list[str]:
    problems = []
    for section in cp.sections():
        if section not in schema:
            problems.append(f"unknown section [{section}]")
            continue
        for key in cp.options(section):
            if key not in schema[section]:
                problems.append(f"unknown key {key!r} in section [{section}]")
    if cp.defaults():
        problems.append("keys outside any section are not allowed")
    return [f"{path}: {p}" for p in problems]


@dataclass
class RunConfig:
    """Fully resolved run configuration with defaults applied."""

    schema_version: int = SCHEMA_VERSION
    wavelength: float = 1.064e-6
    power_watts: float = 1.0
    pump_side: str = "left"
    cavity_length: float = 6.7e-2
    membrane_zeta: float = -1.0
    mirror_zeta: float = -30.0
    membrane_x: float = 0.0
    cavity_detuning: float = 0.0
    chain_path: str | None = None
    grid: ScanGrid | None = None
    out_path: str | None = None
    out_format: str = "csv"
    workers: int = 1
    source_path: str | None = None

    def mim_config(self) -> MimConfig:
        return MimConfig(
            wavelength=self.wavelength,
            cavity_length=self.cavity_length,
            membrane_zeta=self.membrane_zeta,
            mirror_zeta=self.mirror_zeta,
            power_watts=self.power_watts,
            pump_side=self.pump_side,
        )

    def default_grid(self) -> ScanGrid:
        if self.grid is not None:
            return self.grid
        lam = self.wavelength
        return ScanGrid(
            x_start=-lam / 2, x_stop=lam / 2, x_count=101,
            dlc_start=-lam / 2, dlc_stop=lam / 2, dlc_count=101,
        )

    def resolved_lines(self) -> list[str]:
        """Human-readable fully resolved configuration, defaults included."""
        lines = [
            f"schema_version = {self.schema_version}",
            f"pump.wavelength = {self.wavelength!r} m",
            f"pump.power = {self.power_watts!r} W",
            f"pump.side = {self.pump_side}",
            f"mim.cavity_length = {self.cavity_length!r} m",
            f"mim.membrane_zeta = {self.membrane_zeta!r}",
            f"mim.mirror_zeta = {self.mirror_zeta!r}",
            f"mim.membrane_x = {self.membrane_x!r} m",
            f"mim.cavity_detuning = {self.cavity_detuning!r} m",
            f"chain.path = {self.chain_path}",
            f"output.path = {self.out_path}",
            f"output.format = {self.out_format}",
            f"output.workers = {self.workers}",
        ]
        g = self.grid
        if g is None:
            lines.append("grid = (default) x,dlc in [-lambda/2, lambda/2], 101x101")
        else:
            lines.append(
                "grid = x "
                f"[{g.x_start!r}, {g.x_stop!r}] m x {g.x_count}; dlc "
                f"[{g.dlc_start!r}, {g.dlc_stop!r}] m x {g.dlc_count}"
            )
        return lines


def load_run_config(path: str) -> RunConfig:
    """Parse and validate a run configuration file."""
    cp = _read_ini(path)
    problems = _check_unknown(cp, _RUN_SCHEMA, path)
    if problems:
        raise ConfigError("; ".join(problems))

    cfg = RunConfig(source_path=path)

    if cp.has_section("run"):
        if cp.has_option("run", "schema_version"):
            ver = _parse_int(cp.get("run", "schema_version"), "run.schema_version")
            if ver != SCHEMA_VERSION:
                raise ConfigError(
                    f"unsupported schema_version {ver}; this build reads "
                    f"{SCHEMA_VERSION}"
                )
            cfg.schema_version = ver

    if cp.has_section("pump"):
        if cp.has_option("pump", "wavelength"):
            cfg.wavelength = parse_length(cp.get("pump", "wavelength"))
        if cp.has_option("pump", "power"):
            cfg.power_watts = parse_power(cp.get("pump", "power"))
        if cp.has_option("pump", "side"):
            cfg.pump_side = cp.get("pump", "side").strip()

    if cp.has_section("mim"):
        g = lambda key: cp.get("mim", key)
        if cp.has_option("mim", "cavity_length"):
            cfg.cavity_length = parse_length(g("cavity_length"))
        if cp.has_option("mim", "membrane_zeta"):
            cfg.membrane_zeta = _parse_float(g("membrane_zeta"), "mim.membrane_zeta")
        if cp.has_option("mim", "mirror_zeta"):
            cfg.mirror_zeta = _parse_float(g("mirror_zeta"), "mim.mirror_zeta")
        if cp.has_option("mim", "membrane_x"):
            cfg.membrane_x = parse_length(g("membrane_x"))
        if cp.has_option("mim", "cavity_detuning"):
            cfg.cavity_detuning = parse_length(g("cavity_detuning"))

    if cp.has_section("chain") and cp.has_option("chain", "path"):
        cfg.chain_path = cp.get("chain", "path").strip()

    if cp.has_section("grid"):
        opts = {k: cp.get("grid", k) for k in cp.options("grid")}
        needed = {"x_start", "x_stop", "x_count", "dlc_start", "dlc_stop", "dlc_count"}
        missing = needed - set(opts)
        if missing:
            raise ConfigError(
                f"{path}: [grid] section needs all of {sorted(needed)}; "
                f"missing {sorted(missing)}"
            )
        cfg.grid = ScanGrid(
            x_start=parse_length(opts["x_start"]),
            x_stop=parse_length(opts["x_stop"]),
            x_count=_parse_int(opts["x_count"], "grid.x_count"),
            dlc_start=parse_length(opts["dlc_start"]),
            dlc_stop=parse_length(opts["dlc_stop"]),
            dlc_count=_parse_int(opts["dlc_count"], "grid.dlc_count"),
        )

    if cp.has_section("output"):
        if cp.has_option("output", "path"):
            cfg.out_path = cp.get("output", "path").strip()
        if cp.has_option("output", "format"):
            fmt = cp.get("output", "format").strip().lower()
            if fmt not in ("csv", "json"):
                raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
            cfg.out_format = fmt
        if cp.has_option("output", "workers"):
            cfg.workers = _parse_int(cp.get("output", "workers"), "output.workers")
            if cfg.workers < 1:
                raise ConfigError("output.workers must be >= 1")

    return cfg


def load_chain_file(path: str) -> Chain:
    """Parse a chain description file into a Chain."""
    cp = _read_ini(path)
    problems = []
    element_sections = []
    for section in cp.sections():
        if section == "chain":
            for key in cp.options(section):
                if key not in _CHAIN_SCHEMA_TOP:
                    problems.append(f"unknown key {key!r} in section [chain]")
        elif section.startswith("element."):
            element_sections.append(section)
            for key in cp.options(section):
                if key not in _ELEMENT_KEYS:
                    problems.append(f"unknown key {key!r} in section [{section}]")
        else:
            problems.append(f"unknown section [{section}]")
    if cp.defaults():
        problems.append("keys outside any section are not allowed")
    if problems:
        raise ConfigError("; ".join(f"{path}: {p}" for p in problems))

    if not cp.has_section("chain"):
        raise ConfigError(f"{path}: missing [chain] section")
    if cp.has_option("chain", "schema_version"):
        ver = _parse_int(cp.get("chain", "schema_version"), "chain.schema_version")
        if ver != SCHEMA_VERSION:
            raise ConfigError(f"unsupported chain schema_version {ver}")
    if not cp.has_option("chain", "wavelength"):
        raise ConfigError(f"{path}: [chain] needs a wavelength")
    wavelength = parse_length(cp.get("chain", "wavelength"))

    def sort_key(name: str):
        suffix = name.split(".", 1)[1]
        try:
            return (0, int(suffix), suffix)
        except ValueError:
            return (1, 0, suffix)

    elements = []
    mobile_index = None
    for section in sorted(element_sections, key=sort_key):
        kind = cp.get(section, "kind", fallback=None)
        if kind is None:
            raise ConfigError(f"{path}: [{section}] needs a kind")
        kind = kind.strip().lower()
        if kind == "scatterer":
            raw = cp.get(section, "zeta", fallback=None)
            if raw is None:
                raise ConfigError(f"{path}: [{section}] scatterer needs zeta = RE IM")
            parts = raw.split()
            if len(parts) != 2:
                raise ConfigError(
                    f"{path}: [{section}] zeta must be two reals, got {raw!r}"
                )
            z = complex(
                _parse_float(parts[0], f"{section}.zeta"),
                _parse_float(parts[1], f"{section}.zeta"),
            )
            elements.append(Scatterer.of(z))
            if cp.has_option(section, "mobile") and _parse_bool(
                cp.get(section, "mobile"), f"{section}.mobile"
            ):
                if mobile_index is not None:
                    raise ConfigError(f"{path}: more than one mobile element")
                mobile_index = len(elements) - 1
        elif kind == "segment":
            raw = cp.get(section, "length", fallback=None)
            if raw is None:
                raise ConfigError(f"{path}: [{section}] segment needs a length")
            if cp.has_option(section, "mobile"):
                raise ConfigError(f"{path}: segments cannot be mobile")
            elements.append(Segment(parse_length(raw)))
        else:
            raise ConfigError(f"{path}: unknown element kind {kind!r}")

    if mobile_index is None:
        raise ConfigError(f"{path}: no element marked mobile = true")
    return Chain(
        elements=tuple(elements),
        mobile_index=mobile_index,
        k0=2 * math.pi / wavelength,
    )


def validate_report(cfg: RunConfig) -> list[str]:
    """Aggregate invariant checks; empty list means the config is clean."""
    problems = []
    if cfg.wavelength <= 0:
        problems.append("pump.wavelength must be positive")
    if cfg.power_watts < 0:
        problems.append("pump.power must be >= 0")
    if cfg.pump_side not in ("left", "right"):
        problems.append(f"pump.side must be left or right, got {cfg.pump_side!r}")
    if cfg.cavity_length <= 0:
        problems.append("mim.cavity_length must be positive")
    if cfg.membrane_zeta > 0:
        problems.append("mim.membrane_zeta must be real <= 0")
    if abs(cfg.membrane_x) > cfg.wavelength:
        problems.append(
            "mim.membrane_x exceeds one wavelength; the model assumes the "
            "membrane stays near the cavity centre (|x| << L_c)"
        )
    g = cfg.grid
    if g is not None:
        if max(abs(g.x_start), abs(g.x_stop)) > cfg.wavelength:
            problems.append("grid x range exceeds one wavelength (|x| << L_c)")
        npts = g.x_count * g.dlc_count
        if npts > 4_000_000:
            problems.append(f"grid has {npts} points; bound is 4e6")
    if cfg.chain_path is not None:
        try:
            load_chain_file(cfg.chain_path)
        except ConfigError as exc:
            problems.append(str(exc))
    return problems
