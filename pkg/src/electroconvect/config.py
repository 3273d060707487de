"""Strict run-configuration parsing.

JSON in, validated RunConfig out.  Unknown keys are rejected with the dotted
path of the offender; there are no silent defaults for misspelled keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["ConfigError", "RunConfig", "MeshConfig", "ModesConfig", "TimeConfig",
           "InitialConfig", "Toggles", "OutputConfig", "parse_config"]


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class MeshConfig:
    kind: str
    nx: int = 0
    ny: int = 0
    nr: int = 0
    ntheta: int = 0
    Lx: float = 1.0
    Ly: float = 1.0
    r_inner: float = 1.0
    r_outer: float = 2.0


@dataclass(frozen=True)
class ModesConfig:
    m_velocity: int
    n_charge: int


@dataclass(frozen=True)
class TimeConfig:
    dt: float
    t_end: float
    diag_every: int = 10
    snapshot_times: tuple = ()


@dataclass(frozen=True)
class InitialConfig:
    velocity: str = "zero"
    charge: str = "zero"


@dataclass(frozen=True)
class Toggles:
    coupling_on: bool = True
    transport_on: bool = True
    full_grid_charge: bool = False


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple = ("csv",)


@dataclass(frozen=True)
class RunConfig:
    mesh: MeshConfig
    modes: ModesConfig
    time: TimeConfig
    initial_data: InitialConfig = field(default_factory=InitialConfig)
    toggles: Toggles = field(default_factory=Toggles)
    output: OutputConfig = field(default_factory=OutputConfig)


def _expect(obj, path, typ, typename):
    if typ is float and isinstance(obj, int) and not isinstance(obj, bool):
        obj = float(obj)
    if not isinstance(obj, typ) or isinstance(obj, bool) and typ is not bool:
        raise ConfigError(path, f"expected {typename}, got {type(obj).__name__}")
    return obj


def _section(doc, path, known: dict, required: set) -> dict:
    doc = _expect(doc, path, dict, "object")
    for key in doc:
        if key not in known:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")
    for key in required:
        if key not in doc:
            raise ConfigError(f"{path}.{key}" if path else key, "missing required key")
    out = {}
    for key, (typ, typename, default) in known.items():
        if key in doc:
            out[key] = _expect(doc[key], f"{path}.{key}" if path else key, typ, typename)
        elif key not in required:
            out[key] = default
    return out


def _parse_mesh(doc) -> MeshConfig:
    kind = _expect(doc, "mesh", dict, "object").get("kind")
    if kind == "rectangle":
        v = _section(doc, "mesh", {
            "kind": (str, "string", None),
            "nx": (int, "int", None), "ny": (int, "int", None),
            "Lx": (float, "number", 1.0), "Ly": (float, "number", 1.0),
        }, {"kind", "nx", "ny"})
        if v["nx"] < 3 or v["ny"] < 3:
            raise ConfigError("mesh.nx", "need nx, ny >= 3")
        if v["Lx"] <= 0 or v["Ly"] <= 0:
            raise ConfigError("mesh.Lx", "need positive side lengths")
        return MeshConfig(kind="rectangle", nx=v["nx"], ny=v["ny"], Lx=v["Lx"], Ly=v["Ly"])
    if kind == "annulus":
        v = _section(doc, "mesh", {
            "kind": (str, "string", None),
            "nr": (int, "int", None), "ntheta": (int, "int", None),
            "r_inner": (float, "number", 1.0), "r_outer": (float, "number", 2.0),
        }, {"kind", "nr", "ntheta"})
        if not 0 < v["r_inner"] < v["r_outer"]:
            raise ConfigError("mesh.r_inner", "need 0 < r_inner < r_outer")
        if v["nr"] < 3 or v["ntheta"] < 8:
            raise ConfigError("mesh.nr", "need nr >= 3 and ntheta >= 8")
        return MeshConfig(kind="annulus", nr=v["nr"], ntheta=v["ntheta"],
                          r_inner=v["r_inner"], r_outer=v["r_outer"])
    raise ConfigError("mesh.kind", f"expected 'rectangle' or 'annulus', got {kind!r}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration (strict mode)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON: {exc}") from exc
    top = _section(doc, "", {
        "mesh": (dict, "object", None),
        "modes": (dict, "object", None),
        "time": (dict, "object", None),
        "initial_data": (dict, "object", {}),
        "toggles": (dict, "object", {}),
        "output": (dict, "object", {}),
    }, {"mesh", "modes", "time"})

    mesh = _parse_mesh(top["mesh"])

    mv = _section(top["modes"], "modes", {
        "m_velocity": (int, "int", None), "n_charge": (int, "int", None),
    }, {"m_velocity", "n_charge"})
    if mv["m_velocity"] < 1 or mv["n_charge"] < 1:
        raise ConfigError("modes.m_velocity", "mode counts must be positive")
    modes = ModesConfig(mv["m_velocity"], mv["n_charge"])

    tv = _section(top["time"], "time", {
        "dt": (float, "number", None), "t_end": (float, "number", None),
        "diag_every": (int, "int", 10), "snapshot_times": (list, "array", []),
    }, {"dt", "t_end"})
    if tv["dt"] <= 0:
        raise ConfigError("time.dt", "dt must be positive")
    if tv["t_end"] < 0:
        raise ConfigError("time.t_end", "t_end must be nonnegative")
    if tv["t_end"] > 0 and tv["dt"] > tv["t_end"]:
        raise ConfigError("time.dt", "dt exceeds t_end")
    if tv["diag_every"] < 1:
        raise ConfigError("time.diag_every", "diag_every must be >= 1")
    snaps = tuple(
        _expect(s, f"time.snapshot_times[{i}]", float, "number")
        for i, s in enumerate(tv["snapshot_times"])
    )
    for i, s in enumerate(snaps):
        if not 0 <= s <= tv["t_end"]:
            raise ConfigError(f"time.snapshot_times[{i}]", "snapshot time outside [0, t_end]")
    time = TimeConfig(tv["dt"], tv["t_end"], tv["diag_every"], snaps)

    iv = _section(top["initial_data"], "initial_data", {
        "velocity": (str, "string", "zero"), "charge": (str, "string", "zero"),
    }, set())
    from .presets import parse_preset  # validates the preset grammar

    parse_preset(iv["velocity"], "initial_data.velocity")
    parse_preset(iv["charge"], "initial_data.charge")
    initial = InitialConfig(iv["velocity"], iv["charge"])

    gv = _section(top["toggles"], "toggles", {
        "coupling_on": (bool, "bool", True),
        "transport_on": (bool, "bool", True),
        "full_grid_charge": (bool, "bool", False),
    }, set())
    toggles = Toggles(**gv)

    ov = _section(top["output"], "output", {
        "directory": (str, "string", "out"), "formats": (list, "array", ["csv"]),
    }, set())
    formats = tuple(_expect(f, f"output.formats[{i}]", str, "string") for i, f in enumerate(ov["formats"]))
    for i, f in enumerate(formats):
        if f not in ("csv",):
            raise ConfigError(f"output.formats[{i}]", f"unsupported format {f!r}")
    output = OutputConfig(ov["directory"], formats)

    return RunConfig(mesh, modes, time, initial, toggles, output)
