"""Named initial-data presets.

Grammar (whitespace-free):
    zero
    eigen:J                      J-th basis mode, 1-based
    eigen:J:AMP                  scaled basis mode
    gaussian-blob(X0,Y0,SIGMA,AMP)
    random(SEED,DECAY)           coefficient j ~ AMP * N(0,1) * exp(-DECAY*(j-1))
    random(SEED,DECAY,AMP)

Velocity presets are stream-function shaped: a blob preset is interpreted as a
stream function and converted via the rotated gradient, so the resulting field
is divergence-free before projection.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .config import ConfigError
from .eigensolver import EigenBasis
from .mesh import Mesh, perp_gradient
from .spectral import to_coeffs
from .stokes import StokesBasis, leray_project

__all__ = ["Preset", "parse_preset", "charge_coeffs", "velocity_coeffs"]

_NUM = r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"
_BLOB = re.compile(rf"^gaussian-blob\(({_NUM}),({_NUM}),({_NUM}),({_NUM})\)$")
_RAND = re.compile(rf"^random\((\d+),({_NUM})(?:,({_NUM}))?\)$")
_EIG = re.compile(r"^eigen:(\d+)(?::(%s))?$" % _NUM)


@dataclass(frozen=True)
class Preset:
    kind: str          # zero | eigen | blob | random
    index: int = 0
    x0: float = 0.0
    y0: float = 0.0
    sigma: float = 1.0
    amplitude: float = 1.0
    seed: int = 0
    decay: float = 0.0


def parse_preset(text: str, path: str = "preset") -> Preset:
    if text == "zero":
        return Preset("zero")
    m = _EIG.match(text)
    if m:
        j = int(m.group(1))
        if j < 1:
            raise ConfigError(path, "eigen index is 1-based")
        return Preset("eigen", index=j, amplitude=float(m.group(2) or 1.0))
    m = _BLOB.match(text)
    if m:
        x0, y0, sigma, amp = map(float, m.groups())
        if sigma <= 0:
            raise ConfigError(path, "blob sigma must be positive")
        return Preset("blob", x0=x0, y0=y0, sigma=sigma, amplitude=amp)
    m = _RAND.match(text)
    if m:
        seed, decay = int(m.group(1)), float(m.group(2))
        amp = float(m.group(3)) if m.group(3) else 1.0
        if decay < 0:
            raise ConfigError(path, "random decay must be nonnegative")
        return Preset("random", seed=seed, decay=decay, amplitude=amp)
    raise ConfigError(path, f"unrecognized preset {text!r}")


def _blob_field(mesh: Mesh, p: Preset) -> np.ndarray:
    x, y = mesh.points[:, 0], mesh.points[:, 1]
    return p.amplitude * np.exp(-((x - p.x0) ** 2 + (y - p.y0) ** 2) / (2.0 * p.sigma**2))


def _random_coeffs(m: int, p: Preset) -> np.ndarray:
    rng = np.random.default_rng(p.seed)
    return p.amplitude * rng.standard_normal(m) * np.exp(-p.decay * np.arange(m))


def charge_coeffs(basis: EigenBasis, p: Preset) -> np.ndarray:
    if p.kind == "zero":
        return np.zeros(basis.m)
    if p.kind == "eigen":
        if p.index > basis.m:
            raise ConfigError("initial_data.charge", f"eigen:{p.index} exceeds n_charge={basis.m}")
        out = np.zeros(basis.m)
        out[p.index - 1] = p.amplitude
        return out
    if p.kind == "blob":
        return to_coeffs(basis, _blob_field(basis.mesh, p)).coeffs
    return _random_coeffs(basis.m, p)


def velocity_coeffs(basis: StokesBasis, p: Preset) -> np.ndarray:
    if p.kind == "zero":
        return np.zeros(basis.m)
    if p.kind == "eigen":
        if p.index > basis.m:
            raise ConfigError("initial_data.velocity", f"eigen:{p.index} exceeds m_velocity={basis.m}")
        out = np.zeros(basis.m)
        out[p.index - 1] = p.amplitude
        return out
    if p.kind == "blob":
        return leray_project(basis, perp_gradient(basis.mesh, _blob_field(basis.mesh, p)))
    return _random_coeffs(basis.m, p)
