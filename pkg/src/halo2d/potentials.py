"""Two-body pair potentials in natural units (hbar = m = 1).

Lengths are measured in an arbitrary unit set by the potential itself
(the Gaussian width b, or the scattering length a for the zero-range
model); energies come out in hbar^2/(m * length^2).

Three models are supported:

``zero_range``
    A contact interaction characterized solely by its 2D scattering
    length a > 0.  It has no pointwise value; solvers treat it through
    analytic boundary conditions.

``gaussian_pair``
    V(r) = (1/(2 b^2)) * (S1 * exp(-r^2/(2 b^2)) + S2 * exp(-2 r^2/b^2)).
    The second term has half the width of the first, so S2 > 0 models a
    repulsive core inside an attractive well and S1 > 0 with S2 < 0 a
    repulsive barrier around a narrow attraction.

``tabulated``
    Monotone cubic interpolation (PCHIP) through user-supplied (r, V)
    samples, zero beyond the last grid point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError

__all__ = [
    "PotentialSpec",
    "zero_range",
    "gaussian_pair",
    "tabulated",
    "evaluate",
    "effective_range_scale",
    "potential_from_config",
]

_KINDS = ("zero_range", "gaussian_pair", "tabulated")


@dataclass(frozen=True)
class PotentialSpec:
    """Validated description of a pair potential.

    Use the module-level constructors (zero_range, gaussian_pair,
    tabulated) rather than building instances by hand.
    """

    kind: str
    a: float | None = None
    b: float | None = None
    s1: float | None = None
    s2: float | None = None
    r_table: np.ndarray | None = field(default=None, repr=False)
    v_table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown potential kind {self.kind!r}")
        if self.kind == "zero_range":
            if self.a is None or not np.isfinite(self.a) or self.a <= 0:
                raise ConfigError("zero_range requires a scattering length a > 0")
        elif self.kind == "gaussian_pair":
            if self.b is None or not np.isfinite(self.b) or self.b <= 0:
                raise ConfigError("gaussian_pair requires a width b > 0")
            for name, s in (("S1", self.s1), ("S2", self.s2)):
                if s is None or not np.isfinite(s):
                    raise ConfigError(f"gaussian_pair requires a finite strength {name}")
        else:
            r = self.r_table
            v = self.v_table
            if r is None or v is None or len(r) != len(v) or len(r) < 2:
                raise ConfigError("tabulated requires matching r, V arrays with >= 2 points")
            if not np.all(np.diff(r) > 0):
                raise ConfigError("tabulated r grid must be strictly ascending")
            if r[0] < 0:
                raise ConfigError("tabulated r grid must be non-negative")
            vscale = np.max(np.abs(v))
            if vscale > 0 and abs(v[-1]) > 1e-10 * vscale:
                raise ConfigError(
                    "tabulated potential must vanish at the last grid point (short range)"
                )


def zero_range(a: float) -> PotentialSpec:
    """Contact interaction with 2D scattering length a."""
    return PotentialSpec(kind="zero_range", a=float(a))


def gaussian_pair(b: float, s1: float, s2: float = 0.0) -> PotentialSpec:
    """Two-Gaussian potential of width b with strengths S1, S2."""
    return PotentialSpec(kind="gaussian_pair", b=float(b), s1=float(s1), s2=float(s2))


def tabulated(r: np.ndarray, v: np.ndarray) -> PotentialSpec:
    r = np.ascontiguousarray(np.asarray(r, dtype=float))
    v = np.ascontiguousarray(np.asarray(v, dtype=float))
    r.setflags(write=False)
    v.setflags(write=False)
    return PotentialSpec(kind="tabulated", r_table=r, v_table=v)


_PCHIP_CACHE: dict[int, PchipInterpolator] = {}


def _tab_interp(spec: PotentialSpec) -> PchipInterpolator:
    key = id(spec.r_table)
    interp = _PCHIP_CACHE.get(key)
    if interp is None:
        interp = PchipInterpolator(spec.r_table, spec.v_table, extrapolate=True)
        _PCHIP_CACHE[key] = interp
    return interp


def evaluate(spec: PotentialSpec, r):
    """V(r) for a pointwise-evaluable potential.

    Accepts a scalar or array r >= 0 and returns matching shape.
    Raises ConfigError for the zero_range model (no pointwise value)
    and for negative separations.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ConfigError("pair separation must be non-negative")
    if spec.kind == "zero_range":
        raise ConfigError(
            "zero_range potential has no pointwise value; it enters solvers "
            "through its analytic boundary condition"
        )
    if spec.kind == "gaussian_pair":
        x2 = r_arr * r_arr / (spec.b * spec.b)
        out = (spec.s1 * np.exp(-0.5 * x2) + spec.s2 * np.exp(-2.0 * x2)) / (2 * spec.b**2)
    else:
        out = _tab_interp(spec)(r_arr)
        out = np.where(r_arr > spec.r_table[-1], 0.0, out)
        # PCHIP extrapolates below r_table[0]; clamp to the first sample
        out = np.where(r_arr < spec.r_table[0], spec.v_table[0], out)
    if np.ndim(r) == 0:
        return float(out)
    return out


def effective_range_scale(spec: PotentialSpec) -> float:
    """Characteristic length of the interaction.

    b for gaussian_pair, the last grid point for tabulated, a for
    zero_range.  Used to size integration grids and fit windows.
    """
    if spec.kind == "gaussian_pair":
        return spec.b
    if spec.kind == "tabulated":
        return float(spec.r_table[-1])
    return spec.a


def potential_from_config(cfg: dict) -> PotentialSpec:
    """Build a PotentialSpec from flat config keys (potential.*)."""
    kind = cfg.get("potential.type")
    if kind is None:
        raise ConfigError("config is missing potential.type")
    if kind == "zero_range":
        if "potential.a" not in cfg:
            raise ConfigError("zero_range potential requires potential.a")
        return zero_range(_as_float(cfg, "potential.a"))
    if kind == "gaussian_pair":
        if "potential.b" not in cfg:
            raise ConfigError("gaussian_pair potential requires potential.b")
        return gaussian_pair(
            _as_float(cfg, "potential.b"),
            _as_float(cfg, "potential.S1") if "potential.S1" in cfg else 0.0,
            _as_float(cfg, "potential.S2") if "potential.S2" in cfg else 0.0,
        )
    if kind == "tabulated":
        path = cfg.get("potential.file")
        if not path:
            raise ConfigError("tabulated potential requires potential.file")
        try:
            data = np.loadtxt(path)
        except OSError as exc:
            raise ConfigError(f"cannot read potential table {path}: {exc}") from exc
        if data.ndim != 2 or data.shape[1] < 2:
            raise ConfigError("potential table must have two columns: r V")
        return tabulated(data[:, 0], data[:, 1])
    raise ConfigError(f"unknown potential.type {kind!r}")


def _as_float(cfg: dict, key: str) -> float:
    try:
        return float(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key} must be a number, got {cfg[key]!r}") from exc
