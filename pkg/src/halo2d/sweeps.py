"""Parameter sweeps over two-body strength: universality and Borromean scans.

Three gaussian_pair shape families, distinguished by the signs of the
wide (S1) and narrow (S2) components:

    pure_attractive   S1 <= 0, S2 <= 0   (swept: S1, with S2 = 0)
    repulsive_core    S1 <  0, S2 >  0   (swept: S1)
    repulsive_barrier S1 >  0, S2 <  0   (swept: S2)

Sweeps are parameterized by target two-body energies; a bisection on
the swept strength makes |E2| the controlled x-axis.  All routines
return plain lists/dicts, serialization lives in the CLI.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import build_channel_table, count_zero_energy_nodes, rms_distance, solve_bound_states
from .errors import ConfigError, NumericalError
from .potentials import PotentialSpec, gaussian_pair, zero_range
from .twobody import bound_states

__all__ = [
    "FAMILIES",
    "family_spec",
    "TunedPoint",
    "tune_strength",
    "fig2_sweep",
    "borromean_scan",
    "no_third_state_report",
]

FAMILIES = ("pure_attractive", "repulsive_core", "repulsive_barrier")

# fixed non-swept strength per family; chosen so the swept bracket
# below reaches both deep binding and the unbound side
_FIXED_DEFAULT = {"pure_attractive": 0.0, "repulsive_core": 4.0, "repulsive_barrier": 1.0}


def family_spec(family: str, strength: float, b: float = 1.0,
                fixed: float | None = None) -> PotentialSpec:
    """Map a swept strength onto a gaussian_pair of the given family."""
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}, expected one of {FAMILIES}")
    if fixed is None:
        fixed = _FIXED_DEFAULT[family]
    if family == "pure_attractive":
        s1, s2 = strength, fixed
        if s1 > 0.0 or s2 > 0.0:
            raise ConfigError("pure_attractive needs S1 <= 0 and S2 <= 0")
    elif family == "repulsive_core":
        s1, s2 = strength, fixed
        if s1 >= 0.0 or s2 <= 0.0:
            raise ConfigError("repulsive_core needs S1 < 0 and S2 > 0")
    else:
        s1, s2 = fixed, strength
        if s1 <= 0.0 or s2 >= 0.0:
            raise ConfigError("repulsive_barrier needs S1 > 0 and S2 < 0")
    return gaussian_pair(b, s1, s2)


def _e2_of(spec: PotentialSpec) -> float:
    """Deepest two-body energy, or 0.0 when nothing is bound."""
    es = bound_states(spec)
    return es[0] if es else 0.0


@dataclass(frozen=True)
class TunedPoint:
    family: str
    strength: float
    spec: PotentialSpec
    e2: float


def tune_strength(family: str, e2_target: float, b: float = 1.0,
                  fixed: float | None = None, rtol: float = 1e-4) -> TunedPoint:
    """Bisect the swept strength until the deepest E2 hits e2_target.

    Relies on E2 being monotone in the attractive strength, which holds
    for all three families (the swept component is the attractive one in
    each).  e2_target must be negative.
    """
    if e2_target >= 0.0:
        raise ConfigError("e2_target must be negative")
    from scipy.optimize import brentq

    # shallow end of the bracket: barely attractive
    hi = -1e-3
    lo = -0.1
    f_hi = _e2_of(family_spec(family, hi, b, fixed)) - e2_target
    if f_hi < 0.0:
        raise NumericalError("bracket start already binds below target")
    for _ in range(60):
        f_lo = _e2_of(family_spec(family, lo, b, fixed)) - e2_target
        if f_lo < 0.0:
            break
        hi = lo
        lo *= 2.0
    else:
        raise NumericalError("could not bracket the target two-body energy")
    s = brentq(lambda x: _e2_of(family_spec(family, x, b, fixed)) - e2_target,
               lo, hi, rtol=1e-12, xtol=abs(e2_target) * 1e-14 + 1e-12, maxiter=200)
    # polish acceptance: brentq converges on strength, re-measure E2
    spec = family_spec(family, s, b, fixed)
    e2 = _e2_of(spec)
    if abs(e2 - e2_target) > rtol * abs(e2_target):
        raise NumericalError(
            f"strength tuning stalled: E2 = {e2:.6e} vs target {e2_target:.6e}")
    return TunedPoint(family=family, strength=s, spec=spec, e2=e2)


def _fig2_point(family, e2_target, b, fixed, n_points, grid_n):
    from .angular import AngularGrid

    pt = tune_strength(family, e2_target, b, fixed)
    grid = AngularGrid(n=grid_n) if grid_n else None
    table = build_channel_table(pt.spec, grid=grid, n_points=n_points)
    states = solve_bound_states(table)
    rows = []
    s1, s2 = pt.spec.s1, pt.spec.s2
    if not states:
        rows.append(dict(family=family, S1=s1, S2=s2, E2=pt.e2, state_index=-1,
                         E3=math.nan, ratio=math.nan, flag="no_trimer"))
    for i, st in enumerate(states):
        rows.append(dict(family=family, S1=s1, S2=s2, E2=pt.e2, state_index=i,
                         E3=st.energy, ratio=(st.energy - pt.e2) / pt.e2, flag="ok"))
    return rows


def fig2_sweep(family: str, e2_targets, b: float = 1.0, fixed: float | None = None,
               n_points: int = 48, grid_n: int | None = None,
               workers: int | None = None) -> list[dict]:
    """Universality sweep: rows (family, S1, S2, E2, state_index, E3, ratio).

    ratio = (E3 - E2)/E2, so the zero-range limits are 15.52 and 0.267.
    Points run concurrently when workers > 1; assembly order is the
    target order either way.
    """
    targets = list(e2_targets)
    if any(t >= 0.0 for t in targets):
        raise ConfigError("all e2_targets must be negative")
    args = [(family, t, b, fixed, n_points, grid_n) for t in targets]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            per_point = list(ex.map(_fig2_point, *zip(*args)))
    else:
        per_point = [_fig2_point(*a) for a in args]
    return [row for rows in per_point for row in rows]


def _borromean_cell(s1, s2, b, n_points, grid_n):
    from .angular import AngularGrid

    spec = gaussian_pair(b, s1, s2)
    e2s = bound_states(spec)
    grid = AngularGrid(n=grid_n) if grid_n else None
    table = build_channel_table(spec, grid=grid, n_points=n_points)
    states = solve_bound_states(table)
    e2 = e2s[0] if e2s else 0.0
    e3 = states[0].energy if states else math.nan
    if e2s:
        label = "dimer+trimer" if states else "dimer"
    else:
        label = "borromean" if states and e3 < 0.0 else "unbound"
    return dict(S1=s1, S2=s2, E2=e2, E3=e3, label=label,
                n_two_body=len(e2s), n_three_body=len(states))


def borromean_scan(s1_values, s2_values, b: float = 1.0, n_points: int = 40,
                   grid_n: int | None = None, workers: int | None = None) -> dict:
    """Classify a strength grid into dimer+trimer / borromean / unbound.

    Returns {"cells": rows in (S1, S2) lexicographic order, "window":
    per-S1 list of the S2 values that came out borromean}.  An empty
    window is a valid result, not an error.
    """
    s1s = [float(s) for s in s1_values]
    s2s = [float(s) for s in s2_values]
    args = [(s1, s2, b, n_points, grid_n) for s1 in s1s for s2 in s2s]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            cells = list(ex.map(_borromean_cell, *zip(*args)))
    else:
        cells = [_borromean_cell(*a) for a in args]
    window = {}
    for c in cells:
        if c["label"] == "borromean":
            window.setdefault(c["S1"], []).append(c["S2"])
    return {"cells": cells, "window": {k: sorted(v) for k, v in sorted(window.items())}}


def no_third_state_report(rho_max_over_a: float = 1e3, a: float = 1.0) -> dict:
    """Zero-energy node count out to rho_max, with convergence evidence.

    The count equals the number of bound states inside rho_max; the
    checks rerun it at half the radius, doubled radius, halved radial
    steps and a denser channel table.  All five agreeing is the
    no-further-state statement.
    """
    if rho_max_over_a <= 1.0:
        raise ConfigError("rho_max_over_a must exceed 1")
    table = build_channel_table(zero_range(a))
    rho_max = rho_max_over_a * a
    count = count_zero_energy_nodes(table, rho_max)
    checks = [
        dict(name="half_radius", count=count_zero_energy_nodes(table, 0.5 * rho_max)),
        dict(name="double_radius", count=count_zero_energy_nodes(table, 2.0 * rho_max)),
        dict(name="half_steps", count=count_zero_energy_nodes(table, rho_max, refine=2)),
    ]
    dense = build_channel_table(zero_range(a), rho_grid=np.geomspace(1e-5 * a, 60.0 * a, 256))
    checks.append(dict(name="dense_table", count=count_zero_energy_nodes(dense, rho_max)))
    return dict(rho_max_over_a=rho_max_over_a, count=count,
                stable=all(c["count"] == count for c in checks), checks=checks)
