"""Two-body problem for a pair of identical bosons in two dimensions.

Works with the reduced s-wave radial equation for u(r) = sqrt(r) R(r),

    -u'' - u/(4 r^2) + V(r) u = E u,

in natural units hbar = m = 1 (reduced mass m* = 1/2, so the potential
and energy enter with coefficient 2 m*/hbar^2 = 1).  A bound state of
energy E = -B decays as u ~ sqrt(r) K0(k r) with k = sqrt(B).

The 2D scattering length a is defined through the zero-energy solution
outside the potential, u(r)/sqrt(r) = C log(r/a), and is positive for
any short-range potential.  A weakly bound state then sits at

    B = 4 exp(-2 gamma) / a^2,    k = 2 exp(-gamma) / a,

with gamma the Euler constant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import k0e, k1e

from .errors import ConfigError, NumericalError
from .potentials import PotentialSpec, effective_range_scale, evaluate

__all__ = [
    "EULER_GAMMA",
    "TwoBodySolution",
    "zero_energy_solution",
    "scattering_length",
    "bound_states",
    "weak_binding_energy",
    "solve_two_body",
]

EULER_GAMMA = 0.5772156649015329

_BIG = 1e250
_SMALL = 1e-250


def _build_mesh(scale: float, r_end: float, e_ref: float = 0.0, r0_frac: float = 1e-4,
                n_uniform_per_scale: int = 48) -> np.ndarray:
    """Integration nodes graded for the 1/(4 r^2) origin and a long tail.

    Geometric spacing near the origin (step ratio 1.03 keeps the RK4
    truncation error on the sqrt(r) behaviour near 1e-7), uniform steps
    through the interaction region, then geometrically growing steps in
    the tail capped so that |k| h stays small for the reference energy.
    """
    r0 = r0_frac * scale
    if r_end <= 2.5 * scale:
        n = max(40, int(math.log(r_end / r0) / math.log(1.03)) + 1)
        return np.geomspace(r0, r_end, n)
    pieces = [np.geomspace(r0, 2.0 * scale, int(math.log(2.0 / r0_frac) / math.log(1.03)) + 1)]
    h_well = scale / n_uniform_per_scale
    mid_end = min(12.0 * scale, r_end)
    n_mid = int((mid_end - 2.0 * scale) / h_well) + 1
    pieces.append(np.linspace(2.0 * scale, mid_end, max(n_mid, 2))[1:])
    if r_end > mid_end:
        k_ref = math.sqrt(max(-e_ref, 0.0))
        h_cap = 0.3 * scale if k_ref == 0.0 else min(0.35 / k_ref, 2.0 * scale)
        tail = [mid_end]
        h = h_well
        while tail[-1] < r_end:
            h = min(h * 1.04, h_cap)
            tail.append(tail[-1] + h)
        tail[-1] = r_end
        pieces.append(np.asarray(tail[1:]))
    return np.concatenate(pieces)


def _potential_on(spec: PotentialSpec, r: np.ndarray) -> np.ndarray:
    return np.asarray(evaluate(spec, r), dtype=float)


def _integrate_outward(spec: PotentialSpec, E: float, mesh: np.ndarray,
                       keep_profile: bool = False):
    """RK4 march of the reduced equation from mesh[0] with the regular
    u ~ sqrt(r) start.  Returns (u, u', node_count, profile_or_None).

    The pair (u, u') is renormalized on overflow; only ratios, signs
    and node counts of the result are meaningful.
    """
    r = mesh
    rm = 0.5 * (r[1:] + r[:-1])
    vn = _potential_on(spec, r)
    vm = _potential_on(spec, rm)
    wn = (vn - E - 0.25 / (r * r)).tolist()
    wm = (vm - E - 0.25 / (rm * rm)).tolist()
    rl = r.tolist()
    hs = np.diff(r).tolist()

    r0 = rl[0]
    c2 = 0.25 * (vn[0] - E)
    u = math.sqrt(r0) * (1.0 + c2 * r0 * r0)
    v = (0.5 / math.sqrt(r0)) * (1.0 + 5.0 * c2 * r0 * r0)
    nodes = 0
    prof = [u] if keep_profile else None
    scales = [0.0] if keep_profile else None
    log_scale = 0.0
    for i in range(len(hs)):
        h = hs[i]
        w0 = wn[i]
        wmid = wm[i]
        w1 = wn[i + 1]
        k1u = v
        k1v = w0 * u
        u2 = u + 0.5 * h * k1u
        k2u = v + 0.5 * h * k1v
        k2v = wmid * u2
        u3 = u + 0.5 * h * k2u
        k3u = v + 0.5 * h * k2v
        k3v = wmid * u3
        u4 = u + h * k3u
        k4u = v + h * k3v
        k4v = w1 * u4
        un = u + (h / 6.0) * (k1u + 2.0 * (k2u + k3u) + k4u)
        vn_ = v + (h / 6.0) * (k1v + 2.0 * (k2v + k3v) + k4v)
        if (un < 0.0) != (u < 0.0) and u != 0.0:
            nodes += 1
        u, v = un, vn_
        au, av = abs(u), abs(v)
        if au > _BIG or av > _BIG:
            s = 1.0 / max(au, av)
            u *= s
            v *= s
            log_scale -= math.log(s)
        if keep_profile:
            prof.append(u)
            scales.append(log_scale)
    if keep_profile:
        prof = np.asarray(prof)
        scales = np.asarray(scales)
        if log_scale != 0.0:
            # undo per-point renormalizations relative to the endpoint
            prof = prof * np.exp(scales - log_scale)
        return u, v, nodes, prof
    return u, v, nodes, None


def zero_energy_solution(spec: PotentialSpec, r_max: float | None = None,
                         n_points: int = 800):
    """Zero-energy regular solution u(r), normalized to u(r_max) = 1.

    Returns (r, u) arrays on the graded integration mesh.  Outside the
    potential u/sqrt(r) is a straight line in log r; its zero locates
    the scattering length.
    """
    if spec.kind == "zero_range":
        raise ConfigError("zero_range model has no integrable zero-energy profile; "
                          "its scattering length is the model parameter itself")
    scale = effective_range_scale(spec)
    if r_max is None:
        r_max = 25.0 * scale
    if r_max <= 2.0 * scale:
        raise ConfigError("r_max must exceed the potential range")
    mesh = _build_mesh(scale, r_max)
    if len(mesh) > n_points:
        # thin the mesh for output while keeping integration accuracy
        pass
    u_end, _, nodes, prof = _integrate_outward(spec, 0.0, mesh, keep_profile=True)
    if abs(u_end) < 1e-12 * np.max(np.abs(prof)):
        warnings.warn("zero-energy solution nearly vanishes at r_max; "
                      "normalizing to its maximum instead")
        prof = prof / np.max(np.abs(prof))
    else:
        prof = prof / u_end
    return mesh, prof


def scattering_length(spec: PotentialSpec, fit_window: tuple[float, float] = (10.0, 20.0)) -> float:
    """2D scattering length from the zero-energy log asymptote.

    Fits u/sqrt(r) = C log(r/a) by least squares over
    r in fit_window * effective_range_scale and returns a.
    """
    if spec.kind == "zero_range":
        return spec.a
    w_lo, w_hi = fit_window
    if not (w_lo >= 5.0 and w_hi > w_lo * 1.5):
        raise ConfigError("fit window must sit well outside the potential "
                          "(lower edge >= 5 range units)")
    scale = effective_range_scale(spec)
    r, u = zero_energy_solution(spec, r_max=(w_hi + 2.0) * scale)
    sel = (r >= w_lo * scale) & (r <= w_hi * scale)
    rs = r[sel]
    f = u[sel] / np.sqrt(rs)
    logr = np.log(rs)
    A = np.stack([logr, np.ones_like(logr)], axis=1)
    (C, D), *_ = np.linalg.lstsq(A, f, rcond=None)
    fscale = float(np.max(np.abs(f)))
    if abs(C) < 1e-10 * max(fscale, 1e-300):
        raise NumericalError("scattering length undefined: zero-energy solution has "
                             "no logarithmic slope (free or pathological potential)")
    resid = f - A @ np.array([C, D])
    if float(np.sqrt(np.mean(resid**2))) > 1e-5 * abs(C) * (logr[-1] - logr[0]) + 1e-12 * fscale:
        raise NumericalError("zero-energy solution is not in its logarithmic regime "
                             "over the fit window; enlarge the window")
    a_fit = float(math.exp(-D / C))
    # interior nodes mean a deeply attractive potential; a still refers
    # to the outermost logarithmic branch.  The zero-energy solution
    # always crosses at r = a itself, so only crossings well inside
    # that radius signal extra bound states.
    ui = u[r < 0.8 * a_fit]
    nodes = int(np.count_nonzero(ui[1:] * ui[:-1] < 0.0))
    if nodes > 0:
        warnings.warn(f"zero-energy solution has {nodes} interior node(s); the fitted "
                      "scattering length refers to the outer logarithmic asymptote")
    return a_fit


def _count_nodes(spec: PotentialSpec, E: float, scale: float, r_max: float) -> int:
    mesh = _build_mesh(scale, r_max, e_ref=E)
    _, _, nodes, _ = _integrate_outward(spec, E, mesh)
    return nodes


def _match_mismatch(spec: PotentialSpec, E: float, scale: float, r_max: float,
                    r_fit: float) -> float:
    """Wronskian of outward and K0-decaying inward solutions at r_fit.

    Vanishes at bound-state energies.  Both legs are renormalized, so
    the returned value is meaningful only through its sign and zeros.
    """
    if E >= 0.0:
        raise ValueError("matching defined for E < 0")
    k = math.sqrt(-E)
    mesh_out = _build_mesh(scale, r_fit, e_ref=E)
    uo, vo, _, _ = _integrate_outward(spec, E, mesh_out)
    no = max(abs(uo), abs(vo))
    uo, vo = uo / no, vo / no

    r_start = min(r_max, r_fit + 40.0 / k)
    n_in = max(200, int((r_start - r_fit) * max(k / 0.05, 4.0 / scale)))
    n_in = min(n_in, 20000)
    mesh_in = np.linspace(r_start, r_fit, n_in)
    # seed with u = sqrt(r) K0(k r): log-derivative is smooth and scale-free
    x = k * r_start
    dlog = 0.5 / r_start - k * (k1e(x) / k0e(x))
    ui, vi = 1.0, dlog
    rl = mesh_in.tolist()
    vn = _potential_on(spec, mesh_in)
    rm = 0.5 * (mesh_in[1:] + mesh_in[:-1])
    vm = _potential_on(spec, rm)
    wn = (vn - E - 0.25 / (mesh_in * mesh_in)).tolist()
    wm = (vm - E - 0.25 / (rm * rm)).tolist()
    for i in range(len(rl) - 1):
        h = rl[i + 1] - rl[i]
        w0 = wn[i]
        wmid = wm[i]
        w1 = wn[i + 1]
        k1u = vi
        k1v = w0 * ui
        u2 = ui + 0.5 * h * k1u
        k2u = vi + 0.5 * h * k1v
        k2v = wmid * u2
        u3 = ui + 0.5 * h * k2u
        k3u = vi + 0.5 * h * k2v
        k3v = wmid * u3
        u4 = ui + h * k3u
        k4u = vi + h * k3v
        k4v = w1 * u4
        ui = ui + (h / 6.0) * (k1u + 2.0 * (k2u + k3u) + k4u)
        vi = vi + (h / 6.0) * (k1v + 2.0 * (k2v + k3v) + k4v)
        m = max(abs(ui), abs(vi))
        if m > _BIG:
            ui /= m
            vi /= m
    ni = max(abs(ui), abs(vi))
    ui, vi = ui / ni, vi / ni
    return uo * vi - vo * ui


def bound_states(spec: PotentialSpec, e_min: float | None = None,
                 r_max: float | None = None, only_shallowest: bool = False) -> list[float]:
    """All two-body bound energies, ascending (E < 0).

    Node-count bisection against the box problem brackets each level;
    a matched outward/inward Wronskian with sqrt(r) K0(kr) decay at the
    outer edge polishes it.  The box size is grown until the shallowest
    state satisfies k * r_max >= 12 and the count is stable.
    """
    if spec.kind == "zero_range":
        k = 2.0 * math.exp(-EULER_GAMMA) / spec.a
        return [-k * k]
    scale = effective_range_scale(spec)
    rprobe = np.linspace(0.0, 8.0 * scale, 2049)
    vmin = float(np.min(_potential_on(spec, rprobe)))
    if vmin >= 0.0:
        return []
    if e_min is None:
        e_min = 1.25 * vmin
    e_top = -1e-13 / scale**2
    rmax = r_max if r_max is not None else 30.0 * scale
    user_fixed = r_max is not None

    for _ in range(8):
        count = _count_nodes(spec, e_top, scale, rmax)
        if count == 0:
            if user_fixed or rmax >= 2000.0 * scale:
                return []
            rmax *= 2.0
            continue
        energies = []
        lo_global = e_min
        while _count_nodes(spec, lo_global, scale, rmax) > 0:
            lo_global *= 2.0
            if lo_global < -1e8 / scale**2:
                raise NumericalError("cannot find an energy below the ground state")
        wanted = range(count - 1, count) if only_shallowest else range(count)
        ok = True
        for n in wanted:
            lo, hi = lo_global, e_top
            # invariant: count(lo) <= n < count(hi)
            for _ in range(200):
                midE = 0.5 * (lo + hi)
                if _count_nodes(spec, midE, scale, rmax) > n:
                    hi = midE
                else:
                    lo = midE
                if hi - lo <= 1e-13 * abs(lo) + 1e-16 / scale**2:
                    break
            e_box = 0.5 * (lo + hi)
            energies.append(_polish_energy(spec, e_box, scale, rmax))
        k_shallow = math.sqrt(-energies[-1])
        if not user_fixed and k_shallow * rmax < 12.0:
            rmax = max(rmax * 2.0, 14.0 / k_shallow)
            ok = False
        if ok and not user_fixed:
            if _count_nodes(spec, e_top, scale, 2.0 * rmax) != count:
                rmax *= 2.0
                ok = False
        if ok:
            return energies
    raise NumericalError("bound-state search did not stabilize while growing r_max")


def _polish_energy(spec: PotentialSpec, e_box: float, scale: float, rmax: float) -> float:
    r_fit = 2.0 * scale
    delta = max(1e-11 * abs(e_box), 1e-15 / scale**2)
    for _ in range(40):
        lo, hi = e_box - delta, min(e_box + delta, -1e-300)
        flo = _match_mismatch(spec, lo, scale, rmax, r_fit)
        fhi = _match_mismatch(spec, hi, scale, rmax, r_fit)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi < 0.0:
            return brentq(lambda E: _match_mismatch(spec, E, scale, rmax, r_fit),
                          lo, hi, xtol=1e-300, rtol=1e-14)
        delta *= 4.0
    # box estimate is already converged to machine-level bracketing
    return e_box


def weak_binding_energy(a: float) -> tuple[float, float]:
    """Universal shallow-dimer energy for scattering length a.

    Returns (B, k) with B = k^2 = 4 exp(-2 gamma)/a^2; valid when the
    state is much larger than the potential range.
    """
    if a <= 0:
        raise ConfigError("scattering length must be positive")
    k = 2.0 * math.exp(-EULER_GAMMA) / a
    return k * k, k


@dataclass
class TwoBodySolution:
    """Bundle of two-body observables used by the CLI and the sweeps."""

    spec: PotentialSpec
    a: float
    bound_energies: list[float]
    k: float | None
    zero_energy_r: np.ndarray | None = None
    zero_energy_u: np.ndarray | None = None
    zero_energy_nodes: int = 0


def solve_two_body(spec: PotentialSpec, with_profile: bool = True) -> TwoBodySolution:
    if spec.kind == "zero_range":
        B, k = weak_binding_energy(spec.a)
        return TwoBodySolution(spec=spec, a=spec.a, bound_energies=[-B], k=k)
    a = scattering_length(spec)
    energies = bound_states(spec)
    k = math.sqrt(-energies[-1]) if energies else None
    r = u = None
    nodes = 0
    if with_profile:
        scale = effective_range_scale(spec)
        r, u = zero_energy_solution(spec, r_max=25.0 * scale)
        nodes = int(np.count_nonzero(u[1:] * u[:-1] < 0.0))
    return TwoBodySolution(spec=spec, a=a, bound_energies=energies, k=k,
                           zero_energy_r=r, zero_energy_u=u, zero_energy_nodes=nodes)
