"""Adiabatic channel tables and the hyperradial bound-state problem.

A channel table holds, on a log-spaced hyperradius grid, the angular
eigenvalues lambda_n(rho) and the nonadiabatic couplings

    Q_nm = <phi_n, (1 + 2K) d2/drho2 phi_m>,
    P_nm = <phi_n, (1 + 2K) d/drho phi_m>,

with channel functions normalized to <phi,(1+2K)phi> = 1 (that bracket
is the full three-component norm carried by one Faddeev component).
The radial system for f_n(rho), with epsilon = 2 E (the 2m/hbar^2 = 2
of three equal unit masses),

    -f_n'' + [(lambda_n + 3/4)/rho^2] f_n
           - sum_m [Q_nm + 2 P_nm d/drho] f_m  =  epsilon f_n,

is integrated by RK4 shooting; single-channel spectra come from
node-count bisection against the outer box plus a matched-logderivative
polish, coupled ones from a determinant match.

The one-channel effective potential U = (lambda + 3/4)/rho^2 - Q_11
tends to 2 E_2 - 1/(4 rho^2) whenever a two-body bound state exists:
an inverse-square attraction seen by the atom-dimer system regardless
of any other scale, which is what makes the spectrum universal.  For
the zero-range table everything is semi-analytic: lambda_1 comes from
the transcendental rule, Q_11 from differencing conical profiles at
small k rho and exactly -1/(3 rho^2) for k rho >= 12 (the K0-profile
value), with a smooth blend between.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import kve

from .angular import AngularGrid, inner, solve_angular
from .errors import ConfigError, NumericalError
from .potentials import PotentialSpec, effective_range_scale
from .twobody import EULER_GAMMA, bound_states, scattering_length
from .zerorange import free_angular_solution, q11_asymptotic, solve_lambda_zero_range

__all__ = [
    "ChannelTable",
    "build_channel_table",
    "effective_potential",
    "ThreeBodyState",
    "solve_bound_states",
    "count_zero_energy_nodes",
    "rms_hyperradius",
]

_BIG = 1e250


@dataclass
class ChannelTable:
    """Angular eigenvalues and couplings on a hyperradius grid.

    e_thr is the lowest dissociation threshold in epsilon = 2E units
    (twice the dimer energy, or 0 with no dimer); c_inf the coefficient
    of the 1/rho^2 tail of U_1 - e_thr (-1/4 with a dimer, else
    lambda_inf + 3/4).  a is the two-body scattering length.
    """

    rho: np.ndarray
    lam: np.ndarray            # (M, N)
    q: np.ndarray              # (M, N, N)
    p: np.ndarray              # (M, N, N)
    a: float
    e_thr: float
    c_inf: float
    kind: str
    _lam_s: list = field(default=None, init=False, repr=False)
    _q_s: list = field(default=None, init=False, repr=False)
    _p_s: list = field(default=None, init=False, repr=False)

    @property
    def n_channels(self) -> int:
        return self.lam.shape[1]

    @property
    def length_scale(self) -> float:
        """Scale of the bound-state region: the scattering length when a
        dimer exists, otherwise the potential range (Borromean case)."""
        return self.a if self.e_thr < 0 else self.rho[0] / 0.15

    def _splines(self):
        if self._lam_s is None:
            t = np.log(self.rho)
            r2 = self.rho[:, None, None] ** 2
            self._lam_s = CubicSpline(t, self.lam, axis=0)
            self._q_s = CubicSpline(t, self.q * r2, axis=0)
            self._p_s = CubicSpline(t, self.p * self.rho[:, None, None], axis=0)
        return self._lam_s, self._q_s, self._p_s

    def interp(self, rho):
        """(lam, q, p) arrays at arbitrary rho; analytic continuation
        outside the tabulated range (centrifugal inside, universal
        inverse-square tail outside)."""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        if np.any(rho <= 0):
            raise ConfigError("rho must be positive")
        ls, qs, ps = self._splines()
        t = np.log(np.clip(rho, self.rho[0], self.rho[-1]))
        lam = ls(t)
        q = qs(t) / rho[:, None, None] ** 2
        p = ps(t) / rho[:, None, None]
        hi = rho > self.rho[-1]
        if np.any(hi):
            # beyond the table U_1 - e_thr -> c_inf/rho^2; higher
            # channels saturate at their last tabulated eigenvalue
            n = self.n_channels
            q[hi] = 0.0
            p[hi] = 0.0
            lam[hi] = np.broadcast_to(self.lam[-1], (int(hi.sum()), n)).copy()
            if self.e_thr < 0:
                lam[hi, 0] = self.e_thr * rho[hi] ** 2 + self.c_inf - 1.0 / 3.0 - 0.75
                q[hi, 0, 0] = -1.0 / (3.0 * rho[hi] ** 2)
            else:
                lam[hi, 0] = self.c_inf - 0.75
        return lam, q, p

    def u_eff(self, rho):
        """Effective potentials U_n(rho) = (lam_n + 3/4)/rho^2 - Q_nn."""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        lam, q, p = self.interp(rho)
        qd = np.einsum("mii->mi", q)
        return (lam + 0.75) / rho[:, None] ** 2 - qd


def _zero_range_q11(rho: float, a: float, grid: AngularGrid, dt: float = 2e-3) -> float:
    """Diagonal coupling of the lowest contact channel at one rho.

    Central differences of the normalized profile in ln rho, Richardson
    extrapolated; d2/drho2 = (d2/dt2 - d/dt)/rho^2.
    """
    def prof(r):
        nu = solve_lambda_zero_range(r, a, 1)[0].nu
        f = free_angular_solution(nu, grid.alpha)
        return f / math.sqrt(inner(grid, f, f, with_kernel=True))

    f0 = prof(rho)
    fp, fm = prof(rho * math.exp(dt)), prof(rho * math.exp(-dt))
    fp2, fm2 = prof(rho * math.exp(0.5 * dt)), prof(rho * math.exp(-0.5 * dt))
    d1_h = (fp - fm) / (2.0 * dt)
    d1_h2 = (fp2 - fm2) / dt
    d1 = (4.0 * d1_h2 - d1_h) / 3.0
    d2_h = (fp - 2.0 * f0 + fm) / dt**2
    d2_h2 = (fp2 - 2.0 * f0 + fm2) / (0.5 * dt) ** 2
    d2 = (4.0 * d2_h2 - d2_h) / 3.0
    dd = (d2 - d1) / rho**2
    return inner(grid, f0, dd, with_kernel=True)


def _zero_range_table(a: float, rho_grid: np.ndarray | None, grid: AngularGrid | None,
                      n_points: int) -> ChannelTable:
    if rho_grid is None:
        # The inner limb matters: lambda + 3/4 changes sign near 8e-4 a and
        # the pocket above it is close to the critical -1/(4 rho^2), so the
        # ground-state energy keeps drifting until the mesh starts around
        # 1e-5 a.  (Dirichlet at 1e-3 a is off by 15% in epsilon_0.)
        rho_grid = np.geomspace(1e-5 * a, 60.0 * a, n_points)
    grid = grid or AngularGrid(n=500)
    k = 2.0 * math.exp(-EULER_GAMMA) / a
    m = len(rho_grid)
    lam = np.empty((m, 1))
    q = np.zeros((m, 1, 1))
    for i, r in enumerate(rho_grid):
        lam[i, 0] = solve_lambda_zero_range(r, a, 1)[0].lam
        kr = k * r
        if kr >= 12.0:
            q[i, 0, 0] = q11_asymptotic(r)
        else:
            qfd = _zero_range_q11(r, a, grid)
            if kr <= 8.0:
                q[i, 0, 0] = qfd
            else:
                w = 0.5 * (1.0 + math.cos(math.pi * (kr - 8.0) / 4.0))
                q[i, 0, 0] = w * qfd + (1.0 - w) * q11_asymptotic(r)
    return ChannelTable(rho=np.asarray(rho_grid, dtype=float), lam=lam, q=q,
                        p=np.zeros_like(q), a=a, e_thr=-2.0 * k * k, c_inf=-0.25,
                        kind="zero_range")


def _adaptive_grading(base: float, n: int, rho_over_scale: float) -> float:
    """Grading that keeps ~6 grid points inside the potential support.

    The pair potential lives at alpha < scale/(sqrt(2) rho), which
    outruns any fixed sinh grading as rho grows; solve sinh(g)/g for the
    needed compression and clamp to the validation bound of 12.
    """
    width = 1.0 / (math.sqrt(2.0) * max(rho_over_scale, 1.0))
    target = 3.0 * math.pi / (n * width)
    if target <= math.sinh(base) / base:
        return base
    g = max(base, math.log(2.0 * target * base))
    for _ in range(3):
        g = math.log(2.0 * target * g)
    return min(g, 12.0)


def _finite_point(spec: PotentialSpec, rho: float, n_channels: int,
                  grid_n: int, grading: float, dt: float):
    scale = effective_range_scale(spec)
    grid = AngularGrid(n=grid_n,
                       grading=_adaptive_grading(grading, grid_n, rho / scale))

    def solve(r):
        sp = solve_angular(spec, r, grid, n_channels=n_channels)
        return sp.lam, sp.vectors

    lam0, v0 = solve(rho)
    _, vp = solve(rho * math.exp(dt))
    _, vm = solve(rho * math.exp(-dt))
    for v in (vp, vm):
        for j in range(n_channels):
            if inner(grid, v0[:, j], v[:, j], with_kernel=True) < 0.0:
                v[:, j] *= -1.0
    d1 = (vp - vm) / (2.0 * dt)
    d2 = (vp - 2.0 * v0 + vm) / dt**2
    ddrho = (d2 - d1) / rho**2
    drho = d1 / rho
    qm = np.empty((n_channels, n_channels))
    pm = np.empty((n_channels, n_channels))
    for i in range(n_channels):
        for j in range(n_channels):
            qm[i, j] = inner(grid, v0[:, i], ddrho[:, j], with_kernel=True)
            pm[i, j] = inner(grid, v0[:, i], drho[:, j], with_kernel=True)
    return lam0, qm, pm


def build_channel_table(spec: PotentialSpec, rho_grid=None, n_channels: int = 1,
                        grid: AngularGrid | None = None, workers: int | None = None,
                        n_points: int = 64) -> ChannelTable:
    """Tabulate lambda_n, Q, P over hyperradius for a pair potential.

    Zero-range specs take the semi-analytic single-channel route
    (n_channels must be 1).  Finite-range specs diagonalize the angular
    problem at each grid point and difference the channel functions in
    ln rho; workers > 1 distributes grid points over processes.
    """
    if spec.kind == "zero_range":
        if n_channels != 1:
            raise ConfigError("the contact table is single-channel; finite-range "
                              "potentials support coupled channels")
        return _zero_range_table(spec.a, rho_grid, grid, max(n_points, 48) * 2)

    a = scattering_length(spec)
    e2 = bound_states(spec)
    scale = effective_range_scale(spec)
    if rho_grid is None:
        if e2:
            k2 = math.sqrt(-e2[-1])
            hi = max(20.0 / k2, 25.0 * a, 30.0 * scale)
        else:
            # no resolvable dimer: a can come out astronomically large
            # (log-shallow states), so don't chase it; the table needs
            # the potential region plus enough tail to read off c_inf
            hi = max(60.0 * scale, min(10.0 * a, 500.0 * scale))
        rho_grid = np.geomspace(0.15 * scale, hi, n_points)
    rho_grid = np.asarray(rho_grid, dtype=float)
    gn = grid.n if grid is not None else 320
    gc = grid.grading if grid is not None else 6.0
    dt = 1e-2
    args = [(spec, float(r), n_channels, gn, gc, dt) for r in rho_grid]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_finite_point, *zip(*args)))
    else:
        rows = [_finite_point(*arg) for arg in args]
    m = len(rho_grid)
    lam = np.stack([r[0] for r in rows])
    q = np.stack([r[1] for r in rows])
    p = np.stack([r[2] for r in rows])
    # P is exactly antisymmetric for normalized channels; the dense
    # nonsymmetric eigensolve only satisfies that to interpolation
    # accuracy, so project the constraint back in
    p = 0.5 * (p - np.transpose(p, (0, 2, 1)))
    if e2:
        # breakup threshold: deepest dimer + free spectator
        e_thr, c_inf = 2.0 * e2[0], -0.25
    else:
        e_thr, c_inf = 0.0, lam[-1, 0] + 0.75
    return ChannelTable(rho=rho_grid, lam=lam, q=q, p=p, a=a,
                        e_thr=e_thr, c_inf=c_inf, kind="finite")


def effective_potential(table: ChannelTable, rho, channel: int = 0):
    """U_channel(rho); scalar in, scalar out."""
    if not (0 <= channel < table.n_channels):
        raise ConfigError("channel index out of range")
    u = table.u_eff(np.atleast_1d(rho))[:, channel]
    return float(u[0]) if np.ndim(rho) == 0 else u


# ---------------------------------------------------------------- radial

def _radial_mesh(table: ChannelTable, rho_end: float, eps_ref: float,
                 refine: int = 1) -> np.ndarray:
    s = table.length_scale
    # start at the table edge: the channel potential is near-critically
    # attractive down to ~1e-3 s and the eigenvalue remembers the inner phase
    lo = max(table.rho[0] * 0.5, 1e-6 * s)
    ratio = 1.02 ** (1.0 / refine)
    if rho_end <= 2.5 * s:
        n = max(60 * refine, int(math.log(rho_end / lo) / math.log(ratio)) + 1)
        return np.geomspace(lo, rho_end, n)
    pieces = [np.geomspace(lo, 2.0 * s, int(math.log(2.0 * s / lo) / math.log(ratio)) + 1)]
    h = s / (64.0 * refine)
    mid = min(12.0 * s, rho_end)
    pieces.append(np.linspace(2.0 * s, mid, max(int((mid - 2.0 * s) / h), 2) + 1)[1:])
    if rho_end > mid:
        kap = math.sqrt(max(table.e_thr - eps_ref, -eps_ref, 1e-300))
        cap = min(0.35 / kap, 3.0 * s) / refine
        grow = 1.04 ** (1.0 / refine)
        tail = [mid]
        while tail[-1] < rho_end:
            h = min(h * grow, cap)
            tail.append(tail[-1] + h)
        tail[-1] = rho_end
        pieces.append(np.asarray(tail[1:]))
    return np.concatenate(pieces)


def _rk4_w(wn, wm, hs, u0, v0):
    """March u'' = w(rho) u over precomputed node/midpoint w arrays.
    Returns (u, v, nodes) with on-the-fly renormalization."""
    u, v = u0, v0
    nodes = 0
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
        vn = v + (h / 6.0) * (k1v + 2.0 * (k2v + k3v) + k4v)
        if (un < 0.0) != (u < 0.0) and u != 0.0:
            nodes += 1
        u, v = un, vn
        au, av = abs(u), abs(v)
        if au > _BIG or av > _BIG:
            sc = 1.0 / max(au, av)
            u *= sc
            v *= sc
    return u, v, nodes


def _u1_on(table: ChannelTable, mesh: np.ndarray) -> np.ndarray:
    return table.u_eff(mesh)[:, 0]


def _outward(table: ChannelTable, eps: float, mesh: np.ndarray,
             keep_profile: bool = False):
    u_nodes = _u1_on(table, mesh)
    u_mid = _u1_on(table, 0.5 * (mesh[1:] + mesh[:-1]))
    wn = (u_nodes - eps).tolist()
    wm = (u_mid - eps).tolist()
    hs = np.diff(mesh).tolist()
    lam0, _, _ = table.interp(mesh[0])
    s_exp = 0.5 + math.sqrt(max(1.0 + lam0[0, 0], 0.0))
    u0 = 1.0
    v0 = s_exp / mesh[0]
    if not keep_profile:
        return _rk4_w(wn, wm, hs, u0, v0)
    # re-run storing the profile (rare path, only for final states)
    prof = [u0]
    u, v = u0, v0
    logs = [0.0]
    ls = 0.0
    for i in range(len(hs)):
        u, v, _ = _rk4_w(wn[i:i + 2], [wm[i]], [hs[i]], u, v)
        m = max(abs(u), abs(v))
        if m > 1e200:
            u /= m
            v /= m
            ls += math.log(m)
        prof.append(u)
        logs.append(ls)
    prof = np.asarray(prof)
    logs = np.asarray(logs)
    return prof * np.exp(logs - logs[-1]), u, v


def _inward_logderiv(table: ChannelTable, eps: float, rho_fit: float,
                     rho_box: float):
    """Log-derivative at rho_fit of the solution decaying at the box edge."""
    kap = math.sqrt(max(table.e_thr - eps, 1e-300))
    p_idx = math.sqrt(max(table.c_inf + 0.25, 0.0))
    start = min(rho_box, rho_fit + 40.0 / kap)
    n = max(300, min(int((start - rho_fit) * (kap / 0.04 + 2.0 / table.length_scale)), 30000))
    mesh = np.linspace(start, rho_fit, n)
    x = kap * start
    kp = kve(p_idx, x)
    dk = -0.5 * (kve(p_idx - 1.0, x) + kve(p_idx + 1.0, x))
    dlog = 0.5 / start + kap * dk / kp
    u_nodes = _u1_on(table, mesh)
    u_mid = _u1_on(table, 0.5 * (mesh[1:] + mesh[:-1]))
    wn = (u_nodes - eps).tolist()
    wm = (u_mid - eps).tolist()
    hs = np.diff(mesh).tolist()
    u, v, _ = _rk4_w(wn, wm, hs, 1.0, dlog)
    return u, v


def _masked_nodes(u: np.ndarray) -> int:
    """Sign changes of u, ignoring the numerically dead tail.

    One-sided shots pick up the growing solution with arbitrary sign
    once the true solution has decayed below roundoff; crossings there
    are artifacts, so only samples above a relative floor count.
    """
    u = np.asarray(u)
    live = u[np.abs(u) > 1e-9 * np.max(np.abs(u))]
    return int(np.count_nonzero(live[1:] * live[:-1] < 0.0))


def _count_nodes_radial(table: ChannelTable, eps: float, rho_box: float,
                        refine: int = 1, exact: bool = False) -> int:
    mesh = _radial_mesh(table, rho_box, eps, refine)
    if exact:
        prof, _, _ = _outward(table, eps, mesh, keep_profile=True)
        return _masked_nodes(prof)
    _, _, nodes = _outward(table, eps, mesh)
    return nodes


def _mismatch(table: ChannelTable, eps: float, rho_fit: float, rho_box: float) -> float:
    mesh = _radial_mesh(table, rho_fit, eps)
    uo, vo, _ = _outward(table, eps, mesh)
    no = max(abs(uo), abs(vo))
    ui, vi = _inward_logderiv(table, eps, rho_fit, rho_box)
    ni = max(abs(ui), abs(vi))
    return (uo / no) * (vi / ni) - (vo / no) * (ui / ni)


@dataclass
class ThreeBodyState:
    """One hyperradial bound state.

    energy is the physical E (epsilon/2); nodes counts radial zeros.
    rho/f sample the dominant-channel radial function, unit-normalized
    as int f^2 drho = 1.
    """

    energy: float
    epsilon: float
    nodes: int
    rho: np.ndarray
    f: np.ndarray
    channel_weights: np.ndarray | None = None


def rms_hyperradius(state: ThreeBodyState) -> float:
    """sqrt(<rho^2>) over the radial density.

    With mass-scaled Jacobi coordinates rho^2 = sum_i (r_i - R_cm)^2,
    which also equals the mean square pair separation (average over the
    three pairs).
    """
    w = state.f**2
    norm = np.trapezoid(w, state.rho)
    return math.sqrt(np.trapezoid(w * state.rho**2, state.rho) / norm)


def rms_distance(state: ThreeBodyState) -> float:
    """Per-particle rms distance from the center of mass.

    sqrt(<rho^2>/3); this is the size convention the universal-ratio
    tables quote (0.111 a and 0.927 a for the two zero-range states).
    rms_hyperradius carries the sqrt(3)-larger pair-separation reading.
    """
    return rms_hyperradius(state) / math.sqrt(3.0)


def count_zero_energy_nodes(table: ChannelTable, rho_max: float,
                            refine: int = 1) -> int:
    """Radial node count at the lowest dissociation threshold.

    Equals the number of bound states resolvable within rho_max; growth
    under doubling rho_max would reveal further (shallower) states, so
    stability of this count is the practical no-more-states check.
    refine > 1 halves every integration step that many times over, for
    grid-convergence evidence.
    """
    if rho_max <= table.rho[0]:
        raise ConfigError("rho_max inside the tabulated core")
    return _count_nodes_radial(table, table.e_thr, rho_max, refine, exact=True)


def solve_bound_states(table: ChannelTable, n_states: int | None = None,
                       rho_box: float | None = None) -> list[ThreeBodyState]:
    """Bound states below the lowest threshold, ascending in energy.

    Single-channel tables use node-count bisection plus a polished
    logderivative match; multichannel ones a determinant match seeded
    by the uncoupled spectra (see _solve_coupled).
    """
    if table.n_channels == 1:
        return _solve_single(table, n_states, rho_box)
    return _solve_coupled(table, n_states, rho_box)


def _solve_single(table, n_states, rho_box):
    a = table.length_scale
    box = rho_box if rho_box is not None else 60.0 * a
    user_fixed = rho_box is not None
    probe = np.geomspace(table.rho[0], table.rho[-1], 400)
    u_min = float(np.min(table.u_eff(probe)[:, 0]))
    if u_min >= table.e_thr:
        return []
    eps_lo = 1.3 * u_min - abs(table.e_thr)
    rho_fit = float(np.clip(probe[np.argmin(table.u_eff(probe)[:, 0])], 0.05 * a, 3.0 * a))

    # marginal halos can need several box doublings before the count and
    # the kappa*box criterion both settle, so the budget is generous
    for _ in range(14):
        count = _count_nodes_radial(table, table.e_thr, box)
        if count == 0:
            if user_fixed or box > 3000.0 * a:
                return []
            box *= 2.0
            continue
        if n_states is not None:
            count = min(count, n_states)
        while _count_nodes_radial(table, eps_lo, box) > 0:
            eps_lo *= 2.0
            if eps_lo < -1e9 / a**2:
                raise NumericalError("no energy below the radial ground state")
        states = []
        for n in range(count):
            lo, hi = eps_lo, table.e_thr
            for _ in range(200):
                midE = 0.5 * (lo + hi)
                if _count_nodes_radial(table, midE, box) > n:
                    hi = midE
                else:
                    lo = midE
                if hi - lo <= 1e-13 * abs(lo):
                    break
            eps = _polish_radial(table, 0.5 * (lo + hi), rho_fit, box)
            # node targets beyond the physical count pile up at the
            # threshold (the marginal -1/(4 rho^2) tail crosses zero at
            # finite box); those are not bound states.  The (8/box)^2
            # floor is the box quantization scale: anything shallower is
            # indistinguishable from a box artifact at this box size and
            # must not drive further box growth (with e_thr = 0 the
            # relative test alone never fires)
            gap = table.e_thr - eps
            if gap <= 1e-9 * abs(table.e_thr) or gap <= (8.0 / box) ** 2:
                break
            if states and abs(eps - states[-1]) <= 1e-8 * abs(states[-1]):
                continue
            states.append(eps)
        if not states:
            return []
        kap = math.sqrt(max(table.e_thr - states[-1], 1e-300))
        if not user_fixed and kap * box < 12.0:
            box = max(2.0 * box, 14.0 / kap)
            continue
        if not user_fixed and _count_nodes_radial(table, table.e_thr, 2.0 * box) != count \
                and n_states is None:
            box *= 2.0
            continue
        return [_finalize_state(table, eps, box) for eps in states]
    raise NumericalError("radial search did not stabilize while growing the box")


def _polish_radial(table, eps_box, rho_fit, box):
    delta = max(2e-11 * abs(eps_box), 1e-14 / table.length_scale**2)
    top = table.e_thr - 1e-14 * abs(table.e_thr)
    for _ in range(40):
        lo, hi = eps_box - delta, min(eps_box + delta, top)
        flo = _mismatch(table, lo, rho_fit, box)
        fhi = _mismatch(table, hi, rho_fit, box)
        if flo * fhi < 0.0:
            return brentq(lambda e: _mismatch(table, e, rho_fit, box),
                          lo, hi, xtol=1e-300, rtol=1e-14)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        delta *= 4.0
    return eps_box


def _finalize_state(table, eps, box) -> ThreeBodyState:
    kap = math.sqrt(max(table.e_thr - eps, 1e-300))
    rho_end = min(box, 1.2 * (table.rho[0] + 40.0 / kap))
    mesh = _radial_mesh(table, rho_end, eps)
    prof, _, _ = _outward(table, eps, mesh, keep_profile=True)
    # Cut the exponentially wrong outer tail of the one-sided shot at the
    # |u| minimum past the turning region; the shot leaves the decaying
    # branch there (often through a sign flip) at the level of the
    # residual energy error, so everything beyond is contamination.
    tail = np.abs(prof)
    far0 = int(np.searchsorted(mesh, 4.0 / kap))
    last = len(prof) - 1
    if far0 < last - 1:
        j = far0 + int(np.argmin(tail[far0:]))
        if j < last:
            last = max(j - 1, 1)
    mesh, prof = mesh[:last + 1], prof[:last + 1]
    nrm = math.sqrt(np.trapezoid(prof**2, mesh))
    prof = prof / nrm
    if prof[np.argmax(np.abs(prof))] < 0:
        prof = -prof
    return ThreeBodyState(energy=0.5 * eps, epsilon=eps, nodes=_masked_nodes(prof),
                          rho=mesh, f=prof)


# ------------------------------------------------------- coupled channels

def _coupled_mats(table, mesh):
    lam, q, p = table.interp(mesh)
    lamm, qm, pm = table.interp(0.5 * (mesh[1:] + mesh[:-1]))
    return (lam, q, p), (lamm, qm, pm)


def _coupled_rhs(lam, q, p, rho, eps):
    n = lam.shape[-1]
    A = -q.copy()
    A[np.arange(n), np.arange(n)] += (lam + 0.75) / rho**2 - eps
    B = -2.0 * p
    return A, B


def _propagate_coupled(table, eps, mesh, direction: int):
    """RK4 for F'' = A F + B F' with column renormalization; returns
    (F, F') at the end of mesh (mesh already ordered for direction)."""
    n = table.n_channels
    (lam, q, p), (lamm, qm, pm) = _coupled_mats(table, mesh)
    if direction > 0:
        lam0, _, _ = table.interp(mesh[0])
        s = 0.5 + np.sqrt(np.maximum(1.0 + lam0[0], 0.0))
        F = np.eye(n)
        dF = np.diag(s / mesh[0])
    else:
        kap1 = math.sqrt(max(table.e_thr - eps, 1e-300))
        kapn = math.sqrt(max(-eps, 1e-300))
        F = np.eye(n)
        dF = np.zeros((n, n))
        for j in range(n):
            kk = kap1 if j == 0 and table.e_thr < 0 else kapn
            dF[j, j] = 0.5 / mesh[0] - kk
    hs = np.diff(mesh)
    for i in range(len(hs)):
        h = hs[i]
        A0, B0 = _coupled_rhs(lam[i], q[i], p[i], mesh[i], eps)
        Am, Bm = _coupled_rhs(lamm[i], qm[i], pm[i], 0.5 * (mesh[i] + mesh[i + 1]), eps)
        A1, B1 = _coupled_rhs(lam[i + 1], q[i + 1], p[i + 1], mesh[i + 1], eps)
        k1f = dF
        k1d = A0 @ F + B0 @ dF
        f2 = F + 0.5 * h * k1f
        d2 = dF + 0.5 * h * k1d
        k2f = d2
        k2d = Am @ f2 + Bm @ d2
        f3 = F + 0.5 * h * k2f
        d3 = dF + 0.5 * h * k2d
        k3f = d3
        k3d = Am @ f3 + Bm @ d3
        f4 = F + h * k3f
        d4 = dF + h * k3d
        k4f = d4
        k4d = A1 @ f4 + B1 @ d4
        F = F + (h / 6.0) * (k1f + 2.0 * (k2f + k3f) + k4f)
        dF = dF + (h / 6.0) * (k1d + 2.0 * (k2d + k3d) + k4d)
        m = max(np.max(np.abs(F)), np.max(np.abs(dF)))
        if m > 1e120:
            # renormalize the solution basis; spans are what matter
            Rq, _ = np.linalg.qr(np.vstack((F, dF)))
            F, dF = Rq[:n], Rq[n:]
    return F, dF


def _sign_root(f, lo, hi, flo, fhi):
    """Bisection on a sign change that tolerates scattered non-finite
    values (the coupled matching determinant has poles where the
    outward fundamental matrix turns singular)."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if not math.isfinite(fm):
            mid = lo + 0.61803398875 * (hi - lo)
            fm = f(mid)
            if not math.isfinite(fm):
                break
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-14 * max(abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def _coupled_det(table, eps, rho_fit, box):
    mesh_out = _radial_mesh(table, rho_fit, eps)
    Fo, dFo = _propagate_coupled(table, eps, mesh_out, +1)
    kap = math.sqrt(max(table.e_thr - eps, -eps, 1e-300))
    start = min(box, rho_fit + 40.0 / kap)
    n_in = max(400, min(int((start - rho_fit) * (kap / 0.04 + 2.0 / table.length_scale)), 30000))
    mesh_in = np.linspace(start, rho_fit, n_in)
    Fi, dFi = _propagate_coupled(table, eps, mesh_in, -1)
    try:
        Yo = dFo @ np.linalg.inv(Fo)
        Yi = dFi @ np.linalg.inv(Fi)
    except np.linalg.LinAlgError:
        return np.nan
    return float(np.linalg.det(Yo - Yi))


def _solve_coupled(table, n_states, rho_box):
    a = table.length_scale
    box = rho_box if rho_box is not None else 60.0 * a
    single = ChannelTable(rho=table.rho, lam=table.lam[:, :1],
                          q=table.q[:, :1, :1], p=table.p[:, :1, :1],
                          a=table.a, e_thr=table.e_thr, c_inf=table.c_inf,
                          kind=table.kind)
    seeds = [s.epsilon for s in _solve_single(single, n_states, rho_box)]
    if not seeds:
        return []
    probe = np.geomspace(table.rho[0], table.rho[-1], 300)
    rho_fit = float(np.clip(probe[np.argmin(table.u_eff(probe)[:, 0])],
                            0.05 * a, 3.0 * a))
    out = []
    for eps0 in seeds:
        # the coupling is a second-order correction: search near the seed
        span = 0.25 * abs(eps0 - table.e_thr) + 1e-12 * abs(table.e_thr)
        lo = eps0 - span
        hi = min(eps0 + span, table.e_thr * (1.0 + 1e-12) if table.e_thr < 0
                 else -1e-15 / a**2)
        grid = np.linspace(lo, hi, 41)
        vals = [_coupled_det(table, e, rho_fit, box) for e in grid]
        root = None
        best = None
        for i in range(len(grid) - 1):
            v0, v1 = vals[i], vals[i + 1]
            if not (math.isfinite(v0) and math.isfinite(v1)):
                continue
            if v0 == 0.0:
                root = grid[i]
                break
            if v0 * v1 < 0.0 and abs(v0) < 1e6 * abs(v1) and abs(v1) < 1e6 * abs(v0):
                cand = _sign_root(lambda e: _coupled_det(table, e, rho_fit, box),
                                  grid[i], grid[i + 1], v0, v1)
                if best is None or abs(cand - eps0) < abs(best - eps0):
                    best = cand
        root = root if root is not None else best
        if root is None:
            raise NumericalError("coupled matching found no root near the "
                                 "single-channel seed; refine the table")
        state = _finalize_state(single, root, box)
        state.epsilon = root
        state.energy = 0.5 * root
        out.append(state)
    return out
