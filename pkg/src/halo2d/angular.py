"""Angular Faddeev eigenproblem at fixed hyperradius.

Mass-scaled Jacobi coordinates for three identical bosons (m = 1):
x = r_pair / sqrt(2), y = sqrt(2/3) r_spectator, hyperradius
rho^2 = x^2 + y^2 (equal to the mean square pair separation) and
hyperangle alpha = arctan(x/y), so the interacting pair sits at
r = sqrt(2) rho sin(alpha).

One Faddeev component phi(alpha) at fixed rho obeys

    Lam2 phi + 2 rho^2 V(sqrt2 rho sin alpha) [phi + 2 K phi] = lambda phi,

Lam2 = -(1/sin 2a) d/da (sin 2a d/da), with K the kinematic-rotation
average coupling the component written in one pair's coordinates to the
other two.  The factor 2 in front of V is 2m/hbar^2 for the three-body
Schroedinger equation in natural units.

The discretization is a flux-conservative second-order scheme on a
grid graded toward alpha = 0 (where the pair potential lives once
rho >> range), with the natural boundary conditions supplied by the
vanishing of sin 2a at both ends.  K becomes a dense matrix through
4-point Lagrange interpolation on the grid extended by even reflection
at both ends.  The operator with V is not symmetric, so spectra come
from dense nonsymmetric eig; V = 0 takes a symmetric tridiagonal path.

For any V the discrete problem inherits the continuum's spurious
solution: (1 + 2K) annihilates cos 2a exactly, so (lambda = 8, cos 2a)
solves the equation while carrying zero total wavefunction.  Spurious
vectors are recognized by a small ratio <phi,(1+2K)phi>/<phi,phi> and
dropped (the full norm of a physical state is exactly that bracket).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eig, eigh_tridiagonal

from .errors import ConfigError, NumericalError
from .potentials import PotentialSpec, evaluate

__all__ = [
    "hyperspherical_from_jacobi",
    "rotated_angle",
    "AngularGrid",
    "kernel_average",
    "inner",
    "AngularSpectrum",
    "solve_angular",
]

SPURIOUS_NORM_CUT = 0.05


def hyperspherical_from_jacobi(x, y):
    """(rho, alpha) from mass-scaled Jacobi vector lengths x, y >= 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise ConfigError("Jacobi lengths must be non-negative")
    rho = np.hypot(x, y)
    if np.any(rho == 0):
        raise ConfigError("triple-coincidence point has no hyperangle")
    return rho, np.arctan2(x, y)


def rotated_angle(alpha, beta):
    """Hyperangle of the same configuration seen from another pair.

    beta is the angle between the Jacobi vectors' relative orientation;
    sin^2 a' = 1/4 sin^2 a + 3/4 cos^2 a + (sqrt3/2) sin a cos a cos b,
    and beta covering a full period reaches both rotation signs.
    At alpha = 0: a' = pi/3 for every beta.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    s, c = np.sin(alpha), np.cos(alpha)
    s2 = 0.25 * s * s + 0.75 * c * c + (math.sqrt(3.0) / 2.0) * s * c * np.cos(beta)
    return np.arcsin(np.sqrt(np.clip(s2, 0.0, 1.0)))


@dataclass
class AngularGrid:
    """Graded hyperangular grid with quadrature weights and the K matrix.

    Nodes are images of a uniform grid under a sinh map clustering
    toward alpha = 0; weights are exact cell integrals of sin 2a, so
    they sum to exactly 1 = int_0^{pi/2} sin 2a da.  n_beta controls
    the trapezoid rule for the kernel's orientation average.
    """

    n: int = 600
    grading: float = 6.0
    n_beta: int = 96
    alpha: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    _kernel: np.ndarray | None = field(default=None, init=False, repr=False)
    _interfaces: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 16:
            raise ConfigError("angular grid needs at least 16 nodes")
        if not (0.0 < self.grading <= 12.0):
            raise ConfigError("grading must lie in (0, 12]")
        t = (np.arange(self.n) + 0.5) / self.n
        ti = np.arange(self.n + 1) / self.n
        c = self.grading
        self.alpha = (math.pi / 2.0) * np.sinh(c * t) / math.sinh(c)
        self._interfaces = (math.pi / 2.0) * np.sinh(c * ti) / math.sinh(c)
        # integral of sin 2a over each cell
        self.weights = 0.5 * (np.cos(2.0 * self._interfaces[:-1])
                              - np.cos(2.0 * self._interfaces[1:]))

    def kernel_matrix(self) -> np.ndarray:
        """Dense matrix of K, the two-rotated-pairs orientation average."""
        if self._kernel is None:
            self._kernel = _build_kernel(self.alpha, self.n_beta)
        return self._kernel


def _lagrange_rows(alpha: np.ndarray, queries: np.ndarray):
    """4-point Lagrange interpolation weights on the evenly extended grid.

    Returns (idx, wts) arrays of shape (len(queries), 4) where idx are
    indices into the original grid (mirrors folded back) and rows of
    wts sum to 1.
    """
    n = len(alpha)
    ext = np.concatenate((-alpha[2::-1], alpha, math.pi - alpha[:n - 4:-1]))
    fold = np.concatenate((np.arange(2, -1, -1), np.arange(n), np.arange(n - 1, n - 4, -1)))
    pos = np.searchsorted(ext, queries)
    i0 = np.clip(pos - 2, 0, len(ext) - 4)
    idx = i0[:, None] + np.arange(4)[None, :]
    xs = ext[idx]
    w = np.ones_like(xs)
    for j in range(4):
        for m in range(4):
            if m == j:
                continue
            w[:, j] *= (queries - xs[:, m]) / (xs[:, j] - xs[:, m])
    return fold[idx], w


def _build_kernel(alpha: np.ndarray, n_beta: int) -> np.ndarray:
    n = len(alpha)
    # integrand is even and pi-periodic in beta: fold to [0, pi]
    beta = np.linspace(0.0, math.pi, n_beta + 1)
    wb = np.full(n_beta + 1, 1.0 / n_beta)
    wb[0] *= 0.5
    wb[-1] *= 0.5
    K = np.zeros((n, n))
    for b, w in zip(beta, wb):
        ap = rotated_angle(alpha, b)
        idx, lw = _lagrange_rows(alpha, ap)
        np.add.at(K, (np.repeat(np.arange(n), 4).reshape(n, 4), idx), w * lw)
    return K


def kernel_average(grid: AngularGrid, values: np.ndarray) -> np.ndarray:
    """Apply K to a function sampled on grid.alpha."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.alpha.shape:
        raise ConfigError("values must be sampled on the grid nodes")
    return grid.kernel_matrix() @ values


def inner(grid: AngularGrid, f: np.ndarray, g: np.ndarray, with_kernel: bool = True) -> float:
    """<f, (1 + 2K) g> under the sin 2a weight (the full three-component
    norm of states described by one Faddeev component), or the plain
    weighted product when with_kernel is False."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    gg = g + 2.0 * (grid.kernel_matrix() @ g) if with_kernel else g
    return float(np.sum(grid.weights * f * gg))


def _lam2_tridiag(grid: AngularGrid):
    """Flux-conservative Lam2 as (diag, offdiag) of its symmetrized form
    plus the similarity scaling; returns (d, e, scale) with
    Lam2 = diag(1/scale) @ Sym @ diag(scale)."""
    a = grid.alpha
    w = grid.weights
    iface = grid._interfaces[1:-1]
    s_if = np.sin(2.0 * iface)
    h = np.diff(a)
    cond = s_if / h
    d = np.empty_like(a)
    d[0] = cond[0] / w[0]
    d[-1] = cond[-1] / w[-1]
    d[1:-1] = (cond[:-1] + cond[1:]) / w[1:-1]
    e = -cond / np.sqrt(w[:-1] * w[1:])
    return d, e, np.sqrt(w)


def _lam2_matrix(grid: AngularGrid) -> np.ndarray:
    d, e, scale = _lam2_tridiag(grid)
    n = len(d)
    sym = np.zeros((n, n))
    np.fill_diagonal(sym, d)
    idx = np.arange(n - 1)
    sym[idx, idx + 1] = e
    sym[idx + 1, idx] = e
    return (sym * scale[None, :]) / scale[:, None]


@dataclass
class AngularSpectrum:
    """Eigenvalues/vectors of the angular problem at one hyperradius.

    vectors[:, j] is normalized to <phi,(1+2K)phi> = 1 (plain norm for
    the free problem) and norm_ratio[j] stores the spurious-state
    diagnostic <phi,(1+2K)phi>/<phi,phi>.  n_dropped counts removed
    kernel-null solutions.
    """

    rho: float
    lam: np.ndarray
    vectors: np.ndarray
    norm_ratio: np.ndarray
    grid: AngularGrid
    n_dropped: int = 0


def _solve_free(grid: AngularGrid, n_channels: int, rho: float) -> AngularSpectrum:
    d, e, scale = _lam2_tridiag(grid)
    lam, vec = eigh_tridiagonal(d, e, select="i", select_range=(0, n_channels - 1))
    vec = vec / scale[:, None]
    for j in range(vec.shape[1]):
        nrm = math.sqrt(max(inner(grid, vec[:, j], vec[:, j], with_kernel=False), 1e-300))
        vec[:, j] /= nrm
        if vec[np.argmax(np.abs(vec[:, j])), j] < 0:
            vec[:, j] *= -1
    return AngularSpectrum(rho=rho, lam=lam, vectors=vec,
                           norm_ratio=np.ones_like(lam), grid=grid)


def solve_angular(spec: PotentialSpec | None, rho: float, grid: AngularGrid,
                  n_channels: int = 4, richardson: bool = False,
                  filter_spurious: bool = True) -> AngularSpectrum:
    """Lowest angular eigenvalues/channel functions at hyperradius rho.

    spec = None (or a potential that vanishes on the grid) solves the
    free problem: pure Lam2, spectrum 4 nu (nu + 1) = 0, 8, 24, ...
    with no kernel term and hence no spurious filtering.  Otherwise a
    dense nonsymmetric solve; eigenvalues must come out real to 1e-8 of
    the spectral scale or NumericalError is raised, and kernel-null
    (spurious) eigenvectors are dropped when filter_spurious is set.

    richardson=True repeats the solve on the half-resolution grid and
    Richardson-extrapolates the eigenvalues (second-order scheme).
    """
    if rho <= 0:
        raise ConfigError("rho must be positive")
    if n_channels < 1 or n_channels > grid.n // 4:
        raise ConfigError("n_channels out of range for this grid")
    if spec is not None and spec.kind == "zero_range":
        raise ConfigError("zero-range interaction has its own closed-form solver")

    spect = _solve_one(spec, rho, grid, n_channels, filter_spurious)
    if richardson:
        coarse = AngularGrid(n=grid.n // 2, grading=grid.grading, n_beta=grid.n_beta)
        spect_c = _solve_one(spec, rho, coarse, n_channels, filter_spurious)
        m = min(len(spect.lam), len(spect_c.lam))
        spect.lam = spect.lam.copy()
        spect.lam[:m] = (4.0 * spect.lam[:m] - spect_c.lam[:m]) / 3.0
    return spect


def _solve_one(spec, rho, grid, n_channels, filter_spurious) -> AngularSpectrum:
    if spec is None:
        return _solve_free(grid, n_channels, rho)
    v = evaluate(spec, math.sqrt(2.0) * rho * np.sin(grid.alpha))
    if not np.any(v):
        return _solve_free(grid, n_channels, rho)
    D = 2.0 * rho * rho * np.asarray(v)
    K = grid.kernel_matrix()
    M = _lam2_matrix(grid) + D[:, None] * (np.eye(grid.n) + 2.0 * K)
    lam, vec = eig(M)
    scale = max(np.max(np.abs(lam.real)), 1.0)
    order = np.argsort(lam.real)
    lam = lam[order]
    vec = vec[:, order]
    kept_l, kept_v, ratios = [], [], []
    dropped = 0
    for j in range(len(lam)):
        if len(kept_l) == n_channels:
            break
        if abs(lam[j].imag) > 1e-8 * scale:
            raise NumericalError("angular eigenvalue came out complex: "
                                 f"{lam[j]:.6g} (grid too coarse for this rho?)")
        phi = vec[:, j].real
        im = np.max(np.abs(vec[:, j].imag))
        if im > 1e-8 * np.max(np.abs(phi)):
            raise NumericalError("angular eigenvector has an imaginary part")
        full = inner(grid, phi, phi, with_kernel=True)
        plain = inner(grid, phi, phi, with_kernel=False)
        ratio = full / plain
        if filter_spurious and ratio < SPURIOUS_NORM_CUT:
            dropped += 1
            continue
        nrm = math.sqrt(abs(full)) if abs(full) > 1e-300 else 1.0
        phi = phi / nrm
        if phi[np.argmax(np.abs(phi))] < 0:
            phi = -phi
        kept_l.append(lam[j].real)
        kept_v.append(phi)
        ratios.append(ratio)
    if len(kept_l) < n_channels:
        raise NumericalError("not enough physical angular states below the filter")
    return AngularSpectrum(rho=rho, lam=np.array(kept_l),
                           vectors=np.stack(kept_v, axis=1),
                           norm_ratio=np.array(ratios), grid=grid, n_dropped=dropped)
