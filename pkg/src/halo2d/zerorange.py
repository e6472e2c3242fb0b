"""Zero-range (contact) interaction: angular eigenvalues in closed form.

For a contact pair interaction of 2D scattering length a, the angular
Faddeev eigenproblem at hyperradius rho reduces to a transcendental
equation for the degree nu of a Legendre function, with eigenvalue

    lambda = 4 nu (nu + 1).

The regular-at-alpha=pi/2 free solution is phi(alpha) = P_nu(-cos 2alpha);
matching its log singularity at alpha -> 0 against the contact condition
gives the quantization rule implemented by zero_range_residual.  The
lowest eigenvalue switches from the real-nu branch to the conical branch
nu = -1/2 + i tau (lambda < -1) once rho/a exceeds about 6.1e-3, and for
rho >> a it falls off as

    lambda_1 -> -4/3 - 8 exp(-2 gamma) rho^2 / a^2,

which is what turns the effective potential attractive enough to bind.

Everything here is scalar analysis: no grids, no matrices.  A small
amount of special-function code (digamma, Legendre/conical P) is local
so its error behaviour on the conical line is under our control.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, NumericalError

__all__ = [
    "digamma",
    "legendre_P",
    "free_angular_solution",
    "zero_range_residual",
    "NuBranch",
    "solve_lambda_zero_range",
    "lambda_zero_range",
    "k0_channel_profile",
    "q11_asymptotic",
    "q11_from_profile",
    "efimov3d_lowest",
    "efimov3d_nu",
]

EULER_GAMMA = 0.5772156649015329

# B_{2n}/(2n) for the asymptotic series of psi
_PSI_ASYMP = (1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
              1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0)


def digamma(z):
    """Digamma function for real or complex argument.

    Recurrence up to |z| >= 10 followed by the Stirling-type series;
    reflection handles Re z <= 0.  Good to ~1e-14 relative, which the
    tests pin against an independent implementation.
    """
    z = complex(z)
    if z.real <= 0.0:
        if z.imag == 0.0 and z.real == round(z.real):
            raise ConfigError("digamma pole at non-positive integer")
        # psi(z) = psi(1-z) - pi cot(pi z)
        out = complex(digamma(1.0 - z)) - math.pi / complex(np.tan(math.pi * z))
        return out.real if out.imag == 0.0 else out
    acc = 0.0 + 0.0j
    while abs(z) < 10.0:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    s = 0.0 + 0.0j
    p = inv2
    for c in _PSI_ASYMP:
        s += c * p
        p *= inv2
    out = acc + np.log(z) - 0.5 / z - s
    return out.real if out.imag == 0.0 else complex(out)


def _coeff_ratio(k: np.ndarray, nu, conical_tau: float | None):
    if conical_tau is None:
        return (k - nu) * (k + 1.0 + nu) / ((k + 1.0) ** 2)
    return ((k + 0.5) ** 2 + conical_tau**2) / ((k + 1.0) ** 2)


def _series_coeffs(nu, conical_tau, n_terms: int) -> np.ndarray:
    k = np.arange(n_terms - 1, dtype=float)
    return np.concatenate(([1.0], np.cumprod(_coeff_ratio(k, nu, conical_tau))))


def _n_terms(tau_like: float, w: float) -> int:
    # geometric tail kicks in past k ~ 2 tau sqrt(w)/(1 - sqrt(w))
    sw = math.sqrt(min(w, 0.999))
    return int(2.0 * abs(tau_like) * sw / max(1.0 - sw, 1e-3)) + 80


def legendre_P(nu, x):
    """Legendre function P_nu(x) on (-1, 1], real degree or conical.

    Conical degrees nu = -1/2 + i tau give real values and are passed
    as complex numbers.  Scalar or array x.  Hypergeometric series
    around x = 1 for x >= 0; the log-series around x = -1 otherwise.
    The log-series loses digits once tau * sqrt((1+x)/2) gets large;
    sums smaller than 1e-13 of their largest term are returned as 0
    rather than as cancellation noise.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr > 1.0) or np.any(x_arr <= -1.0):
        raise ConfigError("legendre_P defined on (-1, 1]")
    tau = None
    if isinstance(nu, complex) and nu.imag != 0.0:
        if abs(nu.real + 0.5) > 1e-12:
            raise ConfigError("complex degree must lie on the conical line Re nu = -1/2")
        tau = abs(nu.imag)
        nu_r = -0.5
    else:
        nu_r = float(nu.real if isinstance(nu, complex) else nu)
        if nu_r < -0.5 - 1e-12:
            nu_r = -1.0 - nu_r  # P_nu = P_{-1-nu}
        if abs(nu_r - round(nu_r)) < 1e-9:
            # Legendre polynomial: exact on all of [-1, 1]
            n = int(round(nu_r))
            c = np.zeros(n + 1)
            c[n] = 1.0
            out = np.polynomial.legendre.legval(x_arr, c)
            return out if np.ndim(x) else float(out[0])

    out = np.empty_like(x_arr)
    pos = x_arr >= 0.0
    if np.any(pos):
        z = 0.5 * (1.0 - x_arr[pos])
        n_t = _n_terms(tau if tau is not None else abs(nu_r) + 1.0, float(np.max(z, initial=0.0)))
        c = _series_coeffs(nu_r, tau, n_t)
        out[pos] = np.polynomial.polynomial.polyval(z, c)
    if np.any(~pos):
        u = 0.5 * (1.0 + x_arr[~pos])
        n_t = _n_terms(tau if tau is not None else abs(nu_r) + 1.0, float(np.max(u)))
        c = _series_coeffs(nu_r, tau, n_t)
        k = np.arange(n_t, dtype=float)
        psi_k1 = np.array([digamma(kk + 1.0) for kk in k], dtype=float)
        if tau is None:
            br = 2.0 * psi_k1 - _psi_shift_real(k, nu_r)
            pref = -math.sin(math.pi * nu_r) / math.pi
        else:
            br = 2.0 * psi_k1 - np.array(
                [2.0 * complex(digamma(kk + 0.5 + 1j * tau)).real for kk in k])
            pref = math.cosh(math.pi * tau) / math.pi
        cb = c * br
        # P = pref * (sum c_k br_k u^k - ln u * sum c_k u^k)
        powers = u[None, :] ** k[:, None]
        terms_a = cb[:, None] * powers
        terms_b = c[:, None] * powers
        s = terms_a.sum(axis=0) - np.log(u) * terms_b.sum(axis=0)
        floor = 1e-13 * np.max(np.abs(terms_a), axis=0)
        s[np.abs(s) < floor] = 0.0
        out[~pos] = pref * s
    return out if np.ndim(x) else float(out[0])


def _psi_shift_real(k: np.ndarray, nu: float) -> np.ndarray:
    """psi(k - nu) + psi(k + 1 + nu) for real non-integer nu, k >= 0.

    The k = 0 entry needs psi at a negative argument when nu > 0;
    reflection keeps it finite away from integer nu.
    """
    out = np.empty(len(k))
    for i, kk in enumerate(k):
        x1 = kk - nu
        if x1 > 0.0:
            p1 = float(digamma(x1).real) if isinstance(digamma(x1), complex) else float(digamma(x1))
        else:
            p1 = float(digamma(1.0 + nu - kk)) + math.pi / math.tan(math.pi * (1.0 + nu - kk))
        out[i] = p1 + float(digamma(kk + 1.0 + nu))
    return out


def free_angular_solution(nu, alpha):
    """Free angular Faddeev solution regular at alpha = pi/2.

    phi(alpha) = P_nu(-cos 2 alpha), eigenfunction of the angular
    kinetic operator with eigenvalue 4 nu (nu + 1); log-divergent at
    alpha -> 0 like 2 sin(nu pi)(gamma + ln alpha + psi(1+nu))/pi + cos(nu pi),
    which is the handle the contact condition grabs.
    """
    a = np.asarray(alpha, dtype=float)
    if np.any(a <= 0.0) or np.any(a > math.pi / 2 + 1e-15):
        raise ConfigError("alpha must lie in (0, pi/2]")
    return legendre_P(nu, -np.cos(2.0 * a))


def zero_range_residual(nu, rho: float, a: float):
    """Residual of the contact-interaction angular quantization rule.

    Zero exactly at angular eigenvalue orders nu for scattering length
    a and hyperradius rho.  nu = 1 is a root for every rho/a but is a
    spurious (kernel-null) solution; solve_lambda_zero_range removes it.
    Real nu >= -1/2, or conical nu = -1/2 + i tau passed as complex.
    On the conical branch the returned value is scaled by 1/cosh(pi tau)
    to stay finite; zeros are unaffected.
    """
    if rho <= 0 or a <= 0:
        raise ConfigError("rho and a must be positive")
    L = math.log(math.sqrt(2.0) * rho / a)
    if isinstance(nu, complex) and nu.imag != 0.0:
        if abs(nu.real + 0.5) > 1e-12:
            raise ConfigError("complex order must have Re nu = -1/2")
        tau = abs(nu.imag)
        red = -2.0 * (L - EULER_GAMMA - complex(digamma(0.5 + 1j * tau)).real)
        if tau > 30.0:
            # P-term is below e^{-2 pi tau / 3}: gone at double precision
            return red
        return red - 2.0 * math.pi * legendre_P(nu, 0.5) / math.cosh(math.pi * tau)
    nu = float(nu)
    if nu < -0.5 - 1e-12:
        raise ConfigError("real order must satisfy nu >= -1/2 (symmetric under nu -> -1-nu)")
    s, c = math.sin(math.pi * nu), math.cos(math.pi * nu)
    psi1 = digamma(1.0 + nu)
    psi1 = psi1.real if isinstance(psi1, complex) else psi1
    return 2.0 * s * (L - EULER_GAMMA - psi1) - math.pi * c \
        - 2.0 * math.pi * legendre_P(nu, 0.5)


@dataclass(frozen=True)
class NuBranch:
    """One root of the contact quantization rule.

    branch is "real" (value = nu, lambda of a subcritical channel) or
    "imaginary" (value = tau with nu = -1/2 + i tau, lambda < -1).
    """

    branch: str
    value: float

    @property
    def nu(self):
        if self.branch == "real":
            return self.value
        return complex(-0.5, self.value)

    @property
    def lam(self) -> float:
        if self.branch == "real":
            return 4.0 * self.value * (self.value + 1.0)
        return -1.0 - 4.0 * self.value**2

    def angular_value(self, alpha):
        return free_angular_solution(self.nu, alpha)


def _l_switch() -> float:
    # lowest eigenvalue leaves the real branch where the residual
    # vanishes at nu = -1/2: L = -2 ln 2 - pi P_{-1/2}(1/2)
    return -2.0 * math.log(2.0) - math.pi * float(legendre_P(-0.5, 0.5))


_L_SWITCH: float | None = None


def solve_lambda_zero_range(rho: float, a: float, n_roots: int = 1) -> list[NuBranch]:
    """Lowest angular eigenvalue branches at hyperradius rho.

    Returns n_roots NuBranch objects with ascending lambda, spurious
    nu = 1 excluded.  The lowest branch is conical for
    ln(sqrt(2) rho / a) > -2 ln 2 - pi P_{-1/2}(1/2)  (rho/a > ~6.1e-3),
    real otherwise; all higher branches are real.
    """
    global _L_SWITCH
    if rho <= 0 or a <= 0:
        raise ConfigError("rho and a must be positive")
    if n_roots < 1:
        raise ConfigError("n_roots must be >= 1")
    if _L_SWITCH is None:
        _L_SWITCH = _l_switch()
    L = math.log(math.sqrt(2.0) * rho / a)
    roots: list[NuBranch] = []
    if L > _L_SWITCH:
        roots.append(NuBranch("imaginary", _conical_root(rho, a, L)))

    def f(nu: float) -> float:
        return zero_range_residual(nu, rho, a) / (nu - 1.0)

    need = n_roots - len(roots)
    lo = -0.5 + 1e-9
    nu_hi = 2.0 * n_roots + 2.5
    grid = np.linspace(lo, nu_hi, int((nu_hi - lo) / 0.02) + 2)
    vals = [f(g) for g in grid]
    found = []
    for i in range(len(grid) - 1):
        if len(found) >= need:
            break
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            found.append(grid[i])
        elif v0 * v1 < 0.0:
            found.append(brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16))
    if len(found) < need:
        raise NumericalError("failed to isolate the requested number of angular roots")
    roots.extend(NuBranch("real", float(r)) for r in found[:need])
    roots.sort(key=lambda b: b.lam)
    return roots


def _conical_root(rho: float, a: float, L: float) -> float:
    X = math.exp(-EULER_GAMMA) * math.sqrt(2.0) * rho / a

    def reduced(tau: float) -> float:
        return L - EULER_GAMMA - complex(digamma(0.5 + 1j * tau)).real

    if X >= 30.0:
        seed = X + 1.0 / (24.0 * X)
        lo, hi = 0.8 * seed, 1.25 * seed
        for _ in range(60):
            if reduced(lo) * reduced(hi) < 0.0:
                return brentq(reduced, lo, hi, xtol=1e-300, rtol=8.9e-16)
            lo *= 0.8
            hi *= 1.25
        raise NumericalError("conical root bracket failed at large rho/a")

    def g(tau: float) -> float:
        return zero_range_residual(complex(-0.5, tau), rho, a)

    taus = np.linspace(1e-8, 40.0, 900)
    v0 = g(taus[0])
    for t0, t1 in zip(taus[:-1], taus[1:]):
        v1 = g(t1)
        if v0 == 0.0:
            return float(t0)
        if v0 * v1 < 0.0:
            return brentq(g, t0, t1, xtol=1e-300, rtol=8.9e-16)
        v0 = v1
    raise NumericalError("no conical root found although L is past the branch switch")


def lambda_zero_range(rho: float, a: float, n_roots: int = 1) -> list[float]:
    """Ascending angular eigenvalues lambda at hyperradius rho."""
    return [b.lam for b in solve_lambda_zero_range(rho, a, n_roots)]


def k0_channel_profile(k: float, rho: float, alpha):
    """Large-rho limit of the lowest channel function.

    phi(alpha) = 2 k rho K0(sqrt(2) k rho alpha) for a pair bound with
    decay momentum k (the contact value is k = 2 e^{-gamma}/a),
    normalized to int phi^2 alpha d(alpha) = 1 (the small-alpha limit of
    the sin(2 alpha)/2 weight, where all the support is).
    """
    from scipy.special import k0 as bessel_k0
    if rho <= 0 or k <= 0:
        raise ConfigError("k and rho must be positive")
    al = np.asarray(alpha, dtype=float)
    if np.any(al <= 0.0):
        raise ConfigError("alpha must be positive")
    return 2.0 * k * rho * bessel_k0(math.sqrt(2.0) * k * rho * al)


def q11_from_profile(k: float, rho: float) -> float:
    """Diagonal rho-coupling int phi d2phi/drho2 alpha d(alpha) of the
    K0 profile, by quadrature.

    In the scaled variable t = sqrt(2) k rho alpha the k-dependence
    drops out and the integrand becomes t^2 K0 (t K0 - K1); the value
    reproduces the -1/(3 rho^2) law to quadrature accuracy.
    """
    from scipy.integrate import quad
    from scipy.special import k0 as bessel_k0, k1 as bessel_k1
    if rho <= 0 or k <= 0:
        raise ConfigError("k and rho must be positive")
    if k * rho < 5.0:
        warnings.warn("q11_from_profile assumes the bound-pair regime k rho >> 1",
                      stacklevel=2)
    val, _ = quad(lambda t: t * t * bessel_k0(t) * (t * bessel_k0(t) - bessel_k1(t)),
                  0.0, 60.0, limit=200)
    return 2.0 * val / (rho * rho)


def q11_asymptotic(rho: float) -> float:
    """Diagonal rho-coupling of the lowest channel for k rho >> 1."""
    if rho <= 0:
        raise ConfigError("rho must be positive")
    return -1.0 / (3.0 * rho * rho)


def _efimov_real_deflated(nu: float, x: float) -> float:
    # sin/nu kept analytic through nu -> 0
    if nu == 0.0:
        return 0.5 * math.pi * x + 1.0 - (8.0 / math.sqrt(3.0)) * (math.pi / 6.0)
    return (math.sin(0.5 * math.pi * nu) * x
            + nu * math.cos(0.5 * math.pi * nu)
            - (8.0 / math.sqrt(3.0)) * math.sin(math.pi * nu / 6.0)) / nu


def _efimov_imag(s: float, x: float) -> float:
    if s == 0.0:
        return -_efimov_real_deflated(0.0, x)
    return (-math.cosh(0.5 * math.pi * s)
            + (8.0 / math.sqrt(3.0)) * math.sinh(math.pi * s / 6.0) / s
            - math.sinh(0.5 * math.pi * s) * x / s)


def efimov3d_nu(rho_over_a: float) -> NuBranch:
    """Order of the lowest 3D zero-range angular solution at rho/a.

    Solves sin(nu pi/2) sqrt(2) rho/a = -nu cos(nu pi/2)
    + (8/sqrt 3) sin(nu pi/6) with the trivial nu = 0 root removed;
    branch "imaginary" means nu = i s (the Efimov regime, with
    s -> 1.00624 as rho/a -> 0).
    """
    if rho_over_a < 0.0:
        raise ConfigError("rho/a must be >= 0")
    x = math.sqrt(2.0) * rho_over_a
    if _efimov_real_deflated(0.0, x) > 0.0:
        return NuBranch("real", brentq(_efimov_real_deflated, 1e-14, 2.0,
                                       args=(x,), xtol=1e-15, rtol=8.9e-16))
    hi = 4.0
    while _efimov_imag(hi, x) > 0.0:
        hi *= 1.5
        if hi > 1e3:
            raise NumericalError("3D conical root bracket failed")
    return NuBranch("imaginary", brentq(_efimov_imag, 1e-14, hi,
                                        args=(x,), xtol=1e-15, rtol=8.9e-16))


def efimov3d_lowest(rho_over_a: float) -> float:
    """Lowest 3D angular eigenvalue lambda = nu^2 - 4 at rho/a.

    efimov3d_lowest(0.0) = -4 - s0^2 = -5.0125 (s0 = 1.00624), the
    Efimov constant; crosses lambda = -4 at rho/a = 0.6385 and heads to
    0 like nu = 2 - 12/(pi sqrt(2) rho/a).
    """
    b = efimov3d_nu(rho_over_a)
    if b.branch == "real":
        return b.value**2 - 4.0
    return -(b.value**2) - 4.0
