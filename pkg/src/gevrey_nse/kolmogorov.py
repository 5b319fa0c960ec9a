"""Eigenmode (Kolmogorov) forcing: the one case the attractor-membership
criterion resolves in closed form.

For a force g that is a single eigenmode of the Stokes operator with
eigenvalue lam, the quadratic term vanishes, every Taylor coefficient is a
scalar multiple of g, and the coefficient recursion collapses to

    p_1 = d0,  p_2 = -nu lam d0^2 / 2,
    p_{n+1} = ((n-1)/(n+1)) p_{n-1} - (nu d0 lam / (n+1)) p_n,

whose generating function is (1/(nu lam)) (1 - ((1-T)/(1+T))^{nu lam d0/2})
with d0 = 4 delta / pi.  Along the real time axis the only solution bounded
for all negative time is the equilibrium g/(nu lam), which is nonzero, so
zero is not in the attractor.  Numerically this shows up as a non-summable
(power-law) coefficient tail: the series diverges on the unit circle.
"""
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ._logspace import from_float, signed_add, signed_scale, to_float
from .spectral import GridSpec, SpectralField, bilinear_advect, stokes_apply


@dataclass
class EigenForce:
    """Real shear force supported on a single +/-k mode pair.

    The amplitude convention is |field| = amplitude (L^2 norm); the Stokes
    eigenvalue is lam = kappa0^2 |k|^2.
    """

    k: tuple
    amplitude: float
    lam: float
    field: SpectralField


def eigen_force(k, amplitude, grid):
    """Build an eigenmode force at wavevector k, verifying both structural
    invariants (A-eigenvector, vanishing self-advection)."""
    k1, k2 = int(k[0]), int(k[1])
    if k1 == 0 and k2 == 0:
        raise ValueError("k must be nonzero")
    if max(abs(k1), abs(k2)) > grid.K:
        raise ValueError(f"k outside |k|_inf <= {grid.K}")
    if amplitude == 0:
        raise ValueError("amplitude must be nonzero (g != 0)")
    ksq = k1 * k1 + k2 * k2
    lam = grid.kappa0 ** 2 * ksq
    # coefficient along the unit vector perpendicular to k; the conjugate
    # pair makes the field real with |g|^2 = 2 L^2 c^2
    c = amplitude / (math.sqrt(2.0) * grid.length)
    perp = (-k2 / math.sqrt(ksq), k1 / math.sqrt(ksq))
    coeffs = np.zeros((grid.n, grid.n, 2), np.complex128)
    coeffs[k1 + grid.K, k2 + grid.K] = (c * perp[0], c * perp[1])
    coeffs[-k1 + grid.K, -k2 + grid.K] = (c * perp[0], c * perp[1])
    f = SpectralField(grid, coeffs, reality=True, validate=False)
    stokes_dev = (stokes_apply(f, 1) - lam * f).norm()
    if stokes_dev > 1e-12 * lam * f.norm():
        raise AssertionError("constructed force is not an A-eigenvector")
    self_adv = bilinear_advect(f, f).norm()
    if self_adv > 1e-12 * f.norm() ** 2:
        raise AssertionError("self-advection of the eigenmode does not vanish")
    return EigenForce(k=(k1, k2), amplitude=amplitude, lam=lam, field=f)


@dataclass
class ScalarSeries:
    """Scalar coefficient recursion, carried in (sign, log-magnitude) form.

    values holds the float64 image (saturating to +/-inf past 1e308), so the
    recursion itself never overflows.
    """

    lam: float
    nu: float
    delta0: float
    values: np.ndarray
    signs: np.ndarray = field(repr=False)
    log_mags: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.values) - 1


def scalar_series(lam, nu, delta0, n_terms):
    """p_1 .. p_{n_terms} of the eigenmode coefficient recursion."""
    if n_terms < 2:
        raise ValueError("n_terms must be >= 2")
    signs = np.zeros(n_terms + 1, dtype=np.int64)
    logs = np.full(n_terms + 1, -math.inf)
    p1 = from_float(delta0)
    p2 = from_float(-nu * lam * delta0 ** 2 / 2.0)
    signs[1], logs[1] = p1
    signs[2], logs[2] = p2
    for n in range(2, n_terms):
        a = signed_scale((signs[n - 1], logs[n - 1]), (n - 1) / (n + 1))
        bterm = signed_scale((signs[n], logs[n]), -nu * delta0 * lam / (n + 1))
        signs[n + 1], logs[n + 1] = signed_add(a, bterm)
    values = np.array([to_float(s, l) for s, l in zip(signs, logs)])
    return ScalarSeries(lam=lam, nu=nu, delta0=delta0, values=values,
                        signs=signs, log_mags=logs)


def decay_exponent(series, window=None):
    """Slope fit of ln|p_n| against ln n over the tail (power-law exponent).

    Returns (exponent, n_points); exponent < 1 certifies a non-summable
    tail, hence divergence of the series on the unit circle.
    """
    logs = series.log_mags[1:]
    ns = np.arange(1, len(logs) + 1, dtype=float)
    ok = np.isfinite(logs)
    ns, logs = ns[ok], logs[ok]
    if window is None:
        window = len(ns) // 2
    ns, logs = ns[-window:], logs[-window:]
    if len(ns) < 4:
        raise ValueError("too few nonzero coefficients for a tail fit")
    slope = np.polyfit(np.log(ns), logs, 1)[0]
    return -float(slope), len(ns)


@dataclass
class EquilibriumWitness:
    """Closed-form resolution for an eigenmode force: verdict plus evidence.

    phi(t) = 1/(nu lam) + (phi(0) - 1/(nu lam)) e^{-nu lam t} is the scalar
    profile of any solution u = phi g; boundedness backward in time forces
    the equilibrium, which is nonzero.
    """

    verdict: str
    lam: float
    nu: float
    equilibrium: SpectralField
    stationarity_residual: float
    self_advection_residual: float
    tail_exponent: float
    tail_points: int
    abs_sum_is_divergent: bool

    def phi(self, t, phi0=0.0):
        s = 1.0 / (self.nu * self.lam)
        return s + (phi0 - s) * np.exp(-self.nu * self.lam * np.asarray(t))


def equilibrium_verdict(force, nu, delta=0.1, n_terms=200):
    """Resolve the eigenmode case: zero is not in the attractor.

    Witness record: the equilibrium u* = g/(nu lam) with residuals of
    nu A u* = g and B(u*, u*) = 0, plus the coefficient-tail profile
    certifying divergence of the series near the boundary of the disk.
    """
    g = force.field
    lam = force.lam
    u_star = (1.0 / (nu * lam)) * g
    stat = (nu * (stokes_apply(u_star, 1)) - g).norm() / g.norm()
    self_adv = bilinear_advect(u_star, u_star).norm() / max(u_star.norm() ** 2, 1e-300)
    d0 = 4.0 * delta / math.pi
    series = scalar_series(lam, nu, d0, n_terms)
    exponent, npts = decay_exponent(series)
    return EquilibriumWitness(
        verdict="NotInAttractor",
        lam=lam, nu=nu,
        equilibrium=u_star,
        stationarity_residual=stat,
        self_advection_residual=self_adv,
        tail_exponent=exponent,
        tail_points=npts,
        abs_sum_is_divergent=exponent < 1.0), series
