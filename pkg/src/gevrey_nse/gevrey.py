"""Gevrey weight operators, weighted norms, and regularity-class diagnostics.

The weight operator scales each coefficient by e^{phi(|k|)}.  The default
weight family is phi_b(x) = b [ln(x + e)]^2; the induced norm |u|_b is the
plain L^2 norm of the weighted field.  A growth certificate records the
quadratic-exponential envelope of the normalized Sobolev norms

    d_alpha = |A^{alpha/2} u|^2 / (nu^2 kappa0^{2 alpha}) <= c0 e^{sigma alpha^2}

for integer alpha (the certificate itself is the testable object; note
d_alpha is independent of kappa0, which cancels exactly).
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np

from ._logspace import log_sum
from .spectral import (BoundCheck, Dealias, SpectralField, _lattice,
                       bilinear_advect, stokes_apply)

_E = math.e


class WeightKind(Enum):
    LOG_SQUARED = "log-squared"   # b [ln(x+e)]^2
    POWER_LOG = "power-log"       # b [ln(x+e)]^{1+epsilon}
    CUSTOM = "custom"


@dataclass(frozen=True)
class GevreyWeight:
    """Admissible weight phi: increasing and concave on [1, inf)."""

    b: float
    kind: WeightKind = WeightKind.LOG_SQUARED
    epsilon: float = 0.0
    phi: Optional[Callable] = None
    chi_max: float = 1e6

    def __post_init__(self):
        if self.b < 0:
            raise ValueError("b must be nonnegative")
        if self.kind is WeightKind.POWER_LOG and not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.kind is WeightKind.CUSTOM:
            if self.phi is None:
                raise ValueError("custom weight requires a phi callable")
            self._check_admissible()

    def _check_admissible(self):
        chi = np.geomspace(1.0, self.chi_max, 256)
        h = 1e-4 * chi
        f0 = self.phi(chi)
        fp = (self.phi(chi + h) - self.phi(chi - h)) / (2 * h)
        fpp = (self.phi(chi + h) - 2 * f0 + self.phi(chi - h)) / h ** 2
        if np.any(fp <= 0):
            raise ValueError("custom weight must have phi' > 0 on [1, chi_max]")
        if np.any(fpp >= 0):
            raise ValueError("custom weight must have phi'' < 0 on [1, chi_max]")

    def evaluate(self, chi):
        if self.kind is WeightKind.LOG_SQUARED:
            return self.b * np.log(chi + _E) ** 2
        if self.kind is WeightKind.POWER_LOG:
            return self.b * np.log(chi + _E) ** (1.0 + self.epsilon)
        return self.phi(chi)


def _as_weight(w):
    return w if isinstance(w, GevreyWeight) else GevreyWeight(float(w))


def apply_weight(u, w):
    """Scale uhat(k) by e^{phi(|k|)}."""
    w = _as_weight(w)
    _, _, _, ksq_safe = _lattice(u.grid.K)
    factor = np.exp(w.evaluate(np.sqrt(ksq_safe)))
    return SpectralField(u.grid, u.coeffs * factor[:, :, None],
                         reality=u.reality, validate=False)


def gevrey_norm(u, w):
    """|u|_b = |e^{phi(kappa0^{-1} A^{1/2})} u|."""
    return apply_weight(u, w).norm()


@dataclass
class GrowthCertificate:
    """Certified envelope d_alpha <= c0 e^{sigma alpha^2}, alpha = 1..alpha_max."""

    sigma: float
    c0: float
    log_c0: float
    alpha_max: int
    nu: float
    log_values: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    degenerate: bool = False

    def verify(self, sigma=None, c0=None, slack=1e-12):
        """Re-check the certificate inequality, optionally for other (sigma, c0)."""
        if self.degenerate:
            return True
        sigma = self.sigma if sigma is None else sigma
        log_c0 = self.log_c0 if c0 is None else math.log(c0)
        alphas = np.arange(1, self.alpha_max + 1)
        bound = log_c0 + sigma * alphas.astype(float) ** 2
        return bool(np.all(self.log_values <= bound + slack))


def normalized_growth_log(u, nu, alpha):
    """ln d_alpha, evaluated in log space to dodge overflow."""
    k1, k2, _, _ = _lattice(u.grid.K)
    ksq = (k1 ** 2 + k2 ** 2)
    mag2 = np.abs(u.coeffs[:, :, 0]) ** 2 + np.abs(u.coeffs[:, :, 1]) ** 2
    mask = (mag2 > 0) & (ksq > 0)
    if not np.any(mask):
        return -math.inf
    terms = (alpha * np.log(ksq[mask])
             + np.log(u.grid.length ** 2 * mag2[mask]))
    return log_sum(terms.tolist()) - 2.0 * math.log(nu)


def fit_growth_certificate(u, nu, alpha_max=12):
    """Least-squares fit of ln d_alpha against alpha^2, lifted so the
    certificate inequality holds at every sampled alpha.

    Zero field: degenerate sentinel (sigma=0, c0=0).
    """
    if alpha_max < 2:
        raise ValueError("alpha_max must be >= 2")
    alphas = np.arange(1, alpha_max + 1, dtype=float)
    logs = np.array([normalized_growth_log(u, nu, a) for a in alphas])
    if not np.all(np.isfinite(logs)):
        return GrowthCertificate(sigma=0.0, c0=0.0, log_c0=-math.inf,
                                 alpha_max=alpha_max, nu=nu,
                                 log_values=logs,
                                 residuals=np.zeros_like(logs),
                                 degenerate=True)
    slope, intercept = np.polyfit(alphas ** 2, logs, 1)
    sigma = max(float(slope), 0.0)
    log_c0 = float(np.max(logs - sigma * alphas ** 2))
    residuals = logs - (log_c0 + sigma * alphas ** 2)
    return GrowthCertificate(sigma=sigma, c0=math.exp(log_c0), log_c0=log_c0,
                             alpha_max=alpha_max, nu=nu, log_values=logs,
                             residuals=residuals)


def check_power_log_bound(u, cert, epsilon, nu):
    """Verify the power-log weighted bound implied by a growth certificate:

        |e^{b [ln(kappa0^{-1} A^{1/2} + e)]^{1+eps}} u|^2
            <= (4/3) c(eps) |u|^2
               + c0^{1/3} (c1 |A^{1/2} u|)^{2/3} nu^{4/3} kappa0^{-2/3},

    with b = 1/(2^{4+2 eps} sigma), c(eps) = e^{2 b [ln(e^2+e)]^{1+eps}},
    c1 = 1/(e^2 - e).  Degenerate (sigma = 0) certificates are skipped.
    """
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    if cert.degenerate or cert.sigma == 0.0:
        return BoundCheck(passed=True, lhs=0.0, rhs=0.0, ratio=0.0,
                          degenerate=True)
    b = 1.0 / (2.0 ** (4 + 2 * epsilon) * cert.sigma)
    w = GevreyWeight(b, WeightKind.POWER_LOG, epsilon)
    lhs = gevrey_norm(u, w) ** 2
    c_eps = math.exp(2 * b * math.log(_E ** 2 + _E) ** (1 + epsilon))
    c1 = 1.0 / (_E ** 2 - _E)
    kappa0 = u.grid.kappa0
    rhs = (4.0 / 3.0) * c_eps * u.energy() \
        + cert.c0 ** (1.0 / 3.0) * (c1 * u.sobolev_norm(1)) ** (2.0 / 3.0) \
        * nu ** (4.0 / 3.0) * kappa0 ** (-2.0 / 3.0)
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return BoundCheck(passed=lhs <= rhs * (1 + 1e-12), lhs=lhs, rhs=rhs,
                      ratio=ratio)


def weight_from_growth_rate(sigma):
    """Gevrey exponent b = 1/(64 sigma) granted by a growth rate sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return 1.0 / (64.0 * sigma)


def weight_from_force_ratio(beta3):
    """Gevrey exponent b = 1/(160 ln beta3) for the force, beta3 > 1."""
    if beta3 <= 1:
        raise ValueError("beta3 must exceed 1")
    return 1.0 / (160.0 * math.log(beta3))


def advection_weight_constant(b):
    """c3 = e^{b (ln 2)^2} (1+e)^{2 b ln 2}."""
    ln2 = math.log(2.0)
    return math.exp(b * ln2 ** 2) * (1 + _E) ** (2 * b * ln2)


def check_advection_gevrey_bound(u, b, c_a=1.0, c3=None):
    """Check |E^b B(u,u)| against the weighted interpolation bound

        (c3 c_A / kappa0^{2 b ln 2}) (
            |A^{b ln2} u|^{1/2} |A^{1+b ln2} u|^{1/2} |A^{1/2} E^b u|
          + |A^{1/2+b ln2} u|^{1/2} |A^{3/2+b ln2} u|^{1/2} |E^b u| ).

    The quadratic term is evaluated on its full convolution support.
    """
    if c3 is None:
        c3 = advection_weight_constant(b)
    ln2 = math.log(2.0)
    kappa0 = u.grid.kappa0
    bu = bilinear_advect(u, u, dealias=Dealias.EXTEND)
    lhs = gevrey_norm(bu, b)
    eb_u = apply_weight(u, b)
    rhs = (c3 * c_a / kappa0 ** (2 * b * ln2)) * (
        math.sqrt(u.sobolev_norm(2 * b * ln2))
        * math.sqrt(u.sobolev_norm(2 + 2 * b * ln2))
        * eb_u.sobolev_norm(1)
        + math.sqrt(u.sobolev_norm(1 + 2 * b * ln2))
        * math.sqrt(u.sobolev_norm(3 + 2 * b * ln2))
        * eb_u.norm())
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return BoundCheck(passed=lhs <= rhs * (1 + 1e-12), lhs=lhs, rhs=rhs,
                      ratio=ratio)


class FrechetDistance(NamedTuple):
    value: float
    tail: float


def frechet_distance(u, v, alpha_max=24):
    """Truncated Frechet metric

        sum_{alpha=1}^{alpha_max} 2^{-alpha} r_alpha / (1 + r_alpha),
        r_alpha = |A^{alpha/2}(u - v)|,

    together with the tail bound 2^{-alpha_max} (each summand is < 2^{-alpha}).
    """
    if not u.grid.compatible(v.grid):
        raise ValueError("grid mismatch")
    diff = u - v
    total = 0.0
    for alpha in range(1, alpha_max + 1):
        r = diff.sobolev_norm(alpha)
        total += 2.0 ** (-alpha) * r / (1.0 + r)
    return FrechetDistance(value=total, tail=2.0 ** (-alpha_max))
