"""Complex-time power-series criterion for attractor membership of zero.

The analyticity strip S(delta) = {|Im t| < delta} maps conformally onto the
unit disk by T = (e^{pi t / 2 delta} - 1)/(e^{pi t / 2 delta} + 1).  The
solution through u(0) = 0, written as U(T) = sum U_n T^n, satisfies

    dU/dT = delta0 psi(T) {g - nu A U - B(U, U)},
    psi(T) = 1/(1 - T^2),  delta0 = 4 delta / pi,

which freezes the coefficients through the recursion

    U_0 = 0,  U_1 = delta0 g,  U_2 = -(nu delta0^2 / 2) A g,
    U_{n+1} = ((n-1)/(n+1)) U_{n-1} - (nu delta0/(n+1)) A U_n
              - (delta0/(n+1)) sum_{h+k=n, h,k>=1} B(U_k, U_h).

Zero belongs to the attractor exactly when this series converges on the
whole disk with a uniform Gevrey-norm bound M.  At finite truncation the
verdict is numerical evidence, not proof.
"""
import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .gevrey import gevrey_norm
from .spectral import (Dealias, SpectralField, bilinear_advect,
                       bilinear_advect_pair, hermitian_inner, stokes_apply,
                       zero_field)


@dataclass(frozen=True)
class ConformalMap:
    """Strip S(delta) <-> unit disk; delta0 = 4 delta / pi."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    @property
    def delta0(self):
        return 4.0 * self.delta / math.pi

    def to_disk(self, t):
        e = np.exp(np.pi * np.asarray(t) / (2.0 * self.delta))
        return (e - 1.0) / (e + 1.0)

    def to_strip(self, T):
        T = np.asarray(T)
        return (2.0 * self.delta / np.pi) * (np.log(1.0 + T) - np.log(1.0 - T))


@dataclass
class TaylorSeries:
    """Coefficients U_0..U_N with their Gevrey norms |U_n|_b."""

    cmap: ConformalMap
    b: float
    coeffs: List[SpectralField] = field(repr=False)
    gnorms: np.ndarray = field(repr=False)
    divergent: bool = False

    @property
    def n_terms(self):
        return len(self.coeffs)


def taylor_coefficients(g, nu, cmap, n_terms, b=0.0, backend=None):
    """Run the coefficient recursion to U_{n_terms}.

    Quadratic terms are truncated back to the force grid, so the series is
    the exact power-series solution of the Galerkin-truncated system.  The
    paired sum B(U_k, U_h) + B(U_h, U_k) is fused into one convolution pass
    per unordered pair.  Coefficient-norm overflow past 1e300 stops the
    recursion early and flags the series divergent.
    """
    if n_terms < 2:
        raise ValueError("n_terms must be >= 2")
    d0 = cmap.delta0
    coeffs = [zero_field(g.grid), d0 * g, (-nu * d0 ** 2 / 2.0) * stokes_apply(g, 1)]
    divergent = False
    for n in range(2, n_terms):
        u_next = ((n - 1) / (n + 1)) * coeffs[n - 1] \
            + (-nu * d0 / (n + 1)) * stokes_apply(coeffs[n], 1)
        acc = None
        for k in range(1, n // 2 + 1):
            h = n - k
            if h == k:
                term = bilinear_advect(coeffs[k], coeffs[k],
                                       dealias=Dealias.TRUNCATE, backend=backend)
            else:
                term = bilinear_advect_pair(coeffs[k], coeffs[h],
                                            dealias=Dealias.TRUNCATE,
                                            backend=backend)
            acc = term if acc is None else acc + term
        if acc is not None:
            u_next = u_next + (-d0 / (n + 1)) * acc
        nrm = u_next.norm()
        if not math.isfinite(nrm) or nrm > 1e300:
            divergent = True
            break
        coeffs.append(u_next)
    coeffs = coeffs[:n_terms + 1]
    gnorms = np.array([gevrey_norm(u, b) if b else u.norm() for u in coeffs])
    return TaylorSeries(cmap=cmap, b=b, coeffs=coeffs, gnorms=gnorms,
                        divergent=divergent)


def evaluate_series(series, T, n_used=None):
    """Horner partial sum over U_0..U_{n_used-1} plus a remainder estimate.

    The remainder is |U_{n_used}|_b |T|^{n_used} / (1 - q) with q the
    observed tail ratio of the coefficient norms times |T| (inf when the
    observed tail does not contract).
    """
    T = complex(T)
    if abs(T) >= 1.0:
        raise ValueError("evaluation requires |T| < 1")
    n_avail = len(series.coeffs)
    n_used = n_avail if n_used is None else n_used
    if not 1 <= n_used <= n_avail:
        raise ValueError("n_used out of range")
    acc = series.coeffs[n_used - 1]
    for m in range(n_used - 2, -1, -1):
        acc = series.coeffs[m] + acc * T
    tail_norm = series.gnorms[min(n_used, n_avail - 1)]
    ratios = [series.gnorms[i] / series.gnorms[i - 1]
              for i in range(max(1, n_used - 8), n_used)
              if series.gnorms[i - 1] > 0 and np.isfinite(series.gnorms[i])]
    q = abs(T) * max(ratios) if ratios else 0.0
    if q >= 1.0:
        remainder = math.inf
    else:
        remainder = tail_norm * abs(T) ** n_used / (1.0 - q)
    return acc, remainder


def _derivative_partial_sum(series, T, n_used):
    acc = (n_used - 1) * series.coeffs[n_used - 1]
    for m in range(n_used - 2, 0, -1):
        acc = m * series.coeffs[m] + acc * T
    return acc


@dataclass
class RadiusEstimate:
    rho: float
    slope: float
    n_fit: int
    ratios: np.ndarray = field(repr=False)


def radius_estimate(series):
    """Root-test radius rho = exp(-slope) from an affine fit of ln |U_n|_b
    against n over the last half of the nonzero-coefficient window.

    All-zero series give rho = +inf.
    """
    g = series.gnorms[1:]
    ns = np.arange(1, len(g) + 1, dtype=float)
    finite = np.isfinite(g)
    pos = finite & (g > 0)
    ratios = np.full(len(g), np.nan)
    for i in range(1, len(g)):
        if pos[i] and pos[i - 1]:
            ratios[i] = g[i] / g[i - 1]
    if not np.any(pos):
        return RadiusEstimate(rho=math.inf, slope=-math.inf, n_fit=0,
                              ratios=ratios)
    ns, lg = ns[pos], np.log(g[pos])
    if len(ns) < 8:
        raise ValueError("radius estimation needs at least 8 nonzero norms")
    half = len(ns) // 2
    ns, lg = ns[half:], lg[half:]
    slope = float(np.polyfit(ns, lg, 1)[0])
    return RadiusEstimate(rho=math.exp(-slope), slope=slope, n_fit=len(ns),
                          ratios=ratios)


class Verdict(Enum):
    CONSISTENT = "ConsistentWithZeroInAttractor"
    EVIDENCE_NOT_IN = "EvidenceZeroNotInAttractor"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class AlignedTailDiagnostics:
    """Rank-1 structure of the coefficient tail, when present.

    For a series whose tail coefficients are real multiples of one fixed
    field with alternating (or constant) signs, a non-summable magnitude
    tail (power-law exponent < 1) forces sup_{|T|<1} |U(T)|_b = inf, which
    violates every uniform bound M.
    """

    aligned: bool
    sign_pattern: str = ""
    power_exponent: float = math.nan
    power_fit_sse: float = math.nan
    geometric_fit_sse: float = math.nan
    n_tail: int = 0

    @property
    def divergent(self):
        return (self.aligned
                and self.sign_pattern in ("alternating", "constant")
                and self.power_fit_sse < self.geometric_fit_sse
                and self.power_exponent < 0.98)


def _aligned_tail(series):
    nz = [n for n in range(1, len(series.coeffs))
          if series.gnorms[n] > 0 and np.isfinite(series.gnorms[n])]
    if len(nz) < 12:
        return AlignedTailDiagnostics(aligned=False)
    ref = series.coeffs[nz[0]]
    ref_energy = ref.energy()
    scalars = []
    for n in nz:
        u = series.coeffs[n]
        c = hermitian_inner(u, ref) / ref_energy
        if (u - c * ref).norm() > 1e-8 * u.norm():
            return AlignedTailDiagnostics(aligned=False)
        if abs(c.imag) > 1e-8 * abs(c):
            return AlignedTailDiagnostics(aligned=False)
        scalars.append(c.real)
    tail_idx = nz[len(nz) // 2:]
    tail = np.array(scalars[len(nz) // 2:])
    signs = np.sign(tail)
    if np.all(signs[1:] * signs[:-1] < 0):
        pattern = "alternating"
    elif np.all(signs[1:] * signs[:-1] > 0):
        pattern = "constant"
    else:
        pattern = "irregular"
    ns = np.array(tail_idx, dtype=float)
    lmag = np.log(np.abs(tail))
    pow_fit = np.polyfit(np.log(ns), lmag, 1)
    geo_fit = np.polyfit(ns, lmag, 1)
    sse_pow = float(np.sum((np.polyval(pow_fit, np.log(ns)) - lmag) ** 2))
    sse_geo = float(np.sum((np.polyval(geo_fit, ns) - lmag) ** 2))
    return AlignedTailDiagnostics(aligned=True, sign_pattern=pattern,
                                  power_exponent=-float(pow_fit[0]),
                                  power_fit_sse=sse_pow,
                                  geometric_fit_sse=sse_geo,
                                  n_tail=len(tail))


@dataclass
class VerdictReport:
    verdict: Verdict
    rho: float
    sup_sampled: float
    bound_m: float
    margin: float
    trigger: str
    aligned_tail: Optional[AlignedTailDiagnostics]
    note: str = ("finite truncation (K, N) makes this verdict numerical "
                 "evidence, not proof")


def criterion_verdict(series, bound_m, margin=0.05, n_radii=8, n_angles=8):
    """Decide what the computed series says about 0 being in the attractor.

    Evidence against: the estimated radius falls short of 1 by more than the
    margin; a sampled |U(T)|_b inside the fitted disk exceeds the bound M;
    or the coefficient tail is rank-1 aligned with a certified non-summable
    magnitude profile (boundary divergence no finite sample can reach when
    M is astronomically large).  Consistent: radius >= 1 and every sample
    within the bound.  Anything else is inconclusive.
    """
    try:
        est = radius_estimate(series)
        rho = est.rho
    except ValueError:
        rho = math.nan
    sup = 0.0
    r_max = min(rho if not math.isnan(rho) else 1.0, 1.0) - margin
    r_max = min(r_max, 0.99)
    if r_max > 0:
        for r in np.linspace(r_max / n_radii, r_max, n_radii):
            for a in range(n_angles):
                T = r * cmath.exp(2j * math.pi * a / n_angles)
                val, _ = evaluate_series(series, T)
                sup = max(sup, gevrey_norm(val, series.b) if series.b
                          else val.norm())
    diag = _aligned_tail(series)
    if series.divergent or (not math.isnan(rho) and rho < 1.0 - margin):
        verdict, trigger = Verdict.EVIDENCE_NOT_IN, "radius"
    elif sup > bound_m:
        verdict, trigger = Verdict.EVIDENCE_NOT_IN, "bound-exceeded"
    elif diag.divergent and (math.isnan(rho) or rho <= 1.0 + margin):
        verdict, trigger = Verdict.EVIDENCE_NOT_IN, "aligned-boundary-divergence"
    elif not math.isnan(rho) and rho >= 1.0 and sup <= bound_m:
        verdict, trigger = Verdict.CONSISTENT, "bounded-and-convergent"
    else:
        verdict, trigger = Verdict.INCONCLUSIVE, "none"
    return VerdictReport(verdict=verdict, rho=rho, sup_sampled=sup,
                         bound_m=bound_m, margin=margin, trigger=trigger,
                         aligned_tail=diag)


def ode_residual(series, g, nu, T_samples, n_used=None):
    """Max residual of dU/dT = delta0 psi(T) {g - nu A U - B(U, U)} over the
    samples, in the L^2 norm relative to |U_1|."""
    d0 = series.cmap.delta0
    try:
        rho = radius_estimate(series).rho
    except ValueError:
        rho = 1.0
    scale = series.coeffs[1].norm()
    if scale == 0:
        return 0.0
    worst = 0.0
    n_avail = len(series.coeffs)
    n_used = n_avail if n_used is None else n_used
    for T in np.atleast_1d(T_samples):
        T = complex(T)
        if abs(T) >= min(1.0, rho):
            raise ValueError(f"sample T={T} outside the disk of convergence")
        u, _ = evaluate_series(series, T, n_used=n_used)
        du = _derivative_partial_sum(series, T, n_used)
        psi = 1.0 / (1.0 - T * T)
        rhs = d0 * psi * (g + (-nu) * stokes_apply(u, 1)
                          + (-1.0) * bilinear_advect(u, u,
                                                     dealias=Dealias.TRUNCATE))
        worst = max(worst, (du - rhs).norm() / scale)
    return worst
