"""Recursive evaluation of the a-priori bound chain.

Everything here is pure arithmetic in the Grashof number G = |g|/(nu^2
kappa0^2), the viscosity, the base wavenumber, and the two inequality
constants c_L, c_A.  The chain is evaluated in dependency order; the two
infinite products are truncated with certified geometric tail bounds.

The interpolated Sobolev-radius family R_alpha (alpha >= 3) and the strip
Gevrey bound grow beyond float64 range almost immediately (the exponents
reach 4^gamma), so those quantities are produced as natural logarithms;
linear accessors saturate to inf.
"""
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ._logspace import log_add

_SQRT2 = math.sqrt(2.0)


def grashof(g, nu, kappa0):
    """Dimensionless force magnitude |g| / (nu^2 kappa0^2)."""
    return g.norm() / (nu ** 2 * kappa0 ** 2)


@dataclass
class BoundSet:
    """Every constant of the recursion, plus truncation-tail certificates."""

    G: float
    nu: float
    kappa0: float
    c_l: float
    c_a: float
    gamma_max: int
    Rt1: float
    Rt2: float
    Rt3: float
    R2: float
    N2: float
    delta1: float
    delta2: float
    delta3: float
    beta1: float
    beta2: float
    C1: float
    C2: float
    C3: float
    Cg: float
    log_C1: float
    log_Cg: float
    log_beta1: float
    log_beta2: float
    product_tail: float
    tail_ok: bool
    gamma_table: List[Tuple[int, float, float, float]] = field(repr=False)

    def as_rows(self):
        rows = [("G", self.G), ("nu", self.nu), ("kappa0", self.kappa0),
                ("c_L", self.c_l), ("c_A", self.c_a),
                ("Rt1", self.Rt1), ("Rt2", self.Rt2), ("Rt3", self.Rt3),
                ("R2", self.R2), ("N2", self.N2),
                ("delta1", self.delta1), ("delta2", self.delta2),
                ("delta3", self.delta3),
                ("beta1", self.beta1), ("beta2", self.beta2),
                ("C1", self.C1), ("C2", self.C2), ("C3", self.C3),
                ("Cg", self.Cg), ("product_tail", self.product_tail)]
        return rows


def bound_chain(G, nu, kappa0, c_l=1.0, c_a=1.0, gamma_max=40, tail_tol=1e-8):
    """Evaluate the full constant chain for positive inputs.

    The products over gamma are truncated at gamma_max; the reported
    product_tail bounds the relative truncation error of both, and tail_ok
    records whether it met tail_tol (callers should raise gamma_max when it
    did not).
    """
    if min(G, nu, kappa0, c_l, c_a) <= 0:
        raise ValueError("all chain inputs must be positive")
    if gamma_max < 4:
        raise ValueError("gamma_max must be >= 4")
    Rt1 = _SQRT2 * G
    R2 = 2137.0 * c_l ** 4 * G ** 3
    mix = 2.0 * c_l ** 2 + c_a
    Rt2 = math.sqrt(
        (3.0 * (_SQRT2 * 16 ** 2 * 24 ** 6 * c_l ** 16) ** (2.0 / 3.0)
         / (4.0 * mix ** (4.0 / 3.0))) * G ** 6
        + 4.0 * R2 ** 2)
    delta1 = 1.0 / (16.0 * 24 ** 3 * c_l ** 8 * nu * kappa0 ** 2 * G ** 4)
    bracket = (mix ** (8.0 / 3.0) * Rt1 ** (8.0 / 3.0)
               * (nu * kappa0 ** 2 / (8.0 * delta1 ** 2)) ** (2.0 / 3.0)
               + mix ** 4 * (nu * kappa0 ** 2) ** 2 * Rt1 ** 2 * R2 ** 2)
    delta2 = min(delta1, 1.0 / (16.0 * math.sqrt(bracket)))
    delta3 = delta2 / 2.0
    N2 = (R2 ** 2
          + 2.0 * delta2 * Rt1 ** 2 / (nu * kappa0 ** 2 * delta1 ** 2)
          + 16.0 * mix ** 2 * nu * kappa0 ** 2 * delta2 * Rt1 * Rt2 ** 3)
    Rt3 = 4.0 * math.sqrt(N2) / (math.sqrt(nu) * kappa0 * math.sqrt(delta3))
    delta_a = delta3
    root13 = math.sqrt(Rt1 * Rt3)

    def gamma_big(g):
        return 2.0 ** (g + 1.5) * c_a * (2.0 ** (g + 2) * c_a * Rt1 * Rt2 + root13)

    def eps_g(g):
        gam, gam1 = gamma_big(g), gamma_big(g + 1)
        return (1.0 / (2.0 * _SQRT2 * gam * delta_a * nu * kappa0 ** 2)
                + _SQRT2 / (gam * nu ** 2 * kappa0 ** 4 * delta_a ** 2)
                + math.pi ** 2 / (72.0 * nu ** 2 * kappa0 ** 4 * delta_a ** 4
                                  * gam * gam1))

    def eta_g(g):
        return root13 / (2.0 ** (g + 2) * c_a * Rt1 * Rt2)

    table = []
    log_C1 = 0.0
    log_prod_eta = 0.0
    for g in range(3, gamma_max + 1):
        e, h = eps_g(g), eta_g(g)
        table.append((g, gamma_big(g), e, h))
        log_C1 += math.log1p(e)
        log_prod_eta += math.log1p(h)
    # tails: eps decays at least geometrically (Gamma_gamma ~ 4^gamma),
    # eta exactly halves each step
    eps_next = eps_g(gamma_max + 1)
    ratio = eps_g(gamma_max + 2) / eps_next if eps_next > 0 else 0.0
    tail_c1 = math.expm1(eps_next / (1.0 - ratio)) if ratio < 1 else math.inf
    tail_c2 = math.expm1(2.0 * eta_g(gamma_max + 1))
    product_tail = max(tail_c1, tail_c2)
    C1 = math.exp(log_C1) if log_C1 < 709 else math.inf
    C2 = 27.0 / 128.0 * c_l ** 8 * Rt1 ** 2 * math.exp(log_prod_eta)
    C3 = 4.0 * (2.0 ** 2.5 * c_a ** 2 * Rt1 * Rt2 + _SQRT2 * c_a * root13)
    log_beta1 = 2.0 * _SQRT2 * nu * kappa0 ** 2 * C3 * delta_a
    beta1 = math.exp(log_beta1) if log_beta1 < 709 else math.inf
    beta2 = max(72.0 * _SQRT2 / math.pi ** 2, c_a ** 2 * Rt1 * Rt2)
    log_beta2 = math.log(beta2)
    log_Cg = (log_C1 + math.log(C2) + 2.0 * math.log(Rt3)
              - 9.5 * log_beta2)
    Cg = math.exp(log_Cg) if log_Cg < 709 else math.inf
    return BoundSet(G=G, nu=nu, kappa0=kappa0, c_l=c_l, c_a=c_a,
                    gamma_max=gamma_max,
                    Rt1=Rt1, Rt2=Rt2, Rt3=Rt3, R2=R2, N2=N2,
                    delta1=delta1, delta2=delta2, delta3=delta3,
                    beta1=beta1, beta2=beta2,
                    C1=C1, C2=C2, C3=C3, Cg=Cg,
                    log_C1=log_C1, log_Cg=log_Cg,
                    log_beta1=log_beta1, log_beta2=log_beta2,
                    product_tail=product_tail,
                    tail_ok=product_tail <= tail_tol,
                    gamma_table=table)


def sobolev_radius_log(alpha, bounds):
    """ln R_alpha of the interpolated Sobolev-radius family, alpha >= 3:

        R_alpha^2 = Cg * beta1^{4^gamma (6 alpha + 1 - 3 gamma)}
                       * beta2^{-gamma^2 + (4 alpha - 1) gamma + 11 alpha},

    with gamma the integer for which alpha lies in [gamma/2, (gamma+1)/2).
    """
    if alpha < 3:
        raise ValueError("the radius family starts at alpha = 3")
    gamma = math.floor(2.0 * alpha)
    e1 = 4.0 ** gamma * (6.0 * alpha + 1.0 - 3.0 * gamma)
    e2 = -float(gamma) ** 2 + (4.0 * alpha - 1.0) * gamma + 11.0 * alpha
    return 0.5 * (bounds.log_Cg + e1 * bounds.log_beta1 + e2 * bounds.log_beta2)


def sobolev_radius(alpha, bounds):
    """Linear R_alpha; saturates to inf beyond float range."""
    lr = sobolev_radius_log(alpha, bounds)
    return math.exp(lr) if lr < 709 else math.inf


@dataclass
class StripGevreyBound:
    """Gevrey-norm bound for attractor solutions across the analyticity strip.

    All three members are stored as natural logs; m2_log may be -inf (zero
    force).  The linear properties saturate to inf / 0.
    """

    m1_log: float
    m2_log: float
    radius_log: float

    @property
    def m1(self):
        return math.exp(self.m1_log) if self.m1_log < 709 else math.inf

    @property
    def m2(self):
        if self.m2_log == -math.inf:
            return 0.0
        return math.exp(self.m2_log) if self.m2_log < 709 else math.inf

    @property
    def radius(self):
        return math.exp(self.radius_log) if self.radius_log < 709 else math.inf


def strip_gevrey_bound(bounds, b, delta, g_weighted, c0, c_a=None):
    """Evaluate (M1, M2, R_new) for Gevrey exponent b and strip half-width delta.

        M1 = 4 (c3 c_A)^2 R_*^2 + 2 sqrt(2) c3 c_A R_*,  R_* = R_{3 + 2 b ln 2}
        M2 = 2 sqrt(2) g_weighted^2
             / ((2 sqrt(2) (c3 c_A)^2 R_*^2 + 2 c3 c_A R_*) nu^4 kappa0^2)
        R_new^2 = e^{M1 delta nu kappa0^2} ((4/3) c2 R1^2 + c0^{1/3} (c1 R1)^{2/3})
                  + M2 (e^{M1 delta nu kappa0^2} - 1)

    with c1 = 1/(e^2 - e), c2 = e^{2 b [ln(e^2+e)]^2}, c3 the advection
    weight constant, and g_weighted = |A^{-1/2} E^b g|.  c0 is the growth
    certificate constant of the attractor state.
    """
    from .gevrey import advection_weight_constant

    nu, kappa0 = bounds.nu, bounds.kappa0
    c_a = bounds.c_a if c_a is None else c_a
    ln2 = math.log(2.0)
    c1 = 1.0 / (math.e ** 2 - math.e)
    c2 = math.exp(2.0 * b * math.log(math.e ** 2 + math.e) ** 2)
    c3 = advection_weight_constant(b)
    lca = math.log(c3 * c_a)
    lr = sobolev_radius_log(3.0 + 2.0 * b * ln2, bounds)
    m1_log = log_add(math.log(4.0) + 2.0 * (lca + lr),
                     math.log(2.0 * _SQRT2) + lca + lr)
    if g_weighted == 0.0:
        m2_log = -math.inf
    else:
        denom = log_add(math.log(2.0 * _SQRT2) + 2.0 * (lca + lr),
                        math.log(2.0) + lca + lr)
        m2_log = (math.log(2.0 * _SQRT2) + 2.0 * math.log(g_weighted)
                  - denom - 4.0 * math.log(nu) - 2.0 * math.log(kappa0))
    base = (4.0 / 3.0) * c2 * bounds.Rt1 ** 2 \
        + c0 ** (1.0 / 3.0) * (c1 * bounds.Rt1) ** (2.0 / 3.0)
    # R_new^2 = e^x (base + M2) - M2 with x = M1 delta nu kappa0^2
    x_log = m1_log + math.log(delta * nu * kappa0 ** 2)
    x = math.exp(x_log) if x_log < 709 else math.inf
    m2 = 0.0 if m2_log == -math.inf else \
        (math.exp(m2_log) if m2_log < 709 else math.inf)
    if not math.isfinite(x):
        radius_sq_log = math.inf
    elif math.isfinite(m2):
        inner = base + m2 - (m2 * math.exp(-x) if x < 709 else 0.0)
        radius_sq_log = x + math.log(inner)
    else:
        radius_sq_log = m2_log + (math.log(math.expm1(x)) if x < 709 else x)
    return StripGevreyBound(m1_log=m1_log, m2_log=m2_log,
                            radius_log=0.5 * radius_sq_log)


def gamma_table_array(bounds):
    """(gamma, Gamma, eps, eta) rows as a float array, for CSV emission."""
    return np.array(bounds.gamma_table, dtype=float)
