import math

import numpy as np
import pytest

from gevrey_nse import GridSpec, bound_chain, grashof, sobolev_radius_log
from gevrey_nse.bounds import BoundSet, sobolev_radius, strip_gevrey_bound
from gevrey_nse.kolmogorov import eigen_force

from conftest import make_random_field
from oracles import mp_bound_chain, mp_sobolev_radius_log

# frozen from the 60-digit oracle at (G, nu, kappa0, c_L, c_A) = (1,1,1,1,1),
# gamma_max = 40 (tests/oracles.py::mp_bound_chain)
REFERENCE_CHAIN = {
    "Rt1": 1.414213562373095,
    "R2": 2137.0,
    "Rt2": 4603.0869974917959,
    "delta1": 4.5211226851851852e-6,
    "delta2": 2.0861531580469269e-6,
    "delta3": 1.0430765790234634e-6,
    "N2": 46410377.872059906,
    "Rt3": 26681451.167313826,
    "C1": 2.6461547309436298e+41,
    "C2": 0.44724891810194456,
    "C3": 182047.37588182337,
    "beta1": 1.7110174605013245,
    "beta2": 6509.7480606361467,
    "Cg": 4.9742053336338333e+19,
}
REFERENCE_LOG_RT3 = 1399.236589275776


def synthetic_bounds(log_beta1=0.0, log_beta2=0.0, log_Cg=0.0, Rt1=1.0,
                     nu=1.0, kappa0=1.0):
    """Hand-built BoundSet for unit-testing the downstream formulas."""
    return BoundSet(G=1.0, nu=nu, kappa0=kappa0, c_l=1.0, c_a=1.0,
                    gamma_max=4, Rt1=Rt1, Rt2=1.0, Rt3=1.0, R2=1.0, N2=1.0,
                    delta1=1.0, delta2=1.0, delta3=0.5, beta1=math.exp(log_beta1),
                    beta2=math.exp(log_beta2), C1=1.0, C2=1.0, C3=1.0,
                    Cg=math.exp(log_Cg), log_C1=0.0, log_Cg=log_Cg,
                    log_beta1=log_beta1, log_beta2=log_beta2,
                    product_tail=0.0, tail_ok=True, gamma_table=[])


class TestGrashof:
    def test_zero_force(self):
        from gevrey_nse import zero_field
        assert grashof(zero_field(GridSpec(2)), 1.0, 1.0) == 0.0

    def test_unit_normalization(self):
        f = eigen_force((1, 0), 2.0 ** 2 * 3.0 ** 2, GridSpec(2))
        assert abs(grashof(f.field, 2.0, 3.0) - 1.0) < 1e-12

    def test_matches_parseval_norm(self):
        u = make_random_field(GridSpec(5, 1.3), seed=1)
        L2 = u.grid.length ** 2
        manual = math.sqrt(L2 * float(np.sum(np.abs(u.coeffs) ** 2)))
        assert abs(grashof(u, 0.5, 1.3) - manual / (0.5 ** 2 * 1.3 ** 2)) \
            <= 1e-12 * manual


class TestBoundChain:
    def test_start_values_exact(self):
        bs = bound_chain(1.0, 1.0, 1.0)
        assert bs.Rt1 == math.sqrt(2.0)
        assert bs.R2 == 2137.0
        assert bs.delta3 == bs.delta2 / 2.0
        bs2 = bound_chain(3.0, 0.7, 2.0, c_l=1.2, c_a=0.8)
        assert bs2.Rt1 == math.sqrt(2.0) * 3.0
        assert bs2.R2 == 2137.0 * 1.2 ** 4 * 27.0
        assert bs2.delta3 == bs2.delta2 / 2.0

    def test_reference_chain_matches_frozen_oracle(self):
        bs = bound_chain(1.0, 1.0, 1.0, 1.0, 1.0, gamma_max=40)
        for name, want in REFERENCE_CHAIN.items():
            got = getattr(bs, name if name != "Cg" else "Cg")
            assert abs(got - want) <= 1e-12 * abs(want), name

    def test_second_parameter_set_matches_live_oracle(self):
        params = (2.0, 0.5, 2.0, 1.1, 0.9)
        bs = bound_chain(*params)
        ref = mp_bound_chain(*params)
        for name in REFERENCE_CHAIN:
            got = getattr(bs, name)
            want = float(ref[name])
            assert abs(got - want) <= 1e-12 * abs(want), name

    def test_beta2_floor(self):
        # tiny G: the 72 sqrt(2)/pi^2 floor wins
        bs = bound_chain(1e-4, 1.0, 1.0)
        assert bs.beta2 == 72.0 * math.sqrt(2.0) / math.pi ** 2

    def test_positive_and_deterministic(self):
        a = bound_chain(2.5, 0.3, 1.7)
        b = bound_chain(2.5, 0.3, 1.7)
        for name in REFERENCE_CHAIN:
            va, vb = getattr(a, name), getattr(b, name)
            assert va > 0
            assert va == vb  # bit-identical

    def test_monotone_in_grashof(self):
        gs = [0.5, 1.0, 2.0, 4.0, 8.0]
        rt1 = [bound_chain(G, 1.0, 1.0).Rt1 for G in gs]
        r2 = [bound_chain(G, 1.0, 1.0).R2 for G in gs]
        rt3 = [bound_chain(G, 1.0, 1.0).Rt3 for G in gs]
        for seq in (rt1, r2, rt3):
            assert all(x < y for x, y in zip(seq, seq[1:]))

    def test_product_tails_certified(self):
        bs = bound_chain(1.0, 1.0, 1.0, gamma_max=40, tail_tol=1e-8)
        assert bs.tail_ok
        assert bs.product_tail <= 1e-8
        # partial products are increasing and Cauchy: eps, eta decay geometrically
        eps = [row[2] for row in bs.gamma_table]
        eta = [row[3] for row in bs.gamma_table]
        assert all(e2 < e1 for e1, e2 in zip(eps[5:], eps[6:]))
        for h1, h2 in zip(eta, eta[1:]):
            assert abs(h2 - h1 / 2.0) <= 1e-15 * h1

    def test_tail_certifies_truncation_error(self):
        lo = bound_chain(1.0, 1.0, 1.0, gamma_max=20, tail_tol=1e-4)
        hi = bound_chain(1.0, 1.0, 1.0, gamma_max=60)
        assert abs(lo.C1 - hi.C1) / hi.C1 <= lo.product_tail
        assert abs(lo.C2 - hi.C2) / hi.C2 <= lo.product_tail
        assert not bound_chain(1.0, 1.0, 1.0, gamma_max=20,
                               tail_tol=1e-9).tail_ok

    def test_input_validation(self):
        with pytest.raises(ValueError):
            bound_chain(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            bound_chain(1.0, 1.0, 1.0, gamma_max=3)


class TestSobolevRadiusFamily:
    def test_requires_alpha_three(self):
        bs = bound_chain(1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            sobolev_radius_log(2.9, bs)

    def test_reference_value_frozen(self):
        bs = bound_chain(1.0, 1.0, 1.0, gamma_max=40)
        got = sobolev_radius_log(3.0, bs)
        assert abs(got - REFERENCE_LOG_RT3) <= 1e-12 * REFERENCE_LOG_RT3

    def test_matches_live_oracle(self):
        params = (2.0, 0.5, 2.0, 1.1, 0.9)
        bs = bound_chain(*params)
        ref = mp_bound_chain(*params)
        for alpha in (3.0, 3.25, 3.5, 4.0, 5.5, 6.0):
            want = float(mp_sobolev_radius_log(alpha, ref))
            got = sobolev_radius_log(alpha, bs)
            assert abs(got - want) <= 1e-12 * abs(want), alpha

    def test_endpoint_reduces_to_family_form(self):
        # at alpha = gamma/2 the exponents collapse to (4^gamma, gamma^2 + 4.5 gamma)
        bs = synthetic_bounds(log_beta1=1e-3, log_beta2=2e-3, log_Cg=0.1)
        for gamma in (6, 7, 8):
            alpha = gamma / 2.0
            want = 0.5 * (0.1 + 4.0 ** gamma * 1e-3
                          + (gamma ** 2 + 4.5 * gamma) * 2e-3)
            assert abs(sobolev_radius_log(alpha, bs) - want) <= 1e-15 + 1e-12 * abs(want)

    def test_monotone_in_alpha(self):
        bs = bound_chain(1.0, 1.0, 1.0)
        alphas = np.linspace(3.0, 6.0, 61)
        vals = [sobolev_radius_log(a, bs) for a in alphas]
        assert all(x < y for x, y in zip(vals, vals[1:]))

    def test_continuous_across_gamma_breaks(self):
        bs = bound_chain(1.0, 1.0, 1.0)
        for gamma in (7, 8, 9):
            a = gamma / 2.0
            below = sobolev_radius_log(a - 1e-9, bs)
            at = sobolev_radius_log(a, bs)
            assert abs(below - at) <= 1e-5 * abs(at)

    def test_linear_accessor_saturates(self):
        bs = bound_chain(1.0, 1.0, 1.0)
        assert sobolev_radius(3.0, bs) == math.inf
        tiny = synthetic_bounds()
        assert sobolev_radius(3.0, tiny) == 1.0


class TestStripBound:
    def test_delta_to_zero_limit(self):
        bs = synthetic_bounds(Rt1=2.0)
        c1 = 1.0 / (math.e ** 2 - math.e)
        c2 = math.exp(2 * 0.1 * math.log(math.e ** 2 + math.e) ** 2)
        base = (4.0 / 3.0) * c2 * 4.0 + 3.0 ** (1.0 / 3.0) * (c1 * 2.0) ** (2.0 / 3.0)
        sb = strip_gevrey_bound(bs, b=0.1, delta=1e-300, g_weighted=1.0, c0=3.0)
        assert abs(sb.radius ** 2 - base) <= 1e-9 * base

    def test_zero_force_kills_m2(self):
        bs = synthetic_bounds()
        sb = strip_gevrey_bound(bs, b=0.1, delta=0.5, g_weighted=0.0, c0=1.0)
        assert sb.m2 == 0.0 and sb.m2_log == -math.inf

    def test_monotone_in_delta(self):
        bs = synthetic_bounds(Rt1=1.5)
        rads = [strip_gevrey_bound(bs, 0.1, d, 1.0, 1.0).radius_log
                for d in (0.1, 0.5, 1.0, 2.0)]
        assert all(x < y for x, y in zip(rads, rads[1:]))

    def test_m1_formula_small_regime(self):
        # with R_* = 1 (synthetic): M1 = 4 (c3 c_A)^2 + 2 sqrt(2) c3 c_A
        from gevrey_nse.gevrey import advection_weight_constant
        bs = synthetic_bounds()
        b = 0.2
        c3 = advection_weight_constant(b)
        want = 4.0 * c3 ** 2 + 2.0 * math.sqrt(2.0) * c3
        sb = strip_gevrey_bound(bs, b=b, delta=1.0, g_weighted=0.0, c0=1.0)
        assert abs(sb.m1 - want) <= 1e-12 * want

    def test_reference_regression(self):
        # frozen from the first validated run at the reference chain
        bs = bound_chain(1.0, 1.0, 1.0, gamma_max=40)
        sb = strip_gevrey_bound(bs, b=0.1, delta=bs.delta3, g_weighted=1.0,
                                c0=2.0)
        assert sb.radius_log == math.inf  # e^{M1 ...} overflows by design
        got = sb.m1_log
        # log M1 = log(4 (c3 cA)^2 R^2 + 2 sqrt(2) c3 cA R), R = e^{lr}
        from gevrey_nse.gevrey import advection_weight_constant
        lr = sobolev_radius_log(3.0 + 2.0 * 0.1 * math.log(2.0), bs)
        lca = math.log(advection_weight_constant(0.1))
        want = math.log(4.0) + 2.0 * (lca + lr)  # quadratic term dominates
        assert abs(got - want) <= 1e-12 * abs(want)
