import math

import numpy as np
import pytest

from gevrey_nse import (Dealias, GridSpec, bilinear_advect, field_from_modes,
                        inner_product, leray_project, random_solenoidal_field,
                        stokes_apply, zero_field)
from gevrey_nse._kernels import available_backends
from gevrey_nse.spectral import (bilinear_advect_pair, check_advection_inner_bound,
                                 embed, eval_physical, hermitian_inner,
                                 inequality_audit)

from conftest import make_random_field
from oracles import brute_force_advection


class TestGridAndField:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            GridSpec(0)
        with pytest.raises(ValueError):
            GridSpec(4, kappa0=-1.0)

    def test_parseval_identity_is_exact(self):
        u = make_random_field(GridSpec(5, 2.0), seed=1)
        L2 = u.grid.length ** 2
        assert u.energy() == L2 * float(np.sum(np.abs(u.coeffs) ** 2))

    def test_mean_zero_enforced(self):
        grid = GridSpec(2)
        c = np.zeros((grid.n, grid.n, 2), complex)
        c[2, 2] = (1.0, 0.0)
        from gevrey_nse.spectral import SpectralField
        with pytest.raises(ValueError):
            SpectralField(grid, c)

    def test_coefficients_are_immutable(self):
        u = make_random_field(GridSpec(3), seed=2)
        with pytest.raises(ValueError):
            u.coeffs[0, 0, 0] = 1.0

    def test_mode_outside_grid_rejected(self):
        with pytest.raises(ValueError):
            field_from_modes(GridSpec(2), {(3, 0): (0, 1)})

    def test_non_solenoidal_mode_rejected(self):
        with pytest.raises(ValueError):
            field_from_modes(GridSpec(2), {(1, 0): (1, 0)})


class TestLerayProjection:
    def test_gradient_mode_annihilated(self):
        grid = GridSpec(4)
        u = leray_project({(2, 1): (2.0, 1.0)}, grid)  # parallel to k
        assert u.norm() == 0.0

    def test_solenoidal_mode_unchanged(self):
        grid = GridSpec(4)
        u = leray_project({(2, 1): (-1.0, 2.0)}, grid)  # perpendicular to k
        assert u.coeffs[2 + 4, 1 + 4, 0] == -1.0
        assert u.coeffs[2 + 4, 1 + 4, 1] == 2.0

    def test_component_along_k_subtracted(self):
        grid = GridSpec(2)
        u = leray_project({(1, 0): (1.0, 1.0)}, grid)
        np.testing.assert_allclose(u.coeffs[3, 2], [0.0, 1.0], atol=1e-15)

    def test_k_zero_entry_rejected(self):
        with pytest.raises(ValueError):
            leray_project({(0, 0): (1.0, 0.0)}, GridSpec(2))

    def test_idempotent(self):
        grid = GridSpec(6)
        rng = np.random.default_rng(3)
        raw = rng.standard_normal((grid.n, grid.n, 2)) \
            + 1j * rng.standard_normal((grid.n, grid.n, 2))
        raw[grid.K, grid.K] = 0
        once = leray_project(raw, grid, reality=False)
        twice = leray_project(once.coeffs, grid, reality=False)
        np.testing.assert_allclose(twice.coeffs, once.coeffs, atol=1e-14)
        assert once.divergence_residual() < 1e-13


class TestStokesOperator:
    def test_sigma_zero_is_identity(self):
        u = make_random_field(GridSpec(4), seed=4)
        assert stokes_apply(u, 0.0) is u

    def test_single_mode_eigenvalue(self):
        grid = GridSpec(2, kappa0=1.7)
        u = field_from_modes(grid, {(1, 0): (0, 2.0)})
        v = stokes_apply(u, 1.0)
        np.testing.assert_allclose(v.coeffs, 1.7 ** 2 * u.coeffs, rtol=1e-15)

    def test_sqrt_power_on_diagonal_mode(self):
        grid = GridSpec(2, kappa0=1.3)
        u = field_from_modes(grid, {(1, 1): (1.0, -1.0)})
        v = stokes_apply(u, 0.5)
        np.testing.assert_allclose(v.coeffs, 1.3 * math.sqrt(2) * u.coeffs,
                                   rtol=1e-15)

    def test_power_composition(self):
        u = make_random_field(GridSpec(6), seed=5)
        for s1, s2 in [(1.0, 0.5), (-0.5, 2.0), (0.25, 0.25)]:
            a = stokes_apply(stokes_apply(u, s1), s2)
            b = stokes_apply(u, s1 + s2)
            assert (a - b).norm() <= 1e-13 * b.norm()

    def test_negative_power_inverts(self):
        u = make_random_field(GridSpec(4), seed=6)
        v = stokes_apply(stokes_apply(u, -1.0), 1.0)
        assert (v - u).norm() <= 1e-13 * u.norm()


class TestInnerProduct:
    def test_conjugate_pair_energy(self):
        grid = GridSpec(3, kappa0=2.0)
        u = field_from_modes(grid, {(2, 1): (-0.5, 1.0)})
        m = float(np.sum(np.abs(u.coeffs[2 + 3, 1 + 3]) ** 2))
        expected = 2 * grid.length ** 2 * m
        assert abs(inner_product(u, u).real - expected) < 1e-12 * expected
        assert abs(inner_product(u, u).imag) < 1e-14 * expected

    def test_orthogonal_modes(self):
        grid = GridSpec(3)
        u = field_from_modes(grid, {(1, 0): (0, 1.0)})
        v = field_from_modes(grid, {(0, 1): (1.0, 0)})
        assert inner_product(u, v) == 0

    def test_matches_norm_accessor(self):
        u = make_random_field(GridSpec(6, 0.7), seed=7)
        ip = inner_product(u, u)
        assert abs(ip.real - u.energy()) <= 1e-12 * u.energy()
        assert abs(ip.imag) <= 1e-12 * u.energy()

    def test_grid_mismatch_rejected(self):
        u = make_random_field(GridSpec(3), seed=8)
        v = make_random_field(GridSpec(4), seed=8)
        with pytest.raises(ValueError):
            inner_product(u, v)

    def test_hermitian_matches_energy_for_complex(self):
        u = make_random_field(GridSpec(4), seed=9, reality=False)
        assert abs(hermitian_inner(u, u).real - u.energy()) \
            <= 1e-12 * u.energy()


class TestBilinearTerm:
    @pytest.mark.parametrize("K", [2, 3, 4])
    @pytest.mark.parametrize("policy", [Dealias.TRUNCATE, Dealias.EXTEND])
    def test_matches_brute_force(self, K, policy):
        grid = GridSpec(K, 1.4)
        u = make_random_field(grid, seed=10 + K)
        v = make_random_field(grid, seed=20 + K, reality=False)
        w = bilinear_advect(u, v, dealias=policy)
        ref = brute_force_advection(u, v, grid, w.grid.K)
        scale = np.abs(ref).max()
        assert np.abs(w.coeffs - ref).max() <= 1e-12 * scale

    def test_backends_agree(self):
        grid = GridSpec(5)
        u = make_random_field(grid, seed=11)
        v = make_random_field(grid, seed=12)
        results = {be: bilinear_advect(u, v, dealias=Dealias.EXTEND, backend=be)
                   for be in available_backends()}
        base = results.popitem()[1]
        for be, w in results.items():
            assert (w - base).norm() <= 1e-12 * base.norm(), be

    def test_zero_factor_annihilates(self):
        grid = GridSpec(3)
        u = make_random_field(grid, seed=13)
        z = zero_field(grid)
        assert bilinear_advect(u, z).norm() == 0.0
        assert bilinear_advect(z, u).norm() == 0.0

    def test_bilinearity(self):
        grid = GridSpec(4)
        u1 = make_random_field(grid, seed=14)
        u2 = make_random_field(grid, seed=15)
        v = make_random_field(grid, seed=16)
        lhs = bilinear_advect(2.0 * u1 + (-3.0) * u2, v)
        rhs = 2.0 * bilinear_advect(u1, v) + (-3.0) * bilinear_advect(u2, v)
        assert (lhs - rhs).norm() <= 1e-12 * max(rhs.norm(), 1.0)

    def test_pair_equals_two_calls(self):
        grid = GridSpec(4)
        u = make_random_field(grid, seed=17)
        v = make_random_field(grid, seed=18)
        pair = bilinear_advect_pair(u, v)
        two = bilinear_advect(u, v) + bilinear_advect(v, u)
        assert (pair - two).norm() <= 1e-12 * max(two.norm(), 1.0)

    def test_reality_preserved(self):
        grid = GridSpec(4)
        u = make_random_field(grid, seed=19)
        v = make_random_field(grid, seed=20)
        w = bilinear_advect(u, v)
        assert w.reality
        assert w.conjugate_symmetry_residual() < 1e-12
        assert w.divergence_residual() < 1e-12

    def test_energy_orthogonality_untruncated(self):
        grid = GridSpec(6)
        for seed in range(5):
            u = make_random_field(grid, seed=30 + seed)
            v = make_random_field(grid, seed=40 + seed)
            b = bilinear_advect(u, v, dealias=Dealias.EXTEND)
            ip = inner_product(b, embed(v, b.grid.K))
            assert abs(ip.real) <= 1e-10 * u.norm() * v.norm() ** 2

    def test_enstrophy_orthogonality_untruncated(self):
        grid = GridSpec(6)
        for seed in range(5):
            u = make_random_field(grid, seed=50 + seed)
            b = bilinear_advect(u, u, dealias=Dealias.EXTEND)
            au = stokes_apply(embed(u, b.grid.K), 1.0)
            lam_max = grid.kappa0 ** 2 * 2 * grid.K ** 2
            assert abs(inner_product(b, au).real) \
                <= 1e-10 * u.norm() ** 2 * lam_max


class TestPhysicalSpace:
    def test_single_mode_values(self):
        grid = GridSpec(2, kappa0=1.0)
        u = field_from_modes(grid, {(1, 0): (0, 0.5)})
        vals = eval_physical(u, 16)
        # u(x) = 2 * 0.5 * cos(x1) in the second component
        x = 2 * math.pi * np.arange(16) / 16
        np.testing.assert_allclose(vals[:, 0, 1], np.cos(x), atol=1e-12)
        np.testing.assert_allclose(vals[:, :, 0], 0.0, atol=1e-13)

    def test_poincare_residual_nonpositive(self):
        for seed in range(20):
            u = make_random_field(GridSpec(6), seed=seed)
            audit = inequality_audit(u)
            assert audit.poincare_residual <= 1e-12 * u.norm()

    def test_poincare_equality_lowest_mode(self):
        grid = GridSpec(3, kappa0=1.5)
        u = field_from_modes(grid, {(1, 0): (0, 1.0)})
        audit = inequality_audit(u)
        assert abs(audit.poincare_residual) <= 1e-12 * u.norm()

    def test_poincare_gap_high_mode(self):
        grid = GridSpec(4, kappa0=1.0)
        u = field_from_modes(grid, {(3, 0): (0, 1.0)})
        # kappa0 |u| = |A^{1/2}u| / 3
        assert abs(u.grid.kappa0 * u.norm() - u.sobolev_norm(1) / 3.0) \
            <= 1e-12 * u.norm()

    def test_empirical_constants_bounded(self):
        worst_l = worst_a = 0.0
        for seed in range(100):
            u = make_random_field(GridSpec(6), seed=1000 + seed)
            audit = inequality_audit(u)
            worst_l = max(worst_l, audit.c_l_empirical)
            worst_a = max(worst_a, audit.c_a_empirical)
        # calibration data: with c_L = c_A = 1 both inequalities hold here
        assert worst_l <= 1.0
        assert worst_a <= 1.0

    def test_resolution_floor_enforced(self):
        u = make_random_field(GridSpec(4), seed=3)
        with pytest.raises(ValueError):
            inequality_audit(u, resolution=8)


class TestAdvectionInnerBound:
    def test_alpha_must_exceed_three(self):
        u = make_random_field(GridSpec(3), seed=1)
        with pytest.raises(ValueError):
            check_advection_inner_bound(u, u, u, alpha=3.0)

    def test_orthogonal_test_field_trivially_passes(self):
        grid = GridSpec(3)
        u = field_from_modes(grid, {(1, 0): (0, 1.0)})
        # B(u, u) = 0 for a single shear mode, so the pairing vanishes
        chk = check_advection_inner_bound(u, u, u, alpha=4.0)
        assert chk.passed and chk.lhs == 0.0

    def test_single_mode_closed_form(self):
        grid = GridSpec(3, kappa0=2.0)
        u = field_from_modes(grid, {(1, 0): (0, 1.0)})
        v = field_from_modes(grid, {(1, 1): (0.5, -0.5)})
        chk = check_advection_inner_bound(u, v, v, alpha=3.5)
        assert chk.passed
        assert chk.rhs > 0

    @pytest.mark.parametrize("alpha", [3.5, 4.0, 5.0])
    def test_random_triples_pass(self, alpha):
        grid = GridSpec(8)
        for seed in range(34):
            u = make_random_field(grid, seed=100 + seed)
            v = make_random_field(grid, seed=200 + seed)
            w = make_random_field(grid, seed=300 + seed)
            assert check_advection_inner_bound(u, v, w, alpha=alpha).passed

    def test_complexified_prefactor(self):
        grid = GridSpec(4)
        u = make_random_field(grid, seed=400, reality=False)
        v = make_random_field(grid, seed=401, reality=False)
        w = make_random_field(grid, seed=402, reality=False)
        real = check_advection_inner_bound(
            make_random_field(grid, seed=400),
            make_random_field(grid, seed=401),
            make_random_field(grid, seed=402), alpha=4.0)
        cplx = check_advection_inner_bound(u, v, w, alpha=4.0)
        assert cplx.passed
        # complexified prefactor is 2^{3/2} larger
        assert cplx.rhs / cplx.lhs > 0
        assert real.passed
