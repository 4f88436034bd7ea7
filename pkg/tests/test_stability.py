import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relaxlab.linalg import LinalgError, operator_norm
from relaxlab.model import jinxin, osc3
from relaxlab.stability import (
    RegionError,
    RegionQuery,
    check_improved_resolvent,
    half_plane_samples,
    in_region,
    is_power_bounded,
    is_quasi_stable,
    kreiss_measure,
    region_boundary_samples,
    region_resolvent_check,
    sup_semigroup_norm,
    unit_triangular_inverse_check,
    yong_check,
)

ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])
# ||[[1, c], [0, 1]]|| = (|c| + sqrt(c^2 + 4)) / 2
K_SHEAR10 = (10 + math.sqrt(104)) / 2


def random_stable(rng, n, axis=0):
    """V diag(values) V^-1 with ``axis`` simple eigenvalues on the imaginary axis."""
    vals = -rng.uniform(0.1, 3.0, n) + 1j * rng.standard_normal(n)
    vals[:axis] = 1j * (np.arange(axis) + 1.0)
    V = rng.standard_normal((n, n)) + 2.0 * np.eye(n)  # non-normal in general
    return V @ np.diag(vals) @ np.linalg.inv(V)


class TestQuasiStability:
    def test_examples(self):
        assert is_quasi_stable(ROT).quasi_stable
        rep = is_quasi_stable([[0, 1], [0, 0]])
        assert not rep.quasi_stable
        assert len(rep.boundary_defects) == 1
        assert is_quasi_stable(np.diag([-1.0, 0.0])).quasi_stable

    def test_unstable(self):
        rep = is_quasi_stable(np.diag([0.1, -1.0]))
        assert not rep.quasi_stable
        assert rep.spectral_abscissa == pytest.approx(0.1)

    def test_report_invariants(self):
        for M in (ROT, np.diag([-1.0, 0.0]), [[0, 1], [0, 0]], [[-1, 4], [0, -1]]):
            rep = is_quasi_stable(M)
            assert rep.sup_semigroup >= 1.0
            if rep.quasi_stable:
                assert not rep.boundary_defects
                assert rep.spectral_abscissa <= rep.tolerance

    def test_defective_axis_pair(self):
        # Jordan blocks at +-i
        J = np.kron(np.eye(2), np.diag([1.0], 1)) + np.diag([1j, 1j, -1j, -1j])
        assert not is_quasi_stable(J).quasi_stable

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_classification_consistency(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        M = random_stable(rng, n, axis=int(rng.integers(0, 2)))
        rep = is_quasi_stable(M)
        assert rep.quasi_stable
        est = sup_semigroup_norm(M, 100.0, 1000)
        assert math.isfinite(est.sup)
        assert not est.still_increasing


class TestSemigroup:
    def test_rotation_and_zero(self):
        assert sup_semigroup_norm(ROT, 37.0).sup == pytest.approx(1.0, abs=1e-12)
        assert sup_semigroup_norm(np.zeros((3, 3))).sup == 1.0

    def test_shear_against_closed_form(self):
        # ||e^{Mt}|| = e^{-t}(4t + sqrt(16t^2 + 4))/2, maximal at t = sqrt(3)/2
        expect = (2 + math.sqrt(3)) * math.exp(-math.sqrt(3) / 2)
        est = sup_semigroup_norm([[-1, 4], [0, -1]], 20.0)
        assert est.sup == pytest.approx(expect, rel=1e-10)
        assert est.t_at_sup == pytest.approx(math.sqrt(3) / 2, rel=1e-6)
        assert not est.still_increasing

    def test_still_increasing_flag(self):
        est = sup_semigroup_norm([[0, 1], [0, 0]], 50.0)
        assert est.still_increasing
        assert est.sup == pytest.approx((50 + math.sqrt(2504)) / 2, rel=1e-12)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            sup_semigroup_norm(ROT, 0.0)
        with pytest.raises(ValueError):
            sup_semigroup_norm(ROT, 1.0, samples=1)


class TestKreiss:
    def test_normal_examples(self):
        for M in (np.diag([-1.0, -2.0, 1j]), ROT, np.diag([-1.0])):
            k = kreiss_measure(M)
            assert k.value == pytest.approx(1.0, abs=1e-6)
            assert not k.divergent

    def test_shear_attained_at_origin(self):
        k = kreiss_measure([[-1, 10], [0, -1]])
        assert k.value <= K_SHEAR10 * (1 + 1e-12)
        assert k.value == pytest.approx(K_SHEAR10, rel=1e-4)
        assert abs(k.z_at_max) < 1e-2
        assert not k.divergent

    def test_jordan_divergence(self):
        k = kreiss_measure([[0, 1], [0, 0]])
        assert k.divergent
        assert k.levels[-1] > 10 * k.levels[-2]

    def test_spectrum_in_right_half_plane(self):
        k = kreiss_measure(np.diag([1.0, 2.0]))
        assert k.value == math.inf

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.sampled_from([0.01, 0.5, 7.0, 300.0]))
    def test_scale_invariance(self, seed, omega):
        rng = np.random.default_rng(seed)
        M = random_stable(rng, int(rng.integers(2, 5)))
        a, b = kreiss_measure(M).value, kreiss_measure(omega * M).value
        assert b == pytest.approx(a, rel=1e-4)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.booleans())
    def test_finiteness_matches_classification(self, seed, defective):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        M = random_stable(rng, n, axis=1)
        if defective:
            # a 2x2 Jordan block at 0 in random coordinates
            T = np.diag(-rng.uniform(0.5, 2.0, n)).astype(complex)
            T[0, 0] = T[1, 1] = 0.0
            T[0, 1] = 1.0
            V = rng.standard_normal((n, n)) + 3 * np.eye(n)
            M = V @ T @ np.linalg.inv(V)
        assert is_quasi_stable(M).quasi_stable == (not defective)
        assert kreiss_measure(M).divergent == defective


class TestImprovedResolvent:
    def test_examples(self):
        z = half_plane_samples(np.diag([-1.0]), 500, seed=1)
        r = check_improved_resolvent(np.diag([-1.0]), 1.0, RegionQuery("half_plane_H", z))
        assert r.max_ratio == pytest.approx(1.0, abs=1e-12)
        M = np.array([[-1.0, 10.0], [0.0, -1.0]])
        r = check_improved_resolvent(M, 10.1, RegionQuery("half_plane_H", half_plane_samples(M, 2000)))
        assert r.max_ratio <= 10.0991 and r.holds
        r = check_improved_resolvent(ROT, 1.0, RegionQuery("half_plane_H", half_plane_samples(ROT, 2000)))
        assert r.max_ratio == pytest.approx(1.0, abs=1e-6)

    def test_rejects_left_points(self):
        with pytest.raises(RegionError):
            check_improved_resolvent(ROT, 1.0, RegionQuery("half_plane_H", [1.0, -0.5]))

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_never_exceeds_sampled_kreiss(self, seed):
        rng = np.random.default_rng(seed)
        M = random_stable(rng, int(rng.integers(2, 6)), axis=1)
        K = kreiss_measure(M).value
        z = half_plane_samples(M, 2000, seed=seed % 1000)
        assert check_improved_resolvent(M, K, RegionQuery("half_plane_H", z)).holds


class TestRegions:
    def test_normal_matrix_saturates_below_one(self):
        M = np.diag([-1.0, -0.5 + 2j, -3.0])
        for r in (0.5, 1.0, 2.0):
            z = region_boundary_samples(M, "miller_S", r)
            assert z.size > 0
            assert region_resolvent_check(M, 1.0, RegionQuery("miller_S", z, r)).max_ratio <= 1.0 + 1e-9

    def test_shear_on_s_boundary(self):
        M = np.array([[-1.0, 10.0], [0.0, -1.0]])
        z = region_boundary_samples(M, "miller_S", 1.0, per_circle=256)
        res = region_resolvent_check(M, K_SHEAR10, RegionQuery("miller_S", z, 1.0))
        assert math.isfinite(res.max_ratio)
        assert res.max_ratio <= 2 * K_SHEAR10

    def test_power_scalar(self):
        z = 1.5 * np.exp(1j * np.linspace(0, 2 * np.pi, 50, endpoint=False))
        res = region_resolvent_check(np.diag([0.5]), 1.0, RegionQuery("power_T", z, 1.0))
        assert res.max_ratio == pytest.approx(1.0, rel=1e-12)

    def test_outside_point_rejected(self):
        with pytest.raises(RegionError):
            region_resolvent_check(np.diag([-1.0]), 1.0, RegionQuery("miller_S", [-1.0 + 0.5j], 1.0))

    def test_membership(self):
        assert in_region(np.diag([-1.0]), [0.0], "miller_S", 1.0)[0]
        assert not in_region(np.diag([-1.0]), [-0.5], "miller_S", 1.0)[0]

    def test_power_bounded_unscaled_ratio(self):
        # samples with |z| > 1 lie in T(M, 1)
        rng = np.random.default_rng(5)
        M = np.array([[0.5, 2.0], [0.0, -0.3]])
        z = (1.0 + rng.uniform(1e-3, 3.0, 300)) * np.exp(2j * np.pi * rng.random(300))
        assert np.all(in_region(M, z, "power_T", 1.0))
        scaled = region_resolvent_check(M, 1e9, RegionQuery("power_T", z, 1.0)).max_ratio
        vals = np.linalg.eigvals(M)
        unscaled = max(
            operator_norm(np.linalg.inv(w * np.eye(2) - M)) * np.min(np.abs(w - vals)) for w in z
        )
        assert math.isfinite(unscaled)
        assert unscaled <= 2.0 * scaled * (1 + 1e-12)
        assert unscaled == pytest.approx(2.0 * scaled, rel=1e-9)


class TestPowerBounded:
    def test_examples(self):
        c, s = math.cos(1.0), math.sin(1.0)
        rep = is_power_bounded([[c, -s], [s, c]])
        assert rep.power_bounded and rep.sup_power == pytest.approx(1.0, abs=1e-9)
        assert not is_power_bounded([[1, 1], [0, 1]]).power_bounded
        rep = is_power_bounded(np.diag([0.9, -0.99]))
        assert rep.power_bounded and rep.sup_power == pytest.approx(1.0, abs=1e-12)

    def test_overflow(self):
        rep = is_power_bounded(np.diag([3.0]))
        assert not rep.power_bounded
        assert rep.overflow_power is not None


class TestUnitTriangular:
    def test_examples(self):
        inv, bound = unit_triangular_inverse_check(np.eye(3))
        assert inv == pytest.approx(1.0) and bound == pytest.approx(9.0)
        inv, bound = unit_triangular_inverse_check([[1, 10], [0, 1]])
        assert inv == pytest.approx(K_SHEAR10, rel=1e-12)
        assert bound == pytest.approx(2 * K_SHEAR10, rel=1e-12)

    def test_rejects_non_unit(self):
        with pytest.raises(LinalgError):
            unit_triangular_inverse_check([[2, 0], [0, 1]])
        with pytest.raises(LinalgError):
            unit_triangular_inverse_check([[1, 0], [1, 1]])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_random_inequality(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        U = np.triu(rng.uniform(-5, 5, (n, n)), 1) + np.eye(n)
        inv, bound = unit_triangular_inverse_check(U)
        assert inv == pytest.approx(operator_norm(np.linalg.inv(U)), rel=1e-12)
        assert inv <= bound


class TestYong:
    def test_jinxin_certificate(self):
        rep = yong_check(jinxin(1.0, 0.5), np.diag([0.75, 1.0]))
        assert rep.condition_i and rep.condition_ii and rep.condition_iii and rep.passed

    def test_jinxin_strong(self):
        assert yong_check(jinxin(1.0, 0.5), np.diag([0.75, 1.0]), strong=True).passed

    def test_osc3_identity(self):
        rep = yong_check(osc3(), np.eye(3))
        assert not rep.condition_i
        assert rep.condition_ii and rep.condition_iii

    def test_negative_symmetrizer(self):
        assert not yong_check(jinxin(), -np.eye(2)).condition_ii

    def test_indefinite_candidate(self):
        rep = yong_check(jinxin(1.0, 2.0), np.diag([1.0 - 4.0, 1.0]))
        assert not rep.condition_ii
        assert rep.margins["min_eig_A0"] == pytest.approx(-3.0)

    def test_non_hermitian(self):
        with pytest.raises(LinalgError):
            yong_check(jinxin(), [[1.0, 1.0], [0.0, 1.0]])
