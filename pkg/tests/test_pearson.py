import math

import numpy as np
import pytest

from corrtrans import models as mo
from corrtrans import pearson as pe
from corrtrans.specfun import Tolerance, normal_pdf, normal_quantile

Z05 = normal_quantile(0.95)
Z01 = normal_quantile(0.99)
RHO_GRID = np.linspace(-0.9, 0.9, 19)


class TestPearsonR:
    def test_perfect_line(self):
        assert pe.pearson_r([(1, 1), (2, 2), (3, 3)]) == pytest.approx(1.0)

    def test_balanced_square(self):
        assert pe.pearson_r([(1, 1), (-1, -1), (1, -1), (-1, 1)]) == 0.0

    def test_degenerate_convention(self):
        assert pe.pearson_r([(1, 5), (1, 7), (1, 9)]) == 0.0

    def test_rejects_tiny_sample(self):
        with pytest.raises(ValueError):
            pe.pearson_r([(1, 2)])


class TestSigmaRho:
    def test_bvn_closed_form(self):
        for rho in (-0.9, 0.0, 0.5, 0.9):
            assert pe.sigma_rho(mo.BVN.moments, rho) == pytest.approx(
                1 - rho * rho, abs=1e-13)

    def test_squarev(self):
        assert pe.sigma_rho(mo.SQUAREV.moments, 0.5) == pytest.approx(
            math.sqrt(0.75), abs=1e-13)

    def test_independent_pair(self):
        spec = pe.MomentSpec(lambda rho, i, j: mo.bvn_moments(0.0, i, j))
        assert pe.sigma_rho(spec, 0.0) == pytest.approx(1.0, abs=1e-13)

    def test_even_in_rho(self):
        for m in (mo.BVN.moments, mo.SQUAREV.moments):
            for rho in RHO_GRID:
                assert pe.sigma_rho(m, rho) == pytest.approx(
                    pe.sigma_rho(m, -rho), abs=1e-10)


class TestSkewLambda:
    def test_bvn_vanishes(self):
        for rho in (-0.9, 0.0, 0.5, 0.9):
            assert pe.skew_lambda(mo.BVN.moments, rho) == pytest.approx(
                0.0, abs=1e-12)

    def test_squarev_closed_form(self):
        rho = 0.5
        assert pe.skew_lambda(mo.SQUAREV.moments, rho) == pytest.approx(
            -2 * rho / math.sqrt(1 - rho * rho), abs=1e-12)

    def test_monte_carlo_oracle(self):
        # E Lambda^3 estimated directly from SquareV samples
        rho = 0.5
        rng = np.random.Generator(np.random.Philox(key=13))
        yz = mo.sample_squarev(rho, 2_000_000, rng)
        y, z = yz[:, 0], yz[:, 1]
        w = y * z - (rho / 2) * (y * y + z * z)
        sigma = pe.sigma_rho(mo.SQUAREV.moments, rho)
        est = float(np.mean(w ** 3)) / sigma ** 3
        se = float(np.std(w ** 3)) / sigma ** 3 / math.sqrt(len(w))
        assert abs(est - pe.skew_lambda(mo.SQUAREV.moments, rho)) < 5 * se


class TestHz:
    def test_bvn_reduction_value(self):
        h = pe.h_z(mo.BVN.moments, 0.5, Z05)
        p_z = 1 / (2 * Z05 ** 2) - 1
        assert h == pytest.approx(p_z * (-1.0) / 0.75, abs=1e-10)
        assert h == pytest.approx(1.08696, abs=1e-4)

    def test_squarev_z1_vanishes(self):
        assert pe.h_z(mo.SQUAREV.moments, 0.5, 1.0) == pytest.approx(
            0.0, abs=1e-12)

    def test_rho_zero(self):
        for m in (mo.BVN.moments, mo.SQUAREV.moments):
            assert pe.h_z(m, 0.0, 1.3) == 0.0

    def test_odd_in_rho(self):
        for m in (mo.BVN.moments, mo.SQUAREV.moments):
            for rho in RHO_GRID:
                assert pe.h_z(m, rho, Z05) == pytest.approx(
                    -pe.h_z(m, -rho, Z05), abs=1e-10)

    def test_rejects_z_zero(self):
        with pytest.raises(ValueError):
            pe.h_z(mo.BVN.moments, 0.5, 0.0)


class TestOptimalTransformNumeric:
    def test_initial_conditions(self):
        t = pe.optimal_transform_numeric(mo.SQUAREV.moments, Z05)
        assert t.psi(0.0) == 0.0
        assert t.dpsi(0.0) == 1.0

    def test_bvn_identity_case(self):
        t = pe.optimal_transform_numeric(mo.BVN.moments, 1 / math.sqrt(2))
        for rho in RHO_GRID:
            assert t.psi(rho) == pytest.approx(rho, abs=1e-8)

    def test_matches_closed_form(self):
        t = pe.optimal_transform_numeric(mo.BVN.moments, Z05)
        assert t.psi(0.5) == pytest.approx(mo.psi_closed(mo.BVN, Z05, 0.5),
                                           abs=1e-8)

    def test_odd(self):
        t = pe.optimal_transform_numeric(mo.SQUAREV.moments, Z01)
        for rho in (0.2, 0.5, 0.9):
            assert t.psi(-rho) == -t.psi(rho)

    def test_ode_consistency(self):
        for m in (mo.BVN.moments, mo.SQUAREV.moments):
            t = pe.optimal_transform_numeric(m, Z05)
            for rho in np.linspace(-0.95, 0.95, 11):
                resid = t.d2psi(rho) / t.dpsi(rho) - pe.h_z(m, rho, Z05)
                assert abs(resid) < 1e-8

    def test_endpoint_rejected(self):
        t = pe.optimal_transform_numeric(mo.BVN.moments, Z05)
        with pytest.raises(ValueError):
            t.psi(1.0 - 1e-8)

    def test_rejects_z_zero(self):
        with pytest.raises(ValueError):
            pe.optimal_transform_numeric(mo.BVN.moments, 0.0)


class TestDeltaPsi:
    def test_identity_is_delta_r(self):
        t = pe.identity_transform()
        for rho in (0.1, 0.5, -0.9):
            s = pe.sigma_rho(mo.BVN.moments, rho)
            expected = (normal_pdf(1.2)
                        * pe.delta_r_tilde(mo.BVN.moments, rho, 1.2)
                        / (96 * s ** 3))
            assert pe.delta_psi(mo.BVN.moments, t, rho, 1.2) == \
                pytest.approx(expected, abs=1e-14)

    def test_bvn_fisher_closed_form(self):
        t = pe.fisher_transform()
        for rho in (-0.9, 0.1, 0.5):
            for z in (0.7, Z05):
                assert pe.delta_psi(mo.BVN.moments, t, rho, z) == \
                    pytest.approx(-rho / 2 * normal_pdf(z), abs=1e-12)

    def test_optimal_vanishes_at_its_z(self):
        for m in (mo.BVN.moments, mo.SQUAREV.moments):
            for z in (Z05, Z01, 1.0):
                t = pe.optimal_transform_numeric(m, z)
                for rho in (-0.9, -0.5, 0.1, 0.5, 0.9):
                    assert abs(pe.delta_psi(m, t, rho, z)) < 1e-10


class TestTau:
    def test_zero_at_truth(self):
        t = pe.identity_transform()
        assert pe.tau(t, 0.5, 0.5, 1.0, 100) == 0.0

    def test_identity_form(self):
        t = pe.identity_transform()
        assert pe.tau(t, 0.6, 0.5, 0.75, 100) == pytest.approx(
            (0.6 - 0.5) * 10 / 0.75, abs=1e-14)

    def test_fisher_endpoint_always_rejects(self):
        t = pe.fisher_transform()
        assert pe.tau(t, 1.0, 0.9, 0.3, 10) == math.inf

    def test_rejects_out_of_range_r(self):
        with pytest.raises(ValueError):
            pe.tau(pe.identity_transform(), 1.5, 0.0, 1.0, 10)


class TestAssembleStatisticModel:
    def test_sigma_field_consistent(self):
        for rho in (0.1, 0.5, 0.9):
            m = pe.assemble_statistic_model(mo.SQUAREV.moments, rho)
            assert m.sigma == pe.sigma_rho(mo.SQUAREV.moments, rho)

    def test_rho_zero_delta_vanishes(self):
        from corrtrans import edgeworth as ed
        m = pe.assemble_statistic_model(mo.SQUAREV.moments, 0.0)
        for z in (0.5, 1.0, 2.0):
            assert ed.delta(m, z) == pytest.approx(0.0, abs=1e-8)


class TestMonotoneRatio:
    def test_psi_ratio_decreasing_in_rho_sq(self):
        # closed-form BVN: psi_z1 / psi_z2 decreases in rho^2 for |z1| < |z2|
        for z1, z2 in ((0.7, 1.2), (1.0, Z05), (Z05, Z01)):
            rhos = np.linspace(0.05, 0.95, 19)
            ratios = [mo.psi_closed(mo.BVN, z1, r) / mo.psi_closed(mo.BVN, z2, r)
                      for r in rhos]
            assert all(a > b for a, b in zip(ratios, ratios[1:]))
