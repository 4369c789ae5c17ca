"""Chart geometry: jets, curvature, parallelism residuals, bracket table.

Finite differences appear here only as an oracle against the analytic
derivative chain; the library itself never differentiates numerically.
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from homkit.hom_structure import build_isometry_algebra, classify
from homkit.lie_algebra import jacobi_residual
from homkit.plane_wave import (
    ChartPoint,
    PlaneWaveData,
    as_residuals,
    boost_block,
    christoffel,
    coframe_at,
    connection_jet,
    exact_curvature,
    expm,
    frame_metric,
    frame_structure,
    metric_jet,
    profile_jet,
    pw_isometry_algebra,
    riemann,
    riemann_lower,
    sample_points,
    structure_at,
)
from homkit.tensor_core import DOWN, Tensor

FD_STEP = 1e-5
FD_TOL = 1e-6

GENERIC = PlaneWaveData(
    2,
    ((Fraction(0), Fraction(1, 2)), (Fraction(-1, 2), Fraction(0))),
    ((Fraction(1), Fraction(1, 3)), (Fraction(1, 3), Fraction(-1, 2))),
)
FLAT = PlaneWaveData(1, ((Fraction(0),),), ((Fraction(0),),))


def shifted(pt, k, eps):
    coords = [pt.z, pt.s, *pt.x]
    coords[k] += eps
    return ChartPoint(coords[0], coords[1], tuple(coords[2:]))


def random_wave(rng, n, bound=2):
    f = [[Fraction(0)] * n for _ in range(n)]
    h = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            den = rng.randint(1, 4)
            h[i][j] = h[j][i] = Fraction(rng.randint(-bound * den, bound * den), den)
            if i != j:
                den = rng.randint(1, 4)
                v = Fraction(rng.randint(-bound * den, bound * den), den)
                f[i][j], f[j][i] = v, -v
    return PlaneWaveData(n, tuple(map(tuple, f)), tuple(map(tuple, h)))


class TestExpm:
    def test_zero_matrix(self):
        assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))

    def test_rotation_angle(self):
        a = np.array([[0.0, -1.0], [1.0, 0.0]])
        out = expm(0.5 * a)
        assert abs(out[0, 0] - np.cos(0.5)) < 1e-14
        assert abs(out[1, 0] - np.sin(0.5)) < 1e-14

    def test_inverse_pairs(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(4, 4))
        a = a - a.T
        assert np.allclose(expm(a) @ expm(-a), np.eye(4), atol=1e-12)


class TestMetricJet:
    def test_example_values(self):
        pw = PlaneWaveData(1, ((Fraction(0),),), ((Fraction(1),),))
        jet = metric_jet(pw, ChartPoint(0.0, 2.0, (3.0,)))
        assert jet.g[0, 0] == pytest.approx(2 * (9 + 2))
        assert jet.g[0, 1] == 1.0
        assert jet.g[2, 2] == 1.0

    def test_vanishing_profile_leaves_2s(self):
        jet = metric_jet(FLAT, ChartPoint(1.3, 0.7, (2.0,)))
        assert jet.g[0, 0] == pytest.approx(2 * 0.7)

    def test_profile_matrix_symmetric_for_all_z(self):
        for z in (-1.7, 0.0, 0.4, 2.2):
            m0, m1, m2, m3 = profile_jet(GENERIC, z)
            for m in (m0, m1, m2, m3):
                assert np.allclose(m, m.T, atol=1e-12)

    def test_derivative_arrays_match_finite_differences(self):
        pt = ChartPoint(0.3, -0.4, (0.8, -1.1))
        jet = metric_jet(GENERIC, pt)
        d = GENERIC.dim
        for k in range(d):
            plus = metric_jet(GENERIC, shifted(pt, k, FD_STEP))
            minus = metric_jet(GENERIC, shifted(pt, k, -FD_STEP))
            assert np.max(np.abs((plus.g - minus.g) / (2 * FD_STEP) - jet.dg[k])) < FD_TOL
            assert np.max(np.abs((plus.dg - minus.dg) / (2 * FD_STEP) - jet.ddg[k])) < FD_TOL
            assert np.max(np.abs((plus.ddg - minus.ddg) / (2 * FD_STEP) - jet.dddg[k])) < FD_TOL


class TestChristoffel:
    def test_hand_value_at_flat_profile(self):
        jet = metric_jet(FLAT, ChartPoint(0.0, 1.0, (0.0,)))
        gamma = christoffel(jet)
        assert gamma[0, 0, 0] == pytest.approx(-1.0)

    def test_no_acceleration_along_s(self):
        pts = sample_points(2, 6, seed=3)
        for pt in pts:
            gamma = christoffel(metric_jet(GENERIC, pt))
            assert np.max(np.abs(gamma[:, 1, 1])) == 0.0

    def test_finite_difference_oracle(self):
        pt = ChartPoint(0.2, 0.9, (-0.5, 0.3))
        jet = metric_jet(GENERIC, pt)
        gamma = christoffel(jet)
        d = GENERIC.dim
        fd = np.zeros((d, d, d))
        for m in range(d):
            for n in range(d):
                for s in range(d):
                    dp = metric_jet(GENERIC, shifted(pt, m, FD_STEP)).g[n, s]
                    dm = metric_jet(GENERIC, shifted(pt, m, -FD_STEP)).g[n, s]
                    fd[m, n, s] = (dp - dm) / (2 * FD_STEP)
        # low[m, n, s] = (d_m g_ns + d_n g_ms - d_s g_mn) / 2
        low = np.zeros((d, d, d))
        for m in range(d):
            for n in range(d):
                for s in range(d):
                    low[m, n, s] = 0.5 * (fd[m, n, s] + fd[n, m, s] - fd[s, m, n])
        gamma_fd = np.einsum("rs,mns->rmn", jet.g_inv, low)
        assert np.max(np.abs(gamma_fd - gamma)) < 1e-8

    def test_connection_derivatives_match_finite_differences(self):
        pt = ChartPoint(-0.6, 0.2, (0.4, 1.0))
        jet = metric_jet(GENERIC, pt)
        gamma, dgamma, ddgamma = connection_jet(jet)
        d = GENERIC.dim
        for k in range(d):
            gp, dgp, _ = connection_jet(metric_jet(GENERIC, shifted(pt, k, FD_STEP)))
            gm, dgm, _ = connection_jet(metric_jet(GENERIC, shifted(pt, k, -FD_STEP)))
            assert np.max(np.abs((gp - gm) / (2 * FD_STEP) - dgamma[k])) < FD_TOL
            assert np.max(np.abs((dgp - dgm) / (2 * FD_STEP) - ddgamma[k])) < FD_TOL


class TestRiemann:
    def test_flat_wave_is_flat(self):
        for pt in sample_points(1, 20, seed=9):
            assert np.max(np.abs(riemann(FLAT, pt))) < 1e-12

    def test_pair_symmetries_and_bianchi(self):
        for pt in sample_points(2, 5, seed=17):
            low = riemann_lower(GENERIC, pt)
            assert np.max(np.abs(low + low.transpose(1, 0, 2, 3))) < 1e-10
            assert np.max(np.abs(low + low.transpose(0, 1, 3, 2))) < 1e-10
            assert np.max(np.abs(low - low.transpose(2, 3, 0, 1))) < 1e-10
            cyc = low + low.transpose(0, 2, 3, 1) + low.transpose(0, 3, 1, 2)
            assert np.max(np.abs(cyc)) < 1e-10

    def test_finite_difference_oracle(self):
        pt = ChartPoint(0.5, -0.2, (0.3, -0.8))
        got = riemann(GENERIC, pt)
        d = GENERIC.dim
        fd_dgamma = np.zeros((d, d, d, d))
        for k in range(d):
            gp = christoffel(metric_jet(GENERIC, shifted(pt, k, FD_STEP)))
            gm = christoffel(metric_jet(GENERIC, shifted(pt, k, -FD_STEP)))
            fd_dgamma[k] = (gp - gm) / (2 * FD_STEP)
        gamma = christoffel(metric_jet(GENERIC, pt))
        term = np.einsum("rml,lns->rsmn", gamma, gamma)
        fd = (
            fd_dgamma.transpose(1, 3, 0, 2) - fd_dgamma.transpose(1, 3, 2, 0)
            + term - term.transpose(0, 1, 3, 2)
        )
        assert np.max(np.abs(fd - got)) < 1e-6


class TestStructureAt:
    def test_coframe_recovers_metric(self):
        eta = np.zeros((4, 4))
        eta[0, 1] = eta[1, 0] = 1.0
        eta[2, 2] = eta[3, 3] = 1.0
        for pt in sample_points(2, 5, seed=21):
            jet = metric_jet(GENERIC, pt)
            e, _ = coframe_at(GENERIC, pt)
            assert np.max(np.abs(e.T @ eta @ e - jet.g)) < 1e-12

    def test_frame_components_classify_as_null_type_13(self):
        out = classify(frame_structure(GENERIC))
        assert out.label == "T1+T3" and out.degeneracy == "null"

    def test_defining_vector_is_s_translation(self):
        hs, e = structure_at(GENERIC, ChartPoint(0.4, 1.2, (0.3, -0.9)))
        from homkit.hom_structure import trace_one_form

        alpha, xi, norm = trace_one_form(hs)
        assert abs(norm) < 1e-12
        assert np.allclose([float(x) for x in xi.components], [0.0, 1.0, 0.0, 0.0], atol=1e-12)

    def test_coordinate_components_classify_in_float_mode(self):
        # classification is invariant under the coframe conjugation, so
        # the coordinate components give the same class at tolerance
        hs, _ = structure_at(GENERIC, ChartPoint(0.7, -0.4, (1.2, 0.3)))
        out = classify(hs)
        assert out.label == "T1+T3" and out.degeneracy == "null"

    def test_coordinate_structure_is_antisymmetric(self):
        hs, _ = structure_at(GENERIC, ChartPoint(-0.3, 0.8, (1.1, 0.2)))
        for x in range(4):
            for y in range(4):
                for z in range(4):
                    assert hs.S[x, y, z] == pytest.approx(-hs.S[x, z, y], abs=1e-13)


class TestResiduals:
    def test_thresholds_on_random_data(self):
        rng = random.Random(99)
        for n in (1, 2, 3, 4):
            pw = random_wave(rng, n)
            res = as_residuals(pw, sample_points(n, 10, seed=n))
            assert res["r_g"] < 1e-10
            assert res["r_S"] < 1e-10
            assert res["r_geo"] < 1e-10
            assert res["r_R"] < 1e-8

    def test_flat_wave_residuals(self):
        res = as_residuals(FLAT, sample_points(1, 10, seed=2))
        assert max(res.values()) < 1e-12

    def test_perturbed_structure_is_detected(self):
        hs = frame_structure(GENERIC)
        comps = list(hs.S.components)
        bump = Fraction(1, 1000)
        t = Tensor.zeros(4, (DOWN, DOWN, DOWN))
        comps[t.flat((0, 0, 1))] += bump
        comps[t.flat((0, 1, 0))] -= bump
        perturbed = Tensor(4, (DOWN, DOWN, DOWN), tuple(comps))
        res = as_residuals(GENERIC, sample_points(2, 10, seed=4), frame_s_override=perturbed)
        assert res["r_S"] > 1e-4

    def test_requires_points(self):
        with pytest.raises(ValueError, match="at least one"):
            as_residuals(FLAT, [])


class TestIsometryAlgebra:
    def test_zero_data_table(self):
        pw = PlaneWaveData(2, ((0, 0), (0, 0)), ((0, 0), (0, 0)))
        algebra = pw_isometry_algebra(pw)
        u, v = 0, 1
        assert algebra.bracket(u, v) == {v: Fraction(1)}
        for i in range(2):
            assert algebra.bracket(u, 2 + i) == {2 + i: Fraction(1)}
            assert algebra.bracket(u, 4 + i) == {2 + i: Fraction(1)}
            assert algebra.bracket(2 + i, 4 + i) == {1: Fraction(-1)}

    def test_single_direction_profile(self):
        for h in (Fraction(3), Fraction(-2, 7), Fraction(0)):
            pw = PlaneWaveData(1, ((0,),), ((h,),))
            algebra = pw_isometry_algebra(pw)
            assert algebra.dim == 4
            assert jacobi_residual(algebra)[1] == 0
            row = algebra.bracket(0, 2)
            assert row.get(3, Fraction(0)) == 2 * h

    def test_random_rational_tables_close(self):
        rng = random.Random(12)
        for n in (1, 2, 3, 4):
            for _ in range(4):
                algebra = pw_isometry_algebra(random_wave(rng, n))
                assert jacobi_residual(algebra)[1] == 0

    def test_boost_block_reduces_without_rotation(self):
        pw = PlaneWaveData(2, ((0, 0), (0, 0)), ((1, Fraction(1, 2)), (Fraction(1, 2), 3)))
        bb = boost_block(pw)
        for i in range(2):
            for j in range(2):
                assert bb[i][j] == 2 * pw.H[i][j]


class TestClosingTheLoop:
    def test_reconstruction_matches_bracket_table(self):
        rng = random.Random(6)
        for n in (1, 2, 3):
            pw = random_wave(rng, n)
            hs = frame_structure(pw)
            curv = exact_curvature(
                pw, Fraction(rng.randint(-3, 3), 4),
                tuple(Fraction(rng.randint(-3, 3), 2) for _ in range(n)),
            )
            labels_m = ["U", "V"] + [f"X{i+1}" for i in range(n)]
            labels_h = [f"Xb{i+1}" for i in range(n)]
            algebra, residual = build_isometry_algebra(hs, curv, labels_m, labels_h)
            assert residual == 0
            assert algebra.f == pw_isometry_algebra(pw).f

    def test_frame_curvature_is_point_independent(self):
        a = exact_curvature(GENERIC, Fraction(1, 3), (Fraction(1, 2), Fraction(-2, 5)))
        b = exact_curvature(GENERIC, Fraction(-2), (Fraction(0), Fraction(5, 7)))
        assert a.Rbar == b.Rbar
