import math

import numpy as np
import pytest

from kvcbo.bench import svd_top_direction
from kvcbo.objectives import (AckleySphere, Arrangement, FrameKind,
                              PhaseRetrievalObjective, PhaseRetrievalProblem,
                              PointCloud, SubspaceEnergyObjective,
                              SubspaceEnergyParams, generate_phase_retrieval,
                              generate_subspace_cloud,
                              generate_subspace_cloud_pair, load_point_cloud,
                              phase_retrieval_eval, recover_signal,
                              save_point_cloud, subspace_energy_eval)
from kvcbo.rng import RngStream
from kvcbo.sphere import normalize, sample_uniform_sphere


class TestAckley:
    def test_zero_at_minimizer(self):
        obj = AckleySphere(shift=normalize(np.array([1.0, 2.0, 2.0])))
        assert obj.evaluate(obj.shift) == pytest.approx(0.0, abs=1e-14)

    def test_hand_evaluated_point(self):
        # d=2, shift=e1, v=e2: diff=(-1,1), |diff|^2=2,
        # exp term decays as exp(-0.2 sqrt(9/2 * 2)) = exp(-0.6),
        # cosine term is exp(mean(cos(-6pi), cos(6pi))) = e,
        # so E = -20 e^{-0.6} - e + e + 20 = 20 (1 - e^{-0.6})
        obj = AckleySphere(shift=np.array([1.0, 0.0]))
        expected = 20.0 * (1.0 - math.exp(-0.6))
        assert obj.evaluate(np.array([0.0, 1.0])) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(9.023767278119472, rel=1e-13)

    def test_positive_away_from_minimizer(self):
        obj = AckleySphere(shift=np.array([0.0, 0.0, 1.0]))
        rng = RngStream(1)
        for _ in range(200):
            v = sample_uniform_sphere(3, rng)
            if np.linalg.norm(v - obj.shift) > 1e-6:
                assert obj.evaluate(v) > 0.0

    def test_vectorized_matches_scalar(self):
        obj = AckleySphere(shift=normalize(np.ones(5)))
        rng = RngStream(2)
        vs = np.stack([sample_uniform_sphere(5, rng) for _ in range(20)])
        many = obj.evaluate_many(vs)
        each = np.array([obj.evaluate(v) for v in vs])
        assert np.array_equal(many, each)

    def test_success_sup_norm_quarter(self):
        obj = AckleySphere(shift=np.array([0.0, 0.0, 1.0]))
        assert obj.success(np.array([0.25, 0.0, 1.0]))
        assert not obj.success(np.array([0.2500001, 0.0, 1.0]))


def tiny_phase_problem():
    # d=2, orthonormal frame, planted z = (0.6, 0): A=1, R=0.6,
    # targets (1, 0), lifted minimizer e1 in R^3
    frames = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return PhaseRetrievalProblem(frames, np.array([1.0, 0.0]), 0.6, 1.0,
                                 np.array([0.6, 0.0]))


class TestPhaseRetrieval:
    def test_hand_evaluated_risk(self):
        prob = tiny_phase_problem()
        assert phase_retrieval_eval(np.array([1.0, 0.0, 0.0]), prob) == 0.0
        assert phase_retrieval_eval(np.array([0.0, 0.0, 1.0]), prob) == 1.0
        # v = (0, 1, 0): inner = (0, 1), risk = (0-1)^2 + (1-0)^2 = 2
        assert phase_retrieval_eval(np.array([0.0, 1.0, 0.0]), prob) == 2.0

    def test_lifted_minimizer_unit_and_zero_risk(self):
        prob = tiny_phase_problem()
        v = prob.lifted_minimizer()
        assert np.allclose(v, [1.0, 0.0, 0.0], atol=1e-15)
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-12

    def test_recover_signal_round_trip(self):
        prob = tiny_phase_problem()
        assert np.allclose(recover_signal(prob.lifted_minimizer(), prob),
                           prob.planted_signal, atol=1e-14)

    def test_generated_problem_invariants(self):
        for kind in (FrameKind.UNIFORM_SPHERE, FrameKind.GAUSSIAN):
            prob = generate_phase_retrieval(6, 48, kind, 0.0, RngStream(3, 7))
            assert prob.frames.shape == (48, 7)
            assert np.all(prob.frames[:, -1] == 0.0)
            assert np.all(prob.targets >= 0.0)
            assert prob.frame_bound > 0.0
            v_star = prob.lifted_minimizer()
            assert abs(np.linalg.norm(v_star) - 1.0) <= 1e-12
            # noiseless: the lifted minimizer attains zero risk
            assert phase_retrieval_eval(v_star, prob) == pytest.approx(0.0, abs=1e-20)
            assert np.allclose(recover_signal(v_star, prob), prob.planted_signal,
                               atol=1e-12)

    def test_planted_magnitude_below_scale(self):
        # sum(y) >= A |z|^2 so |z| <= R and the padding coordinate is real
        for seed in range(20):
            prob = generate_phase_retrieval(4, 32, FrameKind.GAUSSIAN, 0.0,
                                            RngStream(seed, 7))
            assert np.linalg.norm(prob.planted_signal) <= prob.scale + 1e-12

    def test_noise_keeps_targets_nonnegative(self):
        prob = generate_phase_retrieval(4, 64, FrameKind.GAUSSIAN, 5.0, RngStream(9, 7))
        assert np.all(prob.targets >= 0.0)

    def test_underdetermined_rejected(self):
        with pytest.raises(ValueError):
            generate_phase_retrieval(5, 3, FrameKind.GAUSSIAN, 0.0, RngStream(0, 7))

    def test_objective_vectorized_matches_scalar(self):
        prob = generate_phase_retrieval(5, 40, FrameKind.UNIFORM_SPHERE, 0.0,
                                        RngStream(11, 7))
        obj = PhaseRetrievalObjective(prob)
        rng = RngStream(12)
        vs = np.stack([sample_uniform_sphere(6, rng) for _ in range(15)])
        assert np.allclose(obj.evaluate_many(vs),
                           [obj.evaluate(v) for v in vs], atol=1e-12)

    def test_success_sign_invariant(self):
        prob = tiny_phase_problem()
        obj = PhaseRetrievalObjective(prob)
        v = prob.lifted_minimizer()
        assert obj.success(v)
        assert obj.success(-v)
        assert not obj.success(np.array([0.0, 1.0, 0.0]))


class TestSubspaceEnergy:
    def test_hand_evaluated_energy(self):
        cloud = PointCloud(np.array([[1.0, 0.0], [0.0, 1.0]]))
        e1 = np.array([1.0, 0.0])
        assert subspace_energy_eval(e1, cloud, SubspaceEnergyParams(2.0, 0.0)) == 1.0
        assert subspace_energy_eval(e1, cloud, SubspaceEnergyParams(1.0, 0.0)) == 1.0
        # delta = 0.1: (0 + 0.01) + (1 + 0.01) = 1.02
        assert subspace_energy_eval(
            e1, cloud, SubspaceEnergyParams(2.0, 0.1)) == pytest.approx(1.02, abs=1e-15)

    def test_residual_clamped_nonnegative(self):
        # a point aligned with v: the residual is exactly zero, and with
        # p < 2 and delta = 0 a negative residual would produce a NaN
        x = np.array([[0.3, 0.4]])
        cloud = PointCloud(x)
        v = normalize(x[0])
        out = subspace_energy_eval(v, cloud, SubspaceEnergyParams(1.0, 0.0))
        assert out == 0.0 and np.isfinite(out)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            SubspaceEnergyParams(0.0, 0.0)
        with pytest.raises(ValueError):
            SubspaceEnergyParams(2.5, 0.0)
        with pytest.raises(ValueError):
            SubspaceEnergyParams(1.0, -1e-9)

    def test_vectorized_matches_scalar(self):
        rng = RngStream(21)
        cloud = generate_subspace_cloud(4, 3, 20, 0.05, 10, Arrangement.RANDOM, rng)
        obj = SubspaceEnergyObjective(cloud, SubspaceEnergyParams(1.0, 1e-7))
        vs = np.stack([sample_uniform_sphere(4, rng) for _ in range(12)])
        assert np.allclose(obj.evaluate_many(vs),
                           [obj.evaluate(v) for v in vs], rtol=1e-12)

    def test_success_against_oracle(self):
        rng = RngStream(30)
        cloud = generate_subspace_cloud(5, 1, 200, 0.01, 0, Arrangement.RANDOM, rng)
        oracle = svd_top_direction(cloud)
        obj = SubspaceEnergyObjective(cloud, SubspaceEnergyParams(2.0, 0.0),
                                      oracle_direction=oracle)
        assert obj.success(oracle)
        assert obj.success(-oracle)
        ortho = normalize(np.eye(5)[0] - oracle[0] * oracle)
        assert not obj.success(ortho)


class TestCloudGeneration:
    def test_centered_and_counted(self):
        rng = RngStream(40)
        cloud = generate_subspace_cloud(6, 4, 25, 0.01, 30, Arrangement.NEARLY_PARALLEL, rng)
        assert cloud.count == 4 * 25 + 30
        assert cloud.dimension == 6
        assert np.allclose(cloud.points.mean(axis=0), 0.0, atol=1e-12)
        assert cloud.n_inliers_per_subspace == [25] * 4
        assert cloud.n_outliers == 30

    def test_noiseless_inliers_are_collinear(self):
        from kvcbo.objectives import _generate_subspace_points
        rng = RngStream(41)
        inliers, _ = _generate_subspace_points(5, 3, 15, 0.0, 0,
                                               Arrangement.RANDOM, rng, 0.1)
        for k in range(3):
            block = inliers[15 * k:15 * (k + 1)]
            assert np.linalg.matrix_rank(block, tol=1e-10) <= 1

    def test_outliers_inside_unit_ball(self):
        from kvcbo.objectives import _generate_subspace_points
        rng = RngStream(42)
        _, outliers = _generate_subspace_points(4, 0, 0, 0.0, 500,
                                                Arrangement.RANDOM, rng, 0.1)
        norms = np.linalg.norm(outliers, axis=1)
        assert np.all(norms <= 1.0)
        # uniform in the ball: E|x| = d/(d+1) = 0.8 in dimension 4
        assert abs(norms.mean() - 0.8) < 0.03

    def test_nearly_parallel_within_angular_radius(self):
        from kvcbo.objectives import _generate_subspace_points
        rng = RngStream(43)
        radius = 0.1
        inliers, _ = _generate_subspace_points(8, 10, 1, 0.0, 0,
                                               Arrangement.NEARLY_PARALLEL, rng, radius)
        dirs = inliers / np.linalg.norm(inliers, axis=1, keepdims=True)
        # pairwise angle between lines at most twice the cone radius
        for i in range(10):
            for j in range(i + 1, 10):
                cos_ij = abs(float(np.dot(dirs[i], dirs[j])))
                assert math.acos(min(cos_ij, 1.0)) <= 2 * radius + 1e-12

    def test_pair_shares_inliers(self):
        rng = RngStream(44)
        full, clean = generate_subspace_cloud_pair(4, 2, 30, 0.02, 15,
                                                   Arrangement.RANDOM, rng)
        k = clean.count
        shift = full.points[:k] - clean.points
        assert np.allclose(shift, shift[0], atol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            generate_subspace_cloud(3, 0, 0, 0.0, 0, Arrangement.RANDOM, RngStream(0))


class TestCloudIO:
    def test_round_trip(self, tmp_path):
        rng = RngStream(50)
        cloud = generate_subspace_cloud(3, 2, 10, 0.01, 5, Arrangement.RANDOM, rng)
        path = tmp_path / "cloud.csv"
        save_point_cloud(cloud, path)
        loaded = load_point_cloud(path)
        assert loaded.dimension == 3 and loaded.count == 25
        assert np.allclose(loaded.points, cloud.points, atol=1e-14)

    def test_load_centers(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("1,2\n3,4\n")
        loaded = load_point_cloud(path)
        assert np.allclose(loaded.points, [[-1.0, -1.0], [1.0, 1.0]], atol=1e-15)

    def test_malformed_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\nx,4\n")
        with pytest.raises(ValueError):
            load_point_cloud(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            load_point_cloud(path)


class TestSvdOracle:
    def test_matches_dense_svd(self):
        rng = RngStream(60)
        cloud = generate_subspace_cloud(6, 3, 40, 0.05, 20, Arrangement.RANDOM, rng)
        v = svd_top_direction(cloud)
        _, _, vt = np.linalg.svd(cloud.points, full_matrices=False)
        ref = vt[0]
        assert min(np.linalg.norm(v - ref), np.linalg.norm(v + ref)) < 1e-8

    def test_sign_convention(self):
        rng = RngStream(61)
        for seed in range(5):
            cloud = generate_subspace_cloud(4, 1, 50, 0.01, 0, Arrangement.RANDOM,
                                            RngStream(seed, 3))
            v = svd_top_direction(cloud)
            nz = v[np.abs(v) > 1e-12]
            assert nz[0] > 0

    def test_deterministic(self):
        rng = RngStream(62)
        cloud = generate_subspace_cloud(5, 2, 30, 0.02, 0, Arrangement.RANDOM, rng)
        assert np.array_equal(svd_top_direction(cloud), svd_top_direction(cloud))
