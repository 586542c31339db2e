import numpy as np
import pytest

from specsync import (
    VertexPartition,
    PlantedAepConfig,
    adjacency,
    laplacian,
    quotient_matrix,
    indicator_matrix,
    spectral_basis,
    eigendecompose_general,
    check_aep,
    equitable_error,
    equitable_error_matrix,
    approximation_bound,
    qep_score,
    planted_aep,
    perturb,
)

from conftest import random_connected_graph, random_partition


def combinatorial_max_deviation(g, p):
    """Oracle: per-vertex out-weight sums into each other cell, compared to
    their cell averages by direct summation."""
    a = adjacency(g)
    cells = p.cells()
    worst = 0.0
    for ci, cell_i in enumerate(cells):
        for cj, cell_j in enumerate(cells):
            if ci == cj:
                continue
            outs = np.array([a[v, cell_j].sum() for v in cell_i])
            worst = max(worst, np.abs(outs - outs.mean()).max())
    return worst


class TestCheckAep:
    def test_path_grouped_endpoints_is_aep(self, path3):
        report = check_aep(path3, VertexPartition([0, 1, 0]))
        assert report.is_aep
        assert report.max_deviation < 1e-12

    def test_path_split_is_not_aep(self, path3):
        report = check_aep(path3, VertexPartition([0, 1, 1]))
        assert not report.is_aep
        assert abs(report.max_deviation - 0.5) < 1e-12
        expected = np.array([[0.0, 0.0], [0.5, -0.5], [-0.5, 0.5]])
        assert np.allclose(report.per_vertex_deviations, expected, atol=1e-12)

    def test_k23_bipartition_is_aep(self, k23):
        assert check_aep(k23, VertexPartition([0, 0, 1, 1, 1])).is_aep

    def test_trivial_and_discrete_partitions_are_aeps(self):
        rng = np.random.default_rng(20)
        g = random_connected_graph(rng)
        assert check_aep(g, VertexPartition(np.zeros(g.n, dtype=int))).is_aep
        assert check_aep(g, VertexPartition(np.arange(g.n))).is_aep

    def test_algebraic_agrees_with_combinatorial(self):
        # The invariance characterization L P = P L^pi and the direct
        # out-weight-sum statement must agree, in both directions.
        rng = np.random.default_rng(21)
        for _ in range(100):
            g = random_connected_graph(rng, n_max=12)
            p = random_partition(rng, g.n)
            report = check_aep(g, p)
            oracle = combinatorial_max_deviation(g, p)
            assert report.is_aep == (oracle <= 1e-9)
            # Off-cell columns of E are exactly the combinatorial deviations.
            off_cell = report.per_vertex_deviations.copy()
            off_cell[np.arange(g.n), p.assignment] = 0.0
            assert abs(np.abs(off_cell).max(initial=0.0) - oracle) < 1e-9

    def test_planted_always_passes_random_rarely_does(self):
        rng = np.random.default_rng(22)
        for seed in range(20):
            sizes = tuple(int(s) for s in rng.integers(2, 5, size=2))
            d12 = rng.uniform(0.5, 2.0)
            d = ((0.0, d12), (d12 * sizes[0] / sizes[1], 0.0))
            g, p = planted_aep(
                PlantedAepConfig(cell_sizes=sizes, quotient_weights=d, seed=seed)
            )
            assert check_aep(g, p).is_aep
        failures = 0
        for _ in range(100):
            g = random_connected_graph(rng, n_max=12)
            p = random_partition(rng, g.n)
            if not check_aep(g, p).is_aep:
                failures += 1
        assert failures == 100


class TestEquitableError:
    def test_path_split(self, path3):
        report = equitable_error(path3, VertexPartition([0, 1, 1]))
        expected = np.array([[0.0, 0.0], [0.5, -0.5], [-0.5, 0.5]])
        assert np.allclose(report.E, expected, atol=1e-12)
        assert abs(report.sigma1 - 1.0) < 1e-12

    def test_exact_aep_has_zero_error(self):
        g, p = planted_aep(
            PlantedAepConfig(
                cell_sizes=(3, 4),
                quotient_weights=((0.0, 2.0), (1.5, 0.0)),
                seed=1,
            )
        )
        report = equitable_error(g, p)
        assert np.abs(report.E).max() < 1e-10
        assert all(m.epsilon_norm < 1e-10 for m in report.per_mode)

    def test_error_shrinks_with_noise(self):
        g, p = planted_aep(
            PlantedAepConfig(
                cell_sizes=(4, 4),
                quotient_weights=((0.0, 1.0), (1.0, 0.0)),
                intra_density=0.6,
                seed=2,
            )
        )
        # Same noise direction (same seed) scaled by eta: the error is
        # monotone across the sweep.
        etas = np.linspace(0.3, 0.0, 10)
        norms = []
        for eta in etas:
            report = equitable_error(perturb(g, p, eta, seed=7), p)
            norms.append(np.abs(report.E).max())
        assert all(a >= b for a, b in zip(norms, norms[1:]))
        assert norms[-1] < 1e-12

    def test_bound_chain(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            g = random_connected_graph(rng, n_max=20)
            p = random_partition(rng, g.n)
            report = equitable_error(g, p)
            for m in report.per_mode:
                assert m.epsilon_norm <= m.bound_sigma * (1 + 1e-12) + 1e-15
                assert m.bound_sigma <= m.bound_rowsum * (1 + 1e-12) + 1e-15

    def test_noise_form_identity(self):
        # For L' = L + N with L admitting the partition, the error matrix of
        # L' collapses to P N^pi - N P regardless of L.
        g, p = planted_aep(
            PlantedAepConfig(
                cell_sizes=(3, 5),
                quotient_weights=((0.0, 2.5), (1.5, 0.0)),
                intra_density=0.5,
                seed=3,
            )
        )
        lap = laplacian(g)
        noisy = perturb(g, p, 0.2, seed=11)
        lap_noisy = laplacian(noisy)
        nmat = lap_noisy - lap
        err = equitable_error_matrix(lap_noisy, p)
        pmat = indicator_matrix(p)
        identity = pmat @ quotient_matrix(nmat, p) - nmat @ pmat
        assert np.abs(err - identity).max() < 1e-10

    def test_basis_change_preserves_error_norm(self):
        # Coefficients of eps in the orthonormal eigenbasis carry its norm.
        rng = np.random.default_rng(24)
        g = random_connected_graph(rng, n_max=15)
        p = random_partition(rng, g.n)
        basis = spectral_basis(g)
        report = equitable_error(g, p)
        for m in report.per_mode:
            eps = report.E @ m.vector
            beta = basis.vertex_vectors.T @ eps
            assert abs(np.linalg.norm(beta) - np.linalg.norm(eps)) < 1e-12


class TestApproximationBound:
    def _planted_instance(self, seed, eta=0.0):
        g, p = planted_aep(
            PlantedAepConfig(
                cell_sizes=(5, 5, 5),
                quotient_weights=(
                    (0.0, 1.2, 0.5),
                    (1.2, 0.0, 0.8),
                    (0.5, 0.8, 0.0),
                ),
                intra_density=0.9,
                intra_weight_range=(1.0, 1.4),
                seed=seed,
            )
        )
        if eta:
            g = perturb(g, p, eta, seed=seed + 100)
        return g, p

    def test_exact_aep_zero_error_and_bound(self):
        g, p = self._planted_instance(0)
        basis = spectral_basis(g)
        vals, vecs = eigendecompose_general(quotient_matrix(laplacian(g), p))
        for r in range(p.k):
            report = approximation_bound(g, p, basis, (vals[r], vecs[:, r]), gamma=0.3)
            assert report.delta < 1e-10
            assert report.actual_error < 1e-10
            assert report.bound < 1e-9

    def test_perturbed_instance_bound_holds(self):
        for seed in range(5):
            g, p = self._planted_instance(seed, eta=0.05)
            basis = spectral_basis(g)
            vals, vecs = eigendecompose_general(quotient_matrix(laplacian(g), p))
            gaps = np.diff(np.unique(np.round(vals, 12)))
            gamma = 0.5 * gaps.min() if gaps.size else 0.5
            for r in range(p.k):
                report = approximation_bound(g, p, basis, (vals[r], vecs[:, r]), gamma)
                assert report.actual_error <= report.bound * (1 + 1e-10) + 1e-12

    def test_huge_gamma_retains_everything(self):
        g, p = self._planted_instance(1, eta=0.1)
        basis = spectral_basis(g)
        vals, vecs = eigendecompose_general(quotient_matrix(laplacian(g), p))
        report = approximation_bound(g, p, basis, (vals[1], vecs[:, 1]), gamma=1e9)
        assert len(report.retained) == g.n
        assert report.actual_error < 1e-10
        assert report.bound == 0.0

    def test_empty_retained_set_still_bounds(self):
        g, p = self._planted_instance(2, eta=0.1)
        basis = spectral_basis(g)
        vals, vecs = eigendecompose_general(quotient_matrix(laplacian(g), p))
        # Perturbation shifts the lifted eigenvalue off the spectrum of L;
        # a gamma below the nearest-eigenvalue distance retains nothing.
        lam, v = vals[1], vecs[:, 1]
        gamma = 0.5 * np.abs(basis.eigenvalues - lam).min()
        assert gamma > 0
        report = approximation_bound(g, p, basis, (lam, v), gamma)
        assert report.retained == ()
        assert np.allclose(report.truncated, 0.0)
        assert report.actual_error <= report.bound

    def test_rejects_nonpositive_gamma(self, path3):
        basis = spectral_basis(path3)
        p = VertexPartition([0, 1, 0])
        with pytest.raises(ValueError, match="gamma"):
            approximation_bound(path3, p, basis, (0.0, np.array([1.0, 1.0])), 0.0)


class TestQepScore:
    def test_exact_aep_scores_zero(self, k23):
        assert qep_score(k23, VertexPartition([0, 0, 1, 1, 1])) < 1e-12

    def test_path_split_scores_three_quarters(self, path3):
        # sigma_1 = 1 over mean degree 4/3.
        assert abs(qep_score(path3, VertexPartition([0, 1, 1])) - 0.75) < 1e-12

    def test_monotone_in_noise(self):
        g, p = planted_aep(
            PlantedAepConfig(
                cell_sizes=(5, 4),
                quotient_weights=((0.0, 1.6), (2.0, 0.0)),
                intra_density=0.7,
                seed=4,
            )
        )
        scores = [qep_score(perturb(g, p, eta, seed=5), p) for eta in (0.2, 0.1, 0.05, 0.01, 0.0)]
        assert all(a > b for a, b in zip(scores, scores[1:]))
        assert scores[-1] < 1e-12
        assert 0.0 < scores[2] < 0.2
