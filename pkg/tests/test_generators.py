import numpy as np
import pytest

from specsync import (
    PlantedAepConfig,
    SbmConfig,
    adjacency,
    laplacian,
    quotient_matrix,
    spectral_basis,
    structural_indices,
    check_aep,
    qep_score,
    planted_aep,
    nested_aep,
    perturb,
    sample_sbm,
)


FIG4_WEIGHTS = dict(
    levels=(3, 2),
    leaf_size=30,
    level_weights=(0.002, 0.02),
    leaf_weight_range=(0.25, 0.35),
    leaf_density=1.0,
)


class TestPlantedAep:
    def test_two_cell_example(self):
        cfg = PlantedAepConfig(
            cell_sizes=(2, 3),
            quotient_weights=((0.0, 3.0), (2.0, 0.0)),
            intra_density=0.5,
            seed=0,
        )
        g, p = planted_aep(cfg)
        report = check_aep(g, p)
        assert report.is_aep and report.max_deviation <= 1e-9
        # Total cross weight is |V_1| d_12 = |V_2| d_21 = 6.
        a = adjacency(g)
        cross = a[np.ix_([0, 1], [2, 3, 4])].sum()
        assert abs(cross - 6.0) < 1e-9

    def test_infeasible_weights_rejected(self):
        with pytest.raises(ValueError, match="infeasible"):
            PlantedAepConfig(
                cell_sizes=(2, 3),
                quotient_weights=((0.0, 3.0), (3.0, 0.0)),
            )

    def test_disconnected_quotient_rejected(self):
        with pytest.raises(ValueError, match="connect"):
            PlantedAepConfig(
                cell_sizes=(2, 2, 2),
                quotient_weights=(
                    (0.0, 1.0, 0.0),
                    (1.0, 0.0, 0.0),
                    (0.0, 0.0, 0.0),
                ),
            )

    def test_quotient_off_diagonals_match_targets(self):
        d = ((0.0, 1.2, 0.5), (1.2, 0.0, 0.8), (0.5, 0.8, 0.0))
        cfg = PlantedAepConfig(
            cell_sizes=(5, 5, 5), quotient_weights=d, intra_density=0.9, seed=1
        )
        g, p = planted_aep(cfg)
        q = quotient_matrix(laplacian(g), p)
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert abs(q[i, j] + d[i][j]) < 1e-12

    def test_fifteen_vertex_instance_structural_count(self):
        cfg = PlantedAepConfig(
            cell_sizes=(5, 5, 5),
            quotient_weights=((0.0, 1.2, 0.5), (1.2, 0.0, 0.8), (0.5, 0.8, 0.0)),
            intra_density=0.9,
            intra_weight_range=(1.0, 1.4),
            seed=2,
        )
        g, p = planted_aep(cfg)
        assert len(structural_indices(spectral_basis(g), p)) == 3

    def test_deterministic(self):
        cfg = PlantedAepConfig(
            cell_sizes=(3, 4),
            quotient_weights=((0.0, 2.0), (1.5, 0.0)),
            seed=11,
        )
        g1, p1 = planted_aep(cfg)
        g2, p2 = planted_aep(cfg)
        assert g1 == g2 and p1 == p2

    def test_exactness_across_random_configs(self):
        rng = np.random.default_rng(60)
        for seed in range(20):
            k = int(rng.integers(2, 5))
            sizes = tuple(int(s) for s in rng.integers(2, 6, size=k))
            d = np.zeros((k, k))
            for i in range(k):
                for j in range(i + 1, k):
                    w = rng.uniform(0.5, 2.0)
                    d[i, j] = w
                    d[j, i] = w * sizes[i] / sizes[j]
            cfg = PlantedAepConfig(
                cell_sizes=sizes,
                quotient_weights=tuple(map(tuple, d)),
                intra_density=float(rng.uniform(0.2, 1.0)),
                seed=seed,
            )
            g, p = planted_aep(cfg)
            assert check_aep(g, p).max_deviation <= 1e-9


class TestNestedAep:
    def test_fig4_shape(self):
        g, parts = nested_aep(**FIG4_WEIGHTS, jitter=0.05, seed=0)
        assert g.n == 180
        assert [p.k for p in parts] == [3, 6]
        for p in parts:
            assert check_aep(g, p).is_aep
        basis = spectral_basis(g)
        coarse = structural_indices(basis, parts[0])
        fine = structural_indices(basis, parts[1])
        assert set(coarse) <= set(fine)
        assert sorted(fine) == [0, 1, 2, 3, 4, 5]
        # Coarse contrasts sit strictly below the fine-only contrasts.
        assert basis.eigenvalues[[1, 2]].max() < basis.eigenvalues[[3, 4, 5]].min()

    def test_single_level_reduces_to_flat_planted_structure(self):
        g, parts = nested_aep(
            levels=(3,),
            leaf_size=4,
            level_weights=(0.05,),
            leaf_weight_range=(0.8, 1.2),
            seed=1,
        )
        assert g.n == 12
        assert len(parts) == 1 and parts[0].k == 3
        assert check_aep(g, parts[0]).is_aep

    def test_deterministic(self):
        g1, _ = nested_aep(**FIG4_WEIGHTS, seed=5)
        g2, _ = nested_aep(**FIG4_WEIGHTS, seed=5)
        assert g1 == g2

    def test_unorderable_weights_raise(self):
        # Leaf weights far below the cross weights invert the spectrum.
        with pytest.raises(RuntimeError, match="ordering"):
            nested_aep(
                levels=(2,),
                leaf_size=4,
                level_weights=(5.0,),
                leaf_weight_range=(0.001, 0.002),
                seed=2,
                max_retries=2,
            )


class TestPerturb:
    def _instance(self):
        return planted_aep(
            PlantedAepConfig(
                cell_sizes=(5, 4),
                quotient_weights=((0.0, 1.6), (2.0, 0.0)),
                intra_density=0.7,
                seed=3,
            )
        )

    def test_eta_zero_identity(self):
        g, p = self._instance()
        assert perturb(g, p, 0.0, seed=1) == g

    def test_small_eta_breaks_aep_mildly(self):
        g, p = self._instance()
        noisy = perturb(g, p, 0.05, seed=1)
        assert not check_aep(noisy, p).is_aep
        assert 0.0 < qep_score(noisy, p) < 0.1
        assert noisy.m == g.m
        assert np.array_equal(noisy.edge_i, g.edge_i)

    def test_mean_score_monotone_in_eta(self):
        g, p = self._instance()
        etas = (0.01, 0.05, 0.1, 0.2)
        means = []
        for eta in etas:
            scores = [qep_score(perturb(g, p, eta, seed=s), p) for s in range(20)]
            means.append(np.mean(scores))
        assert all(a < b for a, b in zip(means, means[1:]))

    def test_negative_eta_rejected(self):
        g, p = self._instance()
        with pytest.raises(ValueError, match="eta"):
            perturb(g, p, -0.1, seed=0)


class TestSampleSbm:
    def test_all_ones_probabilities_give_complete_graph(self):
        cfg = SbmConfig(block_sizes=(3, 4), probabilities=((1.0, 1.0), (1.0, 1.0)), seed=0)
        g, p = sample_sbm(cfg)
        assert g.m == 7 * 6 // 2
        assert np.all(g.edge_w == 1.0)
        assert check_aep(g, p).max_deviation < 1e-12

    def test_disconnected_blocks_error(self):
        cfg = SbmConfig(
            block_sizes=(4, 4),
            probabilities=((1.0, 0.0), (0.0, 1.0)),
            seed=0,
            max_retries=5,
        )
        with pytest.raises(RuntimeError, match="connected"):
            sample_sbm(cfg)

    def test_asymmetric_probabilities_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            SbmConfig(block_sizes=(3, 3), probabilities=((0.5, 0.2), (0.3, 0.5)))

    def test_deterministic(self):
        cfg = SbmConfig(
            block_sizes=(10, 10), probabilities=((0.6, 0.2), (0.2, 0.5)), seed=4
        )
        g1, _ = sample_sbm(cfg)
        g2, _ = sample_sbm(cfg)
        assert g1 == g2

    def test_block_partition_matches_sizes(self):
        cfg = SbmConfig(
            block_sizes=(6, 9), probabilities=((0.7, 0.3), (0.3, 0.6)), seed=5
        )
        _, p = sample_sbm(cfg)
        assert p.sizes().tolist() == [6, 9]
