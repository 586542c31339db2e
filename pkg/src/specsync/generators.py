"""Synthetic graphs with planted partition structure.

planted_aep builds graphs that are exact weighted almost equitable
partitions: cross-cell weights are random but constrained to exact row and
column sums by iterative proportional fitting, while intra-cell edges are
free. nested_aep stacks such structure hierarchically so that coarser
partitions occupy smaller Laplacian eigenvalues (verified, with retries).
perturb applies multiplicative edge-weight noise to turn an exact partition
into a quasi-equitable one, and sample_sbm draws stochastic block model
graphs whose equitable error concentrates away as blocks grow.

All generators are deterministic functions of their seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph, VertexPartition, _bfs_connected
from .equitable import check_aep
from .spectral import spectral_basis, structural_indices

__all__ = [
    "PlantedAepConfig",
    "SbmConfig",
    "planted_aep",
    "nested_aep",
    "perturb",
    "sample_sbm",
]


@dataclass(frozen=True)
class PlantedAepConfig:
    """Target structure for an exact planted almost equitable partition.

    quotient_weights[i][j] = d_ij is the total edge weight each vertex of
    cell i sends into cell j (zero diagonal). Undirected feasibility forces
    |V_i| d_ij == |V_j| d_ji, and the positive entries must connect all
    cells. Intra-cell edges are sampled freely with the given density and
    weight range; they do not affect the partition property.
    """

    cell_sizes: tuple[int, ...]
    quotient_weights: tuple[tuple[float, ...], ...]
    intra_density: float = 0.5
    intra_weight_range: tuple[float, float] = (0.5, 1.5)
    seed: int = 0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.cell_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("cell sizes must be positive integers")
        d = np.asarray(self.quotient_weights, dtype=float)
        k = len(sizes)
        if d.shape != (k, k):
            raise ValueError("quotient_weights must be k x k")
        if np.any(np.diag(d) != 0.0):
            raise ValueError("quotient_weights diagonal must be zero")
        if np.any(d < 0.0) or not np.all(np.isfinite(d)):
            raise ValueError("quotient_weights must be finite and nonnegative")
        ns = np.asarray(sizes, dtype=float)
        total = ns[:, None] * d
        if not np.allclose(total, total.T, rtol=1e-12, atol=1e-12):
            raise ValueError(
                "infeasible quotient weights: need |V_i| d_ij == |V_j| d_ji"
            )
        if not (0.0 <= self.intra_density <= 1.0):
            raise ValueError("intra_density must be in [0, 1]")
        lo, hi = self.intra_weight_range
        if not 0.0 < lo <= hi:
            raise ValueError("intra_weight_range must be positive and ordered")
        # Positive cross weights must connect the quotient, else the graph
        # cannot be connected regardless of intra edges.
        ei, ej = np.nonzero(np.triu(d, 1))
        if not _bfs_connected(k, ei.astype(np.int64), ej.astype(np.int64)):
            raise ValueError("positive quotient weights do not connect the cells")
        object.__setattr__(self, "cell_sizes", sizes)
        object.__setattr__(
            self, "quotient_weights", tuple(tuple(row) for row in d.tolist())
        )


def _fit_cross_block(
    rng: np.random.Generator,
    rows: int,
    cols: int,
    row_sum: float,
    col_sum: float,
    tol: float = 1e-14,
    max_iter: int = 1000,
) -> np.ndarray:
    """Random positive rows x cols matrix with exact row sums and column
    sums matched to ~1e-14 relative, via iterative proportional fitting."""
    mat = rng.uniform(0.5, 1.5, size=(rows, cols))
    for _ in range(max_iter):
        mat *= (row_sum / mat.sum(axis=1))[:, None]
        col = mat.sum(axis=0)
        if np.abs(col - col_sum).max() <= tol * col_sum:
            break
        mat *= (col_sum / col)[None, :]
    # Final row scaling: row sums exact, column residual stays ~1e-14.
    mat *= (row_sum / mat.sum(axis=1))[:, None]
    return mat


def planted_aep(config: PlantedAepConfig) -> tuple[WeightedGraph, VertexPartition]:
    """Sample a graph admitting the configured exact weighted AEP."""
    rng = np.random.default_rng(config.seed)
    sizes = np.asarray(config.cell_sizes, dtype=int)
    k = sizes.size
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    n = int(offsets[-1])
    d = np.asarray(config.quotient_weights, dtype=float)

    edges: list[tuple[int, int, float]] = []
    for i in range(k):
        for j in range(i + 1, k):
            if d[i, j] <= 0.0:
                continue
            block = _fit_cross_block(rng, sizes[i], sizes[j], d[i, j], d[j, i])
            for a in range(sizes[i]):
                for b in range(sizes[j]):
                    edges.append((offsets[i] + a, offsets[j] + b, block[a, b]))
    lo, hi = config.intra_weight_range
    for i in range(k):
        for a in range(sizes[i]):
            for b in range(a + 1, sizes[i]):
                if rng.random() < config.intra_density:
                    edges.append(
                        (offsets[i] + a, offsets[i] + b, rng.uniform(lo, hi))
                    )

    graph = WeightedGraph(n, edges)
    assignment = np.repeat(np.arange(k), sizes)
    return graph, VertexPartition(assignment, k)


def _level_partitions(levels: tuple[int, ...], leaf_size: int) -> list[VertexPartition]:
    """Partitions at each hierarchy depth, coarsest first."""
    counts = np.cumprod(levels)
    n = int(counts[-1]) * leaf_size
    parts = []
    for depth, cells in enumerate(counts):
        group = n // int(cells)
        parts.append(VertexPartition(np.arange(n) // group, int(cells)))
    return parts


def nested_aep(
    levels,
    leaf_size: int,
    level_weights,
    leaf_weight_range: tuple[float, float] = (1.0, 1.4),
    leaf_density: float = 1.0,
    jitter: float = 0.05,
    seed: int = 0,
    max_retries: int = 5,
) -> tuple[WeightedGraph, list[VertexPartition]]:
    """Hierarchically clustered graph whose every level is an exact AEP.

    levels are branching factors from the top (e.g. (3, 2) with leaf_size 30
    gives 3 super-clusters of 2 sub-clusters of 30 vertices). level_weights
    assigns the edge weight scale between subtrees that diverge at each
    level; weights should ascend with depth so coarser cuts are weaker
    (assortative). Each sibling-subtree pair draws one jittered weight
    shared by all of its edges, which splits eigenvalue degeneracies while
    keeping every level exactly equitable; leaves are filled with free
    random intra-cell edges.

    Returns the graph and the partitions, coarsest first. The construction
    is verified to place structural modes of coarser levels at strictly
    smaller eigenvalues than finer ones (and all of them below the
    nonstructural modes); if the check fails the jitter is halved and the
    construction retried, and RuntimeError is raised at the retry cap.
    """
    levels = tuple(int(b) for b in levels)
    if not levels or any(b < 2 for b in levels):
        raise ValueError("levels must be branching factors >= 2")
    if leaf_size < 2:
        raise ValueError("leaf_size must be at least 2")
    weights = tuple(float(w) for w in level_weights)
    if len(weights) != len(levels) or any(w <= 0 for w in weights):
        raise ValueError("level_weights must be positive, one per level")
    if not 0.0 < leaf_density <= 1.0:
        raise ValueError("leaf_density must be in (0, 1]")
    if not 0.0 <= jitter < 1.0:
        raise ValueError("jitter must be in [0, 1)")

    counts = np.cumprod(levels)
    n_leaves = int(counts[-1])
    n = n_leaves * leaf_size
    parts = _level_partitions(levels, leaf_size)
    lo, hi = leaf_weight_range

    for attempt in range(max_retries):
        rng = np.random.default_rng(seed + attempt)
        edges: list[tuple[int, int, float]] = []
        # Cross edges, one jittered constant weight per sibling-subtree pair
        # at the level where the pair diverges.
        for depth, cells in enumerate(counts):
            group = n // int(cells)
            parent_group = group * levels[depth]
            for c1 in range(int(cells)):
                for c2 in range(c1 + 1, int(cells)):
                    if (c1 * group) // parent_group != (c2 * group) // parent_group:
                        continue  # not siblings: handled at a coarser level
                    w = weights[depth] * (1.0 + jitter * rng.uniform(-1.0, 1.0))
                    for u in range(c1 * group, (c1 + 1) * group):
                        for v in range(c2 * group, (c2 + 1) * group):
                            edges.append((u, v, w))
        # Free intra-leaf edges, random per-edge weights.
        for leaf in range(n_leaves):
            base = leaf * leaf_size
            for a in range(leaf_size):
                for b in range(a + 1, leaf_size):
                    if leaf_density >= 1.0 or rng.random() < leaf_density:
                        edges.append((base + a, base + b, rng.uniform(lo, hi)))

        graph = WeightedGraph(n, edges)
        for part in parts:
            report = check_aep(graph, part)
            if not report.is_aep:
                raise RuntimeError(
                    f"construction lost exactness: deviation {report.max_deviation}"
                )
        if _spectrally_ordered(graph, parts):
            return graph, parts
        jitter *= 0.5
    raise RuntimeError(
        "could not achieve the required spectral ordering; "
        "increase the separation between level weights"
    )


def _spectrally_ordered(graph: WeightedGraph, parts: list[VertexPartition]) -> bool:
    """Coarser structural modes strictly below finer ones, all below the rest."""
    basis = spectral_basis(graph)
    sets = [set(structural_indices(basis, p)) for p in parts]
    previous: set[int] = set()
    boundary = 0.0
    for part, struct in zip(parts, sets):
        if len(struct) != part.k or not previous <= struct:
            return False
        fresh = sorted(struct - previous)
        lams = basis.eigenvalues[fresh]
        if lams.min(initial=np.inf) <= boundary:
            return False
        boundary = lams.max(initial=boundary)
        previous = struct
    rest = sorted(set(range(basis.n)) - previous)
    return basis.eigenvalues[rest].min(initial=np.inf) > boundary


def perturb(
    g: WeightedGraph,
    partition: VertexPartition,
    eta: float,
    seed: int = 0,
) -> WeightedGraph:
    """Multiplicative edge-weight noise: w -> w (1 + u), u ~ U[-eta, eta].

    Topology is unchanged and weights are clamped positive. The partition is
    the one whose equitable structure the noise degrades; it is validated
    against the graph and returned untouched by the caller. With the same
    seed, noise directions are identical across eta values, so QEP quality
    degrades monotonically as eta grows.
    """
    if partition.n != g.n:
        raise ValueError("partition does not match graph size")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    rng = np.random.default_rng(seed)
    factor = 1.0 + eta * rng.uniform(-1.0, 1.0, size=g.m)
    new_w = np.maximum(g.edge_w * factor, 1e-12 * g.edge_w)
    return WeightedGraph(g.n, np.column_stack([g.edge_i, g.edge_j, new_w]))


@dataclass(frozen=True)
class SbmConfig:
    """Stochastic block model: symmetric connection probabilities per block
    pair, unit edge weights, resampled until connected."""

    block_sizes: tuple[int, ...]
    probabilities: tuple[tuple[float, ...], ...]
    seed: int = 0
    max_retries: int = 50

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("block sizes must be positive integers")
        pr = np.asarray(self.probabilities, dtype=float)
        k = len(sizes)
        if pr.shape != (k, k):
            raise ValueError("probabilities must be k x k")
        if not np.allclose(pr, pr.T, atol=0.0):
            raise ValueError("probabilities must be symmetric")
        if np.any(pr < 0.0) or np.any(pr > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(
            self, "probabilities", tuple(tuple(row) for row in pr.tolist())
        )


def sample_sbm(config: SbmConfig) -> tuple[WeightedGraph, VertexPartition]:
    """Draw one connected SBM sample with its block partition.

    Raises RuntimeError when max_retries consecutive samples come out
    disconnected (probabilities too sparse).
    """
    rng = np.random.default_rng(config.seed)
    sizes = np.asarray(config.block_sizes, dtype=int)
    n = int(sizes.sum())
    assignment = np.repeat(np.arange(sizes.size), sizes)
    pr = np.asarray(config.probabilities, dtype=float)
    pair_prob = pr[assignment[:, None], assignment[None, :]]
    iu, ju = np.triu_indices(n, k=1)
    probs = pair_prob[iu, ju]
    for _ in range(config.max_retries):
        mask = rng.random(probs.size) < probs
        ei = iu[mask].astype(np.int64)
        ej = ju[mask].astype(np.int64)
        if _bfs_connected(n, ei, ej):
            graph = WeightedGraph(
                n, np.column_stack([ei, ej, np.ones(ei.size)])
            )
            return graph, VertexPartition(assignment, sizes.size)
    raise RuntimeError(
        f"no connected sample in {config.max_retries} draws; "
        "probabilities are too sparse"
    )
