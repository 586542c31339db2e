"""Closed-form predictions for the coefficient dynamics.

Near frequency-locked synchronization, linearizing the coefficient
equations mode by mode gives

    alpha_r(t) = alpha_r^inf (1 - exp(-sigma lambda_r t))
                 + alpha_r(0) exp(-sigma lambda_r t),          r >= 1,

    alpha_r^inf = (omega.v^(r) - sigma sum_a W_aa e_a^(r) beta_a)
                  / (sigma lambda_r),

which reduces to omega^(r) / (sigma lambda_r) without phase lag. Keeping
the quadratic correction for a single still-dynamical mode r1 (all other
modes pinned at their limits) yields

    dalpha/dt = omega^(r1) - sigma lambda_r1 alpha + sigma x_r1 alpha^2,
    x_r1 = sum_{s != 0, r1} omega^(s) / (2 sigma lambda_s)
               sum_a W_aa (e_a^(r1))^3 e_a^(s),

whose discriminant Delta = (sigma lambda_r1)^2 - 4 sigma omega^(r1) x_r1
separates settling to a fixed point (Delta > 0) from unbounded, limit-cycle
style mode dynamics (Delta < 0, solved by a tangent branch that diverges in
finite time). Transient regime structure is read off a coefficient
trajectory by thresholding mode activity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import CoefficientTrajectory, OscillatorSystem
from .spectral import SpectralBasis

__all__ = [
    "LinearPrediction",
    "DiscriminantEntry",
    "Regime",
    "RegimeSegmentation",
    "asymptotic_coefficients",
    "linear_solution",
    "prediction_error_profile",
    "x_coupling",
    "discriminant",
    "discriminant_report",
    "single_mode_solution",
    "segment_regimes",
    "fit_decay_rates",
]


@dataclass(frozen=True)
class LinearPrediction:
    """Per-mode linearized quantities; index 0 entries are placeholders.

    omega_spec:  omega . v^(r)
    lag_spec:    sum_a W_aa e_a^(r) beta_a (zero without phase lag)
    decay_rates: sigma lambda_r
    alpha_inf:   (omega_spec - sigma * lag_spec) / (sigma lambda_r),
                 NaN at r = 0 where the mode drifts linearly instead.
    """

    sigma: float
    eigenvalues: np.ndarray
    omega_spec: np.ndarray
    lag_spec: np.ndarray
    decay_rates: np.ndarray
    alpha_inf: np.ndarray


@dataclass(frozen=True)
class DiscriminantEntry:
    """Single-mode discriminant classification for candidate mode r1 >= 1."""

    mode: int
    omega_r: float
    x: float
    delta: float

    @property
    def classification(self) -> str:
        return "fixed_point" if self.delta > 0 else "limit_cycle"


@dataclass(frozen=True)
class Regime:
    t_start: float
    t_end: float
    active: tuple[int, ...]


@dataclass(frozen=True)
class RegimeSegmentation:
    """Ordered regimes partitioning the trajectory time range."""

    regimes: tuple[Regime, ...]


def _check_mode(basis: SpectralBasis, r: int) -> None:
    if not 1 <= r < basis.n:
        raise ValueError(f"mode index must be in 1..{basis.n - 1}, got {r}")


def asymptotic_coefficients(
    system: OscillatorSystem, basis: SpectralBasis
) -> LinearPrediction:
    """Linearized equilibrium coefficients of a synchronizing system."""
    if basis.edge_vectors is None or basis.n != system.graph.n:
        raise ValueError("basis must be built from the system graph")
    if system.sigma <= 0:
        raise ValueError("equilibrium analysis requires positive coupling")
    omega_spec = basis.vertex_vectors.T @ system.omega
    lag_spec = basis.edge_vectors.T @ (system.graph.edge_w * system.beta)
    decay = system.sigma * basis.eigenvalues
    alpha_inf = np.full(basis.n, np.nan)
    alpha_inf[1:] = (omega_spec[1:] - system.sigma * lag_spec[1:]) / decay[1:]
    return LinearPrediction(
        sigma=system.sigma,
        eigenvalues=basis.eigenvalues,
        omega_spec=omega_spec,
        lag_spec=lag_spec,
        decay_rates=decay,
        alpha_inf=alpha_inf,
    )


def linear_solution(pred: LinearPrediction, r: int, alpha_r0: float, t):
    """Evaluate the linearized solution of mode r at time(s) t."""
    if not 1 <= r < pred.eigenvalues.size:
        raise ValueError(f"mode index must be in 1..{pred.eigenvalues.size - 1}, got {r}")
    rate = pred.decay_rates[r]
    if rate <= 0:
        raise ValueError("linearized solution requires a positive eigenvalue")
    decay = np.exp(-rate * np.asarray(t, dtype=float))
    return pred.alpha_inf[r] * (1.0 - decay) + alpha_r0 * decay


def prediction_error_profile(
    sim: CoefficientTrajectory,
    pred: LinearPrediction,
    settle_tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Terminal coefficient magnitudes and their linearization errors.

    Requires the trajectory to have settled (max |dalpha_r/dt| over r >= 1,
    estimated from the last two samples, below settle_tol). Returns
    (|alpha_r(T)|, |alpha_r(T) - alpha_r^inf|) for r = 1..n-1, the raw
    material for checking that linearization error grows with coefficient
    magnitude.
    """
    coeffs = sim.coeffs
    if coeffs.shape[0] < 2:
        raise ValueError("trajectory too short")
    rate = np.abs(coeffs[-1, 1:] - coeffs[-2, 1:]) / sim.dt
    if rate.max(initial=0.0) > settle_tol:
        raise ValueError(
            f"trajectory not settled: max |dalpha/dt| = {rate.max():.3e} > {settle_tol:.1e}"
        )
    terminal = coeffs[-1, 1:]
    return np.abs(terminal), np.abs(terminal - pred.alpha_inf[1:])


def x_coupling(system: OscillatorSystem, basis: SpectralBasis, r1: int) -> float:
    """Cubic edge-overlap coupling of mode r1 with the pinned modes.

    x_r1 = sum_{s != 0, r1} omega^(s) / (2 sigma lambda_s)
               sum_a W_aa (e_a^(r1))^3 e_a^(s)
    """
    if basis.edge_vectors is None or basis.n != system.graph.n:
        raise ValueError("basis must be built from the system graph")
    if system.sigma <= 0:
        raise ValueError("mode coupling requires positive coupling strength")
    _check_mode(basis, r1)
    w = system.graph.edge_w
    evec = basis.edge_vectors
    cubic = w * evec[:, r1] ** 3
    overlaps = evec.T @ cubic  # sum_a W_aa (e_a^(r1))^3 e_a^(s) per mode s
    omega_spec = basis.vertex_vectors.T @ system.omega
    include = np.ones(basis.n, dtype=bool)
    include[[0, r1]] = False
    terms = (
        omega_spec[include]
        / (2.0 * system.sigma * basis.eigenvalues[include])
        * overlaps[include]
    )
    return float(terms.sum())


def discriminant(
    system: OscillatorSystem, basis: SpectralBasis, r1: int
) -> DiscriminantEntry:
    """Discriminant Delta_r1 = (sigma lambda_r1)^2 - 4 sigma omega^(r1) x_r1."""
    _check_mode(basis, r1)
    omega_r = float(basis.vertex_vectors[:, r1] @ system.omega)
    x = x_coupling(system, basis, r1)
    lam = basis.eigenvalues[r1]
    delta = (system.sigma * lam) ** 2 - 4.0 * system.sigma * omega_r * x
    return DiscriminantEntry(mode=r1, omega_r=omega_r, x=x, delta=float(delta))


def discriminant_report(
    system: OscillatorSystem, basis: SpectralBasis
) -> tuple[DiscriminantEntry, ...]:
    """Discriminant entries for every candidate mode r1 >= 1."""
    return tuple(discriminant(system, basis, r) for r in range(1, basis.n))


def single_mode_solution(
    system: OscillatorSystem,
    basis: SpectralBasis,
    r1: int,
    alpha0: float,
    t,
    tan_margin: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form single-unstable-mode solution and its validity mask.

    Solves dalpha/dt = omega^(r1) - sigma lambda alpha + sigma x alpha^2
    with every other mode pinned at its linearized limit. For Delta > 0 the
    stable branch (with the integration constant fixed from alpha0) decays
    to the stable root of sigma lambda alpha - sigma x alpha^2 = omega^(r1).
    For Delta < 0 the solution is a tangent branch,

        alpha(t) = [sigma lambda + sqrt(-Delta) tan( arctan((2 sigma x
                   alpha0 - sigma lambda)/sqrt(-Delta)) + sqrt(-Delta) t/2 )]
                   / (2 sigma x),

    which diverges in finite time; samples past the first singularity, or
    where |2 sigma x alpha - sigma lambda| exceeds tan_margin (default
    10 sqrt(-Delta)), are flagged invalid. With x = 0 the quadratic term
    vanishes and the linearized solution is returned (always valid).
    """
    entry = discriminant(system, basis, r1)
    lam = float(basis.eigenvalues[r1])
    sigma = system.sigma
    omega_r, x, delta = entry.omega_r, entry.x, entry.delta
    t = np.atleast_1d(np.asarray(t, dtype=float))
    sl = sigma * lam

    if x == 0.0:
        pred = asymptotic_coefficients(system, basis)
        values = np.asarray(linear_solution(pred, r1, alpha0, t), dtype=float)
        return values, np.ones_like(values, dtype=bool)

    if delta > 0:
        root = np.sqrt(delta)
        a_plus = (sl + root) / (2.0 * sigma * x)
        a_minus = (sl - root) / (2.0 * sigma * x)
        if np.isclose(alpha0, a_minus):
            values = np.full_like(t, a_minus)
            return values, np.ones_like(values, dtype=bool)
        p = (alpha0 - a_plus) / (alpha0 - a_minus)
        # Decaying form of (a_plus - a_minus p e^{rt}) / (1 - p e^{rt}):
        # multiply through by e^{-rt} so t -> inf tends to a_minus without
        # overflowing the exponential.
        decay = np.exp(-root * t)
        values = (a_plus * decay - a_minus * p) / (decay - p)
        # Outside the stable basin the denominator crosses zero in finite
        # time; samples past that pole are flagged invalid.
        valid = np.isfinite(values) & (np.sign(decay - p) == np.sign(1.0 - p))
        return values, valid

    if delta == 0.0:
        a_star = sl / (2.0 * sigma * x)
        denom = 1.0 - sigma * x * (alpha0 - a_star) * t
        values = a_star + (alpha0 - a_star) / denom
        return values, denom > 0

    root = np.sqrt(-delta)
    if tan_margin is None:
        tan_margin = 10.0 * root
    phi0 = np.arctan((2.0 * sigma * x * alpha0 - sl) / root)
    phase = phi0 + 0.5 * root * t
    values = (sl + root * np.tan(phase)) / (2.0 * sigma * x)
    # Valid until the tangent's first singularity and within the margin on
    # |2 sigma x alpha - sigma lambda| = sqrt(-Delta) |tan|.
    valid = (phase < 0.5 * np.pi) & (np.abs(2.0 * sigma * x * values - sl) < tan_margin)
    return values, valid


def segment_regimes(
    sim: CoefficientTrajectory,
    threshold: float | None = None,
    min_dwell: float = 5.0,
) -> RegimeSegmentation:
    """Partition a trajectory into maximal intervals of constant mode activity.

    Mode r >= 1 is active at a sample when |alpha_r| > threshold (default:
    2% of the largest terminal |alpha_r|, r >= 1). Runs of a constant active
    set shorter than min_dwell are absorbed into their neighbor, so brief
    threshold flickers do not fragment the segmentation. The returned
    intervals tile [t0, t_end].
    """
    coeffs = sim.coeffs
    if threshold is None:
        threshold = 0.02 * np.abs(coeffs[-1, 1:]).max(initial=0.0)
    elif threshold <= 0:
        raise ValueError("threshold must be positive")
    active = np.abs(coeffs[:, 1:]) > threshold  # (samples, n-1)

    # Run-length encode the per-sample active sets.
    changes = np.flatnonzero(np.any(active[1:] != active[:-1], axis=1)) + 1
    starts = np.concatenate([[0], changes])
    ends = np.concatenate([changes, [active.shape[0]]])
    runs = [
        [int(s), int(e), frozenset(np.flatnonzero(active[s]) + 1)]
        for s, e in zip(starts, ends)
    ]

    def duration(run):
        return (run[1] - run[0]) * sim.dt

    # Absorb sub-dwell runs, shortest first, then re-merge equal neighbors.
    while len(runs) > 1:
        idx = min(range(len(runs)), key=lambda i: (duration(runs[i]), i))
        if duration(runs[idx]) >= min_dwell:
            break
        if idx == 0:
            runs[1][0] = runs[0][0]
            del runs[0]
        else:
            runs[idx - 1][1] = runs[idx][1]
            del runs[idx]
        merged = [runs[0]]
        for run in runs[1:]:
            if run[2] == merged[-1][2]:
                merged[-1][1] = run[1]
            else:
                merged.append(run)
        runs = merged

    times = sim.times
    regimes = []
    for s, e, modes in runs:
        t_end = times[e - 1] if e == len(times) else times[e]
        regimes.append(
            Regime(
                t_start=float(times[s]),
                t_end=float(t_end),
                active=tuple(sorted(modes)),
            )
        )
    return RegimeSegmentation(regimes=tuple(regimes))


def fit_decay_rates(
    sim: CoefficientTrajectory,
    t_start: float,
    t_end: float,
    amp_floor: float = 1e-12,
    min_samples: int = 5,
) -> np.ndarray:
    """Least-squares decay rate of log |alpha_r(t)| per mode over a window.

    In the linearized regime with no forcing, |alpha_r| decays at
    sigma lambda_r. Returns one rate per mode (NaN for mode 0, for modes
    with fewer than min_samples usable points, or when any sampled value in
    the window falls below amp_floor).
    """
    times = sim.times
    window = (times >= t_start) & (times <= t_end)
    rates = np.full(sim.n, np.nan)
    for r in range(1, sim.n):
        vals = np.abs(sim.coeffs[window, r])
        if vals.size < min_samples or np.any(vals < amp_floor):
            continue
        slope = np.polyfit(times[window], np.log(vals), 1)[0]
        rates[r] = -slope
    return rates
