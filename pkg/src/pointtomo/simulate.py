"""Finite-ensemble measurement simulation: noise, sampling, trials, sweeps.

Every trial draws exactly N copies (a multinomial over the outcome
probabilities). Randomness is organized as independent per-trial streams
derived from the master seed and the (grid index, trial index) pair, so a
sweep is reproducible bit for bit regardless of execution order or worker
count.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import InvalidInput, SweepError
from .estimator import BootstrapResult, MleConfig, bootstrap_infidelity, estimate_state
from .povm import Povm, gauge_fix_effects
from .states import (DensityMatrix, StateVector, born_probabilities, depolarize,
                     equal_deviation_state, fiducial_state, fidelity)
from .validation import check_in_range, check_probability_vector


@dataclass(frozen=True)
class NoiseConfig:
    """Depolarizing weight, optional systematic misalignment strength, seed."""

    lam: float = 1.0
    systematic_epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self):
        check_in_range(self.lam, 0.0, 1.0, "lam")
        if self.systematic_epsilon < 0:
            raise InvalidInput("systematic_epsilon must be >= 0")


@dataclass(frozen=True)
class SweepConfig:
    """Declarative description of an infidelity-vs-ensemble-size sweep."""

    theta_scalar: float
    n_grid: tuple
    repetitions: int
    noise: NoiseConfig = NoiseConfig()
    subset: tuple = (4, 5, 6, 7)
    phases: tuple | None = None
    device: str = "u7"
    reunitarize: bool = True
    seed: int = 0
    n_boot: int = 0
    mle: MleConfig = MleConfig()

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        if len(grid) < 1 or any(n < 1 for n in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidInput("n_grid must be strictly increasing with entries >= 1")
        if self.repetitions < 1:
            raise InvalidInput("repetitions must be >= 1")
        if self.theta_scalar < 0:
            raise InvalidInput("theta_scalar must be >= 0")
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "subset", tuple(int(s) for s in self.subset))
        if self.phases is not None:
            object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))


@dataclass(frozen=True)
class TrialResult:
    n: int
    counts: np.ndarray
    estimate: StateVector
    infidelity: float
    bootstrap: BootstrapResult | None = None


@dataclass(frozen=True)
class SweepResult:
    """All trial rows of a sweep plus reproducibility provenance."""

    rows: tuple                       # (n, trial, infidelity, boot_low, q25, median, q75, boot_high)
    config_hash: str
    seed: int
    partial: bool = False

    COLUMNS = ("N", "trial", "infidelity", "boot_low", "boot_q25",
               "boot_median", "boot_q75", "boot_high")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.rows, dtype=float)

    def mean_infidelity(self) -> dict:
        arr = self.as_array()
        return {int(n): float(arr[arr[:, 0] == n, 2].mean()) for n in np.unique(arr[:, 0])}

    def points(self) -> np.ndarray:
        """(N, infidelity) pairs of every trial, for power-law fitting."""
        arr = self.as_array()
        return arr[:, :3:2]


def config_hash(cfg) -> str:
    """Stable SHA-256 of a configuration dataclass tree."""

    def encode(obj):
        if hasattr(obj, "__dataclass_fields__"):
            return {k: encode(getattr(obj, k)) for k in sorted(obj.__dataclass_fields__)}
        if isinstance(obj, (tuple, list)):
            return [encode(v) for v in obj]
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.integer, np.floating)):
            return obj.item()
        return obj

    blob = json.dumps(encode(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def trial_rng(master_seed: int, grid_index: int, trial: int, stream: int = 0):
    """Independent generator for one work item of a sweep."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(grid_index, trial, stream)))


def sample_counts(probs, n: int, rng) -> np.ndarray:
    """Multinomial draw of ``n`` copies; counts sum to ``n`` exactly."""
    probs = check_probability_vector(probs)
    n = int(n)
    if n < 0:
        raise InvalidInput("ensemble size must be >= 0")
    if n == 0:
        return np.zeros(probs.size, dtype=np.int64)
    return rng.multinomial(n, probs / probs.sum())


def perturb_effects(povm: Povm, epsilon: float, rng) -> Povm:
    """Systematic misalignment: rotate all effects by exp(i epsilon H).

    H is a fixed random Hermitian matrix with GUE normalization drawn from
    ``rng``; the rotation is unitary, so completeness is preserved. The
    phase convention is re-fixed afterwards. epsilon = 0 returns the input
    unchanged.
    """
    if epsilon < 0:
        raise InvalidInput("epsilon must be >= 0")
    if epsilon == 0:
        return povm
    d = povm.dim
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = 0.5 * (g + g.conj().T)
    u = expm(1j * epsilon * h)
    return Povm(gauge_fix_effects(povm.effects @ u.T))


def run_trial(state: DensityMatrix, povm: Povm, n: int, rng,
              mle: MleConfig = MleConfig()) -> TrialResult:
    """Sample counts from the true state, estimate, and score the infidelity."""
    probs = born_probabilities(povm, state)
    counts = sample_counts(probs, n, rng)
    if n == 0:
        estimate = fiducial_state(povm.dim)
    else:
        try:
            estimate = estimate_state(counts, povm, mle)
        except Exception as exc:
            raise type(exc)(f"trial with N={n} failed: {exc}") from exc
    return TrialResult(n=n, counts=counts, estimate=estimate,
                       infidelity=1.0 - fidelity(estimate, state))


def _resolve_povm(cfg: SweepConfig) -> Povm:
    from .assets import load_matrix, seven_port_matrix
    from .povm import PovmFamily, effects_from_family, load_mbs

    matrix = seven_port_matrix() if cfg.device == "u7" else load_matrix(cfg.device)
    mbs = load_mbs(matrix, reunitarize=cfg.reunitarize)
    phases = np.zeros(len(cfg.subset)) if cfg.phases is None else np.asarray(cfg.phases)
    return effects_from_family(mbs, PovmFamily(subset=cfg.subset, phases=phases))


def prepared_state(cfg: SweepConfig, dim: int) -> DensityMatrix:
    """Noisy true state of the sweep: depolarized equal-deviation state."""
    return depolarize(equal_deviation_state(cfg.theta_scalar, dim), cfg.noise.lam)


def _sweep_payloads(cfg: SweepConfig, povm: Povm, rho: DensityMatrix):
    probs = born_probabilities(povm, rho)
    for i, n in enumerate(cfg.n_grid):
        for t in range(cfg.repetitions):
            yield (i, n, t, probs, povm.effects, rho.mat, cfg.seed, cfg.n_boot, cfg.mle)


def _run_one(payload):
    (i, n, t, probs, effects, rho_mat, seed, n_boot, mle) = payload
    povm = Povm(effects)
    rho = DensityMatrix(rho_mat)
    rng = trial_rng(seed, i, t)
    counts = sample_counts(probs, n, rng)
    if n == 0:
        est = fiducial_state(povm.dim)
    else:
        est = estimate_state(counts, povm, mle)
    infid = 1.0 - fidelity(est, rho)
    boot = (np.nan,) * 5
    if n_boot > 0 and n > 0:
        res = bootstrap_infidelity(counts, povm, rho, n_boot,
                                   trial_rng(seed, i, t, stream=1), mle)
        boot = res.as_row()
    return (i, t, (float(n), float(t), infid) + boot)


def run_sweep(cfg: SweepConfig, povm: Povm | None = None, workers: int = 1) -> SweepResult:
    """Execute all (N, trial) work items of a sweep.

    The result is deterministic given (config, seed) and independent of
    ``workers``; any trial error aborts with a :class:`SweepError` carrying
    the partial result flagged as such.
    """
    if povm is None:
        povm = _resolve_povm(cfg)
    rho = prepared_state(cfg, povm.dim)
    if cfg.noise.systematic_epsilon > 0:
        povm = perturb_effects(povm, cfg.noise.systematic_epsilon,
                               np.random.default_rng(np.random.SeedSequence(cfg.noise.seed)))
    payloads = list(_sweep_payloads(cfg, povm, rho))
    results = {}
    digest = config_hash(cfg)
    try:
        if workers and workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for i, t, row in pool.map(_run_one, payloads, chunksize=8):
                    results[(i, t)] = row
        else:
            for payload in payloads:
                i, t, row = _run_one(payload)
                results[(i, t)] = row
    except Exception as exc:
        partial = SweepResult(rows=tuple(results[k] for k in sorted(results)),
                              config_hash=digest, seed=cfg.seed, partial=True)
        raise SweepError(f"sweep aborted: {exc}", partial=partial) from exc
    rows = tuple(results[k] for k in sorted(results))
    return SweepResult(rows=rows, config_hash=digest, seed=cfg.seed)


def expected_infidelity_floor(rho: DensityMatrix, povm: Povm,
                              mle: MleConfig = MleConfig(starts=16)) -> float:
    """Infinite-ensemble infidelity: estimate from exact outcome probabilities.

    This is the plateau level that finite-statistics sweeps approach when
    the preparation is noisy or sits outside the exactly identifiable
    neighborhood.
    """
    probs = born_probabilities(povm, rho)
    est = estimate_state(probs, povm, mle)
    return 1.0 - fidelity(est, rho)
