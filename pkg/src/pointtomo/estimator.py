"""Local pure-state maximum-likelihood estimation and related statistics.

The estimator maximizes the multinomial log-likelihood over the local chart
theta in C^(d-1) (2(d-1) real variables) with quasi-Newton ascent and
numerical gradients, from several starts: the fiducial point, a linearized
inversion of the observed frequencies, and random draws inside the trust
region. The best likelihood wins; among numerically tied optima the point
closest to the fiducial state is returned, which is the resolution
appropriate to estimation in a trusted neighborhood (a handful of outcomes
cannot distinguish all pure states globally).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateInput, InvalidInput
from .states import StateVector, fidelity, neighborhood_state, pure_probabilities
from .validation import check_counts

PROBABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class MleConfig:
    """Optimizer settings for :func:`estimate_state`."""

    max_iterations: int = 500
    tolerance: float = 1e-10          # relative log-likelihood change per iteration
    starts: int = 8                   # random starts in addition to fiducial + linearized
    start_radius: float = 0.3         # |theta_j| bound for random starts
    chart_bound: float = 0.6          # box bound on Re/Im of each theta_j
    seed: int = 0                     # start draws are a function of the config only

    def __post_init__(self):
        if self.tolerance <= 0:
            raise InvalidInput("tolerance must be positive")
        if self.starts < 1 or self.max_iterations < 1:
            raise InvalidInput("starts and max_iterations must be >= 1")
        if not 0 < self.start_radius <= self.chart_bound:
            raise InvalidInput("need 0 < start_radius <= chart_bound")


@dataclass(frozen=True)
class MleResult:
    theta: np.ndarray
    log_likelihood: float             # sum_w counts_w * log f(w|theta)
    n_candidates: int
    n_tied: int
    ascent_traces: list | None = field(default=None, repr=False)

    @property
    def state(self) -> StateVector:
        return neighborhood_state(self.theta)


@dataclass(frozen=True)
class FitResult:
    """Power-law model infidelity ~ coefficient * N ** exponent."""

    coefficient: float
    exponent: float
    residual: float                   # RMS of log residuals

    def __post_init__(self):
        if self.residual < 0:
            raise InvalidInput("residual must be nonnegative")

    def value(self, n) -> np.ndarray:
        return self.coefficient * np.asarray(n, dtype=float) ** self.exponent


def _linearized_theta(effects: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """First-order inversion of the Born probabilities around the fiducial.

    p_w(theta) = a0_w^2 + 2 a0_w Re(sum_j conj(a_jw) theta_j) + O(theta^2),
    solved for theta by least squares.
    """
    a0 = effects[:, 0].real
    d = effects.shape[1]
    design = np.empty((effects.shape[0], 2 * (d - 1)))
    for j in range(d - 1):
        caj = effects[:, j + 1].conj()
        design[:, j] = 2.0 * a0 * caj.real
        design[:, d - 1 + j] = -2.0 * a0 * caj.imag
    x, *_ = np.linalg.lstsq(design, freqs - a0 ** 2, rcond=None)
    return x


def _random_start(rng, m: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, m))
    phase = rng.uniform(0.0, 2.0 * np.pi, m)
    t = r * np.exp(1j * phase)
    return np.concatenate([t.real, t.imag])


def estimate_theta(counts, povm, cfg: MleConfig = MleConfig(), trace: bool = False) -> MleResult:
    """Maximum-likelihood local parameters for observed counts.

    ``counts`` may be integer counts or exact real frequencies. The result
    is deterministic given (cfg, counts).
    """
    effects = povm.effects
    counts = check_counts(counts, effects.shape[0])
    total = counts.sum()
    weights = counts / total
    m = effects.shape[1] - 1

    def objective(x):
        th = x[:m] + 1j * x[m:]
        p = pure_probabilities(effects, neighborhood_state(th).amps)
        return -float(weights @ np.log(np.maximum(p, PROBABILITY_FLOOR)))

    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    x0s = [np.zeros(2 * m), np.clip(_linearized_theta(effects, weights),
                                    -cfg.chart_bound, cfg.chart_bound)]
    x0s.extend(_random_start(rng, m, cfg.start_radius) for _ in range(cfg.starts))

    bounds = [(-cfg.chart_bound, cfg.chart_bound)] * (2 * m)
    options = {"ftol": cfg.tolerance, "gtol": 1e-10, "maxiter": cfg.max_iterations}
    candidates = []
    traces = [] if trace else None
    for x0 in x0s:
        path = [] if trace else None
        callback = (lambda xk, p=path: p.append(objective(xk))) if trace else None
        res = minimize(objective, x0, method="L-BFGS-B", bounds=bounds,
                       options=options, callback=callback)
        candidates.append((float(res.fun), res.x))
        if trace:
            traces.append([objective(x0)] + path)

    best = min(f for f, _ in candidates)
    tie_tol = 50.0 * max(cfg.tolerance, 1e-14) * max(1.0, abs(best))
    tied = [x for f, x in candidates if f <= best + tie_tol]
    x_star = min(tied, key=lambda x: float(x @ x))
    theta = x_star[:m] + 1j * x_star[m:]
    p = pure_probabilities(effects, neighborhood_state(theta).amps)
    loglik = float(counts @ np.log(np.maximum(p, PROBABILITY_FLOOR)))
    return MleResult(theta=theta, log_likelihood=loglik,
                     n_candidates=len(candidates), n_tied=len(tied),
                     ascent_traces=traces)


def estimate_state(counts, povm, cfg: MleConfig = MleConfig()) -> StateVector:
    """Maximum-likelihood pure-state estimate on the local chart."""
    return estimate_theta(counts, povm, cfg).state


@dataclass(frozen=True)
class BootstrapResult:
    low: float
    high: float
    q25: float
    median: float
    q75: float
    n_boot: int
    degenerate: bool = False

    def as_row(self) -> tuple:
        return (self.low, self.q25, self.median, self.q75, self.high)


def bootstrap_infidelity(counts, povm, reference, n_boot: int, rng,
                         cfg: MleConfig = MleConfig()) -> BootstrapResult:
    """Bootstrap spread of the infidelity versus a fixed reference state.

    Counts are resampled multinomially from the empirical frequencies, each
    replica is re-estimated, and the infidelity of every replica estimate
    against ``reference`` (a DensityMatrix) is collected.
    """
    if n_boot < 10:
        raise InvalidInput("need n_boot >= 10")
    counts = check_counts(counts, povm.n_outcomes)
    total = counts.sum()
    n = int(round(total))
    freqs = counts / total
    if np.count_nonzero(counts) == 1:
        est = estimate_state(counts, povm, cfg)
        value = 1.0 - fidelity(est, reference)
        return BootstrapResult(low=value, high=value, q25=value, median=value,
                               q75=value, n_boot=n_boot, degenerate=True)
    values = np.empty(n_boot)
    for b in range(n_boot):
        resampled = rng.multinomial(n, freqs)
        est = estimate_state(resampled, povm, cfg)
        values[b] = 1.0 - fidelity(est, reference)
    q25, med, q75 = np.quantile(values, [0.25, 0.5, 0.75])
    return BootstrapResult(low=float(values.min()), high=float(values.max()),
                           q25=float(q25), median=float(med), q75=float(q75),
                           n_boot=n_boot)


def fit_power_law(points) -> FitResult:
    """Least squares on (log N, log infidelity) over (N, infidelity) pairs.

    Points with infidelity exactly 0 are excluded with a warning; negative
    infidelities are rejected.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise InvalidInput("need at least two (N, infidelity) points")
    n, y = pts[:, 0], pts[:, 1]
    if np.any(n <= 0) or not np.all(np.isfinite(pts)):
        raise InvalidInput("ensemble sizes must be positive and finite")
    if np.any(y < 0):
        raise InvalidInput("infidelities must be nonnegative")
    keep = y > 0
    if not np.all(keep):
        warnings.warn(f"excluding {np.count_nonzero(~keep)} zero-infidelity points from the fit",
                      stacklevel=2)
    n, y = n[keep], y[keep]
    if n.size < 2:
        raise DegenerateInput("fewer than two positive points remain")
    slope, intercept = np.polyfit(np.log(n), np.log(y), 1)
    resid = np.log(y) - (intercept + slope * np.log(n))
    return FitResult(coefficient=float(np.exp(intercept)), exponent=float(slope),
                     residual=float(np.sqrt(np.mean(resid ** 2))))


class PointTomographyMLE:
    """Scikit-learn style wrapper around the local MLE.

    Parameters mirror :class:`MleConfig`; ``fit`` takes a count (or exact
    frequency) vector with one entry per POVM outcome and exposes the fitted
    ``theta_``, ``state_`` and ``log_likelihood_``.
    """

    _param_names = ("povm", "max_iterations", "tolerance", "starts",
                    "start_radius", "chart_bound", "seed")

    def __init__(self, povm, max_iterations: int = 500, tolerance: float = 1e-10,
                 starts: int = 8, start_radius: float = 0.3,
                 chart_bound: float = 0.6, seed: int = 0):
        self.povm = povm
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.starts = starts
        self.start_radius = start_radius
        self.chart_bound = chart_bound
        self.seed = seed

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params):
        for name, value in params.items():
            if name not in self._param_names:
                raise InvalidInput(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def _config(self) -> MleConfig:
        return MleConfig(max_iterations=self.max_iterations, tolerance=self.tolerance,
                         starts=self.starts, start_radius=self.start_radius,
                         chart_bound=self.chart_bound, seed=self.seed)

    def fit(self, X, y=None):
        result = estimate_theta(X, self.povm, self._config())
        self.theta_ = result.theta
        self.state_ = result.state
        self.log_likelihood_ = result.log_likelihood
        self.n_tied_ = result.n_tied
        return self

    def probabilities(self) -> np.ndarray:
        """Model outcome probabilities at the fitted state."""
        return pure_probabilities(self.povm.effects, self.state_.amps)

    def score(self, X, y=None) -> float:
        """Average per-copy log-likelihood of counts ``X`` under the fitted state."""
        counts = check_counts(X, self.povm.n_outcomes)
        p = np.maximum(self.probabilities(), PROBABILITY_FLOOR)
        return float((counts / counts.sum()) @ np.log(p))
