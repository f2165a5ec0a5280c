"""Rank-1 POVMs realized by a multiport beam splitter, and random baselines.

Connecting d of the D input ports of a D x D multiport device and detecting
on all D outputs realizes a d-dimensional rank-1 POVM with D outcomes. The
coefficient vector of outcome eta is

    a_j^eta = conj(U[eta, k_j] * exp(i phi_j)) * exp(i gamma_eta),

where k_1..k_d are the connected inputs, phi_j the input phases and
gamma_eta a per-outcome phase fixing the leading coefficient real and
nonnegative.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import polar
from scipy.optimize import minimize

from .errors import DegenerateInput, InvalidInput
from .fisher import COMPLETENESS_TOL, c_norm, matrix_norm
from .validation import check_square_matrix

GAUGE_FLOOR = 1e-12
STRICT_COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True)
class Povm:
    """Ordered rank-1 effect coefficient vectors, one row per outcome."""

    effects: np.ndarray
    completeness_deviation: float = field(init=False, compare=False)

    def __post_init__(self):
        eff = np.asarray(self.effects, dtype=complex)
        if eff.ndim != 2 or eff.shape[1] < 2:
            raise InvalidInput(f"effects must be (n_outcomes, d) with d >= 2, got shape {eff.shape}")
        if not np.all(np.isfinite(eff)):
            raise InvalidInput("effects contain non-finite entries")
        lead = eff[:, 0]
        if np.max(np.abs(lead.imag)) > 1e-9 or lead.real.min() < -1e-9:
            raise InvalidInput("leading effect coefficients must be real nonnegative (phase convention)")
        gram = eff.conj().T @ eff
        dev = float(np.linalg.norm(gram - np.eye(eff.shape[1]), 2))
        eff.setflags(write=False)
        object.__setattr__(self, "effects", eff)
        object.__setattr__(self, "completeness_deviation", dev)

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.effects.shape[0]

    def is_complete(self, tol: float = COMPLETENESS_TOL) -> bool:
        return self.completeness_deviation <= tol

    def effect_matrices(self) -> np.ndarray:
        """Dense rank-1 effect operators |a^eta><a^eta|, shape (n, d, d)."""
        return np.einsum("ej,ek->ejk", self.effects, self.effects.conj())


@dataclass(frozen=True)
class MbsDevice:
    """A multiport transfer matrix together with its unitarity bookkeeping."""

    u: np.ndarray
    unitarity_deviation: float
    reunitarized: bool = False
    replacement_distance: float = 0.0

    @property
    def n_ports(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class PovmFamily:
    """A choice of connected inputs plus the input phases (phase 0 gauged out)."""

    subset: tuple
    phases: np.ndarray

    def __post_init__(self):
        subset = tuple(int(s) for s in self.subset)
        if len(subset) < 2 or any(b <= a for a, b in zip(subset, subset[1:])):
            raise InvalidInput(f"subset must be strictly increasing with >= 2 entries, got {subset}")
        if subset[0] < 1:
            raise InvalidInput("subset indices are 1-based")
        phases = np.asarray(self.phases, dtype=float)
        if phases.shape != (len(subset),):
            raise InvalidInput(f"need one phase per connected input, got shape {phases.shape}")
        if abs(phases[0]) > 0:
            raise InvalidInput("the first phase is the gauge and must be 0")
        phases = np.mod(phases, 2.0 * np.pi)
        phases.setflags(write=False)
        object.__setattr__(self, "subset", subset)
        object.__setattr__(self, "phases", phases)


def load_mbs(matrix, reunitarize: bool = True) -> MbsDevice:
    """Ingest a device transfer matrix, optionally projecting to the nearest unitary."""
    u = check_square_matrix(matrix, "device matrix")
    if u.shape[0] < 2:
        raise InvalidInput("device must have at least 2 ports")
    svals = np.linalg.svd(u, compute_uv=False)
    if svals.min() < 1e-6:
        raise DegenerateInput(f"device matrix is rank deficient (smallest singular value {svals.min():.3e})")
    deviation = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))
    if not reunitarize:
        return MbsDevice(u=u, unitarity_deviation=deviation)
    w, _ = polar(u)
    distance = float(np.linalg.norm(u - w, 2))
    return MbsDevice(u=w, unitarity_deviation=deviation, reunitarized=True,
                     replacement_distance=distance)


def enumerate_families(n_ports: int, dim: int) -> list:
    """All size-``dim`` input subsets of ``1..n_ports`` in lexicographic order."""
    if dim < 2 or dim > n_ports:
        raise InvalidInput(f"need 2 <= dim <= n_ports, got dim={dim}, n_ports={n_ports}")
    return [tuple(c) for c in combinations(range(1, n_ports + 1), dim)]


def gauge_fix_effects(raw: np.ndarray) -> np.ndarray:
    """Rotate each effect's global phase so its anchor coefficient is real >= 0.

    The anchor is the leading coefficient, or the first coefficient of
    magnitude above 1e-12 when the leading one vanishes; all-zero effects
    are left untouched.
    """
    fixed = np.array(raw, dtype=complex)
    for eta in range(fixed.shape[0]):
        row = fixed[eta]
        anchor = row[0]
        if abs(anchor) <= GAUGE_FLOOR:
            above = np.nonzero(np.abs(row) > GAUGE_FLOOR)[0]
            if above.size == 0:
                continue
            anchor = row[above[0]]
        fixed[eta] = row * np.exp(-1j * np.angle(anchor))
    return fixed


def _raw_family_effects(u: np.ndarray, subset, phases) -> np.ndarray:
    cols = np.asarray(subset, dtype=int) - 1
    return np.conj(u[:, cols] * np.exp(1j * np.asarray(phases, dtype=float))[None, :])


def effects_from_family(mbs: MbsDevice, family, phases=None) -> Povm:
    """Build the D-outcome POVM for a connected-input family of the device.

    ``family`` is a :class:`PovmFamily` or a plain subset (then ``phases``
    defaults to zero). A POVM whose completeness deviation exceeds 1e-6 is
    still returned, with a warning; this happens for raw experimental
    matrices that were not re-unitarized.
    """
    if isinstance(family, PovmFamily):
        subset, phases = family.subset, family.phases
    else:
        subset = tuple(int(s) for s in family)
        phases = np.zeros(len(subset)) if phases is None else np.asarray(phases, dtype=float)
    if min(subset) < 1 or max(subset) > mbs.n_ports:
        raise InvalidInput(f"subset {subset} is out of range for a {mbs.n_ports}-port device")
    raw = _raw_family_effects(mbs.u, subset, phases)
    povm = Povm(gauge_fix_effects(raw))
    if not povm.is_complete():
        warnings.warn(
            f"POVM for subset {subset} deviates from completeness by "
            f"{povm.completeness_deviation:.3e}; consider re-unitarizing the device",
            stacklevel=2,
        )
    return povm


def _family_c_norm(u: np.ndarray, subset, phases, kind: str) -> float:
    eff = gauge_fix_effects(_raw_family_effects(u, subset, phases))
    block = eff[:, 1:]
    return matrix_norm(block.T @ block, kind)


def optimize_phases(mbs: MbsDevice, subset, n_starts: int = 32, seed: int = 0,
                    maxiter: int = 2000, tol: float = 1e-8,
                    norm_kind: str = "spectral"):
    """Minimize the C-matrix norm of a family over its input phases.

    Derivative-free local search (Nelder-Mead) from ``n_starts`` uniform
    random phase vectors plus the zero vector; the first phase is the gauge
    and stays 0. Returns ``(PovmFamily, best_norm)``; deterministency follows
    from the seed. The zero start guarantees the result never exceeds the
    zero-phase norm.
    """
    subset = tuple(int(s) for s in subset)
    d = len(subset)
    rng = np.random.default_rng(seed)

    def objective(x):
        return _family_c_norm(mbs.u, subset, np.concatenate(([0.0], x)), norm_kind)

    starts = [np.zeros(d - 1)]
    starts.extend(rng.uniform(0.0, 2.0 * np.pi, size=(n_starts, d - 1)))
    best_x = starts[0]
    best_val = objective(best_x)
    for x0 in starts:
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": tol, "fatol": tol, "maxiter": maxiter})
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    family = PovmFamily(subset=subset, phases=np.concatenate(([0.0], np.mod(best_x, 2.0 * np.pi))))
    return family, float(best_val)


def haar_random_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed n x n unitary via a Ginibre matrix and phase-corrected QR."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_random_povm(dim: int, n_outcomes: int, rng) -> Povm:
    """Random complete rank-1 POVM from the first ``dim`` columns of a Haar unitary."""
    if n_outcomes < dim:
        raise InvalidInput("need n_outcomes >= dim for completeness")
    u = haar_random_unitary(n_outcomes, rng)
    return Povm(gauge_fix_effects(u[:, :dim]))


def haar_mean_c_norm(dim: int, n_outcomes: int, samples: int, rng,
                     kind: str = "spectral", gauge_fixed: bool = False):
    """Monte Carlo mean and standard error of the C norm over Haar POVMs.

    By default the norm is evaluated on the raw Haar coefficient rows, i.e.
    before the leading-coefficient phase gauge is applied; this is the
    published baseline convention for random measurements. With
    ``gauge_fixed=True`` the statistic is ``c_norm`` of the gauged POVM
    instead (a larger number for the same ensemble).
    """
    if samples < 100:
        raise InvalidInput("need at least 100 samples for a stable baseline")
    vals = np.empty(samples)
    for i in range(samples):
        u = haar_random_unitary(n_outcomes, rng)
        if gauge_fixed:
            vals[i] = c_norm(Povm(gauge_fix_effects(u[:, :dim])), kind)
        else:
            block = u[:, 1:dim]
            vals[i] = matrix_norm(block.T @ block, kind)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))
