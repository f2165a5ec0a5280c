"""Estimation-theoretic quantities in the complex parametrization.

Information matrices over theta = [theta_1, ..., theta_{d-1}] in C^(d-1) are
handled through their two defining blocks: a Hermitian block (classical I or
quantum J) and a complex-symmetric block (P or Q). The assembled
2(d-1) x 2(d-1) matrix is ``[[B, S], [S*, B*]]``.

Conventions, fixed once for the whole library:

* block derivatives are Wirtinger derivatives with respect to theta_j,
  so the first-order classical blocks of a complete rank-1 POVM with
  real-gauged leading coefficients are I = identity and P = conj(C);
* C is the gauge-fixed coefficient Gram matrix without conjugation,
  C_jk = sum_eta a_j^eta a_k^eta for j, k >= 1, whose norm measures the
  distance of the measurement from Fisher symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DegenerateInput, InvalidInput, NumericalError
from .states import neighborhood_state, pure_probabilities
from .validation import check_local_parameters

BLOCK_TOL = 1e-10
PSD_TOL = -1e-9
COMPLETENESS_TOL = 1e-6
PROBABILITY_FLOOR = 1e-12

NORM_KINDS = ("spectral", "frobenius")


@dataclass(frozen=True)
class FisherBlocks:
    """Two-block representation of a CFIM or QFIM.

    ``diag_block`` is the Hermitian block (I for classical, J for quantum);
    ``off_block`` is the complex-symmetric one (P, respectively Q).
    """

    diag_block: np.ndarray
    off_block: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag_block, dtype=complex)
        o = np.asarray(self.off_block, dtype=complex)
        if d.shape != o.shape or d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidInput(f"blocks must be equal square matrices, got {d.shape} and {o.shape}")
        if np.max(np.abs(d - d.conj().T)) > BLOCK_TOL:
            raise ConsistencyError("diagonal block is not Hermitian within 1e-10")
        if np.max(np.abs(o - o.T)) > BLOCK_TOL:
            raise ConsistencyError("off-diagonal block is not symmetric within 1e-10")
        d.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "diag_block", d)
        object.__setattr__(self, "off_block", o)
        evals = np.linalg.eigvalsh(self.assembled())
        if evals.min() < PSD_TOL:
            raise ConsistencyError(f"assembled information matrix has eigenvalue {evals.min()}")

    @property
    def n_params(self) -> int:
        return self.diag_block.shape[0]

    def assembled(self) -> np.ndarray:
        """Full 2(d-1) x 2(d-1) information matrix [[B, S], [S*, B*]]."""
        top = np.hstack([self.diag_block, self.off_block])
        bottom = np.hstack([self.off_block.conj(), self.diag_block.conj()])
        return np.vstack([top, bottom])


def _chart_derivatives(theta: np.ndarray):
    """Holomorphic/antiholomorphic derivative kets of the chart state."""
    v = np.concatenate(([1.0 + 0.0j], theta))
    nsq = float(np.real(np.vdot(v, v)))
    n = np.sqrt(nsq)
    holo = []   # d|psi>/d theta_a
    anti = []   # d|psi>/d conj(theta_a)
    for a, t in enumerate(theta):
        e = np.zeros(v.size, dtype=complex)
        e[a + 1] = 1.0
        holo.append(e / n - v * (np.conj(t) / (2.0 * n * nsq)))
        anti.append(-v * (t / (2.0 * n * nsq)))
    return v / n, holo, anti


def qfim_pure(theta, dim: int | None = None) -> FisherBlocks:
    """Quantum Fisher information blocks of the pure chart state at ``theta``.

    At theta = 0 this is J = 2 * identity, Q = 0.
    """
    theta = check_local_parameters(theta, dim)
    psi, holo, anti = _chart_derivatives(theta)
    proj = np.eye(psi.size) - np.outer(psi, psi.conj())
    m = theta.size
    jblk = np.empty((m, m), dtype=complex)
    qblk = np.empty((m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            jblk[j, k] = 2.0 * (holo[k].conj() @ proj @ holo[j]
                                + anti[j].conj() @ proj @ anti[k])
            qblk[j, k] = 2.0 * (anti[k].conj() @ proj @ holo[j]
                                + anti[j].conj() @ proj @ holo[k])
    # scrub rounding residue off the structural symmetries
    jblk = 0.5 * (jblk + jblk.conj().T)
    qblk = 0.5 * (qblk + qblk.T)
    return FisherBlocks(jblk, qblk)


def _require_gauged_complete(povm):
    if povm.completeness_deviation > COMPLETENESS_TOL:
        raise InvalidInput(
            f"POVM completeness deviates by {povm.completeness_deviation:.3e} "
            f"(> {COMPLETENESS_TOL}); re-unitarize the device or fix the effects"
        )
    lead = povm.effects[:, 0]
    if np.max(np.abs(lead.imag)) > 1e-9 or lead.real.min() < -1e-9:
        raise InvalidInput("POVM effects are not phase-fixed (leading coefficients must be real nonnegative)")


def c_matrix(povm) -> np.ndarray:
    """Gauge-fixed coefficient Gram matrix C_jk = sum_eta a_j^eta a_k^eta (j,k >= 1)."""
    _require_gauged_complete(povm)
    block = povm.effects[:, 1:]           # (n_outcomes, d-1)
    return block.T @ block


def c_norm(povm, kind: str = "spectral") -> float:
    """Norm of the C matrix; ``spectral`` (largest singular value) or ``frobenius``."""
    if kind not in NORM_KINDS:
        raise InvalidInput(f"norm kind must be one of {NORM_KINDS}, got {kind!r}")
    c = c_matrix(povm)
    return float(np.linalg.norm(c, 2 if kind == "spectral" else "fro"))


def matrix_norm(mat: np.ndarray, kind: str = "spectral") -> float:
    """Same norm choice applied to an arbitrary matrix."""
    if kind not in NORM_KINDS:
        raise InvalidInput(f"norm kind must be one of {NORM_KINDS}, got {kind!r}")
    return float(np.linalg.norm(mat, 2 if kind == "spectral" else "fro"))


def cfim_first_order(povm) -> FisherBlocks:
    """Classical Fisher information blocks at the fiducial point, first order.

    For a complete, gauge-fixed rank-1 POVM these are I = identity and
    P = conj(C) exactly.
    """
    c = c_matrix(povm)
    return FisherBlocks(np.eye(c.shape[0]), c.conj())


def cfim_numeric(povm, theta, step: float = 1e-5) -> FisherBlocks:
    """Classical Fisher information blocks at ``theta`` by central differences.

    Wirtinger derivatives of ln f(omega|theta) are built from separate real
    and imaginary part steps. Outcomes with probability below 1e-12 at the
    evaluation point are excluded from the sums.
    """
    if not 0.0 < step <= 1e-3:
        raise InvalidInput(f"step must lie in (0, 1e-3], got {step}")
    theta = check_local_parameters(theta, povm.dim)
    effects = povm.effects

    def log_probs(th):
        p = pure_probabilities(effects, neighborhood_state(th).amps)
        return np.log(np.maximum(p, PROBABILITY_FLOOR))

    f = pure_probabilities(effects, neighborhood_state(theta).amps)
    keep = f >= PROBABILITY_FLOOR
    if not np.any(keep):
        raise DegenerateInput("all outcome probabilities are below the floor")

    m = theta.size
    deriv = np.empty((m, f.size), dtype=complex)
    for j in range(m):
        e = np.zeros(m, dtype=complex)
        e[j] = 1.0
        d_re = (log_probs(theta + step * e) - log_probs(theta - step * e)) / (2.0 * step)
        d_im = (log_probs(theta + 1j * step * e) - log_probs(theta - 1j * step * e)) / (2.0 * step)
        deriv[j] = 0.5 * (d_re - 1j * d_im)

    w = f[keep]
    dk = deriv[:, keep]
    iblk = np.einsum("w,jw,kw->jk", w, dk, dk.conj())
    pblk = np.einsum("w,jw,kw->jk", w, dk, dk)
    iblk = 0.5 * (iblk + iblk.conj().T)
    pblk = 0.5 * (pblk + pblk.T)
    return FisherBlocks(iblk, pblk)


def gill_massar_wmse(d: int, n_exp: int) -> float:
    """Minimal mean infidelity (d - 1) / N for separable measurements."""
    if d < 2 or n_exp < 1:
        raise InvalidInput("need d >= 2 and n_exp >= 1")
    return (d - 1) / n_exp


def gm_inequality_lhs(cfim: FisherBlocks, qfim: FisherBlocks) -> float:
    """tr(I_hat J_hat^-1) over the assembled matrices; bounded by d - 1."""
    jm = qfim.assembled()
    cond = np.linalg.cond(jm)
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericalError(f"quantum information matrix is ill conditioned (cond={cond:.3e})")
    val = np.trace(cfim.assembled() @ np.linalg.inv(jm))
    return float(val.real)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    evals, vecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    return (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ vecs.conj().T


def gm_optimal_wmse(qfim: FisherBlocks, weight: np.ndarray, n_exp: int) -> float:
    """Optimal weighted mean square error under the trace constraint.

    For weight = J_hat / 4 (the infidelity weighting) this reduces to
    (d - 1) / n_exp.
    """
    if n_exp < 1:
        raise InvalidInput("n_exp must be >= 1")
    jm = qfim.assembled()
    m = qfim.n_params
    jinv_sqrt = np.linalg.inv(_psd_sqrt(jm))
    inner = _psd_sqrt(jinv_sqrt @ weight @ jinv_sqrt)
    return float((np.trace(inner).real ** 2) / (m * n_exp))


def gm_optimal_cfim(qfim: FisherBlocks, weight: np.ndarray) -> np.ndarray:
    """Classical information matrix attaining the optimal weighted error.

    For weight = J_hat / 4 this is J_hat / 2.
    """
    jm = qfim.assembled()
    m = qfim.n_params
    j_sqrt = _psd_sqrt(jm)
    jinv_sqrt = np.linalg.inv(j_sqrt)
    inner = _psd_sqrt(jinv_sqrt @ weight @ jinv_sqrt)
    return m * j_sqrt @ (inner / np.trace(inner).real) @ j_sqrt


def asymptotic_infidelity_coefficient(povm) -> float:
    """Large-N mean infidelity coefficient of an efficient estimator.

    For a complete rank-1 measurement with C-matrix singular values s_i the
    mean infidelity of the maximum-likelihood estimate approaches
    ``sum_i 1 / (1 - s_i^2) / N``;  it equals (d - 1)/N exactly when the
    measurement is Fisher symmetric (C = 0).
    """
    s = np.linalg.svd(c_matrix(povm), compute_uv=False)
    if s.max() >= 1.0 - 1e-9:
        raise DegenerateInput("measurement is not locally informationally complete (||C|| >= 1)")
    return float(np.sum(1.0 / (1.0 - s ** 2)))
