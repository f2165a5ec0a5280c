"""Point tomography: near-Fisher-symmetric measurement design, finite-ensemble
simulation, and local maximum-likelihood state estimation for qudits."""

__version__ = "0.1.0"

from .errors import (ConsistencyError, DegenerateInput, InvalidInput,
                     NumericalError, PointTomoError, SweepError)
from .estimator import (BootstrapResult, FitResult, MleConfig, PointTomographyMLE,
                        bootstrap_infidelity, estimate_state, estimate_theta,
                        fit_power_law)
from .fisher import (FisherBlocks, asymptotic_infidelity_coefficient, c_matrix,
                     c_norm, cfim_first_order, cfim_numeric, gill_massar_wmse,
                     gm_inequality_lhs, gm_optimal_cfim, gm_optimal_wmse, qfim_pure)
from .povm import (MbsDevice, Povm, PovmFamily, effects_from_family,
                   enumerate_families, gauge_fix_effects, haar_mean_c_norm,
                   haar_random_povm, haar_random_unitary, load_mbs, optimize_phases)
from .simulate import (NoiseConfig, SweepConfig, SweepResult, TrialResult,
                       config_hash, expected_infidelity_floor, perturb_effects,
                       prepared_state, run_sweep, run_trial, sample_counts, trial_rng)
from .states import (DensityMatrix, StateVector, born_probabilities, depolarize,
                     equal_deviation_state, fiducial_state, fidelity,
                     neighborhood_state)

__all__ = [name for name in dir() if not name.startswith("_")]
