"""Look Ahead Hamiltonian Monte Carlo."""

from .chain import ChainRecord, ChainRecorder, ChainStreams, run_chain, sample_chains
from .core import ContractError, EvalCounter, PhaseState, TargetModel, joint_energy, log_prob_ratio
from .diagnostics import (AutocorrCurve, autocorrelation, evals_to_threshold, grid_search,
                          mixing_time, transition_fractions)
from .integrator import (LeapfrogParams, beta_from_alpha, flip, leapfrog, leapfrog_step,
                         randomize_momentum)
from .oracle import pi_bruteforce
from .sampler import (FLIP, SamplerConfig, TransitionOutcome, hmc_step, ladder_probabilities,
                      lahmc_step, leap_probabilities, pi_flip)
from .targets import AnisotropicGaussian, RoughWell, get_target, standard_targets

__version__ = "0.1.0"
