"""Policy-gradient Boltzmann learning on noisy Ising-machine energy oracles,
with Markov chain baselines and evaluation metrics."""

from .brain import BrainConfig, noise_variance_delta, temperature_sweep, train, train_gmm
from .errors import CapacityError, ConfigError, DimensionError, DivergenceError, UnsupportedError
from .hamiltonians import (
    Chain1D,
    CurieWeiss,
    DenseCoupling,
    DoubleWell,
    ExactDistribution,
    NearestNeighbor2D,
    SpinConfig,
    enumerate_boltzmann,
    energy,
    magnetization,
)
from .kernels import BACKEND
from .mcmc import (
    McmcConfig,
    PtConfig,
    averaged_metropolis,
    metropolis_chain,
    parallel_tempering,
    simulated_annealing,
)
from .oracle import NoisyOracle
from .records import RunRecord
from .variational import BernoulliField, GaussianMixture1D

__version__ = "0.1.0"
