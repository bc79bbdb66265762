"""Nonparametric estimation of controlled Markov chain transition matrices."""

from ._backend import BACKEND
from .model import CmcModel, stationary_distribution, validate_model
from .policies import DeterministicSchedule, Episodic, Greedy, NonStationaryMarkov, StationaryRandomized
from .simulate import Trajectory, simulate, simulate_via_array_scheme

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CmcModel", "stationary_distribution", "validate_model", "DeterministicSchedule", "Episodic",
    "Greedy", "NonStationaryMarkov", "StationaryRandomized", "Trajectory", "simulate", "simulate_via_array_scheme",
]
