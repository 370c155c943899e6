"""SIR simulation on graphs and trees, bridge-based estimation of the
infection and recovery rates, branching-process analytics and the
mean-field non-identifiability demo."""
from .graph import Graph, SubgraphView, ball, bridges, random_regular
from .sir import SirParams, Trajectory, simulate, simulate_gillespie, simulate_tree
from .estimator import CiParams, EstimateOutcome, estimate, estimate_tree
from .branching import OffspringDist, extinction_probability
from .meanfield import MeanFieldParams, integrate

__all__ = [
    "Graph", "SubgraphView", "ball", "bridges", "random_regular",
    "SirParams", "Trajectory", "simulate", "simulate_gillespie", "simulate_tree",
    "CiParams", "EstimateOutcome", "estimate", "estimate_tree",
    "OffspringDist", "extinction_probability",
    "MeanFieldParams", "integrate",
]
