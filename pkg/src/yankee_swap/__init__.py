"""Fair allocation of indivisible goods under matroid rank valuations.

The engine repeatedly picks the agent with the highest gain under a justice
criterion and hands it one more unit of utility by augmenting along a
shortest exchange-graph path, so every run touches each valuation through a
counted query oracle.
"""

from .criteria import FairShare, Harmonic, Leximin, Lorenz, Nash, PMean, check_gain_conditions, gain
from .engine import Agent, Instance, RunResult, replay_check, run, run_mechanism
from .exchange import Allocation, augment, find_desired, get_distances
from .oracles import brute_force_optimum, check_efx, check_wef1, compute_mms, max_usw
from .valuations import (
    CappedRelevant,
    ExplicitTable,
    Graphic,
    Partition,
    Transversal,
    check_mrf,
    counter,
    f_T,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "Allocation",
    "CappedRelevant",
    "ExplicitTable",
    "FairShare",
    "Graphic",
    "Harmonic",
    "Instance",
    "Leximin",
    "Lorenz",
    "Nash",
    "PMean",
    "Partition",
    "RunResult",
    "Transversal",
    "augment",
    "brute_force_optimum",
    "check_efx",
    "check_gain_conditions",
    "check_mrf",
    "check_wef1",
    "compute_mms",
    "counter",
    "f_T",
    "find_desired",
    "gain",
    "get_distances",
    "max_usw",
    "replay_check",
    "run",
    "run_mechanism",
]
