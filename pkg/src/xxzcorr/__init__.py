"""Correlation measures for the two-qubit XXZ chain with DM interaction."""
from .closedform import (
    dynamics_psi1,
    dynamics_psi2,
    thermal_cc_qd,
    thermal_concurrence,
    thermal_correlations,
    thermal_gmd,
)
from .measures import (
    CorrelationSet,
    ProjectiveMeasurement,
    classical_correlation,
    concurrence,
    correlation_set,
    gmd,
    gmd_bruteforce,
    quantum_discord,
)
from .model import SpinParams, bell_state, build_hamiltonian, gibbs_state, ground_state, milburn_evolve

__version__ = "0.1.0"
