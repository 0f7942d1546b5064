"""Entanglement and maximum extractable entanglement of two qubits in thermal
and squeezed baths."""
from .baths import BathKind, BathModel, analytic_independent, dfs_states, lindblad_rhs, x_rhs
from .dynamics import EventReport, Trajectory, detect_events, integrate, integrate_full
from .entanglement import (
    BellDiagonalState,
    concurrence,
    concurrence_bell_diagonal,
    concurrence_x_state,
    ppt_min_eigenvalue,
)
from .filtering import (
    LocalFilter,
    OptimalBoost,
    apply_filter,
    filtered_concurrence,
    max_extractable_entanglement,
    minimize_F_oracle,
    optimal_bell_state,
    optimal_boost,
    optimal_filtering,
    partial_extraction,
)
from .qstate import XStateParams, extract_x_params, von_neumann_entropy

__version__ = "0.1.0"
