"""Numerical laboratory for the quantum arrival-time problem.

Builds crossing and non-crossing history branches for free wave packets,
evaluates decoherence functionals and quasi-probabilities, compares them
with the integrated probability current, and constructs negative-momentum
backflow states that break decoherence.
"""

from .backflow import (
    BackflowKernel,
    InterferenceWitness,
    backflow_state,
    build_kernel,
    interference_witness,
    min_eigenvalue,
    natural_momentum_scale,
)
from .current import (
    CurrentTrace,
    current_at_origin,
    current_trace,
    integrated_current,
    semiclassical_crossing_probability,
)
from .errors import ConfigError, NumericalError
from .histories import (
    BranchSet,
    DecoherenceReport,
    HistoryPartition,
    coarse_grain,
    decoherence_analysis,
    exact_branches,
    first_crossing_branch,
    first_crossing_branches,
    non_crossing_branch,
    semiclassical_branches,
    zeno_reflection_scan,
)
from .qgrid import (
    Grid,
    WaveFunction,
    free_evolve,
    inner,
    make_grid,
    momentum_probabilities,
    norm,
    norm_sq,
    project_negative,
    project_positive,
    required_half_width,
)
from .states import (
    GaussianSpec,
    gaussian,
    negative_momentum_fraction,
    overlap_matrix,
    superpose,
)
from .timescales import (
    TimescaleReport,
    packet_arrival_time,
    packet_zeno_time,
    regime_check,
    zeno_time_general,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BackflowKernel",
    "BranchSet",
    "ConfigError",
    "CurrentTrace",
    "DecoherenceReport",
    "GaussianSpec",
    "Grid",
    "HistoryPartition",
    "InterferenceWitness",
    "NumericalError",
    "TimescaleReport",
    "WaveFunction",
    "backflow_state",
    "build_kernel",
    "coarse_grain",
    "current_at_origin",
    "current_trace",
    "decoherence_analysis",
    "exact_branches",
    "first_crossing_branch",
    "first_crossing_branches",
    "free_evolve",
    "gaussian",
    "inner",
    "integrated_current",
    "interference_witness",
    "make_grid",
    "min_eigenvalue",
    "momentum_probabilities",
    "natural_momentum_scale",
    "negative_momentum_fraction",
    "non_crossing_branch",
    "norm",
    "norm_sq",
    "overlap_matrix",
    "packet_arrival_time",
    "packet_zeno_time",
    "project_negative",
    "project_positive",
    "regime_check",
    "required_half_width",
    "semiclassical_branches",
    "semiclassical_crossing_probability",
    "superpose",
    "zeno_reflection_scan",
    "zeno_time_general",
]
