"""Distributed eigenvector computation for matrices on spatially distributed networks.

Library layout:

- :mod:`sdneig.graph` — immutable graphs, balls/geodesics, geometric generation
- :mod:`sdneig.matrices` — geodesic-width matrices, preconditioners, polynomial filters
- :mod:`sdneig.runtime` — synchronous message-passing simulator and vertex algorithms
- :mod:`sdneig.solvers` — centralized iterations, eigendecomposition oracle, metrics
- :mod:`sdneig.checks` — seeded property suites
- :mod:`sdneig.experiment` — multi-trial experiment harness and CSV output
- :mod:`sdneig.cli` — ``sdneig`` command-line entry point
"""

from .errors import (
    DimensionMismatchError,
    GenerationFailureError,
    InvalidInputError,
    InvalidParameterError,
    InvalidVertexError,
    RangeViolationError,
    SdneigError,
)
from .graph import Graph, random_geometric_graph
from .matrices import (
    DiagonalMatrix,
    GeoMatrix,
    PolyFilter,
    geodesic_width,
    hat_Q,
    hat_Q_sym,
    make_Qc,
    make_Qc_sym,
    normalized_laplacian,
    preconditioner_P,
    schur_norm,
    spline_filter,
)
from .runtime import NetworkSim, run_pgda, run_spgda
from .solvers import (
    dense_hermitian_eig,
    pgda_centralized,
    power_iteration,
    spgda_centralized,
    theorem1_limit,
    theorem2_limit,
)

__version__ = "0.1.0"

__all__ = [
    "DiagonalMatrix",
    "DimensionMismatchError",
    "GenerationFailureError",
    "GeoMatrix",
    "Graph",
    "InvalidInputError",
    "InvalidParameterError",
    "InvalidVertexError",
    "NetworkSim",
    "PolyFilter",
    "RangeViolationError",
    "SdneigError",
    "dense_hermitian_eig",
    "geodesic_width",
    "hat_Q",
    "hat_Q_sym",
    "make_Qc",
    "make_Qc_sym",
    "normalized_laplacian",
    "pgda_centralized",
    "power_iteration",
    "preconditioner_P",
    "random_geometric_graph",
    "run_pgda",
    "run_spgda",
    "schur_norm",
    "spgda_centralized",
    "spline_filter",
    "theorem1_limit",
    "theorem2_limit",
]
