"""SU(4) symmetric-basis master-equation solver.

N identical two-level atoms coupled to one lossy cavity mode, with individual
atomic decay, pumping and dephasing, solved in the permutation-symmetric
Liouville basis whose size grows as ``(N+1)(N+2)(N+3)/6`` instead of ``4^N``.
"""

from .basis import BasisLabel, BasisTable, apply_superop, basis_size, casimir_eigenvalue, enumerate_basis
from .dynamics import (EvolveConfig, boundary_population, evolve, initial_state, product_state, sample,
                       steady_state)
from .errors import (CapacityError, ConfigError, ConvergenceError, DegenerateSteadyStateError,
                     NormalizationError, PreconditionError, StiffnessError, SU4Error, TruncationError,
                     UndefinedG2Error, UnphysicalStateError, WindowTooShortError)
from .liouvillian import ModelParams, SparseGenerator, build_generator
from .observables import (CorrelationSeries, correlation, expectations, fwhm, g2_zero, photon_distribution,
                          spectrum, trace_of)
from .oracle import OracleModel
from .projection import BlockDensity, entropy, multiplicities, project_blocks, purity, sm_populations
from .state import CoefficientState

__version__ = "0.1.0"

__all__ = [
    "BasisLabel", "BasisTable", "apply_superop", "basis_size", "casimir_eigenvalue", "enumerate_basis",
    "EvolveConfig", "boundary_population", "evolve", "initial_state", "product_state", "sample",
    "steady_state",
    "CapacityError", "ConfigError", "ConvergenceError", "DegenerateSteadyStateError", "NormalizationError",
    "PreconditionError", "StiffnessError", "SU4Error", "TruncationError", "UndefinedG2Error",
    "UnphysicalStateError", "WindowTooShortError",
    "ModelParams", "SparseGenerator", "build_generator",
    "CorrelationSeries", "correlation", "expectations", "fwhm", "g2_zero", "photon_distribution",
    "spectrum", "trace_of",
    "OracleModel",
    "BlockDensity", "entropy", "multiplicities", "project_blocks", "purity", "sm_populations",
    "CoefficientState",
]
