"""Global-fidelity limits of state-dependent copying of mixed quantum states.

Library layout:

* :mod:`clonebound.linalg`   dense complex primitives (eig, PSD root,
  Kronecker products, partial trace)
* :mod:`clonebound.states`   density matrices, ensembles, copying
  problems, purifications, sufficient-ancilla construction
* :mod:`clonebound.metrics`  fidelity, angles, distinguishability bounds
* :mod:`clonebound.bounds`   closed-form global-fidelity limits and the
  refined joint program
* :mod:`clonebound.cloner`   numerical copying machines and searches
* :mod:`clonebound.cli`      command-line front end
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    PairAngles,
    PairResidual,
    PairTerm,
    RefinedBound,
    Regime,
    asymptotic_bound,
    asymptotic_value,
    cos2_pair_max,
    equal_prior_bound,
    multi_state_bound,
    refined_bound,
    tightness_gap,
    two_state_bound,
)
from .cloner import (
    CloneMachine,
    SearchResult,
    SweepReport,
    apply,
    global_fidelity,
    identity_machine,
    machine_from_params,
    optimize,
    verify_bound_sweep,
)
from .errors import (
    ArityError,
    CloneboundError,
    DegenerateFidelityError,
    DegenerateStatesError,
    DimensionMismatchError,
    InvalidEffectError,
    NonSquareError,
    NonUnitaryError,
    NotHermitianError,
    NotPSDError,
    ProblemFormatError,
    RangeError,
    TraceNotOneError,
)
from .linalg import (
    HermitianEig,
    eig_hermitian,
    kron,
    partial_trace,
    sqrt_psd,
    tensor_power,
)
from .metrics import (
    Angle,
    angle,
    angle_from_fidelity,
    check_triangle,
    fidelity,
    fidelity_product,
    measurement_deviation_bound,
    monotonicity_check,
)
from .problems import load_problem, problem_from_dict, problem_to_dict, save_problem
from .states import (
    CloningProblem,
    DensityMatrix,
    Ensemble,
    Purification,
    SufficientAncilla,
    optimal_purification_pair,
    pure_state,
    purify,
    sufficient_ancilla,
    validate,
)
