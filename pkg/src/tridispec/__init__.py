"""O(n) spectra of tridiagonal matrices with arbitrary boundary rows."""
from .errors import (
    BracketCountMismatch,
    CountMismatch,
    DegeneracyError,
    DegenerateCircleRoot,
    DimensionTooSmall,
    HypothesisViolation,
    LengthMismatch,
    NoRootInInterval,
    OracleNonConvergence,
    PoleAtZ,
    SizeCap,
    SpectrumBoundViolation,
    TridiagError,
    ZeroVector,
)
from .kernel import (
    AuxiliaryFunction,
    BoundaryParams,
    PolyEval,
    RootClassification,
    classify_roots,
    eval_g,
    eval_H,
    reduce_degenerate,
    residual_norm,
)
from .regular import (
    Bracket,
    RegularRoot,
    SolverOptions,
    bisect_phase_root,
    contraction_refine,
    find_brackets,
    inverse_branch,
    phase_function,
    regular_roots,
)
from .special import SpecialRoot, refine_on_H, special_eigenvalues, special_roots
from .spectrum import Eigenpair, SpectrumResult, detect_pm2, eigenvector, solve_spectrum
from .transform import (
    ConjugationData,
    GeneralTridiagonal,
    flocking_matrix,
    map_eigenpair,
    to_canonical,
    toeplitz,
)
from .oracle import DenseMatrix, assemble_dense, dense_eigenvalues, match_spectra
from .applications import (
    AdvDiffSystem,
    FailureSpec,
    advdiff_build,
    advdiff_spectrum,
    failure_region_samples,
    leading_eigenvalue_asymptotic,
    pbc_failure,
)

__version__ = "0.1.0"
