"""Drazin-inverse solutions of singular linear systems.

Restarted DGMRES and its eigenvector-augmented variant ADGMRES, a
self-contained dense complex linear-algebra kernel, and an independent
elimination-based Drazin-inverse oracle for verification.
"""

from .adgmres import (
    AugmentedSystem,
    RitzExtractionError,
    RitzSet,
    adgmres_cycle,
    adgmres_restarted,
    augment_basis,
    build_h_chain,
    ritz_pairs,
)
from .densela import (
    EigenConvergenceError,
    RankDeficientError,
    hessenberg_eig,
    matvec,
    mgs_orthogonalize,
    power_apply,
    qr_factor,
    rank_of,
    solve_upper_triangular,
)
from .dgmres import (
    CycleRecord,
    CycleResult,
    KrylovBasis,
    RunHistory,
    SolverConfig,
    ZeroSeedError,
    build_krylov,
    dgmres_cycle,
    dgmres_restarted,
    stacked_hessenberg,
)
from .oracle import (
    DrazinAxiomError,
    DrazinFactors,
    drazin_inverse,
    drazin_solution,
    index_of,
    one_inverse,
)
from .problems import (
    EXAMPLE_IDS,
    MatrixMarketError,
    ProblemSpec,
    apply_similarity,
    generate_example,
    load_matrix_market,
    load_vector,
)
from .report import (
    FairnessWarning,
    RunReport,
    RunSpec,
    export_history,
    export_plot_data,
    run_compare,
    run_solvers,
    stagnation_flag,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedSystem",
    "CycleRecord",
    "CycleResult",
    "DrazinAxiomError",
    "DrazinFactors",
    "EXAMPLE_IDS",
    "EigenConvergenceError",
    "FairnessWarning",
    "KrylovBasis",
    "MatrixMarketError",
    "ProblemSpec",
    "RankDeficientError",
    "RitzExtractionError",
    "RitzSet",
    "RunHistory",
    "RunReport",
    "RunSpec",
    "SolverConfig",
    "ZeroSeedError",
    "adgmres_cycle",
    "adgmres_restarted",
    "apply_similarity",
    "augment_basis",
    "build_h_chain",
    "build_krylov",
    "dgmres_cycle",
    "dgmres_restarted",
    "drazin_inverse",
    "drazin_solution",
    "export_history",
    "export_plot_data",
    "generate_example",
    "hessenberg_eig",
    "index_of",
    "load_matrix_market",
    "load_vector",
    "matvec",
    "mgs_orthogonalize",
    "one_inverse",
    "power_apply",
    "qr_factor",
    "rank_of",
    "ritz_pairs",
    "run_compare",
    "run_solvers",
    "solve_upper_triangular",
    "stacked_hessenberg",
    "stagnation_flag",
]
