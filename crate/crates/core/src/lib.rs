//! Exact LASSO solution paths and diagonal-dominance certificates.
//!
//! The solver computes the full piecewise-linear path of
//! `min 0.5 ||y - A u||^2 + lambda ||u||_1` by walking lambda down from
//! `||Aᵀy||_inf`, recording a breakpoint at every support change. The
//! certificate side classifies diagonal dominance of `(AᵀA)⁻¹` and related
//! conditions (coherence bounds, k-step guarantees, positive-cone tests)
//! that make the path's active set grow monotonically, so the breakpoints
//! read as a sparsity-vs-residual trade-off curve. A total-variation module
//! maps 1-d fused problems onto the same path solver, and an ensemble module
//! estimates how often random dictionaries satisfy the dominance condition.
//!
//! Entry points: [`homotopy::solve_path`], [`conditions::check_gram_inverse_dominance`],
//! [`tv::solve_tv_path`], [`ensemble::run_frequency_study`].

pub mod conditions;
pub mod ensemble;
pub mod error;
pub mod homotopy;
pub mod io;
pub mod matrix;
pub mod tv;

pub use conditions::{
    check_coherence_bound, check_gram_inverse_dominance, check_gram_inverse_dominance_eps,
    check_kstep_bound, check_positive_cone, check_positive_cone_gram,
    verify_positive_cone_equivalence, ConditionReport, PositiveConeOpts,
};
pub use ensemble::{
    default_sweep_specs, run_frequency_study, run_frequency_study_allow_wide,
    run_frequency_study_with_sampler, sample_matrix, EnsembleSpec, FrequencyReport,
    MatrixDistribution,
};
pub use error::{Error, Result};
pub use homotopy::{
    fixed_support_solve, least_squares_check, monotonicity_audit, oracle_solve, solve_path,
    subgradient_check, verify_path, AuditIssue, AuditReport, Breakpoint, Event, LassoProblem,
    PathOpts, PathVerification, SolutionPath,
};
pub use matrix::{
    cholesky, classify_dominance, classify_dominance_eps, gram, invert_spd,
    inverse_of_submatrix_inverse, mutual_coherence, principal_submatrix, schur_reduce_last,
    spd_pivot_floor, Cholesky, DenseMatrix, DominanceClass, IndexSet,
};
pub use tv::{
    check_operator_dominance, first_difference_matrix, recover_x, reformulate, solve_tv_path,
    tv_stationarity_check, TvPath, TvProblem, TvTransform,
};
