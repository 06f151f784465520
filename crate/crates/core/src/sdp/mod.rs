//! Conic problem representation, the interior-point solver and the
//! purification-fidelity programs built on them.

pub mod build;
pub mod problem;
pub mod solver;

pub use build::{
    build_primal, build_program, dual_residuals, solve_fidelity, solve_fidelity_with, solve_program,
    BuildOptions, ClassDual, DualPoint, DualResiduals, FidelityOptions, FidelityProgram, FidelitySolution,
};
pub use problem::{BlockTerm, ConicProblem, LinearFunctional, PsdBlock, RowGroup, RowKind, Sense};
pub use solver::{l1_min, solve, SolveReport, SolveStatus, SolverOptions};
