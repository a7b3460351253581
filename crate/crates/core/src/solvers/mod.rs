//! Collocation for the fractional ODE, method of lines for the Riesz PDE,
//! and a finite-difference reference.

pub mod fd;
pub mod linalg;
pub mod mol;
pub mod ode;
pub mod rk;

pub use fd::{gl_fd_oracle, gl_fd_solve, FdResult};
pub use linalg::{DenseLu, CONDITION_WARNING};
pub use mol::{
    assemble_riesz_matrix, build_lagrange_basis, mol_integrate, mol_solve, EntrySource, InitialProfile, MOLProblem,
    MOLSystem, Trajectory,
};
pub use ode::{
    build_collocation_system, ode_solution_derivative, ode_solution_eval, solve_dense, CollocationSystem, FracODEProblem,
    Forcing,
};
