//! Primal-dual Frank-Wolfe solvers for standard-form linear programs
//! `min cᵀx  s.t.  Ax = b, x ≥ 0`.
//!
//! Two methods are provided: [`Algorithm::Fwlp`], which alternates plain
//! Frank-Wolfe steps on the primal and dual, and [`Algorithm::FwlpP`], which
//! adds a vanishing quadratic perturbation so that each step becomes a
//! Euclidean projection. Both run over `Δ = {x ≥ 0, eᵀx ≤ ξ}` and
//! `Γ = [−η, η]^m`.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the scalar to `f64`.

pub mod cli;
pub mod diagnostics;
pub mod driver;
pub mod fwlp;
pub mod fwlpp;
pub mod io;
pub mod lp_model;
pub mod projection;
pub mod scalar;
pub mod screening;
pub mod sparse;

pub use diagnostics::{certificate_check, CertificateViolation, DiagnosticsRecord, TheoryConstants};
pub use driver::{Algorithm, RunStatus, SolveError, Solver, Trace, TraceEntry};
pub use fwlp::{fwlp_step, run_fwlp};
pub use fwlpp::{fwlpp_step, run_fwlpp};
pub use lp_model::{ModelError, SolverParams, SolverState, StandardFormLp};
pub use projection::{kkt_unit_cap, project_box, project_simplex_cap, KktSolution};
pub use scalar::Scalar;
pub use screening::{ScreeningMode, ScreeningState};
pub use sparse::{CscMatrix, SparseVector};

pub type Lp = StandardFormLp<f64>;
pub type Params = SolverParams<f64>;
pub type State = SolverState<f64>;
pub type Record = DiagnosticsRecord<f64>;
pub type TraceF64 = Trace<f64>;
pub type Matrix = CscMatrix<f64>;

pub type LpF32 = StandardFormLp<f32>;
pub type ParamsF32 = SolverParams<f32>;
pub type StateF32 = SolverState<f32>;
