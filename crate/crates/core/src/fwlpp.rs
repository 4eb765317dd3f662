//! FWLP-P: FWLP with quadratic perturbations `‖·‖²/(2√k)` on both
//! subproblems, which turns each step into a Euclidean projection:
//!
//! ```text
//! r_{k+1} = proj_Δ(√k (Aᵀy_k − c))
//! s_{k+1} = proj_Γ(√k (b − Ax_{k+1}))
//! ```

use crate::driver::{Algorithm, Solver, SolveError, Trace};
use crate::lp_model::{SolverParams, SolverState, StandardFormLp};
use crate::projection::{project_simplex_cap, project_simplex_cap_sparse};
use crate::scalar::Scalar;
use crate::sparse::SparseVector;

/// `r_{k+1}` as a dense vector, from a full `Aᵀy` product.
pub fn compute_r<T: Scalar>(y: &[T], k: usize, problem: &StandardFormLp<T>, params: &SolverParams<T>) -> Vec<T> {
    let root_k = T::of_usize(k).sqrt();
    let w0: Vec<T> = problem
        .a()
        .tr_mul_vec(y)
        .iter()
        .zip(problem.c())
        .map(|(&aty, &cj)| root_k * (aty - cj))
        .collect();
    project_simplex_cap(&w0, params.xi)
}

/// `r_{k+1}` from reduced costs `(j, d_j)` known for a superset of the
/// columns with `d_j < 0`.
pub fn compute_r_from_reduced_costs<T: Scalar>(
    reduced: impl IntoIterator<Item = (usize, T)>,
    k: usize,
    xi: T,
) -> SparseVector<T> {
    let root_k = T::of_usize(k).sqrt();
    project_simplex_cap_sparse(
        reduced.into_iter().filter(|&(_, d)| d < T::zero()).map(|(j, d)| (j, root_k * -d)),
        xi,
    )
}

/// `s_{k+1} = clamp(√k (b − Ax_{k+1}), −η, η)` from the residual at `x_{k+1}`.
pub fn compute_s<T: Scalar>(residual: &[T], k: usize, eta: T) -> Vec<T> {
    let root_k = T::of_usize(k).sqrt();
    residual.iter().map(|&v| (root_k * v).min(eta).max(-eta)).collect()
}

/// One FWLP-P iteration with a dense scan of the reduced costs.
pub fn fwlpp_step<T: Scalar>(
    state: &mut SolverState<T>,
    problem: &StandardFormLp<T>,
    params: &SolverParams<T>,
) {
    let k = state.k();
    let d = problem.reduced_costs(state.y());
    let r = compute_r_from_reduced_costs(d.into_iter().enumerate(), k, params.xi);
    state.primal_update(problem, &r);
    let s = compute_s(&state.cached_residual(problem), k, params.eta);
    state.dual_update(&s);
    state.finish_step(problem, params.refresh_period, r, s);
}

/// Runs FWLP-P from `(x0, y0)`.
pub fn run_fwlpp<T: Scalar>(
    problem: &StandardFormLp<T>,
    params: &SolverParams<T>,
    x0: Vec<T>,
    y0: Vec<T>,
) -> Result<Trace<T>, SolveError> {
    Solver::new(problem, params.clone(), Algorithm::FwlpP, x0, y0)?.run_collect()
}
