//! FWLP: alternating Frank-Wolfe steps with step-size `1/(k+1)`.
//!
//! The linear minimization over `Δ` picks `r = ξ e_i` for the most violated
//! dual constraint `i = argmin_j (c − Aᵀy_k)_j` when that value is negative,
//! and `r = 0` otherwise. The dual linear maximization over `Γ` picks
//! `s = η sgn(b − Ax_{k+1})`, using the freshly updated primal iterate.

use crate::driver::{Algorithm, Solver, SolveError, Trace};
use crate::lp_model::{SolverParams, SolverState, StandardFormLp};
use crate::scalar::Scalar;
use crate::sparse::SparseVector;

/// Smallest index attaining the minimum of `d`, with that minimum.
pub fn most_violated_index<T: Scalar>(d: &[T]) -> (usize, T) {
    assert!(!d.is_empty(), "empty reduced-cost vector");
    let mut best = (0, d[0]);
    for (j, &v) in d.iter().enumerate().skip(1) {
        if v < best.1 {
            best = (j, v);
        }
    }
    best
}

/// Frank-Wolfe vertex of `Δ` for the most violated column `(i, d_i)`.
pub fn fwlp_direction<T: Scalar>(i: usize, d_i: T, xi: T) -> SparseVector<T> {
    let mut r = SparseVector::new();
    if d_i < T::zero() {
        r.push(i, xi);
    }
    r
}

/// Frank-Wolfe vertex of `Γ`: `η · sgn(residual)` with `sgn(0) = 0`.
pub fn sign_step<T: Scalar>(residual: &[T], eta: T) -> Vec<T> {
    residual
        .iter()
        .map(|&v| {
            if v > T::zero() {
                eta
            } else if v < T::zero() {
                -eta
            } else {
                T::zero()
            }
        })
        .collect()
}

/// One FWLP iteration from `x_k, y_k` to `x_{k+1}, y_{k+1}` with a dense
/// scan of the reduced costs.
pub fn fwlp_step<T: Scalar>(
    state: &mut SolverState<T>,
    problem: &StandardFormLp<T>,
    params: &SolverParams<T>,
) {
    let d = problem.reduced_costs(state.y());
    let (i, d_i) = most_violated_index(&d);
    let r = fwlp_direction(i, d_i, params.xi);
    state.primal_update(problem, &r);
    let s = sign_step(&state.cached_residual(problem), params.eta);
    state.dual_update(&s);
    state.finish_step(problem, params.refresh_period, r, s);
}

/// Runs FWLP from `(x0, y0)` for `params.max_iters` iterations (or until the
/// certificate measures drop below `params.tol`).
pub fn run_fwlp<T: Scalar>(
    problem: &StandardFormLp<T>,
    params: &SolverParams<T>,
    x0: Vec<T>,
    y0: Vec<T>,
) -> Result<Trace<T>, SolveError> {
    Solver::new(problem, params.clone(), Algorithm::Fwlp, x0, y0)?.run_collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CscMatrix;

    fn one_by_one() -> StandardFormLp<f64> {
        StandardFormLp::new(CscMatrix::from_dense_rows(&[vec![1.0]]), vec![1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn argmin_examples() {
        assert_eq!(most_violated_index(&[1.0, 2.0, 3.0]), (0, 1.0));
        assert_eq!(most_violated_index(&[-2.0, -2.0, 0.0]), (0, -2.0));
        assert_eq!(most_violated_index(&[0.5, -0.1]), (1, -0.1));
    }

    #[test]
    fn hand_executed_steps() {
        let p = one_by_one();
        let params = SolverParams::new(2.0, 2.0);
        let mut st = SolverState::zeros(&p);
        fwlp_step(&mut st, &p, &params);
        assert_eq!(st.k(), 2);
        assert_eq!(st.x(), vec![0.0]);
        assert_eq!(st.y(), &[1.0]);
        fwlp_step(&mut st, &p, &params);
        assert_eq!(st.x(), vec![0.0]);
        assert!((st.y()[0] - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_residual_only_shrinks_dual() {
        // b = A x exactly at x = (1): residual zero, c - Aᵀy > 0 so x shrinks too.
        let p = StandardFormLp::new(CscMatrix::from_dense_rows(&[vec![1.0], vec![0.0]]), vec![0.0, 0.0], vec![1.0])
            .unwrap();
        let params = SolverParams::new(2.0, 2.0);
        let mut st = SolverState::new(&p, vec![0.0], vec![0.5, -0.5]).unwrap();
        st.k = 3;
        fwlp_step(&mut st, &p, &params);
        assert_eq!(st.y(), &[0.375, -0.375]);
    }

    #[test]
    fn iterates_stay_in_feasible_sets() {
        let p = StandardFormLp::new(
            CscMatrix::from_dense_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, -1.0, 1.0]]),
            vec![1.0, 0.5],
            vec![-1.0, 0.5, -0.2],
        )
        .unwrap();
        let params = SolverParams::new(3.0, 1.5).with_refresh_period(7);
        let mut st = SolverState::zeros(&p);
        for _ in 0..500 {
            fwlp_step(&mut st, &p, &params);
            let x = st.x();
            assert!(x.iter().all(|&v| v >= 0.0));
            assert!(x.iter().sum::<f64>() <= 3.0 * (1.0 + 1e-12));
            assert!(st.y().iter().all(|v| v.abs() <= 1.5 * (1.0 + 1e-12)));
            assert!(st.cache_drift(&p) <= p.drift_tolerance());
        }
    }
}
