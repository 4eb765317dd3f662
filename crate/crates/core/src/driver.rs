//! Iteration driver shared by FWLP and FWLP-P.
//!
//! Each iteration is split in two phases. [`Solver::evaluate`] looks at the
//! current iterate `(x_k, y_k)`: it computes the reduced costs it needs, the
//! next primal direction `r_{k+1}` and the diagnostics record for `k`.
//! [`Solver::advance`] then applies the primal update, computes `s_{k+1}`
//! from `x_{k+1}` and applies the dual update. The potential `U_k` needs
//! `r_{k+1}`, so splitting the step this way lets every record be complete
//! when it is emitted.

use std::time::Instant;

use thiserror::Error;

use crate::diagnostics::{
    delta_from_parts, epsilon_from_parts, potential_from_parts, recursion_residual,
    saddle_gap_from_parts, DiagnosticsRecord,
};
use crate::fwlp::{fwlp_direction, most_violated_index, sign_step};
use crate::fwlpp::{compute_r_from_reduced_costs, compute_s};
use crate::lp_model::{ModelError, SolverParams, SolverState, StandardFormLp};
use crate::scalar::{dot, norm1, norm_sq, Scalar};
use crate::screening::{ScreeningMode, ScreeningState};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Fwlp,
    FwlpP,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fwlp => "fwlp",
            Algorithm::FwlpP => "fwlp-p",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Primal infeasibility, dual infeasibility and `|gap|` all fell below `tol`.
    Converged,
    /// `max_iters` iterations were performed.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<T> {
    pub state: SolverState<T>,
    pub record: DiagnosticsRecord<T>,
    pub wall_time_ns: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub entries: Vec<TraceEntry<T>>,
    pub status: RunStatus,
}

impl<T> Trace<T> {
    pub fn last(&self) -> &TraceEntry<T> {
        self.entries.last().expect("trace always holds the initial state")
    }
}

/// What `evaluate` learned about the current iterate.
#[derive(Debug, Clone)]
struct Evaluation<T> {
    /// `r_{k+1}`.
    r_next: SparseVector<T>,
    /// `b − Ax_k`.
    residual: Vec<T>,
    record: DiagnosticsRecord<T>,
    /// Index of the most violated column for FWLP.
    argmin: Option<usize>,
}

/// Quantities from the previous iteration needed by `ε` and the recursion.
#[derive(Debug, Clone, Default)]
struct History<T> {
    /// `b − Ax_{k−1}`.
    residual: Option<Vec<T>>,
    /// `s_{k−1}`.
    s: Option<Vec<T>>,
    /// `U_{k−1}`.
    potential: Option<T>,
}

/// Stateful FWLP / FWLP-P solver over a borrowed problem.
#[derive(Debug, Clone)]
pub struct Solver<'p, T> {
    problem: &'p StandardFormLp<T>,
    params: SolverParams<T>,
    algorithm: Algorithm,
    state: SolverState<T>,
    screening: Option<ScreeningState<T>>,
    dense_touches: u64,
    history: History<T>,
    pending: Option<Evaluation<T>>,
}

impl<'p, T: Scalar> Solver<'p, T> {
    pub fn new(
        problem: &'p StandardFormLp<T>,
        params: SolverParams<T>,
        algorithm: Algorithm,
        x0: Vec<T>,
        y0: Vec<T>,
    ) -> Result<Self, SolveError> {
        params.validate()?;
        let state = SolverState::new(problem, x0, y0)?;
        let screening = params.screening_enabled.then(|| {
            let mode = match algorithm {
                Algorithm::Fwlp => ScreeningMode::Argmin,
                Algorithm::FwlpP => ScreeningMode::Violated,
            };
            let horizon = params.max_iters.saturating_add(1);
            ScreeningState::new(mode, problem, params.eta, state.y(), state.k(), horizon)
        });
        Ok(Self {
            problem,
            params,
            algorithm,
            state,
            screening,
            dense_touches: 0,
            history: History::default(),
            pending: None,
        })
    }

    /// Solver started at `x₁ = 0`, `y₁ = 0`.
    pub fn from_zero(
        problem: &'p StandardFormLp<T>,
        params: SolverParams<T>,
        algorithm: Algorithm,
    ) -> Result<Self, SolveError> {
        let (m, n) = (problem.nrows(), problem.ncols());
        Self::new(problem, params, algorithm, vec![T::zero(); n], vec![T::zero(); m])
    }

    pub fn state(&self) -> &SolverState<T> {
        &self.state
    }

    pub fn params(&self) -> &SolverParams<T> {
        &self.params
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn screening(&self) -> Option<&ScreeningState<T>> {
        self.screening.as_ref()
    }

    /// Column evaluations spent on reduced costs so far.
    pub fn touch_count(&self) -> u64 {
        self.screening.as_ref().map_or(self.dense_touches, |s| s.touch_counter())
    }

    /// `r_{k+1}` for the current iterate (evaluating if needed).
    pub fn next_direction(&mut self) -> &SparseVector<T> {
        self.ensure_evaluated();
        &self.pending.as_ref().unwrap().r_next
    }

    /// Most violated column at the current iterate (FWLP only).
    pub fn current_argmin(&mut self) -> Option<usize> {
        self.ensure_evaluated();
        self.pending.as_ref().unwrap().argmin
    }

    fn ensure_evaluated(&mut self) {
        if self.pending.is_none() {
            let ev = self.compute_evaluation();
            self.pending = Some(ev);
        }
    }

    /// Diagnostics record for the current iterate `k`.
    pub fn evaluate(&mut self) -> &DiagnosticsRecord<T> {
        self.ensure_evaluated();
        &self.pending.as_ref().unwrap().record
    }

    /// Reduced costs at `y_k` on the columns in `cols`, looked up in `dense`
    /// when available.
    fn reduced_on(&self, r: &SparseVector<T>, dense: Option<&[T]>) -> T {
        let y = self.state.y();
        r.iter()
            .map(|(j, rj)| {
                let dj = dense.map_or_else(|| self.problem.reduced_cost(j, y), |d| d[j]);
                rj * dj
            })
            .sum()
    }

    fn compute_evaluation(&mut self) -> Evaluation<T> {
        let problem = self.problem;
        let k = self.state.k();
        let n = problem.ncols();
        let xi = self.params.xi;

        // Reduced-cost information at y_k and the next primal direction.
        let mut dense_d: Option<Vec<T>> = None;
        let (r_next, d_min, argmin) = match (self.algorithm, self.screening.as_mut()) {
            (Algorithm::Fwlp, None) => {
                let d = problem.reduced_costs(self.state.y());
                self.dense_touches += n as u64;
                let (i, di) = most_violated_index(&d);
                dense_d = Some(d);
                (fwlp_direction(i, di, xi), di, Some(i))
            }
            (Algorithm::Fwlp, Some(scr)) => {
                let (i, di) = scr.refresh_and_select(self.state.y(), k, problem);
                (fwlp_direction(i, di, xi), di, Some(i))
            }
            (Algorithm::FwlpP, None) => {
                let d = problem.reduced_costs(self.state.y());
                self.dense_touches += n as u64;
                let d_min = d.iter().copied().fold(T::infinity(), T::min);
                let r = compute_r_from_reduced_costs(d.iter().copied().enumerate(), k, xi);
                dense_d = Some(d);
                (r, d_min, None)
            }
            (Algorithm::FwlpP, Some(scr)) => {
                let cand = scr.violated_superset(self.state.y(), k, problem);
                // Columns outside the candidate list have positive reduced cost.
                let d_min = cand.iter().map(|e| e.1).fold(T::infinity(), T::min);
                (compute_r_from_reduced_costs(cand, k, xi), d_min, None)
            }
        };

        let residual = self.state.cached_residual(problem);
        let primal_infeas = norm1(&residual);
        let by = dot(problem.b(), self.state.y());
        let cx = self.state.cx_cache();
        let gap = cx - by;
        let dual_infeas = (-d_min).max(T::zero());
        let saddle_gap = saddle_gap_from_parts(primal_infeas, gap, d_min, xi, self.params.eta);

        let r_dot_d = self.reduced_on(&r_next, dense_d.as_deref());
        let r_norm_sq = r_next.norm_sq();
        let s_k = self.state.s_last();
        let potential = potential_from_parts(
            k,
            r_dot_d,
            r_norm_sq,
            dot(s_k, &residual),
            norm_sq(s_k),
            cx,
            by,
        )
        .ok();
        let delta = if k >= 2 {
            let r_k = self.state.r_last();
            delta_from_parts(k - 1, r_dot_d, r_norm_sq, self.reduced_on(r_k, dense_d.as_deref()), r_k.norm_sq())
                .ok()
        } else {
            None
        };
        let epsilon = match (&self.history.residual, &self.history.s) {
            (Some(prev_res), Some(prev_s)) if k >= 3 => epsilon_from_parts(
                k - 1,
                dot(s_k, prev_res),
                norm_sq(s_k),
                dot(prev_s, prev_res),
                norm_sq(prev_s),
            )
            .ok(),
            _ => None,
        };
        let recursion = match (self.history.potential, potential, delta, epsilon) {
            (Some(u_prev), Some(u), Some(dl), Some(ep)) => Some(recursion_residual(u_prev, u, dl, ep, k - 1)),
            _ => None,
        };

        let record = DiagnosticsRecord {
            k,
            potential,
            delta,
            epsilon,
            recursion_residual: recursion,
            primal_infeas,
            dual_infeas,
            gap,
            saddle_gap,
            touch_count: self.touch_count(),
            min_x: None,
        };
        Evaluation { r_next, residual, record, argmin }
    }

    /// Moves from `(x_k, y_k)` to `(x_{k+1}, y_{k+1})`.
    pub fn advance(&mut self) {
        self.ensure_evaluated();
        let ev = self.pending.take().unwrap();
        let problem = self.problem;
        let k = self.state.k();
        self.state.primal_update(problem, &ev.r_next);
        let residual_next = self.state.cached_residual(problem);
        let s_next = match self.algorithm {
            Algorithm::Fwlp => sign_step(&residual_next, self.params.eta),
            Algorithm::FwlpP => compute_s(&residual_next, k, self.params.eta),
        };
        self.state.dual_update(&s_next);
        self.history = History {
            residual: Some(ev.residual),
            s: (k >= 2).then(|| self.state.s_last().to_vec()),
            potential: ev.record.potential,
        };
        self.state.finish_step(problem, self.params.refresh_period, ev.r_next, s_next);
    }

    /// One full iteration.
    pub fn step(&mut self) {
        self.advance();
    }

    fn converged(&self, rec: &DiagnosticsRecord<T>) -> bool {
        let tol = self.params.tol;
        tol > T::zero() && rec.primal_infeas < tol && rec.dual_infeas < tol && rec.gap.abs() < tol
    }

    /// Runs until convergence or `max_iters` iterations, handing every traced
    /// iterate to `sink`. The initial and the final iterate are always traced.
    pub fn run<F>(&mut self, mut sink: F) -> RunStatus
    where
        F: FnMut(&SolverState<T>, &DiagnosticsRecord<T>, u128),
    {
        let start = Instant::now();
        let mut steps = 0usize;
        loop {
            self.ensure_evaluated();
            let converged = self.converged(&self.pending.as_ref().unwrap().record);
            let done = converged || steps >= self.params.max_iters;
            let k = self.state.k();
            if k == 1 || k.is_multiple_of(self.params.trace_every) || done {
                let min_x = (0..self.problem.ncols())
                    .map(|j| self.state.x_at(j))
                    .fold(T::infinity(), T::min);
                let rec = &mut self.pending.as_mut().unwrap().record;
                rec.min_x = Some(min_x);
                sink(&self.state, rec, start.elapsed().as_nanos());
            }
            if converged {
                return RunStatus::Converged;
            }
            if done {
                return RunStatus::BudgetExhausted;
            }
            self.advance();
            steps += 1;
        }
    }

    /// Runs and collects every traced iterate.
    pub fn run_collect(&mut self) -> Result<Trace<T>, SolveError> {
        let mut entries = Vec::new();
        let status = self.run(|state, record, wall_time_ns| {
            entries.push(TraceEntry { state: state.clone(), record: record.clone(), wall_time_ns })
        });
        Ok(Trace { entries, status })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fwlp::fwlp_step;
    use crate::fwlpp::fwlpp_step;
    use crate::sparse::CscMatrix;

    fn one_by_one() -> StandardFormLp<f64> {
        StandardFormLp::new(CscMatrix::from_dense_rows(&[vec![1.0]]), vec![1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn zero_budget_traces_initial_state_only() {
        let p = one_by_one();
        let params = SolverParams::new(2.0, 2.0).with_max_iters(0);
        for algo in [Algorithm::Fwlp, Algorithm::FwlpP] {
            let trace = Solver::from_zero(&p, params.clone(), algo).unwrap().run_collect().unwrap();
            assert_eq!(trace.entries.len(), 1);
            assert_eq!(trace.entries[0].record.k, 1);
            assert_eq!(trace.status, RunStatus::BudgetExhausted);
        }
    }

    #[test]
    fn driver_matches_free_step_functions() {
        let p = StandardFormLp::new(
            CscMatrix::from_dense_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, -1.0, 1.0]]),
            vec![1.0, 0.5],
            vec![-1.0, 0.5, -0.2],
        )
        .unwrap();
        let params = SolverParams::new(3.0, 1.5).with_refresh_period(5);
        for algo in [Algorithm::Fwlp, Algorithm::FwlpP] {
            let mut solver = Solver::from_zero(&p, params.clone(), algo).unwrap();
            let mut st = SolverState::zeros(&p);
            for _ in 0..40 {
                solver.step();
                match algo {
                    Algorithm::Fwlp => fwlp_step(&mut st, &p, &params),
                    Algorithm::FwlpP => fwlpp_step(&mut st, &p, &params),
                }
                assert_eq!(solver.state(), &st);
            }
        }
    }

    #[test]
    fn potential_hand_value_from_driver() {
        let p = one_by_one();
        let mut solver = Solver::from_zero(&p, SolverParams::new(2.0, 2.0), Algorithm::FwlpP).unwrap();
        assert!(solver.evaluate().potential.is_none());
        solver.step();
        let rec = solver.evaluate().clone();
        assert_eq!(rec.k, 2);
        assert!((rec.potential.unwrap() - (0.5 - 1.0 / (2.0 * 2f64.sqrt()))).abs() < 1e-15);
        assert!(rec.epsilon.is_none());
        solver.step();
        let rec3 = solver.evaluate().clone();
        assert!(rec3.recursion_residual.unwrap().abs() < 1e-12);
    }

    #[test]
    fn early_stop_on_optimal_start() {
        let p = one_by_one();
        let params = SolverParams::new(2.0, 2.0).with_max_iters(100);
        let mut solver = Solver::new(&p, params, Algorithm::FwlpP, vec![1.0], vec![1.0]).unwrap();
        let trace = solver.run_collect().unwrap();
        assert_eq!(trace.status, RunStatus::Converged);
        assert_eq!(trace.entries.len(), 1);
    }
}
