//! Problem data, solver parameters and the iterate state shared by both solvers.
//!
//! The primal problem is `min cᵀx s.t. Ax = b, x ≥ 0`. Both solvers work on
//! the saddle function `L(x, y) = cᵀx + yᵀ(b − Ax)` restricted to the
//! capped simplex `Δ = {x ≥ 0, eᵀx ≤ ξ}` and the box `Γ = [−η, η]^m`.

use thiserror::Error;

use crate::scalar::{norm_inf, Scalar};
use crate::sparse::{CscMatrix, SparseVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("non-finite entry in {what} at position {index}")]
    NonFiniteEntry { what: &'static str, index: usize },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("starting point {what} is infeasible at position {index}")]
    InfeasibleStart { what: &'static str, index: usize },
}

/// Standard-form linear program `min cᵀx s.t. Ax = b, x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormLp<T> {
    a: CscMatrix<T>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> StandardFormLp<T> {
    /// Validates and wraps the problem data.
    pub fn new(a: CscMatrix<T>, b: Vec<T>, c: Vec<T>) -> Result<Self, ModelError> {
        validate(&a, &b, &c)?;
        Ok(Self { a, b, c })
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &CscMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    /// Reduced cost of column `j` at dual point `y`: `c_j − a_jᵀy`.
    #[inline]
    pub fn reduced_cost(&self, j: usize, y: &[T]) -> T {
        self.c[j] - self.a.col_dot(j, y)
    }

    /// All reduced costs `c − Aᵀy`.
    pub fn reduced_costs(&self, y: &[T]) -> Vec<T> {
        (0..self.ncols()).map(|j| self.reduced_cost(j, y)).collect()
    }

    /// `b − A x` computed from scratch.
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        let ax = self.a.mul_vec(x);
        self.b.iter().zip(&ax).map(|(&bi, &v)| bi - v).collect()
    }

    /// Tolerance on `‖Ax_cache − Ax‖∞` between cache refreshes.
    pub fn drift_tolerance(&self) -> T {
        T::of(1e-8) * (T::one() + norm_inf(&self.b))
    }
}

/// Checks dimensional consistency and finiteness of `(A, b, c)`, reporting the
/// first violation found.
pub fn validate<T: Scalar>(a: &CscMatrix<T>, b: &[T], c: &[T]) -> Result<(), ModelError> {
    if a.nrows() == 0 {
        return Err(ModelError::DimensionMismatch { what: "rows of A", expected: 1, found: 0 });
    }
    if a.ncols() == 0 {
        return Err(ModelError::DimensionMismatch { what: "columns of A", expected: 1, found: 0 });
    }
    if b.len() != a.nrows() {
        return Err(ModelError::DimensionMismatch {
            what: "b",
            expected: a.nrows(),
            found: b.len(),
        });
    }
    if c.len() != a.ncols() {
        return Err(ModelError::DimensionMismatch {
            what: "c",
            expected: a.ncols(),
            found: c.len(),
        });
    }
    if let Some(index) = a.values().iter().position(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteEntry { what: "A", index });
    }
    if let Some(index) = b.iter().position(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteEntry { what: "b", index });
    }
    if let Some(index) = c.iter().position(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteEntry { what: "c", index });
    }
    Ok(())
}

/// Radii of `Δ` and `Γ` plus run controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams<T> {
    /// Radius of the primal cap `eᵀx ≤ ξ`. Must satisfy `ξ ≥ 2‖x*‖₁`.
    pub xi: T,
    /// Half-width of the dual box. Must satisfy `η ≥ 2‖y*‖∞`.
    pub eta: T,
    pub max_iters: usize,
    /// Iterations between exact recomputations of the cached `Ax`.
    pub refresh_period: usize,
    pub screening_enabled: bool,
    pub trace_every: usize,
    /// Early stop once primal infeasibility, dual infeasibility and `|gap|`
    /// are all strictly below this value. Zero disables early stopping.
    pub tol: T,
}

impl<T: Scalar> SolverParams<T> {
    pub fn new(xi: T, eta: T) -> Self {
        Self {
            xi,
            eta,
            max_iters: 10_000,
            refresh_period: 1000,
            screening_enabled: false,
            trace_every: 1,
            tol: T::of(1e-4),
        }
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn with_screening(mut self, on: bool) -> Self {
        self.screening_enabled = on;
        self
    }

    pub fn with_trace_every(mut self, n: usize) -> Self {
        self.trace_every = n;
        self
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_refresh_period(mut self, n: usize) -> Self {
        self.refresh_period = n;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = |name, v: T| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter { name, reason: format!("must be positive, got {v}") })
            }
        };
        positive("xi", self.xi)?;
        positive("eta", self.eta)?;
        if self.refresh_period == 0 {
            return Err(ModelError::InvalidParameter {
                name: "refresh_period",
                reason: "must be at least 1".into(),
            });
        }
        if self.trace_every == 0 {
            return Err(ModelError::InvalidParameter {
                name: "trace_every",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.tol >= T::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "tol",
                reason: format!("must be nonnegative, got {}", self.tol),
            });
        }
        Ok(())
    }
}

/// Iterate state at iteration `k`.
///
/// The primal iterate is stored as `x = scale · x_hat` so that the uniform
/// `k/(k+1)` shrink costs O(1); `refresh_cache` folds the scale back in.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T> {
    pub(crate) k: usize,
    pub(crate) x_hat: Vec<T>,
    pub(crate) scale: T,
    pub(crate) y: Vec<T>,
    pub(crate) ax: Vec<T>,
    pub(crate) cx: T,
    pub(crate) r_last: SparseVector<T>,
    pub(crate) s_last: Vec<T>,
}

impl<T: Scalar> SolverState<T> {
    /// State at `k = 1` with `x₁ = x0`, `y₁ = y0`.
    pub fn new(problem: &StandardFormLp<T>, x0: Vec<T>, y0: Vec<T>) -> Result<Self, ModelError> {
        let (m, n) = (problem.nrows(), problem.ncols());
        if x0.len() != n {
            return Err(ModelError::DimensionMismatch { what: "x0", expected: n, found: x0.len() });
        }
        if y0.len() != m {
            return Err(ModelError::DimensionMismatch { what: "y0", expected: m, found: y0.len() });
        }
        if let Some(index) = x0.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteEntry { what: "x0", index });
        }
        if let Some(index) = y0.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteEntry { what: "y0", index });
        }
        if let Some(index) = x0.iter().position(|&v| v < T::zero()) {
            return Err(ModelError::InfeasibleStart { what: "x0", index });
        }
        let ax = problem.a().mul_vec(&x0);
        let cx = crate::scalar::dot(problem.c(), &x0);
        Ok(Self {
            k: 1,
            x_hat: x0,
            scale: T::one(),
            y: y0,
            ax,
            cx,
            r_last: SparseVector::new(),
            s_last: vec![T::zero(); m],
        })
    }

    /// State at `k = 1` with `x₁ = 0 ∈ Δ`, `y₁ = 0 ∈ Γ`.
    pub fn zeros(problem: &StandardFormLp<T>) -> Self {
        Self::new(problem, vec![T::zero(); problem.ncols()], vec![T::zero(); problem.nrows()])
            .expect("zero start is always valid")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Materialized primal iterate.
    pub fn x(&self) -> Vec<T> {
        self.x_hat.iter().map(|&v| v * self.scale).collect()
    }

    pub fn x_at(&self, j: usize) -> T {
        self.x_hat[j] * self.scale
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    /// Cached `A x_k`.
    pub fn ax_cache(&self) -> &[T] {
        &self.ax
    }

    /// Cached `cᵀx_k`.
    pub fn cx_cache(&self) -> T {
        self.cx
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Primal direction `r_k` used by the step that produced this state.
    pub fn r_last(&self) -> &SparseVector<T> {
        &self.r_last
    }

    /// Dual direction `s_k` used by the step that produced this state.
    pub fn s_last(&self) -> &[T] {
        &self.s_last
    }

    /// `‖Ax_cache − A x‖∞` against an exact product.
    pub fn cache_drift(&self, problem: &StandardFormLp<T>) -> T {
        let exact = problem.a().mul_vec(&self.x());
        self.ax.iter().zip(&exact).fold(T::zero(), |acc, (&u, &v)| acc.max((u - v).abs()))
    }

    /// Folds the scale into `x` and recomputes `Ax` and `cᵀx` exactly.
    pub fn refresh_cache(&mut self, problem: &StandardFormLp<T>) {
        if self.scale != T::one() {
            let s = self.scale;
            self.x_hat.iter_mut().for_each(|v| *v *= s);
            self.scale = T::one();
        }
        self.ax = problem.a().mul_vec(&self.x_hat);
        self.cx = crate::scalar::dot(problem.c(), &self.x_hat);
    }

    /// `x ← factor · x`, applied to the caches as well.
    pub(crate) fn shrink(&mut self, factor: T) {
        self.scale *= factor;
        self.ax.iter_mut().for_each(|v| *v *= factor);
        self.cx *= factor;
    }

    /// `x ← x + alpha · e_j`, applied to the caches as well.
    pub(crate) fn add_coordinate(&mut self, problem: &StandardFormLp<T>, j: usize, alpha: T) {
        self.x_hat[j] += alpha / self.scale;
        problem.a().axpy_col(alpha, j, &mut self.ax);
        self.cx += alpha * problem.c()[j];
    }

    /// `x_{k+1} = k/(k+1)·x_k + r/(k+1)`, touching only the support of `r`.
    pub(crate) fn primal_update(&mut self, problem: &StandardFormLp<T>, r: &SparseVector<T>) {
        let kf = T::of_usize(self.k);
        let next = kf + T::one();
        self.shrink(kf / next);
        for (j, rj) in r.iter() {
            self.add_coordinate(problem, j, rj / next);
        }
    }

    /// `y_{k+1} = k/(k+1)·y_k + s/(k+1)`.
    pub(crate) fn dual_update(&mut self, s: &[T]) {
        let kf = T::of_usize(self.k);
        let next = kf + T::one();
        for (yi, &si) in self.y.iter_mut().zip(s) {
            *yi = kf / next * *yi + si / next;
        }
    }

    /// Stores the step directions, advances `k` and refreshes the caches
    /// when the refresh period elapses.
    pub(crate) fn finish_step(
        &mut self,
        problem: &StandardFormLp<T>,
        refresh_period: usize,
        r: SparseVector<T>,
        s: Vec<T>,
    ) {
        self.r_last = r;
        self.s_last = s;
        self.k += 1;
        if (self.k - 1).is_multiple_of(refresh_period) {
            self.refresh_cache(problem);
        }
    }

    /// `b − Ax_k` from the cache.
    pub fn cached_residual(&self, problem: &StandardFormLp<T>) -> Vec<T> {
        problem.b().iter().zip(&self.ax).map(|(&bi, &v)| bi - v).collect()
    }
}
