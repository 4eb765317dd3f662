//! Potential function, perturbation terms, certificates and the primal-dual gap.
//!
//! Indexing follows the solver: `r_{k+1}` is computed from `y_k` with weight
//! `1/(2√k)` and `s_{k+1}` from `x_{k+1}` with weight `1/(2√k)`. With
//! `d_k = c − Aᵀy_k` and `ρ_k = b − Ax_k`,
//!
//! ```text
//! U_k     = −r_{k+1}ᵀd_k − ‖r_{k+1}‖²/(2√k) + s_kᵀρ_k − ‖s_k‖²/(2√k) + cᵀx_k − bᵀy_k
//! δ_{k+1} = r_{k+2}ᵀd_{k+1} + ‖r_{k+2}‖²/(2√(k+1)) − r_{k+1}ᵀd_{k+1} − k‖r_{k+1}‖²/(2(k+1)√k)
//! ε_{k+1} = k/(k+1) (−s_{k+1}ᵀρ_k + √(k+1)‖s_{k+1}‖²/(2k) + s_kᵀρ_k − ‖s_k‖²/(2√k))
//! ```
//!
//! and these satisfy `δ_{k+1} + ε_{k+1} + U_{k+1} = k/(k+1) U_k` exactly.
//!
//! A [`DiagnosticsRecord`] emitted at iteration `k` carries `U_k`, `δ_k`, `ε_k`
//! and the residual of the identity linking `U_{k−1}` to `U_k`.

use thiserror::Error;

use crate::lp_model::{SolverParams, StandardFormLp};
use crate::scalar::{dot, norm1, norm_sq, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticsError {
    #[error("quantity requires k >= {min}, got k = {k}")]
    IndexTooSmall { k: usize, min: usize },
}

/// Per-iteration measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord<T> {
    pub k: usize,
    /// `U_k`; defined for `k ≥ 2`.
    pub potential: Option<T>,
    /// `δ_k`; defined for `k ≥ 2`.
    pub delta: Option<T>,
    /// `ε_k`; defined for `k ≥ 3`.
    pub epsilon: Option<T>,
    /// `δ_k + ε_k + U_k − (k−1)/k · U_{k−1}`; defined for `k ≥ 3`.
    pub recursion_residual: Option<T>,
    /// `‖b − Ax_k‖₁`.
    pub primal_infeas: T,
    /// `max(0, max_j (Aᵀy_k − c)_j)`.
    pub dual_infeas: T,
    /// `cᵀx_k − bᵀy_k`.
    pub gap: T,
    /// Saddle gap over `Δ × Γ`.
    pub saddle_gap: T,
    /// Column evaluations performed by the solver up to this iteration.
    pub touch_count: u64,
    /// `min_j x_j`, filled in for emitted records.
    pub min_x: Option<T>,
}

fn check_k(k: usize, min: usize) -> Result<(), DiagnosticsError> {
    if k < min {
        Err(DiagnosticsError::IndexTooSmall { k, min })
    } else {
        Ok(())
    }
}

fn inv_two_sqrt<T: Scalar>(k: usize) -> T {
    T::one() / (T::of(2.0) * T::of_usize(k).sqrt())
}

/// `U_k` from precomputed inner products: `r_dot_d = r_{k+1}ᵀd_k`,
/// `r_norm_sq = ‖r_{k+1}‖²`, `s_dot_res = s_kᵀ(b − Ax_k)`, `s_norm_sq = ‖s_k‖²`.
pub fn potential_from_parts<T: Scalar>(
    k: usize,
    r_dot_d: T,
    r_norm_sq: T,
    s_dot_res: T,
    s_norm_sq: T,
    cx: T,
    by: T,
) -> Result<T, DiagnosticsError> {
    check_k(k, 2)?;
    let h = inv_two_sqrt::<T>(k);
    Ok(-r_dot_d - h * r_norm_sq + s_dot_res - h * s_norm_sq + cx - by)
}

/// `U_k` from the iterates themselves.
pub fn potential_u<T: Scalar>(
    problem: &StandardFormLp<T>,
    x_k: &[T],
    y_k: &[T],
    r_next: &[T],
    s_k: &[T],
    k: usize,
) -> Result<T, DiagnosticsError> {
    let d = problem.reduced_costs(y_k);
    let res = problem.residual(x_k);
    potential_from_parts(
        k,
        dot(r_next, &d),
        norm_sq(r_next),
        dot(s_k, &res),
        norm_sq(s_k),
        dot(problem.c(), x_k),
        dot(problem.b(), y_k),
    )
}

/// `δ_{k+1}` from inner products at `y_{k+1}`: `next_dot_d = r_{k+2}ᵀd_{k+1}`,
/// `cur_dot_d = r_{k+1}ᵀd_{k+1}`.
pub fn delta_from_parts<T: Scalar>(
    k: usize,
    next_dot_d: T,
    next_norm_sq: T,
    cur_dot_d: T,
    cur_norm_sq: T,
) -> Result<T, DiagnosticsError> {
    check_k(k, 1)?;
    let kf = T::of_usize(k);
    let two = T::of(2.0);
    Ok(next_dot_d + next_norm_sq * inv_two_sqrt::<T>(k + 1)
        - cur_dot_d
        - kf * cur_norm_sq / (two * (kf + T::one()) * kf.sqrt()))
}

/// `δ_{k+1}` from `r_{k+1}`, `r_{k+2}` and `y_{k+1}`.
pub fn delta_term<T: Scalar>(
    problem: &StandardFormLp<T>,
    r_cur: &[T],
    r_next: &[T],
    y_next: &[T],
    k: usize,
) -> Result<T, DiagnosticsError> {
    let d = problem.reduced_costs(y_next);
    delta_from_parts(k, dot(r_next, &d), norm_sq(r_next), dot(r_cur, &d), norm_sq(r_cur))
}

/// `ε_{k+1}` from inner products with `ρ_k = b − Ax_k`:
/// `next_dot_res = s_{k+1}ᵀρ_k`, `cur_dot_res = s_kᵀρ_k`.
pub fn epsilon_from_parts<T: Scalar>(
    k: usize,
    next_dot_res: T,
    next_norm_sq: T,
    cur_dot_res: T,
    cur_norm_sq: T,
) -> Result<T, DiagnosticsError> {
    check_k(k, 2)?;
    let kf = T::of_usize(k);
    let two = T::of(2.0);
    let inner = -next_dot_res + (kf + T::one()).sqrt() * next_norm_sq / (two * kf) + cur_dot_res
        - cur_norm_sq * inv_two_sqrt::<T>(k);
    Ok(kf / (kf + T::one()) * inner)
}

/// `ε_{k+1}` from `s_k`, `s_{k+1}` and `x_k`.
pub fn epsilon_term<T: Scalar>(
    problem: &StandardFormLp<T>,
    s_cur: &[T],
    s_next: &[T],
    x_k: &[T],
    k: usize,
) -> Result<T, DiagnosticsError> {
    let res = problem.residual(x_k);
    epsilon_from_parts(k, dot(s_next, &res), norm_sq(s_next), dot(s_cur, &res), norm_sq(s_cur))
}

/// `δ_{k+1} + ε_{k+1} + U_{k+1} − k/(k+1) U_k`; zero up to rounding.
pub fn recursion_residual<T: Scalar>(u_k: T, u_next: T, delta_next: T, epsilon_next: T, k: usize) -> T {
    let kf = T::of_usize(k);
    delta_next + epsilon_next + u_next - kf / (kf + T::one()) * u_k
}

/// `max(0, max_j (Aᵀy − c)_j)`.
pub fn dual_infeasibility<T: Scalar>(y: &[T], problem: &StandardFormLp<T>) -> T {
    (0..problem.ncols())
        .map(|j| -problem.reduced_cost(j, y))
        .fold(T::zero(), T::max)
}

/// Closed form of `max{L(x, s) − L(r, y) : (r, s) ∈ Δ × Γ}` given
/// `‖b − Ax‖₁`, `cᵀx − bᵀy` and `min_j (c − Aᵀy)_j`.
pub fn saddle_gap_from_parts<T: Scalar>(primal_l1: T, gap: T, d_min: T, xi: T, eta: T) -> T {
    eta * primal_l1 + gap - xi * d_min.min(T::zero())
}

/// Saddle gap `M` at `(x, y)` over `Δ × Γ`.
pub fn standard_gap_m<T: Scalar>(
    x: &[T],
    y: &[T],
    problem: &StandardFormLp<T>,
    params: &SolverParams<T>,
) -> T {
    let res = problem.residual(x);
    let d_min = problem.reduced_costs(y).into_iter().fold(T::infinity(), T::min);
    let gap = dot(problem.c(), x) - dot(problem.b(), y);
    saddle_gap_from_parts(norm1(&res), gap, d_min, params.xi, params.eta)
}

/// Inequality reported by [`certificate_check`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateViolation {
    #[error("x_k has a negative entry ({min_x})")]
    NegativePrimal { min_x: f64 },
    #[error("gap {gap} exceeds potential {potential}")]
    GapAbovePotential { gap: f64, potential: f64 },
    #[error("infeasibility bound violated: {lhs} > {rhs}")]
    InfeasibilityBound { lhs: f64, rhs: f64 },
    #[error("record at k = {k} lacks the potential needed for certification")]
    MissingPotential { k: usize },
}

/// Checks the optimality certificates at a record with `k ≥ 2`:
///
/// ```text
/// x_k ≥ 0
/// (ξ/2)·l + (η/2)·‖b − Ax_k‖₁ ≤ U_k + ξ²/(2√k) + mη²/(2√(k−1))
/// cᵀx_k − bᵀy_k ≤ U_k
/// ```
///
/// valid whenever `ξ ≥ 2‖x*‖₁` and `η ≥ 2‖y*‖∞` for some optimal pair.
/// A relative allowance of `1e-12` absorbs rounding in the stored values.
pub fn certificate_check<T: Scalar>(
    record: &DiagnosticsRecord<T>,
    params: &SolverParams<T>,
    nrows: usize,
) -> Result<(), CertificateViolation> {
    let k = record.k;
    let u = match record.potential {
        Some(u) if k >= 2 => u.as_f64(),
        _ => return Err(CertificateViolation::MissingPotential { k }),
    };
    if let Some(min_x) = record.min_x {
        if min_x < T::zero() {
            return Err(CertificateViolation::NegativePrimal { min_x: min_x.as_f64() });
        }
    }
    let (xi, eta) = (params.xi.as_f64(), params.eta.as_f64());
    let gap = record.gap.as_f64();
    let slack = |a: f64, b: f64| 1e-12 * (1.0 + a.abs() + b.abs());
    if gap > u + slack(gap, u) {
        return Err(CertificateViolation::GapAbovePotential { gap, potential: u });
    }
    let kf = k as f64;
    let lhs = 0.5 * xi * record.dual_infeas.as_f64() + 0.5 * eta * record.primal_infeas.as_f64();
    let rhs = u + xi * xi / (2.0 * kf.sqrt()) + nrows as f64 * eta * eta / (2.0 * (kf - 1.0).sqrt());
    if lhs > rhs + slack(lhs, rhs) {
        return Err(CertificateViolation::InfeasibilityBound { lhs, rhs });
    }
    Ok(())
}

/// Data-dependent constants of the convergence analysis, with the spectral
/// norm of `A` replaced by its Frobenius norm (an upper bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    pub m: f64,
    pub xi: f64,
    pub eta: f64,
    pub a_norm: f64,
    pub c_norm: f64,
    /// `2‖A‖√m η (3‖A‖√m η + ‖c‖) + ξ²/4`.
    pub d: f64,
    /// `D + mη²/6`.
    pub d_bar: f64,
}

impl TheoryConstants {
    pub fn new<T: Scalar>(problem: &StandardFormLp<T>, params: &SolverParams<T>) -> Self {
        let m = problem.nrows() as f64;
        let (xi, eta) = (params.xi.as_f64(), params.eta.as_f64());
        let a_norm = problem.a().frobenius_norm().as_f64();
        let c_norm = norm_sq(problem.c()).as_f64().sqrt();
        let t = a_norm * m.sqrt() * eta;
        let d = 2.0 * t * (3.0 * t + c_norm) + xi * xi / 4.0;
        let d_bar = d + m * eta * eta / 6.0;
        Self { m, xi, eta, a_norm, c_norm, d, d_bar }
    }

    /// Lower bound on `ε_{k+1}`, `k ≥ 2`.
    pub fn epsilon_lower(&self, k: usize) -> f64 {
        let kf = k as f64;
        -self.m * self.eta * self.eta / (6.0 * kf * kf * (kf - 1.0).sqrt())
    }

    /// Lower bound on `δ_{k+1}` using `D̄`, `k ≥ 1`.
    pub fn delta_lower(&self, k: usize) -> f64 {
        -self.d_bar / (k as f64).powf(1.5)
    }

    /// `F = max(√2 U₂, 6 D̄)`.
    pub fn envelope_constant(&self, u2: f64) -> f64 {
        (2f64.sqrt() * u2).max(6.0 * self.d_bar)
    }

    /// Bound `F/√k` on `U_{k+1}`, `k ≥ 2`.
    pub fn envelope(&self, u2: f64, k: usize) -> f64 {
        self.envelope_constant(u2) / (k as f64).sqrt()
    }

    /// Leading term `(mη² + ξ²)/(2√(k−1))` of the bound on `|M_k − U_k|`.
    pub fn saddle_gap_slack(&self, k: usize) -> f64 {
        (self.m * self.eta * self.eta + self.xi * self.xi) / (2.0 * ((k - 1) as f64).sqrt())
    }
}
