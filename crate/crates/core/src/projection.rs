//! Euclidean projections onto the capped simplex `Δ = {x ≥ 0, eᵀx ≤ ξ}` and the
//! box `Γ = [−η, η]^m`.
//!
//! Projection onto `Δ` reduces, after rescaling by `ξ`, to the quadratic program
//!
//! ```text
//! argmin  −wᵀx + ½‖x‖²   s.t.  eᵀx ≤ 1,  x ≥ 0
//! ```
//!
//! whose KKT system is solved by a sort-and-scan: sort `w` descending, find
//! the first prefix length `J` at which `μ = (S_J − 1)/J` satisfies
//! `w̄_J ≥ μ` and `w̄_{J+1} ≤ μ`. If `μ ≥ 0` the cap binds and
//! `x = (w̄ − μ)₊` on the prefix; otherwise `x = max(0, w)`.

use std::cmp::Ordering;

use thiserror::Error;

use crate::scalar::{KahanSum, Scalar};
use crate::sparse::SparseVector;

/// Primal-dual solution of the unit-cap quadratic program.
#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution<T> {
    pub x: Vec<T>,
    /// Multiplier of `eᵀx ≤ 1`.
    pub mu: T,
    /// Multipliers of `x ≥ 0`.
    pub z: Vec<T>,
}

impl<T: Scalar> KktSolution<T> {
    /// ∞-norm residuals of the five KKT conditions for linear term `w`:
    /// stationarity, cap feasibility, cap complementarity, bound
    /// complementarity, nonnegativity (in that order).
    pub fn residuals(&self, w: &[T]) -> [T; 5] {
        let stat = w
            .iter()
            .zip(&self.x)
            .zip(&self.z)
            .map(|((&wi, &xi), &zi)| (-wi + xi + self.mu - zi).abs())
            .fold(T::zero(), T::max);
        let mut total = KahanSum::new();
        self.x.iter().for_each(|&v| total.add(v));
        let sum = total.value();
        let feas = (sum - T::one()).max(T::zero());
        let cap_cs = (self.mu * (sum - T::one())).abs();
        let bound_cs = self.x.iter().zip(&self.z).map(|(&a, &b)| (a * b).abs()).sum();
        let nonneg = self
            .x
            .iter()
            .chain(&self.z)
            .chain(std::iter::once(&self.mu))
            .fold(T::zero(), |acc, &v| acc.max(-v));
        [stat, feas, cap_cs, bound_cs, nonneg]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("brute-force enumeration supports at most {limit} coordinates, got {n}")]
    SizeLimitExceeded { n: usize, limit: usize },
}

/// Largest dimension accepted by [`brute_force_unit_cap`].
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Descending order on values, ties broken by original index.
fn descending<T: Scalar>(a: (usize, T), b: (usize, T)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
}

/// Sort-and-scan over `(index, w)` pairs. Returns the threshold `μ` (clamped
/// to zero in the interior case), whether the cap binds, and the sorted pairs
/// with the support prefix length.
fn unit_cap_core<T: Scalar>(mut entries: Vec<(usize, T)>) -> (T, bool, Vec<(usize, T)>, usize) {
    entries.sort_by(|&a, &b| descending(a, b));
    let n = entries.len();
    let mut cumsum = KahanSum::new();
    let mut mu = T::zero();
    let mut support = n;
    for j in 0..n {
        cumsum.add(entries[j].1);
        mu = (cumsum.value() - T::one()) / T::of_usize(j + 1);
        let w_j = entries[j].1;
        if w_j >= mu && (j + 1 == n || entries[j + 1].1 <= mu) {
            support = j + 1;
            break;
        }
    }
    if n > 0 && mu >= T::zero() {
        (mu, true, entries, support)
    } else {
        (T::zero(), false, entries, support)
    }
}

/// Solves `argmin −wᵀx + ½‖x‖²` over `{x ≥ 0, eᵀx ≤ 1}` and returns the full
/// KKT triple.
pub fn kkt_unit_cap<T: Scalar>(w: &[T]) -> KktSolution<T> {
    let n = w.len();
    let (mu, cap_active, sorted, support) =
        unit_cap_core(w.iter().copied().enumerate().collect());
    let mut x = vec![T::zero(); n];
    if cap_active {
        let mut z: Vec<T> = w.iter().map(|&wi| mu - wi).collect();
        for &(i, wi) in &sorted[..support] {
            x[i] = wi - mu;
            z[i] = T::zero();
        }
        KktSolution { x, mu, z }
    } else {
        for (xi, &wi) in x.iter_mut().zip(w) {
            *xi = wi.max(T::zero());
        }
        let z = x.iter().zip(w).map(|(&xi, &wi)| xi - wi).collect();
        KktSolution { x, mu: T::zero(), z }
    }
}

/// Projection of `w0` onto `Δ = {x ≥ 0, eᵀx ≤ ξ}`, computed as
/// `ξ · kkt_unit_cap(w0/ξ).x`.
pub fn project_simplex_cap<T: Scalar>(w0: &[T], xi: T) -> Vec<T> {
    let w: Vec<T> = w0.iter().map(|&v| v / xi).collect();
    let (mu, cap_active, sorted, support) = unit_cap_core(w.iter().copied().enumerate().collect());
    let mut x = vec![T::zero(); w.len()];
    if cap_active {
        for &(i, wi) in &sorted[..support] {
            x[i] = xi * (wi - mu);
        }
    } else {
        for (xj, &wj) in x.iter_mut().zip(&w) {
            *xj = xi * wj.max(T::zero());
        }
    }
    x
}

/// Sparse projection onto `Δ` where `candidates` lists `(index, w0_index)` for
/// a superset of the coordinates with `w0 > 0`; every omitted coordinate is
/// taken to be nonpositive. Only the positive candidates are sorted. The
/// result has the same values as [`project_simplex_cap`] on the dense vector
/// and lists its support in ascending index order.
pub fn project_simplex_cap_sparse<T: Scalar>(
    candidates: impl IntoIterator<Item = (usize, T)>,
    xi: T,
) -> SparseVector<T> {
    let positive: Vec<(usize, T)> = candidates
        .into_iter()
        .map(|(i, v)| (i, v / xi))
        .filter(|&(_, v)| v > T::zero())
        .collect();
    let (mu, cap_active, sorted, support) = unit_cap_core(positive);
    let mut kept: Vec<(usize, T)> = if cap_active {
        sorted[..support].iter().map(|&(i, wi)| (i, xi * (wi - mu))).collect()
    } else {
        sorted.iter().map(|&(i, wi)| (i, xi * wi)).collect()
    };
    kept.retain(|&(_, v)| v > T::zero());
    kept.sort_by_key(|e| e.0);
    let mut out = SparseVector::new();
    for (i, v) in kept {
        out.push(i, v);
    }
    out
}

/// Componentwise clamp of `v` to `[−η, η]`.
pub fn project_box<T: Scalar>(v: &[T], eta: T) -> Vec<T> {
    v.iter().map(|&vi| vi.min(eta).max(-eta)).collect()
}

/// Exhaustive active-set solver for the unit-cap QP, used as a test oracle.
///
/// Enumerates every support set together with both states of the cap
/// constraint, solves each equality-constrained candidate in closed form,
/// keeps those that are primal feasible and sign-consistent, and returns the
/// one with the smallest objective.
pub fn brute_force_unit_cap(w: &[f64]) -> Result<Vec<f64>, ProjectionError> {
    let n = w.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(ProjectionError::SizeLimitExceeded { n, limit: BRUTE_FORCE_LIMIT });
    }
    const TOL: f64 = 1e-13;
    let objective = |x: &[f64]| -> f64 {
        x.iter().zip(w).map(|(&xi, &wi)| -wi * xi + 0.5 * xi * xi).sum()
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1u32 << n) {
        let in_support = |i: usize| mask & (1 << i) != 0;
        let size = mask.count_ones() as usize;
        for cap_active in [false, true] {
            let mu = if cap_active {
                if size == 0 {
                    continue;
                }
                let s: f64 = (0..n).filter(|&i| in_support(i)).map(|i| w[i]).sum();
                (s - 1.0) / size as f64
            } else {
                0.0
            };
            let x: Vec<f64> =
                (0..n).map(|i| if in_support(i) { w[i] - mu } else { 0.0 }).collect();
            let total: f64 = x.iter().sum();
            let feasible = x.iter().all(|&v| v >= -TOL)
                && mu >= -TOL
                && total <= 1.0 + TOL
                && (0..n).filter(|&i| !in_support(i)).all(|i| mu - w[i] >= -TOL);
            if !feasible {
                continue;
            }
            let x: Vec<f64> = x.into_iter().map(|v| v.max(0.0)).collect();
            let obj = objective(&x);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, x));
            }
        }
    }
    Ok(best.map(|(_, x)| x).unwrap_or_else(|| vec![0.0; n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn zero_input_projects_to_origin() {
        let s = kkt_unit_cap(&[0.0, 0.0, 0.0]);
        assert_eq!(s.x, vec![0.0; 3]);
        assert_eq!(s.mu, 0.0);
    }

    #[test]
    fn interior_branch_clips_negatives() {
        let s = kkt_unit_cap(&[0.3, -0.2]);
        assert_eq!(s.x, vec![0.3, 0.0]);
        assert_eq!(s.mu, 0.0);
    }

    #[test]
    fn cap_binding_two_coordinates() {
        // Oracle: support {0,1}, cap active, mu = (1.4 - 1)/2.
        let s = kkt_unit_cap(&[0.8f64, 0.6]);
        assert!((s.mu - 0.2).abs() < 1e-15);
        assert_close(&s.x, &[0.6, 0.4], 1e-15);
        assert_close(&brute_force_unit_cap(&[0.8, 0.6]).unwrap(), &[0.6, 0.4], 1e-15);
    }

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(brute_force_unit_cap(&[-1.0, -1.0]).unwrap(), vec![0.0, 0.0]);
        assert_close(&brute_force_unit_cap(&[2.0]).unwrap(), &[1.0], 1e-15);
        let s = kkt_unit_cap(&[2.0]);
        assert_eq!(s.mu, 1.0);
    }

    #[test]
    fn brute_force_rejects_large_input() {
        assert_eq!(
            brute_force_unit_cap(&[0.0; 11]),
            Err(ProjectionError::SizeLimitExceeded { n: 11, limit: 10 })
        );
    }

    #[test]
    fn scaled_cap_projection() {
        assert_eq!(project_simplex_cap(&[-1.0, -3.0, -0.5], 2.0), vec![0.0; 3]);
        assert_close(&project_simplex_cap(&[1.6, 1.2], 2.0), &[1.2, 0.8], 1e-15);
        assert_eq!(project_simplex_cap(&[0.5, 0.0], 2.0), vec![0.5, 0.0]);
    }

    #[test]
    fn box_projection() {
        assert_eq!(project_box(&[3.0, -0.5], 1.0), vec![1.0, -0.5]);
        assert_eq!(project_box(&[0.0, 0.0], 1.0), vec![0.0, 0.0]);
        assert_eq!(project_box(&[-7.0, 7.0], 2.0), vec![-2.0, 2.0]);
    }

    #[test]
    fn ties_are_deterministic() {
        let s = kkt_unit_cap(&[0.7, 0.7, 0.7]);
        assert_close(&s.x, &[1.0 / 3.0; 3], 1e-15);
        let r = kkt_unit_cap(&[0.5, 1.5, 0.5]);
        assert_close(&r.x, &[0.0, 1.0, 0.0], 1e-15);
    }

    #[test]
    fn large_random_kkt_residuals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &n in &[1000usize, 100_000] {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = kkt_unit_cap(&w);
            for r in s.residuals(&w) {
                assert!(r <= 1e-12, "residual {r} at n = {n}");
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let x = project_simplex_cap(&[1.6f32, 1.2], 2.0);
        assert!((x[0] - 1.2).abs() < 1e-6 && (x[1] - 0.8).abs() < 1e-6);
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
    }

    proptest! {
        #[test]
        fn matches_brute_force(w in prop::collection::vec(-2.0f64..2.0, 1..=8)) {
            let fast = kkt_unit_cap(&w);
            let slow = brute_force_unit_cap(&w).unwrap();
            for (a, b) in fast.x.iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
            for r in fast.residuals(&w) {
                prop_assert!(r <= 1e-12);
            }
        }

        #[test]
        fn simplex_projection_nonexpansive(
            pair in (1usize..12).prop_flat_map(|n| (
                prop::collection::vec(-5.0f64..5.0, n),
                prop::collection::vec(-5.0f64..5.0, n),
            )),
            xi in 0.1f64..5.0,
        ) {
            let (u, v) = pair;
            let pu = project_simplex_cap(&u, xi);
            let pv = project_simplex_cap(&v, xi);
            prop_assert!(dist(&pu, &pv) <= dist(&u, &v) + 1e-12);
            let bu = project_box(&u, xi);
            let bv = project_box(&v, xi);
            prop_assert!(dist(&bu, &bv) <= dist(&u, &v) + 1e-12);
        }

        #[test]
        fn simplex_projection_idempotent(w in prop::collection::vec(-5.0f64..5.0, 1..20), xi in 0.1f64..5.0) {
            let once = project_simplex_cap(&w, xi);
            let twice = project_simplex_cap(&once, xi);
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + xi));
            }
            prop_assert!(once.iter().all(|&v| v >= 0.0));
            prop_assert!(once.iter().sum::<f64>() <= xi * (1.0 + 1e-12));
        }

        #[test]
        fn sparse_projection_is_bitwise_dense(w in prop::collection::vec(-3.0f64..3.0, 1..40), xi in 0.1f64..4.0) {
            let dense = project_simplex_cap(&w, xi);
            let sparse = project_simplex_cap_sparse(w.iter().copied().enumerate(), xi);
            prop_assert_eq!(sparse.to_dense(w.len()), dense.clone());
            // Omitting nonpositive coordinates must not change anything.
            let only_pos = project_simplex_cap_sparse(
                w.iter().copied().enumerate().filter(|&(_, v)| v > 0.0), xi);
            prop_assert_eq!(only_pos.to_dense(w.len()), dense);
        }
    }
}
