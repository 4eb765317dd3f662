//! Lazy evaluation of reduced costs `d_j(k) = c_j − a_jᵀy_k`.
//!
//! Between iterations the dual iterate moves by `y_{t+1} − y_t = (s_{t+1} − y_t)/(t+1)`
//! with `s_{t+1} ∈ Γ`, so each coordinate moves by at most `ρ/(t+1)` where
//! `ρ = η + max(η, ‖y₁‖∞)` (equal to `2η` for a start inside `Γ`). By Hölder,
//! `|d_j(t+1) − d_j(t)| ≤ ‖a_j‖₁ ρ/(t+1)`, hence between iterations `k₀` and `k₁`
//!
//! ```text
//! |d_j(k₁) − d_j(k₀)| ≤ ‖a_j‖₁ ρ (H_{k₁} − H_{k₀}).
//! ```
//!
//! A column whose value is certified to stay above a reference can sleep until
//! the bound could be exhausted. Sleeping columns live in buckets keyed by
//! their wake iteration.
//!
//! Two query kinds exist. [`ScreeningState::refresh_and_select`] certifies
//! that sleeping columns are not the argmin (both the candidate and the
//! incumbent minimum are charged drift). [`ScreeningState::violated_superset`]
//! certifies that sleeping columns have `d_j > 0`. A state serves exactly one
//! kind, fixed at construction, since the certificates are not interchangeable.

use std::collections::HashMap;

use crate::lp_model::StandardFormLp;
use crate::scalar::{norm_inf, Scalar};

/// Which certificate the sleeping columns carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreeningMode {
    /// Sleeping columns are certified not to be the most violated.
    Argmin,
    /// Sleeping columns are certified to have positive reduced cost.
    Violated,
}

/// Upper bound on `H_{k1} − H_{k0} = Σ_{u=k0+1}^{k1} 1/u` for `k1 ≥ k0 ≥ 1`.
pub fn harmonic_gap(k0: usize, k1: usize) -> f64 {
    if k1 <= k0 {
        return 0.0;
    }
    const INFLATE: f64 = 1.0 + 1e-12;
    if k1 - k0 <= 64 {
        let s: f64 = (k0 + 1..=k1).map(|u| 1.0 / u as f64).sum();
        return s * INFLATE + 1e-300;
    }
    if k0 < 64 {
        return harmonic_gap(k0, 64) + harmonic_gap(64, k1);
    }
    // H_n = ln n + γ + 1/(2n) − 1/(12n²) + θ/(120n⁴), θ ∈ (0, 1).
    let (a, b) = (k0 as f64, k1 as f64);
    let log_ratio = ((b - a) / a).ln_1p();
    let upper = log_ratio + 0.5 / b - 0.5 / a - 1.0 / (12.0 * b * b)
        + 1.0 / (12.0 * a * a)
        + 1.0 / (120.0 * b.powi(4));
    upper * INFLATE + 1e-15
}

/// Per-column sleep bookkeeping for lazily evaluated reduced costs.
#[derive(Debug, Clone)]
pub struct ScreeningState<T> {
    mode: ScreeningMode,
    col_norms: Vec<f64>,
    col_nnz: Vec<usize>,
    d_snapshot: Vec<T>,
    snapshot_iter: Vec<usize>,
    wake_iter: Vec<usize>,
    buckets: HashMap<usize, Vec<usize>>,
    /// Next iteration whose bucket has not been drained.
    next_iter: usize,
    /// Per-iteration coordinate drift numerator `ρ`.
    drift_rate: f64,
    /// Bound on `‖y_t‖∞` along the run, used for rounding margins.
    y_radius: f64,
    cost_scale: f64,
    horizon: usize,
    active: Vec<usize>,
    touch_counter: u64,
}

impl<T: Scalar> ScreeningState<T> {
    /// Fresh state with every column awake at iteration `k_start`.
    /// `horizon` is the iteration at which every sleeping column is re-examined
    /// regardless of its certificate (typically `max_iters + 1`).
    pub fn new(
        mode: ScreeningMode,
        problem: &StandardFormLp<T>,
        eta: T,
        y_start: &[T],
        k_start: usize,
        horizon: usize,
    ) -> Self {
        let n = problem.ncols();
        let a = problem.a();
        let eta = eta.as_f64();
        let y_radius = eta.max(norm_inf(y_start).as_f64());
        let mut buckets = HashMap::new();
        buckets.insert(k_start, (0..n).collect());
        Self {
            mode,
            col_norms: (0..n).map(|j| a.col_norm1(j).as_f64()).collect(),
            col_nnz: (0..n).map(|j| a.col_nnz(j)).collect(),
            d_snapshot: vec![T::zero(); n],
            snapshot_iter: vec![0; n],
            wake_iter: vec![k_start; n],
            buckets,
            next_iter: k_start,
            drift_rate: eta + y_radius,
            y_radius,
            cost_scale: norm_inf(problem.c()).as_f64(),
            horizon: horizon.max(k_start + 1),
            active: Vec::new(),
            touch_counter: 0,
        }
    }

    pub fn mode(&self) -> ScreeningMode {
        self.mode
    }

    /// `‖a_j‖₁`.
    pub fn col_norm(&self, j: usize) -> f64 {
        self.col_norms[j]
    }

    /// Total number of column evaluations performed so far.
    pub fn touch_counter(&self) -> u64 {
        self.touch_counter
    }

    /// Columns evaluated by the most recent query (`S_k`).
    pub fn active_set(&self) -> &[usize] {
        &self.active
    }

    pub fn wake_iter(&self, j: usize) -> usize {
        self.wake_iter[j]
    }

    /// Whether column `j` is examined at iteration `k`.
    pub fn is_awake(&self, j: usize, k: usize) -> bool {
        self.wake_iter[j] <= k
    }

    pub fn d_snapshot(&self, j: usize) -> (T, usize) {
        (self.d_snapshot[j], self.snapshot_iter[j])
    }

    /// Upper bound on `|d_j(to) − d_j(from)|`.
    pub fn drift_bound(&self, j: usize, from: usize, to: usize) -> f64 {
        drift_bound(self.col_norms[j], self.drift_rate, from, to)
    }

    /// Smallest `k' > k` at which `gap` can be consumed by the drift of a
    /// column with norm `norm_j` plus a reference column with norm `norm_ref`.
    pub fn compute_wake(&self, gap: f64, k: usize, norm_j: f64, norm_ref: f64) -> usize {
        compute_wake(gap, k, norm_j + norm_ref, self.drift_rate, self.horizon)
    }

    /// Rounding allowance for comparing two computed reduced costs.
    fn margin(&self, cols: &[usize]) -> f64 {
        let eps = T::epsilon().as_f64();
        cols.iter()
            .map(|&j| {
                (self.col_nnz[j] as f64 + 2.0) * eps * (self.cost_scale + self.col_norms[j] * self.y_radius)
            })
            .sum::<f64>()
            * 2.0
    }

    fn drain(&mut self, k: usize) {
        assert!(k >= self.next_iter, "screening queried out of order: k = {k}");
        self.active.clear();
        while self.next_iter <= k {
            if let Some(cols) = self.buckets.remove(&self.next_iter) {
                self.active.extend(cols);
            }
            self.next_iter += 1;
        }
        self.active.sort_unstable();
    }

    fn evaluate(&mut self, k: usize, y: &[T], problem: &StandardFormLp<T>) {
        for &j in &self.active {
            self.d_snapshot[j] = problem.reduced_cost(j, y);
            self.snapshot_iter[j] = k;
        }
        self.touch_counter += self.active.len() as u64;
    }

    fn sleep(&mut self, j: usize, wake: usize) {
        self.wake_iter[j] = wake;
        self.buckets.entry(wake).or_default().push(j);
    }

    /// Evaluates `d` on `S_k` and returns the global argmin (lowest index on
    /// ties) and its value. Examined non-minimizing columns are put to sleep
    /// for as long as their gap to the minimum is certified.
    pub fn refresh_and_select(&mut self, y: &[T], k: usize, problem: &StandardFormLp<T>) -> (usize, T) {
        assert_eq!(self.mode, ScreeningMode::Argmin);
        self.drain(k);
        self.evaluate(k, y, problem);
        let mut best: Option<(usize, T)> = None;
        for &j in &self.active {
            let d = self.d_snapshot[j];
            if best.is_none_or(|(_, v)| d < v) {
                best = Some((j, d));
            }
        }
        let (i_min, d_min) = best.expect("argmin column is always awake");
        let norm_min = self.col_norms[i_min];
        let active = std::mem::take(&mut self.active);
        for &j in &active {
            let wake = if j == i_min {
                k + 1
            } else {
                let gap = (self.d_snapshot[j] - d_min).as_f64() - self.margin(&[j, i_min]);
                self.compute_wake(gap, k, self.col_norms[j], norm_min)
            };
            self.sleep(j, wake);
        }
        self.active = active;
        (i_min, d_min)
    }

    /// Evaluates `d` on `S_k` and returns the examined columns with their
    /// values. Every column not returned is certified to have `d_j(k) > 0`.
    pub fn violated_superset(&mut self, y: &[T], k: usize, problem: &StandardFormLp<T>) -> Vec<(usize, T)> {
        assert_eq!(self.mode, ScreeningMode::Violated);
        self.drain(k);
        self.evaluate(k, y, problem);
        let active = std::mem::take(&mut self.active);
        let mut out = Vec::with_capacity(active.len());
        for &j in &active {
            let d = self.d_snapshot[j];
            out.push((j, d));
            let gap = d.as_f64() - self.margin(&[j]);
            let wake = self.compute_wake(gap, k, self.col_norms[j], 0.0);
            self.sleep(j, wake);
        }
        self.active = active;
        out
    }
}

/// `‖a_j‖₁ ρ (H_to − H_from)`.
pub fn drift_bound(col_norm: f64, drift_rate: f64, from: usize, to: usize) -> f64 {
    if col_norm == 0.0 || to <= from {
        return 0.0;
    }
    col_norm * drift_rate * harmonic_gap(from, to)
}

/// Smallest `k' > k` with `norm_sum · ρ · (H_{k'} − H_k) ≥ gap`, capped at
/// `horizon` (returned when the gap can never be consumed before it).
pub fn compute_wake(gap: f64, k: usize, norm_sum: f64, drift_rate: f64, horizon: usize) -> usize {
    let cap = horizon.max(k + 1);
    if !(gap > 0.0) {
        return k + 1;
    }
    if norm_sum == 0.0 || drift_rate == 0.0 {
        return cap;
    }
    let reached = |t: usize| drift_bound(norm_sum, drift_rate, k, t) >= gap;
    // Exponential search for an upper bracket, then bisection.
    let mut lo = k; // reached(lo) is false (zero drift)
    let mut hi = k + 1;
    while !reached(hi) {
        if hi >= cap {
            return cap;
        }
        lo = hi;
        let step = (hi - k).max(1);
        hi = hi.saturating_add(step).min(cap);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reached(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CscMatrix;
    use rand::{Rng, SeedableRng};

    fn exact_harmonic_gap(k0: usize, k1: usize) -> f64 {
        (k0 + 1..=k1).map(|u| 1.0 / u as f64).sum()
    }

    #[test]
    fn harmonic_gap_is_tight_upper_bound() {
        for &(a, b) in &[(1, 2), (1, 100), (10, 11), (10, 5000), (999, 1_000_000), (123_456, 123_600)] {
            let exact = exact_harmonic_gap(a, b);
            let bound = harmonic_gap(a, b);
            assert!(bound >= exact, "({a},{b}) {bound} < {exact}");
            assert!(bound - exact <= 1e-10 * (1.0 + exact), "({a},{b}) loose: {bound} vs {exact}");
        }
        assert_eq!(harmonic_gap(7, 7), 0.0);
    }

    #[test]
    fn drift_bound_examples() {
        assert_eq!(drift_bound(1.0, 2.0, 5, 5), 0.0);
        // L = 1, eta = 1 (rate 2), one step from 10 to 11: 2/11.
        assert!((drift_bound(1.0, 2.0, 10, 11) - 2.0 / 11.0).abs() < 1e-12);
        assert_eq!(drift_bound(0.0, 2.0, 1, 1000), 0.0);
    }

    #[test]
    fn compute_wake_examples() {
        assert_eq!(compute_wake(0.0, 10, 2.0, 2.0, 1000), 11);
        // 4 (H_k' - H_10) >= 0.5 first holds at k' = 12.
        assert_eq!(compute_wake(0.5, 10, 2.0, 2.0, 1000), 12);
        assert_eq!(compute_wake(3.0, 10, 0.0, 2.0, 1000), 1000);
        assert_eq!(compute_wake(f64::INFINITY, 10, 1.0, 2.0, 77), 77);
    }

    #[test]
    fn compute_wake_is_minimal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let k = rng.gen_range(1..5000);
            let gap = rng.gen_range(0.0..5.0);
            let norm = rng.gen_range(0.1..3.0);
            let w = compute_wake(gap, k, norm, 2.0, usize::MAX);
            assert!(w > k);
            assert!(drift_bound(norm, 2.0, k, w) >= gap);
            assert!(w == k + 1 || drift_bound(norm, 2.0, k, w - 1) < gap);
        }
    }

    fn random_problem(seed: u64, m: usize, n: usize) -> StandardFormLp<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect())
            .collect();
        let c = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
        StandardFormLp::new(CscMatrix::from_dense_rows(&rows), vec![0.0; m], c).unwrap()
    }

    /// Random walk of dual iterates obeying the solver's update rule.
    fn dual_walk(seed: u64, m: usize, eta: f64, steps: usize) -> Vec<Vec<f64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![0.0; m];
        let mut out = vec![y.clone()];
        for k in 1..steps {
            let kf = k as f64;
            for yi in y.iter_mut() {
                let s = if rng.gen_bool(0.5) { eta } else { -eta };
                *yi = kf / (kf + 1.0) * *yi + s / (kf + 1.0);
            }
            out.push(y.clone());
        }
        out
    }

    #[test]
    fn first_call_examines_everything() {
        let p = random_problem(1, 5, 12);
        let mut st = ScreeningState::new(ScreeningMode::Argmin, &p, 1.0, &[0.0; 5], 1, 100);
        let y = vec![0.0; 5];
        let (i, d) = st.refresh_and_select(&y, 1, &p);
        assert_eq!(st.touch_counter(), 12);
        let dense = p.reduced_costs(&y);
        let (ti, td) = crate::fwlp::most_violated_index(&dense);
        assert_eq!((i, d), (ti, td));
    }

    #[test]
    fn select_matches_dense_scan() {
        for seed in 0..10 {
            let p = random_problem(seed, 30, 30);
            let eta = 1.5;
            let walk = dual_walk(seed + 100, 30, eta, 300);
            let mut st = ScreeningState::new(ScreeningMode::Argmin, &p, eta, &walk[0], 1, 10_000);
            for (t, y) in walk.iter().enumerate() {
                let k = t + 1;
                let (i, d) = st.refresh_and_select(y, k, &p);
                let dense = p.reduced_costs(y);
                assert_eq!((i, d), crate::fwlp::most_violated_index(&dense), "seed {seed} k {k}");
                for j in 0..p.ncols() {
                    if !st.active_set().contains(&j) {
                        assert!(dense[j] > d, "sleeping column {j} masks the minimum");
                    }
                }
            }
        }
    }

    #[test]
    fn violated_superset_is_sound() {
        for seed in 0..10 {
            let p = random_problem(seed, 20, 20);
            let eta = 1.0;
            let walk = dual_walk(seed + 7, 20, eta, 300);
            let mut st = ScreeningState::new(ScreeningMode::Violated, &p, eta, &walk[0], 1, 10_000);
            for (t, y) in walk.iter().enumerate() {
                let got = st.violated_superset(y, t + 1, &p);
                let dense = p.reduced_costs(y);
                for (j, &dj) in dense.iter().enumerate() {
                    if dj < 0.0 {
                        assert!(got.iter().any(|&(i, v)| i == j && v == dj), "seed {seed}: column {j} missed");
                    }
                }
            }
        }
    }

    #[test]
    fn single_awake_column_costs_one_touch() {
        // Column 0 is hugely attractive, the others can never catch up before the horizon.
        let a = CscMatrix::from_dense_rows(&[vec![1.0, 0.01, 0.01, 0.01]]);
        let p = StandardFormLp::new(a, vec![1.0], vec![-10.0, 50.0, 60.0, 70.0]).unwrap();
        let mut st = ScreeningState::new(ScreeningMode::Argmin, &p, 1.0, &[0.0], 1, 1000);
        st.refresh_and_select(&[0.0], 1, &p);
        let before = st.touch_counter();
        st.refresh_and_select(&[0.5], 2, &p);
        assert_eq!(st.touch_counter() - before, 1);
        assert_eq!(st.active_set(), &[0]);
    }

    #[test]
    fn positive_margin_shrinks_violated_set() {
        // Strictly dual feasible y: every slack eventually certified positive.
        let a = CscMatrix::from_dense_rows(&[vec![1.0, 1.0, 2.0]]);
        let p = StandardFormLp::new(a, vec![1.0], vec![3.0, 4.0, 5.0]).unwrap();
        let mut st = ScreeningState::new(ScreeningMode::Violated, &p, 0.1, &[0.0], 1, 1_000_000);
        let mut sizes = Vec::new();
        for k in 1..200 {
            sizes.push(st.violated_superset(&[0.05], k, &p).len());
        }
        assert_eq!(sizes[0], 3);
        assert_eq!(*sizes.last().unwrap(), 0);
    }
}
