//! Random standard-form LPs with a known primal-dual optimal pair.
//!
//! The primal optimizer is supported on `m` columns, `b = Ax*`, and the
//! cost is tight on the support and strictly slack elsewhere, so `(x*, y*)`
//! satisfies feasibility and complementary slackness by construction.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lp_model::{ModelError, StandardFormLp};
use crate::sparse::CscMatrix;

const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("need n > m >= 1, got m = {m}, n = {n}")]
    BadShape { m: usize, n: usize },
    #[error("density must lie in (0, 1], got {0}")]
    BadDensity(f64),
    #[error("value_scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("no full-row-rank matrix after {0} attempts")]
    RankDeficiencyRetryLimit(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub problem: StandardFormLp<f64>,
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    /// `2‖x*‖₁`
    pub xi_min: f64,
    /// `2‖y*‖∞`
    pub eta_min: f64,
}

/// Rank of a dense row-major matrix by Gaussian elimination with partial
/// pivoting.
pub fn numerical_rank(rows: &[Vec<f64>]) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE) * (m.max(n) as f64);
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let pivot = (rank..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col].abs() <= tol {
            continue;
        }
        a.swap(rank, pivot);
        for i in rank + 1..m {
            let f = a[i][col] / a[rank][col];
            if f != 0.0 {
                for j in col..n {
                    a[i][j] -= f * a[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Draws an instance from `seed`. Nonzeros of `A` are uniform in
/// `[−value_scale, value_scale]`, each entry present with probability
/// `density`.
pub fn generate_instance(
    seed: u64,
    m: usize,
    n: usize,
    density: f64,
    value_scale: f64,
) -> Result<GeneratedInstance, GenerateError> {
    if m == 0 || n <= m {
        return Err(GenerateError::BadShape { m, n });
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenerateError::BadDensity(density));
    }
    if !(value_scale > 0.0 && value_scale.is_finite()) {
        return Err(GenerateError::BadScale(value_scale));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut rows = None;
    for _ in 0..MAX_ATTEMPTS {
        let cand: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.gen_bool(density) {
                            rng.gen_range(-value_scale..=value_scale)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        if numerical_rank(&cand) == m {
            rows = Some(cand);
            break;
        }
    }
    let rows = rows.ok_or(GenerateError::RankDeficiencyRetryLimit(MAX_ATTEMPTS))?;
    let a = CscMatrix::from_dense_rows(&rows);

    let mut x_star = vec![0.0; n];
    let support = sample(&mut rng, n, m);
    for j in support.iter() {
        x_star[j] = rng.gen_range(0.5..1.5);
    }
    let y_star: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = a.mul_vec(&x_star);
    let aty = a.tr_mul_vec(&y_star);
    let c: Vec<f64> = (0..n)
        .map(|j| if x_star[j] > 0.0 { aty[j] } else { aty[j] + rng.gen_range(0.1..1.1) })
        .collect();

    let xi_min = 2.0 * x_star.iter().map(|v| v.abs()).sum::<f64>();
    let eta_min = 2.0 * y_star.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let problem = StandardFormLp::new(a, b, c)?;
    Ok(GeneratedInstance { problem, x_star, y_star, xi_min, eta_min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_instance(42, 10, 20, 0.5, 1.0).unwrap();
        let b = generate_instance(42, 10, 20, 0.5, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_instance(43, 10, 20, 0.5, 1.0).unwrap());
    }

    #[test]
    fn optimality_invariants() {
        for seed in 0..20 {
            let g = generate_instance(seed, 6, 15, 0.6, 2.0).unwrap();
            let p = &g.problem;
            let res = p.residual(&g.x_star);
            assert!(res.iter().all(|r| r.abs() <= 1e-12));
            let d = p.reduced_costs(&g.y_star);
            for j in 0..15 {
                if g.x_star[j] > 0.0 {
                    assert!(d[j].abs() <= 1e-12);
                } else {
                    assert!(d[j] > 0.0);
                }
            }
            let cx: f64 = p.c().iter().zip(&g.x_star).map(|(c, x)| c * x).sum();
            let by: f64 = p.b().iter().zip(&g.y_star).map(|(b, y)| b * y).sum();
            assert!((cx - by).abs() <= 1e-10);
            assert_eq!(g.x_star.iter().filter(|&&v| v > 0.0).count(), 6);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(generate_instance(0, 3, 3, 0.5, 1.0), Err(GenerateError::BadShape { m: 3, n: 3 }));
        assert_eq!(generate_instance(0, 0, 3, 0.5, 1.0), Err(GenerateError::BadShape { m: 0, n: 3 }));
        assert_eq!(generate_instance(0, 2, 3, 0.0, 1.0), Err(GenerateError::BadDensity(0.0)));
    }

    #[test]
    fn hopeless_density_hits_retry_limit() {
        // Almost every draw has an empty row.
        assert_eq!(
            generate_instance(1, 30, 31, 1e-6, 1.0),
            Err(GenerateError::RankDeficiencyRetryLimit(MAX_ATTEMPTS))
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&[vec![1.0, 2.0], vec![2.0, 4.0]]), 1);
        assert_eq!(numerical_rank(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]), 2);
        assert_eq!(numerical_rank(&[vec![0.0, 0.0]]), 0);
    }
}
