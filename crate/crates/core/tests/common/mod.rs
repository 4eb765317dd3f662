#![allow(dead_code)]

use fwlp::io::generate::{generate_instance, GeneratedInstance};
use fwlp::{Algorithm, CscMatrix, DiagnosticsRecord, Solver, SolverParams, StandardFormLp};

pub fn one_by_one() -> StandardFormLp<f64> {
    StandardFormLp::new(CscMatrix::from_dense_rows(&[vec![1.0]]), vec![1.0], vec![1.0]).unwrap()
}

pub fn instance(seed: u64, m: usize, n: usize) -> GeneratedInstance {
    generate_instance(seed, m, n, 0.5, 1.0).unwrap()
}

pub fn params_for(g: &GeneratedInstance) -> SolverParams<f64> {
    SolverParams::new(g.xi_min, g.eta_min).with_tol(0.0)
}

/// Every record of a run from zero, with convergence stopping disabled.
pub fn records(
    problem: &StandardFormLp<f64>,
    params: SolverParams<f64>,
    algorithm: Algorithm,
    iters: usize,
) -> Vec<DiagnosticsRecord<f64>> {
    let params = params.with_max_iters(iters).with_tol(0.0);
    let mut solver = Solver::from_zero(problem, params, algorithm).unwrap();
    let mut out = Vec::new();
    solver.run(|_, rec, _| out.push(rec.clone()));
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
