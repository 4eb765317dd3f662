//! Conversion of a [`GeneralLp`] to `min cᵀx, Ax = b, x ≥ 0`.
//!
//! Column layout: one or two columns per original variable (in order), then
//! one slack or surplus column per inequality row, then one slack per
//! variable with a finite range. Range rows come after the original rows.

use thiserror::Error;

use crate::io::mps::{GeneralLp, RowKind};
use crate::lp_model::{ModelError, StandardFormLp};
use crate::sparse::CscMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConversionError {
    #[error("column {column:?} has lower bound {lower} above upper bound {upper}")]
    InconsistentBounds { column: String, lower: f64, upper: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How an original variable is expressed in standard-form columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarMap {
    /// `x = lower + x[col]`
    Shifted { col: usize, lower: f64 },
    /// `x = upper − x[col]`
    Reflected { col: usize, upper: f64 },
    /// `x = x[pos] − x[neg]`
    Split { pos: usize, neg: usize },
}

/// Recovers original variables and objective from a standard-form point.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableMapping {
    pub vars: Vec<VarMap>,
    /// Original objective = standard-form objective + `objective_offset`.
    pub objective_offset: f64,
}

impl VariableMapping {
    pub fn recover(&self, x: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|m| match *m {
                VarMap::Shifted { col, lower } => lower + x[col],
                VarMap::Reflected { col, upper } => upper - x[col],
                VarMap::Split { pos, neg } => x[pos] - x[neg],
            })
            .collect()
    }
}

/// Builds the standard form of `lp` and the mapping back to its variables.
pub fn to_standard_form(lp: &GeneralLp) -> Result<(StandardFormLp<f64>, VariableMapping), ConversionError> {
    let n0 = lp.ncols();
    let mut vars = Vec::with_capacity(n0);
    let mut ranged = Vec::new();
    let mut ncols = 0;
    for j in 0..n0 {
        let (lo, up) = (lp.lower[j], lp.upper[j]);
        if lo > up {
            return Err(ConversionError::InconsistentBounds { column: lp.col_names[j].clone(), lower: lo, upper: up });
        }
        let map = if lo.is_finite() {
            if up.is_finite() {
                ranged.push((j, ncols, up - lo));
            }
            VarMap::Shifted { col: ncols, lower: lo }
        } else if up.is_finite() {
            VarMap::Reflected { col: ncols, upper: up }
        } else {
            ncols += 1;
            VarMap::Split { pos: ncols - 1, neg: ncols }
        };
        ncols += 1;
        vars.push(map);
    }

    let m0 = lp.nrows();
    let mut b = lp.rhs.clone();
    let mut triplets = Vec::with_capacity(lp.entries.len() * 2 + m0 + 2 * ranged.len());
    for &(i, j, v) in &lp.entries {
        match vars[j] {
            VarMap::Shifted { col, lower } => {
                triplets.push((i, col, v));
                b[i] -= v * lower;
            }
            VarMap::Reflected { col, upper } => {
                triplets.push((i, col, -v));
                b[i] -= v * upper;
            }
            VarMap::Split { pos, neg } => {
                triplets.push((i, pos, v));
                triplets.push((i, neg, -v));
            }
        }
    }
    for (i, kind) in lp.row_kinds.iter().enumerate() {
        let sign = match kind {
            RowKind::Eq => continue,
            RowKind::Le => 1.0,
            RowKind::Ge => -1.0,
        };
        triplets.push((i, ncols, sign));
        ncols += 1;
    }
    for (r, &(_, col, width)) in ranged.iter().enumerate() {
        triplets.push((m0 + r, col, 1.0));
        triplets.push((m0 + r, ncols, 1.0));
        b.push(width);
        ncols += 1;
    }

    let mut c = vec![0.0; ncols];
    let mut offset = lp.objective_constant;
    for (j, &cj) in lp.cost.iter().enumerate() {
        match vars[j] {
            VarMap::Shifted { col, lower } => {
                c[col] = cj;
                offset += cj * lower;
            }
            VarMap::Reflected { col, upper } => {
                c[col] = -cj;
                offset += cj * upper;
            }
            VarMap::Split { pos, neg } => {
                c[pos] = cj;
                c[neg] = -cj;
            }
        }
    }

    let a = CscMatrix::from_triplets(b.len(), ncols, &triplets);
    let problem = StandardFormLp::new(a, b, c)?;
    Ok((problem, VariableMapping { vars, objective_offset: offset }))
}
