//! Reader for a subset of MPS: NAME, ROWS (N/E/L/G), COLUMNS, RHS, BOUNDS
//! (LO/UP/FX/FR/MI/PL) and ENDATA.
//!
//! Fields are split on whitespace, so fixed-format files and free-format
//! files read identically as long as names contain no spaces. A line is a
//! section header when it starts in column 1 with a section keyword (alone
//! on the line for the supported sections other than NAME); any other line
//! is data for the current section.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsError {
    #[error("unsupported MPS section or feature: {0}")]
    UnsupportedSection(String),
    #[error("line {line}: {reason}")]
    MalformedField { line: usize, reason: String },
    #[error("line {line}: duplicate {what}")]
    DuplicateEntry { line: usize, what: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `aᵀx = b`
    Eq,
    /// `aᵀx ≤ b`
    Le,
    /// `aᵀx ≥ b`
    Ge,
}

/// Linear program as written in the file: constraint rows with senses and
/// per-variable bounds `lower ≤ x ≤ upper` (either side may be infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralLp {
    pub name: String,
    pub objective_name: String,
    /// Constant added to the objective (the negated objective-row RHS).
    pub objective_constant: f64,
    pub row_names: Vec<String>,
    pub row_kinds: Vec<RowKind>,
    pub rhs: Vec<f64>,
    pub col_names: Vec<String>,
    pub cost: Vec<f64>,
    /// `(row, col, value)` with no repeated `(row, col)` pair.
    pub entries: Vec<(usize, usize, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl GeneralLp {
    pub fn nrows(&self) -> usize {
        self.row_names.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_names.len()
    }

    /// Objective value at `x` (including the constant).
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.objective_constant + self.cost.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Row activities `Ax`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows()];
        for &(i, j, v) in &self.entries {
            out[i] += v * x[j];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
}

enum RowRef {
    Objective,
    /// Extra N rows are free rows and carry no constraint.
    Ignored,
    Constraint(usize),
}

struct Parser {
    lp: GeneralLp,
    row_index: HashMap<String, usize>,
    free_rows: Vec<String>,
    col_index: HashMap<String, usize>,
    seen_coef: HashSet<(usize, usize)>,
    seen_rhs: Vec<bool>,
    seen_obj_rhs: bool,
}

/// Sections of the wider MPS family that this reader refuses.
const UNSUPPORTED_SECTIONS: &[&str] = &[
    "RANGES", "SOS", "OBJSENSE", "OBJSENCE", "QUADOBJ", "QMATRIX", "QSECTION", "QCMATRIX",
    "CSECTION", "INDICATORS", "LAZYCONS", "USERCUTS", "GENCONS", "PWLOBJ", "SETS",
];

fn malformed(line: usize, reason: impl Into<String>) -> MpsError {
    MpsError::MalformedField { line, reason: reason.into() }
}

fn number(tok: &str, line: usize) -> Result<f64, MpsError> {
    let v: f64 = tok.parse().map_err(|_| malformed(line, format!("not a number: {tok:?}")))?;
    if !v.is_finite() {
        return Err(malformed(line, format!("non-finite value: {tok:?}")));
    }
    Ok(v)
}

impl Parser {
    fn new() -> Self {
        Self {
            lp: GeneralLp {
                name: String::new(),
                objective_name: String::new(),
                objective_constant: 0.0,
                row_names: Vec::new(),
                row_kinds: Vec::new(),
                rhs: Vec::new(),
                col_names: Vec::new(),
                cost: Vec::new(),
                entries: Vec::new(),
                lower: Vec::new(),
                upper: Vec::new(),
            },
            row_index: HashMap::new(),
            free_rows: Vec::new(),
            col_index: HashMap::new(),
            seen_coef: HashSet::new(),
            seen_rhs: Vec::new(),
            seen_obj_rhs: false,
        }
    }

    fn row(&self, name: &str, line: usize) -> Result<RowRef, MpsError> {
        if name == self.lp.objective_name {
            Ok(RowRef::Objective)
        } else if let Some(&i) = self.row_index.get(name) {
            Ok(RowRef::Constraint(i))
        } else if self.free_rows.iter().any(|r| r == name) {
            Ok(RowRef::Ignored)
        } else {
            Err(malformed(line, format!("unknown row {name:?}")))
        }
    }

    fn rows_line(&mut self, f: &[&str], line: usize) -> Result<(), MpsError> {
        let [kind, name] = f else {
            return Err(malformed(line, "ROWS entry needs a type and a name"));
        };
        let name = name.to_string();
        if name == self.lp.objective_name || self.row_index.contains_key(&name) || self.free_rows.contains(&name) {
            return Err(MpsError::DuplicateEntry { line, what: format!("row {name:?}") });
        }
        let kind = match *kind {
            "N" if self.lp.objective_name.is_empty() => {
                self.lp.objective_name = name;
                return Ok(());
            }
            "N" => {
                self.free_rows.push(name);
                return Ok(());
            }
            "E" => RowKind::Eq,
            "L" => RowKind::Le,
            "G" => RowKind::Ge,
            other => return Err(malformed(line, format!("unknown row type {other:?}"))),
        };
        self.row_index.insert(name.clone(), self.lp.row_names.len());
        self.lp.row_names.push(name);
        self.lp.row_kinds.push(kind);
        self.lp.rhs.push(0.0);
        self.seen_rhs.push(false);
        Ok(())
    }

    fn columns_line(&mut self, f: &[&str], line: usize) -> Result<(), MpsError> {
        if f.iter().any(|t| t.trim_matches('\'') == "MARKER") {
            return Err(MpsError::UnsupportedSection("MARKER".into()));
        }
        if f.len() != 3 && f.len() != 5 {
            return Err(malformed(line, "COLUMNS entry needs a column and one or two (row, value) pairs"));
        }
        let col = match self.col_index.get(f[0]) {
            Some(&j) => j,
            None => {
                let j = self.lp.col_names.len();
                self.col_index.insert(f[0].to_string(), j);
                self.lp.col_names.push(f[0].to_string());
                self.lp.cost.push(0.0);
                self.lp.lower.push(0.0);
                self.lp.upper.push(f64::INFINITY);
                j
            }
        };
        for pair in f[1..].chunks(2) {
            let v = number(pair[1], line)?;
            match self.row(pair[0], line)? {
                RowRef::Objective => {
                    // The objective row gets a key past every constraint row.
                    if !self.seen_coef.insert((usize::MAX, col)) {
                        return Err(MpsError::DuplicateEntry { line, what: format!("cost of column {:?}", f[0]) });
                    }
                    self.lp.cost[col] = v;
                }
                RowRef::Ignored => {}
                RowRef::Constraint(i) => {
                    if !self.seen_coef.insert((i, col)) {
                        return Err(MpsError::DuplicateEntry {
                            line,
                            what: format!("coefficient ({:?}, {:?})", pair[0], f[0]),
                        });
                    }
                    if v != 0.0 {
                        self.lp.entries.push((i, col, v));
                    }
                }
            }
        }
        Ok(())
    }

    fn rhs_line(&mut self, f: &[&str], line: usize) -> Result<(), MpsError> {
        // An odd field count means a leading RHS set name.
        let pairs = match f.len() {
            2 | 4 => f,
            3 | 5 => &f[1..],
            _ => return Err(malformed(line, "RHS entry needs one or two (row, value) pairs")),
        };
        for pair in pairs.chunks(2) {
            let v = number(pair[1], line)?;
            match self.row(pair[0], line)? {
                RowRef::Objective => {
                    if std::mem::replace(&mut self.seen_obj_rhs, true) {
                        return Err(MpsError::DuplicateEntry { line, what: "objective RHS".into() });
                    }
                    self.lp.objective_constant = -v;
                }
                RowRef::Ignored => {}
                RowRef::Constraint(i) => {
                    if std::mem::replace(&mut self.seen_rhs[i], true) {
                        return Err(MpsError::DuplicateEntry { line, what: format!("RHS of row {:?}", pair[0]) });
                    }
                    self.lp.rhs[i] = v;
                }
            }
        }
        Ok(())
    }

    fn bounds_line(&mut self, f: &[&str], line: usize) -> Result<(), MpsError> {
        let kind = *f.first().ok_or_else(|| malformed(line, "empty BOUNDS entry"))?;
        let takes_value = match kind {
            "LO" | "UP" | "FX" => true,
            "FR" | "MI" | "PL" => false,
            "BV" | "LI" | "UI" | "SC" => return Err(MpsError::UnsupportedSection(format!("{kind} bound"))),
            other => return Err(malformed(line, format!("unknown bound type {other:?}"))),
        };
        let (col_name, value) = match (takes_value, f.len()) {
            (true, 3) => (f[1], Some(number(f[2], line)?)),
            (true, 4) => (f[2], Some(number(f[3], line)?)),
            (false, 2) => (f[1], None),
            (false, 3) => (f[2], None),
            _ => return Err(malformed(line, format!("wrong field count for {kind} bound"))),
        };
        let j = *self
            .col_index
            .get(col_name)
            .ok_or_else(|| malformed(line, format!("unknown column {col_name:?}")))?;
        let (lo, up) = (&mut self.lp.lower[j], &mut self.lp.upper[j]);
        match (kind, value) {
            ("LO", Some(v)) => *lo = v,
            ("UP", Some(v)) => *up = v,
            ("FX", Some(v)) => {
                *lo = v;
                *up = v;
            }
            ("FR", _) => {
                *lo = f64::NEG_INFINITY;
                *up = f64::INFINITY;
            }
            ("MI", _) => *lo = f64::NEG_INFINITY,
            ("PL", _) => *up = f64::INFINITY,
            _ => unreachable!(),
        }
        Ok(())
    }
}

/// Parses MPS text into a [`GeneralLp`].
pub fn parse_mps(text: &str) -> Result<GeneralLp, MpsError> {
    let mut p = Parser::new();
    let mut section = Section::None;
    let mut ended = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if ended {
            return Err(malformed(line, "content after ENDATA"));
        }
        let keyword = fields[0];
        // Supported headers other than NAME stand alone on their line. This
        // keeps a column-1 RHS entry whose set is named "RHS" from reading
        // as a header.
        let is_header = !raw.starts_with(char::is_whitespace)
            && (keyword == "NAME"
                || UNSUPPORTED_SECTIONS.contains(&keyword)
                || (fields.len() == 1 && matches!(keyword, "ROWS" | "COLUMNS" | "RHS" | "BOUNDS" | "ENDATA")));
        if is_header {
            section = match keyword {
                "NAME" => {
                    p.lp.name = fields[1..].join(" ");
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    ended = true;
                    Section::None
                }
                other => return Err(MpsError::UnsupportedSection(other.to_string())),
            };
            continue;
        }
        match section {
            Section::Rows => p.rows_line(&fields, line)?,
            Section::Columns => p.columns_line(&fields, line)?,
            Section::Rhs => p.rhs_line(&fields, line)?,
            Section::Bounds => p.bounds_line(&fields, line)?,
            Section::None => return Err(malformed(line, "data line outside of a section")),
        }
    }
    if !ended {
        return Err(malformed(text.lines().count(), "missing ENDATA"));
    }
    if p.lp.objective_name.is_empty() {
        return Err(malformed(0, "no objective (N) row"));
    }
    Ok(p.lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
NAME          TINY
ROWS
 N  COST
 E  R1
COLUMNS
    X         COST      1.0        R1        1.0
RHS
    RHS       R1        1.0
ENDATA
";

    #[test]
    fn minimal_file() {
        let lp = parse_mps(TINY).unwrap();
        assert_eq!(lp.name, "TINY");
        assert_eq!(lp.row_kinds, vec![RowKind::Eq]);
        assert_eq!(lp.cost, vec![1.0]);
        assert_eq!(lp.entries, vec![(0, 0, 1.0)]);
        assert_eq!(lp.rhs, vec![1.0]);
        assert_eq!((lp.lower[0], lp.upper[0]), (0.0, f64::INFINITY));
    }

    #[test]
    fn ranges_rejected() {
        let text = TINY.replace("ENDATA", "RANGES\n    RNG       R1        2.0\nENDATA");
        assert_eq!(parse_mps(&text), Err(MpsError::UnsupportedSection("RANGES".into())));
    }

    #[test]
    fn duplicate_coefficient_rejected() {
        let text = TINY.replace("RHS\n", "    X         R1        2.0\nRHS\n");
        assert!(matches!(parse_mps(&text), Err(MpsError::DuplicateEntry { line: 7, .. })));
    }

    #[test]
    fn bad_number_and_unknown_row() {
        let text = TINY.replace("R1        1.0\nENDATA", "R1        abc\nENDATA");
        assert!(matches!(parse_mps(&text), Err(MpsError::MalformedField { line: 8, .. })));
        let text = TINY.replace("    RHS       R1", "    RHS       R9");
        assert!(matches!(parse_mps(&text), Err(MpsError::MalformedField { .. })));
    }

    #[test]
    fn objective_rhs_is_negated_constant() {
        let text = TINY.replace("    RHS       R1        1.0", "    RHS       R1        1.0   COST   3.5");
        assert_eq!(parse_mps(&text).unwrap().objective_constant, -3.5);
    }

    #[test]
    fn marker_rejected() {
        let text = TINY.replace(
            "COLUMNS\n",
            "COLUMNS\n    M1        'MARKER'                 'INTORG'\n",
        );
        assert_eq!(parse_mps(&text), Err(MpsError::UnsupportedSection("MARKER".into())));
    }
}
