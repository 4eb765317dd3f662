//! Reading MPS files, conversion to standard form, synthetic instances and
//! CSV traces.

pub mod generate;
pub mod mps;
pub mod standard_form;
pub mod trace;
