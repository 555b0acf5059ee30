//! Block–Marschak polynomials and their negative parts.
//!
//! `K(y, Y) = Σ_{Z ⊇ Y} (−1)^{|Z∖Y|} P₀(y, Z)`. A choice function is a
//! random utility model exactly when every `K(y, Y)` is nonnegative, so the
//! total negative part is a finite-inequality measure of irrationality to set
//! beside the linear-program distance.

use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::exactnum::Rational;
use crate::rum::{rum_min_eps, ChoiceMatrix, RumInstance};

/// One polynomial value per pair, in the instance's pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct BmVector {
    pub values: Vec<Rational>,
}

pub fn bm_polynomials(inst: &RumInstance) -> BmVector {
    let index = inst.index();
    let full: u32 = (1u32 << index.num_alternatives()) - 1;
    let p0 = inst.choice();
    let values = index
        .pairs()
        .iter()
        .map(|&(y, menu)| {
            let outside = full & !menu;
            let mut acc = Rational::zero();
            // Walk every subset of the alternatives outside the menu.
            let mut extra = outside;
            loop {
                let z = menu | extra;
                let term = &p0[index.row_of(y, z).expect("supersets keep y")];
                if extra.count_ones().is_multiple_of(2) {
                    acc += term;
                } else {
                    acc -= term;
                }
                if extra == 0 {
                    break;
                }
                extra = (extra - 1) & outside;
            }
            acc
        })
        .collect();
    BmVector { values }
}

/// `Σ max(−K(y,Y), 0)`.
pub fn bm_negative_norm(inst: &RumInstance) -> Rational {
    bm_polynomials(inst)
        .values
        .iter()
        .filter(|k| k.is_negative())
        .map(|k| -k)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoffmanDiagnostic {
    pub epsilon_min: Rational,
    pub negative_norm: Rational,
    /// `epsilon_min / negative_norm`, absent when the norm is zero.
    pub ratio: Option<Rational>,
}

/// Observed ratio between the additive distance and the BM negative part.
pub fn hoffman_ratio(inst: &RumInstance, matrix: &ChoiceMatrix) -> Result<HoffmanDiagnostic> {
    let epsilon_min = rum_min_eps(inst, matrix)?.epsilon_min;
    let negative_norm = bm_negative_norm(inst);
    let ratio = (!negative_norm.is_zero()).then(|| &epsilon_min / &negative_norm);
    Ok(HoffmanDiagnostic {
        epsilon_min,
        negative_norm,
        ratio,
    })
}
