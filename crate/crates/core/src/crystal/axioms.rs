use std::fmt;

use super::{evaluate_holonomy, AffineIsometry, CrystalError, CrystalGroupSpec};
use crate::linalg::RVector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    /// A relator does not evaluate to the identity isometry.
    Relator { word: String, value: AffineIsometry },
    /// The holonomy map does not kill a relator.
    HolonomyRelator { word: String },
    /// The i-th translation word is not translation by `e_i`.
    MuWord {
        index: usize,
        word: String,
        value: AffineIsometry,
    },
    /// Two translation words do not commute.
    MuCommute { first: String, second: String },
}

impl fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomFailure::Relator { word, value } => {
                write!(f, "relator {word} evaluates to {value}, not the identity")
            }
            AxiomFailure::HolonomyRelator { word } => {
                write!(f, "holonomy of relator {word} is not the identity")
            }
            AxiomFailure::MuWord { index, word, value } => {
                write!(
                    f,
                    "translation word {} ({word}) evaluates to {value}, not translation by e_{}",
                    index + 1,
                    index + 1
                )
            }
            AxiomFailure::MuCommute { first, second } => {
                write!(f, "translation words {first} and {second} do not commute")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks relators, translation words, and the holonomy homomorphism on an
/// explicit spec.
pub fn check_group_axioms(spec: &CrystalGroupSpec) -> Result<AxiomReport, CrystalError> {
    let gens = spec.isometries()?;
    let holonomies = spec.holonomies();
    let mut report = AxiomReport::default();

    for w in spec.relators() {
        let word = spec.render_word(w);
        if !evaluate_holonomy(w, &holonomies)?.is_identity() {
            report
                .failures
                .push(AxiomFailure::HolonomyRelator { word: word.clone() });
        }
        let value = super::evaluate_word(w, &gens)?;
        if !value.is_identity() {
            report.failures.push(AxiomFailure::Relator { word, value });
        }
    }

    let mut mus = Vec::new();
    for (index, w) in spec.mu_words().iter().enumerate() {
        let value = super::evaluate_word(w, &gens)?;
        let expected = AffineIsometry::translation_by(RVector::unit(spec.dim(), index));
        if value != expected {
            report.failures.push(AxiomFailure::MuWord {
                index,
                word: spec.render_word(w),
                value: value.clone(),
            });
        }
        mus.push(value);
    }
    for i in 0..mus.len() {
        for j in (i + 1)..mus.len() {
            if mus[i].compose(&mus[j]) != mus[j].compose(&mus[i]) {
                report.failures.push(AxiomFailure::MuCommute {
                    first: spec.render_word(&spec.mu_words()[i]),
                    second: spec.render_word(&spec.mu_words()[j]),
                });
            }
        }
    }
    Ok(report)
}
