use super::{evaluate_holonomy, CrystalError, CrystalGroupSpec, Mode, Word};
use crate::linalg::{solve_linear, LinearSolution, RMatrix, RVector};

/// Output of [`solve_translation_parts`].
#[derive(Debug, Clone)]
pub struct TranslationSolution {
    /// The canonical solution (free variables zero) installed into the spec.
    pub spec: CrystalGroupSpec,
    /// Directions in the stacked unknown vector `(t_1, ..., t_p)` along which
    /// the solution may move.
    pub null_space: Vec<RVector>,
}

/// Coefficients of the translation part of `w` as a linear map of the
/// stacked unknowns `(t_1, ..., t_p)`, from `(A, a)∘(B, b) = (AB, a + A b)`.
fn translation_coefficients(w: &Word, holonomies: &[RMatrix]) -> Result<RMatrix, CrystalError> {
    let n = holonomies[0].rows();
    let inverses = holonomies.iter().map(RMatrix::inverse).collect::<Result<Vec<_>, _>>()?;
    let mut coeffs = RMatrix::zeros(n, n * holonomies.len());
    let mut prefix = RMatrix::identity(n);
    for letter in &w.0 {
        let g = letter.generator;
        // g^-1 = (θ^-1, -θ^-1 t)
        let block = if letter.inverse {
            (&prefix * &inverses[g]).scale(&-crate::linalg::int(1))
        } else {
            prefix.clone()
        };
        let mut current = coeffs.submatrix(0, n, g * n, (g + 1) * n);
        current = current.add(&block);
        coeffs.set_block(0, g * n, &current);
        prefix = if letter.inverse {
            &prefix * &inverses[g]
        } else {
            &prefix * &holonomies[g]
        };
    }
    Ok(coeffs)
}

/// Expands every relator (target 0) and translation word (target `e_j`)
/// into linear equations on the unknown translations and solves exactly.
pub fn solve_translation_parts(spec: &CrystalGroupSpec) -> Result<TranslationSolution, CrystalError> {
    if spec.mode() != Mode::Abstract {
        return Err(CrystalError::NotAbstract);
    }
    let n = spec.dim();
    let holonomies = spec.holonomies();
    for w in spec.relators() {
        if !evaluate_holonomy(w, &holonomies)?.is_identity() {
            return Err(CrystalError::HolonomyRelator {
                word: spec.render_word(w),
            });
        }
    }
    for w in spec.mu_words() {
        if !evaluate_holonomy(w, &holonomies)?.is_identity() {
            return Err(CrystalError::MuHolonomy {
                word: spec.render_word(w),
            });
        }
    }

    let unknowns = n * holonomies.len();
    let equations = spec.relators().len() + spec.mu_words().len();
    let mut system = RMatrix::zeros(n * equations, unknowns);
    let mut rhs = RVector::zeros(n * equations);
    let targets = spec
        .relators()
        .iter()
        .map(|w| (w, None))
        .chain(spec.mu_words().iter().enumerate().map(|(j, w)| (w, Some(j))));
    for (k, (w, target)) in targets.enumerate() {
        system.set_block(k * n, 0, &translation_coefficients(w, &holonomies)?);
        if let Some(j) = target {
            rhs[k * n + j] = crate::linalg::int(1);
        }
    }

    match solve_linear(&system, &rhs)? {
        LinearSolution::Inconsistent => Err(CrystalError::Inconsistent),
        LinearSolution::Solvable { particular, null_space } => {
            let translations = (0..holonomies.len())
                .map(|g| particular.entries()[g * n..(g + 1) * n].iter().cloned().collect())
                .collect();
            Ok(TranslationSolution {
                spec: spec.with_translations(translations)?,
                null_space,
            })
        }
    }
}
