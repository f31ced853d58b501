use num_traits::Zero;

use super::{AffineIsometry, CrystalError, CrystalGroupSpec, HolonomyGroup, Word};
use crate::linalg::{
    denominator_lcm, null_space, solve_linear, solve_over_integers, LinearSolution, RMatrix, RVector, Rational,
};

/// An element of finite order together with a point it fixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionCertificate {
    /// Word for the coset representative `g`.
    pub word: Word,
    /// `lattice_shift ∘ g`, which has a fixed point.
    pub element: AffineIsometry,
    pub lattice_shift: RVector,
    pub fixed_point: RVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionReport {
    pub torsion_free: bool,
    pub certificate: Option<TorsionCertificate>,
}

/// Decides, for each nontrivial holonomy class with representative
/// `(h, t)`, whether `t + λ ∈ Im(h - I)` for some `λ ∈ Z^n`; such a
/// translate fixes a point and so has finite order.
pub fn check_torsion_free(spec: &CrystalGroupSpec, holonomy: &HolonomyGroup) -> Result<TorsionReport, CrystalError> {
    let gens = spec.isometries()?;
    let n = spec.dim();
    for (h, word) in holonomy.elements().iter().zip(holonomy.words()) {
        if h.is_identity() {
            continue;
        }
        let rep = super::evaluate_word(word, &gens)?;
        debug_assert_eq!(&rep.holonomy, h);
        if let Some(lattice_shift) = shift_into_image(h, &rep.translation)? {
            let element = AffineIsometry::translation_by(lattice_shift.clone()).compose(&rep);
            let lhs = RMatrix::identity(n).sub(h);
            let fixed_point = match solve_linear(&lhs, &element.translation)? {
                LinearSolution::Solvable { particular, .. } => particular,
                LinearSolution::Inconsistent => unreachable!("shift lands in the image of h - I"),
            };
            debug_assert_eq!(element.apply(&fixed_point), fixed_point);
            return Ok(TorsionReport {
                torsion_free: false,
                certificate: Some(TorsionCertificate {
                    word: word.clone(),
                    element,
                    lattice_shift,
                    fixed_point,
                }),
            });
        }
    }
    Ok(TorsionReport {
        torsion_free: true,
        certificate: None,
    })
}

/// Some `λ ∈ Z^n` with `t + λ ∈ Im(h - I)`, if one exists.
fn shift_into_image(h: &RMatrix, t: &RVector) -> Result<Option<RVector>, CrystalError> {
    let n = h.rows();
    let image_map = h.sub(&RMatrix::identity(n));
    // rows of `annihilator` cut out Im(h - I) exactly
    let annihilator_rows = null_space(&image_map.transpose());
    if annihilator_rows.is_empty() {
        return Ok(Some(RVector::zeros(n)));
    }
    let integral_rows: Vec<Vec<Rational>> = annihilator_rows
        .iter()
        .map(|v| {
            let c = Rational::from_integer(denominator_lcm(v));
            v.scale(&c).into_entries()
        })
        .collect();
    let annihilator = RMatrix::from_rows(integral_rows)?;
    // N(t + λ) = 0  <=>  N μ = N t with λ = -μ
    let target = annihilator.mul_vec(t);
    Ok(solve_over_integers(&annihilator, &target)?.map(|mu| {
        let shift = mu.neg();
        debug_assert!(annihilator.mul_vec(&t.add(&shift)).iter().all(Zero::is_zero));
        shift
    }))
}
