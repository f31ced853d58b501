//! Integral representation of a Bieberbach group as a cusp subgroup of
//! `O(Q'; Z)`, where `Q'` is a rational form of signature `(n+1, 1)`.
//!
//! The pipeline is
//!
//! 1. [`cone`]: the affine action as `(n+1)x(n+1)` matrices
//!    `[[θ(g), c·t_g], [0, 1]]`, with `c` clearing translation denominators;
//! 2. [`dualize`]: `Φ(g) = (Φ*(g)^T)^-1`, which fixes `e_{n+1}`;
//! 3. [`theta_average`]: a holonomy-invariant positive definite `D`;
//! 4. [`hyperbolic_extend`]: one more row and column so that every matrix
//!    preserves `D ⊕ H` (`H` the hyperbolic plane `[[0, 1], [1, 0]]`);
//! 5. [`integralize_cusp`]: conjugation by `diag(I, K)` to clear the last
//!    column's denominators, which turns the `H` block into `[[0, K], [K, 0]]`.
//!
//! Basis order is `(e_1 .. e_n | v1 | v2)`; `v1 = e_{n+1}` is the fixed
//! lightlike vector.

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::crystal::{
    check_group_axioms, holonomy_closure, solve_translation_parts, AxiomFailure, CrystalError, CrystalGroupSpec,
    HolonomyGroup, Mode, DEFAULT_HOLONOMY_BOUND,
};
use crate::linalg::{
    denominator_lcm, solve_linear, Integer, LinalgError, LinearSolution, RMatrix, RVector, Rational, SymmetricForm,
};
use crate::verify::{self, VerificationReport, VerifyConfig};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("group axioms fail: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Axioms(Vec<AxiomFailure>),
    #[error("seed form must be {expected}x{expected}, got {found}x{found}")]
    SeedDimension { expected: usize, found: usize },
    #[error("averaged form is not invariant under holonomy element {0}")]
    NotInvariant(usize),
    #[error("generator {generator}: no cusp column makes the matrix an isometry")]
    NoCuspSolution { generator: String },
    #[error("generator {generator}: cusp column not unique ({dimension}-dimensional solution space)")]
    NonUniqueCusp { generator: String, dimension: usize },
    #[error("generator {generator}: extended matrix is not an isometry of D ⊕ H")]
    NotIsometry { generator: String },
    #[error("coning matrix for {generator} has determinant {det}, expected ±1")]
    NotUnimodular { generator: String, det: Rational },
    #[error("dual matrix for {generator} is not integral")]
    DualNotIntegral { generator: String },
    #[error("verification failed: {}", .0.failures().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", "))]
    Verification(Box<VerificationReport>),
}

/// `Φ*(g) = [[θ(g), c·t_g], [0, 1]]` for each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConingRep {
    pub matrices: Vec<RMatrix>,
    pub scale: Integer,
}

/// `Φ(g) = (Φ*(g)^T)^-1` for each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualRep {
    pub matrices: Vec<RMatrix>,
}

/// Rational isometries of `D ⊕ H` before the last column is cleared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspExtension {
    /// `v_g = (W_g, τ_g)`
    pub columns: Vec<RVector>,
    pub matrices: Vec<RMatrix>,
    pub form: SymmetricForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingResult {
    pub dim: usize,
    pub generator_names: Vec<String>,
    /// Final integral matrices, one per generator.
    pub matrices: Vec<RMatrix>,
    /// The invariant form `Q'`.
    pub form: SymmetricForm,
    /// Holonomy-invariant positive definite form used for the Euclidean block.
    pub d: SymmetricForm,
    pub c: Integer,
    pub k: Integer,
    pub v1: RVector,
    pub v2: RVector,
    /// Images of the translation words.
    pub mu_hat: Vec<RMatrix>,
    /// Last columns `(W_g, τ_g)` before the `K` conjugation.
    pub cusp_columns: Vec<RVector>,
}

impl EmbeddingResult {
    /// Pushes an arbitrary coning-level matrix `[[θ, s], [0, 1]]` (in the
    /// already-scaled coordinates) through the same dualization, cusp
    /// extension with `D`, and `K` conjugation as the generators.
    pub fn lift_coned(&self, coned: &RMatrix, label: &str) -> Result<RMatrix, EmbedError> {
        let dual = dual_matrix(coned, label)?;
        let q = cusp_form(&self.d);
        let column = cusp_column(&dual, &self.d, label)?;
        let lifted = extended_matrix(&dual, &column);
        if !is_isometry(&lifted, &q) {
            return Err(EmbedError::NotIsometry {
                generator: label.to_string(),
            });
        }
        Ok(conjugate_last(&lifted, &Rational::from_integer(self.k.clone())))
    }

    /// The lift of translation by `s` (scaled coordinates).
    pub fn translation_matrix(&self, s: &RVector) -> Result<RMatrix, EmbedError> {
        let n = self.dim;
        let mut coned = RMatrix::identity(n + 1);
        for i in 0..n {
            coned[(i, n)] = s[i].clone();
        }
        self.lift_coned(&coned, &format!("translation {s}"))
    }
}

/// Builds `Φ*` and conjugates by `diag(I, c)` so every entry is integral.
pub fn cone(spec: &CrystalGroupSpec) -> Result<ConingRep, EmbedError> {
    let gens = spec.isometries()?;
    let n = spec.dim();
    let scale = gens
        .iter()
        .fold(Integer::one(), |acc, g| acc.lcm(&denominator_lcm(&g.translation)));
    let c = Rational::from_integer(scale.clone());
    let matrices = gens
        .iter()
        .map(|g| {
            let mut m = RMatrix::identity(n + 1);
            m.set_block(0, 0, &g.holonomy);
            for i in 0..n {
                m[(i, n)] = &g.translation[i] * &c;
            }
            m
        })
        .collect();
    Ok(ConingRep { matrices, scale })
}

fn dual_matrix(coned: &RMatrix, label: &str) -> Result<RMatrix, EmbedError> {
    let det = coned.determinant()?;
    if !det.abs().is_one() {
        return Err(EmbedError::NotUnimodular {
            generator: label.to_string(),
            det,
        });
    }
    let dual = coned.transpose().inverse()?;
    if !dual.is_integral() {
        return Err(EmbedError::DualNotIntegral {
            generator: label.to_string(),
        });
    }
    Ok(dual)
}

/// `Φ(g) = (Φ*(g)^T)^-1`.
pub fn dualize(rep: &ConingRep, names: &[String]) -> Result<DualRep, EmbedError> {
    let matrices = rep
        .matrices
        .iter()
        .zip(names)
        .map(|(m, name)| dual_matrix(m, name))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DualRep { matrices })
}

/// `Σ_h h · seed · h^T` over the holonomy group (a plain sum, not a mean).
pub fn theta_average(group: &HolonomyGroup, seed: &SymmetricForm) -> Result<SymmetricForm, EmbedError> {
    let n = group.elements()[0].rows();
    if seed.dim() != n {
        return Err(EmbedError::SeedDimension {
            expected: n,
            found: seed.dim(),
        });
    }
    seed.require_positive_definite()?;
    let sum = group.elements().iter().fold(RMatrix::zeros(n, n), |acc, h| {
        acc.add(&(&(h * seed.matrix()) * &h.transpose()))
    });
    let d = SymmetricForm::new(sum)?;
    if let Some(i) = group
        .elements()
        .iter()
        .position(|h| &(&(h * d.matrix()) * &h.transpose()) != d.matrix())
    {
        return Err(EmbedError::NotInvariant(i));
    }
    Ok(d)
}

/// The positive rational multiple of `d` that is integral with coprime
/// entries.
pub fn primitive_form(d: &SymmetricForm) -> SymmetricForm {
    let lcm = Rational::from_integer(denominator_lcm(d.matrix()));
    let cleared = d.matrix().scale(&lcm);
    let gcd = cleared
        .entries()
        .iter()
        .fold(Integer::zero(), |acc, x| acc.gcd(&x.to_integer()));
    if gcd.is_zero() {
        return d.clone();
    }
    SymmetricForm::new(cleared.scale(&Rational::from_integer(gcd).recip())).expect("still symmetric")
}

/// `D ⊕ [[0, 1], [1, 0]]`.
pub fn cusp_form(d: &SymmetricForm) -> SymmetricForm {
    d.direct_sum(&SymmetricForm::new(RMatrix::from_ints(&[&[0, 1], &[1, 0]])).expect("symmetric"))
}

fn is_isometry(m: &RMatrix, q: &SymmetricForm) -> bool {
    &(&m.transpose() * q.matrix()) * m == *q.matrix()
}

/// `[[dual, column], [0, 1]]`
fn extended_matrix(dual: &RMatrix, column: &RVector) -> RMatrix {
    let m = dual.rows();
    let mut out = RMatrix::identity(m + 1);
    out.set_block(0, 0, dual);
    for i in 0..m {
        out[(i, m)] = column[i].clone();
    }
    out
}

/// Solves for the cusp column `(W, τ)` of one dual matrix; the linear part
/// must have a unique solution.
fn cusp_column(dual: &RMatrix, d: &SymmetricForm, label: &str) -> Result<RVector, EmbedError> {
    let n = d.dim();
    let q = cusp_form(d);
    // Pairing the first n columns against the new last column (W, τ, 1)
    // must reproduce Q(e_i, e_{n+2}) = 0. The τ coefficient is the
    // (n+2)-th entry of column i, which is zero.
    let mut system = RMatrix::zeros(n, n);
    let mut rhs = RVector::zeros(n);
    for i in 0..n {
        let mut col_i = dual.col(i).into_entries();
        col_i.push(Rational::zero());
        let row = q.matrix().mul_vec(&RVector::new(col_i));
        for j in 0..n {
            system[(i, j)] = row[j].clone();
        }
        debug_assert!(row[n].is_zero());
        // constant part from the trailing 1
        rhs[i] = q.matrix()[(i, n + 1)].clone() - &row[n + 1];
    }
    let w = match solve_linear(&system, &rhs)? {
        LinearSolution::Inconsistent => {
            return Err(EmbedError::NoCuspSolution {
                generator: label.to_string(),
            })
        }
        LinearSolution::Solvable { particular, null_space } => {
            if !null_space.is_empty() {
                return Err(EmbedError::NonUniqueCusp {
                    generator: label.to_string(),
                    dimension: null_space.len(),
                });
            }
            particular
        }
    };
    // Q(x, x) = 0 for x = (W, τ, 1) is linear in τ: Q(x0, x0) + 2τ Q(v1, v2)
    let mut x0 = w.clone().into_entries();
    x0.push(Rational::zero());
    x0.push(Rational::one());
    let x0 = RVector::new(x0);
    let pairing = &q.matrix()[(n, n + 1)];
    let tau = -q.pair(&x0, &x0) / (pairing * Rational::from_integer(2.into()));
    let mut column = w.into_entries();
    column.push(tau);
    Ok(RVector::new(column))
}

/// Solves for each `v_g` and checks the full identity `M^T Q M = Q`.
pub fn hyperbolic_extend(rep: &DualRep, d: &SymmetricForm, names: &[String]) -> Result<CuspExtension, EmbedError> {
    let q = cusp_form(d);
    let mut columns = Vec::new();
    let mut matrices = Vec::new();
    for (dual, name) in rep.matrices.iter().zip(names) {
        let column = cusp_column(dual, d, name)?;
        let m = extended_matrix(dual, &column);
        if !is_isometry(&m, &q) {
            return Err(EmbedError::NotIsometry {
                generator: name.clone(),
            });
        }
        columns.push(column);
        matrices.push(m);
    }
    Ok(CuspExtension {
        columns,
        matrices,
        form: q,
    })
}

/// `P^-1 M P` with `P = diag(I, k)`: scales the last column above the
/// diagonal by `k`.
fn conjugate_last(m: &RMatrix, k: &Rational) -> RMatrix {
    let last = m.rows() - 1;
    let mut out = m.clone();
    for i in 0..last {
        out[(i, last)] = &m[(i, last)] * k;
    }
    out
}

/// Conjugates by `diag(I, K)` with `K` the least common denominator of
/// the cusp columns. Returns the integral matrices, `K`, and the new
/// invariant form `P^T Q P`.
pub fn integralize_cusp(ext: &CuspExtension) -> Result<(Vec<RMatrix>, Integer, SymmetricForm), EmbedError> {
    let k = ext
        .columns
        .iter()
        .fold(Integer::one(), |acc, v| acc.lcm(&denominator_lcm(v)));
    let kq = Rational::from_integer(k.clone());
    let size = ext.form.dim();
    let mut p = RMatrix::identity(size);
    p[(size - 1, size - 1)] = kq.clone();
    let form = ext.form.congruent(&p)?;
    let matrices: Vec<RMatrix> = ext.matrices.iter().map(|m| conjugate_last(m, &kq)).collect();
    debug_assert!(matrices
        .iter()
        .zip(&ext.matrices)
        .all(|(m, orig)| *m == &(&p.inverse().unwrap() * orig) * &p));
    Ok((matrices, k, form))
}

#[derive(Debug, Clone)]
pub struct EmbedOptions {
    /// Positive definite seed for the θ-average; identity when `None`.
    pub seed: Option<SymmetricForm>,
    pub holonomy_bound: usize,
    pub verify: VerifyConfig,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            seed: None,
            holonomy_bound: DEFAULT_HOLONOMY_BOUND,
            verify: VerifyConfig::default(),
        }
    }
}

/// Runs the whole construction and the verification suite. Returns the
/// (explicit) spec actually embedded, the result, and the passing report.
pub fn embed_pipeline(
    spec: &CrystalGroupSpec,
    options: &EmbedOptions,
) -> Result<(CrystalGroupSpec, EmbeddingResult, VerificationReport), EmbedError> {
    let spec = match spec.mode() {
        Mode::Explicit => spec.clone(),
        Mode::Abstract => solve_translation_parts(spec)?.spec,
    };
    let axioms = check_group_axioms(&spec)?;
    if !axioms.passed() {
        return Err(EmbedError::Axioms(axioms.failures));
    }
    let n = spec.dim();
    let names = spec.generator_names();
    let holonomy = holonomy_closure(&spec, options.holonomy_bound)?;

    let coned = cone(&spec)?;
    let dual = dualize(&coned, &names)?;
    let seed = match &options.seed {
        Some(s) => s.clone(),
        None => SymmetricForm::new(RMatrix::identity(n))?,
    };
    let d = primitive_form(&theta_average(&holonomy, &seed)?);
    let ext = hyperbolic_extend(&dual, &d, &names)?;
    let (matrices, k, form) = integralize_cusp(&ext)?;

    let mu_hat = spec
        .mu_words()
        .iter()
        .map(|w| verify::evaluate_matrix_word(w, &matrices))
        .collect::<Result<Vec<_>, _>>()?;
    let result = EmbeddingResult {
        dim: n,
        generator_names: names,
        matrices,
        form,
        d,
        c: coned.scale,
        k,
        v1: RVector::unit(n + 2, n),
        v2: RVector::unit(n + 2, n + 1),
        mu_hat,
        cusp_columns: ext.columns,
    };
    let report = verify::full_report(&result, &spec, &options.verify);
    if !report.passed() {
        return Err(EmbedError::Verification(Box::new(report)));
    }
    Ok((spec, result, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{frac, int, Signature};

    fn hw() -> CrystalGroupSpec {
        catalog::lookup("hantsche-wendt").unwrap()
    }

    fn names(spec: &CrystalGroupSpec) -> Vec<String> {
        spec.generator_names()
    }

    #[test]
    fn cone_hantsche_wendt() {
        let rep = cone(&hw()).unwrap();
        assert_eq!(rep.scale, Integer::from(2));
        assert_eq!(
            rep.matrices[0],
            RMatrix::from_ints(&[&[-1, 0, 0, 1], &[0, -1, 0, 1], &[0, 0, 1, 1], &[0, 0, 0, 1]])
        );
    }

    #[test]
    fn cone_torus_and_klein() {
        let rep = cone(&catalog::lookup("torus-2").unwrap()).unwrap();
        assert_eq!(rep.scale, Integer::from(1));
        assert_eq!(
            rep.matrices[0],
            RMatrix::from_ints(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]])
        );
        assert_eq!(
            rep.matrices[1],
            RMatrix::from_ints(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]])
        );
        assert_eq!(
            cone(&catalog::lookup("klein-bottle").unwrap()).unwrap().scale,
            Integer::from(2)
        );
    }

    #[test]
    fn dualize_hantsche_wendt() {
        let spec = hw();
        let dual = dualize(&cone(&spec).unwrap(), &names(&spec)).unwrap();
        assert_eq!(
            dual.matrices[1],
            RMatrix::from_ints(&[&[1, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, -1, 0], &[-1, 0, 0, 1]])
        );
        assert_eq!(dual.matrices[0].row(3), RVector::from_ints(&[1, 1, -1, 1]));
        // the coning matrix inverts back
        let coned = cone(&spec).unwrap();
        assert!((&coned.matrices[0] * &coned.matrices[0].inverse().unwrap()).is_identity());
    }

    #[test]
    fn dualize_identity_generator() {
        let rep = ConingRep {
            matrices: vec![RMatrix::identity(3)],
            scale: Integer::one(),
        };
        assert!(dualize(&rep, &["g".to_string()]).unwrap().matrices[0].is_identity());
    }

    #[test]
    fn dual_is_a_homomorphism_on_relators() {
        let spec = hw();
        let dual = dualize(&cone(&spec).unwrap(), &names(&spec)).unwrap();
        for w in spec.relators() {
            assert!(verify::evaluate_matrix_word(w, &dual.matrices).unwrap().is_identity());
        }
    }

    #[test]
    fn theta_average_examples() {
        let spec = hw();
        let group = holonomy_closure(&spec, DEFAULT_HOLONOMY_BOUND).unwrap();
        let id = SymmetricForm::new(RMatrix::identity(3)).unwrap();
        let d = theta_average(&group, &id).unwrap();
        assert_eq!(d.matrix(), &RMatrix::identity(3).scale(&int(4)));
        assert_eq!(primitive_form(&d).matrix(), &RMatrix::identity(3));

        let torus = catalog::lookup("torus-2").unwrap();
        let trivial = holonomy_closure(&torus, DEFAULT_HOLONOMY_BOUND).unwrap();
        let seed = SymmetricForm::new(RMatrix::from_ints(&[&[2, 1], &[1, 3]])).unwrap();
        assert_eq!(theta_average(&trivial, &seed).unwrap(), seed);

        let klein = catalog::lookup("klein-bottle").unwrap();
        let group = holonomy_closure(&klein, DEFAULT_HOLONOMY_BOUND).unwrap();
        let seed =
            SymmetricForm::new(RMatrix::from_rows(vec![vec![int(1), frac(1, 2)], vec![frac(1, 2), int(1)]]).unwrap())
                .unwrap();
        assert_eq!(
            theta_average(&group, &seed).unwrap().matrix(),
            &RMatrix::from_ints(&[&[2, 0], &[0, 2]])
        );
    }

    #[test]
    fn theta_average_rejects_bad_seeds() {
        let group = holonomy_closure(&hw(), DEFAULT_HOLONOMY_BOUND).unwrap();
        let indefinite = SymmetricForm::new(RMatrix::diagonal(&[int(1), int(-1), int(1)])).unwrap();
        assert!(matches!(
            theta_average(&group, &indefinite),
            Err(EmbedError::Linalg(LinalgError::NotPositiveDefinite))
        ));
        let small = SymmetricForm::new(RMatrix::identity(2)).unwrap();
        assert!(matches!(
            theta_average(&group, &small),
            Err(EmbedError::SeedDimension { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn theta_average_of_invariant_form_scales_by_order() {
        let group = holonomy_closure(&hw(), DEFAULT_HOLONOMY_BOUND).unwrap();
        let seed = SymmetricForm::new(RMatrix::from_ints(&[&[3, 1, 0], &[1, 2, 1], &[0, 1, 5]])).unwrap();
        let d = theta_average(&group, &seed).unwrap();
        let again = theta_average(&group, &d).unwrap();
        assert_eq!(again.matrix(), &d.matrix().scale(&int(group.order() as i64)));
    }

    #[test]
    fn hantsche_wendt_cusp_columns() {
        let spec = hw();
        let dual = dualize(&cone(&spec).unwrap(), &names(&spec)).unwrap();
        let d = SymmetricForm::new(RMatrix::identity(3)).unwrap();
        let ext = hyperbolic_extend(&dual, &d, &names(&spec)).unwrap();
        assert_eq!(ext.columns[0], RVector::new(vec![int(1), int(1), int(1), frac(-3, 2)]));
        assert_eq!(ext.columns[1], RVector::new(vec![int(1), int(0), int(0), frac(-1, 2)]));
    }

    #[test]
    fn zero_translation_gives_zero_column() {
        let d = SymmetricForm::new(RMatrix::identity(2)).unwrap();
        let dual = DualRep {
            matrices: vec![RMatrix::from_ints(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])],
        };
        let ext = hyperbolic_extend(&dual, &d, &["s".to_string()]).unwrap();
        assert!(ext.columns[0].is_zero());
    }

    #[test]
    fn integralize_hantsche_wendt() {
        let spec = hw();
        let dual = dualize(&cone(&spec).unwrap(), &names(&spec)).unwrap();
        let d = SymmetricForm::new(RMatrix::identity(3)).unwrap();
        let ext = hyperbolic_extend(&dual, &d, &names(&spec)).unwrap();
        let (matrices, k, form) = integralize_cusp(&ext).unwrap();
        assert_eq!(k, Integer::from(2));
        assert_eq!(matrices[0].col(4), RVector::from_ints(&[2, 2, 2, -3, 1]));
        assert_eq!(matrices[1].col(4), RVector::from_ints(&[2, 0, 0, -1, 1]));
        assert_eq!(
            form.matrix(),
            &RMatrix::from_ints(&[
                &[1, 0, 0, 0, 0],
                &[0, 1, 0, 0, 0],
                &[0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 2],
                &[0, 0, 0, 2, 0],
            ])
        );
    }

    #[test]
    fn integral_columns_need_no_conjugation() {
        let d = SymmetricForm::new(RMatrix::identity(1)).unwrap();
        let m = RMatrix::from_ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let ext = CuspExtension {
            columns: vec![RVector::zeros(2)],
            matrices: vec![m.clone()],
            form: cusp_form(&d),
        };
        let (matrices, k, form) = integralize_cusp(&ext).unwrap();
        assert_eq!(k, Integer::one());
        assert_eq!(form, ext.form);
        assert_eq!(matrices, vec![m]);
    }

    #[test]
    fn pipeline_on_catalog() {
        for name in catalog::names() {
            let spec = catalog::lookup(name).unwrap();
            let (_, result, report) = embed_pipeline(&spec, &EmbedOptions::default()).unwrap();
            assert!(report.passed(), "{name}");
            let n = spec.dim();
            assert_eq!(result.form.signature(), Signature::new(n + 1, 1, 0), "{name}");
            assert!(result.matrices.iter().all(RMatrix::is_integral));
            for m in &result.matrices {
                assert_eq!(m.mul_vec(&result.v1), result.v1);
            }
        }
    }

    #[test]
    fn pipeline_accepts_abstract_specs() {
        let spec = catalog::lookup("klein-bottle").unwrap().to_abstract();
        let (solved, result, _) = embed_pipeline(&spec, &EmbedOptions::default()).unwrap();
        assert_eq!(solved, catalog::lookup("klein-bottle").unwrap());
        assert_eq!(result.form.signature(), Signature::new(3, 1, 0));
    }

    #[test]
    fn lift_of_generator_coning_matrix_is_the_generator() {
        let spec = hw();
        let (_, result, _) = embed_pipeline(&spec, &EmbedOptions::default()).unwrap();
        let coned = cone(&spec).unwrap();
        for (m, expected) in coned.matrices.iter().zip(&result.matrices) {
            assert_eq!(&result.lift_coned(m, "g").unwrap(), expected);
        }
    }

    #[test]
    fn torsion_input_fails_verification() {
        let spec = catalog::reflection_line();
        match embed_pipeline(&spec, &EmbedOptions::default()) {
            Err(EmbedError::Verification(report)) => {
                assert!(report.failures().any(|c| c.name == "torsion_free"));
            }
            other => panic!("expected verification failure, got {other:?}"),
        }
    }
}
