//! Independent re-verification of an [`EmbeddingResult`].
//!
//! Every check starts from the final matrices, the form, and the words of
//! the presentation; the recorded intermediate data is only compared
//! against them, never trusted.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::crystal::{
    check_group_axioms, check_torsion_free, holonomy_closure, CrystalGroupSpec, Letter, Word, DEFAULT_HOLONOMY_BOUND,
};
use crate::embed::EmbeddingResult;
use crate::linalg::{null_space, Integer, LinalgError, RMatrix, RVector, Rational, Signature, SymmetricForm};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub max_word_len: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 100,
            max_word_len: 8,
            seed: 0x5eed,
        }
    }
}

/// Concrete evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `(M^T Q M)[row][col]` differs from `Q[row][col]`.
    Entry {
        subject: String,
        row: usize,
        col: usize,
        expected: String,
        found: String,
    },
    Matrix {
        subject: String,
        matrix: RMatrix,
    },
    Word {
        word: String,
        matrix: RMatrix,
    },
    Vector {
        subject: String,
        vector: RVector,
    },
    Note {
        message: String,
    },
}

impl Witness {
    fn note(message: impl Into<String>) -> Self {
        Witness::Note {
            message: message.into(),
        }
    }
}

pub type CheckOutcome = Result<(), Witness>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn record(&mut self, name: &str, outcome: CheckOutcome) {
        self.checks.push(Check {
            name: name.to_string(),
            passed: outcome.is_ok(),
            witness: outcome.err(),
        });
    }
}

/// Product of generator matrices along `w`.
pub fn evaluate_matrix_word(w: &Word, matrices: &[RMatrix]) -> Result<RMatrix, LinalgError> {
    let size = matrices.first().map_or(0, RMatrix::rows);
    let inverses = matrices.iter().map(RMatrix::inverse).collect::<Result<Vec<_>, _>>()?;
    Ok(w.evaluate_with(matrices, &inverses, RMatrix::identity(size), |a, b| a * b))
}

/// Exact test of `x^T q x = q`; on failure reports the first differing entry.
pub fn check_isometry(x: &RMatrix, q: &SymmetricForm) -> CheckOutcome {
    if x.rows() != q.dim() || x.cols() != q.dim() {
        return Err(Witness::note(format!(
            "{}x{} matrix against a form of dimension {}",
            x.rows(),
            x.cols(),
            q.dim()
        )));
    }
    let image = &(&x.transpose() * q.matrix()) * x;
    for i in 0..q.dim() {
        for j in 0..q.dim() {
            if image[(i, j)] != q.matrix()[(i, j)] {
                return Err(Witness::Entry {
                    subject: "x^T Q x".into(),
                    row: i,
                    col: j,
                    expected: crate::linalg::format_rational(&q.matrix()[(i, j)]),
                    found: crate::linalg::format_rational(&image[(i, j)]),
                });
            }
        }
    }
    Ok(())
}

/// `Q'(v1, v1) = 0` and every generator fixes `v1`.
pub fn check_lightlike_stabilizer(result: &EmbeddingResult) -> CheckOutcome {
    let v1 = &result.v1;
    if v1.is_zero() {
        return Err(Witness::Vector {
            subject: "v1 is zero".into(),
            vector: v1.clone(),
        });
    }
    let norm = result.form.pair(v1, v1);
    if !norm.is_zero() {
        return Err(Witness::Vector {
            subject: format!("v1 has Q'(v1, v1) = {}", crate::linalg::format_rational(&norm)),
            vector: v1.clone(),
        });
    }
    for (m, name) in result.matrices.iter().zip(&result.generator_names) {
        let image = m.mul_vec(v1);
        if &image != v1 {
            return Err(Witness::Vector {
                subject: format!("image of v1 under {name}"),
                vector: image,
            });
        }
    }
    Ok(())
}

/// `(m - I)^size = 0`.
pub fn is_unipotent(m: &RMatrix) -> bool {
    let nil = m.sub(&RMatrix::identity(m.rows()));
    nil.pow(m.rows() as i64).map(|p| p.is_zero()).unwrap_or(false)
}

/// Relators map to `I`; each translation word maps to a non-identity
/// unipotent matrix of translation type; these images commute.
pub fn check_faithfulness_evidence(result: &EmbeddingResult, spec: &CrystalGroupSpec) -> CheckOutcome {
    let n = result.dim;
    let eval = |w: &Word| evaluate_matrix_word(w, &result.matrices).map_err(|e| Witness::note(e.to_string()));
    for w in spec.relators() {
        let m = eval(w)?;
        if !m.is_identity() {
            return Err(Witness::Word {
                word: format!("relator {}", spec.render_word(w)),
                matrix: m,
            });
        }
    }
    let mut mus = Vec::new();
    for (i, w) in spec.mu_words().iter().enumerate() {
        let m = eval(w)?;
        let label = format!("translation word {}", spec.render_word(w));
        if result.mu_hat.get(i) != Some(&m) {
            return Err(Witness::Word {
                word: format!("{label} (stored image disagrees)"),
                matrix: m,
            });
        }
        let upper = m.submatrix(0, n + 1, 0, n + 1);
        let translation_type = upper.submatrix(0, n, 0, n).is_identity() && upper.col(n) == RVector::unit(n + 1, n);
        if !translation_type || m.is_identity() || !is_unipotent(&m) {
            return Err(Witness::Word { word: label, matrix: m });
        }
        mus.push((spec.render_word(w), m));
    }
    for i in 0..mus.len() {
        for j in (i + 1)..mus.len() {
            let ab = &mus[i].1 * &mus[j].1;
            if ab != &mus[j].1 * &mus[i].1 {
                return Err(Witness::Word {
                    word: format!("commutator of {} and {}", mus[i].0, mus[j].0),
                    matrix: ab,
                });
            }
        }
    }
    Ok(())
}

/// Solution space of `{x : [[I, x], [0, 1]] preserves q}`.
///
/// With `x~ = (x, 0)` the conditions are `q(e_i, x~) = 0` for `i <= n+1`
/// and `q(x~, x~) + 2 q(x~, e_{n+2}) = 0`; the first set kills
/// `q(x~, x~)`, so the whole system is linear: the first `n+1` columns of
/// `q` applied to `x` vanish.
pub fn rigidity_solutions(q: &SymmetricForm) -> Vec<RVector> {
    let size = q.dim();
    null_space(&q.matrix().submatrix(0, size, 0, size - 1))
}

/// Passes iff the identity is the only isometry of the form
/// `[[I_{n+1}, x], [0, 1]]`.
pub fn check_rigidity(q: &SymmetricForm) -> CheckOutcome {
    if q.dim() < 2 {
        return Err(Witness::note("form too small"));
    }
    match rigidity_solutions(q).into_iter().next() {
        None => Ok(()),
        Some(x) => Err(Witness::Vector {
            subject: "nonzero last column of a unipotent isometry".into(),
            vector: x,
        }),
    }
}

/// The recorded data `(D, c, K, v_g)` agrees with the matrices and the
/// presentation: block `θ^-T`, `v1`-row `-(c θ^-1 t)^T`, last column
/// `K·v_g`, and `Q' = D ⊕ [[0, K], [K, 0]]`.
pub fn check_embedding_data(result: &EmbeddingResult, spec: &CrystalGroupSpec) -> CheckOutcome {
    let n = result.dim;
    let size = n + 2;
    if result.c <= Integer::zero() || result.k <= Integer::zero() {
        return Err(Witness::note(format!(
            "c = {} and K = {} must be positive",
            result.c, result.k
        )));
    }
    if result.v1 != RVector::unit(size, n) || result.v2 != RVector::unit(size, n + 1) {
        return Err(Witness::note("v1, v2 are not the last two basis vectors"));
    }
    let c = Rational::from_integer(result.c.clone());
    let k = Rational::from_integer(result.k.clone());
    let mut expected_form = RMatrix::zeros(size, size);
    expected_form.set_block(0, 0, result.d.matrix());
    expected_form[(n, n + 1)] = k.clone();
    expected_form[(n + 1, n)] = k.clone();
    if result.form.matrix() != &expected_form {
        return Err(Witness::Matrix {
            subject: "Q' differs from D ⊕ [[0, K], [K, 0]]".into(),
            matrix: result.form.matrix().clone(),
        });
    }
    if result.cusp_columns.len() != result.matrices.len() {
        return Err(Witness::note("one cusp column per generator expected"));
    }
    for ((g, m), (name, column)) in spec
        .generators()
        .iter()
        .zip(&result.matrices)
        .zip(result.generator_names.iter().zip(&result.cusp_columns))
    {
        let Some(t) = &g.translation else {
            return Err(Witness::note(format!("generator {name} has no translation part")));
        };
        let theta_inv = g.holonomy.inverse().map_err(|e| Witness::note(e.to_string()))?;
        let row = theta_inv.mul_vec(t).scale(&-c.clone());
        let mut expected = RMatrix::identity(size);
        expected.set_block(0, 0, &theta_inv.transpose());
        for j in 0..n {
            expected[(n, j)] = row[j].clone();
        }
        if column.dim() != n + 1 {
            return Err(Witness::Vector {
                subject: format!("cusp column of {name}"),
                vector: column.clone(),
            });
        }
        for i in 0..=n {
            expected[(i, n + 1)] = &column[i] * &k;
        }
        if m != &expected {
            return Err(Witness::Matrix {
                subject: format!("{name} disagrees with the presentation and recorded data"),
                matrix: m.clone(),
            });
        }
    }
    Ok(())
}

fn check_shapes(result: &EmbeddingResult, spec: &CrystalGroupSpec) -> CheckOutcome {
    let n = result.dim;
    let size = n + 2;
    let err = |what: String| Err(Witness::note(what));
    if spec.dim() != n {
        return err(format!("spec has dimension {}, result {n}", spec.dim()));
    }
    if result.matrices.len() != spec.generators().len() {
        return err(format!(
            "{} matrices for {} generators",
            result.matrices.len(),
            spec.generators().len()
        ));
    }
    if let Some((i, m)) = result
        .matrices
        .iter()
        .chain(&result.mu_hat)
        .enumerate()
        .find(|(_, m)| m.rows() != size || m.cols() != size)
    {
        return err(format!(
            "matrix {i} is {}x{}, expected {size}x{size}",
            m.rows(),
            m.cols()
        ));
    }
    if result.form.dim() != size || result.d.dim() != n {
        return err("form dimensions do not match".into());
    }
    if result.v1.dim() != size || result.v2.dim() != size {
        return err("v1/v2 have the wrong length".into());
    }
    if result.generator_names.len() != result.matrices.len() {
        return err("generator names do not match matrices".into());
    }
    Ok(())
}

fn random_word(rng: &mut ChaCha8Rng, generators: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len.max(1));
    Word(
        (0..len)
            .map(|_| Letter {
                generator: rng.gen_range(0..generators),
                inverse: rng.gen_bool(0.5),
            })
            .collect(),
    )
}

/// Deterministic sample of words for the property checks.
pub fn sample_words(config: &VerifyConfig, generators: usize) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.samples)
        .map(|_| random_word(&mut rng, generators, config.max_word_len))
        .collect()
}

/// Runs every check and collects the outcomes.
pub fn full_report(result: &EmbeddingResult, spec: &CrystalGroupSpec, config: &VerifyConfig) -> VerificationReport {
    let mut report = VerificationReport::default();
    let shapes = check_shapes(result, spec);
    let shapes_ok = shapes.is_ok();
    report.record("shapes", shapes);
    if !shapes_ok {
        return report;
    }
    let n = result.dim;

    report.record(
        "integrality",
        result
            .matrices
            .iter()
            .zip(&result.generator_names)
            .find(|(m, _)| !m.is_integral())
            .map_or(Ok(()), |(m, name)| {
                Err(Witness::Matrix {
                    subject: name.clone(),
                    matrix: m.clone(),
                })
            }),
    );

    report.record(
        "unimodular",
        result
            .matrices
            .iter()
            .zip(&result.generator_names)
            .find(|(m, _)| !m.determinant().map(|d| d.abs().is_one()).unwrap_or(false))
            .map_or(Ok(()), |(m, name)| {
                Err(Witness::Matrix {
                    subject: format!("{name} has determinant {}", m.determinant().unwrap_or_default()),
                    matrix: m.clone(),
                })
            }),
    );

    let generator_isometry = result
        .matrices
        .iter()
        .zip(&result.generator_names)
        .try_for_each(|(m, name)| {
            check_isometry(m, &result.form).map_err(|w| match w {
                Witness::Entry {
                    row,
                    col,
                    expected,
                    found,
                    ..
                } => Witness::Entry {
                    subject: format!("{name}^T Q' {name}"),
                    row,
                    col,
                    expected,
                    found,
                },
                other => other,
            })
        });
    let isometries_ok = generator_isometry.is_ok();
    report.record("generator_isometry", generator_isometry);

    let signature = result.form.signature();
    report.record(
        "signature",
        if signature == Signature::new(n + 1, 1, 0) {
            Ok(())
        } else {
            Err(Witness::Matrix {
                subject: format!("Q' has signature {signature}, expected ({}, 1, 0)", n + 1),
                matrix: result.form.matrix().clone(),
            })
        },
    );

    report.record(
        "d_positive_definite",
        if result.d.is_positive_definite() {
            Ok(())
        } else {
            Err(Witness::Matrix {
                subject: "D".into(),
                matrix: result.d.matrix().clone(),
            })
        },
    );

    // the Euclidean block of every generator is an isometry of D
    report.record(
        "holonomy_block_isometry",
        result
            .matrices
            .iter()
            .zip(&result.generator_names)
            .try_for_each(|(m, name)| {
                let block = m.submatrix(0, n, 0, n);
                check_isometry(&block, &result.d).map_err(|_| Witness::Matrix {
                    subject: format!("upper-left block of {name}"),
                    matrix: block,
                })
            }),
    );

    report.record("lightlike_stabilizer", check_lightlike_stabilizer(result));
    report.record("embedding_data", check_embedding_data(result, spec));

    let words = sample_words(config, result.matrices.len());
    let names = &result.generator_names;
    report.record(
        "random_words",
        if !isometries_ok {
            Err(Witness::note("skipped: a generator is not an isometry"))
        } else {
            words.iter().try_for_each(|w| {
                let m = evaluate_matrix_word(w, &result.matrices).map_err(|e| Witness::note(e.to_string()))?;
                let bad = || Witness::Word {
                    word: w.render(names),
                    matrix: m.clone(),
                };
                if !m.is_integral() || check_isometry(&m, &result.form).is_err() || m.mul_vec(&result.v1) != result.v1 {
                    return Err(bad());
                }
                Ok(())
            })
        },
    );

    report.record(
        "group_axioms",
        match check_group_axioms(spec) {
            Ok(r) if r.passed() => Ok(()),
            Ok(r) => Err(Witness::note(r.failures[0].to_string())),
            Err(e) => Err(Witness::note(e.to_string())),
        },
    );
    report.record("faithfulness_evidence", check_faithfulness_evidence(result, spec));
    report.record(
        "torsion_free",
        holonomy_closure(spec, DEFAULT_HOLONOMY_BOUND)
            .and_then(|h| check_torsion_free(spec, &h))
            .map_err(|e| Witness::note(e.to_string()))
            .and_then(|r| match r.certificate {
                None => Ok(()),
                Some(cert) => Err(Witness::Word {
                    word: format!(
                        "translate of {} by {} fixes {}",
                        spec.render_word(&cert.word),
                        cert.lattice_shift,
                        cert.fixed_point
                    ),
                    matrix: affine_matrix(&cert.element.holonomy, &cert.element.translation),
                }),
            }),
    );
    report.record("rigidity", check_rigidity(&result.form));
    report
}

fn affine_matrix(h: &RMatrix, t: &RVector) -> RMatrix {
    let n = h.rows();
    let mut m = RMatrix::identity(n + 1);
    m.set_block(0, 0, h);
    for i in 0..n {
        m[(i, n)] = t[i].clone();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::embed::{embed_pipeline, EmbedOptions};
    use crate::linalg::int;

    fn hw_matrices() -> (RMatrix, RMatrix) {
        let a = RMatrix::from_ints(&[
            &[-1, 0, 0, 0, 2],
            &[0, -1, 0, 0, 2],
            &[0, 0, 1, 0, 2],
            &[1, 1, -1, 1, -3],
            &[0, 0, 0, 0, 1],
        ]);
        let b = RMatrix::from_ints(&[
            &[1, 0, 0, 0, 2],
            &[0, -1, 0, 0, 0],
            &[0, 0, -1, 0, 0],
            &[-1, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1],
        ]);
        (a, b)
    }

    fn q4wt() -> SymmetricForm {
        SymmetricForm::new(RMatrix::from_ints(&[
            &[1, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[0, 0, 0, 0, 2],
            &[0, 0, 0, 2, 0],
        ]))
        .unwrap()
    }

    fn embedded(name: &str) -> (CrystalGroupSpec, EmbeddingResult) {
        let (spec, result, _) = embed_pipeline(&catalog::lookup(name).unwrap(), &EmbedOptions::default()).unwrap();
        (spec, result)
    }

    #[test]
    fn isometry_checks() {
        let (a, b) = hw_matrices();
        assert!(check_isometry(&RMatrix::identity(5), &q4wt()).is_ok());
        assert!(check_isometry(&a, &q4wt()).is_ok());
        assert!(check_isometry(&b, &q4wt()).is_ok());
        let mut bad = a.clone();
        bad[(0, 4)] = int(3);
        match check_isometry(&bad, &q4wt()) {
            Err(Witness::Entry { row, col, .. }) => assert!(row == 4 || col == 4),
            other => panic!("expected entry witness, got {other:?}"),
        }
    }

    #[test]
    fn square_of_generator_is_translation_type() {
        let (a, _) = hw_matrices();
        let sq = &a * &a;
        assert!(sq.submatrix(0, 3, 0, 3).is_identity());
        assert!(is_unipotent(&sq));
        assert!(!sq.is_identity());
    }

    #[test]
    fn lightlike_stabilizer() {
        let (_, result) = embedded("hantsche-wendt");
        assert!(check_lightlike_stabilizer(&result).is_ok());
        assert_eq!(result.v1, RVector::unit(5, 3));
        let (_, torus) = embedded("torus-2");
        assert!(check_lightlike_stabilizer(&torus).is_ok());

        let mut broken = result.clone();
        broken.matrices[0][(0, 3)] = int(1);
        assert!(matches!(
            check_lightlike_stabilizer(&broken),
            Err(Witness::Vector { .. })
        ));
    }

    #[test]
    fn faithfulness() {
        let (spec, result) = embedded("hantsche-wendt");
        assert!(check_faithfulness_evidence(&result, &spec).is_ok());
        let (torus_spec, torus) = embedded("torus-3");
        assert!(check_faithfulness_evidence(&torus, &torus_spec).is_ok());
        assert_eq!(torus.mu_hat, torus.matrices);
    }

    #[test]
    fn failing_relator_is_named() {
        let (spec, result) = embedded("hantsche-wendt");
        let extra = spec.parse_word("a b").unwrap();
        let mut relators = spec.relators().to_vec();
        relators.push(extra);
        let bad = CrystalGroupSpec::new(3, spec.generators().to_vec(), relators, spec.mu_words().to_vec()).unwrap();
        match check_faithfulness_evidence(&result, &bad) {
            Err(Witness::Word { word, .. }) => assert_eq!(word, "relator a b"),
            other => panic!("expected relator witness, got {other:?}"),
        }
    }

    #[test]
    fn rigidity() {
        assert!(check_rigidity(&q4wt()).is_ok());
        let (_, torus) = embedded("torus-2");
        assert!(check_rigidity(&torus.form).is_ok());
        let degenerate = SymmetricForm::new(RMatrix::diagonal(&[int(1), int(1), int(1), int(0), int(0)])).unwrap();
        assert!(check_rigidity(&degenerate).is_err());
        assert_eq!(rigidity_solutions(&degenerate).len(), 1);
    }

    #[test]
    fn full_report_passes_on_catalog() {
        for name in ["hantsche-wendt", "klein-bottle"] {
            let (spec, result) = embedded(name);
            let report = full_report(&result, &spec, &VerifyConfig::default());
            assert!(report.passed(), "{name}: {:?}", report.failures().collect::<Vec<_>>());
            assert_eq!(report.get("random_words").map(|c| c.passed), Some(true));
        }
    }

    #[test]
    fn corrupted_result_fails_with_witness() {
        let (spec, mut result) = embedded("hantsche-wendt");
        result.matrices[0][(0, 4)] = int(3);
        let report = full_report(&result, &spec, &VerifyConfig::default());
        assert!(!report.passed());
        assert!(report.failures().all(|c| c.witness.is_some()));
        assert!(!report.get("generator_isometry").unwrap().passed);
    }

    #[test]
    fn wrong_shapes_do_not_panic() {
        let (spec, mut result) = embedded("torus-2");
        result.matrices[0] = RMatrix::identity(3);
        let report = full_report(&result, &spec, &VerifyConfig::default());
        assert!(!report.passed());
        assert_eq!(report.failures().next().unwrap().name, "shapes");
    }

    #[test]
    fn sampled_words_are_deterministic() {
        let cfg = VerifyConfig::default();
        assert_eq!(sample_words(&cfg, 3), sample_words(&cfg, 3));
        assert!(sample_words(&cfg, 3).iter().all(|w| (1..=8).contains(&w.len())));
    }
}
