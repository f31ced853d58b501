//! Reduction modulo `m`, the translation subgroups `T_p` of the cusp, and
//! congruence witnesses separating elements of the stabilizer of `v1` from
//! `T_p`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::crystal::CrystalGroupSpec;
use crate::embed::{EmbedError, EmbeddingResult};
use crate::linalg::{
    smallest_prime_not_dividing, smith_normal_form, solve_over_integers, Integer, LinalgError, RMatrix, RVector,
    Rational,
};
use crate::verify::{self, check_isometry, is_unipotent};

pub const DEFAULT_ENUMERATION_BOUND: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CongruenceError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("p must be positive")]
    BadP,
    #[error("matrix entry ({row}, {col}) is not an integer")]
    NotIntegral { row: usize, col: usize },
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Shape { expected: usize, rows: usize, cols: usize },
    #[error("element is not an isometry of Q': {0}")]
    NotIsometry(String),
    #[error("image of T_{p} mod {m} exceeds {bound} elements")]
    EnumerationBound { p: u64, m: u64, bound: usize },
    #[error("T_{p} generator {index} fails: {reason}")]
    BadGenerator { p: u64, index: usize, reason: String },
    #[error("translation words do not span a full-rank lattice")]
    LatticeNotFull,
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An integral matrix reduced entrywise into `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModMatrix {
    pub modulus: u64,
    pub entries: Vec<Vec<u64>>,
}

impl ModMatrix {
    pub fn identity(size: usize, modulus: u64) -> Self {
        ModMatrix {
            modulus,
            entries: (0..size)
                .map(|i| (0..size).map(|j| u64::from(i == j) % modulus).collect())
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == ModMatrix::identity(self.size(), self.modulus)
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.modulus, other.modulus, "moduli differ");
        let m = self.modulus as u128;
        let n = self.size();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s = (0..n).fold(0u128, |acc, k| {
                            (acc + self.entries[i][k] as u128 * other.entries[k][j] as u128) % m
                        });
                        s as u64
                    })
                    .collect()
            })
            .collect();
        ModMatrix {
            modulus: self.modulus,
            entries,
        }
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            write!(f, "[ {} ]", cells.join(" "))?;
        }
        write!(f, " (mod {})", self.modulus)
    }
}

fn integer_entries(x: &RMatrix) -> Result<Vec<Vec<Integer>>, CongruenceError> {
    if let Some((row, col)) = x.first_non_integral() {
        return Err(CongruenceError::NotIntegral { row, col });
    }
    Ok(x.to_integer_rows()?)
}

pub fn reduce_mod(x: &RMatrix, m: u64) -> Result<ModMatrix, CongruenceError> {
    if m < 2 {
        return Err(CongruenceError::BadModulus(m));
    }
    let big_m = Integer::from(m);
    let entries = integer_entries(x)?
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.mod_floor(&big_m).to_u64().expect("residue below modulus"))
                .collect()
        })
        .collect();
    Ok(ModMatrix { modulus: m, entries })
}

/// Translations by `p·e_i` (in the scaled lattice coordinates of the
/// embedding), lifted to `O(Q'; Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationSubgroupTp {
    pub p: u64,
    pub n: usize,
    pub generators: Vec<RMatrix>,
}

pub fn build_tp(result: &EmbeddingResult, p: u64) -> Result<TranslationSubgroupTp, CongruenceError> {
    if p == 0 {
        return Err(CongruenceError::BadP);
    }
    let n = result.dim;
    let bad = |index: usize, reason: String| CongruenceError::BadGenerator { p, index, reason };
    let mut generators = Vec::with_capacity(n);
    for i in 0..n {
        let s = RVector::unit(n, i).scale(&Rational::from_integer(p.into()));
        let g = result.translation_matrix(&s)?;
        if let Some((row, col)) = g.first_non_integral() {
            return Err(bad(
                i,
                format!("entry ({row}, {col}) = {} is not integral", g[(row, col)]),
            ));
        }
        check_isometry(&g, &result.form).map_err(|w| bad(i, format!("not an isometry: {w:?}")))?;
        if !is_unipotent(&g) {
            return Err(bad(i, "not unipotent".into()));
        }
        if g.mul_vec(&result.v1) != result.v1 {
            return Err(bad(i, "does not fix v1".into()));
        }
        generators.push(g);
    }
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            if a * b != b * a {
                return Err(bad(i, "generators do not commute".into()));
            }
        }
    }
    Ok(TranslationSubgroupTp { p, n, generators })
}

/// The image of `T_p` in `GL(n+2, Z/m)`, by breadth-first closure under
/// the generators. Sorted.
pub fn tp_image_mod(tp: &TranslationSubgroupTp, m: u64, bound: usize) -> Result<Vec<ModMatrix>, CongruenceError> {
    let gens = tp
        .generators
        .iter()
        .map(|g| reduce_mod(g, m))
        .collect::<Result<Vec<_>, _>>()?;
    let start = ModMatrix::identity(tp.n + 2, m);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = x.mul(g);
            if seen.insert(y.clone()) {
                if seen.len() > bound {
                    return Err(CongruenceError::EnumerationBound { p: tp.p, m, bound });
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationCase {
    /// The Euclidean block differs from `I` modulo a prime.
    HolonomyBlock,
    /// The block is `I` and the translation row is not divisible by `p`.
    TranslationRow,
}

impl fmt::Display for SeparationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeparationCase::HolonomyBlock => "holonomy-block",
            SeparationCase::TranslationRow => "translation-row",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationWitness {
    pub p: u64,
    pub modulus: u64,
    pub case: SeparationCase,
    /// Position and value of the entry that selected the modulus.
    pub entry: (usize, usize, String),
    pub image: ModMatrix,
    pub tp_image: Vec<ModMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SeparationOutcome {
    /// `γ` is translation by `translation ∈ pZ^n`.
    Member {
        translation: RVector,
    },
    Separated(SeparationWitness),
    /// `γ` moves `v1`; no witness is attempted.
    OutsideStabilizer {
        image_of_v1: RVector,
    },
}

impl SeparationOutcome {
    pub fn witness(&self) -> Option<&SeparationWitness> {
        match self {
            SeparationOutcome::Separated(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, SeparationOutcome::Member { .. })
    }
}

/// Decides whether `γ` lies in `T_p` and, if not, finds a modulus at which
/// its reduction avoids the reduction of `T_p`.
pub fn separate(
    gamma: &RMatrix,
    tp: &TranslationSubgroupTp,
    result: &EmbeddingResult,
) -> Result<SeparationOutcome, CongruenceError> {
    separate_with_bound(gamma, tp, result, DEFAULT_ENUMERATION_BOUND)
}

pub fn separate_with_bound(
    gamma: &RMatrix,
    tp: &TranslationSubgroupTp,
    result: &EmbeddingResult,
    bound: usize,
) -> Result<SeparationOutcome, CongruenceError> {
    let n = result.dim;
    if gamma.rows() != n + 2 || gamma.cols() != n + 2 {
        return Err(CongruenceError::Shape {
            expected: n + 2,
            rows: gamma.rows(),
            cols: gamma.cols(),
        });
    }
    integer_entries(gamma)?;
    check_isometry(gamma, &result.form).map_err(|w| CongruenceError::NotIsometry(format!("{w:?}")))?;
    let image_of_v1 = gamma.mul_vec(&result.v1);
    if image_of_v1 != result.v1 {
        return Ok(SeparationOutcome::OutsideStabilizer { image_of_v1 });
    }

    let block_minus_i = gamma.submatrix(0, n, 0, n).sub(&RMatrix::identity(n));
    let (case, modulus, entry) = if let Some((i, j)) = first_nonzero(&block_minus_i) {
        let value = block_minus_i[(i, j)].to_integer();
        let q = smallest_prime_not_dividing(&value).expect("entry is nonzero");
        (SeparationCase::HolonomyBlock, q, (i, j, value))
    } else {
        // a stabilizer element with trivial block is the lift of the
        // translation by minus its v1-row
        let s = gamma.submatrix(n, n + 1, 0, n).row(0).neg();
        let p = Integer::from(tp.p);
        match s.iter().position(|x| !x.to_integer().is_multiple_of(&p)) {
            None => {
                let lifted = result.translation_matrix(&s)?;
                debug_assert_eq!(&lifted, gamma);
                if &lifted != gamma {
                    return Err(CongruenceError::NotIsometry(
                        "trivial block but not a translation lift".into(),
                    ));
                }
                return Ok(SeparationOutcome::Member { translation: s });
            }
            Some(j) => (SeparationCase::TranslationRow, tp.p, (n, j, gamma[(n, j)].to_integer())),
        }
    };
    let image = reduce_mod(gamma, modulus)?;
    let tp_image = tp_image_mod(tp, modulus, bound)?;
    assert!(
        tp_image.binary_search(&image).is_err(),
        "case analysis guarantees exclusion"
    );
    Ok(SeparationOutcome::Separated(SeparationWitness {
        p: tp.p,
        modulus,
        case,
        entry: (entry.0, entry.1, entry.2.to_string()),
        image,
        tp_image,
    }))
}

fn first_nonzero(m: &RMatrix) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !m[(i, j)].is_zero())
}

/// Independent re-check of a witness: reduces `γ` afresh and enumerates
/// the image of `T_p` as all products `∏ g_i^{k_i}` with `0 ≤ k_i <
/// ord(g_i)`, then tests exclusion and agreement with the recorded image.
pub fn verify_witness(
    gamma: &RMatrix,
    tp: &TranslationSubgroupTp,
    witness: &SeparationWitness,
) -> Result<bool, CongruenceError> {
    if witness.p != tp.p {
        return Ok(false);
    }
    let m = witness.modulus;
    let image = reduce_mod(gamma, m)?;
    if image != witness.image {
        return Ok(false);
    }
    let size = tp.n + 2;
    let one = ModMatrix::identity(size, m);
    let mut products = BTreeSet::from([one.clone()]);
    for g in &tp.generators {
        let g = reduce_mod(g, m)?;
        let mut powers = vec![one.clone()];
        let mut x = g.clone();
        while !x.is_identity() {
            powers.push(x.clone());
            x = x.mul(&g);
            if powers.len() > DEFAULT_ENUMERATION_BOUND {
                return Ok(false);
            }
        }
        products = products
            .iter()
            .flat_map(|a| powers.iter().map(move |b| a.mul(b)))
            .collect();
    }
    let recorded: BTreeSet<ModMatrix> = witness.tp_image.iter().cloned().collect();
    Ok(products == recorded && !products.contains(&image))
}

/// The chain `T_rp ≤ T_Γ ∩ T_p ≤ Γ` made concrete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub p: u64,
    /// Translation vectors of the `μ̂_i`, a basis of the translation lattice.
    pub lattice_basis: Vec<RVector>,
    pub elementary_divisors: Vec<String>,
    /// Basis of the translation lattice intersected with `pZ^n`.
    pub intersection_basis: Vec<RVector>,
    pub r: u64,
    /// `lift(rp·e_i) = ∏ μ̂_j^{k_j}`; the exponent vectors `k`.
    pub trp_exponents: Vec<RVector>,
    pub trp_in_gamma: bool,
    pub trp_in_intersection: bool,
    pub gamma: RMatrix,
    pub gamma_translation: Option<RVector>,
    pub outcome: SeparationOutcome,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.trp_in_gamma && self.trp_in_intersection
    }
}

/// Translation part (scaled coordinates) of a stabilizer element with
/// trivial block: minus its `v1`-row.
pub fn translation_part(x: &RMatrix, n: usize) -> RVector {
    x.submatrix(n, n + 1, 0, n).row(0).neg()
}

pub fn demo_theorem_closure(
    result: &EmbeddingResult,
    spec: &CrystalGroupSpec,
    p: u64,
    gamma: Option<&RMatrix>,
) -> Result<ClosureReport, CongruenceError> {
    if p == 0 {
        return Err(CongruenceError::BadP);
    }
    let n = result.dim;
    // recomputed from the words rather than read from the result
    let mu_hat = spec
        .mu_words()
        .iter()
        .map(|w| element_from_word(result, w))
        .collect::<Result<Vec<_>, _>>()?;
    let lattice_basis: Vec<RVector> = mu_hat.iter().map(|m| translation_part(m, n)).collect();
    let s = RMatrix::from_rows(lattice_basis.iter().map(|v| v.entries().to_vec()).collect())?;
    let snf = smith_normal_form(&s)?;
    let divisors = snf.invariant_factors();
    if divisors.len() < n || divisors.iter().any(Zero::is_zero) {
        return Err(CongruenceError::LatticeNotFull);
    }
    // rows of S span the rows of diag(d)·V^-1
    let w = snf.v.inverse()?;
    let big_p = Integer::from(p);
    let intersection_basis: Vec<RVector> = divisors
        .iter()
        .enumerate()
        .map(|(i, d)| w.row(i).scale(&Rational::from_integer(d.lcm(&big_p))))
        .collect();
    let d_max = divisors.iter().max().cloned().unwrap_or_else(Integer::one);
    let r = (&d_max / d_max.gcd(&big_p)).to_u64().expect("r fits in u64");

    let st = s.transpose();
    let in_lattice = |v: &RVector| solve_over_integers(&st, v);
    let rp = Rational::from_integer(Integer::from(r * p));
    let mut trp_exponents = Vec::with_capacity(n);
    let mut trp_in_gamma = true;
    let mut trp_in_intersection = true;
    for i in 0..n {
        let target = RVector::unit(n, i).scale(&rp);
        let lifted = result.translation_matrix(&target)?;
        match in_lattice(&target)? {
            Some(k) => {
                let mut product = RMatrix::identity(n + 2);
                for (mu, kj) in mu_hat.iter().zip(k.iter()) {
                    let e = kj.to_integer().to_i64().expect("small exponent");
                    product = &product * &mu.pow(e)?;
                }
                trp_in_gamma &= product == lifted;
                trp_exponents.push(k);
            }
            None => {
                trp_in_gamma = false;
                trp_exponents.push(RVector::zeros(n));
            }
        }
        let basis = RMatrix::from_rows(intersection_basis.iter().map(|v| v.entries().to_vec()).collect())?;
        trp_in_intersection &= solve_over_integers(&basis.transpose(), &target)?.is_some();
    }
    for v in &intersection_basis {
        trp_in_intersection &= in_lattice(v)?.is_some() && v.iter().all(|x| x.to_integer().is_multiple_of(&big_p));
    }

    let trp = build_tp(result, r * p)?;
    let (gamma, gamma_translation) = match gamma {
        Some(g) => (g.clone(), None),
        None => sample_gamma(result, &st)?,
    };
    let outcome = separate(&gamma, &trp, result)?;
    Ok(ClosureReport {
        p,
        lattice_basis,
        elementary_divisors: divisors.iter().map(ToString::to_string).collect(),
        intersection_basis,
        r,
        trp_exponents,
        trp_in_gamma,
        trp_in_intersection,
        gamma,
        gamma_translation,
        outcome,
    })
}

/// Translation by the first `e_j` outside the lattice (or `e_1` if the
/// lattice is all of `Z^n`) whose lift is integral.
fn sample_gamma(result: &EmbeddingResult, st: &RMatrix) -> Result<(RMatrix, Option<RVector>), CongruenceError> {
    let n = result.dim;
    let mut candidates: Vec<RVector> = Vec::new();
    for j in 0..n {
        let e = RVector::unit(n, j);
        if solve_over_integers(st, &e)?.is_none() {
            candidates.push(e);
        }
    }
    candidates.push(RVector::unit(n, 0));
    for k in 1..=4i64 {
        for e in &candidates {
            let s = e.scale(&Rational::from_integer(k.into()));
            let g = result.translation_matrix(&s)?;
            if g.is_integral() {
                return Ok((g, Some(s)));
            }
        }
    }
    Err(CongruenceError::BadGenerator {
        p: 1,
        index: 0,
        reason: "no integral unit translation lift".into(),
    })
}

/// Matrix image of a word in the generators, for use as `γ`.
pub fn element_from_word(result: &EmbeddingResult, word: &crate::crystal::Word) -> Result<RMatrix, CongruenceError> {
    Ok(verify::evaluate_matrix_word(word, &result.matrices)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::crystal::{Generator, Word};
    use crate::embed::{embed_pipeline, EmbedOptions};
    use crate::linalg::int;

    fn embedded(name: &str) -> (CrystalGroupSpec, EmbeddingResult) {
        let (spec, result, _) = embed_pipeline(&catalog::lookup(name).unwrap(), &EmbedOptions::default()).unwrap();
        (spec, result)
    }

    fn word(spec: &CrystalGroupSpec, result: &EmbeddingResult, text: &str) -> RMatrix {
        element_from_word(result, &spec.parse_word(text).unwrap()).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_mod(&RMatrix::identity(3), 5).unwrap(), ModMatrix::identity(3, 5));
        assert_eq!(
            reduce_mod(&RMatrix::from_ints(&[&[-3]]), 2).unwrap().entries,
            vec![vec![1]]
        );
        assert!(matches!(
            reduce_mod(&RMatrix::identity(2), 1),
            Err(CongruenceError::BadModulus(1))
        ));
        let half = RMatrix::diagonal(&[crate::linalg::frac(1, 2)]);
        assert!(matches!(
            reduce_mod(&half, 3),
            Err(CongruenceError::NotIntegral { row: 0, col: 0 })
        ));
    }

    #[test]
    fn hantsche_wendt_a_mod_two() {
        let (_, result) = embedded("hantsche-wendt");
        let r = reduce_mod(&result.matrices[0], 2).unwrap();
        assert_eq!(
            r.entries,
            vec![
                vec![1, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 0],
                vec![1, 1, 1, 1, 1],
                vec![0, 0, 0, 0, 1],
            ]
        );
    }

    #[test]
    fn t2_for_hantsche_wendt() {
        let (spec, result) = embedded("hantsche-wendt");
        let tp = build_tp(&result, 2).unwrap();
        assert_eq!(tp.generators.len(), 3);
        assert_eq!(tp.generators[2], word(&spec, &result, "a a"));
        for g in &tp.generators {
            assert!(check_isometry(g, &result.form).is_ok());
        }
        assert_eq!(
            tp_image_mod(&tp, 2, DEFAULT_ENUMERATION_BOUND).unwrap(),
            vec![ModMatrix::identity(5, 2)]
        );
    }

    #[test]
    fn t1_on_torus_is_the_generators() {
        let (_, result) = embedded("torus-3");
        let tp = build_tp(&result, 1).unwrap();
        assert_eq!(tp.generators, result.matrices);
    }

    #[test]
    fn odd_p_has_nontrivial_image_mod_two() {
        for name in catalog::names() {
            let (_, result) = embedded(name);
            for p in [1, 3, 5] {
                let tp = build_tp(&result, p).unwrap();
                assert!(
                    tp_image_mod(&tp, 2, DEFAULT_ENUMERATION_BOUND).unwrap().len() > 1,
                    "{name} p={p}"
                );
            }
        }
    }

    #[test]
    fn circle_image_mod_three_is_cyclic() {
        let gens = vec![Generator {
            name: "x".into(),
            holonomy: RMatrix::identity(1),
            translation: Some(RVector::from_ints(&[1])),
        }];
        let spec = CrystalGroupSpec::new(1, gens, vec![], vec![Word::generator(0)]).unwrap();
        let (_, result, _) = embed_pipeline(&spec, &EmbedOptions::default()).unwrap();
        let tp = build_tp(&result, 1).unwrap();
        let image = tp_image_mod(&tp, 3, DEFAULT_ENUMERATION_BOUND).unwrap();
        assert!(image.len() == 3 || image.len() == 9);
        assert!(matches!(
            tp_image_mod(&tp, 3, 2),
            Err(CongruenceError::EnumerationBound { .. })
        ));
    }

    #[test]
    fn separation_examples() {
        let (spec, result) = embedded("hantsche-wendt");
        let t2 = build_tp(&result, 2).unwrap();

        let b = word(&spec, &result, "b");
        let out = separate(&b, &t2, &result).unwrap();
        let w = out.witness().unwrap();
        assert_eq!((w.case, w.modulus), (SeparationCase::HolonomyBlock, 3));
        assert_eq!(w.entry, (1, 1, "-2".to_string()));
        assert!(verify_witness(&b, &t2, w).unwrap());

        let e1 = build_tp(&result, 1).unwrap().generators[0].clone();
        let out = separate(&e1, &t2, &result).unwrap();
        let w = out.witness().unwrap();
        assert_eq!((w.case, w.modulus), (SeparationCase::TranslationRow, 2));
        assert_eq!(w.entry.2, "-1");
        assert_eq!(w.tp_image.len(), 1);
        assert!(verify_witness(&e1, &t2, w).unwrap());

        let a2 = word(&spec, &result, "a a");
        let out = separate(&a2, &t2, &result).unwrap();
        assert_eq!(
            out,
            SeparationOutcome::Member {
                translation: RVector::from_ints(&[0, 0, 2])
            }
        );
    }

    #[test]
    fn tp_words_are_members() {
        let (_, result) = embedded("klein-bottle");
        let tp = build_tp(&result, 3).unwrap();
        let g = &(&tp.generators[0] * &tp.generators[1].inverse().unwrap()) * &tp.generators[0];
        assert!(separate(&g, &tp, &result).unwrap().is_member());
    }

    #[test]
    fn witness_rejects_tampering() {
        let (spec, result) = embedded("hantsche-wendt");
        let t2 = build_tp(&result, 2).unwrap();
        let b = word(&spec, &result, "b");
        let out = separate(&b, &t2, &result).unwrap();
        let mut w = out.witness().unwrap().clone();
        w.tp_image.push(w.image.clone());
        assert!(!verify_witness(&b, &t2, &w).unwrap());
    }

    #[test]
    fn bad_inputs() {
        let (_, result) = embedded("hantsche-wendt");
        let t2 = build_tp(&result, 2).unwrap();
        let mut x = RMatrix::identity(5);
        x[(0, 4)] = int(1);
        assert!(matches!(
            separate(&x, &t2, &result),
            Err(CongruenceError::NotIsometry(_))
        ));
        x[(0, 4)] = crate::linalg::frac(1, 2);
        assert!(matches!(
            separate(&x, &t2, &result),
            Err(CongruenceError::NotIntegral { .. })
        ));
        assert!(matches!(
            separate(&RMatrix::identity(4), &t2, &result),
            Err(CongruenceError::Shape { .. })
        ));
        // swapping v1 and v2 is an isometry of the hyperbolic block
        let mut swap = RMatrix::identity(5);
        swap[(3, 3)] = int(0);
        swap[(4, 4)] = int(0);
        swap[(3, 4)] = int(1);
        swap[(4, 3)] = int(1);
        assert!(matches!(
            separate(&swap, &t2, &result).unwrap(),
            SeparationOutcome::OutsideStabilizer { .. }
        ));
    }

    #[test]
    fn closure_chain_on_catalog() {
        for name in catalog::names() {
            let (spec, result) = embedded(name);
            for p in [2, 3] {
                let report = demo_theorem_closure(&result, &spec, p, None).unwrap();
                assert!(report.holds(), "{name} p={p}");
                let d_max: u64 = report
                    .elementary_divisors
                    .iter()
                    .map(|d| d.parse::<u64>().unwrap())
                    .max()
                    .unwrap();
                assert_eq!((report.r * p) % d_max, 0);
                assert!(!report.outcome.is_member() || report.gamma_translation.is_none());
            }
        }
    }

    #[test]
    fn closure_examples() {
        let (spec, result) = embedded("hantsche-wendt");
        let report = demo_theorem_closure(&result, &spec, 2, None).unwrap();
        assert_eq!(report.elementary_divisors, vec!["2", "2", "2"]);
        assert_eq!(report.r, 1);
        assert_eq!(report.gamma_translation, Some(RVector::from_ints(&[1, 0, 0])));
        let w = report.outcome.witness().unwrap();
        assert_eq!((w.case, w.modulus), (SeparationCase::TranslationRow, 2));

        let (spec, result) = embedded("torus-3");
        let report = demo_theorem_closure(&result, &spec, 3, None).unwrap();
        assert_eq!(report.r, 1);
        assert!(report.holds());
    }
}
