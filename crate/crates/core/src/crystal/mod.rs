//! Crystallographic groups given by generators, relators, and the words
//! that pin down the translation lattice.
//!
//! Coordinates are always lattice-adapted: the translation subgroup is
//! `Z^n`, the i-th translation word acts as `v -> v + e_i`, and holonomy
//! matrices are integral with determinant ±1.

mod axioms;
mod holonomy;
mod torsion;
mod translations;

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::linalg::{LinalgError, RMatrix, RVector};

pub use axioms::{check_group_axioms, AxiomFailure, AxiomReport};
pub use holonomy::{holonomy_closure, HolonomyGroup, DEFAULT_HOLONOMY_BOUND};
pub use torsion::{check_torsion_free, TorsionCertificate, TorsionReport};
pub use translations::{solve_translation_parts, TranslationSolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrystalError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("generator {generator:?}: {what}")]
    BadGenerator { generator: String, what: String },
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("unknown generator {name:?} in word {word:?}")]
    UnknownGenerator { name: String, word: String },
    #[error("malformed word token {token:?} in {word:?}")]
    BadToken { token: String, word: String },
    #[error("expected {expected} translation words (one per dimension), found {found}")]
    MuWordCount { expected: usize, found: usize },
    #[error("generators must either all carry translations or none of them")]
    MixedMode,
    #[error("operation requires an explicit-mode spec")]
    NotExplicit,
    #[error("operation requires an abstract-mode spec")]
    NotAbstract,
    #[error("holonomy not verified finite: closure exceeded {bound} elements; input is not crystallographic in these coordinates")]
    HolonomyNotFinite { bound: usize },
    #[error("holonomy is not a homomorphism: relator {word} maps to a nontrivial matrix")]
    HolonomyRelator { word: String },
    #[error("translation word {word} has nontrivial holonomy")]
    MuHolonomy { word: String },
    #[error("inconsistent system: spec does not describe a Bieberbach group with this holonomy/lattice data")]
    Inconsistent,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `v -> holonomy * v + translation`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineIsometry {
    pub holonomy: RMatrix,
    pub translation: RVector,
}

impl AffineIsometry {
    pub fn new(holonomy: RMatrix, translation: RVector) -> Self {
        assert_eq!(holonomy.rows(), translation.dim());
        AffineIsometry { holonomy, translation }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(RMatrix::identity(dim), RVector::zeros(dim))
    }

    pub fn translation_by(v: RVector) -> Self {
        Self::new(RMatrix::identity(v.dim()), v)
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    /// `self ∘ other`: `(A, a) ∘ (B, b) = (AB, a + A b)`.
    pub fn compose(&self, other: &AffineIsometry) -> AffineIsometry {
        AffineIsometry {
            holonomy: &self.holonomy * &other.holonomy,
            translation: self.translation.add(&self.holonomy.mul_vec(&other.translation)),
        }
    }

    pub fn inverse(&self) -> Result<AffineIsometry, LinalgError> {
        let inv = self.holonomy.inverse()?;
        let translation = inv.mul_vec(&self.translation).neg();
        Ok(AffineIsometry {
            holonomy: inv,
            translation,
        })
    }

    pub fn apply(&self, x: &RVector) -> RVector {
        self.holonomy.mul_vec(x).add(&self.translation)
    }

    pub fn is_identity(&self) -> bool {
        self.holonomy.is_identity() && self.translation.is_zero()
    }

    pub fn is_translation(&self) -> bool {
        self.holonomy.is_identity()
    }
}

impl fmt::Display for AffineIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .holonomy
            .row_vectors()
            .iter()
            .map(|r| RVector::new(r.clone()).to_string())
            .collect();
        write!(f, "v -> [{}] v + {}", rows.join(", "), self.translation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

/// A word in the generators and their inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter {
            generator: index,
            inverse: false,
        }])
    }

    /// Parses whitespace-separated tokens `name` or `name^-1`.
    pub fn parse(text: &str, names: &[String]) -> Result<Self, CrystalError> {
        text.split_whitespace()
            .map(|token| {
                let (name, inverse) = match token.split_once('^') {
                    None => (token, false),
                    Some((name, "-1")) => (name, true),
                    Some(_) => {
                        return Err(CrystalError::BadToken {
                            token: token.to_string(),
                            word: text.to_string(),
                        })
                    }
                };
                let generator = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| CrystalError::UnknownGenerator {
                        name: name.to_string(),
                        word: text.to_string(),
                    })?;
                Ok(Letter { generator, inverse })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn inverse(&self) -> Word {
        Word(
            self.0
                .iter()
                .rev()
                .map(|l| Letter {
                    generator: l.generator,
                    inverse: !l.inverse,
                })
                .collect(),
        )
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator).max()
    }

    /// Renders with the given generator names, e.g. `"a b^-1"`; the empty
    /// word renders as `""`, which parses back to it.
    pub fn render(&self, names: &[String]) -> String {
        self.0
            .iter()
            .map(|l| {
                let name = names
                    .get(l.generator)
                    .cloned()
                    .unwrap_or_else(|| format!("g{}", l.generator));
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Evaluates in any group, given the images of the generators and of
    /// their inverses. The empty word evaluates to `one`.
    pub fn evaluate_with<T: Clone>(&self, images: &[T], inverse_images: &[T], one: T, mul: impl Fn(&T, &T) -> T) -> T {
        self.0.iter().fold(one, |acc, l| {
            let g = if l.inverse {
                &inverse_images[l.generator]
            } else {
                &images[l.generator]
            };
            mul(&acc, g)
        })
    }
}

/// Composite affine isometry of `w` under the given generator assignment.
pub fn evaluate_word(w: &Word, assignment: &[AffineIsometry]) -> Result<AffineIsometry, CrystalError> {
    let dim = assignment.first().map_or(0, AffineIsometry::dim);
    let inverses = assignment
        .iter()
        .map(AffineIsometry::inverse)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(
        w.evaluate_with(assignment, &inverses, AffineIsometry::identity(dim), |a, b| {
            a.compose(b)
        }),
    )
}

/// Holonomy part of `w`.
pub fn evaluate_holonomy(w: &Word, holonomies: &[RMatrix]) -> Result<RMatrix, LinalgError> {
    let dim = holonomies.first().map_or(0, RMatrix::rows);
    let inverses = holonomies.iter().map(RMatrix::inverse).collect::<Result<Vec<_>, _>>()?;
    Ok(w.evaluate_with(holonomies, &inverses, RMatrix::identity(dim), |a, b| a * b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every generator carries its translation part.
    Explicit,
    /// Only holonomies are known; translations are solved for.
    Abstract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub holonomy: RMatrix,
    pub translation: Option<RVector>,
}

/// A presentation of a crystallographic group in lattice-adapted
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrystalGroupSpec {
    dim: usize,
    generators: Vec<Generator>,
    relators: Vec<Word>,
    mu_words: Vec<Word>,
    mode: Mode,
}

impl CrystalGroupSpec {
    /// Structural validation only; group axioms are checked separately.
    pub fn new(
        dim: usize,
        generators: Vec<Generator>,
        relators: Vec<Word>,
        mu_words: Vec<Word>,
    ) -> Result<Self, CrystalError> {
        if dim == 0 {
            return Err(CrystalError::ZeroDimension);
        }
        let mut seen = HashSet::new();
        for g in &generators {
            let bad = |what: String| CrystalError::BadGenerator {
                generator: g.name.clone(),
                what,
            };
            if g.name.is_empty() || g.name.contains(char::is_whitespace) || g.name.contains('^') {
                return Err(bad("name must be non-empty without spaces or '^'".into()));
            }
            if !seen.insert(g.name.clone()) {
                return Err(CrystalError::DuplicateGenerator(g.name.clone()));
            }
            if g.holonomy.rows() != dim || g.holonomy.cols() != dim {
                return Err(bad(format!(
                    "holonomy is {}x{}, expected {dim}x{dim}",
                    g.holonomy.rows(),
                    g.holonomy.cols()
                )));
            }
            if let Some((r, c)) = g.holonomy.first_non_integral() {
                return Err(bad(format!(
                    "holonomy entry ({r}, {c}) is not an integer; coordinates must be lattice-adapted"
                )));
            }
            let det = g.holonomy.determinant()?;
            if !det.abs().is_one() {
                return Err(bad(format!("holonomy determinant is {det}, expected ±1")));
            }
            if let Some(t) = &g.translation {
                if t.dim() != dim {
                    return Err(bad(format!("translation has length {}, expected {dim}", t.dim())));
                }
            }
        }
        if generators.is_empty() {
            return Err(CrystalError::BadGenerator {
                generator: String::new(),
                what: "at least one generator is required".into(),
            });
        }
        let with_translation = generators.iter().filter(|g| g.translation.is_some()).count();
        let mode = if with_translation == generators.len() {
            Mode::Explicit
        } else if with_translation == 0 {
            Mode::Abstract
        } else {
            return Err(CrystalError::MixedMode);
        };
        if mu_words.len() != dim {
            return Err(CrystalError::MuWordCount {
                expected: dim,
                found: mu_words.len(),
            });
        }
        let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
        for w in relators.iter().chain(&mu_words) {
            if let Some(m) = w.max_generator().filter(|&m| m >= generators.len()) {
                return Err(CrystalError::UnknownGenerator {
                    name: format!("g{m}"),
                    word: w.render(&names),
                });
            }
        }
        Ok(CrystalGroupSpec {
            dim,
            generators,
            relators,
            mu_words,
            mode,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn mu_words(&self) -> &[Word] {
        &self.mu_words
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn holonomies(&self) -> Vec<RMatrix> {
        self.generators.iter().map(|g| g.holonomy.clone()).collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, CrystalError> {
        Word::parse(text, &self.generator_names())
    }

    pub fn render_word(&self, w: &Word) -> String {
        w.render(&self.generator_names())
    }

    /// Generator isometries; fails in abstract mode.
    pub fn isometries(&self) -> Result<Vec<AffineIsometry>, CrystalError> {
        self.generators
            .iter()
            .map(|g| {
                g.translation
                    .clone()
                    .map(|t| AffineIsometry::new(g.holonomy.clone(), t))
                    .ok_or(CrystalError::NotExplicit)
            })
            .collect()
    }

    pub fn evaluate(&self, w: &Word) -> Result<AffineIsometry, CrystalError> {
        evaluate_word(w, &self.isometries()?)
    }

    /// The same presentation with translations dropped.
    pub fn to_abstract(&self) -> CrystalGroupSpec {
        let mut out = self.clone();
        for g in &mut out.generators {
            g.translation = None;
        }
        out.mode = Mode::Abstract;
        out
    }

    /// Installs translations (one per generator) into an abstract spec.
    pub fn with_translations(&self, translations: Vec<RVector>) -> Result<CrystalGroupSpec, CrystalError> {
        let generators = self
            .generators
            .iter()
            .zip(translations)
            .map(|(g, t)| Generator {
                translation: Some(t),
                ..g.clone()
            })
            .collect();
        CrystalGroupSpec::new(self.dim, generators, self.relators.clone(), self.mu_words.clone())
    }
}
