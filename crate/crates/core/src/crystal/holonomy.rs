use std::collections::{HashMap, VecDeque};

use super::{CrystalError, CrystalGroupSpec, Letter, Word};
use crate::linalg::RMatrix;

pub const DEFAULT_HOLONOMY_BOUND: usize = 10_000;

/// The finite point group, with a shortest word reaching each element.
#[derive(Debug, Clone)]
pub struct HolonomyGroup {
    elements: Vec<RMatrix>,
    words: Vec<Word>,
    generator_images: Vec<RMatrix>,
}

impl HolonomyGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in breadth-first order; the identity comes first.
    pub fn elements(&self) -> &[RMatrix] {
        &self.elements
    }

    /// `words()[i]` evaluates to `elements()[i]` under the holonomy map.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn generator_images(&self) -> &[RMatrix] {
        &self.generator_images
    }

    pub fn contains(&self, m: &RMatrix) -> bool {
        self.elements.contains(m)
    }
}

/// Breadth-first closure of the generator holonomies under products with
/// generators and their inverses.
pub fn holonomy_closure(spec: &CrystalGroupSpec, bound: usize) -> Result<HolonomyGroup, CrystalError> {
    let images = spec.holonomies();
    let inverses = images.iter().map(RMatrix::inverse).collect::<Result<Vec<_>, _>>()?;
    let n = spec.dim();

    let mut index: HashMap<RMatrix, usize> = HashMap::new();
    let mut elements = vec![RMatrix::identity(n)];
    let mut words = vec![Word::empty()];
    index.insert(RMatrix::identity(n), 0);
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        for (g, (img, inv)) in images.iter().zip(&inverses).enumerate() {
            for (letter_inverse, m) in [(false, img), (true, inv)] {
                let next = &elements[i] * m;
                if index.contains_key(&next) {
                    continue;
                }
                if elements.len() >= bound {
                    return Err(CrystalError::HolonomyNotFinite { bound });
                }
                let mut w = words[i].clone();
                w.0.push(Letter {
                    generator: g,
                    inverse: letter_inverse,
                });
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
                words.push(w);
            }
        }
    }
    Ok(HolonomyGroup {
        elements,
        words,
        generator_images: images,
    })
}
