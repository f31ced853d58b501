//! Built-in flat 2- and 3-manifold groups in lattice-adapted coordinates.

use crate::crystal::{CrystalError, CrystalGroupSpec, Generator, Word};
use crate::linalg::{frac, int, RMatrix, RVector, Rational};

const NAMES: [&str; 5] = ["torus-2", "klein-bottle", "torus-3", "hantsche-wendt", "dicosm"];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown catalog entry {name:?}; available: {}", NAMES.join(", "))]
pub struct UnknownEntry {
    pub name: String,
}

pub fn lookup(name: &str) -> Result<CrystalGroupSpec, UnknownEntry> {
    let spec = match name {
        "torus-2" => torus(2),
        "torus-3" => torus(3),
        "klein-bottle" => klein_bottle(),
        "hantsche-wendt" => hantsche_wendt(),
        "dicosm" => dicosm(),
        _ => return Err(UnknownEntry { name: name.to_string() }),
    };
    Ok(spec.expect("catalog entries are well formed"))
}

fn generator(name: &str, holonomy: &[i64], translation: Vec<Rational>) -> Generator {
    Generator {
        name: name.to_string(),
        holonomy: RMatrix::diagonal(&holonomy.iter().map(|&x| int(x)).collect::<Vec<_>>()),
        translation: Some(RVector::new(translation)),
    }
}

fn build(
    dim: usize,
    generators: Vec<Generator>,
    relators: &[&str],
    mu_words: &[&str],
) -> Result<CrystalGroupSpec, CrystalError> {
    let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
    let parse = |ws: &[&str]| ws.iter().map(|w| Word::parse(w, &names)).collect::<Result<Vec<_>, _>>();
    CrystalGroupSpec::new(dim, generators, parse(relators)?, parse(mu_words)?)
}

fn torus(dim: usize) -> Result<CrystalGroupSpec, CrystalError> {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    let gens = (0..dim)
        .map(|i| Generator {
            name: NAMES[i].to_string(),
            holonomy: RMatrix::identity(dim),
            translation: Some(RVector::unit(dim, i)),
        })
        .collect();
    let commutators: Vec<String> = (0..dim)
        .flat_map(|i| ((i + 1)..dim).map(move |j| (i, j)))
        .map(|(i, j)| format!("{0} {1} {0}^-1 {1}^-1", NAMES[i], NAMES[j]))
        .collect();
    let relators: Vec<&str> = commutators.iter().map(String::as_str).collect();
    build(dim, gens, &relators, &NAMES[..dim])
}

fn klein_bottle() -> Result<CrystalGroupSpec, CrystalError> {
    build(
        2,
        vec![
            generator("a", &[1, -1], vec![frac(1, 2), int(0)]),
            generator("b", &[1, 1], vec![int(0), int(1)]),
        ],
        &["a b a^-1 b"],
        &["a a", "b"],
    )
}

fn hantsche_wendt() -> Result<CrystalGroupSpec, CrystalError> {
    build(
        3,
        vec![
            generator("a", &[-1, -1, 1], vec![frac(1, 2), frac(1, 2), frac(1, 2)]),
            generator("b", &[1, -1, -1], vec![frac(1, 2), int(0), int(0)]),
        ],
        &["a b b a^-1 b b", "b a a b^-1 a a"],
        &["b b", "a b a b", "a a"],
    )
}

/// The half-turn space: a screw motion by π along the third axis.
fn dicosm() -> Result<CrystalGroupSpec, CrystalError> {
    build(
        3,
        vec![
            generator("a", &[-1, -1, 1], vec![int(0), int(0), frac(1, 2)]),
            generator("x", &[1, 1, 1], vec![int(1), int(0), int(0)]),
            generator("y", &[1, 1, 1], vec![int(0), int(1), int(0)]),
        ],
        &["a x a^-1 x", "a y a^-1 y", "x y x^-1 y^-1"],
        &["x", "y", "a a"],
    )
}

/// The infinite dihedral group acting on the line; crystallographic but not
/// torsion free. Not listed in [`names`].
pub fn reflection_line() -> CrystalGroupSpec {
    build(
        1,
        vec![generator("r", &[-1], vec![int(0)]), generator("x", &[1], vec![int(1)])],
        &["r r", "r x r^-1 x"],
        &["x"],
    )
    .expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::Mode;

    #[test]
    fn required_entries_present() {
        for name in ["torus-2", "klein-bottle", "torus-3", "hantsche-wendt"] {
            let spec = lookup(name).unwrap();
            assert_eq!(spec.mode(), Mode::Explicit);
        }
    }

    #[test]
    fn hantsche_wendt_generators() {
        let spec = lookup("hantsche-wendt").unwrap();
        let g = spec.generators();
        assert_eq!(g[0].holonomy, RMatrix::diagonal(&[int(-1), int(-1), int(1)]));
        assert_eq!(g[0].translation, Some(RVector::new(vec![frac(1, 2); 3])));
        assert_eq!(g[1].holonomy, RMatrix::diagonal(&[int(1), int(-1), int(-1)]));
        assert_eq!(g[1].translation, Some(RVector::new(vec![frac(1, 2), int(0), int(0)])));
    }

    #[test]
    fn torus_two_is_unit_translations() {
        let spec = lookup("torus-2").unwrap();
        for (i, g) in spec.generators().iter().enumerate() {
            assert!(g.holonomy.is_identity());
            assert_eq!(g.translation, Some(RVector::unit(2, i)));
        }
    }

    #[test]
    fn unknown_name_lists_entries() {
        let err = lookup("poincare-sphere").unwrap_err();
        let msg = err.to_string();
        for name in names() {
            assert!(msg.contains(name));
        }
    }
}
