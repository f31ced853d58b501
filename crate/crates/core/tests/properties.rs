use std::sync::OnceLock;

use num_integer::Integer as _;
use num_traits::{One, Zero};
use proptest::prelude::*;

use flatcusp::catalog;
use flatcusp::cli::format::{parse_group_file, serialize_group_file};
use flatcusp::congruence::{build_tp, reduce_mod, separate, verify_witness, SeparationOutcome};
use flatcusp::crystal::{
    check_group_axioms, evaluate_word, solve_translation_parts, CrystalGroupSpec, Generator, Letter, Word,
};
use flatcusp::embed::{embed_pipeline, EmbedOptions, EmbeddingResult};
use flatcusp::linalg::{
    denominator_lcm, frac, int, null_space, smith_normal_form, solve_linear, LinearSolution, RMatrix, RVector,
    Rational, SymmetricForm,
};
use flatcusp::verify::{check_isometry, evaluate_matrix_word, full_report, VerifyConfig};

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(p, q)| frac(p, q))
}

fn int_matrix(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = RMatrix> {
    prop::collection::vec(prop::collection::vec(-bound..=bound, cols), rows).prop_map(|rows| {
        RMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect()).unwrap()
    })
}

fn rat_vector(n: usize) -> impl Strategy<Value = RVector> {
    prop::collection::vec(rational(), n).prop_map(RVector::new)
}

fn symmetric(n: usize) -> impl Strategy<Value = SymmetricForm> {
    int_matrix(n, n, 4).prop_map(|m| SymmetricForm::new(m.add(&m.transpose())).unwrap())
}

/// Products of elementary integer row operations, hence unimodular.
fn unimodular(n: usize) -> impl Strategy<Value = RMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut m = RMatrix::identity(n);
        for (i, j, k, swap) in ops {
            let mut e = RMatrix::identity(n);
            if swap {
                e[(i, i)] = int(0);
                e[(j, j)] = int(0);
                e[(i, j)] = int(1);
                e[(j, i)] = int(1);
                if i == j {
                    e[(i, i)] = int(-1);
                }
            } else if i != j {
                e[(i, j)] = int(k);
            }
            m = &e * &m;
        }
        m
    })
}

fn word(generators: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..generators, any::<bool>()), 0..=max_len).prop_map(|letters| {
        Word(
            letters
                .into_iter()
                .map(|(generator, inverse)| Letter { generator, inverse })
                .collect(),
        )
    })
}

fn embedded(name: &str) -> &'static (CrystalGroupSpec, EmbeddingResult) {
    static CACHE: OnceLock<Vec<(String, (CrystalGroupSpec, EmbeddingResult))>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        catalog::names()
            .iter()
            .map(|n| {
                let (spec, result, _) = embed_pipeline(&catalog::lookup(n).unwrap(), &EmbedOptions::default()).unwrap();
                (n.to_string(), (spec, result))
            })
            .collect()
    });
    &all.iter().find(|(n, _)| n == name).unwrap().1
}

fn catalog_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(catalog::names().to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_is_two_sided(m in int_matrix(3, 3, 5)) {
        prop_assume!(!m.determinant().unwrap().is_zero());
        let inv = m.inverse().unwrap();
        prop_assert!((&m * &inv).is_identity());
        prop_assert!((&inv * &m).is_identity());
    }

    #[test]
    fn determinant_is_multiplicative(a in int_matrix(3, 3, 4), b in int_matrix(3, 3, 4)) {
        prop_assert_eq!((&a * &b).determinant().unwrap(), a.determinant().unwrap() * b.determinant().unwrap());
    }

    #[test]
    fn signature_survives_unimodular_congruence(q in symmetric(4), p in unimodular(4)) {
        prop_assert_eq!(q.congruent(&p).unwrap().signature(), q.signature());
    }

    #[test]
    fn signature_counts_rank(q in symmetric(4)) {
        let s = q.signature();
        prop_assert_eq!(s.positives + s.negatives, q.matrix().rank());
    }

    #[test]
    fn solve_recovers_consistent_systems(a in int_matrix(3, 4, 4), x in rat_vector(4)) {
        let b = a.mul_vec(&x);
        match solve_linear(&a, &b).unwrap() {
            LinearSolution::Solvable { particular, null_space } => {
                prop_assert_eq!(a.mul_vec(&particular), b);
                for v in null_space {
                    prop_assert!(a.mul_vec(&v).is_zero());
                }
            }
            LinearSolution::Inconsistent => prop_assert!(false, "consistent system reported inconsistent"),
        }
    }

    #[test]
    fn null_space_has_complementary_dimension(a in int_matrix(3, 5, 3)) {
        let basis = null_space(&a);
        prop_assert_eq!(basis.len() + a.rank(), 5);
    }

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(a in int_matrix(3, 4, 6)) {
        let f = smith_normal_form(&a).unwrap();
        prop_assert_eq!(&(&f.u * &a) * &f.v, f.s.clone());
        prop_assert!(f.u.determinant().unwrap() == int(1) || f.u.determinant().unwrap() == int(-1));
        prop_assert!(f.v.determinant().unwrap() == int(1) || f.v.determinant().unwrap() == int(-1));
        let d = f.invariant_factors();
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        prop_assert_eq!(f.rank(), a.rank());
    }

    #[test]
    fn denominator_lcm_clears_and_divides(v in rat_vector(5)) {
        let l = denominator_lcm(&v);
        prop_assert!(v.scale(&Rational::from_integer(l.clone())).is_integral());
        let product = v.iter().fold(num_bigint::BigInt::one(), |acc, x| acc * x.denom());
        prop_assert!(product.is_multiple_of(&l));
    }

    #[test]
    fn word_evaluation_is_a_homomorphism(name in catalog_name(), u in word(3, 6), w in word(3, 6)) {
        let spec = catalog::lookup(name).unwrap();
        let k = spec.generators().len();
        let clip = |x: &Word| Word(x.0.iter().map(|l| Letter { generator: l.generator % k, ..*l }).collect());
        let (u, w) = (clip(&u), clip(&w));
        let gens = spec.isometries().unwrap();
        let uw = evaluate_word(&u.concat(&w), &gens).unwrap();
        let composed = evaluate_word(&u, &gens).unwrap().compose(&evaluate_word(&w, &gens).unwrap());
        prop_assert_eq!(uw, composed);
        prop_assert!(evaluate_word(&u.concat(&u.inverse()), &gens).unwrap().is_identity());
    }

    #[test]
    fn matrix_words_are_integral_cusp_isometries(name in catalog_name(), w in word(3, 8)) {
        let (spec, r) = embedded(name);
        let k = spec.generators().len();
        let w = Word(w.0.iter().map(|l| Letter { generator: l.generator % k, ..*l }).collect());
        let m = evaluate_matrix_word(&w, &r.matrices).unwrap();
        prop_assert!(m.is_integral());
        prop_assert!(check_isometry(&m, &r.form).is_ok());
        prop_assert_eq!(m.mul_vec(&r.v1), r.v1.clone());
    }

    #[test]
    fn reduce_mod_is_multiplicative(u in word(2, 6), w in word(2, 6), m in 2u64..=13) {
        let (_, r) = embedded("hantsche-wendt");
        let x = evaluate_matrix_word(&u, &r.matrices).unwrap();
        let y = evaluate_matrix_word(&w, &r.matrices).unwrap();
        let xy = reduce_mod(&(&x * &y), m).unwrap();
        prop_assert_eq!(xy, reduce_mod(&x, m).unwrap().mul(&reduce_mod(&y, m).unwrap()));
    }

    #[test]
    fn tp_words_are_members(name in catalog_name(), p in 1u64..=3, exps in prop::collection::vec(-3i64..=3, 3)) {
        let (_, r) = embedded(name);
        let tp = build_tp(r, p).unwrap();
        let mut g = RMatrix::identity(r.dim + 2);
        for (gen, e) in tp.generators.iter().zip(&exps) {
            g = &g * &gen.pow(*e).unwrap();
        }
        prop_assert!(separate(&g, &tp, r).unwrap().is_member());
    }

    #[test]
    fn separation_outcomes_certify(name in catalog_name(), w in word(3, 6), p in 2u64..=3) {
        let (spec, r) = embedded(name);
        let k = spec.generators().len();
        let w = Word(w.0.iter().map(|l| Letter { generator: l.generator % k, ..*l }).collect());
        let g = evaluate_matrix_word(&w, &r.matrices).unwrap();
        let tp = build_tp(r, p).unwrap();
        match separate(&g, &tp, r).unwrap() {
            SeparationOutcome::Separated(witness) => {
                prop_assert!(verify_witness(&g, &tp, &witness).unwrap());
                prop_assert!(!witness.tp_image.contains(&witness.image));
            }
            SeparationOutcome::Member { translation } => {
                prop_assert_eq!(r.translation_matrix(&translation).unwrap(), g);
            }
            SeparationOutcome::OutsideStabilizer { .. } => prop_assert!(false, "group elements fix v1"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn group_file_round_trip(spec in random_spec()) {
        let text = serialize_group_file(&spec);
        prop_assert_eq!(parse_group_file(&text).unwrap(), spec);
    }

    #[test]
    fn abstract_solution_satisfies_the_axioms(name in catalog_name()) {
        let sol = solve_translation_parts(&catalog::lookup(name).unwrap().to_abstract()).unwrap();
        prop_assert!(check_group_axioms(&sol.spec).unwrap().passed());
    }

    #[test]
    fn any_seed_form_embeds(name in catalog_name(), a in int_matrix(3, 3, 3)) {
        let spec = catalog::lookup(name).unwrap();
        let n = spec.dim();
        let a = a.submatrix(0, n, 0, n);
        let seed = SymmetricForm::new((&a * &a.transpose()).add(&RMatrix::identity(n))).unwrap();
        let options = EmbedOptions { seed: Some(seed), ..EmbedOptions::default() };
        let (spec, r, report) = embed_pipeline(&spec, &options).unwrap();
        prop_assert!(report.passed());
        let config = VerifyConfig { samples: 20, ..VerifyConfig::default() };
        prop_assert!(full_report(&r, &spec, &config).passed());
    }

    #[test]
    fn verification_sampling_seed_is_irrelevant(name in catalog_name(), seed in any::<u64>()) {
        let (spec, r) = embedded(name);
        let config = VerifyConfig { samples: 30, max_word_len: 8, seed };
        prop_assert!(full_report(r, spec, &config).passed());
    }
}

fn random_spec() -> impl Strategy<Value = CrystalGroupSpec> {
    (1usize..=3, 1usize..=3, any::<bool>()).prop_flat_map(|(dim, k, explicit)| {
        let generator = (
            prop::sample::subsequence((0..dim).collect::<Vec<_>>(), dim).prop_shuffle(),
            prop::collection::vec(any::<bool>(), dim),
            rat_vector(dim),
        );
        (
            prop::collection::vec(generator, k),
            prop::collection::vec(word(k, 5), 0..3),
            prop::collection::vec(word(k, 5), dim),
        )
            .prop_map(move |(gens, relators, mu_words)| {
                let generators = gens
                    .into_iter()
                    .enumerate()
                    .map(|(i, (perm, signs, t))| {
                        // signed permutation matrix
                        let mut h = RMatrix::zeros(dim, dim);
                        for (row, (&col, neg)) in perm.iter().zip(signs).enumerate() {
                            h[(row, col)] = int(if neg { -1 } else { 1 });
                        }
                        Generator {
                            name: format!("g{i}"),
                            holonomy: h,
                            translation: explicit.then_some(t),
                        }
                    })
                    .collect();
                CrystalGroupSpec::new(dim, generators, relators, mu_words).unwrap()
            })
    })
}
