//! Randomized invariants: word algebra laws, the splitting homomorphism,
//! positivization identities, and stability of certificate verification
//! under every certificate transformation.

use proptest::prelude::*;

use dehnlab::certificates::{Certificate, Factor, Sign};
use dehnlab::diagrams::Diagram;
use dehnlab::grigorchuk::{positivize, psi0_components, rewrite_to_h};
use dehnlab::presentations::Presentation;
use dehnlab::words::{sigma, sigma_pow, Word};

fn letters() -> impl Strategy<Value = char> {
    proptest::sample::select("abcdABCD".chars().collect::<Vec<_>>())
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(letters(), 0..=max_len)
        .prop_map(|cs| Word::parse(&cs.into_iter().collect::<String>()).unwrap())
}

/// Random relator of the starred Lysenok family with height ≤ 2.
fn star_relator() -> impl Strategy<Value = Word> {
    let pool: Vec<Word> = Presentation::builtin("lysenok_star")
        .unwrap()
        .enumerate_relators(96)
        .into_iter()
        .map(|(r, _)| r)
        .collect();
    proptest::sample::select(pool)
}

fn factor() -> impl Strategy<Value = Factor> {
    (word(5), star_relator(), proptest::bool::ANY).prop_map(|(conj, relator, plus)| {
        Factor::new(conj, relator, if plus { Sign::Plus } else { Sign::Minus })
    })
}

/// A certificate that verifies by construction: the target word is the
/// product of its factors.
fn random_certificate() -> impl Strategy<Value = Certificate> {
    proptest::collection::vec(factor(), 0..5).prop_map(|factors| {
        let star = Presentation::builtin("lysenok_star").unwrap();
        let mut c = Certificate::new(Word::empty(), star, factors);
        c.word = c.product();
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn free_reduction_laws(w in word(16)) {
        let r = w.free_reduce();
        prop_assert!(r.len() <= w.len());
        prop_assert_eq!(r.free_reduce(), r.clone());
        prop_assert!(w.concat(&w.inverse()).free_reduce().is_empty());
        let (core, conj) = w.cyclic_reduce();
        prop_assert_eq!(core.conjugate(&conj), r);
    }

    #[test]
    fn conjugation_preserves_the_cyclic_core(w in word(10), x in word(6)) {
        // Cores agree as cyclic words.
        let (core, _) = w.free_reduce().cyclic_reduce();
        let (core2, _) = w.conjugate(&x).cyclic_reduce();
        prop_assert_eq!(core.len(), core2.len());
        let hit = (0..core.len().max(1)).any(|k| core.rotate(k) == core2);
        prop_assert!(hit, "{} vs {}", core, core2);
    }

    #[test]
    fn sigma_is_a_homomorphism(u in word(8), v in word(8)) {
        let uv = u.concat(&v);
        let lhs = sigma().apply(&uv).unwrap();
        let rhs = sigma().apply(&u).unwrap().concat(&sigma().apply(&v).unwrap()).free_reduce();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn schreier_rewriting_expands_back(w in word(10)) {
        if w.exponent_sum(b'a') % 2 == 0 {
            let h = rewrite_to_h(&w).unwrap();
            prop_assert_eq!(h.expansion(), w.free_reduce());
        } else {
            prop_assert!(rewrite_to_h(&w).is_err());
        }
    }

    #[test]
    fn psi0_is_a_homomorphism(u in word(8), v in word(8)) {
        prop_assume!(u.exponent_sum(b'a') % 2 == 0 && v.exponent_sum(b'a') % 2 == 0);
        let (l1, r1) = psi0_components(&u).unwrap();
        let (l2, r2) = psi0_components(&v).unwrap();
        let (l, r) = psi0_components(&u.concat(&v)).unwrap();
        prop_assert_eq!(l, l1.concat(&l2).free_reduce());
        prop_assert_eq!(r, r1.concat(&r2).free_reduce());
    }

    #[test]
    fn positivization_identity(w in word(12)) {
        let pos = positivize(&w);
        let mut acc = Word::empty();
        for f in &pos.factors {
            acc = acc.concat(&f.expand());
        }
        let rebuilt = acc
            .concat(&pos.conjugator)
            .concat(&pos.word)
            .concat(&pos.conjugator.inverse())
            .free_reduce();
        prop_assert_eq!(rebuilt, w.free_reduce());
        prop_assert!(pos.word.len() <= w.len());
        prop_assert!(pos.factors.len() as u64 <= 4 * w.len() as u64);
        for l in pos.word.letters() {
            prop_assert!(!l.inverted);
        }
    }

    #[test]
    fn verification_survives_all_transformations(c in random_certificate()) {
        prop_assert!(c.verify().unwrap());

        let lifted = c.sigma_lift().unwrap();
        prop_assert_eq!(lifted.word.clone(), sigma().apply(&c.word).unwrap());
        prop_assert!(lifted.verify().unwrap());

        let eliminated = c.eliminate_sigma_a2();
        prop_assert!(eliminated.verify().unwrap());

        // Elimination replaces each σⁱ(a²) factor by 2^{i+1}−1 squares.
        let expected: usize = c
            .factors
            .iter()
            .map(|f| match dehnlab::certificates::sigma_a2_index(&f.relator) {
                Some(i) if i >= 1 => (1usize << (i + 1)) - 1,
                _ => 1,
            })
            .sum();
        prop_assert_eq!(eliminated.len(), expected);

        let transported = eliminated.t_transport().unwrap();
        prop_assert!(transported.verify().unwrap());

        let mut normalized = c.clone();
        normalized.normalize();
        prop_assert!(normalized.verify().unwrap());
    }

    #[test]
    fn height_tuples_sum_and_shift(c in random_certificate()) {
        let tau = c.h_star_tuple().unwrap();
        prop_assert_eq!(tau.total(), c.len() as u64);
        let lifted = c.sigma_lift().unwrap();
        let tau_lifted = lifted.h_star_tuple().unwrap();
        prop_assert_eq!(tau_lifted.total(), tau.total());
        // Heights never shift by more than one level.
        if let (Some(a), Some(b)) = (tau.max_height(), tau_lifted.max_height()) {
            prop_assert!(b <= a + 1);
        }
    }

    #[test]
    fn folded_diagrams_satisfy_the_laws(c in random_certificate()) {
        let mut d = Diagram::from_certificate(&c).unwrap();
        d.fold();
        prop_assert!(d.check_consistency());
        prop_assert_eq!(d.boundary_word().free_reduce(), c.word.free_reduce());
        let counts = d.counts();
        prop_assert_eq!(counts.euler(), 1);
        if counts.e > 0 {
            prop_assert!(counts.v <= 2 * counts.e);
            prop_assert!(counts.f <= 2 * counts.e);
        }
    }

    #[test]
    fn sigma_images_of_long_relators_solve_and_certify(i in 0u32..3) {
        let r = sigma_pow(&Word::parse("ad").unwrap().repeat(4), i);
        prop_assert!(dehnlab::grigorchuk::is_trivial_gamma(&r).unwrap());
    }
}
