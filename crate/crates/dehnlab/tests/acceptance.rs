//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its headline numbers. Run with `cargo test --test acceptance`.

use rayon::prelude::*;

use dehnlab::certificates::{Certificate, Factor};
use dehnlab::diagrams::Diagram;
use dehnlab::estimator::{l2_exact, L2Outcome, SearchBounds};
use dehnlab::grigorchuk::{
    audit_gamma_bounds, first_nontrivial_level, is_trivial_gamma, psi0, psi0_components,
    rewrite_to_h, Decomposer, HWord, SignedToken, Token,
};
use dehnlab::hnn::audit_gamma_t_bounds;
use dehnlab::presentations::Presentation;
use dehnlab::words::{sigma, sigma_pow, Word};

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

/// The diagram laws every produced certificate must satisfy (criterion 5):
/// the folded diagram's boundary freely reduces to W, the Euler
/// characteristic is 1, 0- and 2-cells are bounded by twice the 1-cells,
/// and 1-regular diagrams over presentations without length-1 relators obey
/// |Δ(1)| ≤ 3(1+2m)|Δ(0)|.
fn assert_diagram_laws(cert: &Certificate) {
    let mut d = Diagram::from_certificate(cert).expect("certificate must verify");
    d.fold();
    assert_eq!(
        d.boundary_word().free_reduce(),
        cert.word.free_reduce(),
        "boundary mismatch for {}",
        cert.word
    );
    let c = d.counts();
    assert_eq!(c.euler(), 1, "Euler characteristic for {}", cert.word);
    if c.e > 0 {
        assert!(c.v <= 2 * c.e, "v ≤ 2e for {}", cert.word);
        assert!(c.f <= 2 * c.e, "f ≤ 2e for {}", cert.word);
    }
    let has_short_relator = !cert.presentation.enumerate_relators(1).is_empty();
    if !has_short_relator && d.is_one_regular() {
        let m = cert.presentation.generators().len();
        assert!(c.e <= 3 * (1 + 2 * m) * c.v, "edge bound for {}", cert.word);
    }
}

/// All words over {a,b,c,d}± of length ≤ max, including unreduced ones.
fn all_gamma_words(max: usize) -> Vec<Word> {
    let letters = "abcdABCD";
    let mut out = vec![Word::empty()];
    let mut layer: Vec<String> = vec![String::new()];
    for _ in 0..max {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for word in &layer {
            for l in letters.chars() {
                let mut s = word.clone();
                s.push(l);
                out.push(Word::parse(&s).unwrap());
                next.push(s);
            }
        }
        layer = next;
    }
    out
}

#[test]
fn criterion_1_solver_certificate_oracle_triangle() {
    let words = all_gamma_words(6);
    let total = words.len();
    assert_eq!(total, (0..=6).map(|n| 8usize.pow(n)).sum::<usize>());

    let (trivial_count, nontrivial_count) = words
        .par_chunks(8192)
        .map(|chunk| {
            let mut dec = Decomposer::new(10_000_000);
            let mut trivial = 0u64;
            let mut nontrivial = 0u64;
            for word in chunk {
                if is_trivial_gamma(word).expect("solver must not fail") {
                    trivial += 1;
                    let cert = dec.decompose(word).expect("decompose must succeed");
                    assert!(cert.verify().unwrap(), "certificate fails for {word}");
                    assert_diagram_laws(&cert);
                } else {
                    nontrivial += 1;
                    let level = first_nontrivial_level(word, 12);
                    assert!(
                        level.is_some(),
                        "{word} is declared nontrivial but acts trivially to level 12"
                    );
                }
            }
            (trivial, nontrivial)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    assert_eq!(trivial_count + nontrivial_count, total as u64);
    println!(
        "acceptance criterion 1: PASS — {total} words ≤ 6 exhausted, \
         {trivial_count} trivial all certified, {nontrivial_count} nontrivial all witnessed ≤ level 12"
    );
}

#[test]
fn criterion_2_lysenok_relator_series() {
    let mut dec = Decomposer::new(10_000_000);
    for (base, unit) in [(w("ad").repeat(4), 8usize), (w("adacac").repeat(4), 24)] {
        for i in 0..=6u32 {
            let word = sigma_pow(&base, i);
            assert_eq!(word.len(), unit << i, "length of σ^{i} image");
            assert!(is_trivial_gamma(&word).unwrap(), "σ^{i} image must be trivial");
            let cert = dec.decompose(&word).unwrap();
            assert!(cert.verify().unwrap());
            let tau = cert.h_star_tuple().unwrap();
            let bound = (word.len() as f64).log2();
            for (j, &count) in tau.counts().iter().enumerate() {
                if count > 0 {
                    assert!(j as f64 <= bound, "τ_{j} ≠ 0 above log₂ length at i = {i}");
                }
            }
            if word.len() <= 512 {
                assert_diagram_laws(&cert);
            } else {
                // Large faces still fold; spot-check structure once.
                let mut d = Diagram::from_certificate(&cert).unwrap();
                d.fold();
                assert_eq!(d.counts().euler(), 1);
            }
        }
    }
    println!(
        "acceptance criterion 2: PASS — σⁱ((ad)⁴) and σⁱ((adacac)⁴) for i ≤ 6: \
         lengths exact, all trivial, certificates verify, τ supported below log₂x"
    );
}

#[test]
fn criterion_3_sigma_a2_elimination() {
    let star = Presentation::builtin("lysenok_star").unwrap();
    for i in 1..=8u32 {
        let word = sigma_pow(&w("aa"), i);
        assert_eq!(word.len(), (1usize << (i + 2)) - 2, "length of σ^{i}(a²)");
        let cert = Certificate::new(word.clone(), star.clone(), vec![Factor::plus(word.clone())]);
        assert!(cert.verify().unwrap());
        let eliminated = cert.eliminate_sigma_a2();
        assert_eq!(eliminated.len(), (1 << (i + 1)) - 1, "factor count at i = {i}");
        assert!(eliminated.verify().unwrap(), "eliminated certificate fails at i = {i}");
        let tau = eliminated.h_star_tuple().unwrap();
        assert_eq!(tau.max_height(), Some(0), "all factors must have height 0 at i = {i}");
        assert_eq!(tau.get(0), (1 << (i + 1)) - 1);
        assert_diagram_laws(&eliminated);
    }
    println!(
        "acceptance criterion 3: PASS — σⁱ(a²) for i = 1..8: lengths 2^(i+2)−2 exact, \
         elimination yields exactly 2^(i+1)−1 verifying height-0 factors"
    );
}

#[test]
fn criterion_4_psi0_tables() {
    // The splitting table on all seven subgroup generators.
    let table = [
        (Token::B, ("a", "c")),
        (Token::C, ("a", "d")),
        (Token::D, ("", "b")),
        (Token::Aba, ("c", "a")),
        (Token::Aca, ("d", "a")),
        (Token::Ada, ("b", "")),
        (Token::A2, ("", "")),
    ];
    for (t, (l, r)) in table {
        let h = HWord { tokens: vec![SignedToken { token: t, inverted: false }] };
        assert_eq!(psi0(&h), (w(l), w(r)), "ψ₀ on {t:?}");
    }
    // ψ₀ ∘ rewrite ∘ σ on the four generators.
    let composed = [("a", ("d", "a")), ("b", ("", "b")), ("c", ("a", "c")), ("d", ("a", "d"))];
    for (g, (l, r)) in composed {
        let image = sigma().apply(&w(g)).unwrap();
        assert_eq!(rewrite_to_h(&image).unwrap().expansion(), image);
        assert_eq!(psi0_components(&image).unwrap(), (w(l), w(r)), "ψ₀∘σ on {g}");
    }
    println!(
        "acceptance criterion 4: PASS — ψ₀ matches the seven-generator table and \
         ψ₀∘σ matches the wreath table on a, b, c, d"
    );
}

#[test]
fn criterion_5_diagram_laws() {
    // The law checker runs on every certificate produced across the suite
    // (criteria 1, 2, 3, 6, 7, 8 call it); this test exercises it on a
    // dedicated battery including folding-heavy shapes.
    let mut dec = Decomposer::new(10_000_000);
    let mut checked = 0;
    for input in [
        "",
        "aa",
        "bcd",
        "acaaca",
        "abbA",
        "BDBCDBCDBD",
        "DCDBCB",
        "adadadad",
        "CBCDBCDC",
    ] {
        let word = w(input);
        if !is_trivial_gamma(&word).unwrap() {
            continue;
        }
        let cert = dec.decompose(&word).unwrap();
        assert_diagram_laws(&cert);
        let cert_r = dec.decompose_r(&word).unwrap();
        assert_diagram_laws(&cert_r);
        checked += 2;
    }
    // Mirror pairs collapse to a point and still satisfy every law.
    let lysenok = Presentation::builtin("lysenok").unwrap();
    let mirror = Certificate::new(
        Word::empty(),
        lysenok,
        vec![
            Factor::new(w("ba"), w("ad").repeat(4), dehnlab::certificates::Sign::Plus),
            Factor::new(w("ba"), w("ad").repeat(4), dehnlab::certificates::Sign::Minus),
        ],
    );
    assert_diagram_laws(&mirror);
    checked += 1;
    println!("acceptance criterion 5: PASS — diagram laws hold on {checked} dedicated certificates plus every certificate produced in criteria 1–3 and 6–8");
}

#[test]
fn criterion_6_abelian_rank2_l2() {
    let p = Presentation::builtin("ex21").unwrap();
    // L₂(aⁱ b a⁻ⁱ b⁻¹) = 1 for i ≤ 5.
    for i in 1..=5usize {
        let word = dehnlab::presentations::abelian_relator(i);
        for bounds in [
            SearchBounds::for_word(&p, &word, 2),
            SearchBounds::for_word(&p, &word, 2).doubled_conjugators(),
        ] {
            match l2_exact(&p, &word, bounds).unwrap().outcome {
                L2Outcome::Exact { l, certificate } => {
                    assert_eq!(l, 1, "L₂ at i = {i}");
                    assert!(certificate.verify().unwrap());
                    assert_diagram_laws(&certificate);
                }
                L2Outcome::NoCertWithin => panic!("missed the relator at i = {i}"),
            }
        }
    }
    // L₂([aⁱ, bʲ]) = j for i, j ≤ 3, cross-checked at doubled bounds.
    for i in 1..=3usize {
        for j in 1..=3usize {
            let a = w("a").repeat(i);
            let b = w("b").repeat(j);
            let word = a.concat(&b).concat(&a.inverse()).concat(&b.inverse());
            for bounds in [
                SearchBounds::for_word(&p, &word, j as u32),
                SearchBounds::for_word(&p, &word, j as u32).doubled_conjugators(),
            ] {
                match l2_exact(&p, &word, bounds).unwrap().outcome {
                    L2Outcome::Exact { l, certificate } => {
                        assert_eq!(l as usize, j, "L₂([a^{i}, b^{j}])");
                        assert_diagram_laws(&certificate);
                    }
                    L2Outcome::NoCertWithin => panic!("no certificate for [a^{i}, b^{j}]"),
                }
            }
            // Minimality: j−1 factors are provably not enough.
            let tighter = SearchBounds::for_word(&p, &word, j as u32 - 1);
            assert!(matches!(
                l2_exact(&p, &word, tighter).unwrap().outcome,
                L2Outcome::NoCertWithin
            ));
        }
    }
    println!(
        "acceptance criterion 6: PASS — L₂(aⁱbа⁻ⁱb⁻¹) = 1 for i ≤ 5 and \
         L₂([aⁱ,bʲ]) = j for i,j ≤ 3, exhaustive within declared and doubled bounds"
    );
}

#[test]
fn criterion_7_jockusch_kapovich_l2() {
    let p = Presentation::builtin("ex23").unwrap(); // K = {1, 2, 5}
    for k in [1usize, 2, 5] {
        let word = w("b").repeat(k);
        let bounds = SearchBounds {
            max_factors: 2,
            conj_bound: k + 8,
            relator_len_cap: 26,
            state_budget: 2_000_000,
        };
        match l2_exact(&p, &word, bounds).unwrap().outcome {
            L2Outcome::Exact { l, certificate } => {
                assert_eq!(l, 2, "L₂(b^{k})");
                assert!(certificate.verify().unwrap());
                assert_diagram_laws(&certificate);
            }
            L2Outcome::NoCertWithin => panic!("no certificate for b^{k}"),
        }
    }
    for k in [3usize, 4] {
        let word = w("b").repeat(k);
        let bounds = SearchBounds {
            max_factors: 2,
            conj_bound: k + 8,
            relator_len_cap: 26,
            state_budget: 2_000_000,
        };
        assert!(
            matches!(l2_exact(&p, &word, bounds).unwrap().outcome, L2Outcome::NoCertWithin),
            "b^{k} must have no two-factor certificate within bounds"
        );
    }
    println!(
        "acceptance criterion 7: PASS — with K = {{1,2,5}}: L₂(bᵏ) = 2 on K, \
         and complete bounded search rules out two factors for k = 3, 4"
    );
}

#[test]
fn criterion_8_gamma_t_elimination_bounds() {
    let report = audit_gamma_t_bounds(14, 200, 17, 4_000_000).expect("audit must run");
    assert_eq!(report.samples, 200, "must collect 200 trivial samples");
    assert_eq!(report.bound_violations, 0, "|u| ≤ 6·2^(x/2) and steps ≤ 12·2^(x/2)");
    assert_eq!(report.doubling_violations, 0, "per-pinch a-count doubling");
    assert!(report.all_verified, "every transported certificate verifies");
    assert!(report.max_len_ratio <= 1.0 && report.max_steps_ratio <= 1.0);
    println!(
        "acceptance criterion 8: PASS — 200 seeded trivial Γ_t words ≤ 14 (seed {}): \
         zero bound violations (worst len ratio {:.3}, worst step ratio {:.3}), all certificates verify",
        report.seed, report.max_len_ratio, report.max_steps_ratio
    );
}

#[test]
fn criterion_9_bound_audit_smoke() {
    let report = audit_gamma_bounds(12, 50_000_000).expect("audit must run");
    assert!(report.words_audited > 0);
    assert!(report.tau_support_ok, "τᵢ = 0 for i > log₂x on every word");
    assert!(
        report.fitted_c2 <= 100.0,
        "max cost_f2/x² = {} exceeds the smoke constant 100",
        report.fitted_c2
    );
    assert!(
        report.fitted_c1 <= 2000.0,
        "max cost_f1_bound/(x²log₂x) = {} exceeds the smoke constant 2000",
        report.fitted_c1
    );
    println!(
        "acceptance criterion 9: PASS — exhaustive over {} trivial words ≤ 12: \
         fitted constants c₂ = {:.3} ≤ 100 and c₁ = {:.3} ≤ 2000, τ-support holds everywhere \
         (join certified: {})",
        report.words_audited, report.fitted_c2, report.fitted_c1, report.join_certified
    );
}
