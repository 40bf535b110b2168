//! The ascending HNN extension Γ_t = ⟨a,b,c,d,t ∥ base relators,
//! t g t⁻¹ σ(g)⁻¹⟩.
//!
//! Since conjugation by the stable letter realizes σ, every word with
//! t-exponent zero can be rewritten t-free: repeatedly locate a cyclic
//! subword t·X·t⁻¹ with X t-free and replace it by σ(X). The elimination is
//! logged as certificate factors over the finite presentation, so the word
//! problem, decomposition and the bound audit all reduce to the Γ machinery
//! on the t-free remainder. Triviality of a t-free word in Γ_t is delegated
//! to the Γ solver: the base group embeds because σ is injective on Γ, so
//! no separate HNN normal-form theory is needed here.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::certificates::{conjugate_factors, CertError, Certificate, Factor, Sign};
use crate::grigorchuk::{is_trivial_gamma, Decomposer, GammaError};
use crate::presentations::{t_relators, Presentation};
use crate::words::{sigma, Letter, Word};

pub const GAMMA_T_ALPHABET: &[u8] = b"abcdt";

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HnnError {
    #[error("word has nonzero t-exponent")]
    NonzeroTExponent,
    #[error("word {0} is not trivial in the HNN extension")]
    NotTrivial(String),
    #[error("{0}")]
    Gamma(#[from] GammaError),
    #[error("{0}")]
    Cert(#[from] CertError),
    #[error("{0}")]
    Word(#[from] crate::words::WordError),
}

/// Result of t-elimination. In the free group,
/// `input = (∏ factors) · conjugator · word · conjugator⁻¹`,
/// the factors are conjugated t-relators, and `word` is t-free.
#[derive(Debug, Clone)]
pub struct TElimination {
    pub word: Word,
    pub conjugator: Word,
    pub factors: Vec<Factor>,
    /// number of t·X·t⁻¹ pinches applied; each removes two t-letters
    pub pairs: u32,
    /// number of t-relator instances applied, one per letter of each X
    pub steps: u64,
    /// a-occurrence counts before and after each pinch
    pub a_counts: Vec<(usize, usize)>,
}

fn t_relator_for(g: u8) -> Word {
    let idx = match g {
        b'a' => 0,
        b'b' => 1,
        b'c' => 2,
        b'd' => 3,
        _ => panic!("no t-relator for {:?}", g as char),
    };
    t_relators()[idx].clone()
}

/// Factors proving t X t⁻¹ = (∏ factors) · σ(X) for a t-free word X:
/// one conjugated t-relator per letter, in reading order.
fn pinch_factors(x: &Word) -> Vec<Factor> {
    let mut out = Vec::with_capacity(x.len());
    let t = Word::parse("t").unwrap();
    for i in 0..x.len() {
        let prefix = sigma().apply(&x.subword(0..i)).unwrap();
        let l = x.letter(i);
        if !l.inverted {
            out.push(Factor::new(prefix, t_relator_for(l.generator), Sign::Plus));
        } else {
            // t g⁻¹ t⁻¹ σ(g) = (t g⁻¹ t⁻¹) r_g⁻¹ (t g⁻¹ t⁻¹)⁻¹.
            let tgt = t
                .concat(&Word::from_letters([l]))
                .concat(&t.inverse());
            out.push(Factor::new(prefix.concat(&tgt), t_relator_for(l.generator), Sign::Minus));
        }
    }
    out
}

/// Eliminates all t-letters from a word with t-exponent zero. Works on the
/// cyclic word: among the candidate subwords t·X·t⁻¹ (X t-free) the one
/// starting leftmost in the current linearization is pinched; wrap-around
/// candidates are first rotated into view, which only grows the conjugator.
pub fn t_eliminate(w: &Word) -> Result<TElimination, HnnError> {
    if w.exponent_sum(b't') != 0 {
        return Err(HnnError::NonzeroTExponent);
    }
    let mut cur = w.free_reduce();
    let mut z = Word::empty();
    let mut factors: Vec<Factor> = Vec::new();
    let mut pairs = 0u32;
    let mut steps = 0u64;
    let mut a_counts = Vec::new();

    loop {
        cur = cur.free_reduce();
        if cur.occurrences(b't') == 0 {
            break;
        }

        // Leftmost t whose next t-letter around the cycle is t⁻¹.
        let n = cur.len();
        let mut found: Option<(usize, usize)> = None; // (position of t, |X|)
        'scan: for i in 0..n {
            let l = cur.letter(i);
            if l.generator != b't' || l.inverted {
                continue;
            }
            for k in 1..n {
                let m = cur.letter((i + k) % n);
                if m.generator == b't' {
                    if m.inverted {
                        found = Some((i, k - 1));
                        break 'scan;
                    }
                    break;
                }
            }
        }
        let (i, xlen) = found.expect("zero t-exponent guarantees a pinchable pair");

        if i + xlen + 1 >= n {
            // The pair wraps: rotate the t to the front.
            z = z.concat(&cur.subword(0..i)).free_reduce();
            cur = cur.rotate(i);
            continue;
        }

        let x = cur.subword(i + 1..i + 1 + xlen);
        let before_a = cur.occurrences(b'a');
        let prefix = cur.subword(0..i);
        let pinched = pinch_factors(&x);
        factors.extend(conjugate_factors(&pinched, &z.concat(&prefix)));
        steps += x.len() as u64;
        pairs += 1;
        cur = prefix
            .concat(&sigma().apply(&x)?)
            .concat(&cur.subword(i + 1 + xlen + 1..n))
            .free_reduce();
        a_counts.push((before_a, cur.occurrences(b'a')));
    }

    Ok(TElimination { word: cur, conjugator: z, factors, pairs, steps, a_counts })
}

/// Word problem for Γ_t: nonzero t-exponent is never trivial; otherwise
/// eliminate t and ask the Γ solver.
pub fn is_trivial_gamma_t(w: &Word) -> Result<bool, HnnError> {
    if w.exponent_sum(b't') != 0 {
        return Ok(false);
    }
    let elim = t_eliminate(w)?;
    Ok(is_trivial_gamma(&elim.word)?)
}

/// A verifying certificate over the finite presentation of Γ_t: the logged
/// t-relator factors, then the transported Γ-certificate of the t-free
/// remainder.
pub fn decompose_gamma_t(w: &Word, budget: u64) -> Result<Certificate, HnnError> {
    let gamma_t = Presentation::builtin("gamma_t").unwrap();
    let elim = t_eliminate(w)?;
    if !is_trivial_gamma(&elim.word)? {
        return Err(HnnError::NotTrivial(w.to_string()));
    }
    let gamma_cert = Decomposer::new(budget).decompose_r(&elim.word)?;
    let transported = gamma_cert.t_transport()?;
    let mut factors = elim.factors;
    factors.extend(conjugate_factors(&transported.factors, &elim.conjugator));
    Ok(Certificate::new(w.clone(), gamma_t, factors))
}

// ---------------------------------------------------------------------------
// Bound audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct GammaTSample {
    pub word: String,
    pub x: usize,
    pub eliminated_len: usize,
    pub len_bound: f64,
    pub steps: u64,
    pub steps_bound: f64,
    pub factors: u64,
    pub factor_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaTAuditReport {
    pub x_max: usize,
    pub seed: u64,
    pub samples: usize,
    /// violations of |u| ≤ 6·2^{x/2} or steps ≤ 12·2^{x/2}
    pub bound_violations: usize,
    /// violations of the per-pinch a-count doubling bound
    pub doubling_violations: usize,
    pub all_verified: bool,
    pub max_len_ratio: f64,
    pub max_steps_ratio: f64,
    /// max factors / (x·2ˣ)
    pub max_factor_ratio: f64,
    pub worst: Vec<GammaTSample>,
}

/// Deterministically samples trivial words of Γ_t of length ≤ `x_max` —
/// half rejection-sampled uniform reduced words, half products of
/// conjugated relators — and checks the elimination bounds on each.
pub fn audit_gamma_t_bounds(
    x_max: usize,
    samples: usize,
    seed: u64,
    budget: u64,
) -> Result<GammaTAuditReport, HnnError> {
    let words = sample_trivial_words(x_max, samples, seed);
    let mut report = GammaTAuditReport {
        x_max,
        seed,
        samples: words.len(),
        bound_violations: 0,
        doubling_violations: 0,
        all_verified: true,
        max_len_ratio: 0.0,
        max_steps_ratio: 0.0,
        max_factor_ratio: 0.0,
        worst: Vec::new(),
    };
    for w in &words {
        let x = w.len();
        let elim = t_eliminate(w)?;
        let cap = 6.0 * 2f64.powf(x as f64 / 2.0);
        let steps_cap = 12.0 * 2f64.powf(x as f64 / 2.0);
        if elim.word.len() as f64 > cap || elim.steps as f64 > steps_cap {
            report.bound_violations += 1;
        }
        for &(before, after) in &elim.a_counts {
            if after > 2 * before {
                report.doubling_violations += 1;
            }
        }
        let cert = decompose_gamma_t(w, budget)?;
        if !cert.verify()? {
            report.all_verified = false;
        }
        let len_ratio = elim.word.len() as f64 / cap;
        let steps_ratio = elim.steps as f64 / steps_cap;
        let factor_ratio = if x > 0 {
            cert.cost_f2() as f64 / (x as f64 * 2f64.powi(x as i32))
        } else {
            0.0
        };
        report.max_len_ratio = report.max_len_ratio.max(len_ratio);
        report.max_steps_ratio = report.max_steps_ratio.max(steps_ratio);
        if factor_ratio > report.max_factor_ratio {
            report.max_factor_ratio = factor_ratio;
            report.worst = vec![GammaTSample {
                word: w.to_string(),
                x,
                eliminated_len: elim.word.len(),
                len_bound: cap,
                steps: elim.steps,
                steps_bound: steps_cap,
                factors: cert.cost_f2(),
                factor_ratio,
            }];
        }
    }
    Ok(report)
}

/// Deterministic mixed sampler for trivial Γ_t words of length ≤ `x_max`.
pub fn sample_trivial_words(x_max: usize, samples: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma_t = Presentation::builtin("gamma_t").unwrap();
    let relators: Vec<Word> =
        gamma_t.enumerate_relators(24).into_iter().map(|(r, _)| r).collect();
    let letters: Vec<Letter> = GAMMA_T_ALPHABET
        .iter()
        .flat_map(|&g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = Vec::new();
    let mut attempts = 0u64;
    while out.len() < samples && attempts < 4_000_000 {
        attempts += 1;
        let word = if out.len() % 2 == 0 {
            // Product of one or two conjugated relators, trivial by fiat.
            let k = rng.gen_range(1..=2);
            let mut acc = Word::empty();
            for _ in 0..k {
                let r = &relators[rng.gen_range(0..relators.len())];
                let clen = rng.gen_range(0..=2);
                let conj = Word::from_letters(
                    (0..clen).map(|_| letters[rng.gen_range(0..letters.len())]),
                );
                let sign = if rng.gen_bool(0.5) { r.clone() } else { r.inverse() };
                acc = acc.concat(&sign.conjugate(&conj)).free_reduce();
            }
            acc
        } else {
            // Uniform reduced word, kept only when trivial.
            let len = rng.gen_range(1..=x_max);
            let mut bytes: Vec<u8> = Vec::with_capacity(len);
            while bytes.len() < len {
                let l = letters[rng.gen_range(0..letters.len())].generator;
                let inv = rng.gen_bool(0.5);
                let b = if inv { l.to_ascii_uppercase() } else { l };
                if bytes.last().is_some_and(|&t| t ^ b == 0x20) {
                    continue;
                }
                bytes.push(b);
            }
            Word::from_bytes(bytes)
        };
        if word.len() > x_max || word.is_empty() {
            continue;
        }
        if is_trivial_gamma_t(&word).unwrap_or(false) {
            out.push(word);
        }
    }
    out
}
