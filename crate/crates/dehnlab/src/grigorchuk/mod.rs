//! The Grigorchuk group Γ = ⟨a,b,c,d ∥ Lysenok relators⟩.
//!
//! The word problem is solved by the classical splitting recursion: normal
//! form the word inside C₂ ∗ (C₂×C₂), kill odd a-parity, rewrite the even
//! part over the index-2 subgroup generated by b, c, d, aba, aca, ada, a²,
//! apply the splitting homomorphism ψ₀ into Γ×Γ, and recurse on both
//! components. The same splitting, run constructively, turns trivial words
//! into explicit relator-product certificates.

mod audit;
mod decompose;
mod enumerate;

pub use audit::{audit_gamma_bounds, relator_series_audit, GammaAuditReport, RelatorSeriesRow};
pub use decompose::{
    decompose, decompose_gamma2, decompose_r, positivize, split, Decomposer, Positivized,
    SplitResult,
};
pub use enumerate::{for_each_reduced_word, for_each_trivial_word, reduced_words_of_len};

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

use crate::certificates::CertError;
use crate::words::{Word, WordError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error("word has odd a-exponent, not in the index-2 subgroup")]
    OddAParity,
    #[error("splitting recursion exceeded its depth guard")]
    DepthExceeded,
    #[error("word {0} is not trivial in the group")]
    NotTrivial(String),
    #[error("search budget exhausted ({0} states expanded)")]
    BudgetExceeded(u64),
    #[error("word {0} is not in the normal closure (mod-2 exponent obstruction)")]
    NotInNormalClosure(String),
    #[error("{0}")]
    Cert(#[from] CertError),
    #[error("{0}")]
    Word(#[from] WordError),
}

pub const GAMMA_ALPHABET: &[u8] = b"abcd";

/// Rewrites a word over {a,b,c,d}± into the normal form of
/// C₂ ∗ (C₂×C₂): positive letters, no aa, and no adjacent pair from
/// {b,c,d} (such a pair collapses to the third letter). Equality in Γ is
/// preserved; the rewriting uses only the relators a², b², c², d², bcd.
pub fn normal_form(w: &Word) -> Word {
    let mut stack: Vec<u8> = Vec::with_capacity(w.len());
    for l in w.letters() {
        // g = g⁻¹ modulo the square relators.
        let mut g = l.generator;
        loop {
            let Some(&top) = stack.last() else {
                stack.push(g);
                break;
            };
            if top == g {
                stack.pop();
                break;
            }
            if top != b'a' && g != b'a' {
                // Klein relations: the product of two distinct letters from
                // {b,c,d} is the third.
                stack.pop();
                g = third_letter(top, g);
                continue;
            }
            stack.push(g);
            break;
        }
    }
    Word::from_bytes(stack)
}

pub(crate) fn third_letter(x: u8, y: u8) -> u8 {
    debug_assert!(x != y && x != b'a' && y != b'a');
    b'b' ^ b'c' ^ b'd' ^ x ^ y
}

// ---------------------------------------------------------------------------
// Schreier rewriting over the index-2 subgroup and the splitting map ψ₀
// ---------------------------------------------------------------------------

/// The seven subgroup generators b, c, d, aba, aca, ada, a².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    B,
    C,
    D,
    Aba,
    Aca,
    Ada,
    A2,
}

impl Token {
    /// The word in {a,b,c,d} the token stands for.
    pub fn expansion(self) -> Word {
        let s = match self {
            Token::B => "b",
            Token::C => "c",
            Token::D => "d",
            Token::Aba => "aba",
            Token::Aca => "aca",
            Token::Ada => "ada",
            Token::A2 => "aa",
        };
        Word::parse(s).unwrap()
    }

    /// The image (left, right) under ψ₀.
    fn psi0_pair(self) -> (&'static str, &'static str) {
        match self {
            Token::B => ("a", "c"),
            Token::C => ("a", "d"),
            Token::D => ("", "b"),
            Token::Aba => ("c", "a"),
            Token::Aca => ("d", "a"),
            Token::Ada => ("b", ""),
            Token::A2 => ("", ""),
        }
    }

    fn for_generator(g: u8, conjugated: bool) -> Token {
        match (g, conjugated) {
            (b'b', false) => Token::B,
            (b'c', false) => Token::C,
            (b'd', false) => Token::D,
            (b'b', true) => Token::Aba,
            (b'c', true) => Token::Aca,
            (b'd', true) => Token::Ada,
            _ => panic!("no subgroup token for generator {:?}", g as char),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedToken {
    pub token: Token,
    pub inverted: bool,
}

impl SignedToken {
    fn plus(token: Token) -> Self {
        SignedToken { token, inverted: false }
    }

    fn minus(token: Token) -> Self {
        SignedToken { token, inverted: true }
    }

    pub fn expansion(self) -> Word {
        let w = self.token.expansion();
        if self.inverted {
            w.inverse()
        } else {
            w
        }
    }
}

/// An element of the index-2 subgroup, written over the seven Schreier
/// generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HWord {
    pub tokens: Vec<SignedToken>,
}

impl HWord {
    /// The word in {a,b,c,d}± the token stream expands to, freely reduced.
    pub fn expansion(&self) -> Word {
        let mut acc = Vec::new();
        for t in &self.tokens {
            acc.extend(t.expansion().bytes().iter().copied());
        }
        Word::from_bytes(acc).free_reduce()
    }
}

/// Reidemeister–Schreier rewriting with transversal {1, a}: scans the word
/// tracking the coset and emits one token stream whose expansion freely
/// equals the input. Fails on odd a-exponent.
pub fn rewrite_to_h(w: &Word) -> Result<HWord, GammaError> {
    let mut tokens = Vec::with_capacity(w.len());
    let mut at_a_coset = false;
    for l in w.letters() {
        match (l.generator, l.inverted, at_a_coset) {
            (b'a', false, false) => at_a_coset = true,
            (b'a', true, false) => {
                tokens.push(SignedToken::minus(Token::A2));
                at_a_coset = true;
            }
            (b'a', false, true) => {
                tokens.push(SignedToken::plus(Token::A2));
                at_a_coset = false;
            }
            (b'a', true, true) => at_a_coset = false,
            (g, false, false) => tokens.push(SignedToken::plus(Token::for_generator(g, false))),
            (g, true, false) => tokens.push(SignedToken::minus(Token::for_generator(g, false))),
            (g, false, true) => {
                // a·g = (aga)·a⁻¹·a… as tokens: [aga][a²]⁻¹, staying at the
                // a-coset.
                tokens.push(SignedToken::plus(Token::for_generator(g, true)));
                tokens.push(SignedToken::minus(Token::A2));
            }
            (g, true, true) => {
                tokens.push(SignedToken::plus(Token::A2));
                tokens.push(SignedToken::minus(Token::for_generator(g, true)));
            }
        }
    }
    if at_a_coset {
        return Err(GammaError::OddAParity);
    }
    Ok(HWord { tokens })
}

/// ψ₀: componentwise product of the token images, each side freely reduced.
pub fn psi0(h: &HWord) -> (Word, Word) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for t in &h.tokens {
        let (l, r) = t.token.psi0_pair();
        if t.inverted {
            left.extend(Word::parse(l).unwrap().inverse().bytes().iter().copied());
            right.extend(Word::parse(r).unwrap().inverse().bytes().iter().copied());
        } else {
            left.extend(l.bytes());
            right.extend(r.bytes());
        }
    }
    (Word::from_bytes(left).free_reduce(), Word::from_bytes(right).free_reduce())
}

/// The two components of a word with even a-exponent, i.e. ψ₀ after the
/// Schreier rewriting.
pub fn psi0_components(w: &Word) -> Result<(Word, Word), GammaError> {
    Ok(psi0(&rewrite_to_h(w)?))
}

// ---------------------------------------------------------------------------
// Word problem
// ---------------------------------------------------------------------------

fn memo() -> &'static RwLock<HashMap<Word, bool>> {
    static MEMO: OnceLock<RwLock<HashMap<Word, bool>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

const DEPTH_GUARD: u32 = 128;
const MEMO_MAX_LEN: usize = 40;

/// Decides w = 1 in Γ.
pub fn is_trivial_gamma(w: &Word) -> Result<bool, GammaError> {
    is_trivial_rec(&normal_form(w), DEPTH_GUARD)
}

fn is_trivial_rec(nf: &Word, depth: u32) -> Result<bool, GammaError> {
    if nf.is_empty() {
        return Ok(true);
    }
    if nf.occurrences(b'a') % 2 == 1 {
        // Counting a-letters mod 2 is a homomorphism onto C₂: every relator
        // has even a-exponent.
        return Ok(false);
    }
    if depth == 0 {
        return Err(GammaError::DepthExceeded);
    }
    if nf.len() <= MEMO_MAX_LEN {
        if let Some(&v) = memo().read().unwrap().get(nf) {
            return Ok(v);
        }
    }
    let (w0, w1) = psi0_components(nf)?;
    let ans = is_trivial_rec(&normal_form(&w0), depth - 1)?
        && is_trivial_rec(&normal_form(&w1), depth - 1)?;
    if nf.len() <= MEMO_MAX_LEN {
        memo().write().unwrap().insert(nf.clone(), ans);
    }
    Ok(ans)
}

// ---------------------------------------------------------------------------
// Tree action: the independent nontriviality witness
// ---------------------------------------------------------------------------

/// Applies one generator to a leaf path of the rooted binary tree. Paths are
/// bit strings, bit 0 = the first level. The recursion mirrors the wreath
/// decomposition a = swap, b = (a,c), c = (a,d), d = (1,b); every generator
/// acts as an involution, so signs are irrelevant.
pub fn apply_generator_to_path(g: u8, path: u32, level: u32) -> u32 {
    if level == 0 {
        return path;
    }
    let first = path & 1;
    let rest = path >> 1;
    let descend = |h: u8| apply_generator_to_path(h, rest, level - 1) << 1 | first;
    match (g, first) {
        (b'a', _) => path ^ 1,
        (b'b', 0) => descend(b'a'),
        (b'b', _) => descend(b'c'),
        (b'c', 0) => descend(b'a'),
        (b'c', _) => descend(b'd'),
        (b'd', 0) => path,
        (b'd', _) => descend(b'b'),
        _ => panic!("generator {:?} does not act on the tree", g as char),
    }
}

/// w · path, applying the rightmost letter first.
pub fn apply_word_to_path(w: &Word, path: u32, level: u32) -> u32 {
    let mut p = path;
    for l in w.letters().collect::<Vec<_>>().into_iter().rev() {
        p = apply_generator_to_path(l.generator, p, level);
    }
    p
}

/// The first level ≤ `max_level` at which the word moves some leaf, if any.
pub fn first_nontrivial_level(w: &Word, max_level: u32) -> Option<u32> {
    for level in 1..=max_level {
        for path in 0..(1u32 << level) {
            if apply_word_to_path(w, path, level) != path {
                return Some(level);
            }
        }
    }
    None
}
