//! Conjugate-product certificates.
//!
//! A certificate for `W ∈ ⟨⟨R⟩⟩` is an ordered factor list witnessing the
//! free-group equality `W = ∏ⱼ Xⱼ Rⱼ^{εⱼ} Xⱼ⁻¹`. Verification multiplies the
//! product out and freely reduces; the factor count bounds the minimal
//! number of faces of any van Kampen diagram for `W`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentations::Presentation;
use crate::words::{sigma, sigma_pow, Word};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("factor relator {0} is not a relator of the presentation")]
    ForeignRelator(String),
    #[error("certificate does not verify for {0}")]
    InvalidCertificate(String),
    #[error("presentation has no relator heights")]
    NoHeights,
    #[error("no replacement certificate supplied for relator {0}")]
    MissingReplacement(String),
    #[error("{0}")]
    Word(#[from] crate::words::WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One factor `X · R^ε · X⁻¹`. Conjugators are stored as built; `verify`
/// reduces everything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub conjugator: Word,
    pub relator: Word,
    pub sign: Sign,
}

impl Factor {
    pub fn new(conjugator: Word, relator: Word, sign: Sign) -> Self {
        Factor { conjugator, relator, sign }
    }

    pub fn plus(relator: Word) -> Self {
        Factor::new(Word::empty(), relator, Sign::Plus)
    }

    /// The word `X R^ε X⁻¹`, unreduced.
    pub fn expand(&self) -> Word {
        let body = match self.sign {
            Sign::Plus => self.relator.clone(),
            Sign::Minus => self.relator.inverse(),
        };
        self.conjugator.concat(&body).concat(&self.conjugator.inverse())
    }

    pub fn conjugated(&self, x: &Word) -> Factor {
        Factor::new(x.concat(&self.conjugator), self.relator.clone(), self.sign)
    }

    pub fn inverted(&self) -> Factor {
        Factor::new(self.conjugator.clone(), self.relator.clone(), self.sign.flip())
    }
}

/// Prefixes `x` to every conjugator.
pub fn conjugate_factors(factors: &[Factor], x: &Word) -> Vec<Factor> {
    factors.iter().map(|f| f.conjugated(x)).collect()
}

/// The factor list proving the inverse product: reversed order, flipped
/// signs.
pub fn invert_factors(factors: &[Factor]) -> Vec<Factor> {
    factors.iter().rev().map(Factor::inverted).collect()
}

/// Vector τ = (τ₀, τ₁, …) counting certificate factors by relator height.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HTuple {
    counts: Vec<u64>,
}

impl HTuple {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Largest height with a nonzero count.
    pub fn max_height(&self) -> Option<u32> {
        self.counts.iter().rposition(|&c| c > 0).map(|i| i as u32)
    }

    fn bump(&mut self, h: crate::presentations::Height) {
        let i = h.0 as usize;
        if self.counts.len() <= i {
            self.counts.resize(i + 1, 0);
        }
        self.counts[i] += 1;
    }
}

impl fmt::Display for HTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub word: Word,
    pub presentation: Presentation,
    pub factors: Vec<Factor>,
}

impl Certificate {
    pub fn new(word: Word, presentation: Presentation, factors: Vec<Factor>) -> Self {
        Certificate { word, presentation, factors }
    }

    pub fn empty(presentation: Presentation) -> Self {
        Certificate::new(Word::empty(), presentation, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The freely reduced product ∏ Xⱼ Rⱼ^{εⱼ} Xⱼ⁻¹.
    pub fn product(&self) -> Word {
        let mut acc = Vec::new();
        for f in &self.factors {
            acc.extend(f.expand().bytes().iter().copied());
        }
        Word::from_bytes(acc).free_reduce()
    }

    /// True iff the product freely reduces to the free reduction of the
    /// target word. Errors if some factor's relator is not a literal relator
    /// of the presentation.
    pub fn verify(&self) -> Result<bool, CertError> {
        for f in &self.factors {
            if !self.presentation.is_relator(&f.relator) {
                return Err(CertError::ForeignRelator(f.relator.to_string()));
            }
        }
        Ok(self.product() == self.word.free_reduce())
    }

    pub fn verified(self) -> Result<Certificate, CertError> {
        if self.verify()? {
            Ok(self)
        } else {
            Err(CertError::InvalidCertificate(self.word.to_string()))
        }
    }

    /// Freely reduces all conjugators (and the target word) in place.
    pub fn normalize(&mut self) {
        self.word = self.word.free_reduce();
        for f in &mut self.factors {
            f.conjugator = f.conjugator.free_reduce();
        }
    }

    /// τᵢ = number of factors whose relator has height i.
    pub fn h_star_tuple(&self) -> Result<HTuple, CertError> {
        if !self.presentation.is_height_indexed() {
            return Err(CertError::NoHeights);
        }
        let mut tuple = HTuple::default();
        for f in &self.factors {
            let h = self
                .presentation
                .height_of(&f.relator)
                .ok_or_else(|| CertError::ForeignRelator(f.relator.to_string()))?;
            tuple.bump(h);
        }
        Ok(tuple)
    }

    /// The factor count L; an upper bound on L₂(W).
    pub fn cost_f2(&self) -> u64 {
        self.factors.len() as u64
    }

    /// Σⱼ |Rⱼ| + ⌈|W|/2⌉; an upper bound on L₁(W) for the folded diagram
    /// built from this certificate.
    pub fn cost_f1_bound(&self) -> u64 {
        let rel: u64 = self.factors.iter().map(|f| f.relator.len() as u64).sum();
        rel + (self.word.len() as u64).div_ceil(2)
    }

    /// Height-based variant for Lysenok-family certificates:
    /// Σᵢ 3·2^{i+3}·τᵢ, using the layer-wise relator length bound.
    pub fn cost_f1_bound_heights(&self) -> Result<u64, CertError> {
        let tuple = self.h_star_tuple()?;
        Ok(tuple
            .counts()
            .iter()
            .enumerate()
            .map(|(i, &c)| 3u64 * (1u64 << (i + 3)) * c)
            .sum())
    }

    /// Transports the certificate along σ: if it proves W, the result proves
    /// σ(W). Heights shift by +1 for a² and the power relators; b², c², d²
    /// permute at height 0; the bcd image is a cyclic permutation absorbed
    /// into the conjugator.
    pub fn sigma_lift(&self) -> Result<Certificate, CertError> {
        let star = Presentation::builtin("lysenok_star").unwrap();
        let factors = sigma_lift_factors(&self.factors)?;
        let word = sigma().apply(&self.word)?;
        Ok(Certificate::new(word, star, factors))
    }

    /// Replaces every σⁱ(a²) factor (i ≥ 1) by the 2^{i+1}−1 square factors
    /// obtained by peeling g² subwords left to right. The result is a
    /// certificate over the plain Lysenok family.
    pub fn eliminate_sigma_a2(&self) -> Certificate {
        let lysenok = Presentation::builtin("lysenok").unwrap();
        let mut factors = Vec::new();
        for f in &self.factors {
            match sigma_a2_index(&f.relator) {
                Some(i) if i >= 1 => {
                    let peeled = peel_squares(&f.relator);
                    debug_assert_eq!(peeled.len(), (1 << (i + 1)) - 1);
                    let expanded: Vec<Factor> =
                        peeled.into_iter().map(|g| g.conjugated(&f.conjugator)).collect();
                    match f.sign {
                        Sign::Plus => factors.extend(expanded),
                        Sign::Minus => factors.extend(invert_factors(&expanded)),
                    }
                }
                _ => factors.push(f.clone()),
            }
        }
        Certificate::new(self.word.clone(), lysenok, factors)
    }

    /// Splices replacement certificates over a new presentation into this
    /// one: factors whose relator survives pass through, the others are
    /// expanded. The replacement map must cover every relator that occurs
    /// and is gone.
    pub fn apply_t_transformation(
        &self,
        target: &Presentation,
        replacements: &BTreeMap<Word, Certificate>,
    ) -> Result<Certificate, CertError> {
        let mut factors = Vec::new();
        for f in &self.factors {
            if target.is_relator(&f.relator) {
                factors.push(f.clone());
                continue;
            }
            let rep = replacements
                .get(&f.relator)
                .ok_or_else(|| CertError::MissingReplacement(f.relator.to_string()))?;
            if rep.word.free_reduce() != f.relator.free_reduce() {
                return Err(CertError::InvalidCertificate(format!(
                    "replacement for {} proves {} instead",
                    f.relator, rep.word
                )));
            }
            let spliced = conjugate_factors(&rep.factors, &f.conjugator);
            match f.sign {
                Sign::Plus => factors.extend(spliced),
                Sign::Minus => factors.extend(invert_factors(&spliced)),
            }
        }
        Ok(Certificate::new(self.word.clone(), target.clone(), factors))
    }

    /// Expands every height-j power-relator factor σʲ(V) into a certificate
    /// over the finite presentation of Γ_t, using the identity
    /// t X t⁻¹ = (∏ conjugated t-relators) · σ(X) once per application of σ.
    /// Height-0 factors pass through.
    pub fn t_transport(&self) -> Result<Certificate, CertError> {
        let gamma_t = Presentation::builtin("gamma_t").unwrap();
        let mut factors = Vec::new();
        for f in &self.factors {
            if gamma_t.is_relator(&f.relator) {
                factors.push(f.clone());
                continue;
            }
            let (j, v) = power_relator_index(&f.relator)
                .ok_or_else(|| CertError::ForeignRelator(f.relator.to_string()))?;
            let expanded = conjugate_factors(&expand_sigma_power(j, &v), &f.conjugator);
            match f.sign {
                Sign::Plus => factors.extend(expanded),
                Sign::Minus => factors.extend(invert_factors(&expanded)),
            }
        }
        Ok(Certificate::new(self.word.clone(), gamma_t, factors))
    }
}

/// σ-lifts a bare factor list: if it proves W, the result proves σ(W).
pub fn sigma_lift_factors(factors: &[Factor]) -> Result<Vec<Factor>, CertError> {
    let star = Presentation::builtin("lysenok_star").unwrap();
    let mut out = Vec::with_capacity(factors.len());
    for f in factors {
        let (delta, relator) = lift_relator(&f.relator, &star)?;
        let conj = sigma().apply(&f.conjugator)?.concat(&delta);
        out.push(Factor::new(conj, relator, f.sign));
    }
    Ok(out)
}

/// δ and the stored relator such that σ(R) = δ · R' · δ⁻¹.
fn lift_relator(r: &Word, star: &Presentation) -> Result<(Word, Word), CertError> {
    if *r == Word::parse("bcd").unwrap() {
        // σ(bcd) = dbc, a cyclic permutation: dbc = d · bcd · d⁻¹.
        return Ok((Word::parse("d").unwrap(), r.clone()));
    }
    let image = sigma().apply(r)?;
    if star.is_relator(&image) {
        Ok((Word::empty(), image))
    } else {
        Err(CertError::ForeignRelator(r.to_string()))
    }
}

/// `Some(i)` iff `r` is literally σⁱ(a²).
pub fn sigma_a2_index(r: &Word) -> Option<u32> {
    let mut cur = Word::parse("aa").unwrap();
    for i in 0.. {
        match cur.len().cmp(&r.len()) {
            std::cmp::Ordering::Equal if &cur == r => return Some(i),
            std::cmp::Ordering::Greater => return None,
            _ => {}
        }
        cur = sigma().apply(&cur).unwrap();
    }
    unreachable!()
}

/// `Some((j, V))` iff `r` is literally σʲ(V) for V ∈ {(ad)⁴, (adacac)⁴}.
pub fn power_relator_index(r: &Word) -> Option<(u32, Word)> {
    for v in [Word::parse("ad").unwrap().repeat(4), Word::parse("adacac").unwrap().repeat(4)] {
        let mut cur = v.clone();
        for j in 0.. {
            match cur.len().cmp(&r.len()) {
                std::cmp::Ordering::Equal => {
                    if &cur == r {
                        return Some((j, v));
                    }
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Less => cur = sigma().apply(&cur).unwrap(),
            }
        }
    }
    None
}

/// Writes a positive word that deletes to nothing as a product of conjugated
/// squares, peeling the leftmost g² subword each time.
fn peel_squares(w: &Word) -> Vec<Factor> {
    let mut factors = Vec::new();
    let mut cur: Vec<u8> = w.bytes().to_vec();
    'outer: while !cur.is_empty() {
        for j in 0..cur.len() - 1 {
            if cur[j] == cur[j + 1] {
                let prefix = Word::from_bytes(cur[..j].to_vec());
                let square = Word::from_bytes(vec![cur[j], cur[j]]);
                factors.push(Factor::new(prefix, square, Sign::Plus));
                cur.drain(j..j + 2);
                continue 'outer;
            }
        }
        panic!("peel_squares: {} has no square subword", Word::from_bytes(cur));
    }
    factors
}

/// Factors over the Γ_t presentation proving σʲ(V), for V one of the two
/// power relators. One conjugated t-relator per letter and per σ-level,
/// plus a single conjugated copy of V in the middle.
fn expand_sigma_power(j: u32, v: &Word) -> Vec<Factor> {
    if j == 0 {
        return vec![Factor::plus(v.clone())];
    }
    let x = sigma_pow(v, j - 1);
    let mut factors = Vec::new();
    // σ(X) = [∏_{i=k..1} Pᵢ r_{xᵢ}⁻¹ Pᵢ⁻¹] · t X t⁻¹ with Pᵢ = σ(x₁…x_{i−1}).
    for i in (0..x.len()).rev() {
        let prefix = sigma().apply(&x.subword(0..i)).unwrap();
        let letter = x.letter(i);
        debug_assert!(!letter.inverted);
        factors.push(Factor::new(prefix, t_relator_for(letter.generator), Sign::Minus));
    }
    let t = Word::parse("t").unwrap();
    factors.extend(conjugate_factors(&expand_sigma_power(j - 1, v), &t));
    factors
}

fn t_relator_for(g: u8) -> Word {
    let idx = match g {
        b'a' => 0,
        b'b' => 1,
        b'c' => 2,
        b'd' => 3,
        _ => panic!("no t-relator for generator {:?}", g as char),
    };
    crate::presentations::t_relators()[idx].clone()
}

// ---------------------------------------------------------------------------
// JSON format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FactorJson {
    conj: String,
    relator: String,
    sign: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PresentationRefJson {
    Name(String),
    Inline(Presentation),
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    word: String,
    presentation: PresentationRefJson,
    factors: Vec<FactorJson>,
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let presentation = match self.presentation.name() {
            Some(name) => PresentationRefJson::Name(name.to_string()),
            None => PresentationRefJson::Inline(self.presentation.clone()),
        };
        CertificateJson {
            word: self.word.to_string(),
            presentation,
            factors: self
                .factors
                .iter()
                .map(|f| FactorJson {
                    conj: f.conjugator.to_string(),
                    relator: f.relator.to_string(),
                    sign: f.sign.as_i8(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = CertificateJson::deserialize(de)?;
        let presentation = match raw.presentation {
            PresentationRefJson::Name(name) => {
                Presentation::builtin(&name).map_err(D::Error::custom)?
            }
            PresentationRefJson::Inline(p) => p,
        };
        let word = Word::parse(&raw.word).map_err(D::Error::custom)?;
        let mut factors = Vec::new();
        for f in raw.factors {
            let sign = match f.sign {
                1 => Sign::Plus,
                -1 => Sign::Minus,
                other => return Err(D::Error::custom(format!("sign must be ±1, got {other}"))),
            };
            factors.push(Factor::new(
                Word::parse(&f.conj).map_err(D::Error::custom)?,
                Word::parse(&f.relator).map_err(D::Error::custom)?,
                sign,
            ));
        }
        Ok(Certificate::new(word, presentation, factors))
    }
}
