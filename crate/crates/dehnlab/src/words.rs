//! Free-group words over a signed generator alphabet.
//!
//! The text format used everywhere in the crate: a lowercase ASCII letter is
//! a generator, the corresponding uppercase letter is its inverse, and `""`
//! is the empty word. So `"abA"` is the conjugate a·b·a⁻¹.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid letter {0:?}: words use ASCII letters only")]
    InvalidLetter(char),
    #[error("generator {0:?} is outside the active alphabet")]
    UnknownGenerator(char),
}

/// One signed letter. Internally a word stores raw ASCII bytes; `Letter` is
/// the unpacked view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u8,
    pub inverted: bool,
}

impl Letter {
    pub fn new(generator: u8, inverted: bool) -> Self {
        debug_assert!(generator.is_ascii_lowercase());
        Letter { generator, inverted }
    }

    fn from_byte(b: u8) -> Self {
        Letter { generator: b.to_ascii_lowercase(), inverted: b.is_ascii_uppercase() }
    }

    fn to_byte(self) -> u8 {
        if self.inverted { self.generator.to_ascii_uppercase() } else { self.generator }
    }

    pub fn inverse(self) -> Self {
        Letter { inverted: !self.inverted, ..self }
    }
}

/// A word in the free group. Not forced reduced: constructions that need a
/// reduced word call [`Word::free_reduce`]. Immutable by convention; all
/// operations return new words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<u8>,
}

/// Two bytes are inverse letters iff they differ exactly in ASCII case.
#[inline]
fn cancels(x: u8, y: u8) -> bool {
    x ^ y == 0x20
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Parses the text format. Rejects anything that is not an ASCII letter.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            if !c.is_ascii_alphabetic() {
                return Err(WordError::InvalidLetter(c));
            }
            letters.push(c as u8);
        }
        Ok(Word { letters })
    }

    pub fn from_letters(iter: impl IntoIterator<Item = Letter>) -> Self {
        Word { letters: iter.into_iter().map(Letter::to_byte).collect() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters.iter().map(|&b| Letter::from_byte(b))
    }

    pub fn letter(&self, i: usize) -> Letter {
        Letter::from_byte(self.letters[i])
    }

    pub(crate) fn bytes(&self) -> &[u8] {
        &self.letters
    }

    pub(crate) fn from_bytes(bytes: Vec<u8>) -> Self {
        debug_assert!(bytes.iter().all(|b| b.is_ascii_alphabetic()));
        Word { letters: bytes }
    }

    /// True if every generator used in the word appears in `alphabet`
    /// (lowercase bytes).
    pub fn over_alphabet(&self, alphabet: &[u8]) -> bool {
        self.letters.iter().all(|b| alphabet.contains(&b.to_ascii_lowercase()))
    }

    pub fn first_foreign_letter(&self, alphabet: &[u8]) -> Option<char> {
        self.letters
            .iter()
            .find(|b| !alphabet.contains(&b.to_ascii_lowercase()))
            .map(|&b| b as char)
    }

    /// Concatenation, no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|&b| b ^ 0x20).collect() }
    }

    /// Stack-based free reduction; idempotent and length-non-increasing.
    pub fn free_reduce(&self) -> Word {
        let mut stack: Vec<u8> = Vec::with_capacity(self.letters.len());
        for &b in &self.letters {
            if stack.last().is_some_and(|&t| cancels(t, b)) {
                stack.pop();
            } else {
                stack.push(b);
            }
        }
        Word { letters: stack }
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !cancels(w[0], w[1]))
    }

    /// Splits a freely reduced word as `conjugator · core · conjugator⁻¹`
    /// with the core cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let w = self.free_reduce();
        let b = &w.letters;
        let mut i = 0;
        let mut j = b.len();
        while i < j && j - i >= 2 && cancels(b[i], b[j - 1]) {
            i += 1;
            j -= 1;
        }
        let core = Word { letters: b[i..j].to_vec() };
        let conjugator = Word { letters: b[..i].to_vec() };
        (core, conjugator)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        if !self.is_freely_reduced() {
            return false;
        }
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.len() == 1 || !cancels(l, f),
            _ => true,
        }
    }

    /// `x · w · x⁻¹`, freely reduced.
    pub fn conjugate(&self, x: &Word) -> Word {
        x.concat(self).concat(&x.inverse()).free_reduce()
    }

    /// Cyclic left rotation by `k`; `rot_k(w) = w[k..] · w[..k]`.
    pub fn rotate(&self, k: usize) -> Word {
        let n = self.letters.len();
        if n == 0 {
            return Word::empty();
        }
        let k = k % n;
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    /// Signed exponent sum of `g` (+1 per `g`, −1 per `g⁻¹`).
    pub fn exponent_sum(&self, g: u8) -> i64 {
        let g = g.to_ascii_lowercase();
        self.letters
            .iter()
            .map(|&b| {
                if b == g {
                    1
                } else if b == g.to_ascii_uppercase() {
                    -1
                } else {
                    0
                }
            })
            .sum()
    }

    /// Unsigned occurrence count of `g` and `g⁻¹` together.
    pub fn occurrences(&self, g: u8) -> usize {
        let g = g.to_ascii_lowercase();
        self.letters.iter().filter(|&&b| b.to_ascii_lowercase() == g).count()
    }

    pub fn repeat(&self, n: usize) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() * n);
        for _ in 0..n {
            letters.extend_from_slice(&self.letters);
        }
        Word { letters }
    }

    pub fn subword(&self, range: std::ops::Range<usize>) -> Word {
        Word { letters: self.letters[range].to_vec() }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Safe: the invariant keeps letters ASCII.
        f.write_str(std::str::from_utf8(&self.letters).unwrap())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl std::str::FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

/// A substitution endomorphism of the free group, given by the images of the
/// positive generators. Inverse letters map to inverted images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoMap {
    images: BTreeMap<u8, Word>,
}

impl EndoMap {
    pub fn new(images: impl IntoIterator<Item = (u8, Word)>) -> Self {
        EndoMap { images: images.into_iter().collect() }
    }

    pub fn image(&self, g: u8) -> Option<&Word> {
        self.images.get(&g.to_ascii_lowercase())
    }

    /// Applies the substitution and freely reduces the result.
    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        let mut out = Vec::with_capacity(w.len() * 2);
        for l in w.letters() {
            let img = self
                .images
                .get(&l.generator)
                .ok_or(WordError::UnknownGenerator(l.generator as char))?;
            if l.inverted {
                out.extend(img.inverse().letters.iter().copied());
            } else {
                out.extend(img.letters.iter().copied());
            }
        }
        Ok(Word { letters: out }.free_reduce())
    }

    pub fn apply_n(&self, w: &Word, n: u32) -> Result<Word, WordError> {
        let mut cur = w.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

/// The substitution a ↦ aca, b ↦ d, c ↦ b, d ↦ c that generates the
/// Lysenok relator families and the HNN structure on the Grigorchuk group.
pub fn sigma() -> &'static EndoMap {
    use std::sync::OnceLock;
    static SIGMA: OnceLock<EndoMap> = OnceLock::new();
    SIGMA.get_or_init(|| {
        EndoMap::new([
            (b'a', Word::parse("aca").unwrap()),
            (b'b', Word::parse("d").unwrap()),
            (b'c', Word::parse("b").unwrap()),
            (b'd', Word::parse("c").unwrap()),
        ])
    })
}

/// σⁱ(w) for words over {a,b,c,d}.
pub fn sigma_pow(w: &Word, i: u32) -> Word {
    sigma().apply_n(w, i).expect("sigma is total on a,b,c,d")
}
