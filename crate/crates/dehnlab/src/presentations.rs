//! Presentation schemas: finite explicit relator lists and the infinite
//! height-indexed families around the Grigorchuk group, with membership,
//! bounded enumeration, and two Tietze-style moves (relator replacement and
//! stabilization).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{sigma_pow, Word};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("relator {0} is not a nonempty cyclically reduced word")]
    BadRelator(String),
    #[error("relator {0} uses a generator outside the alphabet")]
    ForeignRelator(String),
    #[error("word {0} of the replaced set is not a relator here")]
    NotASubset(String),
    #[error("operation applies to explicit relator families only")]
    FamilyNotExplicit,
    #[error("stabilization blocked: {0}")]
    StabilizationBlocked(String),
    #[error("unknown builtin presentation {0:?}")]
    UnknownBuiltin(String),
    #[error("word uses generator {0:?} outside the presentation alphabet")]
    UnknownGenerator(char),
}

/// Height of a relator inside a height-indexed family: `h(R) = i` iff the
/// relator sits in the i-th layer of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Height(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelatorFamily {
    /// A finite, explicitly listed relator set.
    Explicit(Vec<Word>),
    /// The Lysenok relators of the Grigorchuk group:
    /// a², b², c², d², bcd, σⁱ((ad)⁴), σⁱ((adacac)⁴) for i ≥ 0.
    Lysenok,
    /// Lysenok plus the extra relators σⁱ(a²), i ≥ 1.
    LysenokStar,
    /// The finite truncation Γ(i): a², b², c², d², bcd, (ad)⁴ together with
    /// σʲ((ad)⁴) and σ^{j−1}((adacac)⁴) for 1 ≤ j ≤ i−1. Γ(0) has no
    /// relators.
    GammaLevel(u32),
    /// The finite presentation of the ascending HNN extension Γ_t:
    /// the seven base relators plus t g t⁻¹ σ(g)⁻¹ for g ∈ {a,b,c,d}.
    GammaT,
    /// aⁱ b a⁻ⁱ b⁻¹ for i ≥ 1; presents free abelian of rank 2.
    AbelianRank2,
    /// aⁱ for i ≥ 1 together with aⁱ b^{k_i} for the listed k_i; presents
    /// the trivial group. The interesting index set is not recursive in the
    /// original; here K is an explicit finite sample.
    JockuschKapovich(Vec<u32>),
}

impl RelatorFamily {
    fn is_height_indexed(&self) -> bool {
        matches!(self, RelatorFamily::Lysenok | RelatorFamily::LysenokStar)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<u8>,
    family: RelatorFamily,
    /// Optional builtin name, kept for compact serialization.
    name: Option<String>,
}

pub fn base_relators() -> Vec<Word> {
    ["aa", "bb", "cc", "dd", "bcd", "adadadad", "adacacadacacadacacadacac"]
        .iter()
        .map(|s| Word::parse(s).unwrap())
        .collect()
}

fn ad4() -> Word {
    Word::parse("ad").unwrap().repeat(4)
}

fn adacac4() -> Word {
    Word::parse("adacac").unwrap().repeat(4)
}

fn a2() -> Word {
    Word::parse("aa").unwrap()
}

impl Presentation {
    pub fn new(
        generators: Vec<u8>,
        family: RelatorFamily,
    ) -> Result<Presentation, PresentationError> {
        if let RelatorFamily::Explicit(words) = &family {
            for r in words {
                if r.is_empty() || !r.is_cyclically_reduced() {
                    return Err(PresentationError::BadRelator(r.to_string()));
                }
                if !r.over_alphabet(&generators) {
                    return Err(PresentationError::ForeignRelator(r.to_string()));
                }
            }
        }
        Ok(Presentation { generators, family, name: None })
    }

    fn named(generators: &[u8], family: RelatorFamily, name: &str) -> Presentation {
        Presentation { generators: generators.to_vec(), family, name: Some(name.to_string()) }
    }

    /// Builtin presentations accepted by name on the command line.
    pub fn builtin(name: &str) -> Result<Presentation, PresentationError> {
        let p = match name {
            "lysenok" => Presentation::named(b"abcd", RelatorFamily::Lysenok, name),
            "lysenok_star" => Presentation::named(b"abcd", RelatorFamily::LysenokStar, name),
            "gamma1" => Presentation::named(b"abcd", RelatorFamily::GammaLevel(1), name),
            "gamma2" => Presentation::named(b"abcd", RelatorFamily::GammaLevel(2), name),
            "gamma_t" => Presentation::named(b"abcdt", RelatorFamily::GammaT, name),
            "ex21" => Presentation::named(b"ab", RelatorFamily::AbelianRank2, name),
            "ex23" => Presentation::named(b"ab", RelatorFamily::JockuschKapovich(vec![1, 2, 5]), name),
            other => return Err(PresentationError::UnknownBuiltin(other.to_string())),
        };
        Ok(p)
    }

    pub fn generators(&self) -> &[u8] {
        &self.generators
    }

    pub fn family(&self) -> &RelatorFamily {
        &self.family
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn validate_word(&self, w: &Word) -> Result<(), PresentationError> {
        match w.first_foreign_letter(&self.generators) {
            Some(c) => Err(PresentationError::UnknownGenerator(c)),
            None => Ok(()),
        }
    }

    /// All relators of length ≤ `max_len`, each with its height where the
    /// family defines one. Finite: lengths within each infinite family grow
    /// strictly.
    pub fn enumerate_relators(&self, max_len: usize) -> Vec<(Word, Option<Height>)> {
        let mut out: Vec<(Word, Option<Height>)> = Vec::new();
        match &self.family {
            RelatorFamily::Explicit(words) => {
                out.extend(words.iter().filter(|w| w.len() <= max_len).map(|w| (w.clone(), None)));
            }
            RelatorFamily::Lysenok | RelatorFamily::LysenokStar => {
                for r in base_relators() {
                    if r.len() <= max_len {
                        out.push((r, Some(Height(0))));
                    }
                }
                let star = matches!(self.family, RelatorFamily::LysenokStar);
                for i in 1.. {
                    // Layer i: σⁱ((ad)⁴) of length 8·2ⁱ, σⁱ((adacac)⁴) of
                    // length 24·2ⁱ, and for the star family σⁱ(a²) of length
                    // 2^{i+2}−2. The shortest is σⁱ(a²).
                    let shortest = if star { (1usize << (i + 2)) - 2 } else { 8 << i };
                    if shortest > max_len {
                        break;
                    }
                    if star && (1usize << (i + 2)) - 2 <= max_len {
                        out.push((sigma_pow(&a2(), i), Some(Height(i))));
                    }
                    if 8 << i <= max_len {
                        out.push((sigma_pow(&ad4(), i), Some(Height(i))));
                    }
                    if 24 << i <= max_len {
                        out.push((sigma_pow(&adacac4(), i), Some(Height(i))));
                    }
                }
            }
            RelatorFamily::GammaLevel(level) => {
                for (r, h) in self.gamma_level_relators(*level) {
                    if r.len() <= max_len {
                        out.push((r, Some(h)));
                    }
                }
            }
            RelatorFamily::GammaT => {
                for r in base_relators() {
                    if r.len() <= max_len {
                        out.push((r, None));
                    }
                }
                for r in t_relators() {
                    if r.len() <= max_len {
                        out.push((r, None));
                    }
                }
            }
            RelatorFamily::AbelianRank2 => {
                // aⁱ b a⁻ⁱ b⁻¹ has length 2i+2.
                for i in 1..=(max_len.saturating_sub(2) / 2) {
                    out.push((abelian_relator(i), None));
                }
            }
            RelatorFamily::JockuschKapovich(ks) => {
                let a = Word::parse("a").unwrap();
                for i in 1..=max_len {
                    out.push((a.repeat(i), None));
                }
                for (idx, &k) in ks.iter().enumerate() {
                    let i = idx + 1;
                    if i + k as usize <= max_len {
                        out.push((jk_pair_relator(i, k), None));
                    }
                }
            }
        }
        out
    }

    fn gamma_level_relators(&self, level: u32) -> Vec<(Word, Height)> {
        let mut out = Vec::new();
        if level == 0 {
            return out;
        }
        for r in &base_relators()[..6] {
            out.push((r.clone(), Height(0)));
        }
        if level >= 2 {
            out.push((adacac4(), Height(0)));
            for j in 1..level {
                out.push((sigma_pow(&ad4(), j), Height(j)));
                if j >= 2 {
                    out.push((sigma_pow(&adacac4(), j - 1), Height(j - 1)));
                }
            }
        }
        out
    }

    /// Literal membership: the exact stored word, not its cyclic class.
    /// Infinite families are decided by enumerating up to the word length.
    pub fn is_relator(&self, w: &Word) -> bool {
        self.relator_height(w).is_some()
    }

    /// `Some(height)` when `w` is a relator of a height-indexed family,
    /// `Some(None)`-like behaviour is collapsed: returns the membership
    /// record as `(found, height)` via [`Presentation::is_relator`] and this.
    pub fn height_of(&self, w: &Word) -> Option<Height> {
        self.relator_height(w).flatten()
    }

    fn relator_height(&self, w: &Word) -> Option<Option<Height>> {
        if w.is_empty() {
            return None;
        }
        self.enumerate_relators(w.len())
            .into_iter()
            .find(|(r, _)| r == w)
            .map(|(_, h)| h)
    }

    pub fn is_height_indexed(&self) -> bool {
        self.family.is_height_indexed()
    }

    /// Longest relator of length ≤ `cap`, used for search bounds.
    pub fn max_relator_len(&self, cap: usize) -> usize {
        self.enumerate_relators(cap).iter().map(|(r, _)| r.len()).max().unwrap_or(0)
    }

    /// Replaces the finite subset `s` of the relator set by `u`. Equality of
    /// normal closures is the caller's obligation; this only rewires the
    /// presentation.
    pub fn t_transform(&self, s: &[Word], u: &[Word]) -> Result<Presentation, PresentationError> {
        let RelatorFamily::Explicit(words) = &self.family else {
            return Err(PresentationError::FamilyNotExplicit);
        };
        for x in s {
            if !words.contains(x) {
                return Err(PresentationError::NotASubset(x.to_string()));
            }
        }
        let mut next: Vec<Word> = words.iter().filter(|r| !s.contains(r)).cloned().collect();
        for x in u {
            if !next.contains(x) {
                next.push(x.clone());
            }
        }
        Presentation::new(self.generators.clone(), RelatorFamily::Explicit(next))
    }

    /// Materializes any family as an explicit list, truncating infinite
    /// families at `max_len`.
    pub fn materialize(&self, max_len: usize) -> Result<Presentation, PresentationError> {
        let words = self.enumerate_relators(max_len).into_iter().map(|(w, _)| w).collect();
        Presentation::new(self.generators.clone(), RelatorFamily::Explicit(words))
    }

    /// Adds or removes a generator `b` together with the relator "b".
    pub fn stabilize(&self, b: u8, add: bool) -> Result<Presentation, PresentationError> {
        let RelatorFamily::Explicit(words) = &self.family else {
            return Err(PresentationError::FamilyNotExplicit);
        };
        let b = b.to_ascii_lowercase();
        let bw = Word::from_letters([crate::words::Letter::new(b, false)]);
        if add {
            if self.generators.contains(&b) {
                return Err(PresentationError::StabilizationBlocked(format!(
                    "generator {:?} already present",
                    b as char
                )));
            }
            let mut gens = self.generators.clone();
            gens.push(b);
            let mut next = words.clone();
            next.push(bw);
            Presentation::new(gens, RelatorFamily::Explicit(next))
        } else {
            if !self.generators.contains(&b) {
                return Err(PresentationError::StabilizationBlocked(format!(
                    "generator {:?} not present",
                    b as char
                )));
            }
            if !words.contains(&bw) {
                return Err(PresentationError::StabilizationBlocked(format!(
                    "{:?} is not a relator",
                    b as char
                )));
            }
            if words.iter().any(|r| r != &bw && r.occurrences(b) > 0) {
                return Err(PresentationError::StabilizationBlocked(format!(
                    "{:?} occurs in another relator",
                    b as char
                )));
            }
            let gens = self.generators.iter().copied().filter(|&g| g != b).collect();
            let next = words.iter().filter(|r| *r != &bw).cloned().collect();
            Presentation::new(gens, RelatorFamily::Explicit(next))
        }
    }
}

/// The four HNN relators t g t⁻¹ σ(g)⁻¹.
pub fn t_relators() -> Vec<Word> {
    [("a", "aca"), ("b", "d"), ("c", "b"), ("d", "c")]
        .iter()
        .map(|(g, img)| {
            let g = Word::parse(g).unwrap();
            let img = Word::parse(img).unwrap();
            let t = Word::parse("t").unwrap();
            t.concat(&g).concat(&t.inverse()).concat(&img.inverse()).free_reduce()
        })
        .collect()
}

pub fn abelian_relator(i: usize) -> Word {
    let a = Word::parse("a").unwrap().repeat(i);
    let b = Word::parse("b").unwrap();
    a.concat(&b).concat(&a.inverse()).concat(&b.inverse())
}

pub fn jk_pair_relator(i: usize, k: u32) -> Word {
    Word::parse("a").unwrap().repeat(i).concat(&Word::parse("b").unwrap().repeat(k as usize))
}

// ---------------------------------------------------------------------------
// JSON format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    generators: Vec<String>,
    relators: RelatorsJson,
}

#[derive(Serialize, Deserialize)]
struct RelatorsJson {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    words: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<u32>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    k: Option<Vec<u32>>,
}

impl Serialize for Presentation {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let (kind, words, i, k) = match &self.family {
            RelatorFamily::Explicit(ws) => {
                ("explicit", Some(ws.iter().map(|w| w.to_string()).collect()), None, None)
            }
            RelatorFamily::Lysenok => ("lysenok", None, None, None),
            RelatorFamily::LysenokStar => ("lysenok_star", None, None, None),
            RelatorFamily::GammaLevel(i) => ("gamma_level", None, Some(*i), None),
            RelatorFamily::GammaT => ("gamma_t", None, None, None),
            RelatorFamily::AbelianRank2 => ("abelian_rank2", None, None, None),
            RelatorFamily::JockuschKapovich(ks) => {
                ("jockusch_kapovich", None, None, Some(ks.clone()))
            }
        };
        PresentationJson {
            generators: self.generators.iter().map(|&g| (g as char).to_string()).collect(),
            relators: RelatorsJson { kind: kind.to_string(), words, i, k },
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PresentationJson::deserialize(de)?;
        let mut generators = Vec::new();
        for g in &raw.generators {
            let bytes = g.as_bytes();
            if bytes.len() != 1 || !bytes[0].is_ascii_lowercase() {
                return Err(D::Error::custom(format!(
                    "generator {g:?} must be one lowercase ASCII letter"
                )));
            }
            generators.push(bytes[0]);
        }
        let family = match raw.relators.kind.as_str() {
            "explicit" => {
                let words = raw.relators.words.unwrap_or_default();
                let mut parsed = Vec::new();
                for w in words {
                    parsed.push(Word::parse(&w).map_err(D::Error::custom)?);
                }
                RelatorFamily::Explicit(parsed)
            }
            "lysenok" => RelatorFamily::Lysenok,
            "lysenok_star" => RelatorFamily::LysenokStar,
            "gamma_level" => RelatorFamily::GammaLevel(
                raw.relators.i.ok_or_else(|| D::Error::custom("gamma_level needs \"i\""))?,
            ),
            "gamma_t" => RelatorFamily::GammaT,
            "abelian_rank2" => RelatorFamily::AbelianRank2,
            "jockusch_kapovich" => RelatorFamily::JockuschKapovich(
                raw.relators.k.ok_or_else(|| D::Error::custom("jockusch_kapovich needs \"K\""))?,
            ),
            other => return Err(D::Error::custom(format!("unknown relator kind {other:?}"))),
        };
        Presentation::new(generators, family).map_err(D::Error::custom)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            return f.write_str(name);
        }
        write!(f, "⟨")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", *g as char)?;
        }
        write!(f, " ∥ {:?}⟩", self.family)
    }
}
