//! Brute-force Dehn-function estimation.
//!
//! `l2_exact` finds the minimal number of conjugated-relator factors for a
//! word by iterative deepening over insertion moves: a move splits the
//! current word at a position, inserts a relator or its inverse, and
//! reduces; the position prefix becomes the factor's conjugator. The search
//! is complete relative to its declared bounds — factor count, conjugator
//! (= prefix) length and enumerated relator length — and reports which.
//! Plainly: a `NoCertWithin` answer rules out certificates inside those
//! bounds only; enlarging bounds can only turn absence into presence.
//!
//! On top of the exact search sit diagram-based upper bounds for the edge
//! and vertex counts, a sweep over all words up to a length, and a crude
//! growth-model fit for the resulting rows.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certificates::{Certificate, Factor, Sign};
use crate::diagrams::Diagram;
use crate::presentations::{Presentation, RelatorFamily};
use crate::words::Word;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EstimatorError {
    #[error("state budget exhausted after {0} states")]
    BudgetExceeded(u64),
    #[error("need at least {0} usable rows for a fit")]
    InsufficientData(usize),
    #[error("{0}")]
    Cert(#[from] crate::certificates::CertError),
    #[error("{0}")]
    Diagram(#[from] crate::diagrams::DiagramError),
}

/// Declared completeness bounds of the certificate search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub max_factors: u32,
    /// maximal conjugator (insertion prefix) length
    pub conj_bound: usize,
    /// relators longer than this are not enumerated
    pub relator_len_cap: usize,
    /// maximal number of search states expanded
    pub state_budget: u64,
}

impl SearchBounds {
    /// Defaults scaled to the word: the conjugator bound is the word length
    /// plus the longest enumerated relator, a caveat documented with every
    /// result and cross-checkable by doubling.
    pub fn for_word(p: &Presentation, w: &Word, max_factors: u32) -> SearchBounds {
        let relator_len_cap = (2 * w.len()).max(26);
        let max_rel = p.max_relator_len(relator_len_cap);
        SearchBounds {
            max_factors,
            conj_bound: w.len() + max_rel,
            relator_len_cap,
            state_budget: 2_000_000,
        }
    }

    pub fn doubled_conjugators(mut self) -> SearchBounds {
        self.conj_bound *= 2;
        self
    }
}

/// Sweep-wide search configuration; per-word bounds derive from it.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub max_factors: u32,
    /// overrides the per-word conjugator bound when set
    pub conj_bound: Option<usize>,
    pub state_budget: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { max_factors: 8, conj_bound: None, state_budget: 2_000_000 }
    }
}

impl SweepConfig {
    fn bounds_for(&self, p: &Presentation, w: &Word) -> SearchBounds {
        let mut b = SearchBounds::for_word(p, w, self.max_factors);
        if let Some(c) = self.conj_bound {
            b.conj_bound = c;
        }
        b.state_budget = self.state_budget;
        b
    }
}

#[derive(Debug, Clone)]
pub enum L2Outcome {
    /// Minimal factor count within the bounds, with a witness.
    Exact { l: u32, certificate: Certificate },
    /// Complete search within the declared bounds found nothing.
    NoCertWithin,
}

#[derive(Debug, Clone)]
pub struct L2Result {
    pub outcome: L2Outcome,
    pub bounds: SearchBounds,
    pub states: u64,
}

struct Search<'a> {
    relators: Vec<Word>,
    max_exp: [i64; 26],
    max_rel_len: usize,
    bounds: SearchBounds,
    states: u64,
    failed: std::collections::HashMap<Word, u32>,
    p: &'a Presentation,
}

impl<'a> Search<'a> {
    fn new(p: &'a Presentation, bounds: SearchBounds) -> Search<'a> {
        let relators: Vec<Word> =
            p.enumerate_relators(bounds.relator_len_cap).into_iter().map(|(r, _)| r).collect();
        let mut max_exp = [0i64; 26];
        for r in &relators {
            for (i, slot) in max_exp.iter_mut().enumerate() {
                *slot = (*slot).max(r.exponent_sum(b'a' + i as u8).abs());
            }
        }
        let max_rel_len = relators.iter().map(|r| r.len()).max().unwrap_or(0);
        Search { relators, max_exp, max_rel_len, bounds, states: 0, failed: Default::default(), p }
    }

    /// Admissible lower bound on the factors still needed.
    fn heuristic(&self, w: &Word) -> Option<u32> {
        if w.is_empty() {
            return Some(0);
        }
        let mut h = 1u64;
        if self.max_rel_len > 0 {
            h = h.max(w.len().div_ceil(self.max_rel_len) as u64);
        }
        for (i, &m) in self.max_exp.iter().enumerate() {
            let e = w.exponent_sum(b'a' + i as u8).unsigned_abs();
            if e > 0 {
                if m == 0 {
                    return None; // no relator can ever move this exponent
                }
                h = h.max(e.div_ceil(m as u64));
            }
        }
        Some(h as u32)
    }

    fn moves(&self, w: &Word) -> Vec<(Word, Factor)> {
        let mut out = Vec::new();
        let max_pos = w.len().min(self.bounds.conj_bound);
        for r in &self.relators {
            for sign in [Sign::Plus, Sign::Minus] {
                let body = match sign {
                    Sign::Plus => r.inverse(),
                    Sign::Minus => r.clone(),
                };
                for pos in 0..=max_pos {
                    let next = w
                        .subword(0..pos)
                        .concat(&body)
                        .concat(&w.subword(pos..w.len()))
                        .free_reduce();
                    out.push((next, Factor::new(w.subword(0..pos), r.clone(), sign)));
                }
            }
        }
        out.sort_by_key(|(next, _)| next.len());
        out
    }

    fn dfs(&mut self, w: &Word, remaining: u32) -> Result<Option<Vec<Factor>>, EstimatorError> {
        match self.heuristic(w) {
            None => return Ok(None),
            Some(0) => return Ok(Some(Vec::new())),
            Some(h) if h > remaining => return Ok(None),
            Some(_) => {}
        }
        if self.failed.get(w).is_some_and(|&d| d >= remaining) {
            return Ok(None);
        }
        self.states += 1;
        if self.states > self.bounds.state_budget {
            return Err(EstimatorError::BudgetExceeded(self.states));
        }
        for (next, factor) in self.moves(w) {
            if let Some(mut rest) = self.dfs(&next, remaining - 1)? {
                rest.insert(0, factor);
                return Ok(Some(rest));
            }
        }
        self.failed.insert(w.clone(), remaining);
        Ok(None)
    }
}

/// Minimal factor count for `w` over `p` within the bounds, by iterative
/// deepening; complete within the declared bounds.
pub fn l2_exact(p: &Presentation, w: &Word, bounds: SearchBounds) -> Result<L2Result, EstimatorError> {
    let reduced = w.free_reduce();
    let mut search = Search::new(p, bounds);
    for depth in 0..=bounds.max_factors {
        if let Some(factors) = search.dfs(&reduced, depth)? {
            let certificate = Certificate::new(w.clone(), search.p.clone(), factors);
            debug_assert_eq!(certificate.verify().ok(), Some(true));
            return Ok(L2Result {
                outcome: L2Outcome::Exact { l: depth, certificate },
                bounds,
                states: search.states,
            });
        }
    }
    Ok(L2Result { outcome: L2Outcome::NoCertWithin, bounds, states: search.states })
}

/// Edge and vertex counts of the folded diagram of a certificate: valid
/// upper bounds for L₁ and L₀ of its word.
pub fn diagram_upper_bounds(cert: &Certificate) -> Result<(u64, u64), EstimatorError> {
    let mut d = Diagram::from_certificate(cert)?;
    d.fold();
    let counts = d.counts();
    Ok((counts.e as u64, counts.v as u64))
}

/// `l1_upper`: |Δ(1)| of the folded diagram of the best certificate found.
pub fn l1_upper(p: &Presentation, w: &Word, bounds: SearchBounds) -> Result<Option<u64>, EstimatorError> {
    match l2_exact(p, w, bounds)?.outcome {
        L2Outcome::Exact { certificate, .. } => Ok(Some(diagram_upper_bounds(&certificate)?.0)),
        L2Outcome::NoCertWithin => Ok(None),
    }
}

/// `l0_upper`: |Δ(0)| of the same folded diagram.
pub fn l0_upper(p: &Presentation, w: &Word, bounds: SearchBounds) -> Result<Option<u64>, EstimatorError> {
    match l2_exact(p, w, bounds)?.outcome {
        L2Outcome::Exact { certificate, .. } => Ok(Some(diagram_upper_bounds(&certificate)?.1)),
        L2Outcome::NoCertWithin => Ok(None),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub x: usize,
    pub f2_exact: Option<u64>,
    pub f1_upper: Option<u64>,
    pub f0_upper: Option<u64>,
    /// ⌈f₂/2⌉, from f₂ ≤ 2f₁
    pub f1_lower_bracket: Option<u64>,
    pub words_examined: u64,
    /// budget or membership-oracle mismatches make a row unreliable
    pub flags: Vec<String>,
}

/// Membership oracles where a family admits one; `None` means undecided and
/// the search outcome is used with a flag.
fn member_oracle(p: &Presentation, w: &Word) -> Option<bool> {
    match p.family() {
        RelatorFamily::AbelianRank2 => {
            Some(w.exponent_sum(b'a') == 0 && w.exponent_sum(b'b') == 0)
        }
        // The sampled index set contains k₁ = 1, so b = 1 and a = 1: the
        // whole group is trivial and every word lies in the closure.
        RelatorFamily::JockuschKapovich(ks) if ks.first() == Some(&1) => Some(true),
        RelatorFamily::Lysenok | RelatorFamily::LysenokStar => {
            crate::grigorchuk::is_trivial_gamma(w).ok()
        }
        RelatorFamily::GammaT => crate::hnn::is_trivial_gamma_t(w).ok(),
        _ => None,
    }
}

fn all_words_of_len(alphabet: &[u8], len: usize) -> Vec<Word> {
    let mut letters: Vec<u8> = alphabet.to_vec();
    letters.extend(alphabet.iter().map(|b| b.to_ascii_uppercase()));
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    loop {
        out.push(Word::from_bytes(cur.iter().map(|&i| letters[i]).collect()));
        let mut i = 0;
        while i < len {
            cur[i] += 1;
            if cur[i] < letters.len() {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == len {
            break;
        }
    }
    out
}

/// Per-length maxima of L₂ (exact within bounds) and the diagram upper
/// bounds, over *all* words of length ≤ x_max, reduced or not. Spurs
/// account for the cancelled letters of unreduced words: a word with k
/// cancelling pairs needs k extra edges and vertices over its reduction,
/// and the same number of faces.
pub fn dehn_sweep(
    p: &Presentation,
    x_max: usize,
    config: &SweepConfig,
) -> Result<Vec<SweepRow>, EstimatorError> {
    let lens: Vec<usize> = (0..=x_max).collect();
    let mut rows: Vec<SweepRow> = lens
        .par_iter()
        .map(|&len| {
            let mut row = SweepRow {
                x: len,
                f2_exact: None,
                f1_upper: None,
                f0_upper: None,
                f1_lower_bracket: None,
                words_examined: 0,
                flags: Vec::new(),
            };
            for w in all_words_of_len(p.generators(), len) {
                row.words_examined += 1;
                let reduced = w.free_reduce();
                let spurs = ((w.len() - reduced.len()) / 2) as u64;
                let oracle = member_oracle(p, &reduced);
                if oracle == Some(false) {
                    continue;
                }
                let bounds = config.bounds_for(p, &reduced);
                match l2_exact(p, &reduced, bounds) {
                    Ok(res) => match res.outcome {
                        L2Outcome::Exact { l, certificate } => {
                            let (e, v) = match diagram_upper_bounds(&certificate) {
                                Ok(b) => b,
                                Err(err) => {
                                    row.flags.push(format!("diagram: {err}"));
                                    continue;
                                }
                            };
                            row.f2_exact = Some(row.f2_exact.unwrap_or(0).max(l as u64));
                            row.f1_upper = Some(row.f1_upper.unwrap_or(0).max(e + spurs));
                            row.f0_upper = Some(row.f0_upper.unwrap_or(0).max(v + spurs));
                        }
                        L2Outcome::NoCertWithin => {
                            if oracle == Some(true) {
                                row.flags.push(format!("incomplete: {w} is in the closure but no certificate within bounds"));
                            }
                        }
                    },
                    Err(EstimatorError::BudgetExceeded(_)) => {
                        row.flags.push(format!("budget: {w}"));
                    }
                    Err(err) => row.flags.push(err.to_string()),
                }
            }
            row.f1_lower_bracket = row.f2_exact.map(|f2| f2.div_ceil(2));
            row
        })
        .collect();

    // f_j(x) is a running maximum over |W| ≤ x.
    for i in 1..rows.len() {
        let (a, b) = rows.split_at_mut(i);
        let prev = &a[i - 1];
        let cur = &mut b[0];
        cur.f2_exact = max_opt(cur.f2_exact, prev.f2_exact);
        cur.f1_upper = max_opt(cur.f1_upper, prev.f1_upper);
        cur.f0_upper = max_opt(cur.f0_upper, prev.f0_upper);
        cur.f1_lower_bracket = cur.f2_exact.map(|f2| f2.div_ceil(2));
    }
    Ok(rows)
}

fn max_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthFit {
    /// best of "x", "x^2", "x^2 log2 x" by least squares in log space
    pub best_model: String,
    pub constant: f64,
    pub loglog_slope: f64,
    pub degenerate: bool,
    pub sse: f64,
}

/// Descriptive fit of (x, f(x)) pairs against the three growth models.
/// Never asserts anything; sweeps report it for documentation.
pub fn growth_fit(points: &[(usize, u64)]) -> Result<GrowthFit, EstimatorError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, f)| x >= 2 && f > 0)
        .map(|&(x, f)| (x as f64, f as f64))
        .collect();
    if usable.len() < 4 {
        return Err(EstimatorError::InsufficientData(4));
    }
    type Model = fn(f64) -> f64;
    let models: [(&str, Model); 3] =
        [("x", |x| x), ("x^2", |x| x * x), ("x^2 log2 x", |x| x * x * x.log2())];
    let mut best: Option<(String, f64, f64)> = None;
    for (name, m) in models {
        // log f = log C + log m(x); C from the mean residual.
        let logs: Vec<f64> = usable.iter().map(|&(x, f)| f.ln() - m(x).ln()).collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        let sse: f64 = logs.iter().map(|l| (l - mean) * (l - mean)).sum();
        if best.as_ref().is_none_or(|(_, _, s)| sse < *s) {
            best = Some((name.to_string(), mean.exp(), sse));
        }
    }
    let (best_model, constant, sse) = best.unwrap();

    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|&(x, _)| x.ln()).sum();
    let sy: f64 = usable.iter().map(|&(_, f)| f.ln()).sum();
    let sxx: f64 = usable.iter().map(|&(x, _)| x.ln() * x.ln()).sum();
    let sxy: f64 = usable.iter().map(|&(x, f)| x.ln() * f.ln()).sum();
    let denom = n * sxx - sx * sx;
    let degenerate = denom.abs() < 1e-12 || usable.iter().all(|&(_, f)| f == usable[0].1);
    let loglog_slope = if denom.abs() < 1e-12 { 0.0 } else { (n * sxy - sx * sy) / denom };

    Ok(GrowthFit { best_model, constant, loglog_slope, degenerate, sse })
}
