//! dehnlab: certificates, van Kampen diagrams and Dehn-function estimation
//! for group presentations, at desk scale.
//!
//! The crate revolves around one object: a *conjugate-product certificate*
//! for membership of a word W in the normal closure ⟨⟨R⟩⟩ of a relator set,
//! that is, an equality W = ∏ Xⱼ Rⱼ^{±1} Xⱼ⁻¹ in the free group. Everything
//! else is built on top:
//!
//! * [`words`] — free-group word algebra and the substitution σ;
//! * [`presentations`] — finite and height-indexed relator families;
//! * [`certificates`] — certificates, verification, cost metrics, and the
//!   certificate transformations (σ-lift, square elimination, relator
//!   replacement transport, transport into the HNN extension);
//! * [`diagrams`] — van Kampen diagrams as combinatorial 2-complexes,
//!   built from certificates and folded;
//! * [`grigorchuk`] — the word problem and constructive decompositions for
//!   the Grigorchuk group Γ, plus bound audits;
//! * [`hnn`] — the ascending HNN extension Γ_t: t-elimination, word
//!   problem, certificate transport, bound audits;
//! * [`estimator`] — exact bounded L₂ search, diagram-based L₁/L₀ upper
//!   bounds, and Dehn-function sweeps;
//! * [`cli`] — the `dehnlab` command-line interface.

pub mod certificates;
pub mod cli;
pub mod diagrams;
pub mod estimator;
pub mod grigorchuk;
pub mod hnn;
pub mod presentations;
pub mod words;

pub use certificates::{Certificate, Factor, HTuple, Sign};
pub use presentations::{Height, Presentation, RelatorFamily};
pub use words::{sigma, sigma_pow, EndoMap, Letter, Word};

// The guide's code blocks run as doc-tests, so the book cannot drift from
// the API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(words, "../../../book/src/words.md");
    chapter!(presentations, "../../../book/src/presentations.md");
    chapter!(certificates, "../../../book/src/certificates.md");
    chapter!(diagrams, "../../../book/src/diagrams.md");
    chapter!(grigorchuk, "../../../book/src/grigorchuk.md");
    chapter!(gamma_t, "../../../book/src/gamma-t.md");
    chapter!(estimation, "../../../book/src/estimation.md");
}
