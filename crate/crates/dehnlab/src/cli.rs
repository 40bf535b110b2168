//! The `dehnlab` command line: solve, decompose, verify, diagram, sweep,
//! relators, audit. Machine output (JSON or CSV) goes to stdout or `--out`;
//! human summaries go to stderr. Exit codes: 0 success, 1 negative decision
//! (nontrivial word, failed verification, no certificate), 2 errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::certificates::Certificate;
use crate::diagrams::{Diagram, DiagramStats};
use crate::estimator::{dehn_sweep, growth_fit, SweepConfig};
use crate::grigorchuk::{
    audit_gamma_bounds, decompose, decompose_r, is_trivial_gamma, relator_series_audit,
};
use crate::hnn::{audit_gamma_t_bounds, decompose_gamma_t, is_trivial_gamma_t};
use crate::presentations::Presentation;
use crate::words::Word;

/// Default state budget for certificate searches.
pub const DEFAULT_BUDGET: u64 = 2_000_000;
/// Default factor-count ceiling for exact searches.
pub const DEFAULT_MAX_FACTORS: u32 = 8;
/// Default RNG seed; printed in every sampled report.
pub const DEFAULT_SEED: u64 = 17;

#[derive(Parser)]
#[command(name = "dehnlab", version, about = "Certificates, van Kampen diagrams and Dehn-function estimation for group presentations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// the starred Lysenok family (with σⁱ(a²))
    Rstar,
    /// the plain Lysenok family
    R,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Series {
    Relators,
    Exhaustive,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a word is trivial in the presented group.
    Solve {
        #[arg(long, default_value = "lysenok")]
        presentation: String,
        #[arg(long)]
        word: String,
    },
    /// Produce a relator-product certificate for a trivial word.
    Decompose {
        #[arg(long, default_value = "lysenok")]
        presentation: String,
        #[arg(long)]
        word: String,
        /// target relator family for Grigorchuk-group words
        #[arg(long, value_enum, default_value = "rstar")]
        target: Target,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file; exits 0 iff it verifies.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Build the van Kampen diagram of a certificate and report cell counts.
    Diagram {
        #[arg(long)]
        cert: PathBuf,
        /// fold to a fixpoint before reporting
        #[arg(long)]
        fold: bool,
        /// print the {v, e, f, boundary, one_regular} JSON
        #[arg(long)]
        stats: bool,
    },
    /// Exact-within-bounds Dehn-function sweep over all short words.
    Sweep {
        #[arg(long)]
        presentation: String,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_FACTORS)]
        max_factors: u32,
        /// override the per-word conjugator bound
        #[arg(long)]
        conj_bound: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// write CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// print a growth-model fit to stderr
        #[arg(long)]
        fit: bool,
    },
    /// Enumerate the relators of a presentation up to a length.
    Relators {
        #[arg(long)]
        presentation: String,
        #[arg(long)]
        max_len: usize,
    },
    /// Bound audits: the Γ relator series, the exhaustive Γ audit, or the
    /// Γ_t sampling audit when the presentation is gamma_t.
    Audit {
        #[arg(long, default_value = "lysenok")]
        presentation: String,
        #[arg(long, value_enum, default_value = "exhaustive")]
        series: Series,
        #[arg(long, default_value_t = 8)]
        max_x: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// sample count for the Γ_t audit
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Loads a presentation from a builtin name or a JSON file path.
fn load_presentation(spec: &str) -> Result<Presentation, String> {
    if let Ok(p) = Presentation::builtin(spec) {
        return Ok(p);
    }
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| format!("reading {spec}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("parsing {spec}: {e}"));
    }
    Err(format!(
        "unknown presentation {spec:?}: expected a builtin name \
         (lysenok, lysenok_star, gamma1, gamma2, gamma_t, ex21, ex23) or a JSON file"
    ))
}

fn parse_word(s: &str) -> Result<Word, String> {
    Word::parse(s).map_err(|e| e.to_string())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("writing {path:?}: {e}")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    emit(out, &text)
}

fn init_threads() {
    if let Ok(n) = std::env::var("DEHNLAB_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Exit code semantics: 0 success/positive, 1 negative decision, 2 error.
pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exits.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<i32, String> {
    match cmd {
        Cmd::Solve { presentation, word } => {
            let p = load_presentation(&presentation)?;
            let w = parse_word(&word)?;
            p.validate_word(&w).map_err(|e| e.to_string())?;
            let trivial = match p.name() {
                Some("lysenok") | Some("lysenok_star") => {
                    is_trivial_gamma(&w).map_err(|e| e.to_string())?
                }
                Some("gamma_t") => is_trivial_gamma_t(&w).map_err(|e| e.to_string())?,
                _ => {
                    return Err(format!(
                        "no decision procedure for presentation {presentation:?}; \
                         solve supports lysenok, lysenok_star and gamma_t"
                    ))
                }
            };
            println!("{}", json!({ "trivial": trivial }));
            Ok(if trivial { 0 } else { 1 })
        }

        Cmd::Decompose { presentation, word, target, budget, out } => {
            let p = load_presentation(&presentation)?;
            let w = parse_word(&word)?;
            p.validate_word(&w).map_err(|e| e.to_string())?;
            let cert = match p.name() {
                Some("gamma_t") => decompose_gamma_t(&w, budget).map_err(|e| e.to_string()),
                Some("lysenok") | Some("lysenok_star") => match target {
                    Target::Rstar => decompose(&w, budget).map_err(|e| e.to_string()),
                    Target::R => decompose_r(&w, budget).map_err(|e| e.to_string()),
                },
                _ => Err(format!(
                    "decompose supports lysenok, lysenok_star and gamma_t, not {presentation:?}"
                )),
            };
            match cert {
                Ok(cert) => {
                    eprintln!(
                        "certificate with {} factors for {}",
                        cert.len(),
                        if word.is_empty() { "the empty word" } else { &word }
                    );
                    emit_json(&out, &cert)?;
                    Ok(0)
                }
                Err(msg) if msg.contains("not trivial") => {
                    println!("{}", json!({ "trivial": false }));
                    Ok(1)
                }
                Err(msg) => Err(msg),
            }
        }

        Cmd::Verify { cert } => {
            let text = fs::read_to_string(&cert).map_err(|e| format!("reading {cert:?}: {e}"))?;
            let cert: Certificate =
                serde_json::from_str(&text).map_err(|e| format!("parsing certificate: {e}"))?;
            match cert.verify() {
                Ok(true) => {
                    println!("{}", json!({ "verified": true, "factors": cert.len() }));
                    Ok(0)
                }
                Ok(false) => {
                    println!("{}", json!({ "verified": false }));
                    Ok(1)
                }
                Err(e) => {
                    println!("{}", json!({ "verified": false, "reason": e.to_string() }));
                    Ok(1)
                }
            }
        }

        Cmd::Diagram { cert, fold, stats } => {
            let text = fs::read_to_string(&cert).map_err(|e| format!("reading {cert:?}: {e}"))?;
            let cert: Certificate =
                serde_json::from_str(&text).map_err(|e| format!("parsing certificate: {e}"))?;
            let mut d = match Diagram::from_certificate(&cert) {
                Ok(d) => d,
                Err(e) => {
                    println!("{}", json!({ "error": e.to_string() }));
                    return Ok(1);
                }
            };
            if fold {
                d.fold();
            }
            if stats {
                emit_json(&None, &DiagramStats::of(&d))?;
            }
            Ok(0)
        }

        Cmd::Sweep { presentation, max_len, max_factors, conj_bound, budget, out, fit } => {
            let p = load_presentation(&presentation)?;
            let config = SweepConfig { max_factors, conj_bound, state_budget: budget };
            let rows = dehn_sweep(&p, max_len, &config).map_err(|e| e.to_string())?;
            let mut csv = String::from("x,f2_exact,f1_upper,f0_upper,flags\n");
            for r in &rows {
                let show = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.x,
                    show(r.f2_exact),
                    show(r.f1_upper),
                    show(r.f0_upper),
                    r.flags.join(";"),
                ));
            }
            emit(&out, csv.trim_end())?;
            let flagged = rows.iter().filter(|r| !r.flags.is_empty()).count();
            eprintln!("swept {} lengths over {presentation}, {flagged} flagged rows", rows.len());
            if fit {
                let pts: Vec<(usize, u64)> =
                    rows.iter().filter_map(|r| r.f2_exact.map(|f| (r.x, f))).collect();
                match growth_fit(&pts) {
                    Ok(fit) => eprintln!(
                        "f2 growth: best model {} with constant {:.3} (log-log slope {:.2}{})",
                        fit.best_model,
                        fit.constant,
                        fit.loglog_slope,
                        if fit.degenerate { ", degenerate" } else { "" }
                    ),
                    Err(e) => eprintln!("f2 growth: {e}"),
                }
            }
            Ok(0)
        }

        Cmd::Relators { presentation, max_len } => {
            let p = load_presentation(&presentation)?;
            let rows: Vec<serde_json::Value> = p
                .enumerate_relators(max_len)
                .into_iter()
                .map(|(r, h)| json!({ "relator": r.to_string(), "height": h.map(|h| h.0) }))
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?);
            Ok(0)
        }

        Cmd::Audit { presentation, series, max_x, budget, samples, seed, out } => {
            let p = load_presentation(&presentation)?;
            match (p.name(), series) {
                (Some("gamma_t"), _) => {
                    let report = audit_gamma_t_bounds(max_x, samples, seed, budget)
                        .map_err(|e| e.to_string())?;
                    eprintln!(
                        "gamma_t audit: {} samples (seed {seed}), {} bound violations, verified: {}",
                        report.samples, report.bound_violations, report.all_verified
                    );
                    emit_json(&out, &report)?;
                    Ok(if report.bound_violations == 0 && report.all_verified { 0 } else { 1 })
                }
                (_, Series::Relators) => {
                    let rows = relator_series_audit(max_x, budget).map_err(|e| e.to_string())?;
                    let ok = rows.iter().all(|r| r.verified && r.tau_ok);
                    eprintln!("relator series: {} rows, all verified: {ok}", rows.len());
                    emit_json(&out, &json!({ "seed": seed, "rows": rows }))?;
                    Ok(if ok { 0 } else { 1 })
                }
                (_, Series::Exhaustive) => {
                    let report = audit_gamma_bounds(max_x, budget).map_err(|e| e.to_string())?;
                    eprintln!(
                        "exhaustive audit over {} trivial words <= {}: c2 = {:.3}, c1 = {:.3}",
                        report.words_audited, max_x, report.fitted_c2, report.fitted_c1
                    );
                    emit_json(&out, &json!({ "seed": seed, "report": report }))?;
                    Ok(if report.tau_support_ok { 0 } else { 1 })
                }
            }
        }
    }
}
