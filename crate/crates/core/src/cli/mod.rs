//! Command-line front end: `verify`, `rewrite`, `derive-convention` and
//! `cache clear|stats`. Exit codes: 0 pass, 1 check failure, 2 usage or
//! configuration error.

pub mod config;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use crate::braiding::{
    check_braid_relation, check_invertible, derive_grading_convention, BraidError, GradingConvention, Specialization,
    DERIVATION_MODULES,
};
use crate::cartan::CartanData;
use crate::report::{Status, VerificationReport};
use crate::rewrite::{normal_form_with, oracle_equal, parse_sum, terms_text, DEFAULT_STEP_CAP};
use crate::tensor_rep::{build_module, MatrixCache};

pub use config::{parse_convention, ConventionFile, Suite, SuiteConfig, CONVENTION_FILE};
pub use suite::{resolve_convention, run_suite};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "decat", version, about = "Exact checks of quantum group identities on tensor powers of the defining representation")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Graph preset (A2, D4) or graph file.
    #[arg(long, global = true)]
    pub graph: Option<String>,
    /// `n` for sl_n, as `k` or `a..b`.
    #[arg(long = "n", global = true)]
    pub n: Option<String>,
    /// Tensor length N, as `k` or `a..b`.
    #[arg(long = "N", global = true)]
    pub len: Option<String>,
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Also run q = 1 variants.
    #[arg(long, global = true)]
    pub q_one: bool,
    #[arg(long, global = true)]
    pub search_bound: Option<i64>,
    /// Raise the cap on n.
    #[arg(long = "max-n", global = true)]
    pub max_n: Option<usize>,
    /// Raise the cap on N.
    #[arg(long = "max-N", global = true)]
    pub max_len: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification suite.
    Verify,
    /// Normal form of a formal sum, e.g. `rewrite "E1 E1" @ "(2,1)"`.
    Rewrite {
        #[arg(required = true, num_args = 1..)]
        expr: Vec<String>,
        /// Compare with the tensor model on (n, N).
        #[arg(long, num_args = 2, value_names = ["n", "N"])]
        oracle: Option<Vec<usize>>,
    },
    /// Search for the grading convention of the braid operators.
    DeriveConvention,
    /// Manage the on-disk matrix cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CacheAction {
    Clear,
    Stats,
}

impl Flags {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<SuiteConfig, CliError> {
        let mut cfg = SuiteConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let mut set = |k: &str, v: String| cfg.set(k, &v).map_err(CliError::Config);
        if let Some(v) = &self.graph {
            set("graph", v.clone())?;
        }
        if let Some(v) = &self.n {
            set("n", v.clone())?;
        }
        if let Some(v) = &self.len {
            set("N", v.clone())?;
        }
        if self.json {
            set("json", "true".into())?;
        }
        if let Some(v) = self.jobs {
            set("jobs", v.to_string())?;
        }
        if let Some(v) = self.seed {
            set("seed", v.to_string())?;
        }
        if let Some(v) = &self.cache_dir {
            set("cache_dir", v.display().to_string())?;
        }
        if self.q_one {
            set("q_one", "true".into())?;
        }
        if let Some(v) = self.search_bound {
            set("search_bound", v.to_string())?;
        }
        if let Some(v) = self.max_n {
            set("max_n", v.to_string())?;
        }
        if let Some(v) = self.max_len {
            set("max_N", v.to_string())?;
        }
        Ok(cfg)
    }
}

/// Parses `args` (program name first) and runs the command, writing to
/// `out` and `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "decat: {e}");
            match e {
                CliError::Io(_) => EXIT_FAIL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = cli.flags.resolve()?;
    match &cli.command {
        Command::Verify => cmd_verify(&cfg, out),
        Command::Rewrite { expr, oracle } => cmd_rewrite(&cfg, &expr.join(" "), oracle.as_deref(), out),
        Command::DeriveConvention => cmd_derive_convention(&cfg, out, err),
        Command::Cache { action } => cmd_cache(&cfg, *action, out),
    }
}

pub fn write_reports(reports: &[VerificationReport], json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    for r in reports {
        if json {
            writeln!(out, "{}", r.to_json())?;
        } else {
            writeln!(out, "{}", r.summary_line())?;
        }
    }
    Ok(())
}

fn exit_for(reports: &[VerificationReport]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

pub fn cmd_verify(cfg: &SuiteConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let reports = run_suite(cfg)?;
    write_reports(&reports, cfg.json, out)?;
    if !cfg.json {
        let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
        writeln!(
            out,
            "{} reports: {} passed, {} failed, {} skipped (seed {})",
            reports.len(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Skipped),
            cfg.seed
        )?;
    }
    Ok(exit_for(&reports))
}

fn graph_for_rewrite(cfg: &SuiteConfig, expr: &str) -> Result<CartanData, CliError> {
    if let Some(c) = cfg.cartan()? {
        return Ok(c);
    }
    // without --graph, read the rank off a content anchor
    let anchor = expr.rsplit_once('@').map(|(_, a)| a.trim()).unwrap_or("");
    if let Some(inner) = anchor.strip_prefix('(').and_then(|a| a.strip_suffix(')')) {
        let entries = inner.split(',').count();
        if entries >= 2 {
            return Ok(CartanData::type_a(entries - 1));
        }
    }
    Err(CliError::Config("rewrite needs --graph or a content anchor `@ (c1,...,cn)`".into()))
}

pub fn cmd_rewrite(cfg: &SuiteConfig, expr: &str, oracle: Option<&[usize]>, out: &mut dyn Write) -> Result<i32, CliError> {
    let cartan = Arc::new(graph_for_rewrite(cfg, expr)?);
    let sum = parse_sum(expr, cartan, None).map_err(|e| CliError::Input(e.to_string()))?;
    let nf = normal_form_with(&sum, &cfg.rule_order, DEFAULT_STEP_CAP).map_err(|e| CliError::Input(e.to_string()))?;
    let verdict = match oracle {
        Some(&[n, len]) => {
            let m = build_module(n, len).map_err(|e| CliError::Config(e.to_string()))?;
            let report = oracle_equal(&sum, &nf.sum, &m).map_err(|e| CliError::Input(e.to_string()))?;
            Some(report.status == Status::Pass)
        }
        _ => None,
    };
    if cfg.json {
        let mut v = json!({
            "input": sum.to_string(),
            "normal_form": terms_text(&nf.sum),
            "anchor": sum.source().to_string(),
            "steps": nf.steps,
            "passes": nf.passes,
        });
        if let Some(eq) = verdict {
            v["oracle"] = json!(if eq { "equal" } else { "not equal" });
        }
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "{}", terms_text(&nf.sum))?;
        if let Some(eq) = verdict {
            writeln!(out, "oracle: {}", if eq { "equal" } else { "not equal" })?;
        }
    }
    Ok(if verdict == Some(false) { EXIT_FAIL } else { EXIT_PASS })
}

/// `γ ≡ 0` at `q = 1` on the derivation modules.
fn q_one_reports() -> Result<Vec<VerificationReport>, BraidError> {
    let conv = GradingConvention::new(0, 0);
    let mut out = Vec::new();
    for &(n, len) in &DERIVATION_MODULES {
        let m = build_module(n, len)?;
        for i in m.indices() {
            out.push(check_invertible(&m, &conv, i)?);
            for j in m.indices().filter(|&j| j > i) {
                out.push(check_braid_relation(&m, &conv, i, j, Specialization::QOne)?);
            }
        }
    }
    Ok(out)
}

pub fn cmd_derive_convention(cfg: &SuiteConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let q_one = if cfg.q_one {
        Some(q_one_reports().map_err(|e| CliError::Input(e.to_string()))?)
    } else {
        None
    };
    let q_one_ok = q_one.as_ref().is_none_or(|r| r.iter().all(|x| x.status == Status::Pass));
    let derivation = match derive_grading_convention(cfg.search_bound) {
        Ok(d) => d,
        Err(BraidError::NoConvention { bound, diagnostic }) => {
            if cfg.json {
                writeln!(out, "{}", json!({ "search_bound": bound, "chosen": null, "diagnostic": diagnostic }))?;
            } else {
                writeln!(out, "no convention with search bound {bound}")?;
                writeln!(out, "{diagnostic}")?;
            }
            if let Some(reports) = &q_one {
                write_reports(reports, cfg.json, out)?;
            }
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let passing = derivation.passing_conventions();
    let persisted = match &cfg.cache_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(CONVENTION_FILE);
            std::fs::write(&path, ConventionFile(&derivation.chosen).to_string())?;
            Some(path)
        }
        None => None,
    };
    if cfg.json {
        let candidates: Vec<_> = derivation
            .candidates
            .iter()
            .map(|c| {
                json!({
                    "c1": c.c1, "c2": c.c2, "twist": c.twist,
                    "invertible": c.invertible, "braid_relations": c.braid_relations,
                    "q_one_agrees": c.q_one_agrees,
                    "root_units": c.root_units.iter().map(|u| u.to_string()).collect::<Vec<_>>(),
                    "f_root_units": c.f_root_units.iter().map(|u| u.to_string()).collect::<Vec<_>>(),
                    "passed": c.passed(),
                })
            })
            .collect();
        let v = json!({
            "search_bound": derivation.search_bound,
            "candidates": candidates,
            "passing": passing.iter().map(|c| c.tag()).collect::<Vec<_>>(),
            "chosen": derivation.chosen.tag(),
            "persisted": persisted.as_ref().map(|p| p.display().to_string()),
        });
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "search bound {}: {} candidates", derivation.search_bound, derivation.candidates.len())?;
        for c in &derivation.candidates {
            writeln!(out, "  {} {c}", if c.passed() { "PASS" } else { "fail" })?;
        }
        writeln!(out, "passing conventions:")?;
        for c in &passing {
            writeln!(out, "  {c}")?;
        }
        writeln!(out, "chosen: {}", derivation.chosen)?;
        match &persisted {
            Some(p) => writeln!(out, "saved to {}", p.display())?,
            None => writeln!(err, "no --cache-dir given; convention not saved")?,
        }
    }
    if let Some(reports) = &q_one {
        write_reports(reports, cfg.json, out)?;
    }
    Ok(if q_one_ok { EXIT_PASS } else { EXIT_FAIL })
}

pub fn cmd_cache(cfg: &SuiteConfig, action: CacheAction, out: &mut dyn Write) -> Result<i32, CliError> {
    let dir = cfg
        .cache_dir
        .as_ref()
        .ok_or_else(|| CliError::Config("cache commands need --cache-dir".into()))?;
    let cache = MatrixCache::open(dir).map_err(|e| CliError::Config(e.to_string()))?;
    match action {
        CacheAction::Clear => {
            let mut removed = cache.clear().map_err(|e| CliError::Input(e.to_string()))?;
            let conv = dir.join(CONVENTION_FILE);
            if conv.is_file() {
                std::fs::remove_file(conv)?;
                removed += 1;
            }
            if cfg.json {
                writeln!(out, "{}", json!({ "removed": removed }))?;
            } else {
                writeln!(out, "removed {removed} files from {}", dir.display())?;
            }
        }
        CacheAction::Stats => {
            let s = cache.stats().map_err(|e| CliError::Input(e.to_string()))?;
            let has_conv = dir.join(CONVENTION_FILE).is_file();
            if cfg.json {
                writeln!(out, "{}", json!({ "files": s.files, "bytes": s.bytes, "convention": has_conv }))?;
            } else {
                writeln!(out, "{} matrix files, {} bytes in {}", s.files, s.bytes, dir.display())?;
                writeln!(out, "convention: {}", if has_conv { "saved" } else { "none" })?;
            }
        }
    }
    Ok(EXIT_PASS)
}
