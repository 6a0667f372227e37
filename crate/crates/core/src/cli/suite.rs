//! The `verify` suite: a list of independent checks run on a rayon pool and
//! reported in stable order.

use std::sync::Arc;

use rayon::prelude::*;

use super::config::{is_type_a, parse_convention, Suite, SuiteConfig, CONVENTION_FILE};
use super::CliError;
use crate::braiding::{
    check_branch_agreement, check_braid_relation, check_invertible, check_tij_factorization, check_unimodular,
    conjugation_check, derive_grading_convention, GradingConvention, Specialization,
};
use crate::cartan::CartanData;
use crate::nilhecke::{check_klr_edge_relation, check_nilhecke, check_theorem6_computation_with, Samples};
use crate::report::{CheckRun, Counterexample, Params, Status, VerificationReport};
use crate::rewrite::{check_confluence, check_soundness, RandomWords};
use crate::tensor_rep::{
    verify_distant_and_ef_commutations, verify_divided_power_rule, verify_ef_straightening_all,
    verify_mixed_decompositions, verify_serre, MatrixCache, WeightModule,
};

type Job = Box<dyn Fn() -> Result<VerificationReport, String> + Send + Sync>;

/// A check that could not run is reported as a failure carrying the error.
fn errored(name: &str, params: Params, message: String) -> VerificationReport {
    let mut run = CheckRun::start(name, "error", params);
    run.fail_case(Counterexample {
        weight: "-".into(),
        words: Vec::new(),
        lhs: message.clone(),
        rhs: String::new(),
    });
    run.finish().with_note(message)
}

fn skipped(name: &str, reason: &str) -> VerificationReport {
    CheckRun::start(name, "-", Params::default()).skipped(reason)
}

fn job<E: std::fmt::Display>(f: impl Fn() -> Result<VerificationReport, E> + Send + Sync + 'static) -> Job {
    Box::new(move || f().map_err(|e| e.to_string()))
}

/// Loads the persisted convention or derives one.
pub fn resolve_convention(cfg: &SuiteConfig) -> Result<(GradingConvention, VerificationReport), CliError> {
    let params = Params::default().with("search_bound", cfg.search_bound);
    if let Some(dir) = &cfg.cache_dir {
        let path = dir.join(CONVENTION_FILE);
        if path.is_file() {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let conv = parse_convention(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let mut run = CheckRun::start("convention_derivation", "thm-2.10", params);
            run.record_case();
            return Ok((conv, run.finish().with_convention(conv.tag()).with_note(format!("loaded {conv}"))));
        }
    }
    let mut run = CheckRun::start("convention_derivation", "thm-2.10", params);
    match derive_grading_convention(cfg.search_bound) {
        Ok(d) => {
            for _ in &d.candidates {
                run.record_case();
            }
            let conv = d.chosen;
            Ok((conv, run.finish().with_convention(conv.tag()).with_note(format!("derived {conv}"))))
        }
        Err(e) => {
            run.fail_case(Counterexample {
                weight: "-".into(),
                words: Vec::new(),
                lhs: e.to_string(),
                rhs: String::new(),
            });
            Ok((GradingConvention::default(), run.finish().with_note("no convention found")))
        }
    }
}

fn open_module(cfg: &SuiteConfig, n: usize, len: usize) -> Result<WeightModule, CliError> {
    let m = WeightModule::with_limits(n, len, cfg.max_n, cfg.max_len).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(match &cfg.cache_dir {
        Some(dir) => m.with_disk_cache(MatrixCache::open(dir).map_err(|e| CliError::Config(e.to_string()))?),
        None => m,
    })
}

fn tensor_jobs(cfg: &SuiteConfig, m: &Arc<WeightModule>, jobs: &mut Vec<Job>) {
    let s = cfg.max_power_sum;
    let indices: Vec<usize> = m.indices().collect();
    for &i in &indices {
        for r1 in 1..s {
            for r2 in 1..=s - r1 {
                let m1 = m.clone();
                jobs.push(job(move || verify_divided_power_rule(&m1, i, r1, r2)));
                let m2 = m.clone();
                jobs.push(job(move || verify_ef_straightening_all(&m2, i, r1, r2)));
            }
        }
    }
    for &i in &indices {
        for &j in &indices {
            if i == j {
                continue;
            }
            let m1 = m.clone();
            jobs.push(job(move || verify_serre(&m1, i, j)));
            let m2 = m.clone();
            jobs.push(job(move || verify_distant_and_ef_commutations(&m2, i, j)));
            if m.cartan().adjacent(i, j) {
                for a in 0..=s {
                    for b in 0..=s - a {
                        if a + b == 0 {
                            continue;
                        }
                        let m3 = m.clone();
                        jobs.push(job(move || verify_mixed_decompositions(&m3, i, j, a, b)));
                    }
                }
            }
        }
    }
}

fn braiding_jobs(cfg: &SuiteConfig, conv: GradingConvention, m: &Arc<WeightModule>, jobs: &mut Vec<Job>) {
    let indices: Vec<usize> = m.indices().collect();
    let mut specs = vec![Specialization::Generic];
    if cfg.q_one {
        specs.push(Specialization::QOne);
    }
    for &i in &indices {
        let m1 = m.clone();
        jobs.push(job(move || check_invertible(&m1, &conv, i)));
        let m2 = m.clone();
        jobs.push(job(move || check_branch_agreement(&m2, &conv, i)));
        let m3 = m.clone();
        jobs.push(job(move || check_unimodular(&m3, &conv, i)));
    }
    for &i in &indices {
        for &j in &indices {
            if i < j {
                for &at in &specs {
                    let m1 = m.clone();
                    jobs.push(job(move || check_braid_relation(&m1, &conv, i, j, at)));
                }
            }
            if i != j && m.cartan().adjacent(i, j) {
                let power = cfg.conjugation_power;
                for &at in &specs {
                    let m1 = m.clone();
                    jobs.push(job(move || conjugation_check(&m1, &conv, i, j, power, at)));
                }
                let m2 = m.clone();
                jobs.push(job(move || check_tij_factorization(&m2, &conv, i, j)));
            }
        }
    }
}

fn nilhecke_jobs(cfg: &SuiteConfig, cartan: &Arc<CartanData>, jobs: &mut Vec<Job>) {
    let samples = Samples::new(cfg.nilhecke_degree, cfg.nilhecke_random, cfg.seed);
    for m in 2..=cfg.nilhecke_strands.max(2) {
        jobs.push(job(move || check_nilhecke(m, samples)));
    }
    for i in 1..=cartan.rank() {
        for j in 1..=cartan.rank() {
            let c = cartan.clone();
            jobs.push(job(move || check_klr_edge_relation(&c, i, j, samples)));
            if i != j && cartan.adjacent(i, j) {
                let c = cartan.clone();
                jobs.push(job(move || check_theorem6_computation_with(&c, i, j, samples, None)));
            }
        }
    }
}

/// Runs the configured suites; reports come back sorted by check name and
/// parameters, each stamped with the seed.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>, CliError> {
    let modules = cfg.modules()?;
    let graph = cfg.cartan()?;
    let mut reports = Vec::new();
    let mut jobs: Vec<Job> = Vec::new();
    let wants = |s: Suite| cfg.suites.contains(&s);

    let tensor_level = wants(Suite::Tensor) || wants(Suite::Braiding) || wants(Suite::Rewrite);
    if tensor_level && modules.is_empty() {
        reports.push(skipped("tensor_suites", "graph is not of type A; tensor, braiding and rewrite checks need sl_n"));
    }
    let built: Vec<Arc<WeightModule>> = modules
        .iter()
        .map(|&(n, len)| open_module(cfg, n, len).map(Arc::new))
        .collect::<Result<_, _>>()?;
    if wants(Suite::Tensor) {
        for m in &built {
            tensor_jobs(cfg, m, &mut jobs);
        }
    }
    if wants(Suite::Braiding) && !built.is_empty() {
        let (conv, derivation) = resolve_convention(cfg)?;
        let usable = derivation.status == Status::Pass;
        reports.push(derivation);
        if usable {
            for m in &built {
                braiding_jobs(cfg, conv, m, &mut jobs);
            }
        }
    }
    if wants(Suite::Rewrite) && !modules.is_empty() {
        let with_rank: Vec<(usize, usize)> = modules.clone();
        let soundness = RandomWords {
            modules: with_rank.clone(),
            words: cfg.rewrite_words,
            max_len: cfg.rewrite_max_len,
            max_power: 2,
            seed: cfg.seed,
        };
        let confluence = RandomWords {
            words: cfg.confluence_words,
            ..soundness.clone()
        };
        let order = cfg.rule_order.clone();
        jobs.push(job(move || check_soundness(&soundness, &order)));
        jobs.push(job(move || check_confluence(&confluence)));
    }
    if wants(Suite::Nilhecke) {
        let cartan = match &graph {
            Some(c) => c.clone(),
            None => CartanData::type_a(modules.iter().map(|&(n, _)| n - 1).max().unwrap_or(2).max(1)),
        };
        nilhecke_jobs(cfg, &Arc::new(cartan), &mut jobs);
    }
    if let Some(c) = &graph {
        if !is_type_a(c) && !wants(Suite::Nilhecke) && reports.is_empty() {
            reports.push(skipped("suite", "nothing to run for this graph"));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let ran: Vec<VerificationReport> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(k, j)| j().unwrap_or_else(|e| errored("check_error", Params::default().with("job", k as i64), e)))
            .collect()
    });
    reports.extend(ran);
    for r in &mut reports {
        r.seed = Some(cfg.seed);
    }
    reports.sort_by_key(|r| r.sort_key());
    Ok(reports)
}
