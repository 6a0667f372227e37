//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Run with `cargo test --test acceptance`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use decat::braiding::{
    check_braid_relation, check_invertible, check_tij_factorization, check_unimodular, conjugation_check,
    derive_grading_convention, GradingConvention, RootUnit, RootVectorUnits, Specialization, DERIVATION_MODULES,
};
use decat::cartan::{CartanData, Content};
use decat::nilhecke::{check_klr_edge_relation, check_nilhecke, check_theorem6_computation_with, Samples};
use decat::report::{Status, VerificationReport};
use decat::rewrite::{check_confluence, check_soundness, RandomWords, DEFAULT_ORDER};
use decat::tensor_rep::{
    build_module, verify_distant_and_ef_commutations, verify_divided_power_rule, verify_ef_straightening_all,
    verify_mixed_decompositions, verify_serre, WeightModule,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Collects reports; the first failing one is the criterion's failure.
#[derive(Default)]
struct Tally {
    reports: usize,
    cases: usize,
    failure: Option<String>,
}

impl Tally {
    fn add(&mut self, r: VerificationReport) {
        self.reports += 1;
        self.cases += r.cases;
        if r.status != Status::Pass && self.failure.is_none() {
            self.failure = Some(r.summary_line());
        }
    }

    fn expect_fail(&mut self, r: VerificationReport, what: &str) {
        self.reports += 1;
        if r.status != Status::Fail && self.failure.is_none() {
            self.failure = Some(format!("negative control passed: {what}: {}", r.summary_line()));
        }
    }

    fn done(self, what: &str) -> Outcome {
        match self.failure {
            Some(f) => Err(f),
            None => Ok(format!("{} reports, {} cases, {what}", self.reports, self.cases)),
        }
    }
}

fn modules(ns: std::ops::RangeInclusive<usize>, lens: std::ops::RangeInclusive<usize>) -> Vec<WeightModule> {
    let mut out = Vec::new();
    for n in ns {
        for len in lens.clone() {
            out.push(build_module(n, len).unwrap());
        }
    }
    out
}

/// Brute force: count the words in `{1..n}^N` by content.
fn content_counts(n: usize, len: usize) -> BTreeMap<Vec<i64>, usize> {
    let mut counts = BTreeMap::new();
    let total = n.pow(len as u32);
    for mut code in 0..total {
        let mut content = vec![0i64; n];
        for _ in 0..len {
            content[code % n] += 1;
            code /= n;
        }
        *counts.entry(content).or_insert(0) += 1;
    }
    counts
}

fn criterion_dimensions() -> Outcome {
    let mut spaces = 0;
    for n in 2..=4 {
        for len in 1..=6 {
            let m = build_module(n, len).map_err(|e| e.to_string())?;
            let oracle = content_counts(n, len);
            if m.weights().len() != oracle.len() {
                return Err(format!("(n={n}, N={len}): {} weights, expected {}", m.weights().len(), oracle.len()));
            }
            for (content, &expected) in &oracle {
                let got = m.dim(&Content(content.clone()));
                if got != expected {
                    return Err(format!("(n={n}, N={len}) weight {content:?}: dim {got}, expected {expected}"));
                }
                spaces += 1;
            }
        }
    }
    Ok(format!("{spaces} weight spaces match word counts"))
}

fn criterion_sl2() -> Outcome {
    let mut t = Tally::default();
    for m in modules(2..=4, 1..=6) {
        for i in m.indices() {
            for a in 1..=3u32 {
                for b in 1..=4 - a {
                    t.add(verify_divided_power_rule(&m, i, a, b).map_err(|e| e.to_string())?);
                }
            }
            for a in 0..=4u32 {
                for b in 0..=4 - a {
                    t.add(verify_ef_straightening_all(&m, i, a, b).map_err(|e| e.to_string())?);
                }
            }
        }
    }
    t.done("a+b <= 4")
}

fn criterion_serre_mixed() -> Outcome {
    let mut t = Tally::default();
    for m in modules(2..=4, 1..=5) {
        for i in m.indices() {
            for j in m.indices().filter(|&j| j != i) {
                t.add(verify_distant_and_ef_commutations(&m, i, j).map_err(|e| e.to_string())?);
                if !m.cartan().adjacent(i, j) {
                    continue;
                }
                t.add(verify_serre(&m, i, j).map_err(|e| e.to_string())?);
                for a in 0..=4u32 {
                    for b in 0..=4 - a {
                        if a + b > 0 {
                            t.add(verify_mixed_decompositions(&m, i, j, a, b).map_err(|e| e.to_string())?);
                        }
                    }
                }
            }
        }
    }
    t.done("serre, mixed, distant and EF")
}

fn derived() -> GradingConvention {
    derive_grading_convention(2).expect("convention derivation").chosen
}

fn criterion_derivation() -> Outcome {
    let d = derive_grading_convention(2).map_err(|e| e.to_string())?;
    let passing = d.passing_conventions();
    if passing.is_empty() {
        return Err("no passing convention".into());
    }
    let mut t = Tally::default();
    let gamma_zero = GradingConvention::new(0, 0);
    for &(n, len) in &DERIVATION_MODULES {
        let m = build_module(n, len).unwrap();
        for i in m.indices() {
            for conv in &passing {
                t.add(check_invertible(&m, conv, i).map_err(|e| e.to_string())?);
            }
            t.add(check_invertible(&m, &gamma_zero, i).map_err(|e| e.to_string())?);
            for j in m.indices().filter(|&j| j > i) {
                for conv in &passing {
                    t.add(check_braid_relation(&m, conv, i, j, Specialization::Generic).map_err(|e| e.to_string())?);
                }
                t.add(check_braid_relation(&m, &gamma_zero, i, j, Specialization::QOne).map_err(|e| e.to_string())?);
            }
        }
    }
    t.done(&format!("{} of {} candidates pass, chosen {}", passing.len(), d.candidates.len(), d.chosen))
}

fn criterion_braid() -> Outcome {
    let conv = derived();
    let mut t = Tally::default();
    for m in modules(3..=4, 1..=5) {
        for i in m.indices() {
            t.add(check_invertible(&m, &conv, i).map_err(|e| e.to_string())?);
            t.add(check_unimodular(&m, &conv, i).map_err(|e| e.to_string())?);
            for j in m.indices().filter(|&j| j > i) {
                t.add(check_braid_relation(&m, &conv, i, j, Specialization::Generic).map_err(|e| e.to_string())?);
            }
        }
    }
    t.done("A2 and A3, N <= 5")
}

fn criterion_conjugation() -> Outcome {
    let conv = derived();
    let mut t = Tally::default();
    for len in [2, 3] {
        let m = build_module(3, len).unwrap();
        for (i, j) in [(1, 2), (2, 1)] {
            for at in [Specialization::Generic, Specialization::QOne] {
                t.add(conjugation_check(&m, &conv, i, j, 3, at).map_err(|e| e.to_string())?);
            }
            t.add(check_tij_factorization(&m, &conv, i, j).map_err(|e| e.to_string())?);
        }
    }
    t.done("(3,2) and (3,3)")
}

fn criterion_rewrite() -> Outcome {
    let mut all = Vec::new();
    for n in 2..=4 {
        for len in 1..=5 {
            all.push((n, len));
        }
    }
    let spec = RandomWords {
        modules: all,
        words: 1000,
        max_len: 6,
        max_power: 2,
        seed: 2024,
    };
    let mut t = Tally::default();
    let sound = check_soundness(&spec, &DEFAULT_ORDER).map_err(|e| e.to_string())?;
    let nonzero = sound.params.extra.get("nonzero").copied().unwrap_or(0);
    t.add(sound);
    t.add(check_confluence(&RandomWords { words: 200, ..spec }).map_err(|e| e.to_string())?);
    t.done(&format!("{nonzero} of 1000 words nonzero"))
}

fn criterion_nilhecke() -> Outcome {
    let exhaustive = Samples::new(10, 0, 0);
    let mut t = Tally::default();
    for m in 2..=4 {
        t.add(check_nilhecke(m, exhaustive).map_err(|e| e.to_string())?);
    }
    for cartan in [CartanData::type_a(2), CartanData::type_a(3)] {
        for i in 1..=cartan.rank() {
            for j in 1..=cartan.rank() {
                t.add(check_klr_edge_relation(&cartan, i, j, exhaustive).map_err(|e| e.to_string())?);
                if i != j && cartan.adjacent(i, j) {
                    t.add(check_theorem6_computation_with(&cartan, i, j, exhaustive, None).map_err(|e| e.to_string())?);
                }
            }
        }
    }
    // drop one crossing of the composite
    let a2 = CartanData::type_a(2);
    for skip in 0..4 {
        let r = check_theorem6_computation_with(&a2, 1, 2, Samples::new(4, 0, 0), Some(skip)).map_err(|e| e.to_string())?;
        t.expect_fail(r, &format!("composite without crossing {skip}"));
    }
    // wrong root-vector units
    let conv = derived();
    let m = build_module(3, 2).unwrap();
    let flipped = RootUnit { eps: -conv.root.ratio.eps, ..conv.root.ratio };
    let wrong = conv.with_root_units(RootVectorUnits { ratio: flipped, ..conv.root }, conv.f_root);
    t.expect_fail(conjugation_check(&m, &wrong, 1, 2, 1, Specialization::Generic).map_err(|e| e.to_string())?, "flipped r_ij ratio");
    t.done("degree <= 10, m <= 4, 5 negative controls fail")
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = decat::cli::run(std::iter::once("decat").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn untimed(lines: &str) -> Vec<String> {
    lines
        .lines()
        .map(|l| serde_json::from_str::<VerificationReport>(l).map(|r| r.to_json_untimed()).unwrap_or_else(|_| l.to_string()))
        .collect()
}

fn criterion_interfaces() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = dir.path().to_str().unwrap();
    let base = ["--json", "verify", "--n", "3", "--N", "3", "--seed", "7"];
    let (c1, a) = cli(&base);
    let (c2, b) = cli(&base);
    if (c1, c2) != (0, 0) {
        return Err(format!("verify exit codes {c1}, {c2}"));
    }
    if untimed(&a) != untimed(&b) {
        return Err("repeated verify runs differ".into());
    }
    let with_cache: Vec<&str> = base.iter().copied().chain(["--cache-dir", cache]).collect();
    let cold = untimed(&cli(&with_cache).1);
    let warm = untimed(&cli(&with_cache).1);
    if cold != warm || cold != untimed(&a) {
        return Err("cache changes verdicts".into());
    }
    let usage = [cli(&["verify", "--n", "9"]).0, cli(&["nonsense"]).0, cli(&["cache", "stats"]).0];
    if usage != [2, 2, 2] {
        return Err(format!("usage exit codes {usage:?}"));
    }
    std::fs::write(dir.path().join("convention.txt"), "c1 = 0\nc2 = 0\ntwist = -1\nroot_scale = 1 0\nroot_ratio = -1 1\nf_root_scale = 1 0\nf_root_ratio = -1 -1\n")
        .map_err(|e| e.to_string())?;
    let (fail, _) = cli(&["verify", "--n", "3", "--N", "2", "--cache-dir", cache]);
    if fail != 1 {
        return Err(format!("failing verify exited {fail}"));
    }
    Ok(format!("{} identical reports, exit codes 0/1/2", cold.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("weight space dimensions", criterion_dimensions),
        ("sl2 divided powers and straightening", criterion_sl2),
        ("serre, mixed and distant relations", criterion_serre_mixed),
        ("grading convention derivation", criterion_derivation),
        ("braid relations and invertibility", criterion_braid),
        ("root vector conjugation and t_ij", criterion_conjugation),
        ("rewriter soundness and confluence", criterion_rewrite),
        ("nil-Hecke and KLR relations", criterion_nilhecke),
        ("determinism, exit codes and cache", criterion_interfaces),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}; {secs:.1} s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why}; {secs:.1} s)", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
