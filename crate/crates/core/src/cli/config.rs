//! Flat `key = value` configuration, later keys and command-line flags win.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::braiding::{GradingConvention, RootUnit};
use crate::cartan::{CartanData, SimpleGraph};
use crate::rewrite::Rule;
use crate::tensor_rep::{DEFAULT_MAX_LENGTH, DEFAULT_MAX_RANK};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Tensor,
    Braiding,
    Rewrite,
    Nilhecke,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Tensor, Suite::Braiding, Suite::Rewrite, Suite::Nilhecke];
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "tensor" => Ok(Suite::Tensor),
            "braiding" => Ok(Suite::Braiding),
            "rewrite" => Ok(Suite::Rewrite),
            "nilhecke" => Ok(Suite::Nilhecke),
            other => Err(format!("unknown suite {other:?} (tensor, braiding, rewrite, nilhecke)")),
        }
    }
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    Rule::ALL
        .into_iter()
        .find(|r| r.name() == s.trim())
        .ok_or_else(|| format!("unknown rule {s:?} (merge, commute_distant, straighten_ef, serre)"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Preset name (`A2`, `D4`) or path to a graph file. `None` means `A_{n-1}`.
    pub graph: Option<String>,
    pub n: Option<RangeInclusive<usize>>,
    pub len: RangeInclusive<usize>,
    pub search_bound: i64,
    pub suites: BTreeSet<Suite>,
    pub rule_order: Vec<Rule>,
    pub max_power_sum: u32,
    pub conjugation_power: u32,
    pub rewrite_words: usize,
    pub confluence_words: usize,
    pub rewrite_max_len: usize,
    pub nilhecke_strands: usize,
    pub nilhecke_degree: u32,
    pub nilhecke_random: usize,
    pub cache_dir: Option<PathBuf>,
    pub json: bool,
    pub seed: u64,
    pub jobs: usize,
    pub q_one: bool,
    pub max_n: usize,
    pub max_len: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            graph: None,
            n: None,
            len: 2..=2,
            search_bound: 2,
            suites: Suite::ALL.into_iter().collect(),
            rule_order: Rule::ALL.to_vec(),
            max_power_sum: 4,
            conjugation_power: 2,
            rewrite_words: 200,
            confluence_words: 50,
            rewrite_max_len: 6,
            nilhecke_strands: 4,
            nilhecke_degree: 6,
            nilhecke_random: 50,
            cache_dir: None,
            json: false,
            seed: 0,
            jobs: 0,
            q_one: false,
            max_n: DEFAULT_MAX_RANK,
            max_len: DEFAULT_MAX_LENGTH,
        }
    }
}

/// `3` or `2..4` (inclusive).
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let s = s.trim();
    let bad = || format!("bad range {s:?}; expected `k` or `a..b`");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let k: usize = s.parse().map_err(|_| bad())?;
            Ok(k..=k)
        }
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("bad boolean {other:?}")),
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("bad value {value:?} for `{key}`"))
}

impl SuiteConfig {
    /// Sets one key; the same names are used by the config file and, with
    /// dashes, by the command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "graph" => self.graph = Some(v.to_string()),
            "n" => self.n = Some(parse_range(v)?),
            "N" | "len" => self.len = parse_range(v)?,
            "search_bound" => self.search_bound = num(&key, v)?,
            "suites" | "checks" => {
                self.suites = v
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()?
            }
            "rules" => {
                let order: Vec<Rule> = v.split(',').map(parse_rule).collect::<Result<_, _>>()?;
                let distinct: BTreeSet<Rule> = order.iter().copied().collect();
                if distinct.len() != order.len() {
                    return Err("`rules` lists a rule twice".into());
                }
                self.rule_order = order;
            }
            "max_power_sum" => self.max_power_sum = num(&key, v)?,
            "conjugation_power" => self.conjugation_power = num(&key, v)?,
            "rewrite_words" => self.rewrite_words = num(&key, v)?,
            "confluence_words" => self.confluence_words = num(&key, v)?,
            "rewrite_max_len" => self.rewrite_max_len = num(&key, v)?,
            "nilhecke_strands" => self.nilhecke_strands = num(&key, v)?,
            "nilhecke_degree" => self.nilhecke_degree = num(&key, v)?,
            "nilhecke_random" => self.nilhecke_random = num(&key, v)?,
            "cache_dir" => self.cache_dir = Some(PathBuf::from(v)),
            "json" => self.json = parse_bool(v)?,
            "seed" => self.seed = num(&key, v)?,
            "jobs" => self.jobs = num(&key, v)?,
            "q_one" => self.q_one = parse_bool(v)?,
            "max_n" => self.max_n = num(&key, v)?,
            "max_N" | "max_len" => self.max_len = num(&key, v)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Applies a config file: `key = value` lines, `#` comments, blank lines.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", k + 1))?;
            self.set(key, value).map_err(|e| format!("line {}: {e}", k + 1))?;
        }
        Ok(())
    }

    /// The Cartan datum of `--graph`, if given.
    pub fn cartan(&self) -> Result<Option<CartanData>, CliError> {
        let Some(spec) = &self.graph else { return Ok(None) };
        let path = Path::new(spec);
        let graph = if path.is_file() {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{spec}: {e}")))?;
            SimpleGraph::parse_spec(&text)
        } else {
            SimpleGraph::parse_spec(spec)
        }
        .map_err(|e| CliError::Config(format!("graph {spec:?}: {e}")))?;
        Ok(Some(crate::cartan::cartan_from_graph(graph)))
    }

    /// The `(n, N)` modules to run tensor-level checks on, with the Cartan
    /// datum for each `n`. Empty when the graph is not of type A.
    pub fn modules(&self) -> Result<Vec<(usize, usize)>, CliError> {
        let cartan = self.cartan()?;
        let ns: RangeInclusive<usize> = match (&cartan, &self.n) {
            (Some(c), Some(r)) => {
                if !is_type_a(c) {
                    return Ok(Vec::new());
                }
                if *r.start() != c.rank() + 1 || *r.end() != c.rank() + 1 {
                    return Err(CliError::Config(format!(
                        "--n {}..{} does not match graph of rank {} (sl_n needs n = {})",
                        r.start(),
                        r.end(),
                        c.rank(),
                        c.rank() + 1
                    )));
                }
                r.clone()
            }
            (Some(c), None) => {
                if !is_type_a(c) {
                    return Ok(Vec::new());
                }
                c.rank() + 1..=c.rank() + 1
            }
            (None, Some(r)) => r.clone(),
            (None, None) => 3..=3,
        };
        let mut out = Vec::new();
        for n in ns {
            for len in self.len.clone() {
                if n < 2 || len < 1 {
                    return Err(CliError::Config(format!("module (n={n}, N={len}) needs n >= 2 and N >= 1")));
                }
                if n > self.max_n || len > self.max_len {
                    return Err(CliError::Config(format!(
                        "module (n={n}, N={len}) exceeds the caps n <= {}, N <= {}; raise them with --max-n/--max-N",
                        self.max_n, self.max_len
                    )));
                }
                out.push((n, len));
            }
        }
        Ok(out)
    }
}

pub fn is_type_a(c: &CartanData) -> bool {
    *c.graph() == SimpleGraph::type_a(c.rank())
}

/// Text form of a grading convention, stored as `convention.txt` in the
/// cache directory.
pub struct ConventionFile<'a>(pub &'a GradingConvention);

impl fmt::Display for ConventionFile<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.0;
        writeln!(f, "c1 = {}", c.c1)?;
        writeln!(f, "c2 = {}", c.c2)?;
        if let Some(t) = c.twist {
            writeln!(f, "twist = {t}")?;
        }
        let unit = |u: RootUnit| format!("{} {}", u.eps, u.c);
        writeln!(f, "root_scale = {}", unit(c.root.scale))?;
        writeln!(f, "root_ratio = {}", unit(c.root.ratio))?;
        writeln!(f, "f_root_scale = {}", unit(c.f_root.scale))?;
        writeln!(f, "f_root_ratio = {}", unit(c.f_root.ratio))
    }
}

pub const CONVENTION_FILE: &str = "convention.txt";

pub fn parse_convention(text: &str) -> Result<GradingConvention, String> {
    let mut conv = GradingConvention::new(0, 0);
    let unit = |v: &str| -> Result<RootUnit, String> {
        let parts: Vec<i64> = v
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| format!("bad unit {v:?}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [eps, c] if eps == 1 || eps == -1 => Ok(RootUnit { eps, c }),
            _ => Err(format!("bad unit {v:?}; expected `eps c` with eps = ±1")),
        }
    };
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("expected `key = value`: {line:?}"))?;
        let v = v.trim();
        match k.trim() {
            "c1" => conv.c1 = num("c1", v)?,
            "c2" => conv.c2 = num("c2", v)?,
            "twist" => conv.twist = Some(num("twist", v)?),
            "root_scale" => conv.root.scale = unit(v)?,
            "root_ratio" => conv.root.ratio = unit(v)?,
            "f_root_scale" => conv.f_root.scale = unit(v)?,
            "f_root_ratio" => conv.f_root.ratio = unit(v)?,
            other => return Err(format!("unknown key `{other}`")),
        }
    }
    Ok(conv)
}
