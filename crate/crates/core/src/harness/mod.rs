//! Range verification of every identity over primes, with a resumable
//! result cache and json/csv/text reports.
//!
//! A run is planned up front as a list of tasks `(check, p, params)`. Tasks
//! found in the cache are not recomputed. The rest are grouped by prime,
//! and each prime is evaluated on its own worker with its own [`PrimeCtx`].

mod cache;
mod checks;
mod report;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hp::DEFAULT_PRECISION_BITS;
use crate::nt::{is_prime, PrimeCtx};

pub use cache::{ResultCache, CODE_VERSION};
pub use checks::{evaluate_prime, revalidate};
pub use report::{write_results, Format, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    TheoremA,
    CorollaryA,
    ConjectureA,
    LemmaSign,
    Eigen,
    Product,
    Jacobsthal,
    RowIdentity,
    Carlitz,
    Chapman,
    ChapmanStar,
    SunZero,
    SunQr,
}

impl CheckId {
    pub const ALL: [CheckId; 13] = [
        CheckId::TheoremA,
        CheckId::CorollaryA,
        CheckId::ConjectureA,
        CheckId::LemmaSign,
        CheckId::Eigen,
        CheckId::Product,
        CheckId::Jacobsthal,
        CheckId::RowIdentity,
        CheckId::Carlitz,
        CheckId::Chapman,
        CheckId::ChapmanStar,
        CheckId::SunZero,
        CheckId::SunQr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::TheoremA => "theorem-a",
            CheckId::CorollaryA => "corollary-a",
            CheckId::ConjectureA => "conjecture-a",
            CheckId::LemmaSign => "lemma-sign",
            CheckId::Eigen => "eigen",
            CheckId::Product => "product",
            CheckId::Jacobsthal => "jacobsthal",
            CheckId::RowIdentity => "row-identity",
            CheckId::Carlitz => "carlitz",
            CheckId::Chapman => "chapman",
            CheckId::ChapmanStar => "chapman-star",
            CheckId::SunZero => "sun-zero",
            CheckId::SunQr => "sun-qr",
        }
    }

    /// Upper prime bound when the run does not set one.
    pub fn default_pmax(self) -> u64 {
        match self {
            CheckId::LemmaSign | CheckId::Jacobsthal | CheckId::RowIdentity => 2000,
            // p − 1 determinants of size p − 1 each.
            CheckId::Carlitz => 47,
            _ => 200,
        }
    }

    /// Residue class mod 4 the check is stated for, if restricted.
    pub fn residue_class(self) -> Option<u64> {
        match self {
            CheckId::TheoremA
            | CheckId::CorollaryA
            | CheckId::LemmaSign
            | CheckId::Eigen
            | CheckId::Product
            | CheckId::Jacobsthal
            | CheckId::RowIdentity => Some(1),
            CheckId::ConjectureA => Some(3),
            _ => None,
        }
    }

    pub fn applies_to(self, p: u64) -> bool {
        self.residue_class().is_none_or(|c| p % 4 == c)
    }

    fn uses_d(self) -> bool {
        matches!(self, CheckId::TheoremA | CheckId::SunZero | CheckId::SunQr)
    }

    fn uses_precision(self) -> bool {
        matches!(
            self,
            CheckId::Eigen | CheckId::Chapman | CheckId::ChapmanStar
        )
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check '{s}'")))
    }
}

/// Parses `all` or a comma-separated list of check ids.
pub fn parse_checks(s: &str) -> Result<Vec<CheckId>> {
    if s.trim() == "all" {
        return Ok(CheckId::ALL.to_vec());
    }
    let mut out: Vec<CheckId> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: CheckId,
    pub p: u64,
    pub params: Params,
    pub status: Status,
    pub witness: BTreeMap<String, String>,
}

/// One unit of planned work.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Task {
    pub check_id: CheckId,
    pub p: u64,
    pub params: Params,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum DList {
    /// `{1, 2, 3, 5, p − 1}` plus eight residues drawn with seed `p`.
    #[default]
    Default,
    /// Every `d` in `0..p`.
    All,
    Explicit(Vec<i64>),
}

impl FromStr for DList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(DList::All),
            "default" => Ok(DList::Default),
            list => list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("d value '{t}': {e}")))
                })
                .collect::<Result<_>>()
                .map(DList::Explicit),
        }
    }
}

impl DList {
    /// Distinct residues mod `p`, ascending.
    pub fn values(&self, p: u64) -> Vec<i64> {
        let pi = p as i64;
        let mut out: Vec<i64> = match self {
            DList::All => (0..pi).collect(),
            DList::Explicit(v) => v.iter().map(|d| d.rem_euclid(pi)).collect(),
            DList::Default => {
                let mut v: Vec<i64> = [1, 2, 3, 5, pi - 1]
                    .iter()
                    .map(|d| d.rem_euclid(pi))
                    .collect();
                let mut rng = ChaCha8Rng::seed_from_u64(p);
                v.extend((0..8).map(|_| rng.random_range(0..pi)));
                v
            }
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub checks: Vec<CheckId>,
    /// Applies to every check when set, else each check's default.
    pub pmax: Option<u64>,
    pub pmin: u64,
    pub d_list: DList,
    /// Worker threads; 0 leaves the choice to rayon.
    pub jobs: usize,
    pub exec: Exec,
    pub format: Format,
    pub cache: Option<PathBuf>,
    pub precision_bits: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            checks: CheckId::ALL.to_vec(),
            pmax: None,
            pmin: 3,
            d_list: DList::Default,
            jobs: 0,
            exec: Exec::default(),
            format: Format::Json,
            cache: None,
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

impl Config {
    pub fn pmax_for(&self, check: CheckId) -> u64 {
        self.pmax.unwrap_or_else(|| check.default_pmax())
    }
}

/// Every task the configuration asks for, by ascending prime then check.
pub fn plan(config: &Config) -> Result<Vec<Task>> {
    let top = config
        .checks
        .iter()
        .map(|&c| config.pmax_for(c))
        .max()
        .unwrap_or(0);
    let mut tasks = Vec::new();
    for p in (config.pmin.max(3)..=top).filter(|&p| is_prime(p)) {
        let checks: Vec<CheckId> = config
            .checks
            .iter()
            .copied()
            .filter(|&c| c.applies_to(p) && p <= config.pmax_for(c))
            .collect();
        if checks.is_empty() {
            continue;
        }
        let needs_symbols = checks
            .iter()
            .any(|c| matches!(c, CheckId::SunZero | CheckId::SunQr));
        let ctx = needs_symbols.then(|| PrimeCtx::new(p)).transpose()?;
        let ds = config.d_list.values(p);
        for check in checks {
            let precision_bits = check.uses_precision().then_some(config.precision_bits);
            if !check.uses_d() {
                tasks.push(Task {
                    check_id: check,
                    p,
                    params: Params {
                        d: None,
                        precision_bits,
                    },
                });
                continue;
            }
            for &d in &ds {
                let keep = match check {
                    CheckId::SunZero => ctx.as_ref().is_some_and(|c| c.legendre(d) == -1),
                    CheckId::SunQr => ctx.as_ref().is_some_and(|c| c.legendre(d) == 1),
                    _ => true,
                };
                if keep {
                    tasks.push(Task {
                        check_id: check,
                        p,
                        params: Params {
                            d: Some(d),
                            precision_bits,
                        },
                    });
                }
            }
        }
    }
    Ok(tasks)
}

/// Runs the plan, taking whatever the cache already holds. Results come
/// back in plan order; fresh ones are appended to the cache.
pub fn execute(config: &Config) -> Result<Vec<CheckResult>> {
    let tasks = plan(config)?;
    let mut cache = match &config.cache {
        Some(path) => Some(ResultCache::open(path)?),
        None => None,
    };
    let mut by_prime: BTreeMap<u64, Vec<Task>> = BTreeMap::new();
    for t in &tasks {
        if cache.as_ref().and_then(|c| c.get(t)).is_none() {
            by_prime.entry(t.p).or_default().push(t.clone());
        }
    }
    let groups: Vec<(u64, Vec<Task>)> = by_prime.into_iter().collect();
    let exec = config.exec;
    let fresh: Vec<Vec<CheckResult>> = exec.install(config.jobs, || {
        exec.map(&groups, |(p, tasks)| evaluate_prime(*p, tasks))
    });
    let mut computed: HashMap<Task, CheckResult> = HashMap::new();
    for r in fresh.into_iter().flatten() {
        let key = Task {
            check_id: r.check_id,
            p: r.p,
            params: r.params.clone(),
        };
        computed.insert(key, r);
    }
    let mut out = Vec::with_capacity(tasks.len());
    let mut appended = Vec::new();
    for t in &tasks {
        if let Some(r) = cache.as_ref().and_then(|c| c.get(t)) {
            out.push(r.clone());
        } else {
            let r = computed.remove(t).ok_or_else(|| {
                Error::Inconsistent(format!("no result for {} p={}", t.check_id, t.p))
            })?;
            appended.push(r.clone());
            out.push(r);
        }
    }
    if let Some(c) = cache.as_mut() {
        c.append(&appended)?;
    }
    Ok(out)
}

/// Executes, writes the results to `out` and the summary table to `err`.
/// Returns the process exit code: 0 iff nothing failed.
pub fn run(config: &Config, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let results = execute(config)?;
    write_results(out, &results, config.format)?;
    let summary = Summary::of(&results);
    write!(err, "{}", summary.table())?;
    Ok(if summary.failed() == 0 { 0 } else { 1 })
}
